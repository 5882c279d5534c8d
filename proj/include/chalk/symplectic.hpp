#pragma once

#include "chalk/linalg.hpp"

namespace chalk {

// Tolerances used across the library; all residual checks are relative to
// the scale of the data they certify.
struct Config {
    double tol_symp = 1e-9;       // symplecticity certificate, relative to ||S||^2
    double tol_residual = 1e-8;   // factorization reconstruction residuals
    double free_det_rel = 1e-10;  // |det B| > free_det_rel * ||B||^n for free matrices
    int hausdorff_dirs = 4096;    // default support-function direction count
    double mvee_tol = 1e-7;
    int mvee_max_iters = 100000;
    double default_dt = 1e-3;     // grid step when a scenario leaves it unset
    bool debug_crosscheck = false;  // dual-route assertions in the Gaussian maps
};
Config& config();

// Phase-space point z = (x, p), position block first.
struct PhasePoint {
    Vec x, p;

    PhasePoint() = default;
    PhasePoint(Vec x_, Vec p_);
    explicit PhasePoint(const Vec& z);  // split a stacked 2n-vector

    std::size_t n() const { return x.size(); }
    Vec stacked() const;
};

// Standard symplectic form matrix J = [[0, I], [-I, 0]].
Mat standard_J(std::size_t n);

// sigma(z, z') = p.x' - p'.x
double symplectic_form(const PhasePoint& z, const PhasePoint& zp);
double symplectic_form(const Vec& z, const Vec& zp);

enum class LinearMapKind { Symplectic, Antisymplectic, Neither };
LinearMapKind classify_linear_map(const Mat& f, double tol = config().tol_symp);

// A 2n x 2n matrix certified to satisfy S^T J S = J at construction.
// All members are value types; instances are immutable after construction.
class SymplecticMatrix {
  public:
    explicit SymplecticMatrix(Mat m, double tol = config().tol_symp);

    std::size_t n() const { return n_; }
    std::size_t dim() const { return 2 * n_; }
    const Mat& matrix() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    Mat block_a() const { return m_.block(0, 0, n_, n_); }
    Mat block_b() const { return m_.block(0, n_, n_, n_); }
    Mat block_c() const { return m_.block(n_, 0, n_, n_); }
    Mat block_d() const { return m_.block(n_, n_, n_, n_); }

    // S^-1 = [[D^T, -B^T], [-C^T, A^T]]
    SymplecticMatrix inverse() const;
    Vec apply(const Vec& z) const { return m_ * z; }

    // Product re-certified with the tolerance scaled by the factor norms;
    // the group is closed but roundoff grows with ||A|| ||B||.
    friend SymplecticMatrix compose(const SymplecticMatrix& a, const SymplecticMatrix& b);

    static SymplecticMatrix identity(std::size_t n);

  private:
    SymplecticMatrix(Mat m, std::size_t n, bool /*trusted*/) : m_(std::move(m)), n_(n) {}
    Mat m_;
    std::size_t n_;
};

// Generators of Sp(n).
SymplecticMatrix shear(const Mat& p, double sym_tol = 1e-8);   // V_{-P} = [[I,0],[P,I]]
SymplecticMatrix rescale(const Mat& l);                        // M_L = [[L^-1,0],[0,L^T]]
SymplecticMatrix standard_J_matrix(std::size_t n);

// Deterministic word of length k in the generators {J, V_{-P}, M_L}.
SymplecticMatrix random_symplectic(std::size_t n, std::uint64_t seed, int word_length);

// Element of ISp(n), acting as z -> S z + shift  (i.e. T(shift) after S).
class AffineSymplectic {
  public:
    AffineSymplectic(SymplecticMatrix s, Vec shift);
    static AffineSymplectic translation(Vec z);
    static AffineSymplectic linear(SymplecticMatrix s);

    const SymplecticMatrix& linear_part() const { return s_; }
    const Vec& shift() const { return t_; }
    std::size_t n() const { return s_.n(); }

    Vec apply(const Vec& z) const;
    AffineSymplectic inverse() const;
    friend AffineSymplectic compose(const AffineSymplectic& a, const AffineSymplectic& b);

  private:
    SymplecticMatrix s_;
    Vec t_;
};

// U(n) = Sp(n) ∩ O(2n): [[X, Y], [-Y, X]] with X + iY unitary.
bool is_symplectic_rotation(const Mat& u, double tol = 1e-8);
SymplecticMatrix unitary_from_blocks(const Mat& x, const Mat& y, double tol = 1e-8);

}  // namespace chalk
