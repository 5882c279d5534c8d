#pragma once

#include <functional>
#include <optional>

#include "chalk/factorization.hpp"
#include "chalk/symplectic.hpp"

namespace chalk {

// Uniform time grid 0 = t_0 < ... < t_K = T with t_k = k * (T / K).
Vec uniform_times(double T, double dt);

// H(z, t) = 1/2 M(t) z . z + m(t) . z with M(t) symmetric. Closed-form
// Hamiltonians evaluate their callables; sampled ones interpolate linearly
// between grid nodes.
class QuadraticHamiltonian {
  public:
    using MatFn = std::function<Mat(double)>;
    using VecFn = std::function<Vec(double)>;

    QuadraticHamiltonian() = default;  // empty; fill via the factories

    static QuadraticHamiltonian closed_form(std::size_t n, MatFn m_of_t, VecFn m_vec_of_t,
                                            double T);
    static QuadraticHamiltonian constant(Mat m, Vec m_vec, double T);
    static QuadraticHamiltonian sampled(Vec times, std::vector<Mat> ms, std::vector<Vec> mvecs);

    std::size_t n() const { return n_; }
    double horizon() const { return T_; }
    bool sampled_repr() const { return sampled_; }
    bool has_linear_term() const { return has_linear_; }

    Mat coefficient_matrix(double t) const;  // symmetry-checked
    Vec coefficient_vector(double t) const;
    double value(const Vec& z, double t) const;

  private:
    std::size_t n_ = 0;
    double T_ = 0.0;
    bool sampled_ = false;
    bool has_linear_ = false;
    MatFn mfun_;
    VecFn vfun_;
    Vec times_;
    std::vector<Mat> msamples_;
    std::vector<Vec> vsamples_;
};

// Path of symplectic matrices S(t_k) with S(0) = I on a uniform grid,
// optionally with the translation path z_k of the affine flow f = S T(z).
class SymplecticIsotopy {
  public:
    SymplecticIsotopy(Vec times, std::vector<SymplecticMatrix> s,
                      std::optional<std::vector<Vec>> z = std::nullopt);

    std::size_t n() const { return s_[0].n(); }
    std::size_t steps() const { return times_.size() - 1; }
    double dt() const { return times_.size() > 1 ? times_[1] - times_[0] : 0.0; }
    double horizon() const { return times_.back(); }
    const Vec& times() const { return times_; }
    const std::vector<SymplecticMatrix>& frames() const { return s_; }
    bool has_translation() const { return z_.has_value(); }
    const std::vector<Vec>& translation_path() const;

    const SymplecticMatrix& at(std::size_t k) const { return s_[k]; }
    // nearest grid frame; isotopies are stored densely, not interpolated
    std::size_t index_of(double t) const;
    const SymplecticMatrix& at_time(double t) const { return s_[index_of(t)]; }
    AffineSymplectic affine(std::size_t k) const;  // z -> S_k z + S_k z_k

  private:
    Vec times_;
    std::vector<SymplecticMatrix> s_;
    std::optional<std::vector<Vec>> z_;
};

// Fourth-order finite differences along a sampled path (one-sided stencils
// of the same order at the ends; falls back to second order on tiny grids).
std::vector<Mat> path_derivative(const std::vector<Mat>& path, double dt);
std::vector<Vec> path_derivative(const std::vector<Vec>& path, double dt);

// M(t) = -J S'(t) S(t)^-1, symmetrized; the quadratic generator of the path.
QuadraticHamiltonian generator_from_isotopy(const SymplecticIsotopy& iso);

enum class AffineOrder { STthenT, TthenS };  // f = S T(z) vs g = T(z) S

// Adds the linear coefficient of the affine flow to the quadratic generator.
QuadraticHamiltonian affine_generator(const SymplecticIsotopy& iso,
                                      AffineOrder order = AffineOrder::STthenT);

// Structure-preserving integration of S' = J M(t) S by the Cayley midpoint
// update; every frame is symplectic to solver roundoff independent of dt.
// The translation path integrates z' = S^-1 J m(t) with the same stepping.
SymplecticIsotopy flow_from_quadratic(const QuadraticHamiltonian& h, double T, double dt);

// z(t) = e^{tJM} z0 + (JM)^-1 (e^{tJM} - I) J m for constant coefficients,
// evaluated through one augmented matrix exponential so the singular-JM
// limit needs no special casing.
AffineSymplectic closed_form_affine_flow(const Mat& m, const Vec& mvec, double t);

// H#K, Hbar, H o g of the composition/inversion/conjugation calculus.
QuadraticHamiltonian compose_hamiltonians(const QuadraticHamiltonian& h,
                                          const QuadraticHamiltonian& k, double T, double dt);
QuadraticHamiltonian inverse_hamiltonian(const QuadraticHamiltonian& h, double T, double dt);
QuadraticHamiltonian conjugate_generator(const QuadraticHamiltonian& h,
                                         const SymplecticMatrix& g);

// Per-point pre-Iwasawa data of an isotopy together with the Hamiltonians
// H_V, H_L, H_U and the reduced H_R (no p^2 term by construction).
struct IwasawaSum {
    Vec times;
    std::vector<Mat> p_path, l_path, q_path, x_path, y_path, z_path;
    std::vector<Mat> n_path;  // x^2 block of H_R
    QuadraticHamiltonian h_v, h_l, h_u, h_r;
};
IwasawaSum iwasawa_sum(const SymplecticIsotopy& iso);

// Generator of a path of symplectic rotations: H = 1/2 Z (x^2 + p^2) with
// Z = Y' X^T - X' Y^T. Samples must lie in U(n).
QuadraticHamiltonian unitary_generator(const SymplecticIsotopy& u_path, double tol = 1e-8);

// A (possibly nonlinear) time-dependent flow map with optional analytic
// derivatives; finite differences fill in whatever is missing.
struct NonlinearFlow {
    std::function<Vec(double, const Vec&)> map;
    std::function<Vec(double, const Vec&)> dmap_dt;   // may be null
    std::function<Mat(double, const Vec&)> jacobian;  // may be null
};

// H(z,t) = -Int_0^1 sigma(f'_t f_t^-1(lambda z), z) dlambda, Gauss-Legendre
// in lambda, damped Newton for the inverse map.
std::function<double(const Vec&, double)> generator_from_nonlinear_isotopy(
    NonlinearFlow f, int quad_points = 16);

Vec gauss_legendre_nodes(int n);    // on [0, 1]
Vec gauss_legendre_weights(int n);

}  // namespace chalk
