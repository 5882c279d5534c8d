#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chalk {

// Input that fails schema/shape validation.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation that did not meet its residual/tolerance contract.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec = std::vector<double>;

// Dense row-major matrix. Sizes here are tiny (phase space dim <= 32),
// so everything is plain O(n^3) with no blocking.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Mat identity(std::size_t n);
    static Mat from_rows(const std::vector<Vec>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    Mat transposed() const;
    Mat block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const;
    void set_block(std::size_t i0, std::size_t j0, const Mat& b);

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double s) { return a *= s; }
    friend Mat operator*(double s, Mat a) { return a *= s; }
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Vec operator*(const Mat& a, const Vec& v);

    double norm_inf() const;   // max row sum
    double max_abs() const;    // entrywise max
    double norm_fro() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Mat operator-(Mat a) { return a *= -1.0; }

// Vector helpers
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm_inf(const Vec& v);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);

Mat symmetrize(const Mat& a);
double asymmetry(const Mat& a);  // max |a - a^T|

// LU with partial pivoting.
struct Lu {
    Mat lu;
    std::vector<std::size_t> piv;
    int sign = 1;
    bool singular = false;
};
Lu lu_factor(const Mat& a, double pivot_tol = 0.0);
Vec lu_solve(const Lu& f, const Vec& b);
Mat lu_solve(const Lu& f, const Mat& b);
Mat inverse(const Mat& a);
double determinant(const Mat& a);
Vec solve(const Mat& a, const Vec& b);
Mat solve(const Mat& a, const Mat& b);

// Cholesky of a symmetric positive definite matrix; lower factor.
// Throws NumericError if the matrix is not numerically PD.
Mat cholesky(const Mat& a);
bool is_spd(const Mat& a, double sym_tol = 1e-8);

// Symmetric eigendecomposition (cyclic Jacobi). Eigenvalues ascending,
// eigenvectors in the columns of V.
struct EigSym {
    Vec values;
    Mat vectors;
};
EigSym eig_sym(const Mat& a);

// Symmetric matrix functions through the eigendecomposition.
// Eigenvalues below floor_rel * max(|lambda|) are an error for the
// inverse-type maps (matrix not numerically SPD).
Mat sqrtm_spd(const Mat& a, double floor_rel = 1e-14);
Mat invsqrtm_spd(const Mat& a, double floor_rel = 1e-14);

// Matrix exponential, scaling and squaring with a Taylor core.
Mat expm(const Mat& a);

// Complex dense helpers (used by the metaplectic parameter maps and the
// eigenvalue oracle). Row-major like Mat.
using cdouble = std::complex<double>;
class CMat {
  public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    CMat(const Mat& re, const Mat& im);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    cdouble& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    cdouble operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Mat real() const;
    Mat imag() const;
    friend CMat operator*(const CMat& a, const CMat& b);

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cdouble> a_;
};
cdouble cdet(CMat a);
CMat csolve(CMat a, CMat b);  // a x = b

// Deterministic 64-bit PRNG (splitmix64) so every randomized example is
// reproducible from its seed alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();                     // [0,1)
    double uniform(double a, double b);   // [a,b)
    double normal();
    Vec vector(std::size_t n, double a = -1.0, double b = 1.0);
    Mat matrix(std::size_t r, std::size_t c, double a = -1.0, double b = 1.0);
    Mat symmetric(std::size_t n, double scale = 1.0);
    // SPD with eigenvalues log-uniform in [lo, hi].
    Mat spd(std::size_t n, double lo = 0.3, double hi = 3.0);
    Mat orthogonal(std::size_t n);

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace chalk
