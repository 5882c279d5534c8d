#include "chalk/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace chalk {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) throw InputError("from_rows: empty matrix");
    Mat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) throw InputError("from_rows: ragged rows");
        for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    Mat b(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
}

void Mat::set_block(std::size_t i0, std::size_t j0, const Mat& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

Mat& Mat::operator+=(const Mat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix size mismatch in +");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix size mismatch in -");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw InputError("matrix size mismatch in *");
    Mat c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& v) {
    if (a.cols_ != v.size()) throw InputError("matrix/vector size mismatch");
    Vec r(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
    return r;
}

double Mat::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

double Mat::norm_fro() const {
    double s = 0.0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw InputError("vector size mismatch in dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vec operator+(Vec a, const Vec& b) {
    if (a.size() != b.size()) throw InputError("vector size mismatch in +");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

Vec operator-(Vec a, const Vec& b) {
    if (a.size() != b.size()) throw InputError("vector size mismatch in -");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

Vec operator*(double s, Vec a) {
    for (double& x : a) x *= s;
    return a;
}

Mat symmetrize(const Mat& a) {
    Mat s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

double asymmetry(const Mat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

Lu lu_factor(const Mat& a, double pivot_tol) {
    if (a.rows() != a.cols()) throw InputError("lu_factor: matrix not square");
    const std::size_t n = a.rows();
    Lu f;
    f.lu = a;
    f.piv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(f.lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(f.lu(i, k)) > best) { best = std::abs(f.lu(i, k)); p = i; }
        f.piv[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
            f.sign = -f.sign;
        }
        if (best <= pivot_tol) { f.singular = true; continue; }
        const double d = f.lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            f.lu(i, k) /= d;
            const double lik = f.lu(i, k);
            if (lik == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= lik * f.lu(k, j);
        }
    }
    return f;
}

Vec lu_solve(const Lu& f, const Vec& b) {
    if (f.singular) throw NumericError("lu_solve: singular matrix");
    const std::size_t n = f.lu.rows();
    if (b.size() != n) throw InputError("lu_solve: size mismatch");
    Vec x = b;
    // P A = L U: apply the recorded transpositions, then the two solves
    for (std::size_t k = 0; k < n; ++k) std::swap(x[k], x[f.piv[k]]);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) x[i] -= f.lu(i, k) * x[k];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

Mat lu_solve(const Lu& f, const Mat& b) {
    Mat x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        Vec col(b.rows());
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        Vec s = lu_solve(f, col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = s[i];
    }
    return x;
}

Mat inverse(const Mat& a) { return lu_solve(lu_factor(a), Mat::identity(a.rows())); }

double determinant(const Mat& a) {
    Lu f = lu_factor(a);
    if (f.singular) return 0.0;
    double d = f.sign;
    for (std::size_t i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
    return d;
}

Vec solve(const Mat& a, const Vec& b) { return lu_solve(lu_factor(a), b); }
Mat solve(const Mat& a, const Mat& b) { return lu_solve(lu_factor(a), b); }

Mat cholesky(const Mat& a) {
    if (a.rows() != a.cols()) throw InputError("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Mat l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw NumericError("cholesky: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

bool is_spd(const Mat& a, double sym_tol) {
    if (a.rows() != a.cols()) return false;
    if (asymmetry(a) > sym_tol * std::max(1.0, a.max_abs())) return false;
    try {
        cholesky(symmetrize(a));
        return true;
    } catch (const NumericError&) {
        return false;
    }
}

EigSym eig_sym(const Mat& a_in) {
    if (a_in.rows() != a_in.cols()) throw InputError("eig_sym: matrix not square");
    const std::size_t n = a_in.rows();
    Mat a = symmetrize(a_in);
    Mat v = Mat::identity(n);
    // cyclic Jacobi sweeps
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= 1e-300) break;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
        scale = std::max(scale, std::sqrt(off));
        if (std::sqrt(off) <= 1e-16 * std::max(1.0, scale) * n) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-18 * std::max(1.0, scale)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // sort ascending
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    EigSym e;
    e.values.resize(n);
    e.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        e.values[j] = a(idx[j], idx[j]);
        for (std::size_t i = 0; i < n; ++i) e.vectors(i, j) = v(i, idx[j]);
    }
    return e;
}

namespace {

Mat spd_power(const Mat& a, double p, double floor_rel) {
    EigSym e = eig_sym(a);
    const std::size_t n = a.rows();
    double lmax = 0.0;
    for (double l : e.values) lmax = std::max(lmax, std::abs(l));
    Mat d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (e.values[i] <= floor_rel * std::max(1.0, lmax))
            throw NumericError("matrix not numerically SPD (eigenvalue below floor)");
        d(i, i) = std::pow(e.values[i], p);
    }
    return e.vectors * d * e.vectors.transposed();
}

}  // namespace

Mat sqrtm_spd(const Mat& a, double floor_rel) { return spd_power(a, 0.5, floor_rel); }
Mat invsqrtm_spd(const Mat& a, double floor_rel) { return spd_power(a, -0.5, floor_rel); }

Mat expm(const Mat& a) {
    if (a.rows() != a.cols()) throw InputError("expm: matrix not square");
    const std::size_t n = a.rows();
    double nrm = a.norm_inf();
    int squarings = 0;
    Mat x = a;
    while (nrm > 0.5) {
        x *= 0.5;
        nrm *= 0.5;
        ++squarings;
    }
    // Taylor series; with ||X|| <= 1/2 thirty terms are far below eps.
    Mat e = Mat::identity(n);
    Mat term = Mat::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = term * x;
        term *= 1.0 / k;
        e += term;
        if (term.max_abs() < 1e-300) break;
    }
    for (int k = 0; k < squarings; ++k) e = e * e;
    return e;
}

CMat::CMat(const Mat& re, const Mat& im) : rows_(re.rows()), cols_(re.cols()), a_(re.rows() * re.cols()) {
    if (re.rows() != im.rows() || re.cols() != im.cols()) throw InputError("CMat: size mismatch");
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = {re(i, j), im(i, j)};
}

Mat CMat::real() const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).real();
    return r;
}

Mat CMat::imag() const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).imag();
    return r;
}

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw InputError("CMat size mismatch in *");
    CMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cdouble aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

cdouble cdet(CMat a) {
    const std::size_t n = a.rows();
    cdouble d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (std::abs(a(p, k)) == 0.0) return 0.0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            d = -d;
        }
        d *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cdouble f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

CMat csolve(CMat a, CMat b) {
    const std::size_t n = a.rows();
    if (b.rows() != n) throw InputError("csolve: size mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (std::abs(a(p, k)) == 0.0) throw NumericError("csolve: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(p, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cdouble f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    CMat x(n, b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = n; i-- > 0;) {
            cdouble s = b(i, j);
            for (std::size_t k2 = i + 1; k2 < n; ++k2) s -= a(i, k2) * x(k2, j);
            x(i, j) = s / a(i, i);
        }
    return x;
}

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return (next() >> 11) * 0x1.0p-53; }
double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 1e-300);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Vec Rng::vector(std::size_t n, double a, double b) {
    Vec v(n);
    for (double& x : v) x = uniform(a, b);
    return v;
}

Mat Rng::matrix(std::size_t r, std::size_t c, double a, double b) {
    Mat m(r, c);
    for (double& x : m.data()) x = uniform(a, b);
    return m;
}

Mat Rng::symmetric(std::size_t n, double scale) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = scale * uniform(-1.0, 1.0);
    return m;
}

Mat Rng::spd(std::size_t n, double lo, double hi) {
    Mat q = orthogonal(n);
    Mat d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        d(i, i) = std::exp(uniform(std::log(lo), std::log(hi)));
    return symmetrize(q * d * q.transposed());
}

Mat Rng::orthogonal(std::size_t n) {
    // Gram-Schmidt on a Gaussian matrix
    Mat g(n, n);
    for (double& x : g.data()) x = normal();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += g(i, j) * g(i, k);
            for (std::size_t i = 0; i < n; ++i) g(i, j) -= s * g(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += g(i, j) * g(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) return orthogonal(n);  // essentially impossible; redraw
        for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
    }
    return g;
}

}  // namespace chalk
