#include "chalk/symplectic.hpp"

#include <cmath>
#include <utility>

namespace chalk {

Config& config() {
    static Config cfg;
    return cfg;
}

PhasePoint::PhasePoint(Vec x_, Vec p_) : x(std::move(x_)), p(std::move(p_)) {
    if (x.size() != p.size()) throw InputError("PhasePoint: x/p dimension mismatch");
}

PhasePoint::PhasePoint(const Vec& z) {
    if (z.size() % 2 != 0) throw InputError("PhasePoint: odd-length vector");
    const std::size_t n = z.size() / 2;
    x.assign(z.begin(), z.begin() + n);
    p.assign(z.begin() + n, z.end());
}

Vec PhasePoint::stacked() const {
    Vec z(2 * n());
    for (std::size_t i = 0; i < n(); ++i) {
        z[i] = x[i];
        z[n() + i] = p[i];
    }
    return z;
}

Mat standard_J(std::size_t n) {
    if (n < 1) throw InputError("standard_J: n must be >= 1");
    Mat j(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, n + i) = 1.0;
        j(n + i, i) = -1.0;
    }
    return j;
}

double symplectic_form(const PhasePoint& z, const PhasePoint& zp) {
    if (z.n() != zp.n()) throw InputError("symplectic_form: dimension mismatch");
    return dot(z.p, zp.x) - dot(zp.p, z.x);
}

double symplectic_form(const Vec& z, const Vec& zp) {
    return symplectic_form(PhasePoint(z), PhasePoint(zp));
}

namespace {

// residual of F^T J F against sign*J, relative to ||F||^2
double form_residual(const Mat& f, double sign) {
    const std::size_t n = f.rows() / 2;
    Mat j = standard_J(n);
    Mat r = f.transposed() * j * f - (sign * j);
    return r.max_abs() / std::max(1.0, f.max_abs() * f.max_abs());
}

}  // namespace

LinearMapKind classify_linear_map(const Mat& f, double tol) {
    if (f.rows() != f.cols() || f.rows() % 2 != 0 || f.rows() == 0)
        throw InputError("classify_linear_map: matrix must be square with even dimension");
    if (form_residual(f, 1.0) <= tol) return LinearMapKind::Symplectic;
    if (form_residual(f, -1.0) <= tol) return LinearMapKind::Antisymplectic;
    return LinearMapKind::Neither;
}

SymplecticMatrix::SymplecticMatrix(Mat m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
        throw InputError("SymplecticMatrix: matrix must be square with even dimension");
    n_ = m_.rows() / 2;
    const double res = form_residual(m_, 1.0);
    if (!(res <= tol))
        throw NumericError("SymplecticMatrix: S^T J S - J residual " + std::to_string(res) +
                           " exceeds tolerance " + std::to_string(tol));
}

SymplecticMatrix SymplecticMatrix::identity(std::size_t n) {
    return SymplecticMatrix(Mat::identity(2 * n), n, true);
}

SymplecticMatrix SymplecticMatrix::inverse() const {
    Mat inv(2 * n_, 2 * n_);
    inv.set_block(0, 0, block_d().transposed());
    inv.set_block(0, n_, -block_b().transposed());
    inv.set_block(n_, 0, -block_c().transposed());
    inv.set_block(n_, n_, block_a().transposed());
    return SymplecticMatrix(std::move(inv), n_, true);
}

SymplecticMatrix compose(const SymplecticMatrix& a, const SymplecticMatrix& b) {
    if (a.n() != b.n()) throw InputError("compose: dimension mismatch");
    Mat m = a.matrix() * b.matrix();
    // closure holds exactly; the certificate just needs headroom for the
    // product roundoff
    const double tol = config().tol_symp * 4.0 *
                       std::max(1.0, a.matrix().max_abs() * b.matrix().max_abs());
    return SymplecticMatrix(std::move(m), tol);
}

SymplecticMatrix shear(const Mat& p, double sym_tol) {
    if (p.rows() != p.cols()) throw InputError("shear: P must be square");
    if (asymmetry(p) > sym_tol * std::max(1.0, p.max_abs()))
        throw InputError("shear: P not symmetric");
    const std::size_t n = p.rows();
    Mat m = Mat::identity(2 * n);
    m.set_block(n, 0, symmetrize(p));
    return SymplecticMatrix(std::move(m));
}

SymplecticMatrix rescale(const Mat& l) {
    if (l.rows() != l.cols()) throw InputError("rescale: L must be square");
    const std::size_t n = l.rows();
    const double det = determinant(l);
    if (std::abs(det) <= 1e-12 * std::max(1.0, std::pow(l.norm_inf(), double(n))))
        throw InputError("rescale: L numerically singular");
    Mat m(2 * n, 2 * n);
    m.set_block(0, 0, inverse(l));
    m.set_block(n, n, l.transposed());
    return SymplecticMatrix(std::move(m));
}

SymplecticMatrix standard_J_matrix(std::size_t n) { return SymplecticMatrix(standard_J(n)); }

SymplecticMatrix random_symplectic(std::size_t n, std::uint64_t seed, int word_length) {
    Rng rng(seed);
    Mat m = Mat::identity(2 * n);
    for (int k = 0; k < word_length; ++k) {
        const std::uint64_t pick = rng.next() % 3;
        Mat g;
        if (pick == 0) {
            g = standard_J(n);
        } else if (pick == 1) {
            g = shear(rng.symmetric(n)).matrix();
        } else {
            Mat l;
            do {
                l = Mat::identity(n) + rng.matrix(n, n, -0.25, 0.25);
            } while (std::abs(determinant(l)) < 0.1);
            g = rescale(l).matrix();
        }
        m = g * m;
    }
    const double tol = config().tol_symp * std::max(1.0, m.max_abs() * m.max_abs()) *
                       std::max(1.0, double(word_length));
    return SymplecticMatrix(std::move(m), tol);
}

AffineSymplectic::AffineSymplectic(SymplecticMatrix s, Vec shift)
    : s_(std::move(s)), t_(std::move(shift)) {
    if (t_.size() != 2 * s_.n()) throw InputError("AffineSymplectic: shift dimension mismatch");
}

AffineSymplectic AffineSymplectic::translation(Vec z) {
    if (z.size() % 2 != 0 || z.empty()) throw InputError("translation: bad dimension");
    const std::size_t n = z.size() / 2;
    return AffineSymplectic(SymplecticMatrix::identity(n), std::move(z));
}

AffineSymplectic AffineSymplectic::linear(SymplecticMatrix s) {
    Vec zero(2 * s.n(), 0.0);
    return AffineSymplectic(std::move(s), std::move(zero));
}

Vec AffineSymplectic::apply(const Vec& z) const { return s_.apply(z) + t_; }

AffineSymplectic AffineSymplectic::inverse() const {
    SymplecticMatrix si = s_.inverse();
    Vec t = -1.0 * si.apply(t_);
    return AffineSymplectic(std::move(si), std::move(t));
}

AffineSymplectic compose(const AffineSymplectic& a, const AffineSymplectic& b) {
    // (a o b)(z) = S_a (S_b z + t_b) + t_a
    SymplecticMatrix s = compose(a.linear_part(), b.linear_part());
    Vec t = a.linear_part().apply(b.shift()) + a.shift();
    return AffineSymplectic(std::move(s), std::move(t));
}

bool is_symplectic_rotation(const Mat& u, double tol) {
    if (u.rows() != u.cols() || u.rows() % 2 != 0) return false;
    const std::size_t n = u.rows() / 2;
    if ((u.transposed() * u - Mat::identity(2 * n)).max_abs() > tol) return false;
    // block structure [[X, Y], [-Y, X]]
    if ((u.block(0, 0, n, n) - u.block(n, n, n, n)).max_abs() > tol) return false;
    if ((u.block(0, n, n, n) + u.block(n, 0, n, n)).max_abs() > tol) return false;
    return form_residual(u, 1.0) <= tol;
}

SymplecticMatrix unitary_from_blocks(const Mat& x, const Mat& y, double tol) {
    if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
        throw InputError("unitary_from_blocks: block size mismatch");
    const std::size_t n = x.rows();
    Mat u(2 * n, 2 * n);
    u.set_block(0, 0, x);
    u.set_block(0, n, y);
    u.set_block(n, 0, -y);
    u.set_block(n, n, x);
    if (!is_symplectic_rotation(u, tol))
        throw NumericError("unitary_from_blocks: X + iY not unitary within tolerance");
    return SymplecticMatrix(std::move(u), tol);
}

}  // namespace chalk
