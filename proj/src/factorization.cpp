#include "chalk/factorization.hpp"

#include <cmath>

namespace chalk {

Mat PreIwasawa::local_part() const {
    const std::size_t n = p.rows();
    Mat r(2 * n, 2 * n);
    Mat linv = inverse(l);
    r.set_block(0, 0, linv);
    r.set_block(n, 0, p * linv);
    r.set_block(n, n, l);
    return r;
}

Mat PreIwasawa::reconstruct() const { return local_part() * u.matrix(); }

PreIwasawa pre_iwasawa(const SymplecticMatrix& s, double tol) {
    Mat a = s.block_a(), b = s.block_b(), c = s.block_c(), d = s.block_d();
    Mat g = symmetrize(a * a.transposed() + b * b.transposed());  // SPD for symplectic S
    Mat p = (c * a.transposed() + d * b.transposed()) * inverse(g);
    const double drift = asymmetry(p);
    if (drift > 1e-8 * std::max(1.0, p.max_abs()))
        throw NumericError("pre_iwasawa: P asymmetry " + std::to_string(drift) +
                           " beyond roundoff");
    p = symmetrize(p);
    Mat l = invsqrtm_spd(g);
    Mat x = l * a;
    Mat y = l * b;
    PreIwasawa f{std::move(p), std::move(l), unitary_from_blocks(x, y), x, y};
    const double res = (f.reconstruct() - s.matrix()).max_abs();
    if (!(res <= tol * std::max(1.0, s.matrix().max_abs())))
        throw NumericError("pre_iwasawa: reconstruction residual " + std::to_string(res));
    return f;
}

PreIwasawa dilation_pre_iwasawa(const Mat& k, double tol) {
    if (k.rows() != k.cols()) throw InputError("dilation_pre_iwasawa: K must be square");
    const std::size_t n = k.rows();
    if (std::abs(determinant(k)) <= 1e-12 * std::max(1.0, std::pow(k.norm_inf(), double(n))))
        throw InputError("dilation_pre_iwasawa: K singular");
    Mat ktk = symmetrize(k.transposed() * k);
    Mat l = sqrtm_spd(ktk);
    Mat x = l * inverse(k);
    Mat y(n, n);
    PreIwasawa f{Mat(n, n), std::move(l), unitary_from_blocks(x, y), x, y};
    const double res = (f.reconstruct() - rescale(k).matrix()).max_abs();
    if (!(res <= tol * std::max(1.0, f.l.max_abs())))
        throw NumericError("dilation_pre_iwasawa: residual " + std::to_string(res));
    return f;
}

Mat FreeFactors::reconstruct() const {
    const std::size_t n = p1.rows();
    return shear(p1).matrix() * rescale(l_mid).matrix() * standard_J(n) *
           shear(p2).matrix();
}

FreeFactors free_factorization(const SymplecticMatrix& s, double tol) {
    const std::size_t n = s.n();
    Mat b = s.block_b();
    const double thresh = config().free_det_rel * std::pow(std::max(b.norm_inf(), 1e-30), double(n));
    if (std::abs(determinant(b)) <= thresh)
        throw NotFreeError("free_factorization: B block singular (matrix not free)");
    Mat binv = inverse(b);
    Mat p1 = s.block_d() * binv;
    Mat p2 = binv * s.block_a();
    if (asymmetry(p1) > 1e-8 * std::max(1.0, p1.max_abs()) ||
        asymmetry(p2) > 1e-8 * std::max(1.0, p2.max_abs()))
        throw NumericError("free_factorization: D B^-1 or B^-1 A not symmetric");
    FreeFactors f{symmetrize(p1), std::move(binv), symmetrize(p2)};
    const double res = (f.reconstruct() - s.matrix()).max_abs();
    if (!(res <= tol * std::max(1.0, s.matrix().max_abs())))
        throw NumericError("free_factorization: reconstruction residual " + std::to_string(res));
    return f;
}

LocalElement::LocalElement(Mat p, Mat l, std::optional<Vec> shift)
    : p_(std::move(p)), l_(std::move(l)), shift_(std::move(shift)) {
    if (p_.rows() != p_.cols() || l_.rows() != l_.cols() || p_.rows() != l_.rows())
        throw InputError("LocalElement: P/L size mismatch");
    if (asymmetry(p_) > 1e-8 * std::max(1.0, p_.max_abs()))
        throw InputError("LocalElement: P not symmetric");
    p_ = symmetrize(p_);
    const std::size_t n = p_.rows();
    if (std::abs(determinant(l_)) <= 1e-12 * std::max(1.0, std::pow(l_.norm_inf(), double(n))))
        throw InputError("LocalElement: L singular");
    if (shift_ && shift_->size() != 2 * n) throw InputError("LocalElement: shift size mismatch");
}

LocalElement LocalElement::identity(std::size_t n) {
    return LocalElement(Mat(n, n), Mat::identity(n));
}

Mat LocalElement::q() const { return p_ * chalk::inverse(l_); }

Vec LocalElement::apply(const Vec& z) const {
    const std::size_t n = p_.rows();
    if (z.size() != 2 * n) throw InputError("LocalElement::apply: size mismatch");
    Vec x(z.begin(), z.begin() + n), p(z.begin() + n, z.end());
    // V_{-P} M_L z = (L^-1 x, P L^-1 x + L^T p)
    Vec lx = solve(l_, x);
    Vec out(2 * n);
    Vec plx = p_ * lx;
    Vec ltp = l_.transposed() * p;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lx[i];
        out[n + i] = plx[i] + ltp[i];
    }
    if (shift_)
        for (std::size_t i = 0; i < 2 * n; ++i) out[i] += (*shift_)[i];
    return out;
}

Mat LocalElement::dense_linear() const {
    const std::size_t n = p_.rows();
    Mat m(2 * n, 2 * n);
    Mat linv = chalk::inverse(l_);
    m.set_block(0, 0, linv);
    m.set_block(n, 0, p_ * linv);
    m.set_block(n, n, l_.transposed());
    return m;
}

AffineSymplectic LocalElement::to_affine() const {
    Vec t = shift_ ? *shift_ : Vec(2 * n(), 0.0);
    return AffineSymplectic(SymplecticMatrix(dense_linear()), std::move(t));
}

LocalElement LocalElement::inverse() const {
    // [[L^-1, 0], [P L^-1, L^T]]^-1 = [[L, 0], [-L^-T P, L^-T]]: the inverse
    // carries parameters (-(L^-1)^T P L^-1, L^-1)
    Mat linv = chalk::inverse(l_);
    Mat pinv = symmetrize(-1.0 * (linv.transposed() * p_ * linv));
    LocalElement inv(std::move(pinv), linv);
    if (shift_) {
        Vec t = -1.0 * inv.apply(*shift_);
        // apply() already added inv's (empty) shift; set the translation now
        return LocalElement(inv.p_, inv.l_, std::move(t));
    }
    return inv;
}

LocalElement sp0_compose(const LocalElement& e1, const LocalElement& e2) {
    if (e1.n() != e2.n()) throw InputError("sp0_compose: dimension mismatch");
    // (V_{-P1} M_L1)(V_{-P2} M_L2) = V_{-(P1 + L1^T P2 L1)} M_{L2 L1}
    Mat p = symmetrize(e1.p() + e1.l().transposed() * e2.p() * e1.l());
    Mat l = e2.l() * e1.l();
    std::optional<Vec> shift;
    if (e1.shift() || e2.shift()) {
        // T(t1) R1 T(t2) R2 = T(t1 + R1 t2) R1 R2
        Vec t(2 * e1.n(), 0.0);
        if (e2.shift()) {
            LocalElement lin1(e1.p(), e1.l());
            t = lin1.apply(*e2.shift());
        }
        if (e1.shift()) t = t + *e1.shift();
        shift = std::move(t);
    }
    return LocalElement(std::move(p), std::move(l), std::move(shift));
}

}  // namespace chalk
