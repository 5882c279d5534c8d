#include "chalk/gaussian.hpp"

#include <cmath>

namespace chalk {

namespace {

CMat ctranspose(const CMat& a) {
    CMat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

}  // namespace

GaussianState::GaussianState(Mat x, Mat y, Vec center, double hbar, cdouble phase)
    : x_(std::move(x)), y_(std::move(y)), center_(std::move(center)), hbar_(hbar),
      phase_(phase) {
    const std::size_t n = x_.rows();
    if (x_.cols() != n || y_.rows() != n || y_.cols() != n)
        throw InputError("GaussianState: X/Y must be square of equal size");
    if (center_.size() != 2 * n) throw InputError("GaussianState: center must have length 2n");
    if (!(hbar_ > 0.0)) throw InputError("GaussianState: hbar must be positive");
    if (asymmetry(y_) > 1e-8 * std::max(1.0, y_.max_abs()))
        throw InputError("GaussianState: Y not symmetric");
    if (!is_spd(x_)) throw InputError("GaussianState: X not SPD");
    x_ = symmetrize(x_);
    y_ = symmetrize(y_);
    if (std::abs(std::abs(phase_) - 1.0) > 1e-12)
        throw InputError("GaussianState: phase must have unit modulus");
}

GaussianState GaussianState::ground(std::size_t n, double hbar) {
    return GaussianState(Mat::identity(n), Mat(n, n), Vec(2 * n, 0.0), hbar);
}

GaussianState GaussianState::with_phase(cdouble phase) const {
    return GaussianState(x_, y_, center_, hbar_, phase / std::abs(phase));
}

cdouble GaussianState::evaluate(const Vec& u) const {
    const std::size_t n = this->n();
    if (u.size() != n) throw InputError("GaussianState::evaluate: point dimension mismatch");
    Vec x0(center_.begin(), center_.begin() + n);
    Vec p0(center_.begin() + n, center_.end());
    Vec d = u - x0;
    const double qre = dot(d, x_ * d);
    const double qim = dot(d, y_ * d);
    const cdouble expo(-0.5 * qre / hbar_, -0.5 * qim / hbar_ +
                                               (dot(p0, u) - 0.5 * dot(p0, x0)) / hbar_);
    const double norm =
        std::pow(M_PI * hbar_, -double(n) / 4.0) * std::pow(determinant(x_), 0.25);
    return phase_ * norm * std::exp(expo);
}

WignerGaussian wigner_gaussian(const GaussianState& s) {
    const std::size_t n = s.n();
    Mat xinv = inverse(s.x());
    Mat g(2 * n, 2 * n);
    g.set_block(0, 0, s.x() + s.y() * xinv * s.y());
    g.set_block(0, n, s.y() * xinv);
    g.set_block(n, 0, xinv * s.y());
    g.set_block(n, n, xinv);
    g = symmetrize(g);
    // G is symplectic, symmetric positive definite with unit determinant
    SymplecticMatrix certify(g);
    (void)certify;
    if (!is_spd(g)) throw NumericError("wigner_gaussian: G not positive definite");
    return WignerGaussian{std::move(g), s.center(), s.hbar()};
}

CovarianceReport covariance(const GaussianState& s) {
    const std::size_t n = s.n();
    Mat xinv = inverse(s.x());
    Mat sigma(2 * n, 2 * n);
    sigma.set_block(0, 0, xinv);
    sigma.set_block(0, n, -1.0 * (xinv * s.y()));
    sigma.set_block(n, 0, -1.0 * (s.y() * xinv));
    sigma.set_block(n, n, s.x() + s.y() * xinv * s.y());
    sigma = symmetrize(sigma);
    sigma *= 0.5 * s.hbar();
    // saturation lives in the matrix identity D(x,x) D(p,p) - D(x,p)^2 =
    // (hbar^2/4) I; its diagonal entries reduce to the familiar scalar
    // products whenever the mode is uncorrelated with the others
    Mat dxx = sigma.block(0, 0, n, n);
    Mat dxp = sigma.block(0, n, n, n);
    Mat dpp = sigma.block(n, n, n, n);
    Mat sat = dxx * dpp - dxp * dxp;
    Vec rs(n);
    for (std::size_t j = 0; j < n; ++j) rs[j] = sat(j, j);
    return CovarianceReport{std::move(sigma), std::move(rs)};
}

QuantumBlob::QuantumBlob(SymplecticBall b, double hb) : ball(std::move(b)), hbar(hb) {
    if (!(hb > 0.0)) throw InputError("QuantumBlob: hbar must be positive");
    if (std::abs(ball.radius * ball.radius - hb) > 1e-9 * hb)
        throw InputError("QuantumBlob: radius must be sqrt(hbar)");
}

QuantumBlob blob_from_gaussian(const GaussianState& s) {
    // covariance ellipsoid = V_Y M_{X^(1/2)} B(sqrt(hbar))
    Mat xh = sqrtm_spd(s.x());
    SymplecticMatrix blob = compose(shear(-1.0 * s.y()), rescale(xh));
    return QuantumBlob(SymplecticBall(blob, s.center(), std::sqrt(s.hbar())), s.hbar());
}

GaussianState gaussian_from_blob(const QuantumBlob& q) {
    BallNormalForm nf = ball_normal_form(q.ball);
    // local part [[L^-1, 0], [P L^-1, L]] matches V_Y M_{X^(1/2)} at
    // X = L^2, Y = -P
    Mat x = symmetrize(nf.l * nf.l);
    Mat y = -1.0 * nf.p;
    return GaussianState(std::move(x), std::move(y), nf.z0, q.hbar);
}

GaussianState metaplectic_apply(const SymplecticMatrix& s, const GaussianState& state,
                                int maslov) {
    if (s.n() != state.n()) throw InputError("metaplectic_apply: dimension mismatch");
    if (maslov != 0 && maslov != 2) throw InputError("metaplectic_apply: maslov index not in {0, 2}");

    // total matrix acting on the ground state: S * (V_Y M_{X^(1/2)})
    Mat sw = shear(-1.0 * state.y()).matrix() * rescale(sqrtm_spd(state.x())).matrix();
    SymplecticMatrix stot(s.matrix() * sw,
                          config().tol_symp * 1e2 *
                              std::max(1.0, s.matrix().max_abs() * sw.max_abs()));

    PreIwasawa f = pre_iwasawa(stot);
    Mat xnew = symmetrize(f.l * f.l);
    Mat ynew = -1.0 * f.p;

    // principal-branch metaplectic phase from det(A + iB) of the total matrix
    CMat v(stot.block_a(), stot.block_b());
    const cdouble dv = cdet(v);
    if (std::abs(dv) < 1e-14)
        throw NumericError("metaplectic_apply: det(A + iB) vanished");
    cdouble phase = state.phase() * std::exp(cdouble(0.0, -0.5 * std::arg(dv)));
    if (maslov == 2) phase = -phase;

    if (config().debug_crosscheck) {
        // Gamma route: X' + iY' = -i (C + iD)(A + iB)^-1
        CMat w(stot.block_c(), stot.block_d());
        CMat gammaT = csolve(ctranspose(v), ctranspose(w));
        CMat gamma = ctranspose(gammaT);
        Mat xg = gamma.imag();
        Mat yg = -1.0 * gamma.real();
        const double dev = std::max((symmetrize(xg) - xnew).max_abs(),
                                    (symmetrize(yg) - ynew).max_abs());
        if (dev > 1e-10 * std::max(1.0, xnew.max_abs()))
            throw NumericError("metaplectic_apply: Gamma/pre-Iwasawa routes disagree by " +
                               std::to_string(dev));
    }

    return GaussianState(std::move(xnew), std::move(ynew), s.apply(state.center()),
                         state.hbar(), phase);
}

GaussianState heisenberg_weyl_apply(const Vec& z, const GaussianState& state) {
    if (z.size() != 2 * state.n()) throw InputError("heisenberg_weyl_apply: dimension mismatch");
    // T(z) T(z0) = e^{i sigma(z, z0) / 2 hbar} T(z + z0)
    const double s = symplectic_form(z, state.center());
    cdouble phase = state.phase() * std::exp(cdouble(0.0, 0.5 * s / state.hbar()));
    return GaussianState(state.x(), state.y(), state.center() + z, state.hbar(), phase);
}

GaussianTransport gaussian_transport(const GaussianState& s, const GaussianState& s2) {
    if (s.n() != s2.n()) throw InputError("gaussian_transport: dimension mismatch");
    if (std::abs(s.hbar() - s2.hbar()) > 1e-12 * s.hbar())
        throw InputError("gaussian_transport: hbar mismatch");
    Mat l2 = invsqrtm_spd(s.x()) * sqrtm_spd(s2.x());
    Mat p2 = symmetrize(s2.y() - l2.transposed() * s.y() * l2);
    // linear part V_{P''} M_{L''} = shear(-P'') rescale(L'')
    LocalElement rlin(-1.0 * p2, l2);
    Vec rz0 = rlin.apply(s.center());
    Vec z2 = s2.center() - rz0;
    const double chi = -0.5 * symplectic_form(s2.center(), rz0);  // 1/2 sigma(z0', -R z0)
    return GaussianTransport{chi, std::move(z2), std::move(p2), std::move(l2)};
}

GaussianState apply_transport(const GaussianTransport& t, const GaussianState& s) {
    LocalElement rlin(-1.0 * t.p2, t.l2);
    GaussianState mid = metaplectic_apply(SymplecticMatrix(rlin.dense_linear()), s);
    GaussianState out = heisenberg_weyl_apply(t.z2, mid);
    return out.with_phase(out.phase() * std::exp(cdouble(0.0, t.chi / s.hbar())));
}

Mat wigner_numeric_1d(const GaussianState& s, const Vec& x_grid, const Vec& p_grid, int nodes) {
    if (s.n() != 1) throw InputError("wigner_numeric_1d: n = 1 only");
    if (nodes < 1024) throw InputError("wigner_numeric_1d: need at least 1024 nodes");
    const double hbar = s.hbar();
    const double halfwidth = 8.0 * std::sqrt(hbar / s.x()(0, 0));
    const double dy = 2.0 * halfwidth / (nodes - 1);
    // Nyquist guard on the fastest y-oscillation across the requested grid
    double om = 0.0;
    for (double p : p_grid) om = std::max(om, std::abs(p - s.center()[1]));
    double xspan = 0.0;
    for (double x : x_grid) xspan = std::max(xspan, std::abs(x - s.center()[0]));
    om = (om + std::abs(s.y()(0, 0)) * xspan) / hbar;
    if (dy * om > M_PI)
        throw NumericError("wigner_numeric_1d: grid too coarse for the requested window");

    Mat w(x_grid.size(), p_grid.size());
    for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
        const double x = x_grid[ix];
        std::vector<cdouble> fplus(nodes), fminus(nodes);
        for (int k = 0; k < nodes; ++k) {
            const double y = -halfwidth + k * dy;
            fplus[k] = s.evaluate({x + 0.5 * y});
            fminus[k] = std::conj(s.evaluate({x - 0.5 * y}));
        }
        for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
            const double p = p_grid[ip];
            cdouble acc = 0.0;
            for (int k = 0; k < nodes; ++k) {
                const double y = -halfwidth + k * dy;
                const double weight = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
                acc += weight * std::exp(cdouble(0.0, -p * y / hbar)) * fplus[k] * fminus[k];
            }
            w(ix, ip) = (acc * dy).real() / (2.0 * M_PI * hbar);
        }
    }
    return w;
}

StrtReport strt_equivalence_check(const SymplecticIsotopy& iso) {
    if (iso.n() != 1) throw InputError("strt_equivalence_check: n = 1 isotopies only");
    StrtReport rep;
    double prev_arg = 0.0;
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        const Mat& m = iso.at(k).matrix();
        const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
        // full route: Gamma = (c + id) / (a + ib), X + iY = -i Gamma
        const cdouble v(a, b);
        const cdouble gamma = cdouble(c, d) / v;
        const double x_full = gamma.imag();
        const double y_full = -gamma.real();
        // branch-unwrapped metaplectic phase along the path
        double ar = std::arg(v);
        while (ar - prev_arg > M_PI) ar -= 2.0 * M_PI;
        while (ar - prev_arg < -M_PI) ar += 2.0 * M_PI;
        prev_arg = ar;
        const double phase_full = -0.5 * ar;
        // reduced route: parameters straight from the local factors
        PreIwasawa f = pre_iwasawa(iso.at(k));
        const double x_red = f.l(0, 0) * f.l(0, 0);
        const double y_red = -f.p(0, 0);
        rep.max_param_dev = std::max({rep.max_param_dev, std::abs(x_full - x_red),
                                      std::abs(y_full - y_red)});
        rep.max_phase_dev = std::max(rep.max_phase_dev, std::abs(phase_full));
    }
    return rep;
}

}  // namespace chalk
