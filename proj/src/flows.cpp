#include "chalk/flows.hpp"

#include <cmath>

namespace chalk {

Vec uniform_times(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw InputError("uniform_times: T and dt must be positive");
    const std::size_t k = std::max<std::size_t>(1, std::llround(T / dt));
    Vec times(k + 1);
    for (std::size_t i = 0; i <= k; ++i) times[i] = T * double(i) / double(k);
    return times;
}

QuadraticHamiltonian QuadraticHamiltonian::closed_form(std::size_t n, MatFn m_of_t,
                                                       VecFn m_vec_of_t, double T) {
    if (!m_of_t) throw InputError("QuadraticHamiltonian: M(t) callable required");
    QuadraticHamiltonian h;
    h.n_ = n;
    h.T_ = T;
    h.mfun_ = std::move(m_of_t);
    h.has_linear_ = static_cast<bool>(m_vec_of_t);
    h.vfun_ = std::move(m_vec_of_t);
    return h;
}

QuadraticHamiltonian QuadraticHamiltonian::constant(Mat m, Vec m_vec, double T) {
    if (m.rows() % 2 != 0) throw InputError("QuadraticHamiltonian: odd dimension");
    const std::size_t n = m.rows() / 2;
    const bool linear = !m_vec.empty();
    if (linear && m_vec.size() != 2 * n) throw InputError("QuadraticHamiltonian: m size mismatch");
    return closed_form(
        n, [m](double) { return m; },
        linear ? VecFn([m_vec](double) { return m_vec; }) : VecFn(), T);
}

QuadraticHamiltonian QuadraticHamiltonian::sampled(Vec times, std::vector<Mat> ms,
                                                   std::vector<Vec> mvecs) {
    if (times.size() < 2 || ms.size() != times.size())
        throw InputError("QuadraticHamiltonian: bad sample arrays");
    if (!mvecs.empty() && mvecs.size() != times.size())
        throw InputError("QuadraticHamiltonian: m samples size mismatch");
    QuadraticHamiltonian h;
    h.n_ = ms[0].rows() / 2;
    h.T_ = times.back();
    h.sampled_ = true;
    h.has_linear_ = !mvecs.empty();
    h.times_ = std::move(times);
    h.msamples_ = std::move(ms);
    h.vsamples_ = std::move(mvecs);
    return h;
}

namespace {

// linear interpolation weights on a uniform grid
struct Interp {
    std::size_t k0, k1;
    double w0, w1;
};
Interp locate(const Vec& times, double t) {
    const double t0 = times.front(), t1 = times.back();
    const double dt = times[1] - times[0];
    if (t <= t0) return {0, 0, 1.0, 0.0};
    if (t >= t1) return {times.size() - 1, times.size() - 1, 1.0, 0.0};
    const double s = (t - t0) / dt;
    std::size_t k = std::min<std::size_t>(std::floor(s), times.size() - 2);
    const double w = s - double(k);
    return {k, k + 1, 1.0 - w, w};
}

}  // namespace

Mat QuadraticHamiltonian::coefficient_matrix(double t) const {
    Mat m;
    if (sampled_) {
        const Interp ip = locate(times_, t);
        m = ip.w0 * msamples_[ip.k0] + ip.w1 * msamples_[ip.k1];
    } else {
        m = mfun_(t);
    }
    if (asymmetry(m) > 1e-8 * std::max(1.0, m.max_abs()))
        throw NumericError("QuadraticHamiltonian: M(t) not symmetric at t=" + std::to_string(t));
    return symmetrize(m);
}

Vec QuadraticHamiltonian::coefficient_vector(double t) const {
    if (!has_linear_) return Vec(2 * n_, 0.0);
    if (sampled_) {
        const Interp ip = locate(times_, t);
        return ip.w0 * vsamples_[ip.k0] + ip.w1 * vsamples_[ip.k1];
    }
    return vfun_(t);
}

double QuadraticHamiltonian::value(const Vec& z, double t) const {
    Mat m = coefficient_matrix(t);
    double v = 0.5 * dot(z, m * z);
    if (has_linear_) v += dot(coefficient_vector(t), z);
    return v;
}

SymplecticIsotopy::SymplecticIsotopy(Vec times, std::vector<SymplecticMatrix> s,
                                     std::optional<std::vector<Vec>> z)
    : times_(std::move(times)), s_(std::move(s)), z_(std::move(z)) {
    if (times_.size() < 2 || s_.size() != times_.size())
        throw InputError("SymplecticIsotopy: need matching times and frames");
    const double dt0 = times_[1] - times_[0];
    for (std::size_t k = 1; k < times_.size(); ++k) {
        const double step = times_[k] - times_[k - 1];
        if (std::abs(step - dt0) > 1e-9 * std::max(1.0, std::abs(times_.back())))
            throw InputError("SymplecticIsotopy: grid not uniform");
    }
    if ((s_[0].matrix() - Mat::identity(2 * s_[0].n())).max_abs() > 1e-9)
        throw InputError("SymplecticIsotopy: S(0) must be the identity");
    if (z_) {
        if (z_->size() != times_.size()) throw InputError("SymplecticIsotopy: z path size mismatch");
        if (norm_inf((*z_)[0]) > 1e-12) throw InputError("SymplecticIsotopy: z(0) must vanish");
    }
}

const std::vector<Vec>& SymplecticIsotopy::translation_path() const {
    if (!z_) throw InputError("SymplecticIsotopy: no translation path stored");
    return *z_;
}

std::size_t SymplecticIsotopy::index_of(double t) const {
    const double dt0 = dt();
    const long k = std::llround((t - times_.front()) / dt0);
    return std::min<std::size_t>(std::max<long>(k, 0), times_.size() - 1);
}

AffineSymplectic SymplecticIsotopy::affine(std::size_t k) const {
    Vec shift(2 * n(), 0.0);
    if (z_) shift = s_[k].apply((*z_)[k]);
    return AffineSymplectic(s_[k], std::move(shift));
}

namespace {

template <typename T>
T stencil5(const std::vector<T>& f, const double c[5], std::size_t base, double inv12h) {
    T r = c[0] * f[base];
    for (int j = 1; j < 5; ++j) r = r + c[j] * f[base + j];
    return inv12h * r;
}

template <typename T>
std::vector<T> path_derivative_impl(const std::vector<T>& f, double dt) {
    const std::size_t m = f.size();
    if (m < 2 || !(dt > 0.0)) throw InputError("path_derivative: bad path");
    std::vector<T> d(m);
    if (m < 5) {
        // second order on tiny grids
        for (std::size_t i = 0; i < m; ++i) {
            if (i == 0)
                d[i] = (1.0 / dt) * (f[1] - f[0]);
            else if (i + 1 == m)
                d[i] = (1.0 / dt) * (f[m - 1] - f[m - 2]);
            else
                d[i] = (0.5 / dt) * (f[i + 1] - f[i - 1]);
        }
        if (m >= 3) {
            d[0] = (0.5 / dt) * (-3.0 * f[0] + 4.0 * f[1] - 1.0 * f[2]);
            d[m - 1] = (0.5 / dt) * (3.0 * f[m - 1] - 4.0 * f[m - 2] + 1.0 * f[m - 3]);
        }
        return d;
    }
    const double inv12h = 1.0 / (12.0 * dt);
    static const double c_end[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    static const double c_next[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            d[i] = stencil5(f, c_end, 0, inv12h);
        } else if (i == 1) {
            d[i] = stencil5(f, c_next, 0, inv12h);
        } else if (i + 2 == m) {
            const double c[5] = {-c_next[4], -c_next[3], -c_next[2], -c_next[1], -c_next[0]};
            d[i] = stencil5(f, c, m - 5, inv12h);
        } else if (i + 1 == m) {
            const double c[5] = {-c_end[4], -c_end[3], -c_end[2], -c_end[1], -c_end[0]};
            d[i] = stencil5(f, c, m - 5, inv12h);
        } else {
            d[i] = inv12h * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
        }
    }
    return d;
}

}  // namespace

std::vector<Mat> path_derivative(const std::vector<Mat>& path, double dt) {
    return path_derivative_impl(path, dt);
}
std::vector<Vec> path_derivative(const std::vector<Vec>& path, double dt) {
    return path_derivative_impl(path, dt);
}

QuadraticHamiltonian generator_from_isotopy(const SymplecticIsotopy& iso) {
    const std::size_t n = iso.n();
    Mat j = standard_J(n);
    std::vector<Mat> frames(iso.times().size());
    for (std::size_t k = 0; k < frames.size(); ++k) frames[k] = iso.at(k).matrix();
    std::vector<Mat> ds = path_derivative(frames, iso.dt());
    std::vector<Mat> ms(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k)
        ms[k] = symmetrize(-1.0 * (j * (ds[k] * iso.at(k).inverse().matrix())));
    return QuadraticHamiltonian::sampled(iso.times(), std::move(ms), {});
}

QuadraticHamiltonian affine_generator(const SymplecticIsotopy& iso, AffineOrder order) {
    if (!iso.has_translation()) throw InputError("affine_generator: isotopy has no z path");
    const std::size_t n = iso.n();
    Mat j = standard_J(n);
    QuadraticHamiltonian quad = generator_from_isotopy(iso);
    std::vector<Vec> zdot = path_derivative(iso.translation_path(), iso.dt());
    std::vector<Mat> ms(iso.times().size());
    std::vector<Vec> mv(iso.times().size());
    for (std::size_t k = 0; k < ms.size(); ++k) {
        ms[k] = quad.coefficient_matrix(iso.times()[k]);
        if (order == AffineOrder::STthenT) {
            // H = 1/2 M z^2 + sigma(z, S z') ; sigma(z, w) = w^T J z
            mv[k] = -1.0 * (j * iso.at(k).apply(zdot[k]));
        } else {
            // g = T(z) S: H = 1/2 M (z - z_t)^2 + sigma(z, z')
            mv[k] = -1.0 * (ms[k] * iso.translation_path()[k]) - j * zdot[k];
        }
    }
    return QuadraticHamiltonian::sampled(iso.times(), std::move(ms), std::move(mv));
}

SymplecticIsotopy flow_from_quadratic(const QuadraticHamiltonian& h, double T, double dt) {
    const std::size_t n = h.n();
    const std::size_t nn = 2 * n;
    Vec times = uniform_times(T, dt);
    const double step = times[1] - times[0];
    Mat j = standard_J(n);
    const Mat eye = Mat::identity(nn);

    std::vector<SymplecticMatrix> frames;
    frames.reserve(times.size());
    frames.push_back(SymplecticMatrix::identity(n));
    std::vector<Vec> zpath;
    const bool linear = h.has_linear_term();
    if (linear) zpath.push_back(Vec(nn, 0.0));

    Mat s = eye;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double tmid = 0.5 * (times[k] + times[k + 1]);
        Mat a = j * h.coefficient_matrix(tmid);
        // Cayley midpoint: exactly symplectic per step for Hamiltonian a
        Mat lhs = eye - (0.5 * step) * a;
        Mat rhs = (eye + (0.5 * step) * a) * s;
        Mat snext = solve(lhs, rhs);
        if (linear) {
            // z' = S^-1 J m(t), trapezoid using certified block inverses
            SymplecticMatrix sk(s, 1e-6), sk1(snext, 1e-6);
            Vec g0 = sk.inverse().apply(j * h.coefficient_vector(times[k]));
            Vec g1 = sk1.inverse().apply(j * h.coefficient_vector(times[k + 1]));
            zpath.push_back(zpath.back() + (0.5 * step) * (g0 + g1));
        }
        s = snext;
        frames.emplace_back(s);
    }
    return SymplecticIsotopy(std::move(times), std::move(frames),
                             linear ? std::optional(std::move(zpath)) : std::nullopt);
}

AffineSymplectic closed_form_affine_flow(const Mat& m, const Vec& mvec, double t) {
    if (m.rows() % 2 != 0) throw InputError("closed_form_affine_flow: odd dimension");
    const std::size_t nn = m.rows();
    const std::size_t n = nn / 2;
    Mat j = standard_J(n);
    Mat a = j * symmetrize(m);
    Vec b = j * (mvec.empty() ? Vec(nn, 0.0) : mvec);
    // exp of the (2n+1) augmented matrix [[tA, tb], [0, 0]] carries both the
    // linear flow and the drift, including the singular-A limit
    Mat aug(nn + 1, nn + 1);
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t jj = 0; jj < nn; ++jj) aug(i, jj) = t * a(i, jj);
        aug(i, nn) = t * b[i];
    }
    Mat e = expm(aug);
    Mat s = e.block(0, 0, nn, nn);
    Vec shift(nn);
    for (std::size_t i = 0; i < nn; ++i) shift[i] = e(i, nn);
    return AffineSymplectic(SymplecticMatrix(std::move(s)), std::move(shift));
}

QuadraticHamiltonian compose_hamiltonians(const QuadraticHamiltonian& h,
                                          const QuadraticHamiltonian& k, double T, double dt) {
    if (h.n() != k.n()) throw InputError("compose_hamiltonians: dimension mismatch");
    SymplecticIsotopy fh = flow_from_quadratic(h, T, dt);
    std::vector<Mat> ms(fh.times().size());
    std::vector<Vec> mv(fh.times().size());
    const bool any_linear = h.has_linear_term() || k.has_linear_term();
    for (std::size_t i = 0; i < fh.times().size(); ++i) {
        const double t = fh.times()[i];
        Mat sinv = fh.at(i).inverse().matrix();
        Mat mk = k.coefficient_matrix(t);
        ms[i] = symmetrize(h.coefficient_matrix(t) + sinv.transposed() * mk * sinv);
        if (any_linear) {
            // K evaluated at (f_t^H)^-1 z = S^-1 z - z_t
            Vec zt = fh.has_translation() ? fh.translation_path()[i] : Vec(2 * h.n(), 0.0);
            Vec add = sinv.transposed() * (k.coefficient_vector(t) - mk * zt);
            mv[i] = h.coefficient_vector(t) + add;
        }
    }
    return QuadraticHamiltonian::sampled(fh.times(), std::move(ms),
                                         any_linear ? std::move(mv) : std::vector<Vec>{});
}

QuadraticHamiltonian inverse_hamiltonian(const QuadraticHamiltonian& h, double T, double dt) {
    SymplecticIsotopy fh = flow_from_quadratic(h, T, dt);
    std::vector<Mat> ms(fh.times().size());
    std::vector<Vec> mv(fh.times().size());
    for (std::size_t i = 0; i < fh.times().size(); ++i) {
        const double t = fh.times()[i];
        const Mat& s = fh.at(i).matrix();
        Mat m = h.coefficient_matrix(t);
        ms[i] = symmetrize(-1.0 * (s.transposed() * m * s));
        if (h.has_linear_term()) {
            Vec zt = fh.translation_path()[i];
            mv[i] = -1.0 * (s.transposed() * (m * (s * zt) + h.coefficient_vector(t)));
        }
    }
    const bool linear = h.has_linear_term();
    return QuadraticHamiltonian::sampled(fh.times(), std::move(ms),
                                         linear ? std::move(mv) : std::vector<Vec>{});
}

QuadraticHamiltonian conjugate_generator(const QuadraticHamiltonian& h,
                                         const SymplecticMatrix& g) {
    if (h.n() != g.n()) throw InputError("conjugate_generator: dimension mismatch");
    Mat gm = g.matrix();
    auto mfn = [h, gm](double t) { return symmetrize(gm.transposed() * h.coefficient_matrix(t) * gm); };
    QuadraticHamiltonian::VecFn vfn;
    if (h.has_linear_term())
        vfn = [h, gm](double t) { return gm.transposed() * h.coefficient_vector(t); };
    return QuadraticHamiltonian::closed_form(h.n(), std::move(mfn), std::move(vfn), h.horizon());
}

IwasawaSum iwasawa_sum(const SymplecticIsotopy& iso) {
    const std::size_t n = iso.n();
    const std::size_t m = iso.times().size();
    IwasawaSum sum;
    sum.times = iso.times();
    sum.p_path.resize(m);
    sum.l_path.resize(m);
    sum.q_path.resize(m);
    sum.x_path.resize(m);
    sum.y_path.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        PreIwasawa f = pre_iwasawa(iso.at(k));
        sum.p_path[k] = f.p;
        sum.l_path[k] = f.l;
        sum.q_path[k] = f.p * inverse(f.l);
        sum.x_path[k] = f.x;
        sum.y_path[k] = f.y;
    }
    const double dt = iso.dt();
    std::vector<Mat> pdot = path_derivative(sum.p_path, dt);
    std::vector<Mat> ldot = path_derivative(sum.l_path, dt);
    std::vector<Mat> xdot = path_derivative(sum.x_path, dt);
    std::vector<Mat> ydot = path_derivative(sum.y_path, dt);

    std::vector<Mat> mv(m), ml(m), mu(m), mr(m);
    sum.z_path.resize(m);
    sum.n_path.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        Mat w = ldot[k] * inverse(sum.l_path[k]);  // L' L^-1
        Mat z = ydot[k] * sum.x_path[k].transposed() -
                xdot[k] * sum.y_path[k].transposed();
        sum.z_path[k] = z;
        // N = L'L^-1 P + P L^-1 L' - P' ; symmetric since (L'L^-1 P)^T = P L^-1 L'
        Mat nsym = w * sum.p_path[k] + (w * sum.p_path[k]).transposed() - pdot[k];
        sum.n_path[k] = symmetrize(nsym);

        Mat hv(2 * n, 2 * n);
        hv.set_block(0, 0, -1.0 * pdot[k]);
        mv[k] = hv;

        Mat hl(2 * n, 2 * n);
        hl.set_block(0, n, -1.0 * w);
        hl.set_block(n, 0, -1.0 * w.transposed());
        ml[k] = hl;

        // -J U' U^-1 = [[Z, -A], [A, Z]] with A = X' X^T + Y' Y^T
        // antisymmetric; the A block vanishes identically for n = 1
        Mat a1 = xdot[k] * sum.x_path[k].transposed() +
                 ydot[k] * sum.y_path[k].transposed();
        a1 = 0.5 * (a1 - a1.transposed());
        Mat hu(2 * n, 2 * n);
        Mat zs = symmetrize(z);
        hu.set_block(0, 0, zs);
        hu.set_block(n, n, zs);
        hu.set_block(0, n, -1.0 * a1);
        hu.set_block(n, 0, a1);
        mu[k] = hu;

        Mat hr(2 * n, 2 * n);
        hr.set_block(0, 0, sum.n_path[k]);
        hr.set_block(0, n, -1.0 * w);
        hr.set_block(n, 0, -1.0 * w.transposed());
        mr[k] = hr;
    }
    sum.h_v = QuadraticHamiltonian::sampled(sum.times, std::move(mv), {});
    sum.h_l = QuadraticHamiltonian::sampled(sum.times, std::move(ml), {});
    sum.h_u = QuadraticHamiltonian::sampled(sum.times, std::move(mu), {});
    sum.h_r = QuadraticHamiltonian::sampled(sum.times, std::move(mr), {});
    return sum;
}

QuadraticHamiltonian unitary_generator(const SymplecticIsotopy& u_path, double tol) {
    const std::size_t n = u_path.n();
    const std::size_t m = u_path.times().size();
    std::vector<Mat> xs(m), ys(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (!is_symplectic_rotation(u_path.at(k).matrix(), tol))
            throw InputError("unitary_generator: sample not in U(n)");
        xs[k] = u_path.at(k).block_a();
        ys[k] = u_path.at(k).block_b();
    }
    std::vector<Mat> xdot = path_derivative(xs, u_path.dt());
    std::vector<Mat> ydot = path_derivative(ys, u_path.dt());
    std::vector<Mat> ms(m);
    for (std::size_t k = 0; k < m; ++k) {
        Mat z = symmetrize(ydot[k] * xs[k].transposed() - xdot[k] * ys[k].transposed());
        Mat a1 = xdot[k] * xs[k].transposed() + ydot[k] * ys[k].transposed();
        a1 = 0.5 * (a1 - a1.transposed());
        Mat h(2 * n, 2 * n);
        h.set_block(0, 0, z);
        h.set_block(n, n, z);
        h.set_block(0, n, -1.0 * a1);
        h.set_block(n, 0, a1);
        ms[k] = h;
    }
    return QuadraticHamiltonian::sampled(u_path.times(), std::move(ms), {});
}

Vec gauss_legendre_nodes(int n) {
    if (n < 1) throw InputError("gauss_legendre_nodes: n must be >= 1");
    Vec nodes(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev initial guess, on [-1, 1]
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);  // map to [0, 1]
    }
    return nodes;
}

Vec gauss_legendre_weights(int n) {
    Vec nodes = gauss_legendre_nodes(n);
    Vec w(n);
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * nodes[i] - 1.0;
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        w[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // already halved by the [0,1] map
    }
    return w;
}

namespace {

Mat fd_jacobian(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& z) {
    const std::size_t d = z.size();
    Mat j(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(z[c]));
        Vec zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        Vec fp = f(t, zp), fm = f(t, zm);
        for (std::size_t r = 0; r < d; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return j;
}

Vec newton_invert(const NonlinearFlow& f, double t, const Vec& w, const Vec& guess) {
    Vec y = guess;
    double res = norm2(w - f.map(t, y));
    const double tol = 1e-11 * (1.0 + norm2(w));
    for (int it = 0; it < 100 && res > tol; ++it) {
        Mat j = f.jacobian ? f.jacobian(t, y) : fd_jacobian(f.map, t, y);
        Vec step = solve(j, w - f.map(t, y));
        double scale = 1.0;
        for (int damp = 0; damp < 40; ++damp) {
            Vec cand = y + scale * step;
            const double r2 = norm2(w - f.map(t, cand));
            if (r2 < res) {
                y = std::move(cand);
                res = r2;
                break;
            }
            scale *= 0.5;
            if (damp == 39)
                throw NumericError("generator_from_nonlinear_isotopy: Newton inversion stalled");
        }
    }
    if (res > 1e3 * tol)
        throw NumericError("generator_from_nonlinear_isotopy: Newton inversion failed");
    return y;
}

}  // namespace

std::function<double(const Vec&, double)> generator_from_nonlinear_isotopy(NonlinearFlow f,
                                                                           int quad_points) {
    if (!f.map) throw InputError("generator_from_nonlinear_isotopy: map required");
    Vec nodes = gauss_legendre_nodes(quad_points);
    Vec weights = gauss_legendre_weights(quad_points);
    return [f = std::move(f), nodes, weights](const Vec& z, double t) {
        double h = 0.0;
        Vec y_prev;  // warm start along lambda
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            Vec lz = nodes[q] * z;
            Vec y = newton_invert(f, t, lz, y_prev.empty() ? lz : y_prev);
            y_prev = y;
            Vec fdot;
            if (f.dmap_dt) {
                fdot = f.dmap_dt(t, y);
            } else {
                const double ht = 1e-5 * std::max(1.0, std::abs(t));
                fdot = (1.0 / (2.0 * ht)) * (f.map(t + ht, y) - f.map(t - ht, y));
            }
            h -= weights[q] * symplectic_form(fdot, z);
        }
        return h;
    };
}

}  // namespace chalk
