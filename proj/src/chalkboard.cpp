#include "chalk/chalkboard.hpp"

#include <cmath>

namespace chalk {

SymplecticBall::SymplecticBall(SymplecticMatrix s_, Vec center_, double radius_)
    : s(std::move(s_)), center(std::move(center_)), radius(radius_) {
    if (center.size() != 2 * s.n()) throw InputError("SymplecticBall: center dimension mismatch");
    if (!(radius > 0.0)) throw InputError("SymplecticBall: radius must be positive");
}

Ellipsoid ball_to_ellipsoid(const SymplecticBall& b) {
    // |S^-1 (z - z0)| <= eps, i.e. shape (S S^T)^-1
    Mat sinv = b.s.inverse().matrix();
    return Ellipsoid(b.center, symmetrize(sinv.transposed() * sinv), b.radius);
}

BallNormalForm ball_normal_form(const SymplecticBall& b) {
    PreIwasawa f = pre_iwasawa(b.s);
    return BallNormalForm{b.center, f.p, f.l};
}

AffineSymplectic ball_transport(const SymplecticBall& b, const SymplecticBall& b2) {
    if (b.n() != b2.n()) throw InputError("ball_transport: dimension mismatch");
    if (std::abs(b.radius - b2.radius) > 1e-12 * std::max(b.radius, b2.radius))
        throw InputError("ball_transport: radius mismatch");
    BallNormalForm f1 = ball_normal_form(b);
    BallNormalForm f2 = ball_normal_form(b2);
    LocalElement r = sp0_compose(LocalElement(f2.p, f2.l),
                                 LocalElement(f1.p, f1.l).inverse());
    Vec shift = b2.center - r.apply(b.center);
    return AffineSymplectic(SymplecticMatrix(r.dense_linear()), std::move(shift));
}

BallTrajectory chalkboard_motion(const SymplecticIsotopy& iso, const std::vector<Vec>& z_path,
                                 const SymplecticBall& ball, bool with_shadows) {
    if (z_path.size() != iso.times().size())
        throw InputError("chalkboard_motion: center path and isotopy grids differ");
    if (ball.n() != iso.n()) throw InputError("chalkboard_motion: dimension mismatch");

    // R = local part of the ball's matrix; the ball only sees S through it.
    Mat r = pre_iwasawa(ball.s).local_part();
    Mat rinv = inverse(r);

    BallTrajectory traj;
    traj.times = iso.times();
    traj.balls.reserve(iso.times().size());
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        // conjugated reduced flow R_t = R R'_t R^-1 with R'_t the local part
        // of R^-1 S_t R
        SymplecticMatrix sprime(rinv * iso.at(k).matrix() * r,
                                config().tol_symp * 1e2 *
                                    std::max(1.0, r.max_abs() * r.max_abs()));
        Mat rt = r * pre_iwasawa(sprime).local_part() * rinv;
        Vec center = z_path[k] + iso.at(k).apply(ball.center);
        traj.balls.emplace_back(SymplecticMatrix(rt * ball.s.matrix(),
                                                 config().tol_symp * 1e2 *
                                                     std::max(1.0, rt.max_abs() * rt.max_abs())),
                                std::move(center), ball.radius);
    }
    if (with_shadows) {
        traj.shadows.reserve(traj.balls.size());
        for (const SymplecticBall& b : traj.balls)
            traj.shadows.push_back(shadow_x(ball_to_ellipsoid(b)));
    }
    return traj;
}

Ellipsoid shadow_x(const Ellipsoid& e) {
    if (e.dim() % 2 != 0) throw InputError("shadow_x: phase-space ellipsoid required");
    const std::size_t n = e.dim() / 2;
    Mat mxx = e.shape().block(0, 0, n, n);
    Mat mxp = e.shape().block(0, n, n, n);
    Mat mpp = e.shape().block(n, n, n, n);
    Mat schur = symmetrize(mxx - mxp * solve(mpp, mxp.transposed()));
    Vec cx(e.center().begin(), e.center().begin() + n);
    return Ellipsoid(std::move(cx), std::move(schur), e.level());
}

std::vector<Ellipsoid> shadow_ball(const SymplecticIsotopy& iso, const std::vector<Vec>& z_path,
                                   double eps) {
    if (z_path.size() != iso.times().size())
        throw InputError("shadow_ball: center path and isotopy grids differ");
    const std::size_t n = iso.n();
    std::vector<Ellipsoid> out;
    out.reserve(iso.times().size());
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        Mat a = iso.at(k).block_a();
        Mat b = iso.at(k).block_b();
        Mat g = symmetrize(a * a.transposed() + b * b.transposed());
        Vec cx(n);
        for (std::size_t i = 0; i < n; ++i) cx[i] = z_path[k][i];
        out.emplace_back(std::move(cx), inverse(g), eps);
    }
    return out;
}

namespace {

// permutation taking global (x_1..x_n, p_1..p_n) to (x_A, p_A, x_B, p_B)
Mat pair_split_permutation(std::size_t n, std::size_t n_a) {
    Mat perm(2 * n, 2 * n);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n_a; ++i) perm(row++, i) = 1.0;          // x_A
    for (std::size_t i = 0; i < n_a; ++i) perm(row++, n + i) = 1.0;      // p_A
    for (std::size_t i = n_a; i < n; ++i) perm(row++, i) = 1.0;          // x_B
    for (std::size_t i = n_a; i < n; ++i) perm(row++, n + i) = 1.0;      // p_B
    return perm;
}

}  // namespace

Ellipsoid subsystem_project(const Ellipsoid& e, std::size_t n_a) {
    if (e.dim() % 2 != 0) throw InputError("subsystem_project: phase-space ellipsoid required");
    const std::size_t n = e.dim() / 2;
    if (n_a < 1 || n_a >= n) throw InputError("subsystem_project: need 1 <= n_A < n");
    Mat perm = pair_split_permutation(n, n_a);
    Mat mw = symmetrize(perm * e.shape() * perm.transposed());
    Vec cw = perm * e.center();
    const std::size_t da = 2 * n_a;
    const std::size_t db = 2 * (n - n_a);
    Mat maa = mw.block(0, 0, da, da);
    Mat mab = mw.block(0, da, da, db);
    Mat mbb = mw.block(da, da, db, db);
    Mat schur = symmetrize(maa - mab * solve(mbb, mab.transposed()));
    // (x_A, p_A) is already the canonical order of the small phase space
    Vec ca(cw.begin(), cw.begin() + da);
    return Ellipsoid(std::move(ca), std::move(schur), e.level());
}

Vec NonlinearHamiltonian::grad(const Vec& z, double t) const {
    if (gradient) return gradient(z, t);
    const std::size_t d = z.size();
    Vec g(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
        Vec zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        g[i] = (value(zp, t) - value(zm, t)) / (2.0 * h);
    }
    return g;
}

Mat NonlinearHamiltonian::hess(const Vec& z, double t) const {
    if (hessian) return hessian(z, t);
    const std::size_t d = z.size();
    Mat h(d, d);
    if (gradient) {
        for (std::size_t j = 0; j < d; ++j) {
            const double s = 1e-6 * std::max(1.0, std::abs(z[j]));
            Vec zp = z, zm = z;
            zp[j] += s;
            zm[j] -= s;
            Vec gp = gradient(zp, t), gm = gradient(zm, t);
            for (std::size_t i = 0; i < d; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * s);
        }
        return symmetrize(h);
    }
    const double s = 2e-4;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            Vec zpp = z, zpm = z, zmp = z, zmm = z;
            zpp[i] += s; zpp[j] += s;
            zpm[i] += s; zpm[j] -= s;
            zmp[i] -= s; zmp[j] += s;
            zmm[i] -= s; zmm[j] -= s;
            h(i, j) = h(j, i) =
                (value(zpp, t) - value(zpm, t) - value(zmp, t) + value(zmm, t)) / (4.0 * s * s);
        }
    return h;
}

namespace {

Vec hamiltonian_field(const NonlinearHamiltonian& h, const Vec& z, double t, const Mat& j) {
    return j * h.grad(z, t);
}

Vec rk4_step(const NonlinearHamiltonian& h, const Vec& z, double t, double dt, const Mat& j) {
    Vec k1 = hamiltonian_field(h, z, t, j);
    Vec k2 = hamiltonian_field(h, z + (0.5 * dt) * k1, t + 0.5 * dt, j);
    Vec k3 = hamiltonian_field(h, z + (0.5 * dt) * k2, t + 0.5 * dt, j);
    Vec k4 = hamiltonian_field(h, z + dt * k3, t + dt, j);
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec rk4_adaptive(const NonlinearHamiltonian& h, Vec z, double t0, double t1, double tol,
                 const Mat& j, int depth = 0) {
    const double dt = t1 - t0;
    Vec full = rk4_step(h, z, t0, dt, j);
    Vec half = rk4_step(h, rk4_step(h, z, t0, 0.5 * dt, j), t0 + 0.5 * dt, 0.5 * dt, j);
    double err = norm_inf(full - half);
    if (err <= tol * std::max(1.0, norm_inf(half)) || std::abs(dt) < 1e-14) return half;
    if (depth > 24) throw NumericError("integrate_orbit: step-size underflow (orbit blow-up?)");
    Vec mid = rk4_adaptive(h, std::move(z), t0, t0 + 0.5 * dt, tol, j, depth + 1);
    return rk4_adaptive(h, std::move(mid), t0 + 0.5 * dt, t1, tol, j, depth + 1);
}

}  // namespace

Vec integrate_orbit(const NonlinearHamiltonian& h, Vec z0, double t0, double t1, double tol) {
    if (!h.value && !h.gradient) throw InputError("integrate_orbit: Hamiltonian has no data");
    Mat j = standard_J(z0.size() / 2);
    return rk4_adaptive(h, std::move(z0), t0, t1, tol, j);
}

NearbyOrbit nearby_orbit(const NonlinearHamiltonian& h, Vec z0, double T, double dt,
                         double orbit_tol) {
    const std::size_t nn = z0.size();
    if (nn % 2 != 0 || nn == 0) throw InputError("nearby_orbit: bad phase-space dimension");
    const std::size_t n = nn / 2;
    Mat j = standard_J(n);
    Vec times = uniform_times(T, dt);
    const double step = times[1] - times[0];

    // center on the doubled grid so the variational stepper sees midpoints
    std::vector<Vec> fine(2 * (times.size() - 1) + 1);
    fine[0] = z0;
    for (std::size_t k = 0; k + 1 < fine.size(); ++k) {
        const double ta = 0.5 * step * double(k);
        fine[k + 1] = rk4_adaptive(h, fine[k], ta, ta + 0.5 * step, orbit_tol, j);
    }

    std::vector<Vec> center(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) center[k] = fine[2 * k];

    std::vector<SymplecticMatrix> frames;
    frames.reserve(times.size());
    frames.push_back(SymplecticMatrix::identity(n));
    Mat s = Mat::identity(nn);
    const Mat eye = Mat::identity(nn);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double tmid = 0.5 * (times[k] + times[k + 1]);
        Mat a = j * symmetrize(h.hess(fine[2 * k + 1], tmid));
        Mat lhs = eye - (0.5 * step) * a;
        Mat rhs = (eye + (0.5 * step) * a) * s;
        s = solve(lhs, rhs);
        frames.emplace_back(s);
    }
    SymplecticIsotopy lin(times, std::move(frames));

    // H0 = 1/2 Hess(z_t)(z - z_t)^2 + sigma(z, z'_t)
    std::vector<Mat> ms(times.size());
    std::vector<Vec> mv(times.size());
    std::vector<Vec> zdot = path_derivative(center, step);
    for (std::size_t k = 0; k < times.size(); ++k) {
        ms[k] = symmetrize(h.hess(center[k], times[k]));
        mv[k] = -1.0 * (ms[k] * center[k]) - j * zdot[k];
    }
    QuadraticHamiltonian ham =
        QuadraticHamiltonian::sampled(times, std::move(ms), std::move(mv));
    return NearbyOrbit{std::move(times), std::move(center), std::move(lin), std::move(ham)};
}

Ellipsoid recalibrated_ellipsoid(const std::vector<Vec>& samples, double target_eps,
                                 double mvee_tol) {
    Ellipsoid hull = mvee(samples, mvee_tol);
    const double c = capacity(hull);
    // conformality: capacity scales with the square of the dilation factor
    const double factor = std::sqrt(M_PI * target_eps * target_eps / c);
    return hull.scaled(factor);
}

std::vector<Vec> boundary_samples(const Ellipsoid& e, int count) {
    std::vector<Vec> pts;
    for (const Vec& u : sphere_directions(e.dim(), (count + 1) / 2)) {
        pts.push_back(e.boundary_point(u));
        if (int(pts.size()) >= count) break;
    }
    return pts;
}

}  // namespace chalk
