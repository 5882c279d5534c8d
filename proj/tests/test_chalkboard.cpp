#include <doctest.h>

#include <cmath>

#include "chalk/chalkboard.hpp"

using namespace chalk;

namespace {

SymplecticIsotopy sampled_isotopy(double T, double dt, const std::function<Mat(double)>& s_of_t) {
    Vec times = uniform_times(T, dt);
    std::vector<SymplecticMatrix> frames;
    frames.reserve(times.size());
    for (double t : times) frames.emplace_back(s_of_t(t));
    return SymplecticIsotopy(std::move(times), std::move(frames));
}

Mat free_particle(double t) {
    Mat s = Mat::identity(2);
    s(0, 1) = t;
    return s;
}

Mat rotation2(double th) {
    Mat r(2, 2);
    r(0, 0) = std::cos(th);
    r(0, 1) = std::sin(th);
    r(1, 0) = -std::sin(th);
    r(1, 1) = std::cos(th);
    return r;
}

NonlinearHamiltonian pendulum() {
    NonlinearHamiltonian h;
    h.value = [](const Vec& z, double) { return 0.5 * z[1] * z[1] - std::cos(z[0]); };
    h.gradient = [](const Vec& z, double) { return Vec{std::sin(z[0]), z[1]}; };
    h.hessian = [](const Vec& z, double) {
        Mat m(2, 2);
        m(0, 0) = std::cos(z[0]);
        m(1, 1) = 1.0;
        return m;
    };
    return h;
}

double ellipsoid_deviation(const Ellipsoid& a, const Ellipsoid& b) {
    double dev = norm_inf(a.center() - b.center());
    const double sa = 1.0 / (a.level() * a.level());
    const double sb = 1.0 / (b.level() * b.level());
    dev = std::max(dev, (sa * a.shape() - sb * b.shape()).max_abs());
    return dev;
}

}  // namespace

TEST_CASE("ball to ellipsoid") {
    // S = I: plain ball
    SymplecticBall unit(SymplecticMatrix::identity(1), Vec(2, 0.0), 0.5);
    Ellipsoid e = ball_to_ellipsoid(unit);
    CHECK((e.shape() - Mat::identity(2)).max_abs() < 1e-14);
    CHECK(e.level() == 0.5);
    // S = M_L with L = 2: semi-axes eps/L along x, eps L along p
    Mat l(1, 1);
    l(0, 0) = 2.0;
    SymplecticBall squeezed(rescale(l), Vec(2, 0.0), 1.0);
    Ellipsoid es = ball_to_ellipsoid(squeezed);
    CHECK(es.shape()(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(es.shape()(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
    // capacity pi eps^2 for any S
    for (int t = 0; t < 25; ++t) {
        SymplecticBall b(random_symplectic(2, 7200 + t, 6), Vec(4, 0.0), 0.8);
        CHECK(capacity(ball_to_ellipsoid(b)) == doctest::Approx(M_PI * 0.64).epsilon(1e-9));
    }
}

TEST_CASE("ball normal form") {
    // rotations fix the ball: P = 0, L = I
    Mat gen(2, 2);
    gen(0, 1) = 0.6;
    gen(1, 0) = -0.6;
    SymplecticBall rotball(SymplecticMatrix(expm(gen)), Vec(2, 0.0), 1.0);
    BallNormalForm nf = ball_normal_form(rotball);
    CHECK(nf.p.max_abs() < 1e-12);
    CHECK((nf.l - Mat::identity(1)).max_abs() < 1e-12);

    // free particle at t = 1: the factorization example values
    SymplecticBall fp(SymplecticMatrix(free_particle(1.0)), Vec(2, 0.0), 1.0);
    BallNormalForm nfp = ball_normal_form(fp);
    CHECK(nfp.l(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(nfp.p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // multiplying by a rotation never changes the normal form
    for (int t = 0; t < 50; ++t) {
        SymplecticMatrix s = random_symplectic(2, 500 + t, 6);
        Mat w(2, 2), v(2, 2);
        Rng rng(t);
        w(0, 1) = rng.uniform(-1, 1);
        w(1, 0) = -w(0, 1);
        v = rng.symmetric(2, 0.5);
        Mat ugen(4, 4);
        ugen.set_block(0, 0, w);
        ugen.set_block(0, 2, v);
        ugen.set_block(2, 0, -1.0 * v);
        ugen.set_block(2, 2, w);
        SymplecticMatrix u(expm(ugen));
        BallNormalForm a = ball_normal_form(SymplecticBall(s, Vec(4, 0.0), 1.0));
        BallNormalForm b = ball_normal_form(SymplecticBall(compose(s, u), Vec(4, 0.0), 1.0));
        CHECK((a.p - b.p).max_abs() < 1e-8 * std::max(1.0, a.p.max_abs()));
        CHECK((a.l - b.l).max_abs() < 1e-8 * std::max(1.0, a.l.max_abs()));
        // the normal form reproduces the ball's ellipsoid
        Ellipsoid via_nf = ball_to_ellipsoid(
            SymplecticBall(SymplecticMatrix(a.local().dense_linear()), Vec(4, 0.0), 1.0));
        CHECK(ellipsoid_deviation(via_nf, ball_to_ellipsoid(SymplecticBall(s, Vec(4, 0.0), 1.0))) <
              1e-8);
    }
}

TEST_CASE("ball transport") {
    SymplecticBall a(random_symplectic(2, 31, 6), Vec{0.1, -0.2, 0.3, 0.0}, 0.7);
    // b = b: identity
    AffineSymplectic id = ball_transport(a, a);
    CHECK((id.linear_part().matrix() - Mat::identity(4)).max_abs() < 1e-9);
    CHECK(norm_inf(id.shift()) < 1e-9);
    // same shape, shifted center: pure translation
    SymplecticBall shifted(a.s, a.center + Vec{1.0, 0.0, 0.0, 2.0}, 0.7);
    AffineSymplectic tr = ball_transport(a, shifted);
    CHECK((tr.linear_part().matrix() - Mat::identity(4)).max_abs() < 1e-9);
    CHECK(norm_inf(tr.shift() - Vec{1.0, 0.0, 0.0, 2.0}) < 1e-9);
    // random pairs: image ellipsoids match, linear part stays local
    for (int t = 0; t < 30; ++t) {
        SymplecticBall b1(random_symplectic(2, 900 + t, 6), Vec{0.3, 0.1, -0.2, 0.4}, 0.9);
        SymplecticBall b2(random_symplectic(2, 1900 + t, 6), Vec{-0.5, 0.2, 0.0, 0.1}, 0.9);
        AffineSymplectic f = ball_transport(b1, b2);
        CHECK(f.linear_part().matrix().block(0, 2, 2, 2).max_abs() < 1e-12);
        Ellipsoid image =
            ball_to_ellipsoid(b1).mapped(f.linear_part().matrix(), f.shift());
        CHECK(ellipsoid_deviation(image, ball_to_ellipsoid(b2)) < 1e-8);
    }
    // transitivity: transport(b, c) o transport(a, b) = transport(a, c)
    SymplecticBall b(random_symplectic(2, 77, 6), Vec{0.0, 0.4, -0.1, 0.2}, 0.7);
    SymplecticBall c(random_symplectic(2, 78, 6), Vec{0.6, -0.3, 0.2, 0.1}, 0.7);
    AffineSymplectic chained = compose(ball_transport(b, c), ball_transport(a, b));
    AffineSymplectic direct = ball_transport(a, c);
    AffineSymplectic closure = compose(direct.inverse(), chained);
    Ellipsoid ea = ball_to_ellipsoid(a);
    Ellipsoid back = ea.mapped(closure.linear_part().matrix(), closure.shift());
    CHECK(ellipsoid_deviation(back, ea) < 1e-7);
    // radius mismatch rejected
    SymplecticBall other(a.s, a.center, 0.8);
    CHECK_THROWS_AS(ball_transport(a, other), InputError);
}

TEST_CASE("chalkboard motion") {
    // identity isotopy, straight center path: rigid translation
    SymplecticIsotopy idiso = sampled_isotopy(1.0, 1e-2, [](double) { return Mat::identity(2); });
    std::vector<Vec> line(idiso.times().size());
    for (std::size_t k = 0; k < line.size(); ++k) line[k] = Vec{idiso.times()[k], 0.0};
    SymplecticBall ball(SymplecticMatrix(free_particle(0.7)), Vec{0.2, -0.1}, 0.5);
    BallTrajectory traj = chalkboard_motion(idiso, line, ball);
    Ellipsoid e0 = ball_to_ellipsoid(ball);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        Ellipsoid ek = ball_to_ellipsoid(traj.balls[k]);
        CHECK((ek.shape() - e0.shape()).max_abs() < 1e-9);
        CHECK(norm_inf(ek.center() - (e0.center() + line[k])) < 1e-12);
    }

    // general isotopy: the trajectory equals the direct affine image
    QuadraticHamiltonian hq = QuadraticHamiltonian::closed_form(
        1,
        [](double t) {
            Mat m(2, 2);
            m(0, 0) = 0.4 * std::sin(t);
            m(0, 1) = m(1, 0) = 0.2;
            m(1, 1) = 1.0;
            return m;
        },
        nullptr, 1.0);
    SymplecticIsotopy iso = flow_from_quadratic(hq, 1.0, 1e-2);
    std::vector<Vec> path(iso.times().size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double t = iso.times()[k];
        path[k] = Vec{std::sin(t), t * t};
    }
    SymplecticBall b2(random_symplectic(1, 5, 5), Vec{0.3, 0.1}, 0.4);
    BallTrajectory tj = chalkboard_motion(iso, path, b2, true);
    const double target = M_PI * 0.16;
    for (std::size_t k = 0; k < tj.times.size(); ++k) {
        Ellipsoid direct = ball_to_ellipsoid(b2).mapped(iso.at(k).matrix(), path[k]);
        Ellipsoid viaball = ball_to_ellipsoid(tj.balls[k]);
        CHECK(ellipsoid_deviation(direct, viaball) < 1e-8);
        CHECK(std::abs(capacity(viaball) - target) < 1e-6 * target);
        // shadow consistency with the Schur-complement projection
        CHECK(ellipsoid_deviation(tj.shadows[k], shadow_x(viaball)) < 1e-12);
    }
    std::vector<Vec> short_path(path.begin(), path.end() - 1);
    CHECK_THROWS_AS(chalkboard_motion(iso, short_path, b2), InputError);

    // centered unit ball: the trajectory is the local parts of S_t acting
    // on B(eps)
    SymplecticBall unit(SymplecticMatrix::identity(1), Vec(2, 0.0), 0.4);
    std::vector<Vec> zero(iso.times().size(), Vec(2, 0.0));
    BallTrajectory local = chalkboard_motion(iso, zero, unit);
    for (std::size_t k = 0; k < local.times.size(); ++k) {
        Mat rt = pre_iwasawa(iso.at(k)).local_part();
        CHECK((local.balls[k].s.matrix() - rt).max_abs() < 1e-9);
    }
}

TEST_CASE("shadows of ellipsoids") {
    // identity shape: x-ball of the same level
    Ellipsoid ball(Vec(4, 0.0), Mat::identity(4), 0.9);
    Ellipsoid sh = shadow_x(ball);
    CHECK(sh.dim() == 2);
    CHECK((sh.shape() - Mat::identity(2)).max_abs() < 1e-14);
    // tilted 2x2: projection half-width against a boundary-sampling oracle
    Rng rng(64);
    for (int trial = 0; trial < 5; ++trial) {
        Mat m = rng.spd(2);
        Ellipsoid e(rng.vector(2), m, 1.0);
        Ellipsoid p = shadow_x(e);
        const double halfwidth = p.level() / std::sqrt(p.shape()(0, 0));
        double sampled = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const double th = 2.0 * M_PI * k / 10000.0;
            Vec z = e.boundary_point({std::cos(th), std::sin(th)});
            sampled = std::max(sampled, std::abs(z[0] - e.center()[0]));
        }
        CHECK(std::abs(halfwidth - sampled) < 1e-3);
        // n = 1 symplectic balls: the x- and p-halfwidth product is bounded
        // below by eps^2 (the area consequence; squeezing can shrink either
        // factor alone)
        SymplecticBall sb(random_symplectic(1, 4000 + trial, 6), Vec(2, 0.0), 0.6);
        Ellipsoid sbe = ball_to_ellipsoid(sb);
        Mat minv = inverse(sbe.shape());
        const double wx = sbe.level() * std::sqrt(minv(0, 0));
        const double wp = sbe.level() * std::sqrt(minv(1, 1));
        CHECK(wx * wp >= 0.36 * (1.0 - 1e-12));
    }
    // n = 2 support function of the projection against projected samples
    Mat m4 = rng.spd(4);
    Ellipsoid e4(Vec(4, 0.0), m4, 1.0);
    Ellipsoid p4 = shadow_x(e4);
    double worst = 0.0;
    std::vector<Vec> pts = boundary_samples(e4, 20000);
    for (const Vec& u2 : sphere_directions(2, 64)) {
        double sampled = -1e300;
        for (const Vec& z : pts) sampled = std::max(sampled, u2[0] * z[0] + u2[1] * z[1]);
        worst = std::max(worst, std::abs(p4.support(u2) - sampled));
    }
    CHECK(worst < 2e-2);
}

TEST_CASE("shadow of the moving ball") {
    SymplecticIsotopy iso = sampled_isotopy(2.0, 1e-2, free_particle);
    std::vector<Vec> zpath(iso.times().size(), Vec(2, 0.0));
    const double eps = 0.75;
    std::vector<Ellipsoid> shadows = shadow_ball(iso, zpath, eps);
    // t = 0: the x-ball
    CHECK(shadows.front().shape()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // free particle: half-width eps sqrt(1 + t^2), spreading with no quantum input
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        const double t = iso.times()[k];
        const double hw = shadows[k].level() / std::sqrt(shadows[k].shape()(0, 0));
        CHECK(std::abs(hw - eps * std::sqrt(1.0 + t * t)) < 1e-8);
    }
    // rotations keep the shadow constant
    SymplecticIsotopy rot = sampled_isotopy(1.0, 1e-2, [](double t) { return rotation2(t); });
    for (const Ellipsoid& s : shadow_ball(rot, std::vector<Vec>(rot.times().size(), Vec(2, 0.0)), eps))
        CHECK(std::abs(s.shape()(0, 0) - 1.0) < 1e-12);
    // agreement with the Schur route along a motion
    SymplecticBall unit(SymplecticMatrix::identity(1), Vec(2, 0.0), eps);
    BallTrajectory traj = chalkboard_motion(iso, zpath, unit, true);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        CHECK(ellipsoid_deviation(traj.shadows[k], shadows[k]) < 1e-8);
}

TEST_CASE("subsystem projection") {
    // plain ball projects to a ball with the same capacity
    Ellipsoid ball(Vec(8, 0.0), Mat::identity(8), 0.6);
    Ellipsoid pa = subsystem_project(ball, 1);
    CHECK(pa.dim() == 2);
    CHECK(capacity(pa) == doctest::Approx(M_PI * 0.36).epsilon(1e-12));
    // block-diagonal S = S_A + S_B: projection capacity is exactly pi eps^2
    SymplecticMatrix sa = random_symplectic(1, 3, 6);
    SymplecticMatrix sb = random_symplectic(1, 4, 6);
    Mat s(4, 4);
    // paired split (x_A, p_A | x_B, p_B) maps to global (x1, x2, p1, p2)
    s(0, 0) = sa.matrix()(0, 0);
    s(0, 2) = sa.matrix()(0, 1);
    s(2, 0) = sa.matrix()(1, 0);
    s(2, 2) = sa.matrix()(1, 1);
    s(1, 1) = sb.matrix()(0, 0);
    s(1, 3) = sb.matrix()(0, 1);
    s(3, 1) = sb.matrix()(1, 0);
    s(3, 3) = sb.matrix()(1, 1);
    SymplecticBall blockball(SymplecticMatrix(s), Vec(4, 0.0), 0.6);
    Ellipsoid proj = subsystem_project(ball_to_ellipsoid(blockball), 1);
    CHECK(std::abs(capacity(proj) - M_PI * 0.36) < 1e-9);
    // random S: projection capacity never drops below pi eps^2
    for (int t = 0; t < 200; ++t) {
        SymplecticBall b(random_symplectic(2, 6000 + t, 6), Vec(4, 0.0), 0.6);
        Ellipsoid p = subsystem_project(ball_to_ellipsoid(b), 1);
        CHECK(capacity(p) >= M_PI * 0.36 * (1.0 - 1e-9));
    }
    CHECK_THROWS_AS(subsystem_project(ball, 4), InputError);
    CHECK_THROWS_AS(subsystem_project(ball, 0), InputError);
}

TEST_CASE("nearby orbit") {
    // quadratic Hamiltonian: the linearization is the exact flow
    NonlinearHamiltonian hq;
    hq.value = [](const Vec& z, double) { return 0.5 * (z[0] * z[0] + z[1] * z[1]); };
    hq.gradient = [](const Vec& z, double) { return z; };
    hq.hessian = [](const Vec&, double) { return Mat::identity(2); };
    NearbyOrbit orb = nearby_orbit(hq, Vec{0.4, 0.0}, 1.0, 1e-3);
    for (std::size_t k = 0; k < orb.times.size(); ++k) {
        const double t = orb.times[k];
        CHECK((orb.linearization.at(k).matrix() - rotation2(t)).max_abs() < 1e-7);
        Vec expect{0.4 * std::cos(t), -0.4 * std::sin(t)};
        CHECK(norm_inf(orb.center[k] - expect) < 1e-8);
    }

    // pendulum at the stable equilibrium: variational flow is a rotation
    NearbyOrbit pend = nearby_orbit(pendulum(), Vec{0.0, 0.0}, 1.0, 1e-3);
    for (std::size_t k = 0; k < pend.times.size(); ++k)
        CHECK((pend.linearization.at(k).matrix() - rotation2(pend.times[k])).max_abs() < 1e-7);

    // halving the ball radius at least quarters the linearization error
    NonlinearHamiltonian pen = pendulum();
    Vec z0{0.6, 0.4};
    NearbyOrbit base = nearby_orbit(pen, z0, 1.0, 1e-2);
    std::vector<double> errs;
    for (double eps : {0.1, 0.05, 0.025}) {
        double worst = 0.0;
        for (int k = 0; k < 16; ++k) {
            const double th = 2.0 * M_PI * k / 16.0;
            Vec dz{eps * std::cos(th), eps * std::sin(th)};
            Vec full = integrate_orbit(pen, z0 + dz, 0.0, 1.0, 1e-12);
            Vec lin = base.center.back() + base.linearization.frames().back().apply(dz);
            worst = std::max(worst, norm_inf(full - lin));
        }
        errs.push_back(worst);
    }
    CHECK(errs[1] <= 0.3 * errs[0]);
    CHECK(errs[2] <= 0.3 * errs[1]);

    // finite-difference fallback agrees with the analytic derivatives
    NonlinearHamiltonian fd;
    fd.value = pen.value;
    NearbyOrbit fdo = nearby_orbit(fd, z0, 0.5, 1e-2);
    NearbyOrbit ana = nearby_orbit(pen, z0, 0.5, 1e-2);
    CHECK(norm_inf(fdo.center.back() - ana.center.back()) < 1e-5);
    CHECK((fdo.linearization.frames().back().matrix() -
           ana.linearization.frames().back().matrix()).max_abs() < 1e-4);
}

TEST_CASE("recalibration through the enclosing ellipsoid") {
    // transport a ball boundary through a gentle nonlinear map, then restore
    // the capacity by dilation of the MVEE
    Ellipsoid e(Vec(2, 0.0), Mat::identity(2), 0.5);
    std::vector<Vec> pts;
    for (int k = 0; k < 64; ++k) {
        const double th = 2.0 * M_PI * k / 64.0;
        Vec z = e.boundary_point({std::cos(th), std::sin(th)});
        // weak shear plus a cubic perturbation
        pts.push_back(Vec{z[0] + 0.1 * z[1], z[1] + 0.05 * z[0] * z[0] * z[0]});
    }
    Ellipsoid rec = recalibrated_ellipsoid(pts, 0.5, 1e-9);
    CHECK(std::abs(capacity(rec) - M_PI * 0.25) < 1e-8);
}
