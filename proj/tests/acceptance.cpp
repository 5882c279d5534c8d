// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "chalk/chalkboard.hpp"
#include "chalk/gaussian.hpp"
#include "chalk/io.hpp"
#include "oracles.hpp"

using namespace chalk;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool pass, double metric, double tol) {
    std::printf("[%s] criterion %2d: %s (metric %.3e, tolerance %.3e)\n",
                pass ? "PASS" : "FAIL", id, what.c_str(), metric, tol);
    if (!pass) ++failures;
}

Mat free_particle(double t) {
    Mat s = Mat::identity(2);
    s(0, 1) = t;
    return s;
}

SymplecticIsotopy sampled_isotopy(double T, double dt, const std::function<Mat(double)>& s_of_t) {
    Vec times = uniform_times(T, dt);
    std::vector<SymplecticMatrix> frames;
    frames.reserve(times.size());
    for (double t : times) frames.emplace_back(s_of_t(t));
    return SymplecticIsotopy(std::move(times), std::move(frames));
}

QuadraticHamiltonian random_poly_hamiltonian(std::size_t n, std::uint64_t seed, double scale,
                                             double T) {
    Rng rng(seed);
    std::vector<Mat> coeffs;
    for (int d = 0; d <= 3; ++d) coeffs.push_back(rng.symmetric(2 * n, scale));
    return QuadraticHamiltonian::closed_form(
        n,
        [coeffs](double t) {
            Mat m(coeffs[0].rows(), coeffs[0].cols());
            double tk = 1.0;
            for (const Mat& c : coeffs) {
                m += tk * c;
                tk *= t;
            }
            return m;
        },
        nullptr, T);
}

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + t % 4;
        SymplecticMatrix s = random_symplectic(n, 10000 + t, 8);
        PreIwasawa f = pre_iwasawa(s);
        const double scale = std::max(1.0, s.matrix().max_abs());
        worst = std::max(worst, (f.reconstruct() - s.matrix()).max_abs() / scale);
        worst = std::max(worst, asymmetry(f.p));
        worst = std::max(worst,
                         (f.x * f.x.transposed() + f.y * f.y.transposed() - Mat::identity(n))
                             .max_abs());
        worst = std::max(worst, (f.x * f.y.transposed() - f.y * f.x.transposed()).max_abs());
        ok = ok && is_spd(f.l);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(1, "pre-Iwasawa round trip, 500 matrices n=1..4, under 5 s",
           ok && worst <= 1e-9 && secs < 5.0, worst, 1e-9);
}

void criterion_2() {
    Rng rng(2020);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + t % 4;  // 2n <= 8
        Mat m = rng.spd(2 * n);
        WilliamsonFactors f = williamson(m);
        Mat target(2 * n, 2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            target(k, k) = f.lambdas[k];
            target(n + k, n + k) = f.lambdas[k];
        }
        worst = std::max(worst,
                         (f.s.matrix().transposed() * m * f.s.matrix() - target).max_abs());
        Vec moduli = oracles::eig_moduli(standard_J(n) * m);
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(moduli[2 * k] - f.lambdas[k]));
    }
    report(2, "Williamson diagonalization and |eig(JM)| oracle, 100 SPD matrices",
           worst <= 1e-8, worst, 1e-8);
}

void criterion_3() {
    const double hbar = 1.0;
    double worst = 0.0;
    for (double nn : {1.0, 2.0, 10.0}) {
        Mat m(4, 4);
        m(0, 0) = 1.0 / (nn * hbar);
        m(2, 2) = 1.0 / (nn * hbar);
        m(1, 1) = nn / hbar;
        m(3, 3) = nn / hbar;
        Ellipsoid e(Vec(4, 0.0), m, 1.0);
        worst = std::max(worst, std::abs(capacity(e) - M_PI * hbar / nn));
    }
    const bool exact_ok = worst <= 1e-9;
    Rng rng(33);
    Ellipsoid e(Vec(4, 0.0), rng.spd(4), 1.0);
    const double c0 = capacity(e);
    double inv = 0.0;
    for (int t = 0; t < 200; ++t) {
        SymplecticMatrix s = random_symplectic(2, 20000 + t, 6);
        inv = std::max(inv, std::abs(capacity(e.mapped(s.matrix(), Vec(4, 0.0))) - c0) / c0);
    }
    report(3, "two-mode ellipsoid capacity pi hbar/N and symplectic invariance",
           exact_ok && inv <= 1e-8, std::max(worst, inv), 1e-8);
}

void criterion_4() {
    SymplecticIsotopy iso = sampled_isotopy(2.0, 1e-3, free_particle);
    IwasawaSum sum = iwasawa_sum(iso);
    double worst = 0.0;
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
        Mat mr = sum.h_r.coefficient_matrix(t);
        // H_R = -x^2 / (2 (1 + t^2)) + t px / (1 + t^2)
        worst = std::max(worst, std::abs(0.5 * mr(0, 0) - (-0.5 / (1.0 + t * t))));
        worst = std::max(worst, std::abs(mr(0, 1) - t / (1.0 + t * t)));
    }
    report(4, "free-particle Iwasawa sum reproduces the reduced Hamiltonian", worst <= 1e-6,
           worst, 1e-6);
}

void criterion_5() {
    double worst = 0.0, defect = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + trial % 2;
        QuadraticHamiltonian h = random_poly_hamiltonian(n, 40000 + trial, 0.1, 1.0);
        SymplecticIsotopy iso = flow_from_quadratic(h, 1.0, 1e-3);
        Mat j = standard_J(n);
        for (const SymplecticMatrix& s : iso.frames())
            defect = std::max(defect, (s.matrix().transposed() * j * s.matrix() - j).max_abs());
        QuadraticHamiltonian rec = generator_from_isotopy(iso);
        for (double t : iso.times())
            worst = std::max(worst,
                             (rec.coefficient_matrix(t) - h.coefficient_matrix(t)).max_abs());
    }
    report(5, "generator/flow round trip at dt=1e-3", worst <= 1e-6 && defect <= 1e-11,
           std::max(worst, defect * 1e5), 1e-6);
}

void criterion_6() {
    const double T = 1.0, dt = 1e-4;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 2;
        QuadraticHamiltonian h = random_poly_hamiltonian(n, 50000 + trial, 0.1, T);
        QuadraticHamiltonian k = random_poly_hamiltonian(n, 60000 + trial, 0.1, T);
        SymplecticIsotopy fh = flow_from_quadratic(h, T, dt);
        SymplecticIsotopy fk = flow_from_quadratic(k, T, dt);
        SymplecticIsotopy fhk = flow_from_quadratic(compose_hamiltonians(h, k, T, dt), T, dt);
        SymplecticIsotopy fbar = flow_from_quadratic(inverse_hamiltonian(h, T, dt), T, dt);
        SymplecticMatrix g = random_symplectic(n, 70000 + trial, 5);
        SymplecticIsotopy fconj = flow_from_quadratic(conjugate_generator(h, g), T, dt);
        const std::size_t last = fh.steps();
        for (std::size_t i : {last / 2, last}) {
            Mat prod = fh.at(i).matrix() * fk.at(i).matrix();
            worst = std::max(worst,
                             (fhk.at(i).matrix() - prod).max_abs() / std::max(1.0, prod.max_abs()));
            worst = std::max(worst, (fbar.at(i).matrix() - fh.at(i).inverse().matrix()).max_abs());
            Mat conj = g.inverse().matrix() * fh.at(i).matrix() * g.matrix();
            worst = std::max(worst, (fconj.at(i).matrix() - conj).max_abs() /
                                        std::max(1.0, conj.max_abs()));
        }
    }
    // associativity on a selection of triples
    for (int trial = 0; trial < 5; ++trial) {
        QuadraticHamiltonian h = random_poly_hamiltonian(1, 80000 + trial, 0.1, T);
        QuadraticHamiltonian k = random_poly_hamiltonian(1, 81000 + trial, 0.1, T);
        QuadraticHamiltonian l = random_poly_hamiltonian(1, 82000 + trial, 0.1, T);
        SymplecticIsotopy fl = flow_from_quadratic(
            compose_hamiltonians(compose_hamiltonians(h, k, T, dt), l, T, dt), T, dt);
        SymplecticIsotopy fr = flow_from_quadratic(
            compose_hamiltonians(h, compose_hamiltonians(k, l, T, dt), T, dt), T, dt);
        worst = std::max(worst,
                         (fl.frames().back().matrix() - fr.frames().back().matrix()).max_abs());
    }
    report(6, "composition, inversion, conjugation, associativity of flows", worst <= 1e-7,
           worst, 1e-7);
}

void criterion_7() {
    double worst = 0.0;
    // free particle closed forms
    SymplecticIsotopy fp = sampled_isotopy(2.0, 1e-3, free_particle);
    worst = std::max(worst, strt_equivalence_check(fp).max_param_dev);
    for (double t : {0.5, 1.0, 2.0}) {
        GaussianState out =
            metaplectic_apply(SymplecticMatrix(free_particle(t)), GaussianState::ground(1));
        worst = std::max(worst, std::abs(out.x()(0, 0) - 1.0 / (1.0 + t * t)));
        worst = std::max(worst, std::abs(out.y()(0, 0) + t / (1.0 + t * t)));
    }
    // random isotopies
    for (int trial = 0; trial < 50; ++trial) {
        QuadraticHamiltonian h = random_poly_hamiltonian(1, 90000 + trial, 0.4, 1.0);
        worst = std::max(worst,
                         strt_equivalence_check(flow_from_quadratic(h, 1.0, 1e-3)).max_param_dev);
    }
    report(7, "full-metaplectic vs reduced-local Gaussian propagation", worst <= 1e-9, worst,
           1e-9);
}

void criterion_8() {
    GaussianState ground = GaussianState::ground(1);
    Mat w0 = wigner_numeric_1d(ground, {0.0}, {0.0}, 1024);
    const double origin_dev = std::abs(w0(0, 0) - 1.0 / M_PI);
    double worst = 0.0;
    Rng rng(88);
    for (int trial = 0; trial < 10; ++trial) {
        GaussianState s(rng.spd(1, 0.5, 2.0), rng.symmetric(1, 0.8), rng.vector(2, -0.4, 0.4));
        WignerGaussian wg = wigner_gaussian(s);
        Vec xs, ps;
        for (int i = -3; i <= 3; ++i) {
            xs.push_back(s.center()[0] + 0.45 * i);
            ps.push_back(s.center()[1] + 0.45 * i);
        }
        Mat wn = wigner_numeric_1d(s, xs, ps, 1024);
        for (std::size_t ix = 0; ix < xs.size(); ++ix)
            for (std::size_t ip = 0; ip < ps.size(); ++ip) {
                Vec dz{xs[ix] - s.center()[0], ps[ip] - s.center()[1]};
                const double closed = std::exp(-dot(dz, wg.g * dz)) / M_PI;
                worst = std::max(worst, std::abs(wn(ix, ip) - closed));
            }
    }
    report(8, "numeric Wigner quadrature against the closed form",
           worst <= 1e-6 && origin_dev <= 1e-8, std::max(worst, origin_dev), 1e-6);
}

void criterion_9() {
    Rng rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const double hbar = 0.25 + rng.uniform();
        GaussianState s(rng.spd(n, 0.5, 2.0), rng.symmetric(n, 0.8), rng.vector(2 * n), hbar);
        CovarianceReport rep = covariance(s);
        for (double v : rep.rs_products)
            worst = std::max(worst, std::abs(v - hbar * hbar / 4.0) / (hbar * hbar / 4.0));
    }
    report(9, "Robertson-Schroedinger saturation at hbar^2/4", worst <= 1e-12, worst, 1e-12);
}

void criterion_10() {
    Rng rng(1010);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        Ellipsoid e(rng.vector(2), rng.spd(2), 1.0);
        Ellipsoid p = shadow_x(e);
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 10000; ++k) {
            const double th = 2.0 * M_PI * k / 10000.0;
            Vec z = e.boundary_point({std::cos(th), std::sin(th)});
            lo = std::min(lo, z[0]);
            hi = std::max(hi, z[0]);
        }
        worst = std::max(worst, std::abs(p.support({1.0}) - hi));
        worst = std::max(worst, std::abs(-p.support({-1.0}) - lo));
    }
    const bool schur_ok = worst <= 1e-3;
    SymplecticIsotopy iso = sampled_isotopy(2.0, 1e-2, free_particle);
    std::vector<Vec> zpath(iso.times().size(), Vec(2, 0.0));
    const double eps = 0.8;
    double hw_dev = 0.0;
    std::vector<Ellipsoid> shadows = shadow_ball(iso, zpath, eps);
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        const double t = iso.times()[k];
        const double hw = shadows[k].level() / std::sqrt(shadows[k].shape()(0, 0));
        hw_dev = std::max(hw_dev, std::abs(hw - eps * std::sqrt(1.0 + t * t)));
    }
    report(10, "shadows: Schur projection vs sampling oracle; free-particle spreading",
           schur_ok && hw_dev <= 1e-8, std::max(worst, hw_dev), 1e-3);
}

void criterion_11() {
    const double eps = 0.7;
    const double target = M_PI * eps * eps;
    double lowest = 1e300;
    for (int trial = 0; trial < 200; ++trial) {
        SymplecticBall b(random_symplectic(2, 110000 + trial, 6), Vec(4, 0.0), eps);
        Ellipsoid p = subsystem_project(ball_to_ellipsoid(b), 1);
        lowest = std::min(lowest, capacity(p) / target);
    }
    SymplecticMatrix sa = random_symplectic(1, 7, 6);
    SymplecticMatrix sb = random_symplectic(1, 8, 6);
    Mat s(4, 4);
    s(0, 0) = sa.matrix()(0, 0);
    s(0, 2) = sa.matrix()(0, 1);
    s(2, 0) = sa.matrix()(1, 0);
    s(2, 2) = sa.matrix()(1, 1);
    s(1, 1) = sb.matrix()(0, 0);
    s(1, 3) = sb.matrix()(0, 1);
    s(3, 1) = sb.matrix()(1, 0);
    s(3, 3) = sb.matrix()(1, 1);
    Ellipsoid pe = subsystem_project(
        ball_to_ellipsoid(SymplecticBall(SymplecticMatrix(s), Vec(4, 0.0), eps)), 1);
    const double eq_dev = std::abs(capacity(pe) - target) / target;
    report(11, "subsystem projection capacity bound and block-diagonal equality",
           lowest >= 1.0 - 1e-9 && eq_dev <= 1e-9, std::max(1.0 - lowest, eq_dev), 1e-9);
}

void criterion_12() {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 2;
        QuadraticHamiltonian h = random_poly_hamiltonian(n, 120000 + trial, 0.3, 1.0);
        SymplecticIsotopy iso = flow_from_quadratic(h, 1.0, 1e-2);
        Rng rng(130000 + trial);
        Vec vel = rng.vector(2 * n);
        std::vector<Vec> path(iso.times().size());
        for (std::size_t k = 0; k < path.size(); ++k) path[k] = iso.times()[k] * vel;
        const double eps = 0.3 + 0.5 * rng.uniform();
        SymplecticBall ball(random_symplectic(n, 140000 + trial, 6), rng.vector(2 * n), eps);
        BallTrajectory traj = chalkboard_motion(iso, path, ball);
        const double target = M_PI * eps * eps;
        for (const SymplecticBall& b : traj.balls)
            worst = std::max(worst, std::abs(capacity(ball_to_ellipsoid(b)) - target) / target);
    }
    report(12, "chalkboard motions conserve capacity along 20 scenarios", worst <= 1e-6, worst,
           1e-6);
}

void criterion_13() {
    NonlinearHamiltonian pen;
    pen.value = [](const Vec& z, double) { return 0.5 * z[1] * z[1] - std::cos(z[0]); };
    pen.gradient = [](const Vec& z, double) { return Vec{std::sin(z[0]), z[1]}; };
    pen.hessian = [](const Vec& z, double) {
        Mat m(2, 2);
        m(0, 0) = std::cos(z[0]);
        m(1, 1) = 1.0;
        return m;
    };
    Vec z0{0.6, 0.4};
    NearbyOrbit orbit = nearby_orbit(pen, z0, 1.0, 1e-3);
    std::vector<double> errs;
    for (double eps : {0.1, 0.05, 0.025}) {
        double worst = 0.0;
        for (int k = 0; k < 32; ++k) {
            const double th = 2.0 * M_PI * k / 32.0;
            Vec dz{eps * std::cos(th), eps * std::sin(th)};
            Vec full = integrate_orbit(pen, z0 + dz, 0.0, 1.0, 1e-12);
            Vec lin = orbit.center.back() + orbit.linearization.frames().back().apply(dz);
            worst = std::max(worst, norm_inf(full - lin));
        }
        errs.push_back(worst);
    }
    const double r1 = errs[1] / errs[0];
    const double r2 = errs[2] / errs[1];
    report(13, "nearby-orbit error contracts by at least 0.3 per radius halving",
           r1 <= 0.3 && r2 <= 0.3, std::max(r1, r2), 0.3);
}

void criterion_14() {
    Rng rng(1414);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 2;
        GaussianState s(rng.spd(n, 0.5, 2.0), rng.symmetric(n, 0.8), rng.vector(2 * n));
        SymplecticMatrix g = random_symplectic(n, 150000 + trial, 6);
        GaussianState out = metaplectic_apply(g, s);
        Mat sinv = g.inverse().matrix();
        Mat expect = symmetrize(sinv.transposed() * wigner_gaussian(s).g * sinv);
        worst = std::max(worst, (wigner_gaussian(out).g - expect).max_abs() /
                                    std::max(1.0, expect.max_abs()));
    }
    report(14, "Wigner covariance G' = (S^-1)^T G S^-1", worst <= 1e-9, worst, 1e-9);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 14 criteria passed in %.1f s\n", 14 - failures, secs);
    return failures == 0 ? 0 : 1;
}
