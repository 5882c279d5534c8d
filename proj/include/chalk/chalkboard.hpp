#pragma once

#include "chalk/flows.hpp"
#include "chalk/spectra.hpp"

namespace chalk {

// B_S(z0, eps) = T(z0) S B(eps); the image of a ball under ISp(n). Its
// ellipsoid has shape (S S^T)^-1 and capacity pi eps^2 for every S.
struct SymplecticBall {
    SymplecticMatrix s;
    Vec center;
    double radius;

    SymplecticBall(SymplecticMatrix s_, Vec center_, double radius_);
    std::size_t n() const { return s.n(); }
};

Ellipsoid ball_to_ellipsoid(const SymplecticBall& b);

// Unique (P, L, z0) with ball = T(z0) V_{-P} M_L B(eps); the rotation part
// of S is quotiented away by the ball's symmetry.
struct BallNormalForm {
    Vec z0;
    Mat p;  // symmetric
    Mat l;  // SPD

    LocalElement local() const { return LocalElement(p, l, z0); }
};
BallNormalForm ball_normal_form(const SymplecticBall& b);

// The unique ISp0 element taking b's ellipsoid onto b2's (equal radii).
AffineSymplectic ball_transport(const SymplecticBall& b, const SymplecticBall& b2);

struct BallTrajectory {
    Vec times;
    std::vector<SymplecticBall> balls;
    std::vector<Ellipsoid> shadows;  // x-space, filled on request
};

// Transport of a ball along a linear isotopy and a center path: at each
// grid point the ball is B_{R_t S}(z_t + S_t a, eps) with R_t the
// conjugated reduced flow of the proposition.
BallTrajectory chalkboard_motion(const SymplecticIsotopy& iso, const std::vector<Vec>& z_path,
                                 const SymplecticBall& ball, bool with_shadows = false);

// Orthogonal projection onto x-space: Schur complement M / M_PP.
Ellipsoid shadow_x(const Ellipsoid& e);

// Shadow of the moving ball: T(x_t) (A_t A_t^T + B_t B_t^T)^(1/2) B^n(eps).
std::vector<Ellipsoid> shadow_ball(const SymplecticIsotopy& iso, const std::vector<Vec>& z_path,
                                   double eps);

// Projection onto the subsystem phase space of the first n_A degrees of
// freedom; coordinates are permuted to the paired (x_A, p_A | x_B, p_B)
// order internally and back.
Ellipsoid subsystem_project(const Ellipsoid& e, std::size_t n_a);

// Nonlinear Hamiltonian with optional analytic derivatives; finite
// differences stand in for anything missing.
struct NonlinearHamiltonian {
    std::function<double(const Vec&, double)> value;
    std::function<Vec(const Vec&, double)> gradient;
    std::function<Mat(const Vec&, double)> hessian;

    Vec grad(const Vec& z, double t) const;
    Mat hess(const Vec& z, double t) const;
};

// Adaptive RK4 for z' = J grad H(z, t). Throws on step-size underflow.
Vec integrate_orbit(const NonlinearHamiltonian& h, Vec z0, double t0, double t1,
                    double tol = 1e-10);

// Reference orbit plus the linearized (variational) isotopy around it, with
// the local quadratic Hamiltonian of the linearization.
struct NearbyOrbit {
    Vec times;
    std::vector<Vec> center;
    SymplecticIsotopy linearization;
    QuadraticHamiltonian local_ham;
};
NearbyOrbit nearby_orbit(const NonlinearHamiltonian& h, Vec z0, double T, double dt,
                         double orbit_tol = 1e-10);

// John-Loewner surrogate for the open recalibration problem: MVEE of the
// transported boundary samples, rescaled to the target capacity.
Ellipsoid recalibrated_ellipsoid(const std::vector<Vec>& boundary_samples, double target_eps,
                                 double mvee_tol = config().mvee_tol);

// Low-discrepancy boundary points of an ellipsoid (Cholesky image of
// deterministic sphere directions).
std::vector<Vec> boundary_samples(const Ellipsoid& e, int count);

}  // namespace chalk
