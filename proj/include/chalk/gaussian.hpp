#pragma once

#include <complex>

#include "chalk/chalkboard.hpp"

namespace chalk {

// Squeezed coherent state phi(x) ~ (pi hbar)^(-n/4) (det X)^(1/4)
// exp(-(X + iY) x^2 / 2 hbar), translated to center z0 and carrying a unit
// global phase. L2-normalized by construction.
class GaussianState {
  public:
    GaussianState(Mat x, Mat y, Vec center, double hbar = 1.0, cdouble phase = 1.0);
    static GaussianState ground(std::size_t n, double hbar = 1.0);  // X = I, Y = 0, z0 = 0

    std::size_t n() const { return x_.rows(); }
    const Mat& x() const { return x_; }
    const Mat& y() const { return y_; }
    const Vec& center() const { return center_; }
    double hbar() const { return hbar_; }
    cdouble phase() const { return phase_; }

    GaussianState with_phase(cdouble phase) const;
    // psi(u) at a position-space point (n = 1 convenience for quadrature)
    cdouble evaluate(const Vec& u) const;

  private:
    Mat x_, y_;
    Vec center_;
    double hbar_;
    cdouble phase_;
};

// Wigner transform parameters: W(z) = (pi hbar)^-n exp(-G (z - z0)^2 / hbar)
// with G symplectic, symmetric, positive definite (det G = 1).
struct WignerGaussian {
    Mat g;
    Vec center;
    double hbar;
};

WignerGaussian wigner_gaussian(const GaussianState& s);

// Covariance matrix Sigma = (hbar/2) [[X^-1, -X^-1 Y], [-Y X^-1, X + Y X^-1 Y]]
// plus the Robertson-Schroedinger products, saturated at hbar^2/4: the
// diagonal of D(x,x) D(p,p) - D(x,p)^2, which the block identities of a
// symmetric symplectic G force to (hbar^2/4) I.
struct CovarianceReport {
    Mat sigma;
    Vec rs_products;  // per degree of freedom
};
CovarianceReport covariance(const GaussianState& s);

// Symplectic ball of radius sqrt(hbar); capacity pi hbar.
struct QuantumBlob {
    SymplecticBall ball;
    double hbar;

    QuantumBlob(SymplecticBall b, double hb);
};

QuantumBlob blob_from_gaussian(const GaussianState& s);
GaussianState gaussian_from_blob(const QuantumBlob& q);

// Metaplectic action on Gaussian parameters. The pre-Iwasawa route carries
// the result; with debug crosschecks on, the Gamma = (C + iD)(A + iB)^-1
// route must agree to 1e-10. The phase advances by the principal branch of
// det(A + iB)^(-1/2) of the composed matrix; maslov in {0, 2} selects the
// sign of the two-fold cover.
//
// Convention note: shear(P) has +P in the lower-left block, so the position
// multiplier exp(-i P x^2 / 2 hbar) projects onto shear(-P).
GaussianState metaplectic_apply(const SymplecticMatrix& s, const GaussianState& state,
                                int maslov = 0);

// Heisenberg-Weyl translation: center shift plus the Weyl phase.
GaussianState heisenberg_weyl_apply(const Vec& z, const GaussianState& state);

// Transitivity data: s' = e^{i chi / hbar} T(z'') V_{P''} M_{L''} s.
struct GaussianTransport {
    double chi;
    Vec z2;
    Mat p2, l2;
};
GaussianTransport gaussian_transport(const GaussianState& s, const GaussianState& s2);
// applies the transport operators to s (phase included)
GaussianState apply_transport(const GaussianTransport& t, const GaussianState& s);

// 1-D Wigner quadrature oracle on a grid; trapezoid in y with Nyquist guard.
Mat wigner_numeric_1d(const GaussianState& s, const Vec& x_grid, const Vec& p_grid,
                      int nodes = 2048);

// Full-metaplectic route (Gamma formula on S_t) against the reduced local
// route (parameters from the pre-Iwasawa factors alone), per grid point.
struct StrtReport {
    double max_param_dev = 0.0;
    double max_phase_dev = 0.0;  // radians, branch-unwrapped along the grid
};
StrtReport strt_equivalence_check(const SymplecticIsotopy& iso);

}  // namespace chalk
