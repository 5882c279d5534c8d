#pragma once

#include "chalk/symplectic.hpp"

namespace chalk {

// Solid ellipsoid { z : M (z - z0) . (z - z0) <= level^2 } with M symmetric
// positive definite. Lives in any dimension; phase-space operations require
// the dimension to be even.
class Ellipsoid {
  public:
    Ellipsoid(Vec center, Mat shape, double level, double sym_tol = 1e-8);

    std::size_t dim() const { return center_.size(); }
    const Vec& center() const { return center_; }
    const Mat& shape() const { return shape_; }
    double level() const { return level_; }

    bool contains(const Vec& z, double slack = 0.0) const;
    // h(u) = <u, z0> + level * sqrt(u^T M^-1 u)
    double support(const Vec& u) const;
    // z0 + level * R^-1 u for |u| = 1, with M = R^T R
    Vec boundary_point(const Vec& u) const;
    // image under the affine map z -> A z + b (A invertible)
    Ellipsoid mapped(const Mat& a, const Vec& b) const;
    Ellipsoid scaled(double factor) const;  // about its own center

  private:
    Vec center_;
    Mat shape_;
    Mat shape_inv_;  // precomputed; instances are immutable and shareable
    double level_;
};

struct WilliamsonFactors {
    SymplecticMatrix s;
    Vec lambdas;  // symplectic eigenvalues, descending
};

// Moduli of the eigenvalue pairs +-i lambda_j of J M, descending; computed
// from the antisymmetric similarity M^(1/2) J M^(1/2).
Vec symplectic_eigenvalues(const Mat& m);

// S^T M S = diag(Lambda, Lambda) with S symplectic; residual-checked.
WilliamsonFactors williamson(const Mat& m, double tol = 1e-8);

// pi * level^2 / lambda_max(M); all capacities agree on ellipsoids.
double capacity(const Ellipsoid& e);

// Support-function Hausdorff distance over a deterministic direction set.
double hausdorff_distance(const Ellipsoid& e1, const Ellipsoid& e2,
                          int n_dirs = config().hausdorff_dirs);

// Deterministic unit directions: uniform angles in dimension 2, spherical
// Fibonacci in dimension 3, a Kronecker sequence pushed through the inverse
// normal CDF above that. Antipodes included.
std::vector<Vec> sphere_directions(std::size_t dim, int count);

// Minimum-volume enclosing ellipsoid (Khachiyan ascent), (1+tol)-optimal.
Ellipsoid mvee(const std::vector<Vec>& points, double tol = config().mvee_tol,
               int max_iters = config().mvee_max_iters);

// Test hook: perturbs an ellipsoid within Hausdorff distance delta and
// reports the largest capacity change seen.
struct ContinuityReport {
    double delta = 0.0;
    double max_capacity_change = 0.0;
    int samples = 0;
};
ContinuityReport capacity_continuity_probe(const Ellipsoid& e, double delta,
                                           int samples = 32, std::uint64_t seed = 7);

}  // namespace chalk
