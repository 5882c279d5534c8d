#include "chalk/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace chalk {

Ellipsoid::Ellipsoid(Vec center, Mat shape, double level, double sym_tol)
    : center_(std::move(center)), shape_(std::move(shape)), level_(level) {
    if (shape_.rows() != shape_.cols() || shape_.rows() != center_.size())
        throw InputError("Ellipsoid: center/shape dimension mismatch");
    if (!(level_ > 0.0)) throw InputError("Ellipsoid: level must be positive");
    if (asymmetry(shape_) > sym_tol * std::max(1.0, shape_.max_abs()))
        throw InputError("Ellipsoid: shape matrix not symmetric");
    shape_ = symmetrize(shape_);
    cholesky(shape_);  // positive definiteness certificate
    shape_inv_ = inverse(shape_);
}

bool Ellipsoid::contains(const Vec& z, double slack) const {
    Vec d = z - center_;
    return dot(d, shape_ * d) <= level_ * level_ * (1.0 + slack);
}

double Ellipsoid::support(const Vec& u) const {
    return dot(u, center_) + level_ * std::sqrt(std::max(0.0, dot(u, shape_inv_ * u)));
}

Vec Ellipsoid::boundary_point(const Vec& u) const {
    Mat r = cholesky(shape_).transposed();  // M = R^T R
    Vec w = solve(r, (1.0 / norm2(u)) * u);
    return center_ + level_ * w;
}

Ellipsoid Ellipsoid::mapped(const Mat& a, const Vec& b) const {
    // {A z + b : M (z - z0)^2 <= eps^2} has shape A^-T M A^-1
    Mat ainv = inverse(a);
    Mat m = symmetrize(ainv.transposed() * shape_ * ainv);
    return Ellipsoid(a * center_ + b, std::move(m), level_);
}

Ellipsoid Ellipsoid::scaled(double factor) const {
    if (!(factor > 0.0)) throw InputError("Ellipsoid::scaled: factor must be positive");
    return Ellipsoid(center_, shape_, level_ * factor);
}

Vec symplectic_eigenvalues(const Mat& m) {
    if (m.rows() % 2 != 0) throw InputError("symplectic_eigenvalues: odd dimension");
    const std::size_t n = m.rows() / 2;
    if (!is_spd(m)) throw InputError("symplectic_eigenvalues: M not SPD");
    Mat mh = sqrtm_spd(symmetrize(m));
    Mat k = mh * standard_J(n) * mh;           // antisymmetric, eigenvalues +-i lambda_j
    EigSym e = eig_sym(k.transposed() * k);     // lambda_j^2, each twice
    Vec lam(n);
    for (std::size_t j = 0; j < n; ++j) {
        // descending, collapse the doubled pairs
        const double v0 = e.values[2 * n - 1 - 2 * j];
        const double v1 = e.values[2 * n - 2 - 2 * j];
        lam[j] = std::sqrt(std::max(0.0, 0.5 * (v0 + v1)));
    }
    return lam;
}

WilliamsonFactors williamson(const Mat& m_in, double tol) {
    if (m_in.rows() % 2 != 0) throw InputError("williamson: odd dimension");
    const std::size_t n = m_in.rows() / 2;
    const std::size_t nn = 2 * n;
    Mat m = symmetrize(m_in);
    if (!is_spd(m)) throw InputError("williamson: M not SPD");

    Mat mih = invsqrtm_spd(m);
    Mat k = mih * standard_J(n) * mih;  // antisymmetric; canonical pairs carry 1/lambda_j

    // Canonical planes of K via the symmetric embedding E = [[0, -K], [K, 0]]:
    // an eigenvector (a; b) of E with eigenvalue mu > 0 satisfies
    // K a = mu b and K b = -mu a.
    Mat e(2 * nn, 2 * nn);
    e.set_block(0, nn, -1.0 * k);
    e.set_block(nn, 0, k);
    EigSym es = eig_sym(e);

    struct Cand {
        double mu;
        Vec a, b;
    };
    std::vector<Cand> cands;
    for (std::size_t j = 0; j < 2 * nn; ++j) {
        if (es.values[j] <= 0.0) continue;
        Cand c;
        c.mu = es.values[j];
        c.a.resize(nn);
        c.b.resize(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            c.a[i] = es.vectors(i, j);
            c.b[i] = es.vectors(nn + i, j);
        }
        cands.push_back(std::move(c));
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) { return l.mu < r.mu; });

    // Each complex plane appears twice among the real eigenvectors (u and iu);
    // a Gram-Schmidt pass in the complex inner product keeps one copy of each.
    std::vector<Cand> planes;
    for (const Cand& cand : cands) {
        if (planes.size() == n) break;
        Vec a = cand.a, b = cand.b;
        for (const Cand& acc : planes) {
            // <u_acc, u> with u = a + i b
            const double cr = dot(acc.a, a) + dot(acc.b, b);
            const double ci = dot(acc.a, b) - dot(acc.b, a);
            for (std::size_t i = 0; i < nn; ++i) {
                a[i] -= cr * acc.a[i] - ci * acc.b[i];
                b[i] -= cr * acc.b[i] + ci * acc.a[i];
            }
        }
        const double nrm = std::sqrt(dot(a, a) + dot(b, b));
        if (nrm < 1e-6) continue;  // same plane as an accepted vector
        for (std::size_t i = 0; i < nn; ++i) {
            a[i] /= nrm;
            b[i] /= nrm;
        }
        planes.push_back({cand.mu, std::move(a), std::move(b)});
    }
    if (planes.size() != n) throw NumericError("williamson: failed to extract canonical planes");

    // mu ascending means lambda = 1/mu descending, the documented order.
    Mat o(nn, nn);
    Vec lam(n);
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t j = 0; j < n; ++j) {
        lam[j] = 1.0 / planes[j].mu;
        // fix the overall phase of the plane: first significant entry of the
        // second column block positive
        double sign = 1.0;
        for (std::size_t i = 0; i < nn; ++i)
            if (std::abs(planes[j].a[i]) > 1e-8) {
                sign = planes[j].a[i] > 0.0 ? 1.0 : -1.0;
                break;
            }
        for (std::size_t i = 0; i < nn; ++i) {
            o(i, j) = sign * sqrt2 * planes[j].b[i];
            o(i, n + j) = sign * sqrt2 * planes[j].a[i];
        }
    }

    Mat dsqrt(nn, nn);
    for (std::size_t j = 0; j < n; ++j) {
        dsqrt(j, j) = std::sqrt(lam[j]);
        dsqrt(n + j, n + j) = std::sqrt(lam[j]);
    }
    Mat s = mih * o * dsqrt;

    Mat target(nn, nn);
    for (std::size_t j = 0; j < n; ++j) {
        target(j, j) = lam[j];
        target(n + j, n + j) = lam[j];
    }
    const double scale = std::max(1.0, m.max_abs());
    const double res = (s.transposed() * m * s - target).max_abs();
    if (!(res <= tol * scale))
        throw NumericError("williamson: residual " + std::to_string(res) + " exceeds tolerance");

    return WilliamsonFactors{SymplecticMatrix(std::move(s)), std::move(lam)};
}

double capacity(const Ellipsoid& e) {
    if (e.dim() % 2 != 0) throw InputError("capacity: ellipsoid dimension must be even");
    Vec lam = symplectic_eigenvalues(e.shape());
    return M_PI * e.level() * e.level() / lam.front();
}

std::vector<Vec> sphere_directions(std::size_t dim, int count) {
    if (dim < 1 || count < 1) throw InputError("sphere_directions: bad arguments");
    std::vector<Vec> dirs;
    dirs.reserve(2 * count);
    if (dim == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
        return dirs;
    }
    if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            const double th = M_PI * k / count;  // antipodes added below
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else if (dim == 3) {
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - (2.0 * k + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            dirs.push_back({r * std::cos(ga * k), r * std::sin(ga * k), z});
        }
    } else {
        // Kronecker sequence with the generalized golden ratio, mapped through
        // the inverse normal CDF and normalized.
        double phi = 2.0;
        for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1.0));
        Vec alpha(dim);
        double p = 1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            p /= phi;
            alpha[d] = p;
        }
        auto inv_normal = [](double u) {
            // Newton on erf; u in (0,1)
            double x = 0.0;
            for (int it = 0; it < 60; ++it) {
                const double f = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) - u;
                const double fp = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
                const double step = f / std::max(fp, 1e-300);
                x -= std::clamp(step, -2.0, 2.0);
                if (std::abs(step) < 1e-14) break;
            }
            return x;
        };
        Vec u(dim, 0.5);
        for (int k = 0; k < count; ++k) {
            Vec g(dim);
            double nrm = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                u[d] += alpha[d];
                if (u[d] >= 1.0) u[d] -= 1.0;
                g[d] = inv_normal(std::min(std::max(u[d], 1e-9), 1.0 - 1e-9));
                nrm += g[d] * g[d];
            }
            nrm = std::sqrt(nrm);
            if (nrm < 1e-9) continue;
            for (double& x : g) x /= nrm;
            dirs.push_back(std::move(g));
        }
    }
    const std::size_t half = dirs.size();
    for (std::size_t k = 0; k < half; ++k) dirs.push_back(-1.0 * dirs[k]);
    return dirs;
}

double hausdorff_distance(const Ellipsoid& e1, const Ellipsoid& e2, int n_dirs) {
    if (e1.dim() != e2.dim()) throw InputError("hausdorff_distance: dimension mismatch");
    if (n_dirs < 16) throw InputError("hausdorff_distance: need at least 16 directions");
    double d = 0.0;
    for (const Vec& u : sphere_directions(e1.dim(), n_dirs))
        d = std::max(d, std::abs(e1.support(u) - e2.support(u)));
    return d;
}

Ellipsoid mvee(const std::vector<Vec>& points, double tol, int max_iters) {
    if (points.empty()) throw InputError("mvee: no points");
    const std::size_t d = points[0].size();
    const std::size_t m = points.size();
    if (m < d + 1) throw InputError("mvee: need at least dim+1 points");
    for (const Vec& p : points)
        if (p.size() != d) throw InputError("mvee: inconsistent point dimensions");

    // Khachiyan ascent on the lifted points q_i = (p_i, 1).
    Mat q(d + 1, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < d; ++r) q(r, i) = points[i][r];
        q(d, i) = 1.0;
    }
    Vec u(m, 1.0 / double(m));
    const double dd = double(d);
    for (int it = 0; it < max_iters; ++it) {
        Mat x(d + 1, d + 1);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t r = 0; r <= d; ++r)
                for (std::size_t c = 0; c <= d; ++c) x(r, c) += u[i] * q(r, i) * q(c, i);
        Lu f = lu_factor(x);
        if (f.singular) throw InputError("mvee: degenerate point set");
        double kappa = 0.0;
        std::size_t jmax = 0;
        for (std::size_t i = 0; i < m; ++i) {
            Vec qi(d + 1);
            for (std::size_t r = 0; r <= d; ++r) qi[r] = q(r, i);
            const double mi = dot(qi, lu_solve(f, qi));
            if (mi > kappa) {
                kappa = mi;
                jmax = i;
            }
        }
        if (kappa <= (1.0 + tol) * (dd + 1.0)) break;
        const double step = (kappa - dd - 1.0) / ((dd + 1.0) * (kappa - 1.0));
        for (double& w : u) w *= (1.0 - step);
        u[jmax] += step;
    }

    Vec c(d, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < d; ++r) c[r] += u[i] * points[i][r];
    Mat cov(d, d);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t s = 0; s < d; ++s)
                cov(r, s) += u[i] * (points[i][r] - c[r]) * (points[i][s] - c[s]);
    Lu f = lu_factor(cov);
    if (f.singular) throw InputError("mvee: degenerate point set");
    Mat shape = symmetrize(lu_solve(f, Mat::identity(d)));
    shape *= 1.0 / dd;
    return Ellipsoid(std::move(c), std::move(shape), 1.0);
}

ContinuityReport capacity_continuity_probe(const Ellipsoid& e, double delta, int samples,
                                           std::uint64_t seed) {
    if (delta < 0.0) throw InputError("capacity_continuity_probe: delta must be >= 0");
    ContinuityReport rep;
    rep.delta = delta;
    const double c0 = capacity(e);
    EigSym es = eig_sym(e.shape());
    const double a_max = e.level() / std::sqrt(es.values.front());  // largest semi-axis
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
        Ellipsoid pert = e;
        if (k % 2 == 0) {
            // uniform scaling with d_H exactly |s| * a_max
            const double s = rng.uniform(-1.0, 1.0) * delta / a_max;
            if (1.0 + s > 0.0) pert = e.scaled(1.0 + s);
        } else {
            Vec w = rng.vector(e.dim());
            const double nrm = norm2(w);
            if (nrm > 0.0) w = (delta * rng.uniform() / nrm) * w;
            pert = Ellipsoid(e.center() + w, e.shape(), e.level());
        }
        rep.max_capacity_change = std::max(rep.max_capacity_change, std::abs(capacity(pert) - c0));
        ++rep.samples;
    }
    return rep;
}

}  // namespace chalk
