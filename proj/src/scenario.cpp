#include "chalk/scenario.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <thread>

namespace chalk {

namespace {

// payloads may be inline or {"file": "path"}
json resolve(const json& j, const std::string& key) {
    if (!j.contains(key)) throw InputError("scenario: missing field '" + key + "'");
    const json& v = j.at(key);
    if (v.is_object() && v.contains("file")) return load_json_file(v.at("file").get<std::string>());
    return v;
}

struct GridSpec {
    double T;
    double dt;
};

GridSpec grid_spec(const json& j) {
    if (!j.contains("grid")) throw InputError("scenario: missing grid");
    const json& g = j.at("grid");
    if (!g.is_object() || !g.contains("T") || !g.contains("dt"))
        throw InputError("scenario: grid must provide T and dt");
    GridSpec spec{g.at("T").get<double>(), g.at("dt").get<double>()};
    if (!(spec.T > 0.0) || !(spec.dt > 0.0)) throw InputError("scenario: grid T and dt must be positive");
    return spec;
}

SymplecticIsotopy isotopy_for(const json& j) {
    if (j.contains("isotopy")) return isotopy_from_json(resolve(j, "isotopy"));
    if (j.contains("hamiltonian")) {
        GridSpec g = grid_spec(j);
        return flow_from_quadratic(hamiltonian_from_json(resolve(j, "hamiltonian")), g.T, g.dt);
    }
    throw InputError("scenario: needs 'isotopy' or 'hamiltonian'");
}

std::vector<Vec> center_path_for(const json& j, const SymplecticIsotopy& iso) {
    const std::size_t m = iso.times().size();
    const std::size_t nn = 2 * iso.n();
    if (!j.contains("center_path")) {
        if (iso.has_translation()) return iso.translation_path();
        return std::vector<Vec>(m, Vec(nn, 0.0));
    }
    const json& c = j.at("center_path");
    const std::string kind = c.value("kind", "none");
    if (kind == "none") return std::vector<Vec>(m, Vec(nn, 0.0));
    if (kind == "line") {
        Vec v = vec_from_json(c.at("velocity"));
        if (v.size() != nn) throw InputError("center_path: velocity dimension mismatch");
        std::vector<Vec> path(m);
        for (std::size_t k = 0; k < m; ++k) path[k] = iso.times()[k] * v;
        return path;
    }
    if (kind == "polyline") {
        std::vector<Vec> path;
        for (const auto& p : c.at("points")) path.push_back(vec_from_json(p));
        if (path.size() != m) throw InputError("center_path: polyline length must match the grid");
        return path;
    }
    throw InputError("center_path: unknown kind '" + kind + "'");
}

SymplecticBall ball_for(const json& j) {
    if (!j.contains("ball")) throw InputError("scenario: missing ball");
    const json& b = j.at("ball");
    const double eps = b.at("eps").get<double>();
    Vec center = b.contains("center") ? vec_from_json(b.at("center")) : Vec();
    if (b.contains("S")) {
        SymplecticMatrix s = symplectic_from_json(b.at("S"));
        if (center.empty()) center.assign(2 * s.n(), 0.0);
        return SymplecticBall(std::move(s), std::move(center), eps);
    }
    if (b.contains("normal_form")) {
        const json& nf = b.at("normal_form");
        LocalElement e(mat_from_json(nf.at("P")), mat_from_json(nf.at("L")));
        if (center.empty()) center.assign(2 * e.n(), 0.0);
        return SymplecticBall(SymplecticMatrix(e.dense_linear()), std::move(center), eps);
    }
    throw InputError("ball: needs 'S' or 'normal_form'");
}

json matrices_to_json(const std::vector<Mat>& ms) {
    json arr = json::array();
    for (const Mat& m : ms) arr.push_back(mat_to_json(m));
    return arr;
}

struct Output {
    std::string path;
    std::string format;  // "csv" or "json"
};

Output output_spec(const json& j) {
    if (!j.contains("output")) return {};
    const json& o = j.at("output");
    Output out{o.value("path", ""), o.value("format", "json")};
    if (out.format != "csv" && out.format != "json")
        throw InputError("output: format must be csv or json");
    return out;
}

void emit(const Output& out, const json& report, const json& results, const std::string& csv) {
    if (out.path.empty()) return;
    if (out.format == "csv") {
        if (csv.empty()) throw InputError("output: csv format not available for this kind");
        write_text_file(out.path, csv);
    } else {
        json doc = results;
        doc["report"] = report;
        write_text_file(out.path, doc.dump(2) + "\n");
    }
}

json run_capacity(const json& j, json& report) {
    Ellipsoid e = ellipsoid_from_json(resolve(j, "ellipsoid"));
    WilliamsonFactors w = williamson(e.shape());
    json results;
    results["capacity"] = capacity(e);
    results["symplectic_spectrum"] = vec_to_json(w.lambdas);
    Mat target(e.dim(), e.dim());
    for (std::size_t k = 0; k < e.dim() / 2; ++k) {
        target(k, k) = w.lambdas[k];
        target(e.dim() / 2 + k, e.dim() / 2 + k) = w.lambdas[k];
    }
    report["residuals"]["williamson"] =
        (w.s.matrix().transposed() * e.shape() * w.s.matrix() - target).max_abs();
    return results;
}

json run_mvee(const json& j, json& report) {
    std::vector<Vec> pts;
    for (const auto& p : resolve(j, "points")) pts.push_back(vec_from_json(p));
    const double tol = j.value("tol", config().mvee_tol);
    Ellipsoid e = mvee(pts, tol);
    double worst = 0.0;
    for (const Vec& p : pts) {
        Vec d = p - e.center();
        worst = std::max(worst, dot(d, e.shape() * d) / (e.level() * e.level()));
    }
    report["residuals"]["max_point_quadform"] = worst;
    return ellipsoid_to_json(e);
}

json run_factor(const json& j, json& report) {
    SymplecticMatrix s = symplectic_from_json(resolve(j, "matrix"));
    const std::string mode = j.value("mode", "pre-iwasawa");
    json results;
    if (mode == "pre-iwasawa") {
        PreIwasawa f = pre_iwasawa(s);
        results["P"] = mat_to_json(f.p);
        results["L"] = mat_to_json(f.l);
        results["U"] = mat_to_json(f.u.matrix());
        results["X"] = mat_to_json(f.x);
        results["Y"] = mat_to_json(f.y);
        report["residuals"]["reconstruction"] = (f.reconstruct() - s.matrix()).max_abs();
    } else if (mode == "free") {
        FreeFactors f = free_factorization(s);
        results["P1"] = mat_to_json(f.p1);
        results["Lmid"] = mat_to_json(f.l_mid);
        results["P2"] = mat_to_json(f.p2);
        report["residuals"]["reconstruction"] = (f.reconstruct() - s.matrix()).max_abs();
    } else if (mode == "sp0") {
        if (s.block_b().max_abs() > 1e-9 * std::max(1.0, s.matrix().max_abs()))
            throw NumericError("factor sp0: matrix not in Sp0 (upper-right block nonzero)");
        Mat l = s.block_d().transposed();
        Mat p = s.block_c() * s.block_d().transposed();  // C D^T, symmetric by (2cond)
        LocalElement e(symmetrize(p), l);
        results["P"] = mat_to_json(e.p());
        results["L"] = mat_to_json(e.l());
        report["residuals"]["reconstruction"] = (e.dense_linear() - s.matrix()).max_abs();
    } else {
        throw InputError("factor: unknown mode '" + mode + "'");
    }
    return results;
}

std::string flow_csv(const SymplecticIsotopy& iso) {
    const std::size_t nn = 2 * iso.n();
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j)
            header.push_back("S" + std::to_string(i) + std::to_string(j));
    for (std::size_t i = 0; i < nn; ++i) header.push_back("z" + std::to_string(i));
    CsvWriter csv(std::move(header));
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        Vec row;
        row.reserve(1 + nn * nn + nn);
        row.push_back(iso.times()[k]);
        for (double v : iso.at(k).matrix().data()) row.push_back(v);
        Vec z = iso.has_translation() ? iso.translation_path()[k] : Vec(nn, 0.0);
        for (double v : z) row.push_back(v);
        csv.row(row);
    }
    return csv.str();
}

json run_flow(const json& j, json& report, std::string& csv) {
    QuadraticHamiltonian h = hamiltonian_from_json(resolve(j, "hamiltonian"));
    GridSpec g = grid_spec(j);
    SymplecticIsotopy iso = flow_from_quadratic(h, g.T, g.dt);
    double defect = 0.0;
    Mat jm = standard_J(iso.n());
    for (std::size_t k = 0; k < iso.times().size(); ++k) {
        const Mat& s = iso.at(k).matrix();
        defect = std::max(defect, (s.transposed() * jm * s - jm).max_abs());
    }
    report["residuals"]["symplecticity"] = defect;
    csv = flow_csv(iso);
    json results;
    results["times"] = vec_to_json(iso.times());
    results["steps"] = iso.steps();
    return results;
}

json run_generator(const json& j, json& report) {
    SymplecticIsotopy iso = isotopy_for(j);
    const bool affine = iso.has_translation();
    QuadraticHamiltonian h =
        affine ? affine_generator(iso) : generator_from_isotopy(iso);
    json mj;
    mj["kind"] = "samples";
    mj["times"] = vec_to_json(iso.times());
    json values = json::array();
    double drift = 0.0;
    for (double t : iso.times()) {
        Mat m = h.coefficient_matrix(t);
        drift = std::max(drift, asymmetry(m));
        values.push_back(mat_to_json(m));
    }
    mj["values"] = std::move(values);
    json results;
    results["n"] = iso.n();
    results["T"] = iso.horizon();
    results["M"] = std::move(mj);
    if (affine) {
        json vv = json::array();
        for (double t : iso.times()) vv.push_back(vec_to_json(h.coefficient_vector(t)));
        results["m"] = json{{"kind", "samples"}, {"times", vec_to_json(iso.times())},
                            {"values", std::move(vv)}};
    }
    report["residuals"]["symmetry_drift"] = drift;
    return results;
}

json run_iwasawa_sum(const json& j, json& report) {
    SymplecticIsotopy iso = isotopy_for(j);
    IwasawaSum sum = iwasawa_sum(iso);
    double zdrift = 0.0;
    for (const Mat& z : sum.z_path) zdrift = std::max(zdrift, asymmetry(z));
    report["residuals"]["Z_asymmetry"] = zdrift;
    json results;
    results["times"] = vec_to_json(sum.times);
    results["P"] = matrices_to_json(sum.p_path);
    results["L"] = matrices_to_json(sum.l_path);
    results["Q"] = matrices_to_json(sum.q_path);
    results["X"] = matrices_to_json(sum.x_path);
    results["Y"] = matrices_to_json(sum.y_path);
    results["Z"] = matrices_to_json(sum.z_path);
    results["N"] = matrices_to_json(sum.n_path);
    return results;
}

json run_chalkboard(const json& j, json& report, std::string& csv) {
    SymplecticIsotopy iso = isotopy_for(j);
    std::vector<Vec> path = center_path_for(j, iso);
    SymplecticBall ball = ball_for(j);
    BallTrajectory traj = chalkboard_motion(iso, path, ball, true);

    const std::size_t nn = 2 * iso.n();
    const std::size_t n = iso.n();
    std::vector<std::string> header{"t"};
    for (std::size_t a = 0; a < nn; ++a)
        for (std::size_t b = 0; b < nn; ++b)
            header.push_back("M" + std::to_string(a) + std::to_string(b));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            header.push_back("shadow" + std::to_string(a) + std::to_string(b));
    for (std::size_t a = 0; a < n; ++a) header.push_back("halfwidth" + std::to_string(a));
    header.push_back("capacity");
    CsvWriter out(std::move(header));

    const double target = M_PI * ball.radius * ball.radius;
    double drift = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        Ellipsoid e = ball_to_ellipsoid(traj.balls[k]);
        const Ellipsoid& sh = traj.shadows[k];
        const double cap = capacity(e);
        drift = std::max(drift, std::abs(cap - target) / target);
        Vec row;
        row.push_back(traj.times[k]);
        for (double v : e.shape().data()) row.push_back(v);
        for (double v : sh.shape().data()) row.push_back(v);
        Mat shinv = inverse(sh.shape());
        for (std::size_t a = 0; a < n; ++a)
            row.push_back(sh.level() * std::sqrt(shinv(a, a)));
        row.push_back(cap);
        out.row(row);
    }
    report["residuals"]["capacity_drift_rel"] = drift;
    csv = out.str();
    json results;
    results["times"] = vec_to_json(traj.times);
    results["capacity"] = target;
    return results;
}

json run_shadow(const json& j, json& report) {
    Ellipsoid e = ellipsoid_from_json(resolve(j, "ellipsoid"));
    Ellipsoid sh = j.value("subsystem", false)
                       ? subsystem_project(e, j.at("n_A").get<std::size_t>())
                       : shadow_x(e);
    report["residuals"]["shape_asymmetry"] = asymmetry(sh.shape());
    return ellipsoid_to_json(sh);
}

json run_gaussian(const json& j, json& report, std::string& csv) {
    const std::string action = j.value("action", "apply");
    if (action == "apply") {
        SymplecticMatrix s = symplectic_from_json(resolve(j, "matrix"));
        GaussianState in = state_from_json(resolve(j, "state"));
        GaussianState out = metaplectic_apply(s, in, j.value("maslov", 0));
        // Wigner covariance residual: G' = (S^-1)^T G S^-1
        Mat sinv = s.inverse().matrix();
        Mat gexp = symmetrize(sinv.transposed() * wigner_gaussian(in).g * sinv);
        report["residuals"]["wigner_covariance"] =
            (wigner_gaussian(out).g - gexp).max_abs();
        return state_to_json(out);
    }
    if (action == "wigner") {
        GaussianState s = state_from_json(resolve(j, "state"));
        WignerGaussian w = wigner_gaussian(s);
        json results;
        results["G"] = mat_to_json(w.g);
        results["center"] = vec_to_json(w.center);
        results["hbar"] = w.hbar;
        report["residuals"]["det_G_minus_1"] = std::abs(determinant(w.g) - 1.0);
        if (j.value("numeric", false)) {
            if (s.n() != 1) throw InputError("gaussian wigner: numeric grid is 1-D only");
            const double span = 4.0 * std::sqrt(s.hbar());
            const int pts = j.value("grid_points", 33);
            Vec xg(pts), pg(pts);
            for (int i = 0; i < pts; ++i) {
                xg[i] = s.center()[0] - span + 2.0 * span * i / (pts - 1);
                pg[i] = s.center()[1] - span + 2.0 * span * i / (pts - 1);
            }
            Mat wn = wigner_numeric_1d(s, xg, pg);
            CsvWriter out({"x", "p", "W_numeric", "W_closed"});
            double dev = 0.0;
            for (int ix = 0; ix < pts; ++ix)
                for (int ip = 0; ip < pts; ++ip) {
                    Vec z{xg[ix], pg[ip]};
                    Vec dz = z - s.center();
                    const double closed = std::pow(M_PI * s.hbar(), -1.0) *
                                          std::exp(-dot(dz, w.g * dz) / s.hbar());
                    dev = std::max(dev, std::abs(wn(ix, ip) - closed));
                    out.row({xg[ix], pg[ip], wn(ix, ip), closed});
                }
            report["residuals"]["numeric_vs_closed"] = dev;
            csv = out.str();
        }
        return results;
    }
    if (action == "transport") {
        GaussianState a = state_from_json(resolve(j, "from"));
        GaussianState b = state_from_json(resolve(j, "to"));
        GaussianTransport t = gaussian_transport(a, b);
        GaussianState rec = apply_transport(t, a);
        double dev = std::max((rec.x() - b.x()).max_abs(), (rec.y() - b.y()).max_abs());
        dev = std::max(dev, norm_inf(rec.center() - b.center()));
        report["residuals"]["reconstruction"] = dev;
        json results;
        results["chi"] = t.chi;
        results["z2"] = vec_to_json(t.z2);
        results["P2"] = mat_to_json(t.p2);
        results["L2"] = mat_to_json(t.l2);
        return results;
    }
    throw InputError("gaussian: unknown action '" + action + "'");
}

}  // namespace

json run_scenario(const json& scenario) {
    if (!scenario.is_object()) throw InputError("scenario: expected a JSON object");
    std::string kind;
    try {
        kind = scenario.at("kind").get<std::string>();
    } catch (const json::exception&) {
        throw InputError("scenario: missing or invalid 'kind'");
    }
    json report;
    report["kind"] = kind;
    report["seed"] = scenario.value("seed", 0);
    report["tolerances"] = {{"tol_symp", config().tol_symp},
                            {"tol_residual", config().tol_residual}};
    report["residuals"] = json::object();

    json results;
    std::string csv;
    try {
        if (kind == "capacity") results = run_capacity(scenario, report);
        else if (kind == "mvee") results = run_mvee(scenario, report);
        else if (kind == "factor") results = run_factor(scenario, report);
        else if (kind == "flow") results = run_flow(scenario, report, csv);
        else if (kind == "generator") results = run_generator(scenario, report);
        else if (kind == "iwasawa-sum") results = run_iwasawa_sum(scenario, report);
        else if (kind == "chalkboard") results = run_chalkboard(scenario, report, csv);
        else if (kind == "shadow") results = run_shadow(scenario, report);
        else if (kind == "gaussian") results = run_gaussian(scenario, report, csv);
        else throw InputError("scenario: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario: schema violation: ") + e.what());
    }

    report["status"] = "ok";
    emit(output_spec(scenario), report, results, csv);
    report["results"] = std::move(results);
    return report;
}

int run_scenario_file(const std::string& path, const json& overrides) {
    try {
        json scenario = load_json_file(path);
        for (auto it = overrides.begin(); it != overrides.end(); ++it)
            scenario[it.key()] = it.value();
        json report = run_scenario(scenario);
        // keep stdout compact when the data went to a file
        if (scenario.contains("output")) report.erase("results");
        std::cout << report.dump(2) << std::endl;
        return kExitOk;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return kExitInput;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return kExitNumeric;
    }
}

int run_scenario_list(const std::string& path, int jobs) {
    json list = load_json_file(path);
    const json& arr = list.is_array() ? list : list.at("scenarios");
    if (!arr.is_array()) throw InputError("scenario list: expected an array");
    std::vector<std::string> files;
    for (const auto& f : arr) files.push_back(f.get<std::string>());
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kExitOk};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            const int code = run_scenario_file(files[i]);
            int cur = worst.load();
            while (code > cur && !worst.compare_exchange_weak(cur, code)) {}
        }
    };
    std::vector<std::thread> pool;
    const int k = std::max(1, jobs);
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return worst.load();
}

}  // namespace chalk
