#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "chalk/scenario.hpp"

namespace {

using chalk::json;

int guarded(const std::function<json()>& body) {
    try {
        json report = body();
        std::cout << report.dump(2) << std::endl;
        return chalk::kExitOk;
    } catch (const chalk::InputError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return chalk::kExitInput;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return chalk::kExitInput;
    } catch (const chalk::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return chalk::kExitNumeric;
    }
}

json scenario_shell(const std::string& kind, const std::string& out,
                    const std::string& format, std::uint64_t seed) {
    json s;
    s["kind"] = kind;
    s["seed"] = seed;
    if (!out.empty()) s["output"] = {{"path", out}, {"format", format}};
    return s;
}

std::vector<chalk::Vec> points_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw chalk::InputError("cannot open " + path);
    std::vector<chalk::Vec> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        chalk::Vec p;
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                p.push_back(std::stod(cell));
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (numeric && !p.empty()) pts.push_back(std::move(p));
        // non-numeric lines (headers) are skipped
    }
    if (pts.empty()) throw chalk::InputError("no points found in " + path);
    return pts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symplectic-capacity-preserving transport of phase-space ellipsoids"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow a subcommand

    std::string scenario_path, list_path, out_path, format = "json";
    std::uint64_t seed = 0;
    double tol = 0.0;
    int jobs = 1;
    bool debug_crosscheck = false;
    app.add_option("--scenario", scenario_path, "run a scenario file");
    app.add_option("--out", out_path, "output file path");
    app.add_option("--format", format, "output format: csv or json");
    app.add_option("--tol", tol, "override the residual tolerance");
    app.add_option("--seed", seed, "seed recorded in the report");
    app.add_option("--jobs", jobs, "workers for scenario lists");
    app.add_flag("--debug-crosscheck", debug_crosscheck,
                 "enable dual-route assertions in the Gaussian maps");

    std::string ellipsoid_path, matrix_path, state_path, points_path, ham_path, iso_path;
    std::string from_path, to_path, mode = "pre-iwasawa";
    double grid_T = 1.0, grid_dt = 1e-3;
    bool numeric = false;
    std::size_t n_a = 0;

    CLI::App* cap = app.add_subcommand("capacity", "symplectic capacity of an ellipsoid");
    cap->add_option("--ellipsoid", ellipsoid_path, "ellipsoid JSON")->required();

    CLI::App* will = app.add_subcommand("williamson", "symplectic diagonalization of an SPD matrix");
    will->add_option("--matrix", matrix_path, "matrix JSON")->required();

    CLI::App* mv = app.add_subcommand("mvee", "minimum-volume enclosing ellipsoid");
    mv->add_option("--points", points_path, "CSV or JSON point list")->required();

    CLI::App* fact = app.add_subcommand("factor", "factor a symplectic matrix");
    fact->add_option("--matrix", matrix_path, "matrix JSON")->required();
    fact->add_option("--mode", mode, "pre-iwasawa | free | sp0");

    CLI::App* flow = app.add_subcommand("flow", "integrate a quadratic Hamiltonian");
    flow->add_option("--hamiltonian", ham_path, "Hamiltonian JSON")->required();
    flow->add_option("--T", grid_T, "horizon");
    flow->add_option("--dt", grid_dt, "time step");

    CLI::App* gen = app.add_subcommand("generator", "extract the quadratic generator of an isotopy");
    gen->add_option("--isotopy", iso_path, "isotopy JSON")->required();

    CLI::App* iwa = app.add_subcommand("iwasawa-sum", "pre-Iwasawa paths and Hamiltonians");
    iwa->add_option("--isotopy", iso_path, "isotopy JSON")->required();

    CLI::App* shadow = app.add_subcommand("shadow", "project an ellipsoid");
    shadow->add_option("--ellipsoid", ellipsoid_path, "ellipsoid JSON")->required();
    shadow->add_option("--subsystem", n_a, "project onto the first n_A degrees of freedom");

    CLI::App* gauss = app.add_subcommand("gaussian", "Gaussian state operations");
    gauss->require_subcommand(1);
    CLI::App* gapply = gauss->add_subcommand("apply", "metaplectic action on a state");
    gapply->add_option("--matrix", matrix_path, "symplectic matrix JSON")->required();
    gapply->add_option("--state", state_path, "state JSON")->required();
    CLI::App* gwig = gauss->add_subcommand("wigner", "Wigner transform parameters");
    gwig->add_option("--state", state_path, "state JSON")->required();
    gwig->add_flag("--numeric", numeric, "also run the 1-D quadrature oracle");
    CLI::App* gtrans = gauss->add_subcommand("transport", "ISp0 transport between states");
    gtrans->add_option("--from", from_path, "source state JSON")->required();
    gtrans->add_option("--to", to_path, "target state JSON")->required();

    CLI::App* run = app.add_subcommand("run", "run a scenario file or list");
    run->add_option("--scenario", scenario_path, "scenario JSON");
    run->add_option("--list", list_path, "scenario list JSON");

    CLI11_PARSE(app, argc, argv);

    if (tol > 0.0) chalk::config().tol_residual = tol;
    chalk::config().debug_crosscheck = debug_crosscheck;

    json overrides = json::object();
    if (!out_path.empty()) overrides["output"] = {{"path", out_path}, {"format", format}};
    overrides["seed"] = seed;

    if (app.got_subcommand(run)) {
        if (!list_path.empty()) return chalk::run_scenario_list(list_path, jobs);
        if (scenario_path.empty()) {
            std::cerr << "input error: run needs --scenario or --list" << std::endl;
            return chalk::kExitInput;
        }
        return chalk::run_scenario_file(scenario_path, overrides);
    }
    if (app.got_subcommand(cap)) {
        json s = scenario_shell("capacity", out_path, format, seed);
        s["ellipsoid"] = {{"file", ellipsoid_path}};
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (app.got_subcommand(will)) {
        return guarded([&] {
            chalk::Mat m = chalk::mat_from_json(chalk::load_json_file(matrix_path));
            chalk::WilliamsonFactors w = chalk::williamson(m);
            json results;
            results["S"] = chalk::mat_to_json(w.s.matrix());
            results["lambdas"] = chalk::vec_to_json(w.lambdas);
            chalk::Mat target(m.rows(), m.rows());
            for (std::size_t k = 0; k < m.rows() / 2; ++k) {
                target(k, k) = w.lambdas[k];
                target(m.rows() / 2 + k, m.rows() / 2 + k) = w.lambdas[k];
            }
            json report;
            report["kind"] = "williamson";
            report["residuals"]["diagonalization"] =
                (w.s.matrix().transposed() * m * w.s.matrix() - target).max_abs();
            report["status"] = "ok";
            if (!out_path.empty()) {
                json doc = results;
                doc["report"] = report;
                chalk::write_text_file(out_path, doc.dump(2) + "\n");
            }
            report["results"] = results;
            return report;
        });
    }
    if (app.got_subcommand(mv)) {
        json s = scenario_shell("mvee", out_path, format, seed);
        return guarded([&] {
            if (points_path.size() > 4 && points_path.substr(points_path.size() - 4) == ".csv") {
                json pts = json::array();
                for (const chalk::Vec& p : points_from_csv(points_path))
                    pts.push_back(chalk::vec_to_json(p));
                s["points"] = std::move(pts);
            } else {
                s["points"] = {{"file", points_path}};
            }
            return chalk::run_scenario(s);
        });
    }
    if (app.got_subcommand(fact)) {
        json s = scenario_shell("factor", out_path, format, seed);
        s["matrix"] = {{"file", matrix_path}};
        s["mode"] = mode;
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (app.got_subcommand(flow)) {
        json s = scenario_shell("flow", out_path, format.empty() ? "csv" : format, seed);
        if (!out_path.empty()) s["output"] = {{"path", out_path}, {"format", "csv"}};
        s["hamiltonian"] = {{"file", ham_path}};
        s["grid"] = {{"T", grid_T}, {"dt", grid_dt}};
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (app.got_subcommand(gen)) {
        json s = scenario_shell("generator", out_path, format, seed);
        s["isotopy"] = {{"file", iso_path}};
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (app.got_subcommand(iwa)) {
        json s = scenario_shell("iwasawa-sum", out_path, format, seed);
        s["isotopy"] = {{"file", iso_path}};
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (app.got_subcommand(shadow)) {
        json s = scenario_shell("shadow", out_path, format, seed);
        s["ellipsoid"] = {{"file", ellipsoid_path}};
        if (n_a > 0) {
            s["subsystem"] = true;
            s["n_A"] = n_a;
        }
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (app.got_subcommand(gauss)) {
        json s = scenario_shell("gaussian", out_path, format, seed);
        if (gauss->got_subcommand(gapply)) {
            s["action"] = "apply";
            s["matrix"] = {{"file", matrix_path}};
            s["state"] = {{"file", state_path}};
        } else if (gauss->got_subcommand(gwig)) {
            s["action"] = "wigner";
            s["state"] = {{"file", state_path}};
            s["numeric"] = numeric;
            if (numeric && !out_path.empty()) s["output"] = {{"path", out_path}, {"format", "csv"}};
        } else {
            s["action"] = "transport";
            s["from"] = {{"file", from_path}};
            s["to"] = {{"file", to_path}};
        }
        return guarded([&] { return chalk::run_scenario(s); });
    }
    if (!scenario_path.empty()) return chalk::run_scenario_file(scenario_path, overrides);

    std::cout << app.help() << std::endl;
    return chalk::kExitOk;
}
