#include "chalk/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace chalk {

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("JSON parse error in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw InputError("expected a JSON array for a vector");
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw InputError("vector entries must be numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

json vec_to_json(const Vec& v) { return json(v); }

Mat mat_from_json(const json& j) {
    const json& rows = j.is_object() ? j.at("rows") : j;
    if (!rows.is_array() || rows.empty()) throw InputError("matrix: expected non-empty rows");
    std::vector<Vec> r;
    for (const auto& row : rows) r.push_back(vec_from_json(row));
    Mat m = Mat::from_rows(r);
    if (j.is_object() && j.contains("n")) {
        const std::size_t n = j.at("n").get<std::size_t>();
        if (m.rows() != 2 * n || m.cols() != 2 * n)
            throw InputError("matrix: rows do not match declared n");
    }
    if (j.is_object() && j.value("kind", "") == std::string("symplectic")) {
        SymplecticMatrix certify(m);  // throws when the certificate fails
        (void)certify;
    }
    return m;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j2 = 0; j2 < m.cols(); ++j2) row.push_back(m(i, j2));
        rows.push_back(std::move(row));
    }
    return rows;
}

SymplecticMatrix symplectic_from_json(const json& j) { return SymplecticMatrix(mat_from_json(j)); }

Ellipsoid ellipsoid_from_json(const json& j) {
    if (!j.is_object()) throw InputError("ellipsoid: expected an object");
    return Ellipsoid(vec_from_json(j.at("center")), mat_from_json(j.at("shape")),
                     j.at("level").get<double>());
}

json ellipsoid_to_json(const Ellipsoid& e) {
    json j;
    j["center"] = vec_to_json(e.center());
    j["shape"] = mat_to_json(e.shape());
    j["level"] = e.level();
    return j;
}

GaussianState state_from_json(const json& j) {
    if (!j.is_object()) throw InputError("state: expected an object");
    cdouble phase = 1.0;
    if (j.contains("phase")) {
        Vec p = vec_from_json(j.at("phase"));
        if (p.size() != 2) throw InputError("state: phase must be [re, im]");
        phase = {p[0], p[1]};
    }
    return GaussianState(mat_from_json(j.at("X")), mat_from_json(j.at("Y")),
                         vec_from_json(j.at("center")), j.value("hbar", 1.0), phase);
}

json state_to_json(const GaussianState& s) {
    json j;
    j["n"] = s.n();
    j["X"] = mat_to_json(s.x());
    j["Y"] = mat_to_json(s.y());
    j["center"] = vec_to_json(s.center());
    j["hbar"] = s.hbar();
    j["phase"] = json::array({s.phase().real(), s.phase().imag()});
    return j;
}

namespace {

QuadraticHamiltonian::MatFn mat_term_from_json(const json& j, std::size_t nn) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        Mat m = mat_from_json(j.at("value"));
        if (m.rows() != nn) throw InputError("hamiltonian: M size mismatch");
        return [m](double) { return m; };
    }
    if (kind == "poly") {
        std::vector<Mat> coeffs;
        for (const auto& c : j.at("coeffs")) coeffs.push_back(mat_from_json(c));
        for (const Mat& c : coeffs)
            if (c.rows() != nn) throw InputError("hamiltonian: M coefficient size mismatch");
        return [coeffs](double t) {
            Mat m(coeffs[0].rows(), coeffs[0].cols());
            double tk = 1.0;
            for (const Mat& c : coeffs) {
                m += tk * c;
                tk *= t;
            }
            return m;
        };
    }
    throw InputError("hamiltonian: unknown M kind '" + kind + "'");
}

QuadraticHamiltonian::VecFn vec_term_from_json(const json& j, std::size_t nn) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        Vec v = vec_from_json(j.at("value"));
        if (v.size() != nn) throw InputError("hamiltonian: m size mismatch");
        return [v](double) { return v; };
    }
    if (kind == "poly") {
        std::vector<Vec> coeffs;
        for (const auto& c : j.at("coeffs")) coeffs.push_back(vec_from_json(c));
        for (const Vec& c : coeffs)
            if (c.size() != nn) throw InputError("hamiltonian: m coefficient size mismatch");
        return [coeffs](double t) {
            Vec v(coeffs[0].size(), 0.0);
            double tk = 1.0;
            for (const Vec& c : coeffs) {
                v = v + tk * c;
                tk *= t;
            }
            return v;
        };
    }
    throw InputError("hamiltonian: unknown m kind '" + kind + "'");
}

}  // namespace

QuadraticHamiltonian hamiltonian_from_json(const json& j) {
    if (!j.is_object()) throw InputError("hamiltonian: expected an object");
    const std::size_t n = j.at("n").get<std::size_t>();
    if (n < 1) throw InputError("hamiltonian: n must be >= 1");
    const double T = j.value("T", 1.0);
    const json& mj = j.at("M");
    if (mj.at("kind").get<std::string>() == "samples") {
        Vec times = vec_from_json(mj.at("times"));
        std::vector<Mat> ms;
        for (const auto& s : mj.at("values")) ms.push_back(mat_from_json(s));
        std::vector<Vec> mvs;
        if (j.contains("m"))
            for (const auto& s : j.at("m").at("values")) mvs.push_back(vec_from_json(s));
        return QuadraticHamiltonian::sampled(std::move(times), std::move(ms), std::move(mvs));
    }
    QuadraticHamiltonian::MatFn mf = mat_term_from_json(mj, 2 * n);
    QuadraticHamiltonian::VecFn vf;
    if (j.contains("m")) vf = vec_term_from_json(j.at("m"), 2 * n);
    return QuadraticHamiltonian::closed_form(n, std::move(mf), std::move(vf), T);
}

SymplecticIsotopy isotopy_from_json(const json& j) {
    if (!j.is_object()) throw InputError("isotopy: expected an object");
    const std::string kind = j.value("kind", "samples");
    if (kind == "flow-of") {
        QuadraticHamiltonian h = hamiltonian_from_json(j.at("hamiltonian"));
        const double T = j.value("T", h.horizon());
        const double dt = j.value("dt", config().default_dt);
        return flow_from_quadratic(h, T, dt);
    }
    if (kind != "samples") throw InputError("isotopy: unknown kind '" + kind + "'");
    Vec times = vec_from_json(j.at("times"));
    std::vector<SymplecticMatrix> frames;
    for (const auto& s : j.at("S")) frames.emplace_back(mat_from_json(s));
    std::optional<std::vector<Vec>> z;
    if (j.contains("z")) {
        std::vector<Vec> zp;
        for (const auto& v : j.at("z")) zp.push_back(vec_from_json(v));
        z = std::move(zp);
    }
    return SymplecticIsotopy(std::move(times), std::move(frames), std::move(z));
}

CsvWriter::CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += header[i];
    }
    out_ += '\n';
}

void CsvWriter::row(const Vec& values) {
    if (values.size() != cols_) throw InputError("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ += ',';
        out_ += format_double(values[i]);
    }
    out_ += '\n';
}

}  // namespace chalk
