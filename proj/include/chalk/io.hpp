#pragma once

#include <json.hpp>

#include <string>

#include "chalk/flows.hpp"
#include "chalk/gaussian.hpp"
#include "chalk/spectra.hpp"

namespace chalk {

using json = nlohmann::json;

json load_json_file(const std::string& path);
// binary mode, LF endings, byte-stable across runs
void write_text_file(const std::string& path, const std::string& content);
std::string format_double(double v);  // 17 significant digits

Vec vec_from_json(const json& j);
json vec_to_json(const Vec& v);
// accepts {"n":..,"rows":[[..]]} or a bare array of arrays; validates the
// symplectic certificate when "kind": "symplectic" is present
Mat mat_from_json(const json& j);
json mat_to_json(const Mat& m);

SymplecticMatrix symplectic_from_json(const json& j);
Ellipsoid ellipsoid_from_json(const json& j);
json ellipsoid_to_json(const Ellipsoid& e);
GaussianState state_from_json(const json& j);
json state_to_json(const GaussianState& s);
// {"n", "M": {"kind": constant|poly|samples, ...}, "m": {...}, "T", "dt"}
QuadraticHamiltonian hamiltonian_from_json(const json& j);
// {"kind": "samples", "times", "S", ["z"]} or {"kind": "flow-of",
//  "hamiltonian": {...}, "T", "dt"}
SymplecticIsotopy isotopy_from_json(const json& j);

// CSV with a header row and LF endings.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const Vec& values);
    const std::string& str() const { return out_; }

  private:
    std::size_t cols_;
    std::string out_;
};

}  // namespace chalk
