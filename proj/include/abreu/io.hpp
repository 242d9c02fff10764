#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "abreu/analysis.hpp"
#include "abreu/functionals.hpp"
#include "abreu/geometry.hpp"
#include "abreu/solver.hpp"

namespace abreu {

using Json = nlohmann::ordered_json;

// Malformed input; the message names the file, line or field.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path);
// Parses JSON, reporting the line and column of syntax errors.
Json parse_json(const std::string& text, const std::string& source);

struct PolygonFile {
    WeightedPolygon polygon;
    bool has_weights = false;  // weights missing: all zero until supplied
    std::optional<ScalarField> A;
};

// {"vertices": [[x, y], ...], "weights": [...], "A": {"kind": "constant"|"affine", "coeffs": [...]}}
// "config" and "rebalance" records written by the CLI are accepted and ignored.
PolygonFile polygon_from_json(const Json& j, const std::string& source);
PolygonFile load_polygon(const std::string& path);
Json polygon_to_json(const WeightedPolygon& p, const std::optional<ScalarField>& A = std::nullopt);
Json scalar_field_to_json(const ScalarField& A);
ScalarField scalar_field_from_json(const Json& j, const std::string& where);

Json path_to_json(const ContinuityPath& path);
ContinuityPath path_from_json(const Json& j, const std::string& source);

// "nx,ny,x0,y0,h" header and values, then "i,j,x,y,f" records in row-major
// order, 17 significant digits. With tensors, only interior nodes are written
// and the records carry u11,u12,u22,det,absF,abreu.
void write_grid_csv(std::ostream& os, const PotentialField& u, bool tensors = false);
Lattice read_grid_csv(std::istream& is, const std::string& source);

struct Manifest {
    std::string command = "solve";
    std::string polygon;  // polygon file, resolved against the manifest directory
    std::optional<ScalarField> A;
    int grid = 33;
    double tol = 1e-6;
    double step_tol = 1e-10;
    int max_iter = 30;
    uint64_t seed = 7;
    std::string path;  // optional continuity path file
    std::string out = "out";
};

// Unknown keys are rejected.
Manifest manifest_from_json(const Json& j, const std::string& source);
Manifest load_manifest(const std::string& path);
Json manifest_to_json(const Manifest& m);

Json bound_record_to_json(const BoundRecord& r);
Json probe_report_to_json(const ProbeReport& r);
Json identity_report_to_json(const IdentityReport& r);
Json pl_function_to_json(const PLConvexFunction& f);
// Residual, modulo-affine residual and functional histories.
Json solve_state_to_json(const SolveState& s);

// Dumps with two-space indent and a trailing newline.
std::string dump(const Json& j);

}  // namespace abreu
