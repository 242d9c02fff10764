#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "abreu/io.hpp"

using namespace abreu;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / "abreu_io_test";
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("polygon JSON round trip") {
    WeightedPolygon p = canonical_weights({{0, 0}, {1, 0}, {1.2, 0.8}, {0.3, 1.1}});
    ScalarField A = ScalarField::affine(1.0, 0.5, -0.25);
    Json j = polygon_to_json(p, A);
    PolygonFile back = polygon_from_json(parse_json(dump(j), "mem"), "mem");
    CHECK(back.has_weights);
    REQUIRE(back.polygon.size() == p.size());
    for (int k = 0; k < p.size(); ++k) {
        CHECK(back.polygon.vertices[k] == p.vertices[k]);
        CHECK(back.polygon.weights[k] == p.weights[k]);
    }
    REQUIRE(back.A);
    CHECK(back.A->coeffs == A.coeffs);
    CHECK(dump(polygon_to_json(back.polygon, back.A)) == dump(j));
}

TEST_CASE("malformed input is reported with location") {
    try {
        parse_json("{\n  \"vertices\": [1, 2\n", "bad.json");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("bad.json: line") != std::string::npos);
    }
    CHECK_THROWS_AS(polygon_from_json(parse_json(R"({"vertices": [[0,0],[1,0],[0,1]], "colour": 1})", "m"), "m"),
                    InputError);
    CHECK_THROWS_AS(polygon_from_json(parse_json(R"({"vertices": [[0,0],[1,0]]})", "m"), "m"), InputError);
    CHECK_THROWS_AS(polygon_from_json(parse_json(R"({"vertices": [[0,0],[1,0],[0,1]], "weights": [1, 1]})", "m"), "m"),
                    InputError);
    PolygonFile bare = polygon_from_json(parse_json(R"({"vertices": [[0,0],[1,0],[0,1]]})", "m"), "m");
    CHECK_FALSE(bare.has_weights);
}

TEST_CASE("manifest defaults, unknown keys and relative paths") {
    fs::path d = temp_dir();
    write_file(d / "m.json", R"({"polygon": "sq.json", "grid": 17})");
    Manifest m = load_manifest((d / "m.json").string());
    CHECK(m.grid == 17);
    CHECK(m.tol == 1e-6);
    CHECK(m.seed == 7);
    CHECK(fs::path(m.polygon) == d / "sq.json");
    write_file(d / "bad.json", R"({"polygon": "sq.json", "gird": 17})");
    CHECK_THROWS_AS(load_manifest((d / "bad.json").string()), InputError);
    Json j = manifest_to_json(m);
    CHECK(j["grid"] == 17);
    CHECK(j.contains("tol"));
    CHECK(j.contains("seed"));
}

TEST_CASE("grid CSV round trip") {
    PotentialField u = guillemin_potential(square(), 9);
    for (int j = 0; j < u.correction.ny; ++j)
        for (int i = 0; i < u.correction.nx; ++i) u.correction(i, j) = 0.001 * i - 0.002 * j * j;
    u.refresh();
    std::stringstream ss;
    write_grid_csv(ss, u);
    Lattice l = read_grid_csv(ss, "mem");
    CHECK(l.nx == u.correction.nx);
    CHECK(l.h == u.correction.h);
    CHECK(l.f == u.correction.f);
}

TEST_CASE("path JSON round trip") {
    WeightedPolygon a = canonical_weights(square().vertices);
    ContinuityPath p = continuity_path(a, ScalarField::constant(1.0), square(), ScalarField::constant(4.0), 3);
    Json j = path_to_json(p);
    ContinuityPath back = path_from_json(j, "mem");
    REQUIRE(back.samples.size() == 3);
    CHECK(dump(path_to_json(back)) == dump(j));
}

TEST_CASE("reports serialize NaN as null") {
    IdentityReport r;
    r.name = "x";
    r.ratio = std::nan("");
    Json j = identity_report_to_json(r);
    CHECK(j["ratio"].is_null());
}
