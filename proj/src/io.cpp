#include "abreu/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace abreu {

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& what) { throw InputError(source + ": " + what); }

double real(const Json& j, const std::string& source, const std::string& field) {
    if (!j.is_number()) fail(source, field + " must be a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(source, field + " must be finite");
    return v;
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& source,
               const std::string& where) {
    if (!j.is_object()) fail(source, where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) fail(source, "unknown key \"" + k + "\" in " + where);
    }
}

Json vec2(const Vec2& v) { return Json::array({v.x(), v.y()}); }

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(source, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
    }
}

ScalarField scalar_field_from_json(const Json& j, const std::string& where) {
    only_keys(j, {"kind", "coeffs"}, where, "A");
    if (!j.contains("kind") || !j["kind"].is_string()) fail(where, "A.kind must be \"constant\" or \"affine\"");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) fail(where, "A.coeffs must be an array");
    std::string kind = j["kind"];
    const Json& c = j["coeffs"];
    if (kind == "constant") {
        if (c.size() != 1 && c.size() != 3) fail(where, "A.coeffs for a constant holds 1 value");
        if (c.size() == 3 && (real(c[1], where, "A.coeffs[1]") != 0.0 || real(c[2], where, "A.coeffs[2]") != 0.0))
            fail(where, "A.coeffs for a constant must have zero linear part");
        return ScalarField::constant(real(c[0], where, "A.coeffs[0]"));
    }
    if (kind == "affine") {
        if (c.size() != 3) fail(where, "A.coeffs for an affine field holds 3 values");
        return ScalarField::affine(real(c[0], where, "A.coeffs[0]"), real(c[1], where, "A.coeffs[1]"),
                                   real(c[2], where, "A.coeffs[2]"));
    }
    fail(where, "A.kind must be \"constant\" or \"affine\", got \"" + kind + "\"");
}

Json scalar_field_to_json(const ScalarField& A) {
    if (!A.is_affine()) throw std::invalid_argument("sampled scalar fields have no file format");
    if (A.kind == ScalarField::Kind::Constant) return Json{{"kind", "constant"}, {"coeffs", {A.coeffs[0]}}};
    return Json{{"kind", "affine"}, {"coeffs", {A.coeffs[0], A.coeffs[1], A.coeffs[2]}}};
}

PolygonFile polygon_from_json(const Json& j, const std::string& source) {
    only_keys(j, {"vertices", "weights", "A", "config", "rebalance"}, source, "polygon");
    PolygonFile out;
    if (!j.contains("vertices") || !j["vertices"].is_array()) fail(source, "missing \"vertices\" array");
    const Json& vs = j["vertices"];
    for (size_t k = 0; k < vs.size(); ++k) {
        std::string f = "vertices[" + std::to_string(k) + "]";
        if (!vs[k].is_array() || vs[k].size() != 2) fail(source, f + " must be [x, y]");
        out.polygon.vertices.emplace_back(real(vs[k][0], source, f + "[0]"), real(vs[k][1], source, f + "[1]"));
    }
    if (j.contains("weights")) {
        const Json& ws = j["weights"];
        if (!ws.is_array()) fail(source, "\"weights\" must be an array");
        if (ws.size() != vs.size()) fail(source, "\"weights\" needs one entry per edge (" + std::to_string(vs.size()) + ")");
        for (size_t k = 0; k < ws.size(); ++k)
            out.polygon.weights.push_back(real(ws[k], source, "weights[" + std::to_string(k) + "]"));
        out.has_weights = true;
    } else {
        out.polygon.weights.assign(vs.size(), 0.0);
    }
    if (j.contains("A")) out.A = scalar_field_from_json(j["A"], source);
    try {
        if (out.has_weights)
            validate(out.polygon);
        else
            validate_vertices(out.polygon.vertices);
    } catch (const PolygonError& e) {
        fail(source, e.what());
    }
    return out;
}

PolygonFile load_polygon(const std::string& path) { return polygon_from_json(parse_json(read_text(path), path), path); }

Json polygon_to_json(const WeightedPolygon& p, const std::optional<ScalarField>& A) {
    Json j;
    j["vertices"] = Json::array();
    for (const auto& v : p.vertices) j["vertices"].push_back(vec2(v));
    j["weights"] = p.weights;
    if (A) j["A"] = scalar_field_to_json(*A);
    return j;
}

Json path_to_json(const ContinuityPath& path) {
    Json s = Json::array();
    for (const auto& smp : path.samples) {
        Json j = polygon_to_json(smp.polygon, smp.A);
        Json rec{{"t", smp.t}};
        for (auto& [k, v] : j.items()) rec[k] = v;
        s.push_back(rec);
    }
    return Json{{"samples", s}};
}

ContinuityPath path_from_json(const Json& j, const std::string& source) {
    only_keys(j, {"samples", "config"}, source, "path");
    if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].empty())
        fail(source, "path needs a nonempty \"samples\" array");
    ContinuityPath path;
    for (size_t k = 0; k < j["samples"].size(); ++k) {
        Json rec = j["samples"][k];
        std::string where = source + " samples[" + std::to_string(k) + "]";
        if (!rec.is_object() || !rec.contains("t")) fail(where, "sample needs \"t\"");
        double t = real(rec["t"], where, "t");
        rec.erase("t");
        PolygonFile pf = polygon_from_json(rec, where);
        if (!pf.has_weights || !pf.A) fail(where, "sample needs weights and A");
        path.samples.push_back({t, pf.polygon, *pf.A});
    }
    return path;
}

void write_grid_csv(std::ostream& os, const PotentialField& u, bool tensors) {
    const Lattice& L = u.correction;
    os << "nx,ny,x0,y0,h\n"
       << L.nx << "," << L.ny << "," << g17(L.x0) << "," << g17(L.y0) << "," << g17(L.h) << "\n";
    if (!tensors) {
        os << "i,j,x,y,f\n";
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i) {
                Vec2 x = L.node(i, j);
                os << i << "," << j << "," << g17(x.x()) << "," << g17(x.y()) << "," << g17(L.at(i, j)) << "\n";
            }
        return;
    }
    os << "i,j,x,y,f,u11,u12,u22,det,absF,abreu\n";
    for (const auto& s : tensor_samples(u).nodes) {
        const Curvature& c = s.c;
        os << s.i << "," << s.j << "," << g17(s.x.x()) << "," << g17(s.x.y()) << "," << g17(L.at(s.i, s.j)) << ","
           << g17(c.H(0, 0)) << "," << g17(c.H(0, 1)) << "," << g17(c.H(1, 1)) << "," << g17(c.det) << ","
           << g17(std::sqrt(std::max(c.absF2, 0.0))) << "," << g17(c.abreu) << "\n";
    }
}

Lattice read_grid_csv(std::istream& is, const std::string& source) {
    std::string line;
    int lineno = 0;
    auto next = [&](const char* what) {
        if (!std::getline(is, line)) fail(source, std::string("unexpected end of file, expected ") + what);
        ++lineno;
    };
    auto fields = [&](size_t want) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) out.push_back(f);
        if (out.size() < want)
            fail(source, "line " + std::to_string(lineno) + ": expected " + std::to_string(want) + " fields");
        return out;
    };
    auto number = [&](const std::string& s) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !std::isfinite(v))
            fail(source, "line " + std::to_string(lineno) + ": bad number \"" + s + "\"");
        return v;
    };
    next("header");
    if (line != "nx,ny,x0,y0,h") fail(source, "line 1: expected header nx,ny,x0,y0,h");
    next("lattice values");
    auto hv = fields(5);
    Lattice L;
    L.nx = static_cast<int>(number(hv[0]));
    L.ny = static_cast<int>(number(hv[1]));
    L.x0 = number(hv[2]);
    L.y0 = number(hv[3]);
    L.h = number(hv[4]);
    if (L.nx < 1 || L.ny < 1 || !(L.h > 0.0)) fail(source, "line 2: invalid lattice dimensions");
    L.f.assign(static_cast<size_t>(L.nx) * L.ny, 0.0);
    next("record header");
    if (line.rfind("i,j,x,y,f", 0) != 0) fail(source, "line 3: expected record header i,j,x,y,f");
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto r = fields(5);
        int i = static_cast<int>(number(r[0])), j = static_cast<int>(number(r[1]));
        if (i < 0 || j < 0 || i >= L.nx || j >= L.ny)
            fail(source, "line " + std::to_string(lineno) + ": node index out of range");
        L.f[L.index(i, j)] = number(r[4]);
    }
    return L;
}

Manifest manifest_from_json(const Json& j, const std::string& source) {
    only_keys(j, {"command", "polygon", "A", "grid", "tol", "step_tol", "max_iter", "seed", "path", "out"}, source,
              "manifest");
    Manifest m;
    auto str = [&](const char* k, std::string& dst) {
        if (!j.contains(k)) return;
        if (!j[k].is_string()) fail(source, std::string("\"") + k + "\" must be a string");
        dst = j[k];
    };
    auto integer = [&](const char* k, auto& dst, long lo) {
        if (!j.contains(k)) return;
        if (!j[k].is_number_integer() || j[k].get<long long>() < lo)
            fail(source, std::string("\"") + k + "\" must be an integer >= " + std::to_string(lo));
        dst = j[k].get<std::remove_reference_t<decltype(dst)>>();
    };
    auto positive = [&](const char* k, double& dst) {
        if (!j.contains(k)) return;
        dst = real(j[k], source, k);
        if (!(dst > 0.0)) fail(source, std::string("\"") + k + "\" must be positive");
    };
    str("command", m.command);
    if (m.command != "solve") fail(source, "\"command\" must be \"solve\"");
    str("polygon", m.polygon);
    if (m.polygon.empty()) fail(source, "\"polygon\" (a polygon file) is required");
    if (j.contains("A")) m.A = scalar_field_from_json(j["A"], source);
    integer("grid", m.grid, 9);
    positive("tol", m.tol);
    positive("step_tol", m.step_tol);
    integer("max_iter", m.max_iter, 1);
    integer("seed", m.seed, 0);
    str("path", m.path);
    str("out", m.out);
    // relative file names refer to the manifest's directory
    auto base = std::filesystem::path(source).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
    };
    resolve(m.polygon);
    resolve(m.path);
    return m;
}

Manifest load_manifest(const std::string& path) { return manifest_from_json(parse_json(read_text(path), path), path); }

Json manifest_to_json(const Manifest& m) {
    Json j{{"command", m.command}, {"polygon", m.polygon}};
    j["A"] = m.A ? scalar_field_to_json(*m.A) : Json(nullptr);
    j["grid"] = m.grid;
    j["tol"] = m.tol;
    j["step_tol"] = m.step_tol;
    j["max_iter"] = m.max_iter;
    j["seed"] = m.seed;
    j["path"] = m.path;
    j["out"] = m.out;
    return j;
}

Json bound_record_to_json(const BoundRecord& r) {
    Json j{{"lemma", r.check}, {"point", vec2(r.point)}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin}};
    j["pass"] = r.skipped ? Json(nullptr) : Json(r.pass);
    j["tolerance"] = r.tolerance;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

Json pl_function_to_json(const PLConvexFunction& f) {
    Json pieces = Json::array();
    for (const auto& a : f.pieces) pieces.push_back(Json::array({a.c0, a.g.x(), a.g.y()}));
    return Json{{"pieces", pieces}};
}

Json probe_report_to_json(const ProbeReport& r) {
    Json j{{"min_L", r.min_L}, {"argmin", pl_function_to_json(r.argmin)}, {"n", r.n}, {"seed", r.seed}};
    j["argmin_index"] = r.argmin_index;
    j["affine_skipped"] = r.affine_skipped;
    j["all_positive"] = r.all_positive;
    j["normalization"] = r.normalization;
    return j;
}

Json identity_report_to_json(const IdentityReport& r) {
    auto finite = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    Json details = Json::object();
    for (const auto& [k, v] : r.details) details[k] = finite(v);
    Json j{{"name", r.name}, {"digest", r.digest}, {"lhs", finite(r.lhs)}, {"rhs", finite(r.rhs)},
           {"ratio", finite(r.ratio)}, {"tolerance", r.tolerance}, {"pass", r.pass}, {"details", details}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

Json solve_state_to_json(const SolveState& s) {
    Json j{{"converged", s.converged}, {"steps", s.steps}, {"max_residual", s.max_residual},
           {"l2_residual", s.l2_residual}, {"max_residual_modulo_affine", s.max_projected},
           {"affine_defect", {s.compat[0], s.compat[1], s.compat[2]}}, {"last_step", s.last_step}};
    j["damping"] = s.damping;
    j["residual_history"] = s.residual_history;
    j["residual_modulo_affine_history"] = s.projected_history;
    j["functional_history"] = s.functional_history;
    j["min_eigenvalue"] = s.min_eigenvalue;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace abreu
