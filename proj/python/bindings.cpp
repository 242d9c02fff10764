#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "abreu/analysis.hpp"
#include "abreu/functionals.hpp"
#include "abreu/geometry.hpp"
#include "abreu/io.hpp"
#include "abreu/solver.hpp"

namespace py = pybind11;
using namespace abreu;

namespace {

py::dict report_dict(const IdentityReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["digest"] = r.digest;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["ratio"] = r.ratio;
    d["tolerance"] = r.tolerance;
    d["passed"] = r.pass;
    py::dict details;
    for (const auto& [k, v] : r.details) details[py::str(k)] = v;
    d["details"] = details;
    d["note"] = r.note;
    return d;
}

py::dict curvature_dict(const Curvature& c) {
    py::dict d;
    d["hessian"] = c.H;
    d["inverse_hessian"] = c.G;
    d["det"] = c.det;
    d["abs_F2"] = c.absF2;
    d["abreu"] = c.abreu;
    return d;
}

}  // namespace

PYBIND11_MODULE(_abreu, m) {
    m.doc() = "Toric symplectic potentials, Abreu's equation and related checks";

    py::register_exception<PolygonError>(m, "PolygonError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ConvexityError>(m, "ConvexityError", PyExc_ValueError);
    py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    py::class_<ScalarField>(m, "ScalarField")
        .def_static("constant", &ScalarField::constant)
        .def_static("affine", &ScalarField::affine)
        .def_property_readonly("coeffs", [](const ScalarField& a) { return a.coeffs; })
        .def("__call__", [](const ScalarField& a, const Vec2& x) { return a(x); });

    py::class_<WeightedPolygon>(m, "WeightedPolygon")
        .def(py::init([](const std::vector<Vec2>& v, const std::vector<double>& w) {
                 WeightedPolygon p{v, w};
                 validate(p);
                 return p;
             }),
             py::arg("vertices"), py::arg("weights"))
        .def_readonly("vertices", &WeightedPolygon::vertices)
        .def_readonly("weights", &WeightedPolygon::weights)
        .def("area", &WeightedPolygon::area)
        .def("centroid", &WeightedPolygon::centroid)
        .def("contains", &WeightedPolygon::contains, py::arg("x"), py::arg("tol") = 0.0)
        .def("__len__", &WeightedPolygon::size);

    m.def("square", &square, py::arg("side") = 1.0);
    m.def("simplex", &simplex);
    m.def("canonical_weights", &canonical_weights);
    m.def("balance_residual", [](const WeightedPolygon& p, const ScalarField& A) {
        return Eigen::Vector3d(balance_report(p, A).residual);
    });
    m.def("unique_affine_A", &unique_affine_A);
    m.def("mu_invariant", &mu_invariant);
    m.def("corner_cut", &corner_cut);
    m.def("rebalance", [](const WeightedPolygon& p, int f, int g) { return rebalance(p, f, g).polygon; });
    m.def("balance_weights", &balance_weights);
    m.def("rescale_polygon", &rescale_polygon);
    m.def("load_polygon", [](const std::string& path) { return load_polygon(path).polygon; });

    py::class_<PotentialField>(m, "PotentialField")
        .def_readonly("domain", &PotentialField::domain)
        .def("value", &PotentialField::value)
        .def("gradient", &PotentialField::gradient)
        .def("hessian", &PotentialField::hessian)
        .def("curvature", [](const PotentialField& u, const Vec2& x) { return curvature_dict(curvature(u.jet(x), x)); })
        .def("max_abreu_residual", [](const PotentialField& u, const ScalarField& A) {
            double worst = 0.0;
            for (const auto& s : tensor_samples(u).nodes) worst = std::max(worst, std::abs(s.c.abreu + A(s.x)));
            return worst;
        });

    m.def("guillemin_potential", &guillemin_potential, py::arg("polygon"), py::arg("grid") = 65);
    m.def("quarter_plane_model", &quarter_plane_model, py::arg("R"), py::arg("grid") = 65);
    m.def("half_plane_model", &half_plane_model, py::arg("R"), py::arg("grid") = 65);
    m.def("rescale_potential", &rescale_potential);
    m.def("energy", [](const PotentialField& u) {
        EnergyReport e = energy_quadrature(u);
        return py::make_tuple(e.intF2, e.intA2, e.invariant);
    });

    m.def("stability_probe", [](const WeightedPolygon& p, const ScalarField& A, int n, uint64_t seed) {
        ProbeReport r = stability_probe(p, A, n, seed);
        py::dict d;
        d["min_L"] = r.min_L;
        d["argmin_index"] = r.argmin_index;
        d["all_positive"] = r.all_positive;
        d["n"] = r.n;
        d["seed"] = r.seed;
        return d;
    }, py::arg("polygon"), py::arg("A"), py::arg("n") = 500, py::arg("seed") = 7);
    m.def("l_functional", [](const WeightedPolygon& p, const ScalarField& A, const std::function<double(Vec2)>& f,
                             int order) { return l_functional(p, A, ScalarFn([&](const Vec2& x) { return f(x); }), order); },
          py::arg("polygon"), py::arg("A"), py::arg("f"), py::arg("order") = 16);
    m.def("polar_functional", [](const WeightedPolygon& p, const std::function<double(Vec2)>& f) {
        return polar_functional(p, [&](const Vec2& x) { return f(x); });
    });

    m.def("v_statistic", &v_statistic);
    m.def("m_condition_sup", [](const PotentialField& u, std::optional<std::pair<Vec2, Vec2>> box, int density) {
        ScanOptions o;
        o.density = density;
        if (box) o.box = ScanBox{box->first, box->second};
        return m_condition_scan(u, o).sup_V;
    }, py::arg("u"), py::arg("box") = py::none(), py::arg("density") = 24);
    m.def("distance_from_point", [](const PotentialField& u, const Vec2& from, const Vec2& to) {
        return geodesic_distance(u, GeodesicSource::at(from)).distance_to(u, to);
    });
    m.def("volume_growth", [](const PotentialField& u, const std::vector<double>& taus) {
        VolumeTable t = volume_growth(u, taus);
        std::vector<double> vols;
        for (const auto& r : t.rows) vols.push_back(r.volume);
        return py::make_tuple(vols, t.exponent);
    });

    m.def("solve", [](const PotentialField& u0, const ScalarField& A, double tol, int max_iter) {
        SolveOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        SolveState s = solve(u0, A, o);
        py::dict d;
        d["converged"] = s.converged;
        d["steps"] = s.steps;
        d["max_residual"] = s.max_residual;
        d["max_residual_modulo_affine"] = s.max_projected;
        d["functional_history"] = s.functional_history;
        d["potential"] = s.u;
        return d;
    }, py::arg("u0"), py::arg("A"), py::arg("tol") = 1e-6, py::arg("max_iter") = 30);

    m.def("lemma14_ratio", [](const PotentialField& u, const Vec2& p, double L1, double L2) {
        return report_dict(lemma14_ratio(u, p, L1, L2));
    });
    m.def("lemma17_identity", [](const PotentialField& u, const std::vector<double>& Rs) {
        py::list out;
        for (const auto& r : lemma17_identity(u, Rs)) out.append(report_dict(r));
        return out;
    });
    m.def("lemma18_check", [](const std::function<double(double)>& f, const std::function<double(double)>& sigma,
                              double R, double t0) { return report_dict(lemma18_check(f, sigma, R, t0)); });
    m.def("f_harmonic_check", [](const PotentialField& u) { return report_dict(f_harmonic_check(u, 1e-6, 1e-12)); });
}
