#include <cmath>

#include "doctest.h"
#include "abreu/functionals.hpp"
#include "abreu/quadrature.hpp"

using namespace abreu;

namespace {

WeightedPolygon quad_polygon() {
    return canonical_weights({{0, 0}, {1, 0}, {1.2, 0.8}, {0.3, 1.1}});
}

// Midpoint-rule oracle on a fine grid, independent of the piecewise splitting.
double l_fine_grid(const WeightedPolygon& p, const ScalarField& A, const PLConvexFunction& f, int n) {
    double bd = 0.0;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 a = p.edge_start(e), b = p.edge_end(e);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += f(a + (k + 0.5) / n * (b - a));
        bd += p.weights[e] * s / n;
    }
    Vec2 lo = p.vertices[0], hi = lo;
    for (const auto& v : p.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    double hx = (hi.x() - lo.x()) / n, hy = (hi.y() - lo.y()) / n, area = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec2 x(lo.x() + (i + 0.5) * hx, lo.y() + (j + 0.5) * hy);
            if (p.contains(x)) area += A(x) * f(x) * hx * hy;
        }
    return bd - area;
}

}  // namespace

TEST_CASE("PL functional is exact against a fine-grid oracle") {
    WeightedPolygon p = quad_polygon();
    ScalarField A = ScalarField::constant(1.0);
    for (int k : {0, 3, 5}) {
        PLConvexFunction f = probe_member(p, 3, k);
        double exact = l_functional(p, A, f);
        CHECK(exact == doctest::Approx(l_fine_grid(p, A, f, 1600)).epsilon(2e-3).scale(1.0));
        CHECK(exact == doctest::Approx(l_functional(p, A, ScalarFn([&](const Vec2& x) { return f(x); }), 40))
                           .epsilon(1e-3));
    }
}

TEST_CASE("L vanishes on affine functions exactly when balanced") {
    WeightedPolygon p = quad_polygon();
    PLConvexFunction aff{{Affine{0.3, Vec2(-1.0, 2.0)}}};
    CHECK(aff.affine_on(p));
    CHECK(std::abs(l_functional(p, ScalarField::constant(1.0), aff)) < 1e-12);
    CHECK(std::abs(l_functional(p, ScalarField::constant(1.1), aff)) > 1e-3);
}

TEST_CASE("polar formula matches L for canonical weights") {
    WeightedPolygon p = quad_polygon();
    Vec2 c = p.centroid();
    // convex, 1-homogeneous about the centroid plus affine: polar formula applies
    auto hom = [&](const Vec2& x) {
        Vec2 d = x - c;
        return std::sqrt(2 * d.x() * d.x() + d.y() * d.y() + d.x() * d.y()) + 0.3 * d.x();
    };
    CHECK(polar_functional(p, hom) == doctest::Approx(l_functional(p, ScalarField::constant(1.0), hom, 24)).epsilon(1e-6));
}

TEST_CASE("probe family is reproducible and positive on canonical data") {
    WeightedPolygon p = quad_polygon();
    ProbeReport a = stability_probe(p, ScalarField::constant(1.0), 200, 11);
    ProbeReport b = stability_probe(p, ScalarField::constant(1.0), 200, 11);
    CHECK(a.min_L == b.min_L);
    CHECK(a.argmin_index == b.argmin_index);
    CHECK(a.all_positive);
    CHECK(a.min_L > 0.0);
}

TEST_CASE("exact range of a PL function") {
    PLConvexFunction f{{Affine{0, Vec2(1, 0)}, Affine{1, Vec2(-1, 0)}}};
    auto [hi, lo] = f.range_on(square());
    CHECK(lo == doctest::Approx(0.5));
    CHECK(hi == doctest::Approx(1.0));
    CHECK_FALSE(f.affine_on(square()));
    CHECK(f.scaled(2.0)({0.1, 0.4}) == doctest::Approx(1.8));
}

TEST_CASE("Mabuchi-type functional on the square solution") {
    // -int log det = int log(x(1-x)) + int log(y(1-y)) = -4; L(u) = -2 + 4 = 2
    FunctionalValue v = f_functional(guillemin_potential(square(), 33), ScalarField::constant(4.0));
    CHECK(v.logdet_part == doctest::Approx(-4.0).epsilon(1e-8));
    CHECK(v.linear_part == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(v.value == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("closed-form log integral") {
    WeightedPolygon p = quad_polygon();
    Affine l = p.defining_function(1);
    double oracle = graded_area_integral(p, [&](const Vec2& x) { return std::log(std::max(1e-300, l(x))); }, 40);
    CHECK(integral_log_affine(p, l) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("stability constant estimate") {
    WeightedPolygon c = canonical_weights(square().vertices);
    LambdaReport r = lambda_estimate(c, ScalarField::constant(1.0), c.centroid(), 20);
    CHECK(r.n == 20);
    CHECK(r.estimate > 0.0);
}
