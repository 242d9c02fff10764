#include <cmath>

#include "doctest.h"
#include "abreu/polygon.hpp"
#include "abreu/quadrature.hpp"

using namespace abreu;

namespace {

WeightedPolygon quad_polygon() {
    return canonical_weights({{0, 0}, {1, 0}, {1.2, 0.8}, {0.3, 1.1}});
}

int edge_from(const WeightedPolygon& p, const Vec2& a) {
    for (int e = 0; e < p.size(); ++e)
        if ((p.edge_start(e) - a).norm() < 1e-12) return e;
    return -1;
}

}  // namespace

TEST_CASE("square geometry and normalization") {
    WeightedPolygon sq = square();
    CHECK(sq.area() == doctest::Approx(1.0));
    CHECK((sq.centroid() - Vec2(0.5, 0.5)).norm() < 1e-15);
    CHECK(sq.boundary_mass() == doctest::Approx(4.0));
    // lambda of the bottom edge is the height above it
    CHECK(sq.defining_function(0)(Vec2(0.3, 0.7)) == doctest::Approx(0.7));
    CHECK(sq.contains({0.5, 0.5}));
    CHECK_FALSE(sq.contains({1.5, 0.5}));
    CHECK(sq.boundary_distance({0.2, 0.6}) == doctest::Approx(0.2));
}

TEST_CASE("validation rejects bad polygons") {
    WeightedPolygon cw{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {1, 1, 1, 1}};
    CHECK_THROWS_AS(validate(cw), PolygonError);
    WeightedPolygon reflex{{{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}, {1, 1, 1, 1, 1}};
    CHECK_THROWS_AS(validate(reflex), PolygonError);
    WeightedPolygon negative{{{0, 0}, {1, 0}, {0, 1}}, {1, -1, 1}};
    CHECK_THROWS_AS(validate(negative), PolygonError);
    CHECK_NOTHROW(validate(square()));
}

TEST_CASE("canonical weights are centroid triangle areas and balance A = 1") {
    WeightedPolygon c = canonical_weights(square().vertices);
    for (double w : c.weights) CHECK(w == doctest::Approx(0.25));
    WeightedPolygon q = quad_polygon();
    Vec2 g = q.centroid();
    for (int e = 0; e < q.size(); ++e) {
        Vec2 a = q.edge_start(e) - g, b = q.edge_end(e) - g;
        CHECK(q.weights[e] == doctest::Approx(0.5 * (a.x() * b.y() - a.y() * b.x())));
    }
    BalanceReport r = balance_report(q, ScalarField::constant(1.0));
    CHECK(r.residual.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("balanced affine A for Delzant data") {
    ScalarField a = unique_affine_A(square());
    CHECK(a.coeffs[0] == doctest::Approx(4.0));
    CHECK(std::abs(a.coeffs[1]) < 1e-12);
    CHECK(std::abs(a.coeffs[2]) < 1e-12);
    ScalarField b = unique_affine_A(simplex());
    CHECK(b.coeffs[0] == doctest::Approx(6.0));
    BalanceReport r = balance_report(simplex(), ScalarField::constant(6.0));
    CHECK(r.residual.cwiseAbs().maxCoeff() < 1e-12);
    // independent: boundary moments against area moments by quadrature
    WeightedPolygon q = quad_polygon();
    ScalarField A = unique_affine_A(q);
    for (auto f : {PointFn([](const Vec2&) { return 1.0; }), PointFn([](const Vec2& x) { return x.x(); }),
                   PointFn([](const Vec2& x) { return x.y(); })}) {
        double lhs = boundary_integral(q, f);
        double rhs = area_integral(q, [&](const Vec2& x) { return A(x) * f(x); });
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("mu invariant") {
    CHECK(mu_invariant(square()) == doctest::Approx(1.0));
    CHECK(mu_invariant(simplex()) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(mu_invariant_sampled(simplex()) == doctest::Approx(mu_invariant(simplex())).epsilon(1e-3));
}

TEST_CASE("corner cut and rebalance") {
    WeightedPolygon c = corner_cut(square(), 0, 0.05);
    REQUIRE(c.size() == 5);
    CHECK(c.area() == doctest::Approx(1.0 - 0.5 * 0.05 * 0.05));
    CHECK_THROWS(corner_cut(square(), 0, 1.5));
    RebalanceResult r = rebalance(c, edge_from(c, {1, 0}), edge_from(c, {1, 1}));
    ScalarField A = unique_affine_A(r.polygon);
    CHECK(std::abs(A.coeffs[1]) < 1e-10);
    CHECK(std::abs(A.coeffs[2]) < 1e-10);
    CHECK(r.residual < 1e-10);
}

TEST_CASE("rescaling keeps balance and mu") {
    WeightedPolygon q = quad_polygon();
    for (double l : {0.5, 2.0, 3.0}) {
        WeightedPolygon s = rescale_polygon(q, l);
        CHECK(s.area() == doctest::Approx(l * l * q.area()));
        CHECK(mu_invariant(s) == doctest::Approx(mu_invariant(q)));
        for (int e = 0; e < q.size(); ++e)
            CHECK(s.defining_function(e)(l * Vec2(0.6, 0.5)) == doctest::Approx(l * q.defining_function(e)({0.6, 0.5})));
    }
}

TEST_CASE("continuity path samples are balanced") {
    WeightedPolygon c0 = canonical_weights(corner_cut(square(), 0, 0.01).vertices);
    WeightedPolygon c1 = corner_cut(square(), 0, 0.05);
    c1 = rebalance(c1, edge_from(c1, {1, 0}), edge_from(c1, {1, 1})).polygon;
    ContinuityPath path = continuity_path(c0, ScalarField::constant(1.0), c1, unique_affine_A(c1), 6);
    REQUIRE(path.samples.size() == 6);
    CHECK(path.samples.front().t == 0.0);
    CHECK(path.samples.back().t == 1.0);
    for (const auto& s : path.samples)
        CHECK(balance_report(s.polygon, s.A).residual.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("quadrature rules") {
    const GaussRule& g = gauss_legendre(8);
    double s = 0.0;
    for (size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * std::pow(g.nodes[k], 15);
    CHECK(s == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    WeightedPolygon q = quad_polygon();
    CHECK(area_integral(q, [](const Vec2&) { return 1.0; }) == doctest::Approx(q.area()));
    CHECK(boundary_integral(q, [](const Vec2&) { return 1.0; }) == doctest::Approx(q.boundary_mass()));
    // int_0^1 x log x = -1/4 on the unit square's bottom-left region
    double v = graded_area_integral(square(), [](const Vec2& x) { return x.x() > 0 ? x.x() * std::log(x.x()) : 0.0; });
    CHECK(v == doctest::Approx(-0.25).epsilon(1e-8));
    std::vector<Vec2> half = clip_polygon(square().vertices, Affine{0.5, Vec2(-1, 0)});
    CHECK(signed_area(half) == doctest::Approx(0.5));
}
