#include <cmath>

#include "doctest.h"
#include "abreu/potential.hpp"

using namespace abreu;

namespace {

// g(t) = t log t + (1 - t) log(1 - t): g'' = 1/(t(1-t)), (1/g'')'' = -2.
double g2(double t) { return 1.0 / (t * (1.0 - t)); }

}  // namespace

TEST_CASE("square potential matches the product closed form") {
    PotentialField u = guillemin_potential(square(), 33);
    for (Vec2 x : {Vec2(0.5, 0.5), Vec2(0.1, 0.7), Vec2(0.93, 0.02)}) {
        Curvature c = curvature(u.jet(x), x);
        CHECK(c.H(0, 0) == doctest::Approx(g2(x.x())));
        CHECK(c.H(1, 1) == doctest::Approx(g2(x.y())));
        CHECK(std::abs(c.H(0, 1)) < 1e-12);
        CHECK(c.abreu == doctest::Approx(-4.0));
        CHECK(c.G(0, 0) == doctest::Approx(x.x() * (1 - x.x())));
        // F[0][0](0,0) = (t - t^2)'' = -2, everything else vanishes
        CHECK(c.F[0][0](0, 0) == doctest::Approx(-2.0));
        CHECK(std::abs(c.F[0][1](0, 0)) < 1e-10);
        CHECK(c.det == doctest::Approx(g2(x.x()) * g2(x.y())));
    }
    Curvature c = curvature(u.jet({0.5, 0.5}), {0.5, 0.5});
    // |F|^2 = sum over the two diagonal blocks: 2 * (4 * G00 * G00 / G00^2) = 8
    CHECK(c.absF2 == doctest::Approx(8.0));
    CHECK(c.lemma3_lhs == doctest::Approx(-2.0));
}

TEST_CASE("exact solutions at every sample node") {
    struct Case { PotentialField u; double A; };
    for (auto& [u, A] : {Case{guillemin_potential(square(), 65), 4.0}, Case{guillemin_potential(simplex(), 65), 6.0},
                         Case{quarter_plane_model(8.0, 65), 0.0}, Case{half_plane_model(8.0, 65), 0.0}}) {
        TensorSamples s = tensor_samples(u);
        REQUIRE(!s.nodes.empty());
        double worst = 0.0;
        for (const auto& t : s.nodes) worst = std::max(worst, std::abs(t.c.abreu + A));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("lattice finite differences are exact on low-degree polynomials") {
    Lattice l = Lattice::covering(square(), 17);
    for (int j = 0; j < l.ny; ++j)
        for (int i = 0; i < l.nx; ++i) {
            Vec2 x = l.node(i, j);
            l(i, j) = x.x() * x.x() * x.y() + 3 * x.y() * x.y();
        }
    int i = l.nx / 2, j = l.ny / 2;
    Vec2 x = l.node(i, j);
    CHECK(l.diff(i, j, 1, 0) == doctest::Approx(2 * x.x() * x.y()));
    CHECK(l.diff(i, j, 2, 1) == doctest::Approx(2.0));
    CHECK(l.diff(i, j, 0, 2) == doctest::Approx(6.0));
    CHECK(std::abs(l.diff(i, j, 2, 2)) < 1e-6);
    // outside the index range values extrapolate linearly
    CHECK(l.at(-1, j) == doctest::Approx(2 * l.at(0, j) - l.at(1, j)));
}

TEST_CASE("rescaling scales curvature and keeps the energy") {
    PotentialField u = guillemin_potential(square(), 33);
    EnergyReport e0 = energy_quadrature(u);
    CHECK(e0.intF2 == doctest::Approx(8.0).epsilon(1e-8));
    for (double l : {0.5, 2.0, 3.0}) {
        PotentialField v = rescale_potential(u, l);
        Vec2 x(0.3 * l, 0.6 * l);
        CHECK(v.value(x) == doctest::Approx(l * u.value(x / l)));
        Curvature cv = curvature(v.jet(x), x), cu = curvature(u.jet(x / l), x / l);
        CHECK(cv.abreu == doctest::Approx(cu.abreu / l));
        CHECK(energy_quadrature(v).intF2 == doctest::Approx(e0.intF2).epsilon(1e-8));
        // Guillemin form: still one log term per edge of the dilated polygon
        CHECK(v.terms.size() == u.terms.size());
        CHECK(v.domain.area() == doctest::Approx(l * l));
    }
}

TEST_CASE("correction enters the jet and convexity is checked") {
    PotentialField u = guillemin_potential(square(), 33);
    for (int j = 0; j < u.correction.ny; ++j)
        for (int i = 0; i < u.correction.nx; ++i) {
            Vec2 x = u.correction.node(i, j);
            u.correction(i, j) = 0.1 * x.x() * x.x();
        }
    u.refresh();
    CHECK(u.corrected);
    Vec2 x(0.5, 0.5);
    CHECK(u.hessian(x)(0, 0) == doctest::Approx(4.2).epsilon(1e-8));
}

TEST_CASE("Legendre transform in a vertex chart") {
    PotentialField u = quarter_plane_model(8.0, 33);
    VertexChart ch = vertex_chart(u, 0);
    // phi(eta) = sum exp(eta_i - 1) for y log y
    Vec2 eta(0.3, -0.2);
    LegendreValue v = legendre_transform(u, ch, eta);
    CHECK(v.phi == doctest::Approx(std::exp(eta.x() - 1) + std::exp(eta.y() - 1)).epsilon(1e-10));
    Vec2 y(1.5, 0.7);
    CHECK(double_transform(u, ch, y) == doctest::Approx(u.value(ch.from_chart(y))).epsilon(1e-10));
    Vec2 d = dual_coordinates(u, ch, ch.from_chart(y));
    CHECK(d.x() == doctest::Approx(std::log(1.5) + 1));
}
