#include <cmath>

#include "doctest.h"
#include "abreu/analysis.hpp"

using namespace abreu;

TEST_CASE("lemma14_ratio matches the closed form") {
    PotentialField q = quarter_plane_model(16.0, 65);
    // jumps of log x across [1, 3] are log 3 on both axes, det u_ij(2,2) = 1/4
    IdentityReport r = lemma14_ratio(q, {2, 2}, 1, 1);
    double oracle = 0.25 / (std::log(3.0) * std::log(3.0));
    CHECK(r.ratio == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(r.pass);
    CHECK(r.detail("kappa_dilated") == doctest::Approx(r.ratio).epsilon(1e-8));
    // constant Hessian: V_i = 2 L_i u_ii, kappa = det / (4 max(u_ii)^2) = 1/4 for the identity
    WeightedPolygon b = square(4.0);
    IdentityReport flat = lemma14_ratio(quadratic_model(b, 33), {2, 2}, 1, 1);
    CHECK(flat.ratio == doctest::Approx(0.25));
    CHECK_THROWS_AS(lemma14_ratio(q, {0.5, 2}, 1, 1), PreconditionError);
    CHECK_THROWS_AS(lemma14_ratio(guillemin_potential(square(), 33), {0.5, 0.5}, 0.1, 0.1), PreconditionError);
}

TEST_CASE("lemma17_identity ratio is independent of R") {
    auto reps = lemma17_identity(quarter_plane_model(16.0, 65), {0, 1, 2, 4, 8});
    REQUIRE(reps.size() == 5);
    CHECK(reps[0].lhs == 0.0);
    CHECK(std::isnan(reps[0].ratio));
    for (size_t k = 1; k < reps.size(); ++k) {
        // u^zz = x1 + x2 = R on the segment of length 2R in y: integral 2 R^2
        CHECK(reps[k].ratio == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(reps[k].pass);
    }
}

TEST_CASE("lemma18_check accepts satisfiable data and rejects violations") {
    IdentityReport a = lemma18_check([](double) { return 1.0; }, [](double) { return 0.0; }, 1, 0);
    CHECK(a.pass);
    CHECK(a.rhs == doctest::Approx(18.0));
    IdentityReport b = lemma18_check([](double t) { return std::exp(t); }, [](double) { return 1.0; }, 1, 1);
    CHECK(b.pass);
    CHECK(b.lhs == doctest::Approx(std::exp(1.0)));
    CHECK(b.rhs == doctest::Approx(18 * (std::exp(1.0) - 1)).epsilon(1e-10));
    CHECK_THROWS_AS(lemma18_check([](double t) { return std::exp(t); }, [](double) { return 1.0; }, 3, 1),
                    PreconditionError);
    CHECK_THROWS_AS(lemma18_check([](double t) { return std::exp(2 * t); }, [](double) { return 1.0; }, 1, 1),
                    PreconditionError);
    CHECK_THROWS_AS(lemma18_check([](double) { return 1.0; }, [](double) { return 0.0; }, 0.5, 0), PreconditionError);
}

TEST_CASE("flux identity on scalar-flat data") {
    PotentialField q = quarter_plane_model(16.0, 65);
    IdentityReport r = flux_identity(q, 4);
    CHECK(r.pass);
    CHECK(std::abs(r.lhs) < 1e-12);
    CHECK(std::abs(r.rhs) < 1e-12);
    // not scalar-flat: rejected
    PotentialField bumped = q;
    bumped.correction(6, 6) += 1e-2;
    bumped.refresh();
    CHECK_THROWS_AS(flux_identity(bumped, 4), PreconditionError);
}

TEST_CASE("F-harmonic check on flat models") {
    CHECK(f_harmonic_check(quarter_plane_model(8.0, 65), 1e-6, 1e-12).pass);
    CHECK(f_harmonic_check(half_plane_model(8.0, 65), 1e-6, 1e-12).pass);
    CHECK_THROWS_AS(f_harmonic_check(guillemin_potential(square(), 33)), PreconditionError);
}

TEST_CASE("determinant bounds") {
    WeightedPolygon b = square(3.0);
    for (auto& v : b.vertices) v -= Vec2(1.5, 1.5);
    IdentityReport flat = det_bounds(quadratic_model(b, 33), {0, 0}, 1.0);
    CHECK(flat.pass);
    CHECK(flat.detail("c1_implied") == doctest::Approx(1.0));
    CHECK(flat.detail("c3_implied") == doctest::Approx(1.0));
    PotentialField q = normalized_at(quarter_plane_model(16.0, 65), {1, 1});
    CHECK(q.gradient({1, 1}).norm() < 1e-12);
    IdentityReport r = det_bounds(q, {1, 1}, 0.5);
    CHECK(r.pass);
    CHECK(r.detail("c1_implied") == doctest::Approx(r.detail("c1_dilated")).epsilon(1e-8));
    CHECK_THROWS_AS(det_bounds(quarter_plane_model(16.0, 65), {1, 1}, 0.5), PreconditionError);
}

TEST_CASE("half-plane evidence") {
    IdentityReport r = theorem2_evidence(65);
    CHECK(r.pass);
    CHECK(r.detail("sup_V_T1") == doctest::Approx(1.0));
    CHECK(r.detail("sup_V_T2") == doctest::Approx(2.0));
    CHECK(r.detail("sup_V_T4") == doctest::Approx(4.0));
    CHECK(r.detail("barrier_argmin_x") == doctest::Approx(2.0));
}

TEST_CASE("digests are stable and input sensitive") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    PotentialField q = quarter_plane_model(16.0, 33);
    CHECK(describe(q) == describe(quarter_plane_model(16.0, 33)));
    CHECK(describe(q) != describe(quarter_plane_model(8.0, 33)));
}
