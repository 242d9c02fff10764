#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "abreu/polygon.hpp"
#include "abreu/potential.hpp"

namespace abreu {

// max_k <g_k, x> + c_k
struct PLConvexFunction {
    std::vector<Affine> pieces;

    double operator()(const Vec2& x) const;
    int active(const Vec2& x) const;
    PLConvexFunction scaled(double s) const;
    PLConvexFunction shifted(double c) const;
    // Exact sup and inf over a convex polygon (attained at arrangement vertices).
    std::pair<double, double> range_on(const WeightedPolygon& p) const;
    // Affine on p: one piece dominates at every vertex.
    bool affine_on(const WeightedPolygon& p) const;
};

using ScalarFn = std::function<double(const Vec2&)>;

// L f = int_bd f dsigma - int_P A f dmu by quadrature.
double l_functional(const WeightedPolygon& p, const ScalarField& A, const ScalarFn& f, int order = 16);
// Exact for piecewise-linear f and affine A: integrates piece by piece.
double l_functional(const WeightedPolygon& p, const ScalarField& A, const PLConvexFunction& f);
double boundary_term(const WeightedPolygon& p, const PLConvexFunction& f);

// (1/6) closed integral of f(R(theta), theta) R(theta)^2 dtheta about the centroid,
// by quadrature in theta with panels split at the vertex directions.
double polar_functional(const WeightedPolygon& p, const ScalarFn& f, int order = 16, int panels = 8);

struct ProbeReport {
    double min_L = 0.0;
    PLConvexFunction argmin;
    int argmin_index = -1;
    int n = 0;
    uint64_t seed = 0;
    int affine_skipped = 0;
    bool all_positive = false;
    std::string normalization = "sup-norm 1 on the closed polygon, zero at the centroid";
};

// Member k of the probe family; depends only on (p, seed, k).
PLConvexFunction probe_member(const WeightedPolygon& p, uint64_t seed, int k);
ProbeReport stability_probe(const WeightedPolygon& p, const ScalarField& A, int n, uint64_t seed,
                            const std::vector<PLConvexFunction>& extra = {});

struct LambdaReport {
    double estimate = 0.0;
    int best_index = -1;
    int positive_members = 0;
    int n = 0;
};
// Lower bound for sup int_bd f dsigma over convex f >= 0, f(p0) = 0, L f = 1.
LambdaReport lambda_estimate(const WeightedPolygon& p, const ScalarField& A, const Vec2& p0, int n,
                             uint64_t seed = 7);

// F(u) = -int log det(u_ij) + L(u)
struct FunctionalValue {
    double value = 0.0;
    double logdet_part = 0.0;  // -int log det
    double linear_part = 0.0;  // L(u)
};
FunctionalValue f_functional(const PotentialField& u, const ScalarField& A);

// int_P log(lambda) dmu for affine lambda >= 0 on p, in closed form.
double integral_log_affine(const WeightedPolygon& p, const Affine& lambda);

}  // namespace abreu
