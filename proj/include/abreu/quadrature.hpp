#pragma once

#include <functional>
#include <vector>

#include "abreu/polygon.hpp"

namespace abreu {

struct GaussRule {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule of the given order mapped to [0, 1] (Golub-Welsch).
const GaussRule& gauss_legendre(int order);

using PointFn = std::function<double(const Vec2&)>;

// Fan triangulation from the centroid, collapsed Gauss rule per triangle.
double area_integral(const WeightedPolygon& p, const PointFn& f, int order = 8);
double area_integral(const std::vector<Vec2>& poly, const PointFn& f, int order = 8);

// Same fan, with nodes graded towards the boundary edge and the two boundary
// vertices of every triangle. Meant for integrands with log or x log x
// behaviour on the edges.
double graded_area_integral(const WeightedPolygon& p, const PointFn& f, int order = 24);

// sum_E density_E * int_E f dl
double boundary_integral(const WeightedPolygon& p, const PointFn& f, int order = 8);

// Composite version with each panel graded at both ends; integrands with
// x log x behaviour at the vertices stay accurate.
double graded_boundary_integral(const WeightedPolygon& p, const PointFn& f, int order = 16,
                                int panels = 1);

// Riemannian length of the straight segment a -> b for the metric x -> H(x),
// with nodes graded at both ends to absorb 1/sqrt(lambda) blow-up.
double segment_length(const std::function<Mat2(const Vec2&)>& hessian, const Vec2& a,
                      const Vec2& b, int order = 12);

}  // namespace abreu
