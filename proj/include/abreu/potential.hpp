#pragma once

#include <array>
#include <optional>
#include <vector>

#include "abreu/polygon.hpp"

namespace abreu {

using Mat2Pair = std::array<Mat2, 2>;
using Mat2Grid = std::array<std::array<Mat2, 2>, 2>;

// Derivatives of a scalar function up to order four.
// d3[k] = d_k H, d4[k][l] = d_k d_l H.
struct Jet {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Mat2 hess = Mat2::Zero();
    Mat2Pair d3{Mat2::Zero(), Mat2::Zero()};
    Mat2Grid d4{{{Mat2::Zero(), Mat2::Zero()}, {Mat2::Zero(), Mat2::Zero()}}};

    Jet& operator+=(const Jet& o);
};

class ConvexityError : public std::runtime_error {
public:
    ConvexityError(const std::string& what, Vec2 where)
        : std::runtime_error(what), where_(std::move(where)) {}
    const Vec2& where() const { return where_; }

private:
    Vec2 where_;
};

// Regular lattice; reads outside the index range extrapolate linearly so
// affine data is reproduced everywhere.
struct Lattice {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, h = 1.0;
    std::vector<double> f;

    static Lattice covering(const WeightedPolygon& p, int n);
    Vec2 node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
    int index(int i, int j) const { return j * nx + i; }
    double at(int i, int j) const;
    double& operator()(int i, int j) { return f[index(i, j)]; }
    // centred difference of order (p, q) in (x, y), p + q <= 4; accuracy 2
    // uses radius-2 stencils, accuracy 4 radius-3 stencils
    double diff(int i, int j, int p, int q, int accuracy = 2) const;
    Jet node_jet(int i, int j, int accuracy = 2) const;
    double bicubic(const Vec2& x, Vec2* grad = nullptr) const;
};

// Curvature quantities derived from a jet of u.
struct Curvature {
    Mat2 H = Mat2::Zero();   // u_ij
    Mat2 G = Mat2::Zero();   // u^ij
    Mat2Pair dG{};           // d_k u^ij
    Mat2Grid F{};            // F[k][l](i, j) = d_k d_l u^ij
    double det = 0.0;        // det u_ij
    double absF2 = 0.0;      // |F|^2
    double abreu = 0.0;      // sum_ij d_i d_j u^ij
    double lemma3_lhs = 0.0; // (d/dx1)^2 (1/u_11)
};

Curvature curvature(const Jet& j, const Vec2& where);

// u = sum_k term_k log term_k + 1/2 x^T Q x + <b, x> + c + correction.
struct PotentialField {
    WeightedPolygon domain;
    std::vector<Affine> terms;
    Mat2 quad = Mat2::Zero();
    Vec2 lin = Vec2::Zero();
    double konst = 0.0;
    Lattice correction;
    bool corrected = false;  // correction has nonzero samples
    Vec2 pin = Vec2::Zero();
    std::vector<int> singular_edges;  // domain edges where a log term vanishes

    Jet analytic_jet(const Vec2& x) const;
    // Analytic part plus interpolated correction.
    Jet jet(const Vec2& x) const;
    // Analytic part plus finite-differenced correction at a lattice node.
    Jet node_jet(int i, int j) const;
    double analytic_value(const Vec2& x) const;  // boundary points allowed
    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    Mat2 hessian(const Vec2& x) const;

    // Nodes at least two spacings inside the domain.
    std::vector<std::pair<int, int>> interior_nodes() const;
    void refresh();  // recompute `corrected` after editing the lattice
    // Subtract the affine part of the correction at the pin point.
    void apply_pin();
};

struct TensorSample {
    int i = 0, j = 0;
    Vec2 x = Vec2::Zero();
    Curvature c;
};

struct TensorSamples {
    std::vector<TensorSample> nodes;
    double h = 0.0;
};

PotentialField guillemin_potential(const WeightedPolygon& p, int grid = 65);
TensorSamples tensor_samples(const PotentialField& u);

struct LegendreValue {
    double phi = 0.0;
    Vec2 x = Vec2::Zero();  // touching point, original coordinates
    Vec2 y = Vec2::Zero();  // touching point, lambda chart coordinates
    int iterations = 0;
};

// Chart at a vertex: y = (lambda_prev(x), lambda_next(x)).
struct VertexChart {
    Mat2 L = Mat2::Identity();  // y = L x + l0
    Vec2 l0 = Vec2::Zero();
    Vec2 to_chart(const Vec2& x) const { return L * x + l0; }
    Vec2 from_chart(const Vec2& y) const { return L.lu().solve(y - l0); }
};

VertexChart vertex_chart(const PotentialField& u, int vertex);
// phi(eta) = sup_y <y, eta> - u(y) in the chart.
LegendreValue legendre_transform(const PotentialField& u, const VertexChart& chart, const Vec2& eta,
                                 double tol = 1e-13, int max_iter = 100);
// eta(x) = gradient of u in chart coordinates
Vec2 dual_coordinates(const PotentialField& u, const VertexChart& chart, const Vec2& x);
// Conjugate of phi at chart point y, computed from phi alone by Newton in eta.
double double_transform(const PotentialField& u, const VertexChart& chart, const Vec2& y,
                        double tol = 1e-12);

PotentialField rescale_potential(const PotentialField& u, double lambda);

// Blow-up models on truncated domains.
PotentialField quarter_plane_model(double R, int grid = 65);
PotentialField half_plane_model(double R, int grid = 65);
// 1/2 |x|^2 on a box, flat Euclidean metric.
PotentialField quadratic_model(const WeightedPolygon& box, int grid = 65);

struct EnergyReport {
    double intF2 = 0.0;
    double intA2 = 0.0;
    double invariant = 0.0;  // intF2 - intA2
};

// Lattice sum over interior nodes.
EnergyReport energy_nodes(const PotentialField& u);
// Graded quadrature of the analytic part plus a node sum for the change the
// correction makes; the correction is assumed to vanish within 2h of the boundary.
EnergyReport energy_quadrature(const PotentialField& u, int order = 24);

}  // namespace abreu
