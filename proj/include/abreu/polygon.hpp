#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace abreu {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// a0 + <g, x>
struct Affine {
    double c0 = 0.0;
    Vec2 g = Vec2::Zero();

    double operator()(const Vec2& x) const { return c0 + g.dot(x); }
};

class PolygonError : public std::runtime_error {
public:
    PolygonError(const std::string& what, int index = -1)
        : std::runtime_error(what), index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

// Scalar curvature target. Sampled fields carry an arbitrary callable and
// cannot be balanced exactly.
struct ScalarField {
    enum class Kind { Constant, Affine, Sampled };
    Kind kind = Kind::Constant;
    Eigen::Vector3d coeffs = Eigen::Vector3d::Zero();  // a0 + a1 x + a2 y
    std::function<double(const Vec2&)> sampled;

    static ScalarField constant(double a);
    static ScalarField affine(double a0, double a1, double a2);
    static ScalarField from_function(std::function<double(const Vec2&)> fn);

    double operator()(const Vec2& x) const;
    bool is_affine() const { return kind != Kind::Sampled; }
};

// Vertices counter-clockwise; weights[i] belongs to the edge vertices[i] -> vertices[i+1].
struct WeightedPolygon {
    std::vector<Vec2> vertices;
    std::vector<double> weights;

    int size() const { return static_cast<int>(vertices.size()); }
    const Vec2& vertex(int i) const;
    Vec2 edge_start(int i) const { return vertex(i); }
    Vec2 edge_end(int i) const { return vertex(i + 1); }
    double edge_length(int i) const;
    Vec2 inward_normal(int i) const;
    // sigma(E) / |E|: Lebesgue multiple giving the boundary measure on E.
    double density(int i) const;
    // lambda_E(x) = <n_E, x - v> / density, so that |i_v dmu| = dsigma.
    Affine defining_function(int i) const;

    double area() const;
    Vec2 centroid() const;
    bool contains(const Vec2& x, double tol = 0.0) const;
    // Smallest Euclidean distance to an edge line (positive inside).
    double boundary_distance(const Vec2& x) const;
    double boundary_mass() const;
};

// Throws PolygonError carrying the offending vertex index.
void validate(const WeightedPolygon& p);
void validate_vertices(const std::vector<Vec2>& v);

struct BalanceReport {
    double boundary_mass = 0.0;
    double area_mass = 0.0;
    Vec2 boundary_centroid = Vec2::Zero();
    Vec2 weighted_centroid = Vec2::Zero();
    Eigen::Vector3d residual = Eigen::Vector3d::Zero();  // L on {1, x, y}
};

struct PathSample {
    double t = 0.0;
    WeightedPolygon polygon;
    ScalarField A;
};

struct ContinuityPath {
    std::vector<PathSample> samples;
};

WeightedPolygon canonical_weights(const std::vector<Vec2>& vertices);
BalanceReport balance_report(const WeightedPolygon& p, const ScalarField& A);
ScalarField unique_affine_A(const WeightedPolygon& p);
double mu_invariant(const WeightedPolygon& p);
double mu_invariant_sampled(const WeightedPolygon& p, int samples = 1024);
WeightedPolygon corner_cut(const WeightedPolygon& p, int vertex, double eps);

struct RebalanceResult {
    WeightedPolygon polygon;
    double lambda = 1.0;
    double mu = 1.0;
    int iterations = 0;
    double residual = 0.0;
};
RebalanceResult rebalance(const WeightedPolygon& p, int edge_f, int edge_g,
                          double tol = 1e-12, int max_iter = 50);

// Minimal-norm change of the weights making (A, sigma) balanced for an affine A.
WeightedPolygon balance_weights(const WeightedPolygon& p, const ScalarField& A);

ContinuityPath continuity_path(const WeightedPolygon& from, const ScalarField& A_from,
                               const WeightedPolygon& to, const ScalarField& A_to,
                               int steps, double tol = 1e-10);
WeightedPolygon rescale_polygon(const WeightedPolygon& p, double lambda);

// Sutherland-Hodgman clip of a convex polygon to {h >= 0}.
std::vector<Vec2> clip_polygon(const std::vector<Vec2>& poly, const Affine& h);
double signed_area(const std::vector<Vec2>& poly);

WeightedPolygon square(double side = 1.0);
WeightedPolygon simplex();

}  // namespace abreu
