#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abreu/potential.hpp"

namespace abreu {

// Largest t >= 0 with p + t d in the closed polygon.
double ray_exit(const WeightedPolygon& p, const Vec2& x, const Vec2& d);

class AdmissibilityError : public std::domain_error {
public:
    AdmissibilityError(const std::string& what, Vec2 exit)
        : std::domain_error(what), exit_(std::move(exit)) {}
    const Vec2& exit_point() const { return exit_; }

private:
    Vec2 exit_;
};

// The extended segment from 2p - q to 2q - p lies in the closed domain.
bool pair_admissible(const WeightedPolygon& dom, const Vec2& p, const Vec2& q, Vec2* exit = nullptr);

// grad_nu u(q) - grad_nu u(p), nu the unit vector from p to q. Throws
// AdmissibilityError when the extended segment leaves the domain; p == q gives 0.
double v_statistic(const PotentialField& u, const Vec2& p, const Vec2& q);

enum DirectionSet : unsigned { kAxis = 1, kDiagonal = 2, kRandom = 4, kAllDirections = 7 };

struct ScanBox {
    Vec2 lo = Vec2::Zero(), hi = Vec2::Zero();
};

struct ScanOptions {
    int density = 24;  // base points per side of the scan box
    unsigned directions = kAllDirections;
    int random_directions = 8;
    uint64_t seed = 7;
    // Pairs restricted to this box; defaults to the domain's bounding box.
    std::optional<ScanBox> box;
    std::optional<double> M;
};

struct MConditionReport {
    double sup_V = 0.0;
    Vec2 p = Vec2::Zero(), q = Vec2::Zero();
    long pairs_tested = 0;
    std::optional<double> M;
    bool violation = false;
};

// For a base point p and direction nu, V(p, p + s nu) increases with s, so the
// scan evaluates only the longest admissible step in each direction.
MConditionReport m_condition_scan(const PotentialField& u, const ScanOptions& opt = {});

struct GeodesicSource {
    enum class Kind { Point, Edges };
    Kind kind = Kind::Point;
    Vec2 point = Vec2::Zero();
    std::vector<int> edges;

    static GeodesicSource at(const Vec2& x);
    static GeodesicSource edge(int e);
    static GeodesicSource boundary(const WeightedPolygon& p);
};

struct GeodesicField {
    GeodesicSource source;
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, h = 1.0;
    std::vector<double> dist;  // +inf at nodes outside the open domain
    std::string method = "dijkstra-16";

    Vec2 node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
    double at(int i, int j) const { return dist[static_cast<size_t>(j) * nx + i]; }
    // Distance at an arbitrary interior point: min over nearby nodes of
    // node distance plus the straight-segment length to the point.
    double distance_to(const PotentialField& u, const Vec2& x) const;
};

// Relative overestimate bound of 16-neighbour shortest paths for the Euclidean metric.
constexpr double kStencilAngularError = 0.0275;
// Same bound for the constant metric H: 1/cos(g/2) - 1, g the largest angle
// between neighbouring stencil directions measured in H.
double stencil_error_factor(const Mat2& H);

GeodesicField geodesic_distance(const PotentialField& u, const GeodesicSource& src);

// Metric length of the straight segment a -> b under u_ij.
double riemannian_length(const PotentialField& u, const Vec2& a, const Vec2& b);

// Inequality ledger -------------------------------------------------------

constexpr double kMeshToleranceFactor = 3.0;

struct BoundRecord {
    std::string check;
    Vec2 point = Vec2::Zero();
    double lhs = 0.0, rhs = 0.0;
    double margin = 0.0;     // rhs - lhs
    double tolerance = 0.0;  // allowed negative margin
    bool pass = true;
    bool skipped = false;  // hypothesis unmet
    std::string note;
};

struct BoundLedger {
    std::vector<BoundRecord> records;
    int checked() const;
    int failures() const;
    int skipped() const;
    bool pass() const { return failures() == 0; }
};

struct BoundOptions {
    int samples = 6;           // base points per side
    int directions = 4;        // segment directions per base point
    double curvature_tol = 1e-9;  // slack on the |F| <= 1 hypothesis
};

BoundRecord midpoint_segment_bound(const PotentialField& u, const Vec2& mid, const Vec2& end, double M);
BoundRecord boundary_distance_bound(const PotentialField& u, const Vec2& p, double dist_g, double M);
std::vector<BoundRecord> slice_curvature_bounds(const PotentialField& u);
BoundRecord directional_hessian_bound(const PotentialField& u, const Vec2& p, const Vec2& nu, double R,
                                      double M);
BoundRecord edge_inverse_hessian_bound(const PotentialField& u, const Vec2& p, int edge, double dist_g);
BoundRecord edge_defining_function_bound(const PotentialField& u, const Vec2& p, int edge,
                                         double dist_g);
// Upper and (when d < alpha) lower comparison of u^ij(q) with u^ij(p).
std::vector<BoundRecord> inverse_hessian_comparison(const PotentialField& u, const Vec2& p,
                                                    const Vec2& q, double alpha, double d);
// Ellipse containment and the area lower bound for the metric ball B(p, beta).
std::vector<BoundRecord> ball_ellipse_bounds(const PotentialField& u, const Vec2& p, double beta,
                                             double alpha, const GeodesicField& from_p);

// Runs every check on sampled points. Checks assuming |F| <= 1 are skipped
// with a note when the sampled hypothesis fails.
BoundLedger bound_suite(const PotentialField& u, double M, const BoundOptions& opt = {});

struct VolumeRow {
    double tau = 0.0;
    double area = 0.0;
    double volume = 0.0;        // 4 pi^2 area
    double max_distance = 0.0;  // from the vertex over the region
};

struct VolumeTable {
    std::vector<VolumeRow> rows;
    double exponent = 0.0;  // least-squares slope of log volume against log distance
};

// Region {sum of the log-term defining functions <= tau} for a potential
// with two log terms meeting at a vertex.
VolumeTable volume_growth(const PotentialField& u, const std::vector<double>& taus);

}  // namespace abreu
