#include "abreu/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "abreu/quadrature.hpp"

namespace abreu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scale_of(const WeightedPolygon& p) {
    double s = 0.0;
    for (const auto& v : p.vertices) s = std::max(s, v.cwiseAbs().maxCoeff());
    return 1.0 + s;
}

WeightedPolygon box_polygon(const ScanBox& b) {
    WeightedPolygon p;
    p.vertices = {b.lo, {b.hi.x(), b.lo.y()}, b.hi, {b.lo.x(), b.hi.y()}};
    p.weights = {1, 1, 1, 1};
    return p;
}

ScanBox bounding_box(const WeightedPolygon& p) {
    ScanBox b{p.vertices.front(), p.vertices.front()};
    for (const auto& v : p.vertices) {
        b.lo = b.lo.cwiseMin(v);
        b.hi = b.hi.cwiseMax(v);
    }
    return b;
}

std::string point_str(const Vec2& x) {
    std::ostringstream os;
    os << "(" << x.x() << ", " << x.y() << ")";
    return os.str();
}

}  // namespace

double ray_exit(const WeightedPolygon& p, const Vec2& x, const Vec2& d) {
    double t = kInf;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 n = p.inward_normal(e);
        double nd = n.dot(d);
        if (nd < 0.0) t = std::min(t, n.dot(x - p.edge_start(e)) / -nd);
    }
    return std::max(0.0, t);
}

bool pair_admissible(const WeightedPolygon& dom, const Vec2& p, const Vec2& q, Vec2* exit) {
    double tol = 1e-12 * scale_of(dom);
    Vec2 ends[2] = {2.0 * p - q, 2.0 * q - p};
    Vec2 mid = 0.5 * (p + q);
    for (const auto& e : ends) {
        if (dom.contains(e, tol)) continue;
        if (exit) {
            Vec2 d = (e - mid).normalized();
            *exit = mid + ray_exit(dom, mid, d) * d;
        }
        return false;
    }
    return true;
}

double v_statistic(const PotentialField& u, const Vec2& p, const Vec2& q) {
    double len = (q - p).norm();
    if (len == 0.0) {
        std::clog << "warning: degenerate pair in v_statistic, returning 0\n";
        return 0.0;
    }
    Vec2 exit;
    if (!pair_admissible(u.domain, p, q, &exit))
        throw AdmissibilityError("extended segment leaves the domain at " + point_str(exit), exit);
    Vec2 nu = (q - p) / len;
    return nu.dot(u.gradient(q) - u.gradient(p));
}

MConditionReport m_condition_scan(const PotentialField& u, const ScanOptions& opt) {
    if (opt.density < 2) throw std::invalid_argument("scan density must be at least 2");
    const WeightedPolygon& dom = u.domain;
    ScanBox box = opt.box ? *opt.box : bounding_box(dom);
    WeightedPolygon boxp = box_polygon(box);

    std::vector<Vec2> dirs;
    if (opt.directions & kAxis) dirs.insert(dirs.end(), {{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    if (opt.directions & kDiagonal) {
        double r = std::sqrt(0.5);
        dirs.insert(dirs.end(), {{r, r}, {-r, r}, {-r, -r}, {r, -r}});
    }
    if (opt.directions & kRandom) {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
        for (int k = 0; k < opt.random_directions; ++k) {
            double a = ang(rng);
            dirs.emplace_back(std::cos(a), std::sin(a));
        }
    }

    MConditionReport r;
    r.M = opt.M;
    r.sup_V = -kInf;
    int n = opt.density;
    // points within rounding of an edge (grid points on a slanted edge) are boundary points
    const double inside = 1e-9 * (box.hi - box.lo).norm();
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            Vec2 p = box.lo + Vec2((box.hi.x() - box.lo.x()) * a / (n - 1),
                                   (box.hi.y() - box.lo.y()) * b / (n - 1));
            if (!(dom.boundary_distance(p) > inside)) continue;
            Vec2 gp = u.gradient(p);
            for (const auto& nu : dirs) {
                double s = std::min({ray_exit(dom, p, -nu), 0.5 * ray_exit(dom, p, nu),
                                     ray_exit(boxp, p, nu)});
                if (!(s > 0.0)) continue;
                Vec2 q = p + s * nu;
                if (!(dom.boundary_distance(q) > inside)) continue;
                double V = nu.dot(u.gradient(q) - gp);
                ++r.pairs_tested;
                if (V > r.sup_V) {
                    r.sup_V = V;
                    r.p = p;
                    r.q = q;
                }
            }
        }
    if (r.pairs_tested == 0) throw std::runtime_error("no admissible pair in the scan box");
    if (opt.M) r.violation = r.sup_V > *opt.M;
    return r;
}

// ------------------------------------------------------------- geodesics

GeodesicSource GeodesicSource::at(const Vec2& x) {
    GeodesicSource s;
    s.kind = Kind::Point;
    s.point = x;
    return s;
}

GeodesicSource GeodesicSource::edge(int e) {
    GeodesicSource s;
    s.kind = Kind::Edges;
    s.edges = {e};
    return s;
}

GeodesicSource GeodesicSource::boundary(const WeightedPolygon& p) {
    GeodesicSource s;
    s.kind = Kind::Edges;
    for (int e = 0; e < p.size(); ++e) s.edges.push_back(e);
    return s;
}

double stencil_error_factor(const Mat2& H) {
    Eigen::LLT<Mat2> llt(H);
    Mat2 U = llt.matrixU();
    std::vector<double> ang;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            if ((a == 0 && b == 0) || std::abs(a) + std::abs(b) > 3 || (std::abs(a) == 2 && std::abs(b) != 1) ||
                (std::abs(b) == 2 && std::abs(a) != 1))
                continue;
            Vec2 v = U * Vec2(a, b);
            ang.push_back(std::atan2(v.y(), v.x()));
        }
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2.0 * M_PI - ang.back();
    for (size_t k = 1; k < ang.size(); ++k) gap = std::max(gap, ang[k] - ang[k - 1]);
    return 1.0 / std::cos(0.5 * gap) - 1.0;
}

double riemannian_length(const PotentialField& u, const Vec2& a, const Vec2& b) {
    return segment_length([&](const Vec2& x) { return u.hessian(x); }, a, b);
}

namespace {

// Seed distance from the source to a point within a couple of spacings of it.
double seed_distance(const PotentialField& u, const GeodesicSource& src, const Vec2& x, double reach) {
    double best = kInf;
    if (src.kind == GeodesicSource::Kind::Point) {
        if ((x - src.point).norm() <= reach) best = riemannian_length(u, src.point, x);
        return best;
    }
    for (int e : src.edges) {
        Vec2 a = u.domain.edge_start(e), b = u.domain.edge_end(e);
        Vec2 d = b - a;
        double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        Vec2 foot = a + t * d;
        if ((x - foot).norm() <= reach) best = std::min(best, riemannian_length(u, foot, x));
    }
    return best;
}

}  // namespace

GeodesicField geodesic_distance(const PotentialField& u, const GeodesicSource& src) {
    const Lattice& L = u.correction;
    GeodesicField g;
    g.source = src;
    g.nx = L.nx;
    g.ny = L.ny;
    g.x0 = L.x0;
    g.y0 = L.y0;
    g.h = L.h;
    size_t N = static_cast<size_t>(g.nx) * g.ny;
    g.dist.assign(N, kInf);

    const WeightedPolygon& P = u.domain;
    std::vector<char> active(N, 0);
    std::vector<double> bd(N, -1.0);
    size_t n_active = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            size_t k = static_cast<size_t>(j) * g.nx + i;
            bd[k] = P.boundary_distance(g.node(i, j));
            if (bd[k] > 1e-12 * g.h) {
                active[k] = 1;
                ++n_active;
            }
        }

    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    double reach = 2.0 * g.h * (1.0 + 1e-9);
    for (size_t k = 0; k < N; ++k) {
        if (!active[k]) continue;
        Vec2 x = g.node(static_cast<int>(k % g.nx), static_cast<int>(k / g.nx));
        double d = seed_distance(u, src, x, reach);
        if (d < g.dist[k]) {
            g.dist[k] = d;
            pq.emplace(d, k);
        }
    }
    if (pq.empty()) throw std::runtime_error("geodesic source has no lattice node within two spacings");

    static const int off[16][2] = {{1, 0},  {0, 1},   {-1, 0}, {0, -1}, {1, 1},  {-1, 1},
                                   {-1, -1}, {1, -1}, {2, 1},  {1, 2},  {-1, 2}, {-2, 1},
                                   {-2, -1}, {-1, -2}, {1, -2}, {2, -1}};
    size_t settled = 0;
    std::vector<char> done(N, 0);
    while (!pq.empty()) {
        auto [d, k] = pq.top();
        pq.pop();
        if (done[k] || d > g.dist[k]) continue;
        done[k] = 1;
        ++settled;
        int i = static_cast<int>(k % g.nx), j = static_cast<int>(k / g.nx);
        Vec2 x = g.node(i, j);
        for (const auto& o : off) {
            int a = i + o[0], b = j + o[1];
            if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
            size_t m = static_cast<size_t>(b) * g.nx + a;
            if (!active[m] || done[m]) continue;
            Vec2 y = g.node(a, b);
            double w;
            if (bd[k] < 2.0 * g.h || bd[m] < 2.0 * g.h) {
                w = riemannian_length(u, x, y);
            } else {
                Vec2 dx = y - x;
                w = std::sqrt(dx.dot(u.hessian(0.5 * (x + y)) * dx));
            }
            if (d + w < g.dist[m]) {
                g.dist[m] = d + w;
                pq.emplace(d + w, m);
            }
        }
    }
    if (settled != n_active) throw std::runtime_error("lattice graph is disconnected");
    return g;
}

double GeodesicField::distance_to(const PotentialField& u, const Vec2& x) const {
    double best = seed_distance(u, source, x, 2.0 * h * (1.0 + 1e-9));
    int i0 = static_cast<int>(std::floor((x.x() - x0) / h)), j0 = static_cast<int>(std::floor((x.y() - y0) / h));
    for (int j = j0 - 1; j <= j0 + 2; ++j)
        for (int i = i0 - 1; i <= i0 + 2; ++i) {
            if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
            double d = at(i, j);
            if (!std::isfinite(d)) continue;
            best = std::min(best, d + riemannian_length(u, node(i, j), x));
        }
    return best;
}

// ------------------------------------------------------------ inequalities

namespace {

BoundRecord make_record(const std::string& check, const Vec2& p, double lhs, double rhs, double err) {
    BoundRecord r;
    r.check = check;
    r.point = p;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = kMeshToleranceFactor * err;
    r.pass = r.margin >= -r.tolerance;
    return r;
}

BoundRecord skipped_record(const std::string& check, const Vec2& p, const std::string& why) {
    BoundRecord r;
    r.check = check;
    r.point = p;
    r.skipped = true;
    r.note = "hypothesis unmet: " + why;
    return r;
}

// Estimated error of a lattice shortest-path distance D near x: the stencil's
// largest angular gap measured in the local metric, plus one spacing.
double distance_error(const PotentialField& u, const Vec2& x, double D) {
    Mat2 H = u.hessian(x);
    double lmax = Eigen::SelfAdjointEigenSolver<Mat2>(H).eigenvalues().maxCoeff();
    return stencil_error_factor(H) * D + u.correction.h * std::sqrt(lmax);
}

double rounding(double v) { return 1e-12 * (1.0 + std::abs(v)); }

double max_curvature_on(const PotentialField& u, const std::vector<Vec2>& pts) {
    double m = 0.0;
    for (const auto& x : pts) m = std::max(m, std::sqrt(curvature(u.jet(x), x).absF2));
    return m;
}

}  // namespace

BoundRecord midpoint_segment_bound(const PotentialField& u, const Vec2& mid, const Vec2& end, double M) {
    const std::string name = "midpoint_segment_length";
    Vec2 other = 2.0 * mid - end;
    double tol = 1e-12 * scale_of(u.domain);
    if (!u.domain.contains(end, tol) || !u.domain.contains(other, tol))
        return skipped_record(name, mid, "segment leaves the closed domain");
    double len = (mid - end).norm();
    double lhs = riemannian_length(u, mid, end);
    double rhs = std::sqrt(M) * std::sqrt(len) / (std::sqrt(2.0) - 1.0);
    double err = 1e-8 * (1.0 + lhs) + (u.corrected ? u.correction.h * u.correction.h * lhs : 0.0);
    return make_record(name, mid, lhs, rhs, err);
}

BoundRecord boundary_distance_bound(const PotentialField& u, const Vec2& p, double dist_g, double M) {
    double rhs = std::sqrt(M) * std::sqrt(u.domain.boundary_distance(p)) / (std::sqrt(2.0) - 1.0);
    return make_record("boundary_distance", p, dist_g, rhs, distance_error(u, p, dist_g));
}

std::vector<BoundRecord> slice_curvature_bounds(const PotentialField& u) {
    std::vector<BoundRecord> out;
    for (auto [i, j] : u.interior_nodes()) {
        Vec2 x = u.correction.node(i, j);
        Jet J = u.node_jet(i, j);
        Curvature c = curvature(J, x);
        double h11 = J.hess(0, 0), t3 = J.d3[0](0, 0), t4 = J.d4[0][0](0, 0);
        double scale = 2.0 * t3 * t3 / (h11 * h11 * h11) + std::abs(t4) / (h11 * h11);
        double F = std::sqrt(c.absF2);
        out.push_back(make_record("slice_curvature", x, c.lemma3_lhs, F, 1e-12 * (1.0 + scale + F)));
    }
    return out;
}

BoundRecord directional_hessian_bound(const PotentialField& u, const Vec2& p, const Vec2& nu_in, double R,
                                      double M) {
    const std::string name = "directional_hessian";
    Vec2 nu = nu_in.normalized();
    double tol = 1e-12 * scale_of(u.domain);
    if (!(R > 0.0) || !u.domain.contains(p + 3 * R * nu, tol) || !u.domain.contains(p - 3 * R * nu, tol))
        return skipped_record(name, p, "segment of half-length 3R leaves the domain");
    // |F| <= 1 checked on a sample of the 3R-neighbourhood of the segment
    Vec2 perp(-nu.y(), nu.x());
    std::vector<Vec2> pts;
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
            Vec2 x = p + a * R * nu + b * R * perp;
            if (u.domain.boundary_distance(x) > 1e-9 * scale_of(u.domain)) pts.push_back(x);
        }
    double Fmax = max_curvature_on(u, pts);
    if (Fmax > 1.0 + 1e-9) return skipped_record(name, p, "max |F| = " + std::to_string(Fmax) + " near the segment");
    double lhs = nu.dot(u.hessian(p) * nu);
    double rhs = std::max(2.0 * M / (M_PI * R), 2.0 * (M / M_PI) * (M / M_PI));
    BoundRecord r = make_record(name, p, lhs, rhs, rounding(lhs));
    r.note = "local |F| check on " + std::to_string(pts.size()) + " points";
    return r;
}

BoundRecord edge_inverse_hessian_bound(const PotentialField& u, const Vec2& p, int edge, double dist_g) {
    const std::string name = "edge_inverse_hessian";
    const auto& se = u.singular_edges;
    if (std::find(se.begin(), se.end(), edge) == se.end())
        return skipped_record(name, p, "edge carries no boundary log term");
    Vec2 a = u.domain.defining_function(edge).g;
    double lhs = a.dot(u.hessian(p).inverse() * a);
    double s = std::sinh(dist_g);
    // rhs grows with the distance; a lattice overestimate only loosens the check
    return make_record(name, p, lhs, s * s, rounding(lhs));
}

BoundRecord edge_defining_function_bound(const PotentialField& u, const Vec2& p, int edge, double dist_g) {
    const std::string name = "edge_defining_function";
    const auto& se = u.singular_edges;
    if (std::find(se.begin(), se.end(), edge) == se.end())
        return skipped_record(name, p, "edge carries no boundary log term");
    double lhs = u.domain.defining_function(edge)(p);
    return make_record(name, p, lhs, std::cosh(dist_g) - 1.0, rounding(lhs));
}

std::vector<BoundRecord> inverse_hessian_comparison(const PotentialField& u, const Vec2& p, const Vec2& q,
                                                    double alpha, double d) {
    Mat2 Gp = u.hessian(p).inverse(), Gq = u.hessian(q).inverse();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat2> es(Gq, Gp);
    double emax = es.eigenvalues().maxCoeff(), emin = es.eigenvalues().minCoeff();
    double sa = std::sinh(alpha);
    double err_d = distance_error(u, q, d);
    std::vector<BoundRecord> out;
    double up = std::sinh(alpha + d) / sa;
    double dup = 2.0 * up * std::cosh(alpha + d) / sa;  // derivative of the bound in d
    out.push_back(make_record("inverse_hessian_upper", q, emax, up * up, rounding(emax) + dup * err_d));
    if (d < alpha) {
        double lo = std::sinh(alpha - d) / sa;
        double dlo = 2.0 * lo * std::cosh(alpha - d) / sa;
        out.push_back(make_record("inverse_hessian_lower", q, lo * lo, emin, rounding(emin) + dlo * err_d));
    }
    return out;
}

std::vector<BoundRecord> ball_ellipse_bounds(const PotentialField& u, const Vec2& p, double beta, double alpha,
                                             const GeodesicField& from_p) {
    std::vector<BoundRecord> out;
    if (!(beta < alpha)) {
        out.push_back(skipped_record("ball_inner_ellipse", p, "radius not below the boundary distance"));
        return out;
    }
    double sa = std::sinh(alpha);
    double c = std::sinh(alpha - beta) / sa, C = std::sinh(alpha + beta) / sa;
    Mat2 H = u.hessian(p);
    double err = distance_error(u, p, beta);

    double worst_in = -kInf, worst_out = -kInf, area = 0.0;
    Vec2 at_in = p, at_out = p;
    for (int j = 0; j < from_p.ny; ++j)
        for (int i = 0; i < from_p.nx; ++i) {
            double D = from_p.at(i, j);
            if (!std::isfinite(D)) continue;
            Vec2 x = from_p.node(i, j);
            double Q = std::sqrt((x - p).dot(H * (x - p)));
            if (Q <= c * beta && D - beta > worst_in) {
                worst_in = D - beta;
                at_in = x;
            }
            if (D <= beta) {
                area += from_p.h * from_p.h;
                if (Q - C * beta > worst_out) {
                    worst_out = Q - C * beta;
                    at_out = x;
                }
            }
        }
    // inner ellipse nodes lie in the metric ball: D <= beta
    out.push_back(make_record("ball_inner_ellipse", at_in, beta + std::max(worst_in, -beta), beta, err));
    // ball nodes lie in the outer ellipse: Q <= C beta
    out.push_back(make_record("ball_outer_ellipse", at_out, C * beta + std::max(worst_out, -C * beta), C * beta,
                              C * err));
    double lower = M_PI * c * c * beta * beta / std::sqrt(H.determinant());
    Eigen::SelfAdjointEigenSolver<Mat2> es(H);
    double major = C * beta / std::sqrt(es.eigenvalues().minCoeff());
    double area_err = 2.0 * M_PI * major * from_p.h + 2.0 * kStencilAngularError * area;
    out.push_back(make_record("ball_area", p, lower, area, area_err));
    return out;
}

int BoundLedger::checked() const {
    int n = 0;
    for (const auto& r : records) n += !r.skipped;
    return n;
}

int BoundLedger::failures() const {
    int n = 0;
    for (const auto& r : records) n += !r.skipped && !r.pass;
    return n;
}

int BoundLedger::skipped() const {
    int n = 0;
    for (const auto& r : records) n += r.skipped;
    return n;
}

BoundLedger bound_suite(const PotentialField& u, double M, const BoundOptions& opt) {
    BoundLedger led;
    led.records = slice_curvature_bounds(u);

    double Fmax = 0.0;
    for (const auto& s : tensor_samples(u).nodes) Fmax = std::max(Fmax, std::sqrt(s.c.absF2));
    bool flat_enough = Fmax <= 1.0 + opt.curvature_tol;
    std::string why = "max |F| = " + std::to_string(Fmax) + " on the lattice";

    const WeightedPolygon& P = u.domain;
    double h = u.correction.h;
    ScanBox bb = bounding_box(P);
    std::vector<Vec2> base;
    int n = opt.samples;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            Vec2 t((a + 0.5) / n, (b + 0.5) / n);
            Vec2 x = bb.lo + t.cwiseProduct(bb.hi - bb.lo);
            if (P.boundary_distance(x) > 2.0 * h) base.push_back(x);
        }

    GeodesicField to_bd = geodesic_distance(u, GeodesicSource::boundary(P));
    std::vector<GeodesicField> to_edge;
    if (flat_enough)
        for (int e : u.singular_edges) to_edge.push_back(geodesic_distance(u, GeodesicSource::edge(e)));

    for (size_t k = 0; k < base.size(); ++k) {
        const Vec2& p = base[k];
        double dbd = to_bd.distance_to(u, p);
        led.records.push_back(boundary_distance_bound(u, p, dbd, M));
        for (int m = 0; m < opt.directions; ++m) {
            double th = M_PI * m / opt.directions;
            Vec2 nu(std::cos(th), std::sin(th));
            double s = std::min(ray_exit(P, p, nu), ray_exit(P, p, -nu));
            led.records.push_back(midpoint_segment_bound(u, p, p + s * nu, M));
            if (flat_enough)
                led.records.push_back(directional_hessian_bound(u, p, nu, s / 3.0, M));
            else
                led.records.push_back(skipped_record("directional_hessian", p, why));
        }
        if (!flat_enough) {
            for (const char* name : {"edge_inverse_hessian", "edge_defining_function", "inverse_hessian_upper",
                                     "ball_inner_ellipse"})
                led.records.push_back(skipped_record(name, p, why));
            continue;
        }
        for (size_t e = 0; e < to_edge.size(); ++e) {
            double d = to_edge[e].distance_to(u, p);
            led.records.push_back(edge_inverse_hessian_bound(u, p, u.singular_edges[e], d));
            led.records.push_back(edge_defining_function_bound(u, p, u.singular_edges[e], d));
        }
    }

    // comparison and ball checks from a few central base points
    if (flat_enough) {
        std::vector<Vec2> centres = base;
        std::sort(centres.begin(), centres.end(), [&](const Vec2& a, const Vec2& b) {
            return P.boundary_distance(a) > P.boundary_distance(b);
        });
        centres.resize(std::min<size_t>(centres.size(), 3));
        for (const auto& p : centres) {
            // a lower bound on the true distance keeps the hypothesis dist >= alpha valid
            double alpha = to_bd.distance_to(u, p) / (1.0 + stencil_error_factor(u.hessian(p)));
            GeodesicField from_p = geodesic_distance(u, GeodesicSource::at(p));
            for (const auto& q : base) {
                if ((q - p).norm() < 1e-12) continue;
                double d = from_p.distance_to(u, q);
                auto recs = inverse_hessian_comparison(u, p, q, alpha, d);
                led.records.insert(led.records.end(), recs.begin(), recs.end());
            }
            for (double f : {0.25, 0.5}) {
                auto recs = ball_ellipse_bounds(u, p, f * alpha, alpha, from_p);
                led.records.insert(led.records.end(), recs.begin(), recs.end());
            }
        }
    }
    return led;
}

// ----------------------------------------------------------- volume growth

VolumeTable volume_growth(const PotentialField& u, const std::vector<double>& taus) {
    if (u.terms.size() != 2) throw std::invalid_argument("volume growth needs a potential with two log terms");
    Affine sum{u.terms[0].c0 + u.terms[1].c0, u.terms[0].g + u.terms[1].g};
    Mat2 Ls;
    Ls.row(0) = u.terms[0].g.transpose();
    Ls.row(1) = u.terms[1].g.transpose();
    Vec2 vertex = Ls.lu().solve(Vec2(-u.terms[0].c0, -u.terms[1].c0));

    GeodesicField from_v = geodesic_distance(u, GeodesicSource::at(vertex));
    VolumeTable t;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
        std::vector<Vec2> reg = clip_polygon(u.domain.vertices, Affine{tau - sum.c0, -sum.g});
        if (reg.size() != 3) throw std::invalid_argument("truncation too small for the requested tau");
        VolumeRow row;
        row.tau = tau;
        row.area = signed_area(reg);
        row.volume = 4.0 * M_PI * M_PI * row.area;
        for (int j = 0; j < from_v.ny; ++j)
            for (int i = 0; i < from_v.nx; ++i) {
                double D = from_v.at(i, j);
                if (std::isfinite(D) && sum(from_v.node(i, j)) <= tau) row.max_distance = std::max(row.max_distance, D);
            }
        t.rows.push_back(row);
    }
    if (t.rows.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double m = static_cast<double>(t.rows.size());
        for (const auto& r : t.rows) {
            double x = std::log(r.max_distance), y = std::log(r.volume);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        t.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return t;
}

}  // namespace abreu
