#include "abreu/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "abreu/quadrature.hpp"

namespace abreu {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Affine difference(const Affine& a, const Affine& b) { return {a.c0 - b.c0, a.g - b.g}; }

std::vector<Affine> unique_pieces(const std::vector<Affine>& in) {
    std::vector<Affine> out;
    for (const auto& p : in) {
        bool dup = false;
        for (const auto& q : out)
            if (p.c0 == q.c0 && p.g == q.g) dup = true;
        if (!dup) out.push_back(p);
    }
    return out;
}

// Parameters in (0, 1) along a -> b where two pieces swap order.
std::vector<double> breakpoints(const Vec2& a, const Vec2& b, const std::vector<Affine>& pieces) {
    std::vector<double> t = {0.0, 1.0};
    for (size_t i = 0; i < pieces.size(); ++i)
        for (size_t j = i + 1; j < pieces.size(); ++j) {
            Affine d = difference(pieces[i], pieces[j]);
            double da = d(a), db = d(b);
            if ((da < 0) != (db < 0) && da != db) {
                double s = da / (da - db);
                if (s > 0 && s < 1) t.push_back(s);
            }
        }
    std::sort(t.begin(), t.end());
    return t;
}

}  // namespace

// ------------------------------------------------------------ PL functions

double PLConvexFunction::operator()(const Vec2& x) const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) v = std::max(v, p(x));
    return v;
}

int PLConvexFunction::active(const Vec2& x) const {
    int best = 0;
    for (int k = 1; k < static_cast<int>(pieces.size()); ++k)
        if (pieces[k](x) > pieces[best](x)) best = k;
    return best;
}

PLConvexFunction PLConvexFunction::scaled(double s) const {
    PLConvexFunction f = *this;
    for (auto& p : f.pieces) {
        p.c0 *= s;
        p.g *= s;
    }
    return f;
}

PLConvexFunction PLConvexFunction::shifted(double c) const {
    PLConvexFunction f = *this;
    for (auto& p : f.pieces) p.c0 += c;
    return f;
}

std::pair<double, double> PLConvexFunction::range_on(const WeightedPolygon& p) const {
    std::vector<Vec2> cand = p.vertices;
    for (size_t i = 0; i < pieces.size(); ++i)
        for (size_t j = i + 1; j < pieces.size(); ++j) {
            Affine d = difference(pieces[i], pieces[j]);
            for (int e = 0; e < p.size(); ++e) {
                Vec2 a = p.edge_start(e), b = p.edge_end(e);
                double da = d(a), db = d(b);
                if ((da < 0) != (db < 0) && da != db) cand.push_back(a + (da / (da - db)) * (b - a));
            }
            for (size_t k = j + 1; k < pieces.size(); ++k) {
                Affine d2 = difference(pieces[i], pieces[k]);
                Mat2 M;
                M.row(0) = d.g.transpose();
                M.row(1) = d2.g.transpose();
                if (std::abs(M.determinant()) < 1e-14) continue;
                Vec2 x = M.lu().solve(Vec2(-d.c0, -d2.c0));
                if (p.contains(x)) cand.push_back(x);
            }
        }
    double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
    for (const auto& x : cand) {
        double v = (*this)(x);
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return {hi, lo};
}

bool PLConvexFunction::affine_on(const WeightedPolygon& p) const {
    for (const auto& k : pieces) {
        bool dominates = true;
        for (const auto& v : p.vertices)
            for (const auto& q : pieces)
                if (q(v) > k(v) + 1e-13 * (1.0 + std::abs(k(v)))) dominates = false;
        if (dominates) return true;
    }
    return false;
}

// ------------------------------------------------------------ L functional

double l_functional(const WeightedPolygon& p, const ScalarField& A, const ScalarFn& f, int order) {
    double bd = boundary_integral(p, f, order);
    double ar = area_integral(p, [&](const Vec2& x) { return A(x) * f(x); }, order);
    return bd - ar;
}

double boundary_term(const WeightedPolygon& p, const PLConvexFunction& f) {
    std::vector<Affine> pieces = unique_pieces(f.pieces);
    double sum = 0.0;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 a = p.edge_start(e), b = p.edge_end(e);
        std::vector<double> t = breakpoints(a, b, pieces);
        double edge = 0.0;
        for (size_t k = 0; k + 1 < t.size(); ++k)
            edge += (t[k + 1] - t[k]) * f(a + 0.5 * (t[k] + t[k + 1]) * (b - a));  // affine on the piece
        sum += edge * p.weights[e];
    }
    return sum;
}

double l_functional(const WeightedPolygon& p, const ScalarField& A, const PLConvexFunction& f) {
    std::vector<Affine> pieces = unique_pieces(f.pieces);
    int order = A.is_affine() ? 4 : 12;
    double area = 0.0;
    for (size_t k = 0; k < pieces.size(); ++k) {
        std::vector<Vec2> cell = p.vertices;
        for (size_t j = 0; j < pieces.size() && cell.size() >= 3; ++j)
            if (j != k) cell = clip_polygon(cell, difference(pieces[k], pieces[j]));
        if (cell.size() < 3 || signed_area(cell) <= 0.0) continue;
        const Affine& piece = pieces[k];
        area += area_integral(cell, [&](const Vec2& x) { return A(x) * piece(x); }, order);
    }
    return boundary_term(p, f) - area;
}

double polar_functional(const WeightedPolygon& p, const ScalarFn& f, int order, int panels) {
    const GaussRule& g = gauss_legendre(order);
    Vec2 c = p.centroid();
    double sum = 0.0;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 a = p.edge_start(e), b = p.edge_end(e);
        Vec2 n = p.inward_normal(e);
        double th0 = std::atan2((a - c).y(), (a - c).x());
        double span = std::atan2(cross(a - c, b - c), (a - c).dot(b - c));
        for (int k = 0; k < panels; ++k)
            for (size_t i = 0; i < g.nodes.size(); ++i) {
                double th = th0 + span * (k + g.nodes[i]) / panels;
                Vec2 d(std::cos(th), std::sin(th));
                double R = n.dot(a - c) / n.dot(d);  // ray from c meets the edge line
                sum += g.weights[i] * span / panels * f(c + R * d) * R * R;
            }
    }
    return sum / 6.0;
}

// ------------------------------------------------------------ probe family

namespace {

std::mt19937_64 member_rng(uint64_t seed, int k) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(k), 0x5eedu};
    return std::mt19937_64(seq);
}

Vec2 random_interior(const WeightedPolygon& p, std::mt19937_64& rng) {
    Vec2 lo = p.vertices.front(), hi = lo;
    for (const auto& v : p.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    double margin = 0.02 * (hi - lo).maxCoeff();
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
    for (;;) {
        Vec2 x(ux(rng), uy(rng));
        if (p.boundary_distance(x) > margin) return x;
    }
}

}  // namespace

PLConvexFunction probe_member(const WeightedPolygon& p, uint64_t seed, int k) {
    auto rng = member_rng(seed, k);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI), unit(-1.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 3);
    PLConvexFunction f;
    int type = kind(rng);
    if (type < 2) {
        // crease max(0, <a, x - q>) through an interior point
        double th = angle(rng);
        Vec2 a(std::cos(th), std::sin(th));
        Vec2 q = random_interior(p, rng);
        f.pieces = {Affine{0.0, Vec2::Zero()}, Affine{-a.dot(q), a}};
    } else {
        int m = std::uniform_int_distribution<int>(2, 4)(rng);
        for (int i = 0; i < m; ++i) {
            Vec2 a(unit(rng), unit(rng));
            Vec2 q = random_interior(p, rng);
            f.pieces.push_back(Affine{-a.dot(q), a});
        }
    }
    f = f.shifted(-f(p.centroid()));
    auto [hi, lo] = f.range_on(p);
    double sup = std::max(std::abs(hi), std::abs(lo));
    if (sup > 0.0) f = f.scaled(1.0 / sup);
    return f;
}

ProbeReport stability_probe(const WeightedPolygon& p, const ScalarField& A, int n, uint64_t seed,
                            const std::vector<PLConvexFunction>& extra) {
    if (n < 1) throw std::invalid_argument("probe family needs at least one member");
    ProbeReport r;
    r.n = n;
    r.seed = seed;
    r.min_L = std::numeric_limits<double>::infinity();
    int total = n + static_cast<int>(extra.size());
    for (int k = 0; k < total; ++k) {
        PLConvexFunction f = k < n ? probe_member(p, seed, k) : extra[k - n];
        if (f.affine_on(p)) {
            ++r.affine_skipped;
            continue;
        }
        double L = l_functional(p, A, f);
        if (L < r.min_L) {
            r.min_L = L;
            r.argmin = f;
            r.argmin_index = k;
        }
    }
    r.all_positive = r.min_L > 0.0;
    return r;
}

LambdaReport lambda_estimate(const WeightedPolygon& p, const ScalarField& A, const Vec2& p0, int n,
                             uint64_t seed) {
    if (!p.contains(p0) || p.boundary_distance(p0) <= 0.0)
        throw std::invalid_argument("base point must be interior");
    LambdaReport r;
    r.n = n;
    r.estimate = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        auto rng = member_rng(seed, k);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        std::uniform_int_distribution<int> count(1, 3);
        int m = k == 0 ? 1 : count(rng);
        PLConvexFunction f;
        f.pieces.push_back(Affine{0.0, Vec2::Zero()});
        for (int i = 0; i < m; ++i) {
            double th = angle(rng);
            Vec2 a(std::cos(th), std::sin(th));
            f.pieces.push_back(Affine{-a.dot(p0), a});
        }
        double sup = f.range_on(p).first;
        if (sup > 0.0) f = f.scaled(1.0 / sup);
        double L = l_functional(p, A, f);
        if (!(L > 1e-14)) continue;
        ++r.positive_members;
        double ratio = boundary_term(p, f) / L;
        if (ratio > r.estimate) {
            r.estimate = ratio;
            r.best_index = k;
        }
    }
    if (r.positive_members == 0)
        throw std::runtime_error("no probe member has L > 0; the data looks unstable");
    return r;
}

// ------------------------------------------------------------ F functional

namespace {

double chord_length(const WeightedPolygon& p, const Affine& lam, double t, double tol) {
    std::vector<Vec2> pts;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 a = p.edge_start(e), b = p.edge_end(e);
        double la = lam(a) - t, lb = lam(b) - t;
        if (std::abs(la) <= tol) pts.push_back(a);
        else if (std::abs(lb) > tol && (la < 0) != (lb < 0)) pts.push_back(a + (la / (la - lb)) * (b - a));
    }
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

// antiderivative of (alpha + beta t) log t, zero at t = 0
double prim(double alpha, double beta, double t) {
    if (t <= 0.0) return 0.0;
    double L = std::log(t);
    return alpha * (t * L - t) + beta * (0.5 * t * t * L - 0.25 * t * t);
}

}  // namespace

double integral_log_affine(const WeightedPolygon& p, const Affine& lam) {
    std::vector<double> levels;
    for (const auto& v : p.vertices) levels.push_back(lam(v));
    std::sort(levels.begin(), levels.end());
    if (levels.front() < -1e-12 * (1.0 + std::abs(levels.back())))
        throw std::invalid_argument("affine function is negative on the polygon");
    double tol = 1e-12 * (1.0 + std::abs(levels.back()));
    double grad = lam.g.norm();
    double sum = 0.0;
    for (size_t k = 0; k + 1 < levels.size(); ++k) {
        double t0 = std::max(0.0, levels[k]), t1 = levels[k + 1];
        if (t1 - t0 <= tol) continue;
        // chord length is linear in t between vertex levels; sample it inside
        // the interval to avoid the ambiguous endpoint where an edge is a level set
        double s0 = t0 + 0.25 * (t1 - t0), s1 = t0 + 0.75 * (t1 - t0);
        double c0 = chord_length(p, lam, s0, 0.0), c1 = chord_length(p, lam, s1, 0.0);
        double beta = (c1 - c0) / (s1 - s0);
        double alpha = c0 - beta * s0;
        sum += prim(alpha, beta, t1) - prim(alpha, beta, t0);
    }
    return sum / grad;
}

FunctionalValue f_functional(const PotentialField& u, const ScalarField& A) {
    const WeightedPolygon& P = u.domain;
    FunctionalValue out;

    // -int log det of the analytic part: log det = -sum log(term) + smooth
    double logs = 0.0;
    for (const auto& t : u.terms) logs += integral_log_affine(P, t);
    double smooth = graded_area_integral(P, [&](const Vec2& x) {
        Mat2 H = u.analytic_jet(x).hess;
        double prod = 1.0;
        for (const auto& t : u.terms) prod *= t(x);
        return std::log(H.determinant() * prod);
    });
    out.logdet_part = logs - smooth;

    // correction: lattice sum of the change in log det
    const Lattice& L = u.correction;
    if (u.corrected) {
        double w = L.h * L.h, s = 0.0;
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i) {
                Vec2 x = L.node(i, j);
                if (P.boundary_distance(x) <= 0.5 * L.h) continue;
                Mat2 Ha = u.analytic_jet(x).hess;
                Mat2 Hf = L.node_jet(i, j).hess;
                double d = (Ha + Hf).determinant();
                if (!(d > 0.0)) throw ConvexityError("Hessian degenerate in the functional", x);
                s += w * (std::log(d) - std::log(Ha.determinant()));
            }
        out.logdet_part -= s;
    }

    int panels = std::max(1, static_cast<int>(std::ceil(1.0 / L.h)));
    double bd = graded_boundary_integral(P, [&](const Vec2& x) { return u.value(x); }, 16, panels);
    double ar = graded_area_integral(P, [&](const Vec2& x) { return A(x) * u.value(x); });
    out.linear_part = bd - ar;
    out.value = out.logdet_part + out.linear_part;
    return out;
}

}  // namespace abreu
