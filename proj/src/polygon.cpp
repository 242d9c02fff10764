#include "abreu/polygon.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "abreu/quadrature.hpp"

namespace abreu {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_scale(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, x.cwiseAbs().maxCoeff());
    return std::max(s, 1.0);
}

}  // namespace

ScalarField ScalarField::constant(double a) {
    ScalarField f;
    f.kind = Kind::Constant;
    f.coeffs = {a, 0.0, 0.0};
    return f;
}

ScalarField ScalarField::affine(double a0, double a1, double a2) {
    ScalarField f;
    f.kind = Kind::Affine;
    f.coeffs = {a0, a1, a2};
    return f;
}

ScalarField ScalarField::from_function(std::function<double(const Vec2&)> fn) {
    ScalarField f;
    f.kind = Kind::Sampled;
    f.sampled = std::move(fn);
    return f;
}

double ScalarField::operator()(const Vec2& x) const {
    if (kind == Kind::Sampled) return sampled(x);
    return coeffs[0] + coeffs[1] * x.x() + coeffs[2] * x.y();
}

const Vec2& WeightedPolygon::vertex(int i) const {
    int n = size();
    return vertices[((i % n) + n) % n];
}

double WeightedPolygon::edge_length(int i) const { return (edge_end(i) - edge_start(i)).norm(); }

Vec2 WeightedPolygon::inward_normal(int i) const {
    Vec2 t = (edge_end(i) - edge_start(i)).normalized();
    return {-t.y(), t.x()};  // left of the edge for CCW order
}

double WeightedPolygon::density(int i) const {
    int n = size();
    return weights[((i % n) + n) % n] / edge_length(i);
}

Affine WeightedPolygon::defining_function(int i) const {
    Vec2 n = inward_normal(i);
    double s = density(i);
    return {-n.dot(edge_start(i)) / s, n / s};
}

double WeightedPolygon::area() const {
    double a = 0.0;
    for (int i = 0; i < size(); ++i) a += cross(vertex(i), vertex(i + 1));
    return 0.5 * a;
}

Vec2 WeightedPolygon::centroid() const {
    Vec2 c = Vec2::Zero();
    double a = 0.0;
    for (int i = 0; i < size(); ++i) {
        double w = cross(vertex(i), vertex(i + 1));
        c += w * (vertex(i) + vertex(i + 1));
        a += w;
    }
    return c / (3.0 * a);
}

double WeightedPolygon::boundary_distance(const Vec2& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) d = std::min(d, inward_normal(i).dot(x - edge_start(i)));
    return d;
}

bool WeightedPolygon::contains(const Vec2& x, double tol) const { return boundary_distance(x) >= -tol; }

double WeightedPolygon::boundary_mass() const {
    double m = 0.0;
    for (double w : weights) m += w;
    return m;
}

void validate_vertices(const std::vector<Vec2>& v) {
    int n = static_cast<int>(v.size());
    if (n < 3) throw PolygonError("polygon needs at least 3 vertices", n);
    double scale = polygon_scale(v);
    double turning = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const Vec2& c = v[(i + 2) % n];
        if (!a.allFinite()) throw PolygonError("non-finite vertex", i);
        if ((b - a).norm() <= 1e-14 * scale) throw PolygonError("repeated vertex", (i + 1) % n);
        double z = cross(b - a, c - b);
        if (z <= 1e-12 * scale * scale) {
            std::ostringstream os;
            os << "polygon not strictly convex and counter-clockwise at vertex " << (i + 1) % n;
            throw PolygonError(os.str(), (i + 1) % n);
        }
        turning += std::atan2(z, (b - a).dot(c - b));
    }
    if (std::abs(turning - 2.0 * M_PI) > 1e-6) throw PolygonError("polygon winds more than once", 0);
}

void validate(const WeightedPolygon& p) {
    validate_vertices(p.vertices);
    if (p.weights.size() != p.vertices.size())
        throw PolygonError("weight count differs from edge count", static_cast<int>(p.weights.size()));
    for (int i = 0; i < p.size(); ++i)
        if (!(p.weights[i] > 0.0) || !std::isfinite(p.weights[i]))
            throw PolygonError("edge weight must be positive and finite", i);
}

WeightedPolygon canonical_weights(const std::vector<Vec2>& vertices) {
    validate_vertices(vertices);
    WeightedPolygon p;
    p.vertices = vertices;
    p.weights.assign(vertices.size(), 0.0);
    Vec2 c = p.centroid();
    for (int i = 0; i < p.size(); ++i)
        p.weights[i] = 0.5 * cross(p.vertex(i) - c, p.vertex(i + 1) - c);
    return p;
}

BalanceReport balance_report(const WeightedPolygon& p, const ScalarField& A) {
    int order = A.is_affine() ? 4 : 12;
    BalanceReport r;
    r.boundary_mass = boundary_integral(p, [](const Vec2&) { return 1.0; });
    double bx = boundary_integral(p, [](const Vec2& x) { return x.x(); });
    double by = boundary_integral(p, [](const Vec2& x) { return x.y(); });
    r.area_mass = area_integral(p, [&](const Vec2& x) { return A(x); }, order);
    double ax = area_integral(p, [&](const Vec2& x) { return A(x) * x.x(); }, order);
    double ay = area_integral(p, [&](const Vec2& x) { return A(x) * x.y(); }, order);
    r.boundary_centroid = Vec2(bx, by) / r.boundary_mass;
    r.weighted_centroid = r.area_mass != 0.0 ? Vec2(Vec2(ax, ay) / r.area_mass) : Vec2(Vec2::Zero());
    r.residual = {r.boundary_mass - r.area_mass, bx - ax, by - ay};
    return r;
}

ScalarField unique_affine_A(const WeightedPolygon& p) {
    // Moments about the centroid keep the system well scaled.
    Vec2 c = p.centroid();
    auto basis = [&](const Vec2& x, int k) { return k == 0 ? 1.0 : (x - c)[k - 1]; };
    Eigen::Matrix3d M;
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) {
        b[i] = boundary_integral(p, [&](const Vec2& x) { return basis(x, i); });
        for (int j = 0; j < 3; ++j)
            M(i, j) = area_integral(p, [&](const Vec2& x) { return basis(x, i) * basis(x, j); }, 4);
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
    if (!lu.isInvertible()) throw PolygonError("singular moment matrix");
    Eigen::Vector3d a = lu.solve(b);
    // back to a0 + a1 x + a2 y
    double a0 = a[0] - a[1] * c.x() - a[2] * c.y();
    double scale = std::max(1.0, std::abs(a[0]));
    if (std::abs(a[1]) <= 1e-12 * scale && std::abs(a[2]) <= 1e-12 * scale)
        return ScalarField::constant(a[0]);
    return ScalarField::affine(a0, a[1], a[2]);
}

double mu_invariant(const WeightedPolygon& p) {
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < p.size(); ++e) {
        Vec2 v0 = p.edge_start(e), v1 = p.edge_end(e);
        double len = p.edge_length(e);
        for (int f = 0; f < p.size(); ++f) {
            if (f == e) continue;
            Affine lam = p.defining_function(f);
            double l0 = lam(v0), l1 = lam(v1), lm = lam(0.5 * (v0 + v1));
            double tol = 1e-12 * (std::abs(l0) + std::abs(l1) + std::abs(lm) + 1.0);
            // lambda / d is monotone on each half of the edge, so the infimum sits
            // at the midpoint or at an endpoint limit where lambda vanishes.
            best = std::min(best, lm / (0.5 * len));
            if (std::abs(l0) <= tol) best = std::min(best, l1 / len);
            if (std::abs(l1) <= tol) best = std::min(best, l0 / len);
        }
    }
    return best;
}

double mu_invariant_sampled(const WeightedPolygon& p, int samples) {
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < p.size(); ++e) {
        Vec2 v0 = p.edge_start(e), v1 = p.edge_end(e);
        double len = p.edge_length(e);
        for (int k = 0; k < samples; ++k) {
            double t = (k + 0.5) / samples;
            Vec2 q = v0 + t * (v1 - v0);
            double d = std::min(t, 1.0 - t) * len;
            for (int f = 0; f < p.size(); ++f)
                if (f != e) best = std::min(best, p.defining_function(f)(q) / d);
        }
    }
    return best;
}

WeightedPolygon corner_cut(const WeightedPolygon& p, int k, double eps) {
    validate(p);
    int n = p.size();
    if (k < 0 || k >= n) throw PolygonError("vertex index out of range", k);
    if (eps < 0.0) throw PolygonError("cut depth must be nonnegative", k);
    if (eps == 0.0) return p;

    int ep = (k - 1 + n) % n, en = k;
    Affine lp = p.defining_function(ep), ln = p.defining_function(en);
    Vec2 v = p.vertex(k), vprev = p.vertex(k - 1), vnext = p.vertex(k + 1);
    // along the previous edge only lambda_next varies, and vice versa
    double sp = eps / ln(vprev);
    double sn = eps / lp(vnext);
    if (sp >= 1.0) {
        std::ostringstream os;
        os << "cut depth too large: passes the far end of edge " << ep;
        throw PolygonError(os.str(), ep);
    }
    if (sn >= 1.0) {
        std::ostringstream os;
        os << "cut depth too large: passes the far end of edge " << en;
        throw PolygonError(os.str(), en);
    }
    Vec2 a = v + sp * (vprev - v);
    Vec2 b = v + sn * (vnext - v);
    double mass_p = p.density(ep) * (a - v).norm();
    double mass_n = p.density(en) * (b - v).norm();
    double m = mass_n;
    if (std::abs(mass_p - mass_n) > 1e-9 * (mass_p + mass_n))
        throw PolygonError("removed edge masses disagree", k);

    WeightedPolygon q;
    for (int i = 0; i < n; ++i) {
        if (i == k) {
            q.vertices.push_back(a);
            q.weights.push_back(m);
            q.vertices.push_back(b);
            q.weights.push_back(p.density(en) * (vnext - b).norm());
        } else {
            q.vertices.push_back(p.vertex(i));
            q.weights.push_back(i == ep ? p.density(ep) * (a - vprev).norm() : p.weights[i]);
        }
    }
    validate(q);
    return q;
}

RebalanceResult rebalance(const WeightedPolygon& p, int ef, int eg, double tol, int max_iter) {
    validate(p);
    if (ef == eg) throw PolygonError("rebalance needs two distinct edges", eg);
    if (ef < 0 || ef >= p.size()) throw PolygonError("edge index out of range", ef);
    if (eg < 0 || eg >= p.size()) throw PolygonError("edge index out of range", eg);

    Vec2 c = p.centroid();
    auto moment = [&](int e) { return Vec2(0.5 * (p.edge_start(e) + p.edge_end(e)) - c); };
    // v(lambda, mu) = sum_E sigma_E (m_E - c); zero iff A_sigma is constant
    auto residual = [&](double lam, double mu) {
        Vec2 v = Vec2::Zero();
        for (int e = 0; e < p.size(); ++e) {
            double s = p.weights[e] * (e == ef ? lam : e == eg ? mu : 1.0);
            v += s * moment(e);
        }
        return v;
    };
    Mat2 J;
    J.col(0) = p.weights[ef] * moment(ef);
    J.col(1) = p.weights[eg] * moment(eg);
    double scale = J.cwiseAbs().maxCoeff();
    if (std::abs(J.determinant()) <= 1e-10 * scale * scale)
        throw PolygonError("centroid map is rank deficient for this edge pair; choose different edges", eg);

    RebalanceResult out;
    double lam = 1.0, mu = 1.0;
    double ref = p.boundary_mass() * polygon_scale(p.vertices);
    Vec2 r = residual(lam, mu);
    int it = 0;
    while (r.norm() > tol * ref && it < max_iter) {
        Vec2 step = J.partialPivLu().solve(-r);
        double damp = 1.0;
        // keep both scale factors positive
        while ((lam + damp * step[0] <= 0.0 || mu + damp * step[1] <= 0.0) && damp > 1e-6) damp *= 0.5;
        lam += damp * step[0];
        mu += damp * step[1];
        r = residual(lam, mu);
        ++it;
    }
    if (lam <= 0.0 || mu <= 0.0 || r.norm() > tol * ref)
        throw PolygonError("rebalance found no positive scaling for this edge pair", eg);
    out.polygon = p;
    out.polygon.weights[ef] *= lam;
    out.polygon.weights[eg] *= mu;
    out.lambda = lam;
    out.mu = mu;
    out.iterations = it;
    out.residual = r.norm() / ref;
    return out;
}

WeightedPolygon balance_weights(const WeightedPolygon& p, const ScalarField& A) {
    validate(p);
    if (!A.is_affine()) throw PolygonError("balance_weights needs a constant or affine A");
    int n = p.size();
    Vec2 c = p.centroid();
    Eigen::MatrixXd M(3, n);
    for (int e = 0; e < n; ++e) {
        Vec2 m = 0.5 * (p.edge_start(e) + p.edge_end(e)) - c;
        M.col(e) << 1.0, m.x(), m.y();
    }
    Eigen::Vector3d target;
    target[0] = area_integral(p, [&](const Vec2& x) { return A(x); }, 4);
    target[1] = area_integral(p, [&](const Vec2& x) { return A(x) * (x - c).x(); }, 4);
    target[2] = area_integral(p, [&](const Vec2& x) { return A(x) * (x - c).y(); }, 4);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(p.weights.data(), n);
    Eigen::Vector3d gap = target - M * w;
    Eigen::VectorXd dw = M.transpose() * (M * M.transpose()).ldlt().solve(gap);
    WeightedPolygon q = p;
    for (int e = 0; e < n; ++e) {
        q.weights[e] = w[e] + dw[e];
        if (!(q.weights[e] > 0.0)) throw PolygonError("balancing drives an edge weight nonpositive", e);
    }
    return q;
}

namespace {

ScalarField lerp(const ScalarField& a, const ScalarField& b, double s) {
    Eigen::Vector3d c = (1.0 - s) * a.coeffs + s * b.coeffs;
    if (a.kind == ScalarField::Kind::Constant && b.kind == ScalarField::Kind::Constant)
        return ScalarField::constant(c[0]);
    return ScalarField::affine(c[0], c[1], c[2]);
}

bool same_data(const WeightedPolygon& p, const ScalarField& A, const WeightedPolygon& q,
               const ScalarField& B) {
    for (int i = 0; i < p.size(); ++i) {
        if ((p.vertices[i] - q.vertices[i]).norm() > 1e-14) return false;
        if (std::abs(p.weights[i] - q.weights[i]) > 1e-14) return false;
    }
    return (A.coeffs - B.coeffs).norm() <= 1e-14;
}

bool same_vertices(const WeightedPolygon& p, const WeightedPolygon& q) {
    for (int i = 0; i < p.size(); ++i)
        if ((p.vertices[i] - q.vertices[i]).norm() > 1e-14) return false;
    return true;
}

}  // namespace

ContinuityPath continuity_path(const WeightedPolygon& from, const ScalarField& A_from,
                               const WeightedPolygon& to, const ScalarField& A_to, int steps,
                               double tol) {
    validate(from);
    validate(to);
    if (from.size() != to.size()) throw PolygonError("vertex counts differ along the path", to.size());
    if (steps < 2) throw PolygonError("a path needs at least two samples", steps);
    if (!A_from.is_affine() || !A_to.is_affine())
        throw PolygonError("path endpoints need constant or affine A");
    if (balance_report(from, A_from).residual.norm() > tol) throw PolygonError("start data is unbalanced", 0);
    if (balance_report(to, A_to).residual.norm() > tol) throw PolygonError("end data is unbalanced", 1);

    WeightedPolygon c0 = canonical_weights(from.vertices);
    WeightedPolygon c1 = canonical_weights(to.vertices);
    ScalarField one = ScalarField::constant(1.0);

    // Three legs: relax to canonical data, move the polygon, relax to the target.
    std::vector<std::function<PathSample(double)>> legs;
    if (!same_data(from, A_from, c0, one))
        legs.push_back([=](double s) {
            WeightedPolygon p = from;
            for (int i = 0; i < p.size(); ++i) p.weights[i] = (1 - s) * from.weights[i] + s * c0.weights[i];
            return PathSample{0.0, p, lerp(A_from, one, s)};
        });
    if (!same_vertices(from, to))
        legs.push_back([=](double s) {
            std::vector<Vec2> v(from.size());
            for (int i = 0; i < from.size(); ++i) v[i] = (1 - s) * from.vertices[i] + s * to.vertices[i];
            return PathSample{0.0, canonical_weights(v), one};
        });
    if (!same_data(c1, one, to, A_to))
        legs.push_back([=](double s) {
            WeightedPolygon p = to;
            for (int i = 0; i < p.size(); ++i) p.weights[i] = (1 - s) * c1.weights[i] + s * to.weights[i];
            return PathSample{0.0, p, lerp(one, A_to, s)};
        });

    ContinuityPath path;
    for (int k = 0; k < steps; ++k) {
        double t = static_cast<double>(k) / (steps - 1);
        PathSample s;
        if (legs.empty()) {
            s = PathSample{t, from, A_from};
        } else {
            double u = t * legs.size();
            int leg = std::min(static_cast<int>(u), static_cast<int>(legs.size()) - 1);
            s = legs[leg](u - leg);
        }
        s.t = t;
        validate(s.polygon);
        if (balance_report(s.polygon, s.A).residual.norm() > tol)
            throw PolygonError("path sample is unbalanced", k);
        path.samples.push_back(std::move(s));
    }
    return path;
}

WeightedPolygon rescale_polygon(const WeightedPolygon& p, double lambda) {
    if (!(lambda > 0.0)) throw PolygonError("rescale factor must be positive");
    WeightedPolygon q = p;
    for (auto& v : q.vertices) v *= lambda;
    for (auto& w : q.weights) w *= lambda;
    return q;
}

std::vector<Vec2> clip_polygon(const std::vector<Vec2>& poly, const Affine& h) {
    std::vector<Vec2> out;
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        double ha = h(a), hb = h(b);
        if (ha >= 0) out.push_back(a);
        if ((ha > 0 && hb < 0) || (ha < 0 && hb > 0)) out.push_back(a + (ha / (ha - hb)) * (b - a));
    }
    // drop repeated points left by vertices on the clip line
    std::vector<Vec2> clean;
    for (const auto& x : out)
        if (clean.empty() || x != clean.back()) clean.push_back(x);
    while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
    return clean;
}

double signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.x() * q.y() - p.y() * q.x();
    }
    return 0.5 * a;
}

WeightedPolygon square(double side) {
    WeightedPolygon p;
    p.vertices = {{0, 0}, {side, 0}, {side, side}, {0, side}};
    p.weights.assign(4, side);
    return p;
}

WeightedPolygon simplex() {
    WeightedPolygon p;
    p.vertices = {{0, 0}, {1, 0}, {0, 1}};
    p.weights = {1.0, 1.0, 1.0};
    return p;
}

}  // namespace abreu
