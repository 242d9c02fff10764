#include "abreu/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace abreu {

const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex guard;
    std::lock_guard<std::mutex> lock(guard);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    // Jacobi matrix of the Legendre recurrence on [-1, 1]
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int k = 0; k < order; ++k) {
        double v0 = es.eigenvectors()(0, k);
        rule.nodes[k] = 0.5 * (es.eigenvalues()(k) + 1.0);
        rule.weights[k] = v0 * v0;  // 2 v0^2 on [-1, 1], halved for [0, 1]
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 vertex_centroid_fan_apex(const std::vector<Vec2>& poly) {
    Vec2 c = Vec2::Zero();
    for (const auto& v : poly) c += v;
    return c / static_cast<double>(poly.size());
}

// x(s, r) = c + s ((a - c) + r (b - a)), Jacobian s |det|
template <class Map>
double triangle_integral(const Vec2& c, const Vec2& a, const Vec2& b, const PointFn& f,
                         const GaussRule& g, Map grade) {
    double det = std::abs(cross(a - c, b - a));
    double sum = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        auto [s, ds] = grade.s(g.nodes[i]);
        for (size_t j = 0; j < g.nodes.size(); ++j) {
            auto [r, dr] = grade.r(g.nodes[j]);
            Vec2 x = c + s * ((a - c) + r * (b - a));
            sum += g.weights[i] * g.weights[j] * ds * dr * s * f(x);
        }
    }
    return sum * det;
}

struct Plain {
    std::pair<double, double> s(double t) const { return {t, 1.0}; }
    std::pair<double, double> r(double t) const { return {t, 1.0}; }
};

// s = 1 - (1 - t)^3 clusters nodes at the boundary edge; r uses a symmetric
// cubic clustering at both boundary vertices.
struct Graded {
    std::pair<double, double> s(double t) const {
        double w = 1.0 - t;
        return {1.0 - w * w * w, 3.0 * w * w};
    }
    std::pair<double, double> r(double t) const {
        double a = t * t * t, b = (1 - t) * (1 - t) * (1 - t);
        double den = a + b;
        double da = 3 * t * t, db = -3 * (1 - t) * (1 - t);
        return {a / den, (da * den - a * (da + db)) / (den * den)};
    }
};

}  // namespace

double area_integral(const std::vector<Vec2>& poly, const PointFn& f, int order) {
    const GaussRule& g = gauss_legendre(order);
    Vec2 c = vertex_centroid_fan_apex(poly);
    double sum = 0.0;
    int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k)
        sum += triangle_integral(c, poly[k], poly[(k + 1) % n], f, g, Plain{});
    return sum;
}

double area_integral(const WeightedPolygon& p, const PointFn& f, int order) {
    const GaussRule& g = gauss_legendre(order);
    Vec2 c = p.centroid();
    double sum = 0.0;
    for (int k = 0; k < p.size(); ++k)
        sum += triangle_integral(c, p.vertex(k), p.vertex(k + 1), f, g, Plain{});
    return sum;
}

double graded_area_integral(const WeightedPolygon& p, const PointFn& f, int order) {
    const GaussRule& g = gauss_legendre(order);
    Vec2 c = p.centroid();
    double sum = 0.0;
    for (int k = 0; k < p.size(); ++k)
        sum += triangle_integral(c, p.vertex(k), p.vertex(k + 1), f, g, Graded{});
    return sum;
}

double boundary_integral(const WeightedPolygon& p, const PointFn& f, int order) {
    const GaussRule& g = gauss_legendre(order);
    double sum = 0.0;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 a = p.edge_start(e), b = p.edge_end(e);
        double edge = 0.0;
        for (size_t i = 0; i < g.nodes.size(); ++i) edge += g.weights[i] * f(a + g.nodes[i] * (b - a));
        sum += edge * p.weights[e];  // density * length
    }
    return sum;
}

double graded_boundary_integral(const WeightedPolygon& p, const PointFn& f, int order, int panels) {
    const GaussRule& g = gauss_legendre(order);
    double sum = 0.0;
    for (int e = 0; e < p.size(); ++e) {
        Vec2 a = p.edge_start(e), b = p.edge_end(e);
        double edge = 0.0;
        for (int k = 0; k < panels; ++k) {
            for (size_t i = 0; i < g.nodes.size(); ++i) {
                double tau = g.nodes[i];
                double t = tau * tau * (3.0 - 2.0 * tau);
                double dt = 6.0 * tau * (1.0 - tau);
                double s = (k + t) / panels;
                edge += g.weights[i] * dt * f(a + s * (b - a)) / panels;
            }
        }
        sum += edge * p.weights[e];
    }
    return sum;
}

double segment_length(const std::function<Mat2(const Vec2&)>& hessian, const Vec2& a,
                      const Vec2& b, int order) {
    const GaussRule& g = gauss_legendre(order);
    Vec2 d = b - a;
    double sum = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        // t = 3 tau^2 - 2 tau^3 flattens both endpoints
        double tau = g.nodes[i];
        double t = tau * tau * (3.0 - 2.0 * tau);
        double dt = 6.0 * tau * (1.0 - tau);
        Mat2 H = hessian(a + t * d);
        sum += g.weights[i] * dt * std::sqrt(std::max(0.0, d.dot(H * d)));
    }
    return sum;
}

}  // namespace abreu
