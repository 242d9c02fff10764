#include "abreu/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "abreu/quadrature.hpp"

namespace abreu {

Jet& Jet::operator+=(const Jet& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    for (int k = 0; k < 2; ++k) {
        d3[k] += o.d3[k];
        for (int l = 0; l < 2; ++l) d4[k][l] += o.d4[k][l];
    }
    return *this;
}

// ---------------------------------------------------------------- lattice

Lattice Lattice::covering(const WeightedPolygon& p, int n) {
    if (n < 5) throw std::invalid_argument("grid needs at least 5 nodes per side");
    Vec2 lo = p.vertices.front(), hi = p.vertices.front();
    for (const auto& v : p.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    Vec2 ext = hi - lo;
    Lattice L;
    L.h = std::max(ext.x(), ext.y()) / (n - 1);
    L.nx = static_cast<int>(std::lround(ext.x() / L.h)) + 1;
    L.ny = static_cast<int>(std::lround(ext.y() / L.h)) + 1;
    L.x0 = lo.x();
    L.y0 = lo.y();
    L.f.assign(static_cast<size_t>(L.nx) * L.ny, 0.0);
    return L;
}

double Lattice::at(int i, int j) const {
    auto raw = [&](int a, int b) { return f[index(a, b)]; };
    auto row = [&](int b) {
        if (i < 0) return raw(0, b) + i * (raw(1, b) - raw(0, b));
        if (i >= nx) return raw(nx - 1, b) + (i - nx + 1) * (raw(nx - 1, b) - raw(nx - 2, b));
        return raw(i, b);
    };
    if (j < 0) return row(0) + j * (row(1) - row(0));
    if (j >= ny) return row(ny - 1) + (j - ny + 1) * (row(ny - 1) - row(ny - 2));
    return row(j);
}

namespace {

// centred 1D stencils on offsets -2..2
constexpr double kStencil[5][5] = {
    {0, 0, 1, 0, 0},
    {0, -0.5, 0, 0.5, 0},
    {0, 1, -2, 1, 0},
    {-0.5, 1, 0, -1, 0.5},
    {1, -4, 6, -4, 1},
};

// Fourth-order accurate centred stencils, offsets -3..3.
constexpr double kStencil4[5][7] = {
    {0, 0, 0, 1, 0, 0, 0},
    {0, 1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12, 0},
    {0, -1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0},
    {1.0 / 8, -1.0, 13.0 / 8, 0, -13.0 / 8, 1.0, -1.0 / 8},
    {-1.0 / 6, 2.0, -6.5, 56.0 / 6, -6.5, 2.0, -1.0 / 6},
};

}  // namespace

double Lattice::diff(int i, int j, int p, int q, int accuracy) const {
    double s = 0.0;
    const int w = accuracy == 4 ? 7 : 5, r = w / 2;
    auto weight = [&](int order, int a) { return accuracy == 4 ? kStencil4[order][a] : kStencil[order][a]; };
    for (int a = 0; a < w; ++a) {
        double wa = weight(p, a);
        if (wa == 0.0) continue;
        for (int b = 0; b < w; ++b) {
            double wb = weight(q, b);
            if (wb == 0.0) continue;
            s += wa * wb * at(i + a - r, j + b - r);
        }
    }
    return s / std::pow(h, p + q);
}

Jet Lattice::node_jet(int i, int j, int accuracy) const {
    Jet J;
    J.value = at(i, j);
    J.grad = {diff(i, j, 1, 0, accuracy), diff(i, j, 0, 1, accuracy)};
    double d[5][5];  // d[p][q] for p + q in {2, 3, 4}
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q) d[p][q] = (p + q >= 2) ? diff(i, j, p, q, accuracy) : 0.0;
    auto pick = [&](std::initializer_list<int> idx) {
        int p = 0, q = 0;
        for (int k : idx) (k == 0 ? p : q)++;
        return d[p][q];
    };
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            J.hess(a, b) = pick({a, b});
            for (int k = 0; k < 2; ++k) {
                J.d3[k](a, b) = pick({a, b, k});
                for (int l = 0; l < 2; ++l) J.d4[k][l](a, b) = pick({a, b, k, l});
            }
        }
    return J;
}

namespace {

// Keys cubic convolution kernel, a = -1/2, and its derivative
double keys(double t) {
    t = std::abs(t);
    if (t <= 1) return (1.5 * t - 2.5) * t * t + 1;
    if (t < 2) return ((-0.5 * t + 2.5) * t - 4) * t + 2;
    return 0.0;
}

double keys_d(double t) {
    double s = t < 0 ? -1.0 : 1.0;
    t = std::abs(t);
    if (t <= 1) return s * (4.5 * t - 5) * t;
    if (t < 2) return s * ((-1.5 * t + 5) * t - 4);
    return 0.0;
}

}  // namespace

double Lattice::bicubic(const Vec2& x, Vec2* grad) const {
    double sx = (x.x() - x0) / h, sy = (x.y() - y0) / h;
    int i = static_cast<int>(std::floor(sx)), j = static_cast<int>(std::floor(sy));
    double tx = sx - i, ty = sy - j;
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int m = -1; m <= 2; ++m) {
        double wx = keys(tx - m), dwx = keys_d(tx - m);
        for (int n = -1; n <= 2; ++n) {
            double wy = keys(ty - n), dwy = keys_d(ty - n);
            double f0 = at(i + m, j + n);
            v += wx * wy * f0;
            gx += dwx * wy * f0;
            gy += wx * dwy * f0;
        }
    }
    if (grad) *grad = Vec2(gx, gy) / h;
    return v;
}

// -------------------------------------------------------------- curvature

Curvature curvature(const Jet& j, const Vec2& where) {
    Curvature c;
    c.H = j.hess;
    c.det = c.H.determinant();
    if (!(c.H(0, 0) > 0.0) || !(c.det > 0.0) || !std::isfinite(c.det)) {
        std::ostringstream os;
        os << "Hessian not positive definite at (" << where.x() << ", " << where.y() << ")";
        throw ConvexityError(os.str(), where);
    }
    c.G = c.H.inverse();
    Mat2Pair GdG;
    for (int k = 0; k < 2; ++k) {
        GdG[k] = c.G * j.d3[k];
        c.dG[k] = -GdG[k] * c.G;
    }
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            c.F[k][l] = (GdG[k] * GdG[l] + GdG[l] * GdG[k] - c.G * j.d4[k][l]) * c.G;
    c.abreu = c.F[0][0](0, 0) + c.F[0][1](0, 1) + c.F[1][0](1, 0) + c.F[1][1](1, 1);

    // |F|^2 = F^ij_kl F^ab_cd u_ia u_jb u^kc u^ld
    double s = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            Mat2 HFH = c.H * c.F[k][l] * c.H;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    s += c.G(k, a) * c.G(l, b) * (c.F[a][b].transpose() * HFH).trace();
        }
    c.absF2 = std::max(0.0, s);

    double h11 = c.H(0, 0), t3 = j.d3[0](0, 0), t4 = j.d4[0][0](0, 0);
    c.lemma3_lhs = 2.0 * t3 * t3 / (h11 * h11 * h11) - t4 / (h11 * h11);
    return c;
}

// -------------------------------------------------------------- potential

Jet PotentialField::analytic_jet(const Vec2& x) const {
    Jet J;
    for (const auto& t : terms) {
        double lam = t(x);
        if (!(lam > 0.0)) {
            std::ostringstream os;
            os << "point (" << x.x() << ", " << x.y() << ") is not inside the domain";
            throw ConvexityError(os.str(), x);
        }
        const Vec2& a = t.g;
        double L = std::log(lam);
        J.value += lam * L;
        J.grad += a * (L + 1.0);
        Mat2 aa = a * a.transpose();
        J.hess += aa / lam;
        for (int k = 0; k < 2; ++k) {
            J.d3[k] -= a[k] * aa / (lam * lam);
            for (int l = 0; l < 2; ++l) J.d4[k][l] += 2.0 * a[k] * a[l] * aa / (lam * lam * lam);
        }
    }
    J.value += 0.5 * x.dot(quad * x) + lin.dot(x) + konst;
    J.grad += quad * x + lin;
    J.hess += quad;
    return J;
}

Jet PotentialField::node_jet(int i, int j) const {
    Jet J = analytic_jet(correction.node(i, j));
    if (corrected) J += correction.node_jet(i, j);
    return J;
}

Jet PotentialField::jet(const Vec2& x) const {
    Jet J = analytic_jet(x);
    if (!corrected) return J;
    const Lattice& L = correction;
    double sx = (x.x() - L.x0) / L.h, sy = (x.y() - L.y0) / L.h;
    int i = static_cast<int>(std::floor(sx)), j = static_cast<int>(std::floor(sy));
    double tx = sx - i, ty = sy - j;
    Jet c;
    const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    const int di[4] = {0, 1, 0, 1}, dj[4] = {0, 0, 1, 1};
    for (int k = 0; k < 4; ++k) {
        if (w[k] == 0.0) continue;
        Jet n = L.node_jet(i + di[k], j + dj[k]);
        c.hess += w[k] * n.hess;
        for (int a = 0; a < 2; ++a) {
            c.d3[a] += w[k] * n.d3[a];
            for (int b = 0; b < 2; ++b) c.d4[a][b] += w[k] * n.d4[a][b];
        }
    }
    c.value = L.bicubic(x, &c.grad);
    J += c;
    return J;
}

double PotentialField::value(const Vec2& x) const {
    return analytic_value(x) + (corrected ? correction.bicubic(x) : 0.0);
}

double PotentialField::analytic_value(const Vec2& x) const {
    double v = 0.5 * x.dot(quad * x) + lin.dot(x) + konst;
    for (const auto& t : terms) {
        double lam = t(x);
        if (lam > 0.0)
            v += lam * std::log(lam);
        else if (lam < -1e-12 * (1.0 + t.g.norm() * x.norm()))
            throw ConvexityError("value requested outside the domain", x);
    }
    return v;
}

Vec2 PotentialField::gradient(const Vec2& x) const {
    Vec2 g = quad * x + lin;
    for (const auto& t : terms) g += t.g * (std::log(t(x)) + 1.0);
    if (corrected) {
        Vec2 gc;
        correction.bicubic(x, &gc);
        g += gc;
    }
    return g;
}

Mat2 PotentialField::hessian(const Vec2& x) const { return jet(x).hess; }

std::vector<std::pair<int, int>> PotentialField::interior_nodes() const {
    std::vector<std::pair<int, int>> out;
    const double margin = 2.0 * correction.h * (1.0 - 1e-9);
    for (int j = 0; j < correction.ny; ++j)
        for (int i = 0; i < correction.nx; ++i)
            if (domain.boundary_distance(correction.node(i, j)) >= margin) out.emplace_back(i, j);
    return out;
}

void PotentialField::refresh() {
    corrected = false;
    for (double v : correction.f)
        if (v != 0.0) {
            corrected = true;
            break;
        }
}

void PotentialField::apply_pin() {
    if (!corrected) return;
    Vec2 g;
    double v = correction.bicubic(pin, &g);
    for (int j = 0; j < correction.ny; ++j)
        for (int i = 0; i < correction.nx; ++i)
            correction(i, j) -= v + g.dot(correction.node(i, j) - pin);
    refresh();
}

PotentialField guillemin_potential(const WeightedPolygon& p, int grid) {
    validate(p);
    PotentialField u;
    u.domain = p;
    for (int e = 0; e < p.size(); ++e) {
        u.terms.push_back(p.defining_function(e));
        u.singular_edges.push_back(e);
    }
    u.correction = Lattice::covering(p, grid);
    u.pin = p.centroid();
    return u;
}

TensorSamples tensor_samples(const PotentialField& u) {
    TensorSamples out;
    out.h = u.correction.h;
    for (auto [i, j] : u.interior_nodes()) {
        TensorSample s;
        s.i = i;
        s.j = j;
        s.x = u.correction.node(i, j);
        s.c = curvature(u.node_jet(i, j), s.x);
        out.nodes.push_back(std::move(s));
    }
    return out;
}

// ----------------------------------------------------------------- Legendre

VertexChart vertex_chart(const PotentialField& u, int vertex) {
    const WeightedPolygon& P = u.domain;
    Affine a = P.defining_function(vertex - 1), b = P.defining_function(vertex);
    VertexChart c;
    c.L.row(0) = a.g.transpose();
    c.L.row(1) = b.g.transpose();
    c.l0 = {a.c0, b.c0};
    return c;
}

Vec2 dual_coordinates(const PotentialField& u, const VertexChart& chart, const Vec2& x) {
    return chart.L.transpose().lu().solve(u.gradient(x));
}

LegendreValue legendre_transform(const PotentialField& u, const VertexChart& chart, const Vec2& eta,
                                 double tol, int max_iter) {
    Vec2 target = chart.L.transpose() * eta;
    auto psi = [&](const Vec2& x) { return target.dot(x) - u.value(x); };
    auto inside = [&](const Vec2& x) { return u.domain.boundary_distance(x) > 0.0; };

    // warm start: best lattice node
    Vec2 x = u.pin;
    double best = -std::numeric_limits<double>::infinity();
    const Lattice& L = u.correction;
    for (int j = 0; j < L.ny; ++j)
        for (int i = 0; i < L.nx; ++i) {
            Vec2 p = L.node(i, j);
            if (u.domain.boundary_distance(p) <= 0.5 * L.h) continue;
            double v = psi(p);
            if (v > best) {
                best = v;
                x = p;
            }
        }

    LegendreValue out;
    for (int it = 0; it < max_iter; ++it) {
        Vec2 r = target - u.gradient(x);
        if (r.norm() <= tol * (1.0 + target.norm())) {
            out.iterations = it;
            out.x = x;
            out.y = chart.to_chart(x);
            out.phi = out.y.dot(eta) - u.value(x);
            return out;
        }
        Vec2 step = u.hessian(x).ldlt().solve(r);
        double t = 1.0, f0 = psi(x);
        bool moved = false;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            Vec2 xn = x + t * step;
            if (inside(xn) && psi(xn) >= f0 - 1e-14 * (1.0 + std::abs(f0))) {
                x = xn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    throw std::out_of_range("dual point lies outside the gradient image of the potential");
}

double double_transform(const PotentialField& u, const VertexChart& chart, const Vec2& y, double tol) {
    Mat2 Linv = chart.L.inverse();
    Vec2 eta = dual_coordinates(u, chart, u.pin);
    for (int it = 0; it < 100; ++it) {
        LegendreValue lv = legendre_transform(u, chart, eta);
        Vec2 r = y - lv.y;
        if (r.norm() <= tol * (1.0 + y.norm())) return y.dot(eta) - lv.phi;
        // Hessian of phi is the inverse of the chart Hessian of u
        Mat2 Hy = Linv.transpose() * u.hessian(lv.x) * Linv;
        eta += Hy * r;
    }
    throw std::runtime_error("double transform did not converge");
}

// ---------------------------------------------------------------- rescaling

PotentialField rescale_potential(const PotentialField& u, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale factor must be positive");
    PotentialField v = u;
    v.domain = rescale_polygon(u.domain, lambda);
    double logl = std::log(lambda);
    // lambda * t(x/lambda) log t(x/lambda) = s log s - log(lambda) s, s = lambda t(x/lambda)
    v.quad = u.quad / lambda;
    v.konst = lambda * u.konst;
    for (auto& t : v.terms) {
        t.c0 *= lambda;
        v.lin -= logl * t.g;
        v.konst -= logl * t.c0;
    }
    v.correction.x0 *= lambda;
    v.correction.y0 *= lambda;
    v.correction.h *= lambda;
    for (auto& f : v.correction.f) f *= lambda;
    v.pin *= lambda;
    return v;
}

// ------------------------------------------------------------------- models

namespace {

WeightedPolygon box(double x0, double y0, double x1, double y1) {
    WeightedPolygon p;
    p.vertices = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    p.weights = {x1 - x0, y1 - y0, x1 - x0, y1 - y0};
    return p;
}

}  // namespace

PotentialField quarter_plane_model(double R, int grid) {
    if (!(R > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    PotentialField u;
    u.domain = box(0, 0, R, R);
    u.terms = {Affine{0.0, Vec2(1, 0)}, Affine{0.0, Vec2(0, 1)}};
    u.singular_edges = {0, 3};
    u.correction = Lattice::covering(u.domain, grid);
    u.pin = {0.5 * R, 0.5 * R};
    return u;
}

PotentialField half_plane_model(double R, int grid) {
    if (!(R > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    PotentialField u;
    u.domain = box(0, -R, R, R);
    u.terms = {Affine{0.0, Vec2(1, 0)}};
    u.quad(1, 1) = 1.0;
    u.singular_edges = {3};
    u.correction = Lattice::covering(u.domain, grid);
    u.pin = {0.5 * R, 0.0};
    return u;
}

PotentialField quadratic_model(const WeightedPolygon& b, int grid) {
    PotentialField u;
    u.domain = b;
    u.quad = Mat2::Identity();
    u.correction = Lattice::covering(b, grid);
    u.pin = b.centroid();
    return u;
}

// ------------------------------------------------------------------- energy

EnergyReport energy_nodes(const PotentialField& u) {
    EnergyReport r;
    double w = u.correction.h * u.correction.h;
    for (const auto& s : tensor_samples(u).nodes) {
        r.intF2 += w * s.c.absF2;
        r.intA2 += w * s.c.abreu * s.c.abreu;
    }
    r.invariant = r.intF2 - r.intA2;
    return r;
}

EnergyReport energy_quadrature(const PotentialField& u, int order) {
    // Analytic part by graded quadrature; the correction's change of the
    // integrands by the node rule, which avoids interpolating its jets.
    EnergyReport r;
    r.intF2 = graded_area_integral(
        u.domain, [&](const Vec2& x) { return curvature(u.analytic_jet(x), x).absF2; }, order);
    r.intA2 = graded_area_integral(
        u.domain,
        [&](const Vec2& x) {
            double a = curvature(u.analytic_jet(x), x).abreu;
            return a * a;
        },
        order);
    if (u.corrected) {
        double w = u.correction.h * u.correction.h;
        for (const auto& [i, j] : u.interior_nodes()) {
            Vec2 x = u.correction.node(i, j);
            Jet full = u.analytic_jet(x);
            full += u.correction.node_jet(i, j, 4);
            Curvature a = curvature(u.analytic_jet(x), x), c = curvature(full, x);
            r.intF2 += w * (c.absF2 - a.absF2);
            r.intA2 += w * (c.abreu * c.abreu - a.abreu * a.abreu);
        }
    }
    r.invariant = r.intF2 - r.intA2;
    return r;
}

}  // namespace abreu
