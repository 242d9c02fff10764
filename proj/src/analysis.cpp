#include "abreu/analysis.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include "abreu/geometry.hpp"
#include "abreu/quadrature.hpp"

namespace abreu {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string vec(const Vec2& v) { return num(v.x()) + "," + num(v.y()); }

double safe_ratio(double a, double b) { return b != 0.0 ? a / b : kNaN; }

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void require_flat(const PotentialField& u, const std::vector<Vec2>& pts, double tol, const char* op) {
    double m = max_abreu(u, pts);
    if (!(m <= tol)) {
        std::ostringstream os;
        os << op << ": input is not scalar-flat (max |Abreu| = " << m << ", tolerance " << tol << ")";
        throw PreconditionError(os.str());
    }
}

std::vector<Vec2> rect_samples(const Vec2& lo, const Vec2& hi, int n) {
    std::vector<Vec2> out;
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            out.emplace_back(lo.x() + (hi.x() - lo.x()) * a / (n - 1), lo.y() + (hi.y() - lo.y()) * b / (n - 1));
    return out;
}

// Gauss-Legendre integral over [a, b].
double gl(const std::function<double(double)>& f, double a, double b, int order = 16, int panels = 1) {
    const GaussRule& g = gauss_legendre(order);
    double s = 0.0, w = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        for (size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * f(a + w * (p + g.nodes[k]));
    return s * w;
}

// Does u have log terms along both coordinate axes through the origin?
bool quarter_plane_like(const PotentialField& u) {
    bool ax = false, ay = false;
    for (const auto& t : u.terms) {
        if (t.c0 != 0.0) continue;
        if (t.g.y() == 0.0 && t.g.x() > 0.0) ax = true;
        if (t.g.x() == 0.0 && t.g.y() > 0.0) ay = true;
    }
    return ax && ay;
}

struct DetSample {
    double c1 = 0.0, c3 = 0.0, sup_det = 0.0, inf_det = 0.0, rho = 0.0, A_plus = 0.0, A_minus = 0.0;
};

DetSample det_sample(const PotentialField& u, const Vec2& c, double R, const DetBoundOptions& opt) {
    struct Pt {
        double r;
        Vec2 x;
    };
    std::vector<Pt> pts{{0.0, c}};
    for (int i = 1; i <= opt.rings; ++i)
        for (int k = 0; k < opt.angles; ++k) {
            double r = R * i / opt.rings, a = 2.0 * M_PI * k / opt.angles;
            pts.push_back({r, c + r * Vec2(std::cos(a), std::sin(a))});
        }
    DetSample s;
    s.inf_det = std::numeric_limits<double>::infinity();
    double Amax = -std::numeric_limits<double>::infinity(), Amin = -Amax;
    std::vector<double> det(pts.size()), grad(pts.size());
    for (size_t k = 0; k < pts.size(); ++k) {
        Curvature cv = curvature(u.jet(pts[k].x), pts[k].x);
        det[k] = cv.det;
        grad[k] = u.gradient(pts[k].x).norm();
        s.rho = std::max(s.rho, grad[k]);
        Amax = std::max(Amax, -cv.abreu);
        Amin = std::min(Amin, -cv.abreu);
        if (pts[k].r <= 0.25 * R * (1 + 1e-12)) s.sup_det = std::max(s.sup_det, det[k]);
    }
    for (size_t k = 0; k < pts.size(); ++k)
        if (grad[k] <= 0.25 * s.rho) s.inf_det = std::min(s.inf_det, det[k]);
    s.A_plus = Amax > 0.0 ? Amax : 0.0;
    s.A_minus = Amin < 0.0 ? -Amin : 0.0;
    double scale = (R / s.rho) * (R / s.rho);
    s.c1 = s.sup_det * scale;
    s.c3 = 1.0 / std::sqrt(s.inf_det * scale);
    return s;
}

}  // namespace

double IdentityReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    throw std::out_of_range("no detail named " + key);
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string describe(const PotentialField& u) {
    std::ostringstream os;
    os << "domain";
    for (int i = 0; i < u.domain.size(); ++i) os << ";" << vec(u.domain.vertex(i)) << "," << num(u.domain.weights[i]);
    os << "|terms";
    for (const auto& t : u.terms) os << ";" << num(t.c0) << "," << vec(t.g);
    os << "|quad;" << num(u.quad(0, 0)) << "," << num(u.quad(0, 1)) << "," << num(u.quad(1, 1));
    os << "|lin;" << vec(u.lin) << "|konst;" << num(u.konst);
    const Lattice& L = u.correction;
    std::string raw(reinterpret_cast<const char*>(L.f.data()), L.f.size() * sizeof(double));
    os << "|lattice;" << L.nx << "," << L.ny << "," << num(L.x0) << "," << num(L.y0) << "," << num(L.h) << ","
       << (u.corrected ? fnv1a_hex(raw) : "zero");
    return os.str();
}

double max_abreu(const PotentialField& u, const std::vector<Vec2>& points) {
    double m = 0.0;
    for (const auto& x : points) m = std::max(m, std::abs(curvature(u.jet(x), x).abreu));
    return m;
}

PotentialField normalized_at(const PotentialField& u, const Vec2& c) {
    PotentialField v = u;
    v.lin -= u.gradient(c);
    return v;
}

IdentityReport lemma14_ratio(const PotentialField& u, const Vec2& p, double L1, double L2, double flat_tol,
                             double tol) {
    if (!(L1 > 0.0 && L2 > 0.0)) throw std::invalid_argument("lemma14_ratio: half-lengths must be positive");
    Vec2 lo = p - Vec2(L1, L2), hi = p + Vec2(L1, L2);
    for (const Vec2& corner : {lo, hi, Vec2(lo.x(), hi.y()), Vec2(hi.x(), lo.y())})
        if (!u.domain.contains(corner))
            throw PreconditionError("lemma14_ratio: rectangle leaves the domain at " + vec(corner));
    require_flat(u, rect_samples(lo, hi, 9), flat_tol, "lemma14_ratio");

    auto kappa = [](const PotentialField& w, const Vec2& q, double l1, double l2, double* V1, double* V2,
                    double* J) {
        *V1 = w.gradient(q + Vec2(l1, 0)).x() - w.gradient(q - Vec2(l1, 0)).x();
        *V2 = w.gradient(q + Vec2(0, l2)).y() - w.gradient(q - Vec2(0, l2)).y();
        *J = w.hessian(q).determinant();
        double delta = std::max(*V1 * l1, *V2 * l2);
        return *J * l1 * l1 * l2 * l2 / (delta * delta);
    };
    double V1, V2, J;
    double k = kappa(u, p, L1, L2, &V1, &V2, &J);
    double delta = std::max(V1 * L1, V2 * L2);
    double dV1, dV2, dJ;
    double k2 = kappa(rescale_potential(u, 2.0), 2.0 * p, 2.0 * L1, 2.0 * L2, &dV1, &dV2, &dJ);
    // J along the vertical segment |t| <= L1/4 through p, as in the statement
    double jmax = 0.0;
    for (int s = -8; s <= 8; ++s) jmax = std::max(jmax, u.hessian(p + Vec2(0, 0.25 * L1 * s / 8)).determinant());

    IdentityReport r;
    r.name = "lemma14";
    r.digest = fnv1a_hex(describe(u) + "|p;" + vec(p) + "|L;" + num(L1) + "," + num(L2));
    r.lhs = J;
    r.rhs = delta * delta / (L1 * L1 * L2 * L2);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.tolerance = tol;
    r.pass = std::isfinite(k) && close_rel(k, k2, tol);
    r.details = {{"V1", V1}, {"V2", V2}, {"Delta", delta}, {"J", J}, {"kappa", k}, {"kappa_dilated", k2},
                 {"kappa_segment_max", jmax * L1 * L1 * L2 * L2 / (delta * delta)}};
    return r;
}

std::vector<IdentityReport> lemma17_identity(const PotentialField& u, const std::vector<double>& Rs, double tol) {
    if (!quarter_plane_like(u))
        throw PreconditionError("lemma17_identity: needs log terms on both axes of a quarter-plane domain");
    std::vector<IdentityReport> out;
    double ref = kNaN;
    for (double R : Rs) {
        if (!(R >= 0.0)) throw std::invalid_argument("lemma17_identity: R must be nonnegative");
        IdentityReport r;
        r.name = "lemma17";
        r.digest = fnv1a_hex(describe(u) + "|R;" + num(R));
        r.tolerance = tol;
        if (R == 0.0) {
            r.lhs = r.rhs = 0.0;
            r.ratio = kNaN;
            r.pass = true;
            r.note = "degenerate segment";
            out.push_back(r);
            continue;
        }
        if (!u.domain.contains({R, 0.0}) || !u.domain.contains({0.0, R}))
            throw PreconditionError("lemma17_identity: segment z = " + num(R) + " leaves the domain");
        // u^zz = (B G B^T)_zz with B = d(y, z)/d(x1, x2) = [[1, -1], [1, 1]]
        auto uzz = [&](double y) {
            Vec2 x(0.5 * (R + y), 0.5 * (R - y));
            Mat2 G = u.hessian(x).inverse();
            return G(0, 0) + 2.0 * G(0, 1) + G(1, 1);
        };
        r.lhs = gl(uzz, -R, R, 16);
        r.rhs = R * R;
        r.ratio = r.lhs / r.rhs;
        if (std::isnan(ref)) ref = r.ratio;
        r.pass = close_rel(r.ratio, ref, tol);
        r.details = {{"R", R}, {"reference_ratio", ref}};
        out.push_back(r);
    }
    return out;
}

IdentityReport lemma18_check(const std::function<double(double)>& f, const std::function<double(double)>& sigma,
                             double R, double t0, int samples, double hyp_tol) {
    if (samples < 5) throw std::invalid_argument("lemma18_check: need at least 5 samples");
    if (!(t0 >= 0.0 && t0 <= R)) throw std::invalid_argument("lemma18_check: t0 outside [0, R]");
    if (!(R >= 1.0)) throw PreconditionError("lemma18_check: hypothesis unmet: R = " + num(R) + " < 1");

    const double h = R / (samples - 1);
    std::vector<double> fs(samples), ss(samples);
    for (int k = 0; k < samples; ++k) {
        fs[k] = f(k * h);
        ss[k] = sigma(k * h);
        if (!(fs[k] > 0.0) || !(ss[k] >= 0.0))
            throw PreconditionError("lemma18_check: hypothesis unmet: f or sigma not positive at t = " + num(k * h));
    }
    double worst = 0.0;
    for (int k = 1; k + 1 < samples; ++k) {
        double f2 = (fs[k + 1] - 2.0 * fs[k] + fs[k - 1]) / (h * h);
        double lhs = std::abs(f2), rhs = fs[k] * ss[k];
        worst = std::max(worst, lhs - rhs);
        if (lhs > rhs + hyp_tol * std::max(1.0, rhs))
            throw PreconditionError("lemma18_check: hypothesis unmet: |f''| > f sigma at t = " + num(k * h));
    }
    double dyadic_max = 0.0;
    for (int k = 0; k <= 40; ++k) {
        double lam = R * std::ldexp(1.0, -k);
        double s = gl(sigma, 0.5 * lam, lam, 16, 4);
        dyadic_max = std::max(dyadic_max, s);
        if (s > 1.0 + hyp_tol)
            throw PreconditionError("lemma18_check: hypothesis unmet: integral of sigma over [" + num(0.5 * lam) +
                                    ", " + num(lam) + "] is " + num(s) + " > 1");
    }

    IdentityReport r;
    r.name = "lemma18";
    std::ostringstream in;
    in << "R;" << num(R) << "|t0;" << num(t0) << "|samples;" << samples;
    for (int k = 0; k < samples; ++k) in << ";" << num(fs[k]) << "," << num(ss[k]);
    r.digest = fnv1a_hex(in.str());
    r.lhs = f(t0);
    r.rhs = 18.0 * gl(f, 0.0, R, 16, 16);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.pass = r.lhs <= r.rhs;
    r.details = {{"integral_f", r.rhs / 18.0}, {"max_dyadic_sigma", dyadic_max}, {"max_fpp_excess", worst}};
    return r;
}

IdentityReport flux_identity(const PotentialField& u, double R, double flat_tol, double tol) {
    if (!quarter_plane_like(u))
        throw PreconditionError("flux_identity: needs log terms on both axes of a quarter-plane domain");
    if (!(R > 0.0)) throw std::invalid_argument("flux_identity: R must be positive");
    if (!u.domain.contains({R, 0.0}) || !u.domain.contains({0.0, R}))
        throw PreconditionError("flux_identity: triangle leaves the domain");
    std::vector<Vec2> tri{{0, 0}, {R, 0}, {0, R}};

    std::vector<Vec2> probe;
    for (int b = 1; b < 8; ++b)
        for (int a = 1; a + b < 8; ++a) probe.emplace_back(R * a / 8, R * b / 8);
    require_flat(u, probe, flat_tol, "flux_identity");

    auto nu = [&](const Vec2& x) {
        Curvature c = curvature(u.jet(x), x);
        Vec2 v = Vec2::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        v[i] += c.F[a][b](i, j) * c.dG[j](a, b);
                        v[i] -= c.F[j][b](j, a) * c.dG[a](b, i);
                    }
        return v;
    };
    IdentityReport r;
    r.name = "flux";
    r.digest = fnv1a_hex(describe(u) + "|R;" + num(R));
    r.lhs = area_integral(tri, [&](const Vec2& x) { return curvature(u.jet(x), x).absF2; }, 16);
    // outward normal (1, 1)/sqrt 2 and ds = sqrt 2 dt along x = (R - t, t)
    r.rhs = gl([&](double t) { return nu(Vec2(R - t, t)).sum(); }, 0.0, R, 16, 4);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.tolerance = tol;
    r.pass = close_rel(r.lhs, r.rhs, tol);
    r.details = {{"R", R}};
    r.note = "nu^i = F^ij_ab d_j u^ab - F^ja_jb d_a u^bi";
    return r;
}

IdentityReport f_harmonic_check(const PotentialField& u, double flat_tol, double tol) {
    auto nodes = u.interior_nodes();
    if (nodes.empty()) throw std::invalid_argument("f_harmonic_check: grid too coarse");
    double flat = 0.0, worst = 0.0;
    Vec2 where = Vec2::Zero();
    for (auto [i, j] : nodes) {
        Vec2 x = u.correction.node(i, j);
        Curvature c = curvature(u.node_jet(i, j), x);
        flat = std::max(flat, std::abs(c.abreu));
        // G = 1/det(u_ij) = det(u^ij); second derivatives from those of u^ij
        const Mat2& g = c.G;
        Mat2 H;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                const Mat2 &gk = c.dG[k], &gl_ = c.dG[l], &gkl = c.F[k][l];
                H(k, l) = gkl(0, 0) * g(1, 1) + gk(0, 0) * gl_(1, 1) + gl_(0, 0) * gk(1, 1) + g(0, 0) * gkl(1, 1) -
                          2.0 * (gk(0, 1) * gl_(0, 1) + g(0, 1) * gkl(0, 1));
            }
        double v = std::abs(g(0, 0) * H(0, 0) + 2.0 * g(0, 1) * H(0, 1) + g(1, 1) * H(1, 1));
        if (v > worst) {
            worst = v;
            where = x;
        }
    }
    if (!(flat <= flat_tol)) {
        std::ostringstream os;
        os << "f_harmonic_check: input is not scalar-flat (max |Abreu| = " << flat << ")";
        throw PreconditionError(os.str());
    }
    IdentityReport r;
    r.name = "harmonic";
    r.digest = fnv1a_hex(describe(u));
    r.lhs = worst;
    r.rhs = tol;
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.tolerance = tol;
    r.pass = worst <= tol;
    r.details = {{"nodes", static_cast<double>(nodes.size())}, {"worst_x", where.x()}, {"worst_y", where.y()}};
    return r;
}

IdentityReport det_bounds(const PotentialField& u, const Vec2& c, double R, const DetBoundOptions& opt) {
    if (!(R > 0.0)) throw std::invalid_argument("det_bounds: radius must be positive");
    if (!u.domain.contains(c) || u.domain.boundary_distance(c) < R)
        throw PreconditionError("det_bounds: disc of radius " + num(R) + " about " + vec(c) + " leaves the domain");
    double g0 = u.gradient(c).norm();
    if (g0 > opt.gradient_tol)
        throw PreconditionError("det_bounds: gradient at the centre is " + num(g0) + ", not 0");

    DetSample s = det_sample(u, c, R, opt);
    DetSample d = det_sample(rescale_potential(u, 2.0), 2.0 * c, 2.0 * R, opt);
    IdentityReport r;
    r.name = "detbounds";
    r.digest = fnv1a_hex(describe(u) + "|c;" + vec(c) + "|R;" + num(R) + "|grid;" + std::to_string(opt.rings) + "," +
                         std::to_string(opt.angles));
    r.lhs = s.c1;
    r.rhs = d.c1;
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.tolerance = opt.tol;
    r.pass = close_rel(s.c1, d.c1, opt.tol) && close_rel(s.c3, d.c3, opt.tol);
    r.details = {{"rho", s.rho},       {"A_plus", s.A_plus},   {"A_minus", s.A_minus}, {"sup_det", s.sup_det},
                 {"inf_det", s.inf_det}, {"c1_implied", s.c1}, {"c3_implied", s.c3},   {"c1_dilated", d.c1},
                 {"c3_dilated", d.c3}};
    // rounding-level curvature counts as the A = 0 branch
    if (s.A_minus > opt.flat_tol) r.note = "A- > 0: c1_implied bounds c1 + c2 R^2 rho^2 (A-)^2";
    if (s.A_plus > opt.flat_tol) r.note += std::string(r.note.empty() ? "" : "; ") + "A+ > 0: c3_implied bounds c3 + c4 R^2 rho^2 A+";
    return r;
}

IdentityReport theorem2_evidence(int grid) {
    const double trunc = 16.0;
    PotentialField u = half_plane_model(trunc, grid);
    std::vector<double> sups;
    for (double T : {1.0, 2.0, 4.0}) {
        ScanOptions opt;
        opt.box = ScanBox{Vec2(4.0, 0.0), Vec2(5.0, T)};
        sups.push_back(m_condition_scan(u, opt).sup_V);
    }
    // barrier -x1 sampled on Q = [1/4, 2] x [-1, 1]
    double gmin = std::numeric_limits<double>::infinity();
    Vec2 argmin = Vec2::Zero();
    for (const Vec2& x : rect_samples({0.25, -1.0}, {2.0, 1.0}, 29)) {
        double G = 1.0 / u.hessian(x).determinant() - 2.0 * x.x();
        if (G < gmin) {
            gmin = G;
            argmin = x;
        }
    }
    double flat = max_abreu(u, rect_samples({0.25, -4.0}, {8.0, 4.0}, 17));

    IdentityReport r;
    r.name = "thm2";
    r.digest = fnv1a_hex(describe(u) + "|boxes;4,5,0,{1,2,4}|Q;0.25,2,-1,1");
    r.lhs = sups[2];
    r.rhs = 4.0 * sups[0];
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.tolerance = 1e-9;
    bool linear = close_rel(sups[1], 2.0 * sups[0], r.tolerance) && close_rel(sups[2], 4.0 * sups[0], r.tolerance);
    bool on_face = std::abs(argmin.x() - 2.0) < 1e-12;
    r.pass = linear && sups[0] > 0.0 && on_face && flat <= 1e-9;
    r.details = {{"sup_V_T1", sups[0]}, {"sup_V_T2", sups[1]},  {"sup_V_T4", sups[2]},
                 {"barrier_min", gmin}, {"barrier_argmin_x", argmin.x()}, {"max_abreu", flat}};
    return r;
}

}  // namespace abreu
