// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "abreu/analysis.hpp"
#include "abreu/functionals.hpp"
#include "abreu/geometry.hpp"
#include "abreu/io.hpp"
#include "abreu/solver.hpp"

using namespace abreu;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += "[failed: " + what + "] ";
        }
    }
    void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        detail += buf;
        detail += "; ";
    }
};

std::string fixture(const std::string& name) { return std::string(ABREU_FIXTURES_DIR) + "/" + name; }

const std::vector<std::string> kPolygonFixtures{"square.json", "simplex.json", "perturbed_square.json",
                                                "hexagon.json", "trapezoid.json", "pentagon.json"};

int edge_from(const WeightedPolygon& p, const Vec2& a) {
    for (int e = 0; e < p.size(); ++e)
        if ((p.edge_start(e) - a).norm() < 1e-12) return e;
    return -1;
}

WeightedPolygon random_convex(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(0, 1);
    double a = 1 + U(rng), b = 0.5 + U(rng), rot = 2 * M_PI * U(rng);
    std::vector<double> th(n);
    // angles with a minimum gap so no edge is tiny
    for (;;) {
        for (auto& t : th) t = 2 * M_PI * U(rng);
        std::sort(th.begin(), th.end());
        double gap = th[0] + 2 * M_PI - th[n - 1];
        for (int k = 1; k < n; ++k) gap = std::min(gap, th[k] - th[k - 1]);
        if (gap > 0.25) break;
    }
    std::vector<Vec2> v;
    for (double t : th) {
        Vec2 p(a * std::cos(t), b * std::sin(t));
        v.push_back(Vec2(std::cos(rot) * p.x() - std::sin(rot) * p.y(), std::sin(rot) * p.x() + std::cos(rot) * p.y()) +
                    Vec2(0.3, -0.2));
    }
    return canonical_weights(v);
}

// ------------------------------------------------------------------------

Outcome exact_solutions() {
    Outcome o;
    struct Case {
        const char* name;
        std::function<PotentialField()> make;
        double A;
    };
    std::vector<Case> cases{{"square A=4", [] { return guillemin_potential(square(), 65); }, 4.0},
                            {"simplex A=6", [] { return guillemin_potential(simplex(), 65); }, 6.0},
                            {"quarter model A=0", [] { return quarter_plane_model(8.0, 65); }, 0.0}};
    for (const auto& c : cases) {
        auto t0 = Clock::now();
        PotentialField u = c.make();
        double worst = 0.0;
        for (const auto& s : tensor_samples(u).nodes) worst = std::max(worst, std::abs(s.c.abreu + c.A));
        double t = seconds_since(t0);
        o.note("%s max|res| %.2e (%.2fs)", c.name, worst, t);
        o.require(worst < 1e-6, c.name);
        o.require(t < 10.0, std::string(c.name) + " runtime");
    }
    return o;
}

Outcome canonical_weights_balance() {
    Outcome o;
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> U(-1, 1);
    double worst_balance = 0.0, worst_polar = 0.0;
    for (int k = 0; k < 5; ++k) {
        WeightedPolygon p = random_convex(rng, 3 + k);
        BalanceReport b = balance_report(p, ScalarField::constant(1.0));
        worst_balance = std::max(worst_balance, b.residual.cwiseAbs().maxCoeff());
        Vec2 c = p.centroid();
        for (int m = 0; m < 10; ++m) {
            // convex and 1-homogeneous about the centroid
            Mat2 R;
            R << U(rng), U(rng), U(rng), U(rng);
            Mat2 S = R * R.transpose() + 0.2 * Mat2::Identity();
            Vec2 a(U(rng), U(rng));
            double s2 = 0.5 + 0.5 * U(rng);
            ScalarFn f = [=](const Vec2& x) {
                Vec2 d = x - c;
                return std::sqrt(d.dot(S * d)) + s2 * d.norm() + a.dot(d);
            };
            double polar = polar_functional(p, f), L = l_functional(p, ScalarField::constant(1.0), f, 48);
            worst_polar = std::max(worst_polar, std::abs(polar - L));
        }
    }
    o.note("max balance residual %.2e, max |polar - L| %.2e over 50 functions", worst_balance, worst_polar);
    o.require(worst_balance < 1e-10, "balance");
    o.require(worst_polar < 1e-6, "polar formula");
    return o;
}

Outcome positivity() {
    Outcome o;
    for (const auto& name : kPolygonFixtures) {
        WeightedPolygon p = canonical_weights(load_polygon(fixture(name)).polygon.vertices);
        ProbeReport r = stability_probe(p, ScalarField::constant(1.0), 500, 7);
        o.note("%s min L %.3e", name.c_str(), r.min_L);
        o.require(r.min_L > 0.0 && r.all_positive, name);
    }
    return o;
}

Outcome scaling_laws() {
    Outcome o;
    PotentialField u = guillemin_potential(square(), 65);
    double e0 = energy_quadrature(u).intF2, worst = 0.0;
    bool weights_exact = true, mu_exact = true, structure = true, round_trip = true;
    WeightedPolygon q = canonical_weights({{0, 0}, {1, 0}, {1.2, 0.8}, {0.3, 1.1}});
    for (double l : {0.5, 2.0, 3.0}) {
        PotentialField v = rescale_potential(u, l);
        worst = std::max(worst, std::abs(energy_quadrature(v).intF2 - e0) / e0);
        for (const WeightedPolygon& p : {square(), q}) {
            WeightedPolygon s = rescale_polygon(p, l);
            for (int e = 0; e < p.size(); ++e) weights_exact = weights_exact && s.weights[e] == l * p.weights[e];
            mu_exact = mu_exact && std::abs(mu_invariant(s) - mu_invariant(p)) <= 1e-14;
            WeightedPolygon back = rescale_polygon(s, 1.0 / l);
            for (int k = 0; k < p.size(); ++k)
                round_trip = round_trip && (back.vertices[k] - p.vertices[k]).norm() <= 1e-14 &&
                             std::abs(back.weights[k] - p.weights[k]) <= 1e-14;
        }
        // one log term per edge, each the dilated polygon's defining function
        structure = structure && v.terms.size() == static_cast<size_t>(v.domain.size());
        for (int e = 0; e < v.domain.size() && structure; ++e) {
            Affine d = v.domain.defining_function(e);
            const Affine& t = v.terms[e];
            structure = std::abs(d.c0 - t.c0) < 1e-12 && (d.g - t.g).norm() < 1e-12;
        }
    }
    o.note("max relative change of int|F|^2 %.2e", worst);
    o.require(worst < 1e-8, "energy invariance");
    o.require(weights_exact, "weights scale by lambda");
    o.require(mu_exact, "mu invariance");
    o.require(round_trip, "round trip");
    o.require(structure, "Guillemin structure");
    return o;
}

Outcome energy_invariant() {
    Outcome o;
    PotentialField u0 = guillemin_potential(square(), 129);
    double base = energy_quadrature(u0).invariant, worst = 0.0;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 5; ++k) {
        Vec2 c(0.35 + 0.3 * U(rng), 0.35 + 0.3 * U(rng));
        double rad = 0.2 + 0.1 * U(rng), amp = (2 * U(rng) - 1) * 5e-4;
        PotentialField u = u0;
        for (int j = 0; j < u.correction.ny; ++j)
            for (int i = 0; i < u.correction.nx; ++i) {
                double r2 = ((u.correction.node(i, j) - c) / rad).squaredNorm();
                if (r2 < 1) u.correction(i, j) = amp * std::pow(1 - r2, 5);
            }
        u.refresh();
        double min_ev = INFINITY;
        for (const auto& s : tensor_samples(u).nodes)
            min_ev = std::min(min_ev, Eigen::SelfAdjointEigenSolver<Mat2>(s.c.H).eigenvalues()[0]);
        o.require(min_ev > 0.0, "bump keeps convexity");
        double rel = std::abs(energy_quadrature(u).invariant - base) / std::abs(base);
        worst = std::max(worst, rel);
    }
    o.note("base invariant %.9f, max relative change %.2e over 5 bumps", base, worst);
    o.require(worst < 2e-3, "invariant");
    return o;
}

Outcome inequality_suite() {
    Outcome o;
    auto t0 = Clock::now();
    int nodes = 0, failures = 0;
    std::vector<std::pair<std::string, PotentialField>> all;
    for (const auto& name : kPolygonFixtures)
        all.emplace_back(name, guillemin_potential(load_polygon(fixture(name)).polygon, 65));
    all.emplace_back("quarter model", quarter_plane_model(8.0, 65));
    all.emplace_back("half model", half_plane_model(8.0, 65));
    for (const auto& [name, u] : all) {
        for (const auto& r : slice_curvature_bounds(u)) {
            ++nodes;
            if (!r.pass) {
                ++failures;
                o.require(false, "slice bound on " + name);
            }
        }
    }
    o.note("slice-curvature bound at %d interior nodes, %d failures", nodes, failures);
    PotentialField q = quarter_plane_model(4.0, 65);
    double M = m_condition_scan(q).sup_V;
    BoundLedger led = bound_suite(q, M);
    o.note("flat-model ledger: %d checked, %d failed, %d skipped (M = %.6f)", led.checked(), led.failures(),
           led.skipped(), M);
    o.require(led.pass() && led.checked() > 0, "flat-model ledger");
    double t = seconds_since(t0);
    o.note("%.1fs", t);
    o.require(t < 60.0, "runtime");
    return o;
}

Outcome blow_up_machinery() {
    Outcome o;
    PotentialField q = quarter_plane_model(16.0, 65);
    IdentityReport k = lemma14_ratio(q, {2, 2}, 1, 1);
    double oracle = 0.25 / (std::log(3.0) * std::log(3.0));
    o.note("lemma14_ratio kappa %.12f (dilated %.12f, closed form %.12f)", k.ratio, k.detail("kappa_dilated"), oracle);
    o.require(k.pass, "lemma14 dilation invariance");
    o.require(std::abs(k.ratio - oracle) < 1e-8 * oracle, "lemma14 regression value");
    auto reps = lemma17_identity(q, {1, 2, 4, 8});
    bool all17 = true;
    for (const auto& r : reps) all17 = all17 && r.pass && std::abs(r.ratio - reps[0].ratio) <= 1e-8 * reps[0].ratio;
    o.note("lemma17_identity ratio %.12f for R = 1, 2, 4, 8", reps[0].ratio);
    o.require(all17, "lemma17 R-independence");
    bool ok18 = lemma18_check([](double) { return 1.0; }, [](double) { return 0.0; }, 1, 0).pass &&
                lemma18_check([](double t) { return std::exp(t); }, [](double) { return 1.0; }, 1, 1).pass;
    bool rejected = false;
    try {
        lemma18_check([](double t) { return std::exp(t); }, [](double) { return 1.0; }, 3, 1);
    } catch (const PreconditionError&) {
        rejected = true;
    }
    o.note("lemma18_check fixtures pass %d, violation rejected %d", ok18, rejected);
    o.require(ok18 && rejected, "lemma18");
    IdentityReport h = f_harmonic_check(quarter_plane_model(8.0, 65), 1e-6, 1e-12);
    o.note("F-harmonic max %.2e", h.lhs);
    o.require(h.pass, "F-harmonic");
    return o;
}

Outcome solver() {
    Outcome o;
    ScalarField A = ScalarField::affine(3.95, 0.1, 0.0);
    WeightedPolygon p = balance_weights(square(), A);
    SolveState s = solve(guillemin_potential(p, 33), A);
    o.note("perturbed square: %d steps, max residual %.2e", s.steps, s.max_residual);
    o.require(s.converged && s.steps <= 10 && s.max_residual < 1e-6, "perturbed-A convergence");
    bool monotone = true;
    for (size_t k = 1; k < s.functional_history.size(); ++k)
        monotone = monotone && s.functional_history[k] <=
                                   s.functional_history[k - 1] + 1e-8 * std::max(1.0, std::abs(s.functional_history[k - 1]));
    o.require(monotone, "functional nonincreasing");

    // Jacobian against central differences along a random direction, 17^2
    PotentialField u = guillemin_potential(square(), 17);
    for (int j = 0; j < u.correction.ny; ++j)
        for (int i = 0; i < u.correction.nx; ++i) {
            double r2 = ((u.correction.node(i, j) - Vec2(0.45, 0.55)) / 0.3).squaredNorm();
            if (r2 < 1) u.correction(i, j) = 0.01 * std::pow(1 - r2, 4);
        }
    u.refresh();
    ScalarField A4 = ScalarField::constant(4.0);
    SolveState st = make_state(u, A4);
    const Closure& c = st.closure;
    Eigen::VectorXd v(c.unknowns.size()), d(c.unknowns.size());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (size_t k = 0; k < c.unknowns.size(); ++k) {
        v[k] = st.u.correction.at(c.unknowns[k].first, c.unknowns[k].second);
        d[k] = nd(rng);
    }
    auto eval = [&](const Eigen::VectorXd& w) {
        PotentialField x = st.u;
        Eigen::VectorXd f = c.extend * w;
        for (int k = 0; k < f.size(); ++k) x.correction.f[k] = f[k];
        x.refresh();
        return residual(x, A4);
    };
    const double eps = 1e-5;
    Eigen::VectorXd fd = (eval(v + eps * d) - eval(v - eps * d)) / (2 * eps);
    double rel = (residual_jacobian(st.u, A4, c) * d - fd).norm() / fd.norm();
    o.note("Jacobian vs finite differences %.2e", rel);
    o.require(rel < 1e-4, "Jacobian");

    // 6-sample corner-cut continuation
    WeightedPolygon c0 = canonical_weights(corner_cut(square(), 0, 0.01).vertices);
    WeightedPolygon c1 = corner_cut(square(), 0, 0.05);
    c1 = rebalance(c1, edge_from(c1, {1, 0}), edge_from(c1, {1, 1})).polygon;
    ContinuityPath path = continuity_path(c0, ScalarField::constant(1.0), c1, unique_affine_A(c1), 6);
    SolveOptions opt;
    opt.track_functional = false;
    SolveState s0 = solve(guillemin_potential(c0, 33), ScalarField::constant(1.0), opt);
    PathSolve ps = continue_path(path, s0.u, opt);
    double raw = 0.0, proj = 0.0;
    for (const auto& x : ps.states) {
        raw = std::max(raw, x.max_residual);
        proj = std::max(proj, x.max_projected);
    }
    o.note("path completed %d over %zu samples, max residual %.2e raw / %.2e modulo affine part", ps.completed,
           ps.states.size(), raw, proj);
    o.require(ps.completed && ps.states.size() == 6, "continuation");
    return o;
}

Outcome theorem2_evidence_check() {
    Outcome o;
    PotentialField h = half_plane_model(16.0, 65);
    std::vector<double> sups;
    for (double T : {1.0, 2.0, 4.0}) {
        ScanOptions opt;
        opt.box = ScanBox{{4, 0}, {5, T}};
        sups.push_back(m_condition_scan(h, opt).sup_V);
    }
    o.note("half-plane sup V %.9f, %.9f, %.9f", sups[0], sups[1], sups[2]);
    for (int k = 0; k < 3; ++k) o.require(std::abs(sups[k] - std::ldexp(1.0, k)) < 1e-9, "half-plane sup");
    for (const auto& name : kPolygonFixtures) {
        PolygonFile pf = load_polygon(fixture(name));
        double s = m_condition_scan(guillemin_potential(pf.polygon, 65)).sup_V;
        o.note("%s sup V %.4f", name.c_str(), s);
        o.require(std::isfinite(s), name);
    }
    return o;
}

Outcome volume_growth_check() {
    Outcome o;
    VolumeTable t = volume_growth(quarter_plane_model(8.0, 257), {1, 2, 3, 4, 5, 6, 7, 8});
    double worst = 0.0;
    for (const auto& r : t.rows)
        worst = std::max(worst, std::abs(r.volume - 2 * M_PI * M_PI * r.tau * r.tau) / (2 * M_PI * M_PI * r.tau * r.tau));
    o.note("max relative deviation from 2 pi^2 tau^2 %.2e, exponent %.4f", worst, t.exponent);
    o.require(worst < 1e-12, "volume formula");
    o.require(std::abs(t.exponent - 4.0) <= 0.1, "exponent");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {"exact solutions", exact_solutions},
        {"canonical weights and polar formula", canonical_weights_balance},
        {"positivity on canonical data", positivity},
        {"scaling laws", scaling_laws},
        {"energy invariant under bumps", energy_invariant},
        {"inequality suite", inequality_suite},
        {"blow-up machinery", blow_up_machinery},
        {"solver", solver},
        {"half-plane M-condition evidence", theorem2_evidence_check},
        {"volume growth", volume_growth_check},
    };
    int failed = 0;
    for (size_t k = 0; k < criteria.size(); ++k) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[k].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail += std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
