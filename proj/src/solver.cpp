#include "abreu/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "abreu/functionals.hpp"

namespace abreu {

namespace {

double node_residual(const PotentialField& u, const ScalarField& A, int i, int j) {
    Vec2 x = u.correction.node(i, j);
    return curvature(u.node_jet(i, j), x).abreu + A(x);
}

double min_eigenvalue(const PotentialField& u, const std::vector<std::pair<int, int>>& nodes) {
    double m = std::numeric_limits<double>::infinity();
    for (auto [i, j] : nodes) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(u.node_jet(i, j).hess, Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

void fill_norms(SolveState& s) {
    double h = s.u.correction.h;
    s.max_residual = s.r.size() ? s.r.cwiseAbs().maxCoeff() : 0.0;
    s.l2_residual = h * s.r.norm();
    const Eigen::MatrixXd& P = s.closure.affine;
    s.compat = (P.transpose() * P).ldlt().solve(P.transpose() * s.r);
    Eigen::VectorXd rest = s.r - P * s.compat;
    s.max_projected = rest.size() ? rest.cwiseAbs().maxCoeff() : 0.0;
    s.l2_projected = h * rest.norm();
}

Eigen::VectorXd unknown_values(const PotentialField& u, const Closure& c) {
    Eigen::VectorXd v(c.unknowns.size());
    for (size_t k = 0; k < c.unknowns.size(); ++k) v[k] = u.correction.at(c.unknowns[k].first, c.unknowns[k].second);
    return v;
}

void set_values(PotentialField& u, const Closure& c, const Eigen::VectorXd& v) {
    Eigen::VectorXd all = c.extend * v;
    for (Eigen::Index k = 0; k < all.size(); ++k) u.correction.f[k] = all[k];
    u.corrected = true;
    u.refresh();
}

}  // namespace

Closure make_closure(const PotentialField& u, int neighbours) {
    Closure c;
    c.unknowns = u.interior_nodes();
    const Lattice& L = u.correction;
    const int n = static_cast<int>(c.unknowns.size());
    if (n < neighbours) throw std::invalid_argument("grid too coarse: too few interior nodes");
    std::vector<int> col(static_cast<size_t>(L.nx) * L.ny, -1);
    for (int k = 0; k < n; ++k) col[L.index(c.unknowns[k].first, c.unknowns[k].second)] = k;

    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < L.ny; ++j)
        for (int i = 0; i < L.nx; ++i) {
            int id = L.index(i, j);
            if (col[id] >= 0) {
                trip.emplace_back(id, col[id], 1.0);
                continue;
            }
            // widen a square window until it holds enough unknowns, then keep the nearest
            std::vector<std::pair<double, int>> near;
            for (int rad = 2; static_cast<int>(near.size()) < neighbours; rad *= 2) {
                near.clear();
                for (int b = std::max(0, j - rad); b <= std::min(L.ny - 1, j + rad); ++b)
                    for (int a = std::max(0, i - rad); a <= std::min(L.nx - 1, i + rad); ++a)
                        if (int k = col[L.index(a, b)]; k >= 0)
                            near.emplace_back((a - i) * (a - i) + (b - j) * (b - j) + 1e-6 * k, k);
            }
            std::partial_sort(near.begin(), near.begin() + neighbours, near.end());
            Eigen::MatrixXd B(neighbours, 6);
            for (int m = 0; m < neighbours; ++m) {
                auto [a, b] = c.unknowns[near[m].second];
                double s = a - i, t = b - j;
                B.row(m) << 1, s, t, s * s, s * t, t * t;
            }
            // value of the fitted quadratic at the node itself
            Eigen::VectorXd w = B * (B.transpose() * B).ldlt().solve(Eigen::VectorXd::Unit(6, 0));
            for (int m = 0; m < neighbours; ++m) trip.emplace_back(id, near[m].second, w[m]);
        }
    c.extend.resize(L.nx * L.ny, n);
    c.extend.setFromTriplets(trip.begin(), trip.end());

    c.affine.resize(n, 3);
    for (int k = 0; k < n; ++k) {
        Vec2 x = L.node(c.unknowns[k].first, c.unknowns[k].second) - u.pin;
        c.affine.row(k) << 1.0, x.x(), x.y();
    }
    return c;
}

void apply_closure(PotentialField& u, const Closure& c) { set_values(u, c, unknown_values(u, c)); }

Eigen::VectorXd residual(const PotentialField& u, const ScalarField& A) {
    auto nodes = u.interior_nodes();
    Eigen::VectorXd r(nodes.size());
    for (size_t k = 0; k < nodes.size(); ++k) r[k] = node_residual(u, A, nodes[k].first, nodes[k].second);
    return r;
}

SolveState make_state(const PotentialField& u, const ScalarField& A, const SolveOptions& opt) {
    SolveState s;
    s.u = u;
    s.A = A;
    s.closure = make_closure(u);
    s.unknowns = s.closure.unknowns;
    apply_closure(s.u, s.closure);
    s.r = residual(s.u, A);
    fill_norms(s);
    s.converged = s.max_projected < opt.tol;
    s.residual_history.push_back(s.max_residual);
    s.projected_history.push_back(s.max_projected);
    s.min_eigenvalue.push_back(min_eigenvalue(s.u, s.unknowns));
    if (opt.track_functional) s.functional_history.push_back(f_functional(s.u, A).value);
    return s;
}

Eigen::SparseMatrix<double> lattice_jacobian(const PotentialField& u0, const ScalarField& A) {
    PotentialField u = u0;
    u.corrected = true;  // node jets must include the lattice while perturbing
    auto nodes = u.interior_nodes();
    const int n = static_cast<int>(nodes.size());
    const Lattice& L = u.correction;

    const double eps = 1e-4 * L.h * L.h;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 25);
    Eigen::VectorXd rp(n), rm(n);
    auto mod5 = [](int a) { return ((a % 5) + 5) % 5; };
    for (int ci = 0; ci < 5; ++ci)
        for (int cj = 0; cj < 5; ++cj) {
            for (int sgn : {1, -1}) {
                for (int j = cj; j < L.ny; j += 5)
                    for (int i = ci; i < L.nx; i += 5) u.correction(i, j) += sgn * eps;
                Eigen::VectorXd& out = sgn > 0 ? rp : rm;
                for (int k = 0; k < n; ++k) out[k] = node_residual(u, A, nodes[k].first, nodes[k].second);
                for (int j = cj; j < L.ny; j += 5)
                    for (int i = ci; i < L.nx; i += 5) u.correction(i, j) -= sgn * eps;
            }
            for (int row = 0; row < n; ++row) {
                auto [i, j] = nodes[row];
                // the one node of this colour within the 5 x 5 stencil of the row
                int di = ci - mod5(i), dj = cj - mod5(j);
                if (di > 2) di -= 5;
                if (di < -2) di += 5;
                if (dj > 2) dj -= 5;
                if (dj < -2) dj += 5;
                int a = i + di, b = j + dj;
                if (a < 0 || b < 0 || a >= L.nx || b >= L.ny) continue;
                double v = (rp[row] - rm[row]) / (2.0 * eps);
                if (v != 0.0) trip.emplace_back(row, L.index(a, b), v);
            }
        }
    Eigen::SparseMatrix<double> J(n, L.nx * L.ny);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

Eigen::SparseMatrix<double> residual_jacobian(const PotentialField& u, const ScalarField& A, const Closure& c) {
    return (lattice_jacobian(u, A) * c.extend).pruned();
}

Eigen::SparseMatrix<double> residual_jacobian(const PotentialField& u, const ScalarField& A) {
    return residual_jacobian(u, A, make_closure(u));
}

SolveState newton_step(const SolveState& s, const SolveOptions& opt) {
    const int n = static_cast<int>(s.unknowns.size());
    Eigen::SparseMatrix<double> J = residual_jacobian(s.u, s.A, s.closure);
    // Bordered system [J P; P^T 0]: the update is orthogonal to the affine
    // gauge directions and the affine part of r is absorbed by the multiplier.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(J.nonZeros() + 6 * n);
    for (int k = 0; k < J.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it)
            trip.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < n; ++k)
        for (int q = 0; q < 3; ++q) {
            trip.emplace_back(k, n + q, s.closure.affine(k, q));
            trip.emplace_back(n + q, k, s.closure.affine(k, q));
        }
    Eigen::SparseMatrix<double> K(n + 3, n + 3);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success) throw SolverError("singular Jacobian; try refining the grid", s);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 3);
    rhs.head(n) = -s.r;
    Eigen::VectorXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.allFinite())
        throw SolverError("linear solve failed; try refining the grid", s);
    Eigen::VectorXd delta = sol.head(n);

    double step_norm = delta.cwiseAbs().maxCoeff();
    if (step_norm < opt.step_tol) {
        SolveState out = s;
        out.last_step = step_norm;
        return out;
    }

    const Eigen::VectorXd base = unknown_values(s.u, s.closure);
    double t = 1.0;
    for (int k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
        SolveState trial = s;
        set_values(trial.u, s.closure, base + t * delta);
        try {
            trial.r = residual(trial.u, s.A);
        } catch (const ConvexityError&) {
            continue;  // convexity guard
        }
        double lam = min_eigenvalue(trial.u, s.unknowns);
        if (!(lam > 0.0)) continue;
        fill_norms(trial);
        if (trial.l2_projected > s.l2_projected) continue;
        trial.u.apply_pin();
        trial.steps = s.steps + 1;
        trial.last_step = t * step_norm;
        trial.converged = trial.max_projected < opt.tol;
        trial.damping.push_back(t);
        trial.residual_history.push_back(trial.max_residual);
        trial.projected_history.push_back(trial.max_projected);
        trial.min_eigenvalue.push_back(lam);
        if (opt.track_functional) trial.functional_history.push_back(f_functional(trial.u, s.A).value);
        return trial;
    }
    throw SolverError("line search exhausted the damping budget (stagnation)", s);
}

SolveState solve(const PotentialField& u0, const ScalarField& A, const SolveOptions& opt) {
    SolveState s = make_state(u0, A, opt);
    while (!s.converged && s.steps < opt.max_iter) {
        SolveState next = newton_step(s, opt);
        bool stalled = next.steps == s.steps;  // update below the step tolerance
        s = std::move(next);
        if (stalled) break;
    }
    return s;
}

PathSolve continue_path(const ContinuityPath& path, const PotentialField& start, const SolveOptions& opt,
                        double balance_tol) {
    if (path.samples.empty()) throw std::invalid_argument("empty continuity path");
    for (size_t k = 0; k < path.samples.size(); ++k) {
        const auto& smp = path.samples[k];
        BalanceReport b = balance_report(smp.polygon, smp.A);
        if (b.residual.cwiseAbs().maxCoeff() > balance_tol) {
            std::ostringstream os;
            os << "path sample " << k << " (t = " << smp.t << ") is not balanced: residual "
               << b.residual.cwiseAbs().maxCoeff();
            throw std::invalid_argument(os.str());
        }
    }

    PathSolve out;
    PotentialField u = start;
    for (size_t k = 0; k < path.samples.size(); ++k) {
        const auto& smp = path.samples[k];
        PotentialField w = guillemin_potential(smp.polygon, u.correction.nx);
        if (w.correction.nx == u.correction.nx && w.correction.ny == u.correction.ny) {
            w.correction.f = u.correction.f;  // warm start from the previous sample
        } else {
            for (int j = 0; j < w.correction.ny; ++j)
                for (int i = 0; i < w.correction.nx; ++i)
                    w.correction(i, j) = u.correction.bicubic(w.correction.node(i, j));
        }
        w.refresh();
        try {
            SolveState s = solve(w, smp.A, opt);
            if (!s.converged) throw SolverError("no convergence within the iteration limit", s);
            u = s.u;
            out.states.push_back(std::move(s));
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "sample " << k << " (t = " << smp.t << ") failed: " << e.what();
            if (auto* se = dynamic_cast<const SolverError*>(&e)) {
                os << "; residual history";
                for (double r : se->last_state().residual_history) os << " " << r;
                os << "; residual modulo affine part";
                for (double r : se->last_state().projected_history) os << " " << r;
                os << "; min eigenvalue";
                for (double m : se->last_state().min_eigenvalue) os << " " << m;
            }
            out.failed_sample = static_cast<int>(k);
            out.diagnostic = os.str();
            return out;
        }
    }
    out.completed = true;
    return out;
}

}  // namespace abreu
