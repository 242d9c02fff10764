#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "abreu/potential.hpp"

namespace abreu {

struct SolveOptions {
    double tol = 1e-6;        // max-norm residual modulo its affine part
    double step_tol = 1e-10;  // max-norm Newton update
    int max_iter = 30;
    int max_halvings = 20;
    bool track_functional = true;
};

// Correction values at nodes at least 2h inside P are the unknowns; every other
// lattice value is a quadratic least-squares extrapolation of nearby unknowns,
// so no boundary condition is imposed on the correction. Affine corrections
// extend exactly, which leaves a three-dimensional kernel (the gauge).
struct Closure {
    std::vector<std::pair<int, int>> unknowns;
    Eigen::SparseMatrix<double> extend;  // lattice values = extend * unknown values
    Eigen::MatrixXd affine;              // 1, x - c, y - c at the unknowns (c the pin)
};

Closure make_closure(const PotentialField& u, int neighbours = 16);
// Overwrites the lattice with the extension of its values at the unknowns.
void apply_closure(PotentialField& u, const Closure& c);

struct SolveState {
    PotentialField u;
    ScalarField A;
    Closure closure;
    std::vector<std::pair<int, int>> unknowns;  // interior correction nodes
    Eigen::VectorXd r;                          // Abreu(u) + A at the unknowns
    double max_residual = 0.0;
    double l2_residual = 0.0;  // h-weighted
    // Least-squares affine part of r (coefficients of 1, x - c, y - c) and the
    // remainder. The discrete problem fixes r only up to this affine part; its
    // size at convergence is the discretization's compatibility defect.
    Eigen::Vector3d compat = Eigen::Vector3d::Zero();
    double max_projected = 0.0;
    double l2_projected = 0.0;
    int steps = 0;
    double last_step = 0.0;
    bool converged = false;
    std::vector<double> damping;            // accepted step fraction per step
    std::vector<double> residual_history;   // max residual after each step, starting value first
    std::vector<double> projected_history;  // same for the residual modulo its affine part
    std::vector<double> functional_history; // F(u) after each step, starting value first
    std::vector<double> min_eigenvalue;     // smallest Hessian eigenvalue over the unknowns
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolveState last)
        : std::runtime_error(what), last_(std::move(last)) {}
    const SolveState& last_state() const { return last_; }

private:
    SolveState last_;
};

// Abreu(u) + A at every interior node, in interior_nodes() order.
Eigen::VectorXd residual(const PotentialField& u, const ScalarField& A);

SolveState make_state(const PotentialField& u, const ScalarField& A, const SolveOptions& opt = {});

// Jacobian of the residual with respect to every lattice value, by coloured
// central differences (5 x 5 colouring matches the stencil radius).
Eigen::SparseMatrix<double> lattice_jacobian(const PotentialField& u, const ScalarField& A);
// Jacobian with respect to the unknowns: lattice_jacobian * extend.
Eigen::SparseMatrix<double> residual_jacobian(const PotentialField& u, const ScalarField& A, const Closure& c);
Eigen::SparseMatrix<double> residual_jacobian(const PotentialField& u, const ScalarField& A);

SolveState newton_step(const SolveState& s, const SolveOptions& opt = {});
SolveState solve(const PotentialField& u0, const ScalarField& A, const SolveOptions& opt = {});

struct PathSolve {
    std::vector<SolveState> states;
    bool completed = false;
    int failed_sample = -1;
    std::string diagnostic;
};

// Warm-started solves along the samples; start is the potential for sample 0
// (converged first if needed). Unbalanced samples are rejected before solving.
PathSolve continue_path(const ContinuityPath& path, const PotentialField& start, const SolveOptions& opt = {},
                        double balance_tol = 1e-8);

}  // namespace abreu
