#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "abreu/potential.hpp"

namespace abreu {

// An input fails a stated precondition (not scalar-flat, hypothesis unmet,
// wrong domain). Distinct from a failed comparison.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct IdentityReport {
    std::string name;
    std::string digest;  // FNV-1a of the serialized inputs
    double lhs = 0.0, rhs = 0.0;
    double ratio = 0.0;  // lhs / rhs, NaN when rhs == 0
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::pair<std::string, double>> details;  // named intermediate values, in order
    std::string note;

    double detail(const std::string& key) const;
};

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
// Canonical text of a potential (domain, analytic part, lattice checksum).
std::string describe(const PotentialField& u);

// Largest |Abreu(u)| over the points, analytic jets plus interpolated correction.
double max_abreu(const PotentialField& u, const std::vector<Vec2>& points);

// u plus the linear function making grad u(c) = 0.
PotentialField normalized_at(const PotentialField& u, const Vec2& c);

// kappa = J(p) L1^2 L2^2 / Delta^2 with V1, V2 the gradient jumps across the
// axis segments of half-lengths L1, L2 through p, Delta = max(V1 L1, V2 L2).
// Passes when kappa is unchanged (relative tol) for the potential dilated by 2.
IdentityReport lemma14_ratio(const PotentialField& u, const Vec2& p, double L1, double L2,
                             double flat_tol = 1e-6, double tol = 1e-8);

// Integral of u^zz (z = x1 + x2, y = x1 - x2) over the segment z = R of the
// quarter plane, divided by R^2. Each report passes when its ratio matches the
// first nondegenerate R within tol; R = 0 gives lhs = 0 and no ratio.
std::vector<IdentityReport> lemma17_identity(const PotentialField& u, const std::vector<double>& Rs,
                                             double tol = 1e-8);

// f(t0) <= 18 int_0^R f, after checking |f''| <= f sigma on samples (relative
// slack hyp_tol), int_{l/2}^{l} sigma <= 1 for l = R 2^-k, and R >= 1.
// Unmet hypotheses throw PreconditionError.
IdentityReport lemma18_check(const std::function<double(double)>& f, const std::function<double(double)>& sigma,
                             double R, double t0, int samples = 2001, double hyp_tol = 1e-6);

// Energy of F over the triangle {x1, x2 >= 0, x1 + x2 <= R} against the flux
// of nu^i = F^ij_ab d_j u^ab - F^ja_jb d_a u^bi through its hypotenuse.
IdentityReport flux_identity(const PotentialField& u, double R, double flat_tol = 1e-6, double tol = 1e-8);

// max |u^ij G_ij| over interior nodes, G = 1/det(u_ij).
IdentityReport f_harmonic_check(const PotentialField& u, double flat_tol = 1e-6, double tol = 1e-9);

struct DetBoundOptions {
    int rings = 24;
    int angles = 64;
    double gradient_tol = 1e-8;
    double flat_tol = 1e-9;  // |A| below this is reported as the A = 0 branch
    double tol = 1e-8;  // relative, dilation invariance
};

// Implied constants of the two-sided determinant bounds on the disc B(c, R):
// c1 >= sup_{|x-c|<=R/4} det (R/rho)^2 when A- = 0, and c3 >= (inf det (R/rho)^2)^(-1/2)
// over {|grad u| <= rho/4} when A+ = 0. Passes when both are unchanged for the
// potential dilated by 2.
IdentityReport det_bounds(const PotentialField& u, const Vec2& c, double R, const DetBoundOptions& opt = {});

// Half-plane model: sup V over scan boxes of heights 1, 2, 4 grows linearly,
// the barrier 1/det - 2 x1 = -x1 attains its minimum over [1/4, 2] x [-1, 1]
// on the face x1 = 2, and the model is scalar-flat.
IdentityReport theorem2_evidence(int grid = 65);

}  // namespace abreu
