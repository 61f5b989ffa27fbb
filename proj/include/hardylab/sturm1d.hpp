#pragma once

#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::sturm1d {

// Weighted Sturm-Liouville eigenproblems on spherical caps:
//   -(sin^{n-2} t  g')' = mu sin^{n-2} t  g
// cone_cap:    interval (0, angle), Dirichlet at angle, natural at 0
//              (mu_1 of the Laplace-Beltrami Dirichlet problem on the cap of
//              opening `angle`)
// example_cap: interval (angle, pi), Dirichlet at angle, Neumann at pi
//              (first eigenvalue lambda_1(n, angle) of the complementary cap)
enum class CapVariant { cone_cap, example_cap };

struct CapProblem {
    int n = 3;
    double angle = M_PI / 2;
    CapVariant variant = CapVariant::cone_cap;
    int index = 1;  // k-th eigenvalue, 1-based
};

struct CapSolution {
    EigenEstimate estimate;
    // eigenfunction sampled at the finest resolution, normalized so that
    // omega_{n-2} * integral g^2 sin^{n-2} = 1
    std::vector<double> nodes;
    std::vector<double> values;
};

// Second-order finite differences on resolutions {N, 2N, 4N} with Richardson
// extrapolation; k-th eigenvalue selected deterministically by Sturm
// inertia-count bisection on the tridiagonal pencil.
CapSolution cap_eigenpair(const CapProblem& p, int resolution = 512);

struct AnnulusConstant {
    double closed_form = 0.0;  // ((n-2)/2)^2 + (pi/ln(b/a))^2
    EigenEstimate numeric;     // independent eigensolve of the radial quotient
};

// Best constant of  int_a^b f'^2 r^{n-1} dr / int_a^b f^2 r^{n-3} dr  over
// f(a) = f(b) = 0.
AnnulusConstant radial_annulus_constant(int n, double a, double b, int resolution = 512);

// (n-2)^2/4 + mu_1(cap of the given opening angle).
double cone_hardy_constant(int n, double angle, int resolution = 512);

// Hardy quotient of the separable near-extremal trial
//   u(r, omega) = r^{-(n-2)/2 + eps} (1 - r) phi_1(omega)
// on the unit half ball; tends to n^2/4 as eps -> 0+.
double sharpness_quotient(int n, double eps);

namespace detail {
// Symmetric tridiagonal generalized pencil (K, M) with diagonal M > 0.
struct TriPencil {
    std::vector<double> kd;   // K diagonal
    std::vector<double> ke;   // K subdiagonal (size-1)
    std::vector<double> md;   // M diagonal
};
// number of eigenvalues < lambda (LDL^T inertia)
int sturm_count(const TriPencil& p, double lambda);
// k-th smallest eigenvalue (1-based) by bisection
double kth_eigenvalue(const TriPencil& p, int k);
// inverse iteration for the eigenvector at an isolated eigenvalue
std::vector<double> eigenvector(const TriPencil& p, double lambda);
// finite-difference pencil for a cap problem at N cells
TriPencil build_cap_pencil(const CapProblem& p, int N);
}  // namespace detail

}  // namespace hardylab::sturm1d
