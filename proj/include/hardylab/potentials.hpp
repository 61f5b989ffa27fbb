#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::potentials {

// Ground-state substitution weights and maximal-potential diagnostics for
// the exterior-ball geometry: the domain has its singularity at the origin
// and the exterior ball B(-2 rho e_n, 2 rho) tangent there.

// phi(x)   = (|x + rho e_n|^2 - rho^2) / (|x|^{n/2} |x + 2 rho e_n|^{n/2})
// Q(x)     = (n^2/4) (|x|^2 + 4 rho x_n) / (|x|^2 |x + 2 rho e_n|^2)
// phi_m    = phi * prod_{i<=m} X_i^{-1/2}(|x|/(3 kappa Dtilde))
// Q_m      = Q + (1/|x|^2) { (n/2)(|x|^2 + 2 rho x_n)/|x + 2 rho e_n|^2
//                            - |x|^2/(|x|^2 + 2 rho x_n) } sum_{k<=m} X_1...X_k
struct GroundStateWeights {
    int n = 3;
    double rho = 1.0;
    int m = 0;
    double Dtilde = 1.0;  // scale in the X_i arguments, >= domain size
};

// x is an n-vector with the last coordinate along e_n.
double phi(const std::vector<double>& x, const GroundStateWeights& w);
double q(const std::vector<double>& x, const GroundStateWeights& w);
double phi_m(const std::vector<double>& x, const GroundStateWeights& w);
double q_m(const std::vector<double>& x, const GroundStateWeights& w);

struct GroundstateCheck {
    double lhs = 0.0;      // int |grad(phi w)|^2
    double rhs = 0.0;      // int phi^2 |grad w|^2 + n^2 rho^2 int phi^2 w^2 / (|x|^2 |x+2rho e_n|^2)
    double rel_err = 0.0;
    double self_err = 0.0; // quadrature self-convergence estimate
};

// Verifies the substitution identity with w = a radial bump supported in the
// shell a < |x| < b (the shell must avoid 0 and -2 rho e_n). Axisymmetric
// meridian quadrature at `level` and 2x`level` Gauss points per axis.
GroundstateCheck groundstate_identity_check(int n, double rho, double a, double b,
                                            double amplitude = 1.0, int level = 48);

enum class PotentialFamily { power, logweighted, tabulated };

struct PotentialSpec {
    PotentialFamily family = PotentialFamily::logweighted;
    double s = 1.0;      // power family: V = |x|^{-s}
    double alpha = 3.0;  // logweighted family: V = X_1^alpha(|x|/D)/|x|^2
    double D = 1.0;
    std::function<double(double r)> tabulated;  // radial majorant, no metadata
};

struct SubcriticalResult {
    bool finite = false;
    double beta = 0.0;          // effective exponent of the reduced integral
    double value = 0.0;         // finite case: the reduced 1D integral
    std::string divergence;     // infinite case: how the partial integrals grow
};

// Classifies int V^{n/2} X_1^{1-n}(|x|/D) dx near the singularity through the
// 1D reduction dX_1 = X_1^2 dt/t. For the logweighted family the reduced
// integral is int_0^1 X^{beta-2} dX with beta = alpha n/2 + 1 - n.
SubcriticalResult subcritical_test(const PotentialSpec& V, int n, double tol = 1e-10);

struct CrvResult {
    std::vector<std::pair<int, double>> trace;  // (dofs, upper bound) per level
    double value = 0.0;
    double residual = 0.0;
};

// Certified upper bounds for
//   C_r(V) = inf [ int |grad u|^2 - (n^2/4) int u^2/|x|^2 + lambda int u^2 ]
//            / int V u^2
// over u vanishing on the boundary of {|x + 2 rho e_n| > 2 rho} cap B_r.
// Raises IndefiniteFormError when the assembled numerator form is indefinite
// at the current resolution (refinement requested rather than a negative
// constant reported).
CrvResult cr_v_estimate(const PotentialSpec& V, int n, double rho, double r, int levels,
                        double lambda = 0.0, double tol = 1e-8);

// The cone ground-state substitution weight |x|^{-(n-2)/2} phi_1(omega),
// with phi_1 linearly interpolated from a cap eigenfunction solve. The last
// coordinate of x is the cone axis.
double cone_substitution_weight(const std::vector<double>& cap_nodes,
                                const std::vector<double>& cap_values, int n,
                                const std::vector<double>& x);

struct ConeSobolevBound {
    double coarse = 0.0;  // from the cap surface measure |Sigma|^{2/n}
    double sharp = 0.0;   // from the normalized cap eigenfunction's L^{2n/(n-2)} norm
    double mu1 = 0.0;
    double cap_measure = 0.0;
};

// Upper bounds for the Sobolev constant in the cone Hardy-Sobolev
// inequality; sharp <= coarse by the normalization of the eigenfunction.
ConeSobolevBound cone_sobolev_bound(int n, double angle, int resolution = 512);

}  // namespace hardylab::potentials
