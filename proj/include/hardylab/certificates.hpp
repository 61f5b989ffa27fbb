#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::certificates {

// Pointwise/variational certificates for the half-ball and exterior-ball
// Hardy inequalities: randomized remainder suites, the sigma/tau parameter
// certificates, the counterexample bound, and the divergence-field identity
// check.

enum class InequalityId {
    halfball_sobolev,      // n^2/4 Hardy + Sobolev term, X_1(|x|/R)
    halfball_mlogs,        // + (1/4) sum_{i<=m} log terms + Sobolev, X_i(|x|/R)
    halfball_logseries,    // + (1/4) full log series, X_i(|x|/R)
    halfball_extra,        // + full log series at X_i(|x|/(kappa R)) + |x|^{-3/2} term
    domain_hardy,          // exterior-ball domain, plain n^2/4
    domain_hardy_sobolev,  // exterior-ball domain + Sobolev, X_1(|x|/3D)
    domain_logseries,      // exterior-ball domain + log series, X_i(|x|/(3 kappa D))
};

InequalityId inequality_from_string(const std::string& s);
std::string to_string(InequalityId id);

struct InequalitySpec {
    InequalityId id = InequalityId::halfball_logseries;
    int n = 3;
    double R = 1.0;    // half-ball radius
    double rho = 1.0;  // exterior-ball radius (domain_* ids)
    double D = 0.0;    // domain size; 0 = largest admissible default
    int m = 1;         // log depth for halfball_mlogs
    double sobolev_c = 0.0;  // coefficient tested on the Sobolev term
};

// validates hypotheses (e.g. rho >= D/sigma_n) and fills defaulted fields
InequalitySpec resolve(InequalitySpec spec);

// Separable trial u(x) = f(|x|) phi(polar angle), phi(t) = cos t (1 + ac(1-cos t)).
// f(r) = r^beta (1 + c1 rho + c2 rho^2) cut(rho) with rho the log position in
// [r_lo, r_hi] and cut a cubic smoothstep at both support edges.
struct SeparableTrial {
    double beta = 0.0;
    double r_lo = 0.1, r_hi = 0.5;
    double c1 = 0.0, c2 = 0.0;
    double ang_c = 0.0;

    double radial(double r) const;
    double radial_d(double r) const;
};

struct Remainder {
    double value = 0.0;       // LHS - RHS of the inequality for this trial
    double quad_error = 0.0;  // accumulated quadrature/interpolation allowance
    double hardy_part = 0.0;  // remainder with the Sobolev term excluded
    double sobolev_term = 0.0;
};

Remainder remainder(const InequalitySpec& spec, const SeparableTrial& u);

struct SuiteReport {
    long count = 0;
    uint64_t seed = 0;
    long violations = 0;       // trials with value < -quad_error
    double min_value = 0.0;
    double min_quad_error = 0.0;
    SeparableTrial argmin;
    std::optional<double> probe_c;  // largest admissible Sobolev coefficient
};

SuiteReport random_trial_suite(const InequalitySpec& spec, long count, uint64_t seed,
                               bool probe_c = false);

struct GefCertificate {
    bool holds = false;
    double margin = 0.0;   // 1 - max LHS over the admissible range
    double t_max = 0.0;    // right end of the certified range
};

// Verifies n^2 r^{1/2} t^{1/2} (t+4) (t+2)^{1/2} <= 1 for t <= 1/(75 n^4 r)
// with r = sigma_n, via the grid maximum plus monotonicity of the left side.
GefCertificate cert_gef(int n);

// Largest tau* with X_1^2(t/(2(t+1))) >= n^2 t(t+2) on (0, tau*]: a certified
// lower bound for the annulus threshold.
double tau_lower_bound(int n);
// 2 e^{pi/sqrt(n-1)}: above this the annulus constant drops below n^2/4.
double tau_upper_bound(int n);

struct CounterexampleBound {
    double upper_bound = 0.0;  // ((n-2)/2)^2 + (pi/ln(2 rho cos theta))^2 + lambda_1
    double threshold = 0.0;    // n^2/4
    double lambda1 = 0.0;
    double rho_condition = 0.0;  // right side of the smallness condition on rho
    bool cond = false;           // rho < rho_condition
};

CounterexampleBound counterexample_bound(int n, double theta, double rho);

struct DivFieldReport {
    double max_rel_discrepancy = 0.0;
    double min_closed_form_margin = 0.0;  // min over samples of closed form - n^2/(4|x|^2)
    long samples = 0;
};

// Checks div T - |T|^2 against its closed form for the field
//   T = ((n + eta)/2) x/|x|^2 - e_n/x_n + x / (2 (sqrt(R)-sqrt(|x|)) |x|^{3/2})
// with eta = eta(|x|/(kappa R)), by Richardson central differences at the
// given sample points.
DivFieldReport div_field_check(int n, double R, const std::vector<std::vector<double>>& samples);
// seeded interior sampler (margins well inside the preconditions)
std::vector<std::vector<double>> sample_halfball_points(int n, double R, long count, uint64_t seed);

// cached kappa for the log-series scalings
double kappa();

}  // namespace hardylab::certificates
