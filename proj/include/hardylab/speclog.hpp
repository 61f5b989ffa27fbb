#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::speclog {

// Iterated logarithm family on (0,1]:
//   X_1(t) = 1/(1 - ln t),   X_{k+1}(t) = X_k(X_1(t)),
// so X_k is the k-th functional iterate of X_1. All values lie in (0,1],
// fixed point at t = 1.

inline constexpr long kDefaultTermCap = 1'000'000;

// X_k(t); domain error outside (0,1] or k < 1.
double eval_x(int k, double t);

// X_1(t) X_2(t) ... X_i(t).
double prod_x(int i, double t);

// eta(t)   = sum_{i>=1} X_1(t)...X_i(t)
// big_b(t) = sum_{i>=1} X_1^2(t)...X_i^2(t)
//
// Both are summed with a certified remainder enclosure: after N terms the
// remainder equals a_N * eta(s_N) (resp. a_N^2 * B(s_N)) with s_N = X_N(t),
// and eta near 1 admits the closed-form two-sided bounds implemented in
// eta_tail_bounds(). The returned SeriesValue satisfies
//   exact in [value, value + tail_bound].
// Throws ToleranceError when the cap is hit before tail_bound <= tol
// (t near 1 makes the series arbitrarily slow).
SeriesValue eta(double t, double tol = 1e-9, long term_cap = kDefaultTermCap);
SeriesValue big_b(double t, double tol = 1e-9, long term_cap = kDefaultTermCap);

struct EtaB {
    SeriesValue eta;
    SeriesValue b;
};
// One pass over the shared iterate orbit; cheaper than two separate sums.
EtaB eta_and_b(double t, double tol = 1e-9, long term_cap = kDefaultTermCap);

// Midpoint of the certified enclosure; convenience for consumers that want a
// single number (error <= tail_bound/2).
double eta_mid(double t, double tol = 1e-9);
double big_b_mid(double t, double tol = 1e-9);

// Tail-corrected evaluation at a fixed truncation depth. Smooth in t, which
// finite-difference consumers need; pick N from an adaptive call first.
struct EtaBMid {
    double eta = 0.0;
    double b = 0.0;
};
EtaBMid eta_b_fixed_depth(double t, long N);

// Rigorous bounds on eta(1-eps): lower/upper valid for eps in (0, 1/2).
// Exposed for tests; these drive the tail enclosures above.
std::pair<double, double> eta_tail_bounds(double eps);

// Plain partial sum of the first N terms (no tail work); test hook for the
// monotonicity-in-term-count property.
double eta_partial_sum(double t, long N);
double big_b_partial_sum(double t, long N);

struct KappaResult {
    double kappa = 0.0;        // reported root of eta(1/kappa) = 1/4
    double residual = 0.0;     // eta(1/kappa) - 1/4 under the solver's evaluator
    double uncertainty = 0.0;  // half-width of the eta enclosure mapped to kappa
    double kappa_secant = 0.0; // independent secant solve, for cross-checking
    long terms = 0;            // truncation depth of the solver's evaluator
};

// Unique kappa > 1 with eta(1/kappa) = 1/4, by bisection on the strictly
// increasing map t -> eta(t); a secant solve on the same evaluator is
// reported alongside. tol bounds the accepted |residual|.
KappaResult solve_kappa(double tol = 1e-12);

// long-double variant of the root (same truncation depth); cross-check path.
long double solve_kappa_extended();

// Max relative error of the closed-form derivatives
//   d/dt X_k = (1/t) X_1...X_{k-1} X_k^2
//   d/dt eta = (eta^2 + B) / (2t)
// against Richardson-extrapolated central differences on the given (k,t)
// grid; k = 0 entries request the eta identity.
double derivative_identity_report(const std::vector<std::pair<int, double>>& grid);

}  // namespace hardylab::speclog
