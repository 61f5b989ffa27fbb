#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hardylab {

// Error hierarchy. Every precondition violation throws; callers that want a
// report instead of a crash (the CLI) catch at the dispatch boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : Error {
    using Error::Error;
};
struct ToleranceError : Error {
    using Error::Error;
};
struct ConvergenceError : Error {
    using Error::Error;
};
struct GeometryError : Error {
    using Error::Error;
};
struct SupportError : Error {
    using Error::Error;
};
struct IndefiniteFormError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};

// Geometric parameter bundle shared by the higher-level drivers.
struct Params {
    int n = 3;           // ambient dimension
    double rho = 1.0;    // exterior-ball radius scale
    double tau = 1.0;    // annulus width ratio
    double theta = 1.0;  // cap angle
    double D = 1.0;      // domain size sup |x|
    double R = 1.0;      // half-ball radius
    int m = 1;           // log-improvement depth
};

// A numeric value together with a certified bound on what was left out.
// Invariant: the exact quantity lies in [value, value + tail_bound].
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    long terms_used = 0;
};

// Eigenvalue with an algebraic (or extrapolation) residual and the
// per-resolution history it came from.
struct EigenEstimate {
    double value = 0.0;
    double residual = 0.0;
    std::vector<std::pair<int, double>> trace;  // (resolution, value)
};

// Surface measure of the unit sphere S^k in R^{k+1}.
inline double sphere_surface(int k) {
    if (k < 0) throw DomainError("sphere_surface: k must be >= 0");
    return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

// Best Sobolev constant pi n (n-2) (Gamma(n/2)/Gamma(n))^{2/n}, n >= 3.
inline double sobolev_constant(int n) {
    if (n < 3) throw DomainError("sobolev_constant: n must be >= 3");
    double lg = std::lgamma(0.5 * n) - std::lgamma(double(n));
    return M_PI * n * (n - 2.0) * std::exp(2.0 * lg / n);
}

}  // namespace hardylab
