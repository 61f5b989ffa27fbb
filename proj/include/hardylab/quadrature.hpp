#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::quad {

struct Rule1D {
    std::vector<double> nodes;    // on (-1,1)
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre nodes by Newton iteration on P_m; cached per order.
const Rule1D& gauss_legendre(int m);

// integral of f over [a,b] with an m-point Gauss rule
template <class F>
double gauss(const F& f, double a, double b, int m = 16) {
    const Rule1D& r = gauss_legendre(m);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

// Panel-doubling integration: splits [a,b] into 2^k panels of m-point Gauss
// until two successive levels agree. err_out receives the last difference.
template <class F>
double gauss_refined(const F& f, double a, double b, double tol, double* err_out = nullptr,
                     int m = 16, int max_doublings = 12) {
    double prev = gauss(f, a, b, m);
    double err = std::abs(prev);
    for (int k = 1; k <= max_doublings; ++k) {
        const int panels = 1 << k;
        const double h = (b - a) / panels;
        double cur = 0.0;
        for (int p = 0; p < panels; ++p) cur += gauss(f, a + p * h, a + (p + 1) * h, m);
        err = std::abs(cur - prev);
        prev = cur;
        if (err <= tol * std::max(1.0, std::abs(cur))) break;
    }
    if (err_out) *err_out = err;
    return prev;
}

// Adaptive Gauss-Kronrod style bisection built on two Gauss levels.
template <class F>
double adaptive(const F& f, double a, double b, double abs_tol, double* err_out = nullptr) {
    struct Seg {
        double a, b;
    };
    std::vector<Seg> stack{{a, b}};
    double sum = 0.0, errsum = 0.0;
    int guard = 0;
    while (!stack.empty()) {
        if (++guard > 20000) throw ToleranceError("adaptive quadrature: too many subdivisions");
        Seg s = stack.back();
        stack.pop_back();
        double coarse = gauss(f, s.a, s.b, 8);
        double mid = 0.5 * (s.a + s.b);
        double fine = gauss(f, s.a, mid, 8) + gauss(f, mid, s.b, 8);
        double err = std::abs(fine - coarse);
        if (err <= abs_tol * std::max(1.0, (s.b - s.a) / (b - a)) || (s.b - s.a) < 1e-14 * (b - a)) {
            sum += fine;
            errsum += err;
        } else {
            stack.push_back({s.a, mid});
            stack.push_back({mid, s.b});
        }
    }
    if (err_out) *err_out = errsum;
    return sum;
}

// Symmetric triangle rules, exact to the stated polynomial degree.
// Points are barycentric triples with weights summing to 1 (scale by area).
struct TriRule {
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weights;
};
const TriRule& triangle_rule(int degree);  // degree in {2, 5, 7}

}  // namespace hardylab::quad
