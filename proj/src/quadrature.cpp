#include "hardylab/quadrature.hpp"

#include <array>
#include <map>
#include <mutex>

namespace hardylab::quad {

static Rule1D make_gauss_legendre(int m) {
    Rule1D r;
    r.nodes.resize(m);
    r.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Chebyshev initial guess, Newton on P_m.
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.weights[i] = w;
        r.nodes[m - 1 - i] = x;
        r.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) r.nodes[m / 2] = 0.0;
    return r;
}

const Rule1D& gauss_legendre(int m) {
    static std::map<int, Rule1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, make_gauss_legendre(m)).first;
    return it->second;
}

const TriRule& triangle_rule(int degree) {
    static TriRule deg2, deg5, deg7;
    static std::once_flag once;
    std::call_once(once, [] {
        deg2.bary = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
        deg2.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};

        // 7-point degree-5 rule
        const double a = (6.0 + std::sqrt(15.0)) / 21.0, b = (6.0 - std::sqrt(15.0)) / 21.0;
        const double wa = (155.0 + std::sqrt(15.0)) / 1200.0, wb = (155.0 - std::sqrt(15.0)) / 1200.0;
        deg5.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
                     {1 - 2 * a, a, a}, {a, 1 - 2 * a, a}, {a, a, 1 - 2 * a},
                     {1 - 2 * b, b, b}, {b, 1 - 2 * b, b}, {b, b, 1 - 2 * b}};
        deg5.weights = {9.0 / 40, wa, wa, wa, wb, wb, wb};

        // 13-point degree-7 rule (Gatermann)
        const double a1 = 0.0651301029022, a2 = 0.8697397941956;
        const double b1 = 0.3128654960049, b2 = 0.6384441885698, b3 = 0.0486903154253;
        const double c1 = 0.2603459660790, c2 = 0.4793080678419;
        const double w1 = 0.0533472356088, w2 = 0.0771137608903, w3 = 0.1756152574332;
        const double w0 = -0.1495700444677;
        deg7.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
                     {a1, a1, a2}, {a1, a2, a1}, {a2, a1, a1},
                     {b1, b2, b3}, {b1, b3, b2}, {b2, b1, b3},
                     {b2, b3, b1}, {b3, b1, b2}, {b3, b2, b1},
                     {c1, c1, c2}, {c1, c2, c1}, {c2, c1, c1}};
        deg7.weights = {w0, w1, w1, w1, w2, w2, w2, w2, w2, w2, w3, w3, w3};
    });
    switch (degree) {
        case 2: return deg2;
        case 5: return deg5;
        case 7: return deg7;
        default: throw DomainError("triangle_rule: unsupported degree");
    }
}

}  // namespace hardylab::quad
