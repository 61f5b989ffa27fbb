#include "hardylab/speclog.hpp"

#include <algorithm>
#include <cmath>

namespace hardylab::speclog {

namespace {

template <class T>
T x1(T t) {
    return T(1) / (T(1) - std::log(t));
}

void check_t(double t, bool open_right) {
    if (!(t > 0.0) || t > 1.0 || (open_right && t == 1.0))
        throw DomainError("speclog: t must lie in (0,1" + std::string(open_right ? ")" : "]"));
}

}  // namespace

double eval_x(int k, double t) {
    if (k < 1) throw DomainError("eval_x: k must be >= 1");
    check_t(t, false);
    double x = t;
    for (int j = 0; j < k; ++j) x = x1(x);
    return x;
}

double prod_x(int i, double t) {
    if (i < 1) throw DomainError("prod_x: i must be >= 1");
    check_t(t, false);
    double x = t, p = 1.0;
    for (int j = 0; j < i; ++j) {
        x = x1(x);
        p *= x;
    }
    return p;
}

// Bounds for eta(s) with s = 1 - eps. Writing the factors of eta(s) as
// 1 - eps_j with eps_0 = eps and eps_{j+1} = -ln(1-eps_j)/(1 - ln(1-eps_j)),
// the recursion satisfies exactly
//   eps_{j+1} >= eps_j - eps_j^2/2            (upper route)
//   1/eps_{j+1} >= 1/eps_j + 1 - 1/(2(1-eps_j)) (lower route)
// which sandwich eps_j between harmonic sequences and give, by integral
// comparison of the resulting products,
//   eta(1-eps) <= (u + b)/(1 - b),  u = 1/eps, b = 1/(2-eps)
//   eta(1-eps) >= (u/g) (1+g/u)^{1-p} / (p-1),
//                 g = (1-2 eps)/(2(1-eps)), p = (1 + eps/(2(1-eps)))/g.
// Both are ~ 2/eps + O(1); the width stays O(1) as eps -> 0.
std::pair<double, double> eta_tail_bounds(double eps) {
    if (!(eps > 0.0) || eps >= 0.5) throw DomainError("eta_tail_bounds: eps in (0, 1/2) required");
    const double u = 1.0 / eps;
    const double b = 1.0 / (2.0 - eps);
    const double upper = (u + b) / (1.0 - b);
    const double g = (1.0 - 2.0 * eps) / (2.0 * (1.0 - eps));
    const double p = (1.0 + eps / (2.0 * (1.0 - eps))) / g;
    const double lower = (u / g) * std::pow(1.0 + g / u, 1.0 - p) / (p - 1.0);
    return {std::max(0.0, lower), upper};
}

namespace {

// Threshold below which the tail enclosure is used. Any value < 1/2 is
// valid; 0.2 keeps the bound constants tame.
constexpr double kTailEps = 0.2;

struct SumState {
    double s_eta = 0.0, c_eta = 0.0;  // Kahan
    double s_b = 0.0, c_b = 0.0;
    double a = 1.0;  // running product X_1...X_i
    double x = 0.0;  // current iterate X_i(t)
    long i = 0;

    void step(double t0_iterate) {
        x = (i == 0) ? x1(t0_iterate) : x1(x);
        a *= x;
        ++i;
        double y = a - c_eta, tt = s_eta + y;
        c_eta = (tt - s_eta) - y;
        s_eta = tt;
        double y2 = a * a - c_b, t2 = s_b + y2;
        c_b = (t2 - s_b) - y2;
        s_b = t2;
    }
};

}  // namespace

namespace {

// Shared summation loop; either side may run with an infinite tolerance, in
// which case it reports whatever enclosure is available when the other side
// stops.
EtaB sum_eta_b(double t, double tol_eta, double tol_b, long term_cap) {
    SumState st;
    st.x = t;
    st.step(t);
    bool eta_done = false, b_done = false;
    EtaB out;
    while (true) {
        const double eps = 1.0 - st.x;
        if (eps > 0.0 && eps <= kTailEps) {
            auto [lo, hi] = eta_tail_bounds(eps);
            const double width = st.a * (hi - lo);
            // remainder of B after i terms = a_i^2 * B(X_i(t)), and
            // B(s) <= X_1(s) * eta(s) termwise
            const double bbound = st.a * st.a * x1(st.x) * hi;
            if (!eta_done) {
                out.eta = {st.s_eta + st.a * lo, width, st.i};
                if (width <= tol_eta) eta_done = true;
            }
            if (!b_done) {
                out.b = {st.s_b, bbound, st.i};
                if (bbound <= tol_b) b_done = true;
            }
        }
        if (eta_done && b_done) break;
        if (st.i >= term_cap) {
            const bool eta_ok = eta_done || !(tol_eta < 1e297);
            const bool b_ok = b_done || !(tol_b < 1e297);
            if (eta_ok && b_ok && out.eta.terms_used > 0) break;
            throw ToleranceError("eta/big_b: requested tolerance unreachable within term cap");
        }
        st.step(t);
    }
    return out;
}

}  // namespace

EtaB eta_and_b(double t, double tol, long term_cap) {
    check_t(t, true);
    if (!(tol > 0.0)) throw DomainError("eta_and_b: tol must be positive");
    return sum_eta_b(t, tol, tol, term_cap);
}

SeriesValue eta(double t, double tol, long term_cap) {
    check_t(t, true);
    if (!(tol > 0.0)) throw DomainError("eta: tol must be positive");
    return sum_eta_b(t, tol, 1e300, term_cap).eta;
}

SeriesValue big_b(double t, double tol, long term_cap) {
    check_t(t, true);
    if (!(tol > 0.0)) throw DomainError("big_b: tol must be positive");
    return sum_eta_b(t, 1e300, tol, term_cap).b;
}

double eta_mid(double t, double tol) {
    SeriesValue v = eta(t, tol);
    return v.value + 0.5 * v.tail_bound;
}

double big_b_mid(double t, double tol) {
    SeriesValue v = big_b(t, tol);
    return v.value + 0.5 * v.tail_bound;
}

EtaBMid eta_b_fixed_depth(double t, long N) {
    check_t(t, true);
    SumState st;
    st.x = t;
    for (long i = 0; i < N; ++i) st.step(t);
    const double eps = 1.0 - st.x;
    EtaBMid out;
    if (eps > 0.0 && eps < 0.5) {
        auto [lo, hi] = eta_tail_bounds(eps);
        out.eta = st.s_eta + st.a * 0.5 * (lo + hi);
        out.b = st.s_b + 0.5 * st.a * st.a * x1(st.x) * hi;
    } else {
        out.eta = st.s_eta;
        out.b = st.s_b;
    }
    return out;
}

double eta_partial_sum(double t, long N) {
    check_t(t, true);
    SumState st;
    st.x = t;
    for (long i = 0; i < N; ++i) st.step(t);
    return st.s_eta;
}

double big_b_partial_sum(double t, long N) {
    check_t(t, true);
    SumState st;
    st.x = t;
    for (long i = 0; i < N; ++i) st.step(t);
    return st.s_b;
}

namespace {

// Fixed-depth evaluator with tail-midpoint correction: smooth in t (no
// adaptive term-count jumps), which the root solvers and the finite
// differencing need.
template <class T>
T eta_fixed_depth(T t, long N) {
    T x = t, a = 1, s = 0, c = 0;
    for (long i = 0; i < N; ++i) {
        x = x1(x);
        a *= x;
        T y = a - c, tt = s + y;
        c = (tt - s) - y;
        s = tt;
    }
    const T eps = T(1) - x;
    const T u = T(1) / eps;
    const T b = T(1) / (T(2) - eps);
    const T upper = (u + b) / (T(1) - b);
    const T g = (T(1) - T(2) * eps) / (T(2) * (T(1) - eps));
    const T p = (T(1) + eps / (T(2) * (T(1) - eps))) / g;
    const T lower = (u / g) * std::pow(T(1) + g / u, T(1) - p) / (p - T(1));
    return s + a * T(0.5) * (lower + upper);
}

constexpr long kKappaCoarseDepth = 100'000;
constexpr long kKappaFineDepth = kDefaultTermCap;

template <class T>
T bisect_eta_root(T lo, T hi, long depth, T target, T t_tol, T f_tol, T* residual_out) {
    T flo = eta_fixed_depth(lo, depth) - target;
    T fhi = eta_fixed_depth(hi, depth) - target;
    if (!(flo < 0 && fhi > 0)) throw ConvergenceError("solve_kappa: bracket lost");
    T mid = lo, fmid = flo;
    while (hi - lo > t_tol) {
        mid = T(0.5) * (lo + hi);
        fmid = eta_fixed_depth(mid, depth) - target;
        (fmid < 0 ? lo : hi) = mid;
        if (std::abs(fmid) < f_tol) break;
    }
    if (residual_out) *residual_out = fmid;
    return mid;
}

}  // namespace

KappaResult solve_kappa(double tol) {
    if (!(tol > 0.0)) throw DomainError("solve_kappa: tol must be positive");
    // Coarse bracket with a cheap evaluator, then full-depth refinement.
    double lo = 1e-4, hi = 0.5, res = 0.0;
    double root = bisect_eta_root(lo, hi, kKappaCoarseDepth, 0.25, 1e-8, 1e-16, &res);
    lo = root - 5e-8;
    hi = root + 5e-8;
    root = bisect_eta_root(lo, hi, kKappaFineDepth, 0.25, 2e-16, std::max(1e-16, tol / 1000.0), &res);
    if (std::abs(res) > tol)
        throw ToleranceError("solve_kappa: residual above requested tolerance");

    // Secant on the same fine evaluator.
    double t0 = root * 0.999, t1 = root * 1.001;
    double f0 = eta_fixed_depth(t0, kKappaFineDepth) - 0.25;
    double f1 = eta_fixed_depth(t1, kKappaFineDepth) - 0.25;
    for (int it = 0; it < 60 && std::abs(t1 - t0) > 1e-17; ++it) {
        double t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
        t0 = t1;
        f0 = f1;
        t1 = t2;
        f1 = eta_fixed_depth(t1, kKappaFineDepth) - 0.25;
        if (f1 == 0.0) break;
    }

    // Enclosure half-width at the solver's truncation depth, mapped through
    // kappa = 1/t.
    double a = 1.0, x = root;
    for (long i = 0; i < kKappaFineDepth; ++i) {
        x = x1(x);
        a *= x;
    }
    auto [tlo, thi] = eta_tail_bounds(1.0 - x);
    SeriesValue enc{0.0, a * (thi - tlo), kKappaFineDepth};
    const double h = 1e-7;
    const double slope =
        (eta_fixed_depth(root + h, kKappaFineDepth) - eta_fixed_depth(root - h, kKappaFineDepth)) /
        (2 * h);
    KappaResult out;
    out.kappa = 1.0 / root;
    out.residual = res;
    out.kappa_secant = 1.0 / t1;
    out.terms = kKappaFineDepth;
    out.uncertainty = 0.5 * enc.tail_bound / std::max(slope, 1e-30) / (root * root);
    return out;
}

long double solve_kappa_extended() {
    long double res = 0;
    long double root = bisect_eta_root<long double>(1e-4L, 0.5L, kKappaCoarseDepth, 0.25L, 1e-8L, 1e-18L, &res);
    root = bisect_eta_root<long double>(root - 5e-8L, root + 5e-8L, kKappaFineDepth, 0.25L, 1e-18L, 1e-19L, &res);
    return 1.0L / root;
}

double derivative_identity_report(const std::vector<std::pair<int, double>>& grid) {
    double worst = 0.0;
    for (auto [k, t] : grid) {
        if (!(t > 0.0) || t >= 1.0) throw DomainError("derivative_identity_report: t in (0,1)");
        // the iterated logs vary on scale t, so the step is relative to t,
        // capped by the distance to the fixed point at 1
        const double h = std::min(1e-6 * t, 0.45 * (1.0 - t));
        double closed, fd;
        if (k >= 1) {
            closed = (k == 1 ? 1.0 : prod_x(k - 1, t)) * std::pow(eval_x(k, t), 2) / t;
            auto f = [&](double s) { return eval_x(k, s); };
            const double d1 = (f(t + h) - f(t - h)) / (2 * h);
            const double d2 = (f(t + h / 2) - f(t - h / 2)) / h;
            fd = (4.0 * d2 - d1) / 3.0;
        } else {
            // eta identity: d/dt eta = (eta^2 + B)/(2t). Fixed truncation
            // depth across the stencil keeps the difference clean; the
            // partial sums satisfy the identity exactly, so the enclosure
            // midpoint error is the only systematic term.
            EtaB eb = eta_and_b(t, 2e-8);
            const long N = std::max(eb.eta.terms_used, eb.b.terms_used);
            const double ev = eb.eta.value + 0.5 * eb.eta.tail_bound;
            const double bv = eb.b.value + 0.5 * eb.b.tail_bound;
            closed = (ev * ev + bv) / (2 * t);
            auto f = [&](double s) { return eta_fixed_depth(s, N); };
            const double d1 = (f(t + h) - f(t - h)) / (2 * h);
            const double d2 = (f(t + h / 2) - f(t - h / 2)) / h;
            fd = (4.0 * d2 - d1) / 3.0;
        }
        worst = std::max(worst, std::abs(fd - closed) / std::max(1e-300, std::abs(closed)));
    }
    return worst;
}

}  // namespace hardylab::speclog
