#include "hardylab/sturm1d.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/quadrature.hpp"

namespace hardylab::sturm1d {

namespace {

double cap_weight(int n, double t) { return std::pow(std::abs(std::sin(t)), n - 2); }

// cell integral of the weight by a short Gauss rule
double cell_mass(int n, double a, double b) {
    auto f = [&](double t) { return cap_weight(n, t); };
    return quad::gauss(f, a, b, 4);
}

}  // namespace

namespace detail {

int sturm_count(const TriPencil& p, double lambda) {
    const size_t n = p.kd.size();
    int count = 0;
    double d = p.kd[0] - lambda * p.md[0];
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
    for (size_t i = 1; i < n; ++i) {
        double di = p.kd[i] - lambda * p.md[i] - p.ke[i - 1] * p.ke[i - 1] / d;
        if (di == 0.0) di = -1e-300;
        if (di < 0.0) ++count;
        d = di;
    }
    return count;
}

double kth_eigenvalue(const TriPencil& p, int k) {
    const size_t n = p.kd.size();
    if (k < 1 || size_t(k) > n) throw DomainError("kth_eigenvalue: index out of range");
    // Gershgorin bracket for the pencil
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double off = 0.0;
        if (i > 0) off += std::abs(p.ke[i - 1]);
        if (i + 1 < n) off += std::abs(p.ke[i]);
        lo = std::min(lo, (p.kd[i] - off) / p.md[i]);
        hi = std::max(hi, (p.kd[i] + off) / p.md[i]);
    }
    hi += 1.0;
    lo -= 1.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        (sturm_count(p, mid) >= k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> eigenvector(const TriPencil& p, double lambda) {
    const size_t n = p.kd.size();
    // shifted tridiagonal solve, a couple of inverse-iteration sweeps
    const double shift = lambda * (1.0 + 1e-9) + 1e-13;
    std::vector<double> x(n, 1.0), a(n), b(n), c(n);
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (size_t i = 0; i < n; ++i) {
            a[i] = p.kd[i] - shift * p.md[i];
            b[i] = (i + 1 < n) ? p.ke[i] : 0.0;
        }
        // Thomas algorithm with M x as the right side
        std::vector<double> rhs(n);
        for (size_t i = 0; i < n; ++i) rhs[i] = p.md[i] * x[i];
        c = b;
        for (size_t i = 1; i < n; ++i) {
            double m = b[i - 1] / a[i - 1];
            a[i] -= m * b[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        x[n - 1] = rhs[n - 1] / a[n - 1];
        for (size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - c[i] * x[i + 1]) / a[i];
        double nrm = 0.0;
        for (size_t i = 0; i < n; ++i) nrm += p.md[i] * x[i] * x[i];
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
    }
    // fix sign: make the first sizable component positive
    for (double v : x)
        if (std::abs(v) > 1e-8) {
            if (v < 0.0)
                for (double& w : x) w = -w;
            break;
        }
    return x;
}

// Builds the finite-difference pencil for a cap problem at N cells.
// Unknown layout:
//   cone_cap:    nodes t_i = i h, i = 0..N-1 (t_N = angle is Dirichlet);
//                natural condition at t = 0 (zero flux, the weight vanishes
//                there for n >= 3)
//   example_cap: nodes t_i = angle + i h, i = 1..N (t_0 = angle Dirichlet);
//                Neumann at pi by ghost-point reflection, which halves the
//                last row
TriPencil build_cap_pencil(const CapProblem& p, int N) {
    detail::TriPencil pen;
    const int n = p.n;
    if (p.variant == CapVariant::cone_cap) {
        const double h = p.angle / N;
        pen.kd.resize(N);
        pen.ke.resize(N - 1);
        pen.md.resize(N);
        auto wmid = [&](int i) { return cap_weight(n, (i + 0.5) * h); };
        for (int i = 0; i < N; ++i) {
            double wl = (i == 0) ? 0.0 : wmid(i - 1);
            double wr = wmid(i);
            pen.kd[i] = (wl + wr) / h;
            if (i + 1 < N) pen.ke[i] = -wr / h;
            double cl = (i == 0) ? 0.0 : (i - 0.5) * h;
            pen.md[i] = cell_mass(n, (i == 0) ? 0.0 : cl, (i + 0.5) * h);
        }
    } else {
        const double h = (M_PI - p.angle) / N;
        pen.kd.resize(N);
        pen.ke.resize(N - 1);
        pen.md.resize(N);
        auto node = [&](int i) { return p.angle + (i + 1) * h; };
        auto wmid = [&](int i) { return cap_weight(n, p.angle + (i + 0.5) * h); };
        for (int i = 0; i < N; ++i) {
            double wl = wmid(i);
            double wr = (i + 1 < N) ? wmid(i + 1) : 0.0;
            if (i + 1 < N) {
                pen.kd[i] = (wl + wr) / h;
                pen.ke[i] = -wr / h;
                pen.md[i] = cell_mass(n, node(i) - 0.5 * h, node(i) + 0.5 * h);
            } else {
                // ghost reflection at pi, row halved for symmetry
                pen.kd[i] = wl / h;
                pen.md[i] = cell_mass(n, node(i) - 0.5 * h, M_PI);
            }
        }
    }
    return pen;
}

}  // namespace detail

CapSolution cap_eigenpair(const CapProblem& p, int resolution) {
    if (p.n < 2) throw DomainError("cap_eigenpair: n >= 2");
    if (!(p.angle > 0.0) || !(p.angle < M_PI)) throw DomainError("cap_eigenpair: angle in (0,pi)");
    if (p.index < 1) throw DomainError("cap_eigenpair: index >= 1");
    if (resolution < 64) throw DomainError("cap_eigenpair: resolution >= 64");

    CapSolution out;
    double lam[3];
    detail::TriPencil finest;
    int Nf = 0;
    for (int lev = 0; lev < 3; ++lev) {
        const int N = resolution << lev;
        detail::TriPencil pen = detail::build_cap_pencil(p, N);
        lam[lev] = detail::kth_eigenvalue(pen, p.index);
        out.estimate.trace.emplace_back(N, lam[lev]);
        if (lev == 2) {
            finest = std::move(pen);
            Nf = N;
        }
    }
    const double d1 = std::abs(lam[1] - lam[0]);
    const double d2 = std::abs(lam[2] - lam[1]);
    if (!(d2 <= d1) && d2 > 1e-13 * std::abs(lam[2]))
        throw ConvergenceError("cap_eigenpair: trace differences fail to decrease");
    out.estimate.value = lam[2] + (lam[2] - lam[1]) / 3.0;
    out.estimate.residual = std::max(d2 / 3.0, 1e-15 * std::abs(lam[2]));

    // eigenfunction at the finest level, weighted-normalized
    std::vector<double> v = detail::eigenvector(finest, lam[2]);
    const double omega = sphere_surface(p.n - 2);
    double nrm = 0.0;
    for (size_t i = 0; i < v.size(); ++i) nrm += finest.md[i] * v[i] * v[i];
    const double scale = 1.0 / std::sqrt(omega * nrm);
    if (p.variant == CapVariant::cone_cap) {
        const double h = p.angle / Nf;
        for (int i = 0; i < Nf; ++i) {
            out.nodes.push_back(i * h);
            out.values.push_back(v[i] * scale);
        }
        out.nodes.push_back(p.angle);
        out.values.push_back(0.0);
    } else {
        const double h = (M_PI - p.angle) / Nf;
        out.nodes.push_back(p.angle);
        out.values.push_back(0.0);
        for (int i = 0; i < Nf; ++i) {
            out.nodes.push_back(p.angle + (i + 1) * h);
            out.values.push_back(v[i] * scale);
        }
    }
    return out;
}

AnnulusConstant radial_annulus_constant(int n, double a, double b, int resolution) {
    if (!(a > 0.0) || !(b > a)) throw DomainError("radial_annulus_constant: need 0 < a < b");
    AnnulusConstant out;
    const double L = std::log(b / a);
    out.closed_form = 0.25 * (n - 2.0) * (n - 2.0) + (M_PI / L) * (M_PI / L);

    // independent numeric route: log coordinate s = ln r turns the quotient
    // into -(e^{(n-2)s} f')' = lambda e^{(n-2)s} f with Dirichlet ends
    double lam[3];
    for (int lev = 0; lev < 3; ++lev) {
        const int N = resolution << lev;
        const double h = L / N;
        const double s0 = std::log(a);
        detail::TriPencil pen;
        pen.kd.resize(N - 1);
        pen.ke.resize(N - 2);
        pen.md.resize(N - 1);
        auto w = [&](double s) { return std::exp((n - 2.0) * s); };
        for (int i = 1; i < N; ++i) {
            const double wl = w(s0 + (i - 0.5) * h), wr = w(s0 + (i + 0.5) * h);
            pen.kd[i - 1] = (wl + wr) / h;
            if (i < N - 1) pen.ke[i - 1] = -wr / h;
            pen.md[i - 1] = quad::gauss(w, s0 + (i - 0.5) * h, s0 + (i + 0.5) * h, 4);
        }
        lam[lev] = detail::kth_eigenvalue(pen, 1);
        out.numeric.trace.emplace_back(N, lam[lev]);
    }
    out.numeric.value = lam[2] + (lam[2] - lam[1]) / 3.0;
    out.numeric.residual = std::abs(lam[2] - lam[1]) / 3.0;
    return out;
}

double cone_hardy_constant(int n, double angle, int resolution) {
    CapProblem p{n, angle, CapVariant::cone_cap, 1};
    return 0.25 * (n - 2.0) * (n - 2.0) + cap_eigenpair(p, resolution).estimate.value;
}

double sharpness_quotient(int n, double eps) {
    if (n < 2) throw DomainError("sharpness_quotient: n >= 2");
    if (!(eps > 0.0)) throw DomainError("sharpness_quotient: eps must be positive (integral diverges)");
    if (eps >= 0.5) throw DomainError("sharpness_quotient: eps in (0, 1/2)");
    const double alpha = -0.5 * (n - 2.0) + eps;
    // u = r^alpha (1-r); the substitution r = e^{-s} collapses every power of
    // r in both integrands to e^{-2 eps s}, so the r->0 endpoint becomes a
    // plain exponential tail with no overflowing intermediates:
    //   u^2 r^{n-3} dr      = e^{-2 eps s} (1-r)^2 ds
    //   u'^2 r^{n-1} dr     = e^{-2 eps s} (alpha (1-r) - r)^2 ds
    auto den_int = [&](double s) {
        const double r = std::exp(-s);
        return std::exp(-2.0 * eps * s) * (1.0 - r) * (1.0 - r);
    };
    auto num_int = [&](double s) {
        const double r = std::exp(-s);
        const double g = alpha * (1.0 - r) - r;
        return std::exp(-2.0 * eps * s) * g * g;
    };
    const double smax = 45.0 / (2.0 * eps);
    double den = 0.0, num = 0.0;
    // geometric panels: fine near s=0 where (1-r) varies, long tail after
    std::vector<double> cuts{0.0};
    for (double s = 0.25; s < smax; s *= 1.6) cuts.push_back(s);
    cuts.push_back(smax);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        den += quad::gauss(den_int, cuts[i], cuts[i + 1], 24);
        num += quad::gauss(num_int, cuts[i], cuts[i + 1], 24);
    }
    return (num + (n - 1.0) * den) / den;
}

}  // namespace hardylab::sturm1d
