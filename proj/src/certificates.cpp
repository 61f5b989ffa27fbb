#include "hardylab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "hardylab/conformal.hpp"
#include "hardylab/quadrature.hpp"
#include "hardylab/speclog.hpp"
#include "hardylab/sturm1d.hpp"

namespace hardylab::certificates {

namespace sl = hardylab::speclog;

double kappa() {
    static const double k = sl::solve_kappa(1e-12).kappa;
    return k;
}

namespace {

// B(t) = sum X_1^2...X_i^2 tabulated as y*B(e^-y) on a uniform y-grid; the
// remainder integrands hit it at every quadrature node.
class BigBTable {
  public:
    BigBTable() {
        values_.resize(count_);
        for (int i = 0; i < count_; ++i) {
            const double y = y0_ + i * dy_;
            values_[i] = y * sl::big_b(std::exp(-y), 5e-10).value;
        }
    }

    double operator()(double t) const {
        const double y = -std::log(t);
        if (y < y0_ + dy_ || y > y0_ + (count_ - 2) * dy_) return sl::big_b_mid(t, 1e-9);
        const double s = (y - y0_) / dy_;
        const int j = std::min(count_ - 3, std::max(1, int(s)));
        const double u = s - j;
        // 4-point local cubic
        const double fm1 = values_[j - 1], f0 = values_[j], f1 = values_[j + 1], f2 = values_[j + 2];
        const double h = f0 + 0.5 * u * (f1 - fm1 + u * (2 * fm1 - 5 * f0 + 4 * f1 - f2 +
                                                         u * (3 * (f0 - f1) + f2 - fm1)));
        return h / y;
    }

  private:
    static constexpr double y0_ = 0.08;
    static constexpr double dy_ = 0.025;
    static constexpr int count_ = 3600;  // up to y = 90
    std::vector<double> values_;
};

const BigBTable& big_b_table() {
    static BigBTable table;
    return table;
}

// sum_{i<=m} (X_1...X_i)^2 at argument t
double partial_log_sum(int m, double t) {
    double x = t, a = 1.0, s = 0.0;
    for (int i = 0; i < m; ++i) {
        x = 1.0 / (1.0 - std::log(x));
        a *= x;
        s += a * a;
    }
    return s;
}

// X_1(t)...X_m(t)
double prod_x_local(int m, double t) {
    double x = t, a = 1.0;
    for (int i = 0; i < m; ++i) {
        x = 1.0 / (1.0 - std::log(x));
        a *= x;
    }
    return a;
}

double smoothstep(double s) { return s <= 0.0 ? 0.0 : (s >= 1.0 ? 1.0 : s * s * (3.0 - 2.0 * s)); }
double smoothstep_d(double s) { return (s <= 0.0 || s >= 1.0) ? 0.0 : 6.0 * s * (1.0 - s); }

constexpr double kCutLo = 0.15, kCutHi = 0.85;

}  // namespace

double SeparableTrial::radial(double r) const {
    if (r <= r_lo || r >= r_hi) return 0.0;
    const double L = std::log(r_hi / r_lo);
    const double rho = std::log(r / r_lo) / L;
    const double cut = smoothstep(rho / kCutLo) * smoothstep((1.0 - rho) / (1.0 - kCutHi));
    return std::pow(r, beta) * (1.0 + c1 * rho + c2 * rho * rho) * cut;
}

double SeparableTrial::radial_d(double r) const {
    if (r <= r_lo || r >= r_hi) return 0.0;
    const double L = std::log(r_hi / r_lo);
    const double rho = std::log(r / r_lo) / L;
    const double drho = 1.0 / (r * L);
    const double cut_a = smoothstep(rho / kCutLo), cut_b = smoothstep((1.0 - rho) / (1.0 - kCutHi));
    const double cut = cut_a * cut_b;
    const double dcut = (smoothstep_d(rho / kCutLo) / kCutLo * cut_b -
                         cut_a * smoothstep_d((1.0 - rho) / (1.0 - kCutHi)) / (1.0 - kCutHi)) *
                        drho;
    const double poly = 1.0 + c1 * rho + c2 * rho * rho;
    const double dpoly = (c1 + 2.0 * c2 * rho) * drho;
    const double rb = std::pow(r, beta);
    return beta * rb / r * poly * cut + rb * dpoly * cut + rb * poly * dcut;
}

InequalityId inequality_from_string(const std::string& s) {
    if (s == "halfball-sobolev") return InequalityId::halfball_sobolev;
    if (s == "halfball-mlogs") return InequalityId::halfball_mlogs;
    if (s == "halfball-logseries") return InequalityId::halfball_logseries;
    if (s == "halfball-extra") return InequalityId::halfball_extra;
    if (s == "domain-hardy") return InequalityId::domain_hardy;
    if (s == "domain-hardy-sobolev") return InequalityId::domain_hardy_sobolev;
    if (s == "domain-logseries") return InequalityId::domain_logseries;
    throw ValidationError("unknown inequality id: " + s);
}

std::string to_string(InequalityId id) {
    switch (id) {
        case InequalityId::halfball_sobolev: return "halfball-sobolev";
        case InequalityId::halfball_mlogs: return "halfball-mlogs";
        case InequalityId::halfball_logseries: return "halfball-logseries";
        case InequalityId::halfball_extra: return "halfball-extra";
        case InequalityId::domain_hardy: return "domain-hardy";
        case InequalityId::domain_hardy_sobolev: return "domain-hardy-sobolev";
        case InequalityId::domain_logseries: return "domain-logseries";
    }
    throw ValidationError("bad inequality id");
}

InequalitySpec resolve(InequalitySpec spec) {
    if (spec.n < 2) throw ValidationError("inequality spec: n >= 2");
    const bool needs_sobolev = spec.id == InequalityId::halfball_sobolev ||
                               spec.id == InequalityId::halfball_mlogs ||
                               spec.id == InequalityId::domain_hardy_sobolev;
    if (needs_sobolev && spec.n < 3) throw ValidationError("Sobolev ids need n >= 3");
    if (spec.id == InequalityId::halfball_mlogs && spec.m < 1)
        throw ValidationError("halfball-mlogs: m >= 1");
    switch (spec.id) {
        case InequalityId::domain_hardy: {
            const double dmax = 0.999 * spec.rho * tau_lower_bound(spec.n);
            if (spec.D == 0.0) spec.D = dmax;
            if (spec.D > dmax)
                throw ValidationError("domain-hardy: needs rho >= D / tau_n (certified bracket)");
            break;
        }
        case InequalityId::domain_hardy_sobolev:
        case InequalityId::domain_logseries: {
            const double dmax = conformal::sigma_n(spec.n) * spec.rho;
            if (spec.D == 0.0) spec.D = dmax;
            if (spec.D > dmax) throw ValidationError("domain inequality: needs rho >= D / sigma_n");
            break;
        }
        default:
            if (!(spec.R > 0.0)) throw ValidationError("half-ball ids: R > 0");
    }
    return spec;
}

namespace {

struct AngularMoments {
    double a = 0.0;   // int phi^2 sin^{n-2}
    double b = 0.0;   // int phi'^2 sin^{n-2}
    double p = 0.0;   // int |phi|^{2n/(n-2)} sin^{n-2}
};

AngularMoments angular_moments(int n, double ang_c, bool with_p) {
    AngularMoments m;
    auto phi = [&](double t) {
        const double c = std::cos(t);
        return c * (1.0 + ang_c * (1.0 - c));
    };
    auto dphi = [&](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return -s * (1.0 + ang_c * (1.0 - c)) + c * ang_c * s;
    };
    auto w = [&](double t) { return std::pow(std::sin(t), n - 2); };
    m.a = quad::gauss([&](double t) { return phi(t) * phi(t) * w(t); }, 0.0, M_PI / 2, 48);
    m.b = quad::gauss([&](double t) { return dphi(t) * dphi(t) * w(t); }, 0.0, M_PI / 2, 48);
    if (with_p) {
        const double pexp = 2.0 * n / (n - 2.0);
        m.p = quad::gauss([&](double t) { return std::pow(std::abs(phi(t)), pexp) * w(t); }, 0.0,
                          M_PI / 2, 48);
    }
    return m;
}

// integral of g(r) dr over the trial support in the log variable, panels
// aligned with the smoothstep joins so each panel sees a smooth integrand
template <class G>
double radial_integral(const SeparableTrial& u, const G& g, double* err_acc) {
    const double ylo = std::log(u.r_lo), yhi = std::log(u.r_hi);
    const double L = yhi - ylo;
    const double joins[5] = {0.0, kCutLo, 0.5, kCutHi, 1.0};
    double total = 0.0;
    for (int p = 0; p < 4; ++p) {
        const double a = ylo + joins[p] * L, b = ylo + joins[p + 1] * L;
        auto gy = [&](double y) {
            const double r = std::exp(y);
            return g(r) * r;
        };
        const double coarse = quad::gauss(gy, a, b, 16);
        const double mid = 0.5 * (a + b);
        const double fine = quad::gauss(gy, a, mid, 16) + quad::gauss(gy, mid, b, 16);
        total += fine;
        if (err_acc) *err_acc += std::abs(fine - coarse);
    }
    return total;
}

}  // namespace

Remainder remainder(const InequalitySpec& raw, const SeparableTrial& u) {
    const InequalitySpec spec = resolve(raw);
    const int n = spec.n;
    const double scale = (spec.id == InequalityId::domain_hardy ||
                          spec.id == InequalityId::domain_hardy_sobolev ||
                          spec.id == InequalityId::domain_logseries)
                             ? spec.D
                             : spec.R;
    if (!(u.r_lo > 0.0) || !(u.r_hi > u.r_lo) || u.r_hi > scale * (1.0 - 1e-9))
        throw SupportError("remainder: trial support must sit strictly inside the domain");

    const bool with_sobolev = spec.id == InequalityId::halfball_sobolev ||
                              spec.id == InequalityId::halfball_mlogs ||
                              spec.id == InequalityId::domain_hardy_sobolev;
    const AngularMoments ang = angular_moments(n, u.ang_c, with_sobolev);
    const double omega = sphere_surface(n - 2);

    double err = 0.0;
    auto f = [&](double r) { return u.radial(r); };
    auto fd = [&](double r) { return u.radial_d(r); };
    const double I_grad = radial_integral(
        u, [&](double r) { return fd(r) * fd(r) * std::pow(r, n - 1.0); }, &err);
    const double I_hardy = radial_integral(
        u, [&](double r) { return f(r) * f(r) * std::pow(r, n - 3.0); }, &err);

    double grad = ang.a * I_grad + ang.b * I_hardy;
    double rhs = 0.25 * n * n * ang.a * I_hardy;
    double table_allowance = 0.0;

    switch (spec.id) {
        case InequalityId::halfball_sobolev:
        case InequalityId::domain_hardy:
            break;
        case InequalityId::halfball_mlogs: {
            const double I_log = radial_integral(
                u,
                [&](double r) {
                    return f(r) * f(r) * partial_log_sum(spec.m, r / spec.R) * std::pow(r, n - 3.0);
                },
                &err);
            rhs += 0.25 * ang.a * I_log;
            break;
        }
        case InequalityId::halfball_logseries: {
            const double I_log = radial_integral(
                u,
                [&](double r) { return f(r) * f(r) * big_b_table()(r / spec.R) * std::pow(r, n - 3.0); },
                &err);
            rhs += 0.25 * ang.a * I_log;
            table_allowance = 1e-5 * ang.a * std::abs(I_hardy);
            break;
        }
        case InequalityId::halfball_extra: {
            const double kr = kappa() * spec.R;
            const double I_log = radial_integral(
                u, [&](double r) { return f(r) * f(r) * big_b_table()(r / kr) * std::pow(r, n - 3.0); },
                &err);
            const double I_extra = radial_integral(
                u, [&](double r) { return f(r) * f(r) * std::pow(r, n - 2.5); }, &err);
            rhs += 0.25 * ang.a * I_log + ang.a * I_extra / (8.0 * std::sqrt(spec.R));
            table_allowance = 1e-5 * ang.a * std::abs(I_hardy);
            break;
        }
        case InequalityId::domain_hardy_sobolev:
            break;
        case InequalityId::domain_logseries: {
            const double kd = 3.0 * kappa() * spec.D;
            const double I_log = radial_integral(
                u, [&](double r) { return f(r) * f(r) * big_b_table()(r / kd) * std::pow(r, n - 3.0); },
                &err);
            rhs += 0.25 * ang.a * I_log;
            table_allowance = 1e-5 * ang.a * std::abs(I_hardy);
            break;
        }
    }

    Remainder out;
    out.hardy_part = omega * (grad - rhs);
    if (with_sobolev) {
        const double pexp = 2.0 * n / (n - 2.0);
        const double gexp = (2.0 * n - 2.0) / (n - 2.0);
        const double sarg = (spec.id == InequalityId::halfball_sobolev)
                                ? spec.R
                                : (spec.id == InequalityId::halfball_mlogs ? spec.R : 3.0 * spec.D);
        const int depth = (spec.id == InequalityId::halfball_mlogs) ? spec.m + 1 : 1;
        const double I_sob = radial_integral(
            u,
            [&](double r) {
                return std::pow(prod_x_local(depth, r / sarg), gexp) *
                       std::pow(std::abs(f(r)), pexp) * std::pow(r, n - 1.0);
            },
            &err);
        out.sobolev_term = std::pow(omega * ang.p * I_sob, (n - 2.0) / n);
    }
    out.value = out.hardy_part - spec.sobolev_c * out.sobolev_term;
    out.quad_error = omega * ((ang.a + ang.b) * std::max(1.0, 0.25 * n * n) * err + table_allowance) +
                     1e-13 * omega * std::abs(grad);
    return out;
}

SuiteReport random_trial_suite(const InequalitySpec& raw, long count, uint64_t seed, bool probe_c) {
    const InequalitySpec spec = resolve(raw);
    if (count < 1) throw ValidationError("random_trial_suite: count >= 1");
    const double scale = (spec.id == InequalityId::domain_hardy ||
                          spec.id == InequalityId::domain_hardy_sobolev ||
                          spec.id == InequalityId::domain_logseries)
                             ? spec.D
                             : spec.R;

    // platform-stable uniforms off the raw 64-bit stream
    uint64_t state = seed ? seed : 0x243f6a8885a308d3ull;
    auto next_u = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (state >> 11) * 0x1.0p-53;
    };

    SuiteReport rep;
    rep.count = count;
    rep.seed = seed;
    rep.min_value = 1e300;
    double min_ratio = 1e300;
    for (long i = 0; i < count; ++i) {
        SeparableTrial u;
        u.beta = -0.5 * (spec.n - 2.0) - 0.4 + next_u();
        // cut radii log-uniform, at least half a decade of support
        const double yhi = std::log(0.9 * scale) - next_u() * std::log(1e3);
        const double ylo = yhi - (0.5 + 3.5 * next_u()) * std::log(10.0);
        u.r_hi = std::exp(yhi);
        u.r_lo = std::exp(ylo);
        u.c1 = -0.4 + 0.8 * next_u();
        u.c2 = -0.4 + 0.8 * next_u();
        u.ang_c = -0.3 + 0.6 * next_u();
        Remainder r = remainder(spec, u);
        if (r.value < -r.quad_error) ++rep.violations;
        if (r.value < rep.min_value) {
            rep.min_value = r.value;
            rep.min_quad_error = r.quad_error;
            rep.argmin = u;
        }
        if (probe_c && r.sobolev_term > 0.0)
            min_ratio = std::min(min_ratio, r.hardy_part / r.sobolev_term);
    }
    if (probe_c) rep.probe_c = min_ratio;
    return rep;
}

GefCertificate cert_gef(int n) {
    if (n < 2) throw DomainError("cert_gef: n >= 2");
    const double r = conformal::sigma_n(n);
    const double tmax = 1.0 / (75.0 * std::pow(double(n), 4.0) * r);
    GefCertificate out;
    out.t_max = tmax;
    auto lhs = [&](double t) {
        return n * n * std::sqrt(r) * std::sqrt(t) * (t + 4.0) * std::sqrt(t + 2.0);
    };
    // every factor increases in t, so the grid maximum is at the right end;
    // scan anyway and keep the worst value seen
    double worst = 0.0;
    for (int i = 1; i <= 2000; ++i) worst = std::max(worst, lhs(tmax * i / 2000.0));
    out.margin = 1.0 - worst;
    out.holds = out.margin > 0.0;
    return out;
}

double tau_lower_bound(int n) {
    if (n < 2) throw DomainError("tau_lower_bound: n >= 2");
    auto h = [&](double t) {
        const double x = 1.0 / (1.0 - std::log(t / (2.0 * (t + 1.0))));
        return x * x - double(n) * n * t * (t + 2.0);
    };
    // h > 0 as t -> 0+; find the first sign change on a log grid, then bisect
    double lo = 1e-12, hi = 0.0;
    if (h(lo) <= 0.0) throw ConvergenceError("tau_lower_bound: unexpected sign at the left end");
    for (double t = 2e-12; t < 100.0; t *= 1.05) {
        if (h(t) <= 0.0) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (hi == 0.0) throw ConvergenceError("tau_lower_bound: no crossing found");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

double tau_upper_bound(int n) {
    if (n < 2) throw DomainError("tau_upper_bound: n >= 2");
    return 2.0 * std::exp(M_PI / std::sqrt(n - 1.0));
}

CounterexampleBound counterexample_bound(int n, double theta, double rho) {
    if (!(theta > 0.0) || !(theta < M_PI / 2)) throw ValidationError("counterexample: theta in (0, pi/2)");
    if (!(rho > 0.0) || !(rho < 0.5)) throw ValidationError("counterexample: rho in (0, 1/2)");
    sturm1d::CapProblem cap{n, theta, sturm1d::CapVariant::example_cap, 1};
    CounterexampleBound out;
    out.lambda1 = sturm1d::cap_eigenpair(cap, 256).estimate.value;
    out.threshold = 0.25 * n * n;
    const double l2rc = std::log(2.0 * rho * std::cos(theta));
    out.upper_bound = 0.25 * (n - 2.0) * (n - 2.0) + (M_PI / l2rc) * (M_PI / l2rc) + out.lambda1;
    const double gap = n - 1.0 - out.lambda1;
    out.rho_condition = gap > 0.0 ? std::exp(-M_PI / std::sqrt(gap)) / (2.0 * std::cos(theta)) : 0.0;
    out.cond = rho < out.rho_condition;
    return out;
}

std::vector<std::vector<double>> sample_halfball_points(int n, double R, long count, uint64_t seed) {
    uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ull;
    auto next_u = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (state >> 11) * 0x1.0p-53;
    };
    std::vector<std::vector<double>> pts;
    while (long(pts.size()) < count) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = R * (2.0 * next_u() - 1.0);
        x[n - 1] = std::abs(x[n - 1]);
        double r = 0.0;
        for (double c : x) r += c * c;
        r = std::sqrt(r);
        if (r < 0.1 * R || r > 0.9 * R || x[n - 1] < 0.05 * R) continue;
        pts.push_back(std::move(x));
    }
    return pts;
}

DivFieldReport div_field_check(int n, double R, const std::vector<std::vector<double>>& samples) {
    if (n < 2) throw DomainError("div_field_check: n >= 2");
    if (!(R > 0.0)) throw DomainError("div_field_check: R > 0");
    const double kap = kappa();

    DivFieldReport rep;
    rep.min_closed_form_margin = 1e300;
    for (const auto& x : samples) {
        if (int(x.size()) != n) throw DomainError("div_field_check: sample dimension mismatch");
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        const double r = std::sqrt(r2);
        if (x[n - 1] < 1e-3 || r < 1e-3 || r > R - 1e-3)
            throw DomainError("div_field_check: sample too close to the boundary");

        // fixed series depth over the whole stencil keeps the FD smooth
        sl::EtaB probe = sl::eta_and_b(r / (kap * R), 1e-10);
        const long depth = std::max(probe.eta.terms_used, probe.b.terms_used);

        auto field = [&](const std::vector<double>& p, int comp) {
            double pr2 = 0.0;
            for (double c : p) pr2 += c * c;
            const double pr = std::sqrt(pr2);
            const double eta_v = sl::eta_b_fixed_depth(pr / (kap * R), depth).eta;
            double v = 0.5 * (n + eta_v) * p[comp] / pr2 +
                       p[comp] / (2.0 * (std::sqrt(R) - std::sqrt(pr)) * pr * std::sqrt(pr));
            if (comp == n - 1) v -= 1.0 / p[n - 1];
            return v;
        };

        const double h = 1e-5;
        double div = 0.0, t2 = 0.0;
        for (int i = 0; i < n; ++i) {
            std::vector<double> xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double d1 = (field(xp, i) - field(xm, i)) / (2.0 * h);
            xp[i] = x[i] + 0.5 * h;
            xm[i] = x[i] - 0.5 * h;
            const double d2 = (field(xp, i) - field(xm, i)) / h;
            div += (4.0 * d2 - d1) / 3.0;
            const double ti = field(x, i);
            t2 += ti * ti;
        }
        sl::EtaBMid eb = sl::eta_b_fixed_depth(r / (kap * R), depth);
        const double closed = 0.25 * (n * n + eb.b) / r2 +
                              (0.5 - eb.eta) / (2.0 * (std::sqrt(R) - std::sqrt(r)) * r * std::sqrt(r));
        const double lhs = div - t2;
        rep.max_rel_discrepancy =
            std::max(rep.max_rel_discrepancy, std::abs(lhs - closed) / std::abs(closed));
        rep.min_closed_form_margin =
            std::min(rep.min_closed_form_margin, closed - 0.25 * n * n / r2);
        ++rep.samples;
    }
    return rep;
}

}  // namespace hardylab::certificates
