#include "hardylab/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/certificates.hpp"
#include "hardylab/femlab.hpp"
#include "hardylab/quadrature.hpp"
#include "hardylab/speclog.hpp"
#include "hardylab/sturm1d.hpp"

namespace hardylab::potentials {

namespace {

struct PointParts {
    double r2 = 0.0;   // |x|^2
    double xn = 0.0;
    double pe2 = 0.0;  // |x + rho e_n|^2
    double pe4 = 0.0;  // |x + 2 rho e_n|^2
};

PointParts split(const std::vector<double>& x, double rho) {
    PointParts p;
    const int n = int(x.size());
    for (double c : x) p.r2 += c * c;
    p.xn = x[n - 1];
    p.pe2 = p.r2 + 2.0 * rho * p.xn + rho * rho;
    p.pe4 = p.r2 + 4.0 * rho * p.xn + 4.0 * rho * rho;
    return p;
}

void check_point(const PointParts& p, const GroundStateWeights& w, bool strict_outside) {
    if (p.r2 < 1e-24) throw DomainError("ground-state weight: singular at 0");
    if (p.pe4 < 1e-24) throw DomainError("ground-state weight: singular at -2 rho e_n");
    const double rr = w.rho * w.rho;
    if (strict_outside && p.pe2 <= rr * (1.0 + 1e-12))
        throw DomainError("ground-state weight: point inside the tangent ball");
    if (p.pe2 < rr * (1.0 - 1e-12))
        throw DomainError("ground-state weight: point inside the tangent ball");
}

double series_scale(const GroundStateWeights& w) { return 3.0 * certificates::kappa() * w.Dtilde; }

}  // namespace

double phi(const std::vector<double>& x, const GroundStateWeights& w) {
    PointParts p = split(x, w.rho);
    check_point(p, w, false);
    const double num = p.pe2 - w.rho * w.rho;
    return num / (std::pow(p.r2, 0.25 * w.n) * std::pow(p.pe4, 0.25 * w.n));
}

double q(const std::vector<double>& x, const GroundStateWeights& w) {
    PointParts p = split(x, w.rho);
    check_point(p, w, false);
    return 0.25 * w.n * w.n * (p.r2 + 4.0 * w.rho * p.xn) / (p.r2 * p.pe4);
}

double phi_m(const std::vector<double>& x, const GroundStateWeights& w) {
    double base = phi(x, w);
    if (w.m == 0) return base;
    const double t = std::sqrt(split(x, w.rho).r2) / series_scale(w);
    if (!(t > 0.0) || t >= 1.0)
        throw DomainError("phi_m: |x| must stay below 3 kappa Dtilde");
    double xk = t;
    for (int i = 0; i < w.m; ++i) {
        xk = 1.0 / (1.0 - std::log(xk));
        base /= std::sqrt(xk);
    }
    return base;
}

double q_m(const std::vector<double>& x, const GroundStateWeights& w) {
    PointParts p = split(x, w.rho);
    check_point(p, w, true);
    double base = q(x, w);
    if (w.m == 0) return base;
    const double t = std::sqrt(p.r2) / series_scale(w);
    if (!(t > 0.0) || t >= 1.0) throw DomainError("q_m: |x| must stay below 3 kappa Dtilde");
    double xk = t, prod = 1.0, sum = 0.0;
    for (int i = 0; i < w.m; ++i) {
        xk = 1.0 / (1.0 - std::log(xk));
        prod *= xk;
        sum += prod;
    }
    const double brace = 0.5 * w.n * (p.r2 + 2.0 * w.rho * p.xn) / p.pe4 -
                         p.r2 / (p.r2 + 2.0 * w.rho * p.xn);
    return base + brace * sum / p.r2;
}

namespace {

// compactly supported radial bump on (a, b), C^4 at the edges
double bump(double r, double a, double b) {
    const double t = (2.0 * r - a - b) / (b - a);
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    return d * d * d * d * d;
}
double bump_d(double r, double a, double b) {
    const double t = (2.0 * r - a - b) / (b - a);
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    return -10.0 * t * d * d * d * d * 2.0 / (b - a);
}

struct MeridianQuad {
    double lhs = 0.0, rhs = 0.0;
};

MeridianQuad groundstate_quadrature(int n, double rho, double a, double b, double amp, int level) {
    // meridian integrals with weight omega_{n-2} s^{n-2} over the bounding
    // box of the shell; integrand vanishes smoothly at the shell edges
    const double omega = sphere_surface(n - 2);
    const auto& rule = quad::gauss_legendre(level);
    MeridianQuad out;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = 0.5 * b * (1.0 + rule.nodes[i]);
        const double ws = 0.5 * b * rule.weights[i];
        for (size_t j = 0; j < rule.nodes.size(); ++j) {
            const double z = b * rule.nodes[j];
            const double wz = b * rule.weights[j];
            const double r = std::hypot(s, z);
            if (r <= a || r >= b) continue;
            const double r2 = r * r;
            const double pe2 = r2 + 2.0 * rho * z + rho * rho;
            const double pe4 = r2 + 4.0 * rho * z + 4.0 * rho * rho;
            const double num = pe2 - rho * rho;
            const double den = std::pow(r2, 0.25 * n) * std::pow(pe4, 0.25 * n);
            const double ph = num / den;
            // analytic partials of phi in (s, z)
            const double dnum_ds = 2.0 * s, dnum_dz = 2.0 * z + 2.0 * rho;
            const double dden_ds = den * (0.5 * n * s / r2 + 0.5 * n * s / pe4);
            const double dden_dz = den * (0.5 * n * z / r2 + 0.5 * n * (z + 2.0 * rho) / pe4);
            const double dph_ds = (dnum_ds * den - num * dden_ds) / (den * den);
            const double dph_dz = (dnum_dz * den - num * dden_dz) / (den * den);
            const double wv = amp * bump(r, a, b);
            const double dw = amp * bump_d(r, a, b);
            const double dw_ds = dw * s / r, dw_dz = dw * z / r;
            const double gs = dph_ds * wv + ph * dw_ds;
            const double gz = dph_dz * wv + ph * dw_dz;
            const double meas = omega * std::pow(s, n - 2) * ws * wz;
            out.lhs += (gs * gs + gz * gz) * meas;
            out.rhs += (ph * ph * (dw_ds * dw_ds + dw_dz * dw_dz) +
                        double(n) * n * rho * rho * ph * ph * wv * wv / (r2 * pe4)) *
                       meas;
        }
    }
    return out;
}

}  // namespace

GroundstateCheck groundstate_identity_check(int n, double rho, double a, double b, double amplitude, int level) {
    if (n < 2) throw DomainError("groundstate_identity_check: n >= 2");
    if (!(a > 0.0) || !(b > a)) throw DomainError("groundstate_identity_check: need 0 < a < b");
    if (b >= 2.0 * rho) throw SupportError("groundstate_identity_check: shell must avoid -2 rho e_n");
    if (amplitude == 0.0) return {};
    MeridianQuad coarse = groundstate_quadrature(n, rho, a, b, amplitude, level);
    MeridianQuad fine = groundstate_quadrature(n, rho, a, b, amplitude, 2 * level);
    GroundstateCheck out;
    out.lhs = fine.lhs;
    out.rhs = fine.rhs;
    out.rel_err = std::abs(fine.lhs - fine.rhs) / std::max(1e-300, std::abs(fine.rhs));
    out.self_err = (std::abs(fine.lhs - coarse.lhs) + std::abs(fine.rhs - coarse.rhs)) /
                   std::max(1e-300, std::abs(fine.rhs));
    return out;
}

SubcriticalResult subcritical_test(const PotentialSpec& V, int n, double tol) {
    if (n < 2) throw DomainError("subcritical_test: n >= 2");
    SubcriticalResult out;
    switch (V.family) {
        case PotentialFamily::logweighted: {
            // V^{n/2} X_1^{1-n} r^{n-1} dr = X_1^{beta} dr/r = X^{beta-2} dX
            out.beta = 0.5 * V.alpha * n + 1.0 - n;
            out.finite = out.beta > 1.0;
            if (out.finite) {
                // X = e^{-y} turns the X^{beta-2} endpoint into a clean
                // exponential tail
                const double rate = out.beta - 1.0;
                out.value = quad::gauss_refined(
                    [&](double y) { return std::exp(-rate * y); }, 0.0, 60.0 / rate, tol, nullptr,
                    24, 14);
            } else {
                out.divergence = out.beta == 1.0
                                     ? "partial integrals grow like ln(1/X_1) near 0"
                                     : "partial integrals grow like X_1^{beta-1}, beta-1 <= 0";
            }
            return out;
        }
        case PotentialFamily::power: {
            // integrand r^{n-1-sn/2} X_1^{1-n}(r/D)
            const double p = n - 1.0 - 0.5 * V.s * n;
            out.beta = p;
            out.finite = V.s < 2.0;
            if (out.finite) {
                // substitute r = D e^{-y}
                auto f = [&](double y) {
                    const double x1 = 1.0 / (1.0 + y);
                    return std::pow(V.D, p + 1.0) * std::exp(-(p + 1.0) * y) *
                           std::pow(x1, 1.0 - n);
                };
                const double ymax = 60.0 / std::max(0.25, p + 1.0);
                out.value = quad::gauss_refined(f, 0.0, ymax, tol, nullptr, 24, 14);
            } else {
                out.divergence = V.s == 2.0 ? "partial integrals grow like X_1^{-n}/n"
                                            : "power divergence, exponent n-1-sn/2 <= -1";
            }
            return out;
        }
        case PotentialFamily::tabulated:
            throw ToleranceError(
                "subcritical_test: tabulated potential without singularity metadata is inconclusive");
    }
    throw DomainError("subcritical_test: bad family");
}

CrvResult cr_v_estimate(const PotentialSpec& V, int n, double rho, double r, int levels,
                        double lambda, double tol) {
    if (levels < 1) throw DomainError("cr_v_estimate: levels >= 1");
    if (!(r > 0.0) || r >= 4.0 * rho) throw DomainError("cr_v_estimate: need 0 < r < 4 rho");
    femlab::MeridianDomain dom;
    dom.kind = femlab::DomainKind::exterior_ball_cap;
    dom.n = n;
    dom.rho = rho;
    dom.radius = r;
    femlab::MeridianMesh mesh = femlab::build_meridian_mesh(dom, 1.0 / 10.0);

    femlab::Weight wV;
    wV.singular_at_pole = true;
    if (V.family == PotentialFamily::power) {
        wV.f = [s = V.s](double ss, double zz) { return std::pow(ss * ss + zz * zz, -0.5 * s); };
    } else if (V.family == PotentialFamily::logweighted) {
        wV.f = [a = V.alpha, D = V.D](double ss, double zz) {
            const double r2 = ss * ss + zz * zz;
            const double x1 = 1.0 / (1.0 - 0.5 * std::log(r2 / (D * D)));
            return std::pow(x1, a) / r2;
        };
    } else {
        throw DomainError("cr_v_estimate: tabulated potentials not supported here");
    }

    CrvResult out;
    for (int lev = 0; lev < levels; ++lev) {
        femlab::SparseSystem sys = femlab::assemble(mesh, n, femlab::weight_hardy({0.0, 0.0}));
        double quad_err = 0.0;
        femlab::SparseMatrix MV =
            femlab::assemble_mass(mesh, n, wV, sys.free_of_vertex, int(sys.vertex_of_free.size()),
                                  &quad_err);
        // numerator form K - (n^2/4) M_hardy (+ lambda M_1)
        femlab::SparseMatrix N = femlab::combine(sys.K, 1.0, sys.M, -0.25 * n * n);
        if (lambda != 0.0) {
            femlab::SparseMatrix M1 = femlab::assemble_mass(
                mesh, n, femlab::weight_one(), sys.free_of_vertex, int(sys.vertex_of_free.size()));
            N = femlab::combine(N, 1.0, M1, lambda);
        }
        EigenEstimate e = femlab::smallest_eig(N, MV, tol);
        out.trace.emplace_back(int(sys.vertex_of_free.size()), e.value);
        out.value = e.value;
        out.residual = e.residual;
        if (lev + 1 < levels) mesh = femlab::refine(mesh);
    }
    return out;
}

double cone_substitution_weight(const std::vector<double>& cap_nodes,
                                const std::vector<double>& cap_values, int n,
                                const std::vector<double>& x) {
    if (cap_nodes.size() < 2 || cap_nodes.size() != cap_values.size())
        throw DomainError("cone_substitution_weight: bad eigenfunction table");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    if (r2 < 1e-24) throw DomainError("cone_substitution_weight: singular at 0");
    const double r = std::sqrt(r2);
    const double t = std::acos(std::clamp(x[x.size() - 1] / r, -1.0, 1.0));
    if (t >= cap_nodes.back()) return 0.0;  // outside the cone
    auto it = std::upper_bound(cap_nodes.begin(), cap_nodes.end(), t);
    const size_t j = std::min(cap_nodes.size() - 1, size_t(it - cap_nodes.begin()));
    const double t0 = cap_nodes[j - 1], t1 = cap_nodes[j];
    const double u = (t - t0) / (t1 - t0);
    const double phi1 = (1.0 - u) * cap_values[j - 1] + u * cap_values[j];
    return std::pow(r, -0.5 * (n - 2.0)) * phi1;
}

ConeSobolevBound cone_sobolev_bound(int n, double angle, int resolution) {
    if (n < 3) throw DomainError("cone_sobolev_bound: n >= 3");
    if (!(angle > 0.0) || !(angle < M_PI)) throw DomainError("cone_sobolev_bound: angle in (0,pi)");
    sturm1d::CapProblem cap{n, angle, sturm1d::CapVariant::cone_cap, 1};
    sturm1d::CapSolution sol = sturm1d::cap_eigenpair(cap, resolution);

    const double omega_nm1 = sphere_surface(n - 1);
    const double omega_nm2 = sphere_surface(n - 2);
    const double sn = sobolev_constant(n);
    const double pexp = 2.0 * n / (n - 2.0);

    // |Sigma| and the L^{2n/(n-2)} norm of the normalized eigenfunction by
    // composite Simpson on the returned samples
    double measure = 0.0, pnorm = 0.0;
    const size_t N = sol.nodes.size();
    for (size_t i = 0; i + 1 < N; ++i) {
        const double h = sol.nodes[i + 1] - sol.nodes[i];
        const double tm = 0.5 * (sol.nodes[i] + sol.nodes[i + 1]);
        const double gm = 0.5 * (sol.values[i] + sol.values[i + 1]);
        auto w = [&](double t) { return std::pow(std::sin(t), n - 2); };
        measure += h / 6.0 * (w(sol.nodes[i]) + 4.0 * w(tm) + w(sol.nodes[i + 1]));
        pnorm += h / 6.0 *
                 (w(sol.nodes[i]) * std::pow(std::abs(sol.values[i]), pexp) +
                  4.0 * w(tm) * std::pow(std::abs(gm), pexp) +
                  w(sol.nodes[i + 1]) * std::pow(std::abs(sol.values[i + 1]), pexp));
    }
    measure *= omega_nm2;
    pnorm *= omega_nm2;

    ConeSobolevBound out;
    out.mu1 = sol.estimate.value;
    out.cap_measure = measure;
    const double cn = std::pow(omega_nm1, -2.0 / n) * std::pow(n - 2.0, -2.0 / n) * sn;
    out.coarse = cn * std::pow(measure, 2.0 / n);
    out.sharp = cn / std::pow(pnorm, (n - 2.0) / n);
    return out;
}

}  // namespace hardylab::potentials
