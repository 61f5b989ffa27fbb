#include "hardylab/sturm1d.hpp"
#include <doctest.h>

#include <cmath>

#include "hardylab/certificates.hpp"
#include "hardylab/potentials.hpp"
#include "test_rng.hpp"

using namespace hardylab;
namespace pt = hardylab::potentials;

namespace {
std::vector<double> axis_point(int n, double z) {
    std::vector<double> x(n, 0.0);
    x[n - 1] = z;
    return x;
}
}  // namespace

TEST_CASE("phi and q anchor values") {
    pt::GroundStateWeights w{3, 1.0, 0, 1.0};
    // on the tangent sphere |x + rho e_n| = rho the numerator vanishes
    std::vector<double> x = {0.6, 0.0, -1.0 + std::sqrt(1.0 - 0.36)};
    CHECK(std::abs(pt::phi(x, w)) < 1e-12);
    // hand formula at x = eps e_n
    for (double eps : {0.1, 0.01}) {
        const double expected = 2.25 * (eps * eps + 4.0 * eps) / (eps * eps * (eps + 2.0) * (eps + 2.0));
        CHECK(pt::q(axis_point(3, eps), w) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(pt::phi(axis_point(3, 0.0), w), DomainError);
    CHECK_THROWS_AS(pt::phi(axis_point(3, -2.0), w), DomainError);
    // inside the tangent ball
    CHECK_THROWS_AS(pt::phi(axis_point(3, -0.5), w), DomainError);
}

TEST_CASE("q is nonnegative and bounded by c/|x| on samples") {
    pt::GroundStateWeights w{3, 1.0, 0, 1.0};
    TestRng rng(9);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(3);
        for (auto& c : x) c = rng.uniform(-1.5, 1.5);
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        // the nonnegativity holds on the working domain, outside the
        // exterior ball B(-2 rho e_n, 2 rho) where |x|^2 + 4 rho x_n > 0
        if (r < 0.05 || r * r + 4.0 * x[2] <= 1e-6) continue;
        const double qq = pt::q(x, w);
        CHECK(qq >= 0.0);
        CHECK(qq <= 20.0 / r);
    }
}

TEST_CASE("phi_m and q_m reduce to phi and q at m = 0") {
    pt::GroundStateWeights w0{3, 1.0, 0, 1.0};
    auto x = axis_point(3, 0.35);
    CHECK(pt::phi_m(x, w0) == pt::phi(x, w0));
    CHECK(pt::q_m(x, w0) == pt::q(x, w0));
}

TEST_CASE("phi_m dominates phi and q_m matches a re-evaluated brace") {
    TestRng rng(21);
    const double kap = certificates::kappa();
    for (int m : {1, 2, 3}) {
        pt::GroundStateWeights w{3, 1.0, m, 1.0};
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x(3);
            for (auto& c : x) c = rng.uniform(-0.8, 0.8);
            const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            const double pe2 = r * r + 2.0 * x[2] + 1.0;
            if (r < 0.05 || pe2 <= 1.0 + 1e-3) continue;
            CHECK(pt::phi_m(x, w) >= pt::phi(x, w) * (1.0 - 1e-12));
            // independent evaluation of the q_m display
            const double t = r / (3.0 * kap * w.Dtilde);
            double xk = t, prod = 1.0, sum = 0.0;
            for (int k = 0; k < m; ++k) {
                xk = 1.0 / (1.0 - std::log(xk));
                prod *= xk;
                sum += prod;
            }
            const double pe4 = r * r + 4.0 * x[2] + 4.0;
            const double brace = 1.5 * (r * r + 2.0 * x[2]) / pe4 - r * r / (r * r + 2.0 * x[2]);
            const double expect = pt::q(x, w) + brace * sum / (r * r);
            CHECK(pt::q_m(x, w) == doctest::Approx(expect).epsilon(1e-12));
            // the difference carries the sign of the brace
            if (std::abs(brace) > 1e-10)
                CHECK((pt::q_m(x, w) - pt::q(x, w) > 0) == (brace > 0));
        }
    }
}

TEST_CASE("ground-state substitution identity") {
    // zero trial gives (0, 0, 0)
    auto z = pt::groundstate_identity_check(3, 1.0, 0.3, 0.9, 0.0, 16);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.rel_err == 0.0);

    auto c = pt::groundstate_identity_check(3, 1.0, 0.4, 1.4);
    CHECK(c.self_err < 1e-7);
    CHECK(c.rel_err < 1e-5);
    // the identity is homogeneous: tripling the trial scales both sides by 9
    auto c3 = pt::groundstate_identity_check(3, 1.0, 0.4, 1.4, 3.0);
    CHECK(c3.lhs == doctest::Approx(9.0 * c.lhs).epsilon(1e-12));
    CHECK(c3.rhs == doctest::Approx(9.0 * c.rhs).epsilon(1e-12));
    CHECK(c3.rel_err == doctest::Approx(c.rel_err).epsilon(1e-6));
    auto c4 = pt::groundstate_identity_check(4, 0.8, 0.3, 1.2);
    CHECK(c4.rel_err < 1e-5);
    CHECK_THROWS_AS(pt::groundstate_identity_check(3, 1.0, 0.5, 2.5), SupportError);
}

TEST_CASE("subcritical classification for the logweighted family") {
    for (int n : {3, 4, 5}) {
        for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.2, 2.5, 3.0, 4.0}) {
            pt::PotentialSpec V;
            V.family = pt::PotentialFamily::logweighted;
            V.alpha = alpha;
            auto r = pt::subcritical_test(V, n);
            const double beta = 0.5 * alpha * n + 1.0 - n;
            CHECK(r.finite == (beta > 1.0));
            CHECK(r.beta == doctest::Approx(beta));
            if (r.finite) CHECK(r.value == doctest::Approx(1.0 / (beta - 1.0)).epsilon(1e-8));
        }
    }
}

TEST_CASE("subcritical classification for the power family") {
    pt::PotentialSpec V;
    V.family = pt::PotentialFamily::power;
    V.s = 1.5;
    auto fin = pt::subcritical_test(V, 3);
    CHECK(fin.finite);
    CHECK(fin.value > 0.0);
    V.s = 2.0;
    CHECK_FALSE(pt::subcritical_test(V, 3).finite);
    V.s = 2.5;
    CHECK_FALSE(pt::subcritical_test(V, 3).finite);
    pt::PotentialSpec tab;
    tab.family = pt::PotentialFamily::tabulated;
    CHECK_THROWS_AS(pt::subcritical_test(tab, 3), ToleranceError);
}

TEST_CASE("C_r(V) trends: Hardy gap shrinks, subcritical potential grows") {
    pt::PotentialSpec hardy;
    hardy.family = pt::PotentialFamily::power;
    hardy.s = 2.0;
    auto gap = pt::cr_v_estimate(hardy, 3, 1.0, 0.2, 3);
    // nested refinement: nonincreasing upper bounds on the residual gap
    for (size_t i = 1; i < gap.trace.size(); ++i)
        CHECK(gap.trace[i].second <= gap.trace[i - 1].second * (1.0 + 1e-6));
    CHECK(gap.value < 0.5);  // heading to zero: the Hardy constant is sharp

    // subcritical (alpha = 3): C_r grows strongly as r shrinks
    pt::PotentialSpec logw;
    logw.family = pt::PotentialFamily::logweighted;
    logw.alpha = 3.0;
    logw.D = 1.0;
    std::vector<double> sub_vals;
    for (double r : {0.2, 0.1, 0.05}) {
        auto c = pt::cr_v_estimate(logw, 3, 1.0, r, 2);
        if (!sub_vals.empty()) CHECK(c.value > sub_vals.back());
        sub_vals.push_back(c.value);
    }

    // critical (alpha = 2): the sharp level 1/4 sits behind a doubly
    // logarithmic depth, so finite meshes only show a much weaker growth
    // than the subcritical case; the reports flag that saturation is not
    // resolved at these resolutions
    pt::PotentialSpec crit;
    crit.family = pt::PotentialFamily::logweighted;
    crit.alpha = 2.0;
    crit.D = 1.0;
    std::vector<double> crit_vals;
    for (double r : {0.2, 0.1, 0.05}) crit_vals.push_back(pt::cr_v_estimate(crit, 3, 1.0, r, 2).value);
    CHECK(crit_vals.back() > 0.25);  // upper bounds stay above the sharp constant
    const double crit_growth = crit_vals.back() / crit_vals.front();
    const double sub_growth = sub_vals.back() / sub_vals.front();
    CHECK(crit_growth < sub_growth);
    for (size_t i = 0; i < crit_vals.size(); ++i) CHECK(crit_vals[i] < 0.6 * sub_vals[i]);
}

TEST_CASE("cone Sobolev bounds") {
    // S_n anchor: n = 3
    CHECK(sobolev_constant(3) ==
          doctest::Approx(3.0 * M_PI * std::pow(std::tgamma(1.5) / std::tgamma(3.0), 2.0 / 3.0)));
    double prev_coarse = 0.0;
    for (double th : {0.3, 0.8, 1.2, M_PI / 2, 2.0}) {
        auto b = pt::cone_sobolev_bound(3, th, 256);
        CHECK(b.sharp > 0.0);
        CHECK(b.sharp <= b.coarse * (1.0 + 1e-9));
        CHECK(b.coarse > prev_coarse);  // |Sigma| grows with the opening
        prev_coarse = b.coarse;
    }
    // the coarse bound vanishes with the cap measure
    CHECK(pt::cone_sobolev_bound(3, 0.05, 256).coarse < 0.05);
    CHECK_THROWS_AS(pt::cone_sobolev_bound(2, 1.0), DomainError);
}

TEST_CASE("phi vanishes on the tangent sphere and is positive outside") {
    pt::GroundStateWeights w{3, 1.0, 0, 1.0};
    TestRng rng(31);
    for (int i = 0; i < 100; ++i) {
        // boundary sample on |x + rho e_n| = rho, away from the origin
        const double th = rng.uniform(0.15, M_PI - 0.15);
        std::vector<double> x = {std::sin(th), 0.0, -1.0 + std::cos(th)};
        CHECK(std::abs(pt::phi(x, w)) < 1e-10);
        // strictly inside the working domain: push outward
        std::vector<double> y = x;
        y[0] *= 1.3;
        y[2] = -1.0 + 1.3 * std::cos(th);
        if (y[0] * y[0] + y[2] * y[2] > 1e-3 && y[0] * y[0] + (y[2] + 2.0) * (y[2] + 2.0) > 4.0)
            CHECK(pt::phi(y, w) > 0.0);
    }
}

TEST_CASE("cone substitution weight from the cap eigenfunction") {
    sturm1d::CapProblem cap{3, 1.0, sturm1d::CapVariant::cone_cap, 1};
    auto sol = sturm1d::cap_eigenpair(cap, 128);
    auto at = [&](double r, double t) {
        std::vector<double> x = {r * std::sin(t), 0.0, r * std::cos(t)};
        return pt::cone_substitution_weight(sol.nodes, sol.values, 3, x);
    };
    CHECK(at(0.5, 0.3) > 0.0);
    CHECK(std::abs(at(0.5, 1.0)) < 1e-8);  // Dirichlet edge of the cap
    CHECK(at(0.5, 1.4) == 0.0);            // outside the cone
    // homogeneity of degree -(n-2)/2
    CHECK(at(0.25, 0.3) == doctest::Approx(at(0.5, 0.3) * std::pow(0.5, -0.5)).epsilon(1e-12));
}
