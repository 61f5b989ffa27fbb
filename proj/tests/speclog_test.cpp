#include <doctest.h>

#include <cmath>
#include <random>

#include "hardylab/speclog.hpp"

using namespace hardylab;
namespace sl = hardylab::speclog;

TEST_CASE("eval_x closed-form anchors") {
    CHECK(sl::eval_x(1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sl::eval_x(1, std::exp(-1.0)) == doctest::Approx(0.5).epsilon(1e-14));
    // direct composition X1(X1(e^-1)) = X1(1/2) = 1/(1+ln 2), evaluated in
    // extended precision
    const long double x2 = 1.0L / (1.0L + std::log(2.0L));
    CHECK(sl::eval_x(2, std::exp(-1.0)) == doctest::Approx(double(x2)).epsilon(1e-14));
}

TEST_CASE("eval_x domain errors") {
    CHECK_THROWS_AS(sl::eval_x(1, 0.0), DomainError);
    CHECK_THROWS_AS(sl::eval_x(1, -0.5), DomainError);
    CHECK_THROWS_AS(sl::eval_x(1, 1.5), DomainError);
    CHECK_THROWS_AS(sl::eval_x(0, 0.5), DomainError);
}

TEST_CASE("prod_x anchors") {
    CHECK(sl::prod_x(1, 1.0) == doctest::Approx(1.0));
    CHECK(sl::prod_x(3, 1.0) == doctest::Approx(1.0));
    const double expect = sl::eval_x(1, std::exp(-1.0)) * sl::eval_x(2, std::exp(-1.0));
    CHECK(sl::prod_x(2, std::exp(-1.0)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("X_k range and monotonicity on a grid") {
    for (int k = 1; k <= 6; ++k) {
        CHECK(sl::eval_x(k, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
        double prev = 0.0;
        for (int i = 1; i <= 1000; ++i) {
            double t = i / 1000.0;
            double v = sl::eval_x(k, t);
            CHECK(v > 0.0);
            CHECK(v <= 1.0 + 1e-15);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("eta partial sums strictly increase and enclosures nest") {
    for (double t : {0.01, 0.1, 0.3}) {
        double prev = 0.0;
        for (long N = 1; N <= 64; N *= 2) {
            double s = sl::eta_partial_sum(t, N);
            CHECK(s > prev);
            prev = s;
        }
        SeriesValue coarse = sl::eta(t, 1e-6);
        SeriesValue fine = sl::eta(t, 1e-10);
        // the refined enclosure sits inside the coarse one
        CHECK(fine.value >= coarse.value - 1e-15);
        CHECK(fine.value + fine.tail_bound <= coarse.value + coarse.tail_bound + 1e-15);
        // the partial sum at twice the coarse truncation never escapes the
        // coarse enclosure
        double s2n = sl::eta_partial_sum(t, 2 * coarse.terms_used);
        CHECK(s2n <= coarse.value + coarse.tail_bound);
    }
}

TEST_CASE("eta tail bound formula sandwiches a refined evaluation") {
    for (double eps : {0.2, 0.1, 0.05, 0.01}) {
        auto [lo, hi] = sl::eta_tail_bounds(eps);
        CHECK(lo < hi);
        // the series at t = 1-eps slows like 1/N, so scale the achievable
        // tolerance with eps
        SeriesValue ref = sl::eta(1.0 - eps, eps < 0.05 ? 1e-5 : 1e-7);
        CHECK(ref.value + 0.5 * ref.tail_bound >= lo);
        CHECK(ref.value <= hi);
    }
}

TEST_CASE("eta limits and big_b comparison") {
    CHECK(sl::eta(1e-30, 1e-10).value < 1e-1);
    for (double t : {0.01, 0.1, 0.3}) {
        double e = sl::eta_mid(t, 1e-10);
        double b = sl::big_b_mid(t, 1e-10);
        double x1 = sl::eval_x(1, t);
        CHECK(b <= e * x1 * (1 + 1e-9));  // termwise X1^2...Xi^2 <= X1 * (X1...Xi)
        CHECK(b > 0.0);
    }
}

TEST_CASE("eta tolerance-not-reachable near t = 1") {
    CHECK_THROWS_AS(sl::eta(1.0 - 1e-9, 1e-10, 100000), ToleranceError);
    CHECK_THROWS_AS(sl::eta(1.0, 1e-6), DomainError);
}

TEST_CASE("kappa solves the quarter equation") {
    sl::KappaResult k = sl::solve_kappa(1e-12);
    CHECK(k.kappa > 1.0);
    CHECK(std::abs(k.residual) <= 1e-12);
    CHECK(std::abs(k.kappa - k.kappa_secant) <= 1e-10);
    // independent evaluation of eta at the reported root
    SeriesValue at_root = sl::eta(1.0 / k.kappa, 1e-9);
    CHECK(std::abs(at_root.value + 0.5 * at_root.tail_bound - 0.25) < 1e-8 + k.uncertainty);
    // eta stays below 1/4 up to 1/kappa
    for (int i = 1; i <= 50; ++i) {
        double t = (1.0 / k.kappa) * i / 50.0;
        CHECK(sl::eta_mid(t, 1e-9) <= 0.25 + 1e-8);
    }
}

TEST_CASE("kappa cross-check in extended precision") {
    sl::KappaResult k = sl::solve_kappa(1e-12);
    long double kx = sl::solve_kappa_extended();
    CHECK(std::abs(double(kx) - k.kappa) <= 1e-9 * k.kappa);
}

TEST_CASE("derivative identities against finite differences") {
    std::vector<std::pair<int, double>> grid = {
        {1, 0.5}, {3, 0.2}, {0, 0.3}, {2, 0.05}, {6, 0.9}, {4, 1e-4}, {0, 0.01}};
    CHECK(sl::derivative_identity_report(grid) < 1e-6);
}
