#include <doctest.h>

#include <cmath>

#include "hardylab/conformal.hpp"
#include "test_rng.hpp"

using namespace hardylab;
namespace cf = hardylab::conformal;

namespace {

cf::PointN random_point(TestRng& rng, int n, double scale, bool upper) {
    cf::PointN p(n);
    for (int i = 0; i < n; ++i) p[i] = rng.uniform(-scale, scale);
    if (upper) p[n - 1] = std::abs(p[n - 1]) + 1e-3;
    return p;
}

// |det A| by Gaussian elimination with partial pivoting
double det_abs(std::vector<std::vector<double>> a) {
    const int n = int(a.size());
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return std::abs(det);
}

// finite-difference Jacobian determinant of map_t, central with one
// Richardson level at step 1e-5
double jac_t_fd(const cf::PointN& v) {
    const int n = int(v.size());
    auto col = [&](double h) {
        std::vector<std::vector<double>> J(n, std::vector<double>(n));
        for (int j = 0; j < n; ++j) {
            cf::PointN vp = v, vm = v;
            vp[j] += h;
            vm[j] -= h;
            cf::PointN xp = cf::map_t(vp), xm = cf::map_t(vm);
            for (int i = 0; i < n; ++i) J[i][j] = (xp[i] - xm[i]) / (2 * h);
        }
        return J;
    };
    double d1 = det_abs(col(1e-5));
    double d2 = det_abs(col(0.5e-5));
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

TEST_CASE("kelvin basics and involution") {
    cf::PointN en = cf::unit_en(3);
    CHECK(cf::dist(cf::kelvin(en), en) < 1e-15);
    cf::PointN two_en = en;
    two_en[2] = 2.0;
    cf::PointN half = cf::kelvin(two_en);
    CHECK(half[2] == doctest::Approx(0.5));
    CHECK_THROWS_AS(cf::kelvin(cf::PointN{0.0, 0.0, 0.0}), DomainError);

    TestRng rng(11);
    for (int i = 0; i < 100; ++i) {
        cf::PointN x = random_point(rng, 3, 2.0, false);
        if (cf::norm(x) < 1e-2) continue;
        cf::PointN back = cf::kelvin(cf::kelvin(x));
        CHECK(cf::dist(back, x) < 1e-14 * std::max(1.0, cf::norm(x)));
    }
}

TEST_CASE("map_s fixed points and self-inverse") {
    for (int n : {3, 4}) {
        cf::PointN zero(n, 0.0), en = cf::unit_en(n);
        CHECK(cf::dist(cf::map_s(zero), en) < 1e-15);
        CHECK(cf::norm(cf::map_s(en)) < 1e-15);
        TestRng rng(7);
        for (int i = 0; i < 1000; ++i) {
            cf::PointN v = random_point(rng, n, 3.0, true);
            cf::PointN s = cf::map_s(v);
            // onto the unit ball
            CHECK(cf::norm(s) < 1.0);
            // |S(v)| = |v-e_n|/|v+e_n|
            cf::PointN vm = v, vp = v;
            vm[n - 1] -= 1.0;
            vp[n - 1] += 1.0;
            CHECK(cf::norm(s) == doctest::Approx(cf::norm(vm) / cf::norm(vp)).epsilon(1e-12));
            // S o S = id
            CHECK(cf::dist(cf::map_s(s), v) < 1e-12 * std::max(1.0, cf::norm(v)));
        }
    }
}

TEST_CASE("map_t identities") {
    const int n = 3;
    cf::PointN zero(n, 0.0), en = cf::unit_en(n);
    CHECK(cf::dist(cf::map_t(zero), en) < 1e-15);
    TestRng rng(23);
    for (int i = 0; i < 1000; ++i) {
        cf::PointN v = random_point(rng, n, 3.0, false);
        cf::PointN vpe = v, vme = v;
        vpe[n - 1] += 1.0;
        vme[n - 1] -= 1.0;
        if (cf::norm(vpe) < 1e-2 || cf::norm(vme) < 1e-2) continue;
        cf::PointN x = cf::map_t(v);
        // upper half space maps to the ball exterior, lower half inside
        if (v[n - 1] > 0.0) CHECK(cf::norm(x) > 1.0);
        if (v[n - 1] < 0.0) CHECK(cf::norm(x) < 1.0);
        CHECK(cf::dist(cf::inv_t(x), v) < 1e-11 * std::max(1.0, cf::norm(v)));
        // |T^{-1}(x)| = |x-e_n|/|x+e_n|
        cf::PointN xpe = x, xme = x;
        xpe[n - 1] += 1.0;
        xme[n - 1] -= 1.0;
        CHECK(cf::norm(cf::inv_t(x)) ==
              doctest::Approx(cf::norm(xme) / cf::norm(xpe)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cf::map_t(en), DomainError);
    cf::PointN men = en;
    men[n - 1] = -1.0;
    CHECK_THROWS_AS(cf::map_t(men), DomainError);
}

TEST_CASE("jacobian of T: closed form anchors and finite differences") {
    cf::PointN zero(3, 0.0);
    CHECK(cf::jac_t(zero) == doctest::Approx(8.0));
    cf::PointN men = cf::unit_en(3);
    men[2] = -1.0;
    CHECK(cf::jac_t(men) == doctest::Approx(1.0 / 8.0));

    TestRng rng(5);
    for (int i = 0; i < 50; ++i) {
        cf::PointN v = random_point(rng, 3, 2.0, false);
        cf::PointN vme = v;
        vme[2] -= 1.0;
        if (cf::norm(vme) < 0.3) continue;
        double closed = cf::jac_t(v);
        CHECK(jac_t_fd(v) == doctest::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("image of centered balls") {
    cf::BallSpec b = cf::image_ball(3, 0.5);
    CHECK(b.center[2] == doctest::Approx(5.0 / 3.0));
    CHECK(b.radius == doctest::Approx(4.0 / 3.0));
    cf::BallSpec small = cf::image_ball(3, 1e-6);
    CHECK(small.center[2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(small.radius == doctest::Approx(2e-6).epsilon(1e-9));
    CHECK_THROWS_AS(cf::image_ball(3, 1.0), DomainError);

    TestRng rng(3);
    for (double r : {0.3, 0.7}) {
        cf::BallSpec img = cf::image_ball(3, r);
        for (int i = 0; i < 200; ++i) {
            // random point on the sphere |v| = r
            cf::PointN v = random_point(rng, 3, 1.0, false);
            double nv = cf::norm(v);
            if (nv < 1e-3) continue;
            for (double& c : v) c *= r / nv;
            if (std::abs(v[2] - r) < 1e-6) continue;  // e_n r pole of nothing, just dodge exact axis
            cf::PointN x = cf::map_t(v);
            CHECK(cf::dist(x, img.center) == doctest::Approx(img.radius).epsilon(1e-10));
        }
    }
}

TEST_CASE("sigma_n values and monotonicity") {
    CHECK(cf::sigma_n(3) == doctest::Approx(1.0 / (9.0 * std::sqrt(75.0))));
    CHECK(cf::sigma_n(2) == doctest::Approx(1.0 / (4.0 * std::sqrt(75.0))));
    for (int n = 2; n < 10; ++n) CHECK(cf::sigma_n(n + 1) < cf::sigma_n(n));
}

TEST_CASE("pullback energy: zero trial") {
    auto zero = cf::radial_bump(cf::unit_en(3), 0.2, 0.4);
    zero.value = [](const cf::PointN&) { return 0.0; };
    zero.gradient = [](const cf::PointN& x) { return cf::PointN(x.size(), 0.0); };
    auto pair = cf::pullback_energy_pair(3, zero, cf::MapKind::kelvin, 8);
    CHECK(pair.source == 0.0);
    CHECK(pair.image == 0.0);
}

TEST_CASE("pullback energy invariance, kelvin and T, n=3") {
    // bump in a shell around 2 e_n, well away from map singularities
    cf::PointN c = cf::unit_en(3);
    c[2] = 2.0;
    auto f = cf::radial_bump(c, 0.0, 0.45);
    for (auto which : {cf::MapKind::kelvin, cf::MapKind::t}) {
        auto coarse = cf::pullback_energy_pair(3, f, which, 32);
        auto fine = cf::pullback_energy_pair(3, f, which, 40);
        CHECK(std::abs(fine.image - coarse.image) < 1e-8 * fine.image);
        CHECK(std::abs(fine.source - fine.image) < 1e-6 * fine.image);
    }
}

TEST_CASE("pullback energy invariance, tensor bump, n=4") {
    cf::PointN c(4, 0.0);
    c[3] = 2.0;
    auto f = cf::tensor_bump(c, {0.3, 0.3, 0.3, 0.3});
    auto pair = cf::pullback_energy_pair(4, f, cf::MapKind::t, 18);
    CHECK(std::abs(pair.source - pair.image) < 1e-6 * pair.image);
}

TEST_CASE("pullback support violation detected") {
    // shell around e_n itself crosses the unit sphere: T preimage box will
    // not contain the full support
    auto f = cf::radial_bump(cf::unit_en(3), 0.0, 0.8);
    CHECK_THROWS_AS(cf::pullback_energy_pair(3, f, cf::MapKind::t, 10), SupportError);
}
