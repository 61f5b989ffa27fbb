#include "hardylab/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/quadrature.hpp"

namespace hardylab::conformal {

namespace {
constexpr double kSingularRadius = 1e-12;

void check_dim(const PointN& x) {
    if (x.size() < 2) throw DomainError("conformal: points need n >= 2");
}
}  // namespace

double norm(const PointN& x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::sqrt(s);
}

double dist(const PointN& x, const PointN& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

PointN unit_en(int n) {
    PointN e(n, 0.0);
    e[n - 1] = 1.0;
    return e;
}

PointN kelvin(const PointN& x) {
    check_dim(x);
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    if (r2 <= kSingularRadius * kSingularRadius) throw DomainError("kelvin: singular at 0");
    PointN y(x);
    for (double& c : y) c /= r2;
    return y;
}

namespace {
// common body of S and T: (2v', 1 - |v|^2) / |v -+ e_n|^2
PointN moebius_half_to_ball(const PointN& v, double en_sign, const char* who) {
    check_dim(v);
    const int n = int(v.size());
    double d2 = 0.0, r2 = 0.0;
    for (int i = 0; i < n - 1; ++i) d2 += v[i] * v[i];
    r2 = d2 + v[n - 1] * v[n - 1];
    const double denom = d2 + (v[n - 1] + en_sign) * (v[n - 1] + en_sign);
    if (denom <= kSingularRadius * kSingularRadius)
        throw DomainError(std::string(who) + ": singular point excluded");
    PointN out(n);
    for (int i = 0; i < n - 1; ++i) out[i] = 2.0 * v[i] / denom;
    out[n - 1] = (1.0 - r2) / denom;
    return out;
}
}  // namespace

PointN map_s(const PointN& v) { return moebius_half_to_ball(v, +1.0, "map_s"); }

PointN map_t(const PointN& v) {
    // excluded at e_n (true pole) and at -e_n (where S is undefined)
    const int n = int(v.size());
    check_dim(v);
    double dm = 0.0;
    for (int i = 0; i < n - 1; ++i) dm += v[i] * v[i];
    const double dplus = dm + (v[n - 1] + 1.0) * (v[n - 1] + 1.0);
    if (dplus <= kSingularRadius * kSingularRadius) throw DomainError("map_t: singular point excluded");
    return moebius_half_to_ball(v, -1.0, "map_t");
}

PointN inv_t(const PointN& x) {
    check_dim(x);
    const int n = int(x.size());
    double d2 = 0.0, r2 = 0.0;
    for (int i = 0; i < n - 1; ++i) d2 += x[i] * x[i];
    r2 = d2 + x[n - 1] * x[n - 1];
    const double denom = d2 + (x[n - 1] + 1.0) * (x[n - 1] + 1.0);
    if (denom <= kSingularRadius * kSingularRadius) throw DomainError("inv_t: singular at -e_n");
    PointN out(n);
    for (int i = 0; i < n - 1; ++i) out[i] = 2.0 * x[i] / denom;
    out[n - 1] = (r2 - 1.0) / denom;
    return out;
}

double jac_t(const PointN& v) {
    check_dim(v);
    const int n = int(v.size());
    double d2 = 0.0;
    for (int i = 0; i < n - 1; ++i) d2 += v[i] * v[i];
    d2 += (v[n - 1] - 1.0) * (v[n - 1] - 1.0);
    if (d2 <= kSingularRadius * kSingularRadius) throw DomainError("jac_t: singular at e_n");
    return std::pow(2.0, n) / std::pow(d2, n);
}

BallSpec image_ball(int n, double r) {
    if (n < 2) throw DomainError("image_ball: n >= 2");
    if (!(r > 0.0) || r >= 1.0) throw DomainError("image_ball: r in (0,1) required");
    BallSpec b;
    b.center = unit_en(n);
    b.center[n - 1] = (1.0 + r * r) / (1.0 - r * r);
    b.radius = 2.0 * r / (1.0 - r * r);
    return b;
}

double sigma_n(int n) {
    if (n < 2) throw DomainError("sigma_n: n >= 2");
    return 1.0 / (std::sqrt(75.0) * n * n);
}

namespace {

// compactly supported profile (1-s^2)^5 on |s|<1; polynomial flanks keep
// tensor Gauss-Legendre convergence fast
double bump_profile(double s) {
    const double d = 1.0 - s * s;
    if (d <= 0.0) return 0.0;
    return d * d * d * d * d;
}
double bump_profile_d(double s) {
    const double d = 1.0 - s * s;
    if (d <= 0.0) return 0.0;
    return -10.0 * s * d * d * d * d;
}

}  // namespace

namespace {

// deterministic spread of directions on S^{n-1} (golden-angle style lattice)
std::vector<PointN> sphere_directions(int n, int count) {
    std::vector<PointN> dirs;
    uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return (state >> 11) * 0x1.0p-53;
    };
    for (int k = 0; k < count; ++k) {
        PointN d(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            // Box-Muller on the deterministic stream
            double u1 = std::max(next(), 1e-16), u2 = next();
            d[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            s += d[i] * d[i];
        }
        s = std::sqrt(s);
        for (double& c : d) c /= s;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

}  // namespace

TrialField radial_bump(PointN center, double inner, double outer) {
    if (!(outer > inner) || inner < 0.0) throw DomainError("radial_bump: need 0 <= inner < outer");
    const double mid = 0.5 * (inner + outer), half = 0.5 * (outer - inner);
    TrialField f;
    f.value = [=](const PointN& x) {
        if (inner == 0.0) return bump_profile(dist(x, center) / outer);
        return bump_profile((dist(x, center) - mid) / half);
    };
    f.gradient = [=](const PointN& x) {
        const double r = dist(x, center);
        PointN g(x.size(), 0.0);
        if (r < 1e-14) return g;
        double dp;
        if (inner == 0.0)
            dp = bump_profile_d(r / outer) / outer;
        else
            dp = bump_profile_d((r - mid) / half) / half;
        for (size_t i = 0; i < x.size(); ++i) g[i] = dp * (x[i] - center[i]) / r;
        return g;
    };
    const int n = int(center.size());
    for (const PointN& d : sphere_directions(n, 200)) {
        PointN p = center;
        for (int i = 0; i < n; ++i) p[i] += outer * d[i];
        f.support_samples.push_back(std::move(p));
    }
    f.support_samples.push_back(center);
    return f;
}

TrialField tensor_bump(PointN center, std::vector<double> halfwidth) {
    if (center.size() != halfwidth.size()) throw DomainError("tensor_bump: size mismatch");
    TrialField f;
    f.value = [=](const PointN& x) {
        double v = 1.0;
        for (size_t i = 0; i < x.size(); ++i) v *= bump_profile((x[i] - center[i]) / halfwidth[i]);
        return v;
    };
    f.gradient = [=](const PointN& x) {
        PointN g(x.size(), 0.0);
        std::vector<double> vals(x.size());
        for (size_t i = 0; i < x.size(); ++i) vals[i] = bump_profile((x[i] - center[i]) / halfwidth[i]);
        for (size_t i = 0; i < x.size(); ++i) {
            double gi = bump_profile_d((x[i] - center[i]) / halfwidth[i]) / halfwidth[i];
            for (size_t j = 0; j < x.size(); ++j)
                if (j != i) gi *= vals[j];
            g[i] = gi;
        }
        return g;
    };
    // boundary lattice of the support box, 5 stations per axis
    const int n = int(center.size());
    std::vector<int> st(n, 0);
    while (true) {
        bool on_boundary = false;
        for (int i = 0; i < n; ++i)
            if (st[i] == 0 || st[i] == 4) on_boundary = true;
        if (on_boundary) {
            PointN p = center;
            for (int i = 0; i < n; ++i) p[i] += halfwidth[i] * (0.5 * st[i] - 1.0);
            f.support_samples.push_back(std::move(p));
        }
        int d = 0;
        while (d < n && ++st[d] == 5) st[d++] = 0;
        if (d == n) break;
    }
    f.support_samples.push_back(center);
    return f;
}

namespace {

PointN apply_map(MapKind which, const PointN& v) {
    switch (which) {
        case MapKind::kelvin: return kelvin(v);
        case MapKind::s: return map_s(v);
        case MapKind::t: return map_t(v);
    }
    throw DomainError("apply_map: bad kind");
}

PointN apply_inverse(MapKind which, const PointN& x) {
    switch (which) {
        case MapKind::kelvin: return kelvin(x);
        case MapKind::s: return map_s(x);
        case MapKind::t: return inv_t(x);
    }
    throw DomainError("apply_inverse: bad kind");
}

double jac_det(MapKind which, const PointN& v) {
    const int n = int(v.size());
    switch (which) {
        case MapKind::kelvin: {
            double r = norm(v);
            if (r <= kSingularRadius) throw DomainError("kelvin jacobian: singular at 0");
            return std::pow(r, -2.0 * n);
        }
        case MapKind::s: {
            PointN e = unit_en(n);
            for (int i = 0; i < n; ++i) e[i] = v[i] + e[i];
            return std::pow(2.0, n) / std::pow(norm(e), 2.0 * n);
        }
        case MapKind::t: return jac_t(v);
    }
    throw DomainError("jac_det: bad kind");
}

}  // namespace

EnergyPair pullback_energy_pair(int n, const TrialField& f, MapKind which, int points_per_axis) {
    if (n < 2 || n > 6) throw DomainError("pullback_energy_pair: n in [2,6]");
    if (points_per_axis < 4) throw DomainError("pullback_energy_pair: quadrature too coarse");

    // source box = padded bounding box of the preimage of the support
    PointN lo(n, 1e300), hi(n, -1e300);
    for (const PointN& p : f.support_samples) {
        PointN v = apply_inverse(which, p);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    }
    for (int i = 0; i < n; ++i) {
        const double pad = 0.10 * (hi[i] - lo[i]) + 1e-9;
        lo[i] -= pad;
        hi[i] += pad;
    }

    // S and T pull back from the open upper half space; a support reaching
    // the image-domain boundary shows up as a preimage dipping below x_n = 0.
    if (which != MapKind::kelvin && lo[n - 1] <= 0.0)
        throw SupportError("pullback_energy_pair: trial does not vanish near the image boundary");

    const double exponent = (n - 2.0) / (2.0 * n);
    auto G = [&](const PointN& v) {
        return f.value(apply_map(which, v)) * std::pow(jac_det(which, v), exponent);
    };

    // f must vanish on the image of the box boundary, otherwise the box
    // truncates the support
    {
        PointN probe = lo;
        for (int face = 0; face < 2 * n; ++face) {
            probe = lo;
            for (int i = 0; i < n; ++i) probe[i] = 0.5 * (lo[i] + hi[i]);
            probe[face / 2] = (face % 2) ? hi[face / 2] : lo[face / 2];
            if (std::abs(f.value(apply_map(which, probe))) > 1e-12)
                throw SupportError("pullback_energy_pair: trial does not vanish near the image boundary");
        }
    }

    const quad::Rule1D& rule = quad::gauss_legendre(points_per_axis);
    std::vector<int> idx(n, 0);
    PointN v(n), vp(n), vm(n);
    EnergyPair out;
    const double h_fd = 1e-5;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            const double c = 0.5 * (lo[i] + hi[i]), half = 0.5 * (hi[i] - lo[i]);
            v[i] = c + half * rule.nodes[idx[i]];
            w *= half * rule.weights[idx[i]];
        }
        // source energy: |grad G|^2 by Richardson central differences
        double g2 = 0.0;
        bool inside = false;
        if (std::abs(G(v)) > 0.0) inside = true;
        for (int i = 0; i < n; ++i) {
            vp = v;
            vm = v;
            vp[i] += h_fd;
            vm[i] -= h_fd;
            const double d1 = (G(vp) - G(vm)) / (2.0 * h_fd);
            vp[i] = v[i] + 0.5 * h_fd;
            vm[i] = v[i] - 0.5 * h_fd;
            const double d2 = (G(vp) - G(vm)) / h_fd;
            const double gi = (4.0 * d2 - d1) / 3.0;
            if (gi != 0.0) inside = true;
            g2 += gi * gi;
        }
        if (inside) {
            out.source += w * g2;
            PointN x = apply_map(which, v);
            PointN gf = f.gradient(x);
            double gf2 = 0.0;
            for (double c : gf) gf2 += c * c;
            out.image += w * gf2 * jac_det(which, v);
        }
        ++out.points;
        int d = 0;
        while (d < n && ++idx[d] == points_per_axis) idx[d++] = 0;
        if (d == n) break;
    }
    return out;
}

}  // namespace hardylab::conformal
