#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "hardylab/femlab.hpp"

namespace hardylab::femlab {

namespace {


// drop vertices not referenced by any triangle (wall-slide and cleanup can
// strand a few); keeps indices compact for the assembler
MeridianMesh compact_mesh(MeridianMesh m) {
    std::vector<int> remap(m.vertices.size(), -1);
    MeridianMesh out;
    out.n = m.n;
    out.singularity = m.singularity;
    out.pole_clearance = m.pole_clearance;
    for (auto& t : m.triangles)
        for (int v : t)
            if (remap[v] < 0) {
                remap[v] = int(out.vertices.size());
                out.vertices.push_back(m.vertices[v]);
                out.vtag.push_back(m.vtag[v]);
            }
    for (auto t : m.triangles) {
        for (int& v : t) v = remap[v];
        out.triangles.push_back(t);
    }
    out.singular_vertex = (m.singular_vertex >= 0) ? remap[m.singular_vertex] : -1;
    return out;
}

struct PolarSpec {
    std::array<double, 2> pole;
    double psi_min = 0.0, psi_max = M_PI;
    std::function<double(double)> d_lo;   // inner boundary distance (0 at the pole fan)
    std::function<double(double)> d_hi;   // outer boundary distance
    uint8_t tag_psi_min = tag_axis;
    uint8_t tag_psi_max = tag_axis;
    uint8_t tag_inner = tag_dirichlet;
    uint8_t tag_outer = tag_dirichlet;
};


// Boundary-clamped geometric ladder: per column psi the radial rungs sit at
// d_hi(psi) g^{i-L}, clamped onto the inner boundary curve; rungs that fall
// below it collapse onto the boundary (deduplicated), so the strong grading
// lives only near the pole and the far side keeps balanced cells.
MeridianMesh generate_polar(const PolarSpec& spec, int n, double h, int npsi, double grading) {
    MeridianMesh mesh;
    mesh.n = n;
    mesh.singularity = spec.pole;
    const double span = spec.psi_max - spec.psi_min;
    const double g = std::max(grading, 1.05);

    // geometric rungs toward the pole, capped to an arithmetic step h so the
    // far field keeps its resolution
    std::vector<double> ladder{0.0, std::pow(g, -std::max(4.0, std::round(1.0 / h)))};
    while (ladder.back() < 1.0 - 0.5 * h)
        ladder.push_back(std::min(ladder.back() * g, ladder.back() + h));
    ladder.push_back(1.0);
    const int nlayer = int(ladder.size()) - 1;

    std::map<std::pair<long long, long long>, int> dedup;
    auto key = [](double s, double z) {
        return std::make_pair((long long)std::llround(s * 4e12), (long long)std::llround(z * 4e12));
    };
    auto rank = [](uint8_t t) { return t == tag_dirichlet ? 2 : (t == tag_axis ? 1 : 0); };

    std::vector<std::vector<int>> vid(npsi + 1, std::vector<int>(nlayer + 1, -1));
    for (int j = 0; j <= npsi; ++j) {
        const double psi = spec.psi_min + span * j / npsi;
        const double dlo = spec.d_lo(psi), dhi = spec.d_hi(psi);
        for (int i = 0; i <= nlayer; ++i) {
            double d = ladder[i] * dhi;
            // snap rungs grazing the inner boundary onto it
            const double rung = (i > 0 ? ladder[i] - ladder[i - 1] : ladder[1]) * dhi;
            if (d < dlo + 0.35 * rung) d = dlo;
            if (i == nlayer) d = dhi;
            double s = spec.pole[0] + d * std::sin(psi);
            double z = spec.pole[1] + d * std::cos(psi);
            if (std::abs(s) < 1e-14) s = 0.0;
            auto k = key(s, z);
            auto it = dedup.find(k);
            if (it == dedup.end()) {
                it = dedup.emplace(k, int(mesh.vertices.size())).first;
                mesh.vertices.push_back({s, z});
                mesh.vtag.push_back(tag_interior);
            }
            vid[j][i] = it->second;

            uint8_t tag = tag_interior;
            auto raise = [&](uint8_t t) {
                if (rank(t) > rank(tag)) tag = t;
            };
            if (i == nlayer) raise(spec.tag_outer);
            if (d <= dlo && (dlo > 1e-14 || d < 1e-14)) raise(spec.tag_inner);
            if (j == 0) raise(spec.tag_psi_min);
            if (j == npsi) raise(spec.tag_psi_max);
            uint8_t& cur = mesh.vtag[it->second];
            if (rank(tag) > rank(cur)) cur = tag;
        }
    }

    auto pit = dedup.find(key(spec.pole[0], spec.pole[1]));
    if (pit != dedup.end()) {
        mesh.singular_vertex = pit->second;
        mesh.vtag[pit->second] = tag_dirichlet;
    }

    auto area2 = [&](int a, int b, int c) {
        const auto &A = mesh.vertices[a], &B = mesh.vertices[b], &C = mesh.vertices[c];
        return (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
    };
    auto push_tri = [&](int a, int b, int c) {
        if (a == b || b == c || a == c) return;
        double ar = area2(a, b, c);
        if (std::abs(ar) < 1e-20) return;
        if (ar < 0.0) std::swap(b, c);
        mesh.triangles.push_back({a, b, c});
    };
    for (int j = 0; j < npsi; ++j) {
        for (int i = 0; i < nlayer; ++i) {
            const int v00 = vid[j][i], v10 = vid[j + 1][i];
            const int v01 = vid[j][i + 1], v11 = vid[j + 1][i + 1];
            const auto &A = mesh.vertices[v00], &B = mesh.vertices[v11];
            const auto &C = mesh.vertices[v01], &D = mesh.vertices[v10];
            if (std::hypot(A[0] - B[0], A[1] - B[1]) <= std::hypot(C[0] - D[0], C[1] - D[1])) {
                push_tri(v00, v10, v11);
                push_tri(v00, v11, v01);
            } else {
                push_tri(v00, v10, v01);
                push_tri(v10, v11, v01);
            }
        }
    }
    return mesh;
}

// The annulus and the exterior-ball pocket both have the pole sitting on a
// circle that is tangent to the domain there; a polar fan about the pole
// degenerates in the tangency cusp. Inverting the meridian about the pole,
// zeta = (x - p)/|x - p|^2, sends that circle to a straight line and the
// other sphere to a circle, so the image is a half-plane minus a disc and a
// plain log-polar grid is uniformly shaped. The pole sits at infinity; the
// grid is cut by a Dirichlet collar whose preimage is a tiny neighborhood of
// the pole (admissible functions vanish there anyway).
struct InvertedSpec {
    std::array<double, 2> pole;   // x-space pole p
    double line_z = 0.0;          // image of the pole-tangent circle: {zeta_z = line_z}
    double circle_z = 0.0;        // image of the other sphere: center (0, circle_z)
    double circle_r = 0.0;        //   ... radius
    double span = M_PI;           // ray angles about the circle center
    uint8_t tag_span_end = tag_axis;
    // obstacle in x-space for the inflation pass (vertices pushed outward so
    // inner-boundary chords clear the true circle)
    std::array<double, 2> obstacle_center{0.0, 0.0};
    double obstacle_r = 0.0;
};

MeridianMesh generate_inverted(const InvertedSpec& spec, int n, double h, double grading) {
    MeridianMesh mesh;
    mesh.n = n;
    mesh.singularity = spec.pole;

    const int npsi = std::max(6, (int)std::lround(0.7 * spec.span / h));
    const double dw = spec.span / npsi;
    const double q = std::exp(dw);
    const int nlayer = std::max(6, (int)std::lround(std::log(std::max(grading, 1.05)) / (h * dw)));

    std::map<std::pair<long long, long long>, int> dedup;
    auto key = [](double s, double z) {
        return std::make_pair((long long)std::llround(s * 4e12), (long long)std::llround(z * 4e12));
    };
    auto rank = [](uint8_t t) { return t == tag_dirichlet ? 2 : (t == tag_axis ? 1 : 0); };

    std::vector<char> on_inner;
    std::vector<std::vector<int>> vid(npsi + 1, std::vector<int>(nlayer + 1, -1));
    double clearance = 1e300;
    for (int j = 0; j <= npsi; ++j) {
        const double w = spec.span * j / npsi;
        const double cw = std::cos(w), sw = std::sin(w);
        const double d_line = cw < -1e-14 ? (spec.line_z - spec.circle_z) / cw : 1e300;
        for (int i = 0; i <= nlayer; ++i) {
            double dd = spec.circle_r * std::pow(q, i);
            const double rung = dd * (1.0 - 1.0 / q);
            bool hit_line = false;
            if (dd > d_line - 0.35 * rung) {
                dd = d_line;
                hit_line = true;
            }
            // zeta-space point, mapped back through the inversion
            const double zs = dd * sw, zz = spec.circle_z + dd * cw;
            const double r2 = zs * zs + zz * zz;
            double s = spec.pole[0] + zs / r2, z = spec.pole[1] + zz / r2;
            if (std::abs(s) < 1e-14) s = 0.0;
            auto k = key(s, z);
            auto it = dedup.find(k);
            if (it == dedup.end()) {
                it = dedup.emplace(k, int(mesh.vertices.size())).first;
                mesh.vertices.push_back({s, z});
                mesh.vtag.push_back(tag_interior);
                on_inner.push_back(0);
            }
            vid[j][i] = it->second;
            if (hit_line) on_inner[it->second] = 1;

            uint8_t tag = tag_interior;
            auto raise = [&](uint8_t t) {
                if (rank(t) > rank(tag)) tag = t;
            };
            if (i == 0) raise(tag_dirichlet);             // the outer sphere
            if (hit_line) raise(tag_dirichlet);           // the inner sphere
            if (i == nlayer && !hit_line) {
                raise(tag_dirichlet);                     // the collar around the pole
                clearance = std::min(clearance, std::hypot(s - spec.pole[0], z - spec.pole[1]));
            }
            if (j == 0) raise(tag_axis);
            if (j == npsi) raise(spec.tag_span_end);
            uint8_t& cur = mesh.vtag[it->second];
            if (rank(tag) > rank(cur)) cur = tag;
        }
    }
    mesh.pole_clearance = clearance;

    auto area2 = [&](int a, int b, int c) {
        const auto &A = mesh.vertices[a], &B = mesh.vertices[b], &C = mesh.vertices[c];
        return (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
    };
    auto push_tri = [&](int a, int b, int c) {
        if (a == b || b == c || a == c) return;
        double ar = area2(a, b, c);
        if (std::abs(ar) < 1e-20) return;
        if (ar < 0.0) std::swap(b, c);
        mesh.triangles.push_back({a, b, c});
    };
    for (int j = 0; j < npsi; ++j) {
        for (int i = 0; i < nlayer; ++i) {
            const int v00 = vid[j][i], v10 = vid[j + 1][i];
            const int v01 = vid[j][i + 1], v11 = vid[j + 1][i + 1];
            const auto &A = mesh.vertices[v00], &B = mesh.vertices[v11];
            const auto &C = mesh.vertices[v01], &D = mesh.vertices[v10];
            if (std::hypot(A[0] - B[0], A[1] - B[1]) <= std::hypot(C[0] - D[0], C[1] - D[1])) {
                push_tri(v00, v10, v11);
                push_tri(v00, v11, v01);
            } else {
                push_tri(v00, v10, v01);
                push_tri(v10, v11, v01);
            }
        }
    }

    // inflate the inner-circle vertices so the boundary chords clear the
    // obstacle: chords of the circle of radius r/cos(gap/2) stay outside r
    if (spec.obstacle_r > 0.0) {
        std::vector<std::pair<double, int>> ring;
        for (size_t v = 0; v < mesh.vertices.size(); ++v) {
            if (!on_inner[v]) continue;
            const double ds = mesh.vertices[v][0] - spec.obstacle_center[0];
            const double dz = mesh.vertices[v][1] - spec.obstacle_center[1];
            ring.emplace_back(std::atan2(ds, dz), int(v));
        }
        std::sort(ring.begin(), ring.end());
        double gap = 0.0;
        for (size_t k = 0; k + 1 < ring.size(); ++k) gap = std::max(gap, ring[k + 1].first - ring[k].first);
        const double factor = 1.0 / std::cos(0.5 * gap);
        for (auto& [ang, v] : ring) {
            for (int c = 0; c < 2; ++c)
                mesh.vertices[v][c] =
                    spec.obstacle_center[c] + (mesh.vertices[v][c] - spec.obstacle_center[c]) * factor;
            if (std::abs(mesh.vertices[v][0]) < 1e-14) mesh.vertices[v][0] = 0.0;
        }
    }
    return mesh;
}

// The annulus {rho < |x| < rho(1+tau)} with the pole on the inner sphere is
// a rectangle in (u, phi) = (ln r, polar angle) with the pole at the corner
// (0,0). A polar fan about that corner (a plain 90-degree wedge) is graded
// geometrically near the pole, switches to arithmetic rungs in the far
// field, and doubles the angular count outward so cells keep unit aspect;
// the conformal map back to (s,z) preserves their shape. Walls are straight,
// so rungs clamped onto them collapse into exact degenerates and vanish.
// Built at unit inner radius.
MeridianMesh generate_annulus(int n, double tau, double h, double grading) {
    MeridianMesh mesh;
    mesh.n = n;
    mesh.singularity = {0.0, 1.0};

    const double U = std::log1p(tau);
    const double mtop = std::hypot(U, M_PI);
    const double g_user = std::max(grading, 1.05);
    const double delta = mtop * std::pow(g_user, -std::max(4.0, std::round(1.0 / h)));
    const double hfar = std::min(0.5, std::max(3.2 * h, 0.02));
    const double g0 = std::exp((M_PI / 2) / 4);

    std::vector<double> rung;  // ring radii in the (u, phi) wedge
    rung.push_back(0.0);
    rung.push_back(delta);
    while (rung.back() < mtop) {
        double next = std::min(rung.back() * g0, rung.back() + hfar);
        rung.push_back(next);
    }
    const int L = int(rung.size()) - 1;

    std::vector<int> cnt(L + 1);
    cnt[0] = cnt[1] = 4;
    for (int i = 2; i <= L; ++i) {
        cnt[i] = cnt[i - 1];
        const double arc = rung[i] * (M_PI / 2) / cnt[i];
        if (arc > 1.35 * (rung[i] - rung[i - 1])) cnt[i] *= 2;
    }

    // distance from the corner to the walls u = U (outer sphere, Dirichlet)
    // and phi = pi (south axis, natural)
    auto wall = [&](double ct, double st, int* which) {
        const double du = ct > 1e-14 ? U / ct : 1e300;
        const double dp = st > 1e-14 ? M_PI / st : 1e300;
        *which = du <= dp ? 1 : 2;
        return std::min(du, dp);
    };

    std::map<std::pair<long long, long long>, int> dedup;
    auto key = [](double s, double z) {
        return std::make_pair((long long)std::llround(s * 4e12), (long long)std::llround(z * 4e12));
    };
    auto rank = [](uint8_t t) { return t == tag_dirichlet ? 2 : (t == tag_axis ? 1 : 0); };

    std::vector<char> on_inner;
    std::vector<std::array<double, 2>> uv;  // wedge coordinates per vertex
    std::vector<std::vector<int>> ring(L + 1);
    for (int i = 0; i <= L; ++i) {
        ring[i].resize(cnt[i] + 1);
        for (int j = 0; j <= cnt[i]; ++j) {
            const double th = 0.5 * M_PI * j / cnt[i];
            const double ct = std::cos(th), st = std::sin(th);
            int which = 0;
            const double dhi = wall(ct, st, &which);
            double m = rung[i];
            const double step = rung[std::max(i, 1)] - rung[std::max(i, 1) - 1];
            bool hit_wall = false;
            double u, phi;
            if (m > dhi - 0.4 * step) {
                hit_wall = true;
                // land on the wall, then slide the overshoot toward the far
                // corner so neighboring live columns keep balanced partners
                const double excess = std::max(0.0, m - dhi);
                if (which == 1) {
                    u = U;
                    phi = std::min(dhi * st + excess, M_PI);
                } else {
                    phi = M_PI;
                    u = std::min(dhi * ct + excess, U);
                }
            } else {
                u = std::min(m * ct, U);
                phi = std::min(m * st, M_PI);
            }
            const double r = std::exp(u);
            double s = r * std::sin(phi), z = r * std::cos(phi);
            if (std::abs(s) < 1e-14) s = 0.0;
            auto k = key(s, z);
            auto it = dedup.find(k);
            if (it == dedup.end()) {
                it = dedup.emplace(k, int(mesh.vertices.size())).first;
                mesh.vertices.push_back({s, z});
                mesh.vtag.push_back(tag_interior);
                on_inner.push_back(0);
                uv.push_back({u, phi});
            }
            ring[i][j] = it->second;
            if (j == cnt[i] && m > 1e-14) on_inner[it->second] = 1;

            uint8_t tag = tag_interior;
            auto raise = [&](uint8_t t) {
                if (rank(t) > rank(tag)) tag = t;
            };
            if (m < 1e-14) raise(tag_dirichlet);  // the pole
            if (hit_wall) raise(which == 1 ? tag_dirichlet : tag_axis);
            if (j == 0) raise(tag_axis);            // north polar axis
            if (j == cnt[i]) raise(tag_dirichlet);  // the inner sphere
            uint8_t& cur = mesh.vtag[it->second];
            if (rank(tag) > rank(cur)) cur = tag;
        }
    }

    auto pit = dedup.find(key(0.0, 1.0));
    if (pit != dedup.end()) {
        mesh.singular_vertex = pit->second;
        mesh.vtag[pit->second] = tag_dirichlet;
    }

    auto push_tri = [&](int a, int b, int c) {
        if (a == b || b == c || a == c) return;
        // degeneracy is decided in the wedge coordinates: collinear wall
        // clamps map to thin circular-arc slivers in (s,z) and must not
        // survive (their vertices stay as Dirichlet boundary markers)
        const auto &Au = uv[a], &Bu = uv[b], &Cu = uv[c];
        const double aru = (Bu[0] - Au[0]) * (Cu[1] - Au[1]) - (Bu[1] - Au[1]) * (Cu[0] - Au[0]);
        const double la = std::hypot(Bu[0] - Au[0], Bu[1] - Au[1]);
        const double lb = std::hypot(Cu[0] - Au[0], Cu[1] - Au[1]);
        if (std::abs(aru) < 0.02 * la * lb) return;
        const auto &A = mesh.vertices[a], &B = mesh.vertices[b], &C = mesh.vertices[c];
        double ar = (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
        if (std::abs(ar) < 1e-18) return;
        if (ar < 0.0) mesh.triangles.push_back({a, c, b});
        else mesh.triangles.push_back({a, b, c});
    };
    for (int i = 0; i < L; ++i) {
        const int mi = cnt[i], mo = cnt[i + 1];
        if (mo == mi) {
            for (int j = 0; j < mi; ++j) {
                const int v00 = ring[i][j], v01 = ring[i][j + 1];
                const int v10 = ring[i + 1][j], v11 = ring[i + 1][j + 1];
                const auto &A = mesh.vertices[v00], &B = mesh.vertices[v11];
                const auto &C = mesh.vertices[v01], &D = mesh.vertices[v10];
                if (std::hypot(A[0] - B[0], A[1] - B[1]) <= std::hypot(C[0] - D[0], C[1] - D[1])) {
                    push_tri(v00, v10, v11);
                    push_tri(v00, v11, v01);
                } else {
                    push_tri(v00, v10, v01);
                    push_tri(v10, v11, v01);
                }
            }
        } else {
            for (int j = 0; j < mi; ++j) {
                const int A = ring[i][j], B = ring[i][j + 1];
                const int C = ring[i + 1][2 * j], D = ring[i + 1][2 * j + 1], E = ring[i + 1][2 * j + 2];
                push_tri(A, C, D);
                push_tri(A, D, B);
                push_tri(B, D, E);
            }
        }
    }

    // cleanup: collapse the short edge of any sliver triangle left by wall
    // sliding, merging only vertices of the same boundary class and never
    // folding the surrounding triangles
    {
        auto tri_min_angle = [&](const std::array<int, 3>& t) {
            double worst = M_PI;
            for (int e = 0; e < 3; ++e) {
                const auto &A = mesh.vertices[t[e]], &B = mesh.vertices[t[(e + 1) % 3]],
                           &C = mesh.vertices[t[(e + 2) % 3]];
                const double ux = B[0] - A[0], uy = B[1] - A[1];
                const double vx = C[0] - A[0], vy = C[1] - A[1];
                const double co = (ux * vx + uy * vy) / (std::hypot(ux, uy) * std::hypot(vx, vy));
                worst = std::min(worst, std::acos(std::clamp(co, -1.0, 1.0)));
            }
            return worst;
        };
        auto orient = [&](int a, int b, int c) {
            const auto &A = mesh.vertices[a], &B = mesh.vertices[b], &C = mesh.vertices[c];
            return (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
        };
        for (int pass = 0; pass < 8; ++pass) {
            bool changed = false;
            for (const auto& t : mesh.triangles) {
                if (tri_min_angle(t) > 10.0 * M_PI / 180.0) continue;
                // shortest edge of the sliver
                int ea = t[0], eb = t[1];
                double best = 1e300;
                for (int e = 0; e < 3; ++e) {
                    const int a = t[e], b = t[(e + 1) % 3];
                    const double len = std::hypot(mesh.vertices[a][0] - mesh.vertices[b][0],
                                                  mesh.vertices[a][1] - mesh.vertices[b][1]);
                    if (len < best) {
                        best = len;
                        ea = a;
                        eb = b;
                    }
                }
                if (mesh.vtag[ea] != mesh.vtag[eb] || on_inner[ea] != on_inner[eb]) continue;
                if (ea == mesh.singular_vertex || eb == mesh.singular_vertex) continue;
                // merge eb into ea if no adjacent triangle folds
                bool folds = false;
                for (const auto& s : mesh.triangles) {
                    if (s[0] != eb && s[1] != eb && s[2] != eb) continue;
                    std::array<int, 3> r = s;
                    for (int& v : r)
                        if (v == eb) v = ea;
                    if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
                    if (orient(r[0], r[1], r[2]) <= 0.0) {
                        folds = true;
                        break;
                    }
                }
                if (folds) continue;
                std::vector<std::array<int, 3>> kept;
                kept.reserve(mesh.triangles.size());
                for (auto s : mesh.triangles) {
                    for (int& v : s)
                        if (v == eb) v = ea;
                    if (s[0] == s[1] || s[1] == s[2] || s[0] == s[2]) continue;
                    kept.push_back(s);
                }
                mesh.triangles = std::move(kept);
                changed = true;
                break;
            }
            if (!changed) break;
        }
    }

    // inflate the inner-sphere vertices so boundary chords clear the sphere;
    // the pole keeps its exact position, its neighbor takes the full-gap
    // tangent factor since that chord starts on the sphere
    {
        std::vector<std::pair<double, int>> ringv;
        for (size_t v = 0; v < mesh.vertices.size(); ++v)
            if (on_inner[v])
                ringv.emplace_back(std::atan2(mesh.vertices[v][0], mesh.vertices[v][1]), int(v));
        std::sort(ringv.begin(), ringv.end());
        for (size_t k = 0; k < ringv.size(); ++k) {
            const double gl = ringv[k].first - (k == 0 ? 0.0 : ringv[k - 1].first);
            const double gr = k + 1 < ringv.size() ? ringv[k + 1].first - ringv[k].first : 0.0;
            const double gap = std::max(k == 0 ? gl : 0.5 * gl, 0.5 * gr);
            const double factor = 1.0 / std::cos(gap);
            auto& v = mesh.vertices[ringv[k].second];
            v[0] *= factor;
            v[1] *= factor;
            if (std::abs(v[0]) < 1e-14) v[0] = 0.0;
        }
    }
    return mesh;
}

MeridianMesh scale_mesh(MeridianMesh m, double factor) {
    for (auto& v : m.vertices) {
        v[0] *= factor;
        v[1] *= factor;
    }
    m.singularity[0] *= factor;
    m.singularity[1] *= factor;
    m.pole_clearance *= factor;
    return m;
}

}  // namespace

MeridianMesh build_meridian_mesh(const MeridianDomain& d, double h, double grading) {
    if (!(h > 0.0) || h > 0.5) throw GeometryError("build_meridian_mesh: h in (0, 0.5]");
    if (!(grading >= 1.0)) throw GeometryError("build_meridian_mesh: grading >= 1");
    if (d.n < 2) throw GeometryError("build_meridian_mesh: n >= 2");

    PolarSpec spec;
    switch (d.kind) {
        case DomainKind::half_ball: {
            if (!(d.radius > 0.0)) throw GeometryError("half_ball: radius > 0");
            spec.pole = {0.0, 0.0};
            spec.psi_min = 0.0;
            spec.psi_max = M_PI / 2;
            spec.d_lo = [](double) { return 0.0; };
            spec.d_hi = [r = d.radius](double) { return r; };
            spec.tag_psi_min = tag_axis;       // +z axis
            spec.tag_psi_max = tag_dirichlet;  // the flat part x_n = 0
            break;
        }
        case DomainKind::annulus_offcenter: {
            if (!(d.tau > 0.0)) throw GeometryError("annulus: tau > 0");
            if (!(d.rho > 0.0)) throw GeometryError("annulus: rho > 0");
            return scale_mesh(compact_mesh(generate_annulus(d.n, d.tau, h, grading)), d.rho);
        }
        case DomainKind::cap_sector: {
            if (!(d.theta > 0.0) || !(d.theta < M_PI / 2))
                throw GeometryError("cap_sector: theta in (0, pi/2)");
            if (!(d.rho > 0.0) || !(d.rho < 0.5)) throw GeometryError("cap_sector: rho in (0, 1/2)");
            const double rho = d.rho;
            spec.pole = {0.0, 0.0};
            spec.psi_min = d.theta;
            spec.psi_max = M_PI;
            spec.d_lo = [rho](double psi) { return std::max(0.0, 2.0 * rho * std::cos(psi)); };
            spec.d_hi = [](double) { return 1.0; };
            spec.tag_psi_min = tag_dirichlet;  // the cone surface
            break;
        }
        case DomainKind::exterior_ball_cap: {
            if (!(d.rho > 0.0)) throw GeometryError("exterior_ball_cap: rho > 0");
            if (!(d.radius > 0.0)) throw GeometryError("exterior_ball_cap: radius > 0");
            InvertedSpec inv;
            inv.pole = {0.0, 0.0};
            inv.line_z = -1.0 / (4.0 * d.rho);
            inv.circle_z = 0.0;
            inv.circle_r = 1.0 / d.radius;
            // the image line cuts the image circle when radius < 4 rho; rays
            // beyond the cut leave the domain
            if (d.radius < 4.0 * d.rho) {
                inv.span = std::acos(d.radius * inv.line_z);
                inv.tag_span_end = tag_dirichlet;
            }
            inv.obstacle_center = {0.0, -2.0 * d.rho};
            inv.obstacle_r = 2.0 * d.rho;
            return compact_mesh(generate_inverted(inv, d.n, h, grading));
        }
        case DomainKind::custom_polygon: {
            if (d.polygon.size() < 3) throw GeometryError("custom_polygon: need >= 3 vertices");
            // star-shaped about the first vertex: use ray intersections
            const auto pole = d.polygon.front();
            spec.pole = {pole[0], pole[1]};
            // angular extent of the polygon as seen from the pole
            spec.psi_min = M_PI;
            spec.psi_max = 0.0;
            for (size_t i = 1; i < d.polygon.size(); ++i) {
                const double a = std::atan2(d.polygon[i][0] - pole[0], d.polygon[i][1] - pole[1]);
                spec.psi_min = std::min(spec.psi_min, a);
                spec.psi_max = std::max(spec.psi_max, a);
            }
            if (!(spec.psi_max > spec.psi_min))
                throw GeometryError("custom_polygon: degenerate angular extent");
            // sides lying on the symmetry axis stay natural
            const bool on_axis = std::abs(pole[0]) < 1e-14;
            spec.tag_psi_min = (on_axis && std::abs(spec.psi_min) < 1e-12) ? tag_axis : tag_dirichlet;
            spec.tag_psi_max = (on_axis && std::abs(spec.psi_max - M_PI) < 1e-12) ? tag_axis : tag_dirichlet;
            auto poly = d.polygon;
            spec.d_lo = [](double) { return 0.0; };
            spec.d_hi = [poly, pole](double psi) {
                // farthest intersection of the ray from the pole with the polygon
                const double ds = std::sin(psi), dz = std::cos(psi);
                double best = 0.0;
                for (size_t i = 0; i < poly.size(); ++i) {
                    const auto& A = poly[i];
                    const auto& B = poly[(i + 1) % poly.size()];
                    const double ex = B[0] - A[0], ez = B[1] - A[1];
                    const double det = ds * (-ez) - dz * (-ex);
                    if (std::abs(det) < 1e-14) continue;
                    const double bx = A[0] - pole[0], bz = A[1] - pole[1];
                    const double t = (bx * (-ez) - bz * (-ex)) / det;
                    const double u = (ds * bz - dz * bx) / det;
                    if (t > 1e-12 && u >= -1e-12 && u <= 1.0 + 1e-12) best = std::max(best, t);
                }
                if (best <= 0.0) throw GeometryError("custom_polygon: not star-shaped about the pole");
                return best;
            };
            break;
        }
    }

    const double span = spec.psi_max - spec.psi_min;
    const int npsi = std::max(4, (int)std::lround(0.7 * span / h));
    return compact_mesh(generate_polar(spec, d.n, h, npsi, grading));
}

MeridianMesh refine(const MeridianMesh& m) {
    MeridianMesh out;
    out.n = m.n;
    out.vertices = m.vertices;
    out.vtag = m.vtag;
    out.singularity = m.singularity;
    out.singular_vertex = m.singular_vertex;
    out.pole_clearance = m.pole_clearance;

    // boundary edges = edges used by exactly one triangle
    std::map<std::pair<int, int>, int> edge_count;
    auto ekey = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) ++edge_count[ekey(t[e], t[(e + 1) % 3])];

    std::map<std::pair<int, int>, int> midpoint;
    auto get_mid = [&](int a, int b) {
        auto k = ekey(a, b);
        auto it = midpoint.find(k);
        if (it != midpoint.end()) return it->second;
        const int id = int(out.vertices.size());
        out.vertices.push_back({0.5 * (m.vertices[a][0] + m.vertices[b][0]),
                                0.5 * (m.vertices[a][1] + m.vertices[b][1])});
        uint8_t tag = tag_interior;
        if (edge_count[k] == 1) {
            const uint8_t ta = m.vtag[a], tb = m.vtag[b];
            if (ta == tag_dirichlet && tb == tag_dirichlet)
                tag = tag_dirichlet;
            else if (ta != tag_interior && tb != tag_interior)
                tag = tag_axis;
        }
        out.vtag.push_back(tag);
        midpoint.emplace(k, id);
        return id;
    };

    for (const auto& t : m.triangles) {
        const int a = t[0], b = t[1], c = t[2];
        const int ab = get_mid(a, b), bc = get_mid(b, c), ca = get_mid(c, a);
        out.triangles.push_back({a, ab, ca});
        out.triangles.push_back({ab, b, bc});
        out.triangles.push_back({ca, bc, c});
        out.triangles.push_back({ab, bc, ca});
    }
    return out;
}

double MeridianMesh::min_angle_deg() const {
    double worst = 180.0;
    for (const auto& t : triangles) {
        for (int e = 0; e < 3; ++e) {
            const auto &A = vertices[t[e]], &B = vertices[t[(e + 1) % 3]], &C = vertices[t[(e + 2) % 3]];
            const double ux = B[0] - A[0], uy = B[1] - A[1];
            const double vx = C[0] - A[0], vy = C[1] - A[1];
            const double cosang = (ux * vx + uy * vy) / (std::hypot(ux, uy) * std::hypot(vx, vy));
            worst = std::min(worst, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / M_PI);
        }
    }
    return worst;
}

double MeridianMesh::max_diameter() const {
    double d = 0.0;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            const auto &A = vertices[t[e]], &B = vertices[t[(e + 1) % 3]];
            d = std::max(d, std::hypot(A[0] - B[0], A[1] - B[1]));
        }
    return d;
}

void write_mesh(const MeridianMesh& m, std::ostream& os) {
    for (const auto& v : m.vertices) {
        os << "v " << v[0] << " " << v[1] << "\n";
    }
    for (const auto& t : m.triangles) {
        const int tag = (t[0] == m.singular_vertex || t[1] == m.singular_vertex ||
                         t[2] == m.singular_vertex)
                            ? 1
                            : 0;
        os << "t " << t[0] << " " << t[1] << " " << t[2] << " " << tag << "\n";
    }
}

}  // namespace hardylab::femlab
