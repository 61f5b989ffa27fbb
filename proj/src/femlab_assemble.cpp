#include <algorithm>
#include <cmath>
#include <map>

#include "hardylab/femlab.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab::femlab {

Weight weight_one() {
    return {[](double, double) { return 1.0; }, false};
}

Weight weight_hardy(std::array<double, 2> pole) {
    return {[pole](double s, double z) {
                const double ds = s - pole[0], dz = z - pole[1];
                const double d2 = ds * ds + dz * dz;
                if (d2 == 0.0) throw IndefiniteFormError("hardy weight evaluated at its pole");
                return 1.0 / d2;
            },
            true};
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
        y[r] = acc;
    }
    return y;
}

double SparseMatrix::quadratic(const std::vector<double>& x) const {
    double acc = 0.0;
    for (int r = 0; r < n; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += x[r] * val[k] * x[col[k]];
    return acc;
}

SparseMatrix combine(const SparseMatrix& A, double ca, const SparseMatrix& B, double cb) {
    if (A.n != B.n) throw DomainError("combine: size mismatch");
    std::map<std::pair<int, int>, double> acc;
    for (int r = 0; r < A.n; ++r)
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) acc[{r, A.col[k]}] += ca * A.val[k];
    for (int r = 0; r < B.n; ++r)
        for (int k = B.row_ptr[r]; k < B.row_ptr[r + 1]; ++k) acc[{r, B.col[k]}] += cb * B.val[k];
    SparseMatrix out;
    out.n = A.n;
    out.row_ptr.assign(A.n + 1, 0);
    for (const auto& [rc, v] : acc) out.row_ptr[rc.first + 1]++;
    for (int i = 0; i < A.n; ++i) out.row_ptr[i + 1] += out.row_ptr[i];
    out.col.resize(acc.size());
    out.val.resize(acc.size());
    std::vector<int> cursor(out.row_ptr.begin(), out.row_ptr.end() - 1);
    for (const auto& [rc, v] : acc) {
        int k = cursor[rc.first]++;
        out.col[k] = rc.second;
        out.val[k] = v;
    }
    return out;
}

namespace {

// complete homogeneous symmetric polynomial h_k(s1, s2, s3)
double homog_sym(int k, double s1, double s2, double s3) {
    double total = 0.0;
    for (int a = 0; a <= k; ++a) {
        double pa = std::pow(s1, a);
        for (int b = 0; b + a <= k; ++b) total += pa * std::pow(s2, b) * std::pow(s3, k - a - b);
    }
    return total;
}

struct Triplets {
    std::map<std::pair<int, int>, double> m;
    void add(int r, int c, double v) {
        if (v != 0.0) m[{r, c}] += v;
    }
    SparseMatrix compress(int n) const {
        SparseMatrix out;
        out.n = n;
        out.row_ptr.assign(n + 1, 0);
        for (const auto& [rc, v] : m) out.row_ptr[rc.first + 1]++;
        for (int i = 0; i < n; ++i) out.row_ptr[i + 1] += out.row_ptr[i];
        out.col.resize(m.size());
        out.val.resize(m.size());
        std::vector<int> cursor(out.row_ptr.begin(), out.row_ptr.end() - 1);
        for (const auto& [rc, v] : m) {
            int k = cursor[rc.first]++;
            out.col[k] = rc.second;
            out.val[k] = v;
        }
        return out;
    }
};

struct ElemGeom {
    double area;
    double bx[3], by[3];  // P1 gradient components
    double s[3], z[3];
};

ElemGeom elem_geom(const MeridianMesh& mesh, const std::array<int, 3>& t) {
    ElemGeom g;
    for (int i = 0; i < 3; ++i) {
        g.s[i] = mesh.vertices[t[i]][0];
        g.z[i] = mesh.vertices[t[i]][1];
    }
    const double det = (g.s[1] - g.s[0]) * (g.z[2] - g.z[0]) - (g.z[1] - g.z[0]) * (g.s[2] - g.s[0]);
    g.area = 0.5 * std::abs(det);
    g.bx[0] = (g.z[1] - g.z[2]) / det;
    g.by[0] = (g.s[2] - g.s[1]) / det;
    g.bx[1] = (g.z[2] - g.z[0]) / det;
    g.by[1] = (g.s[0] - g.s[2]) / det;
    g.bx[2] = (g.z[0] - g.z[1]) / det;
    g.by[2] = (g.s[1] - g.s[0]) / det;
    return g;
}

// mass contribution of one regular element by a symmetric triangle rule
void elem_mass(const ElemGeom& g, int n, const Weight& w, int degree, double me[3][3]) {
    const auto& rule = quad::triangle_rule(degree);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) me[i][j] = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& b = rule.bary[q];
        const double s = b[0] * g.s[0] + b[1] * g.s[1] + b[2] * g.s[2];
        const double z = b[0] * g.z[0] + b[1] * g.z[1] + b[2] * g.z[2];
        const double common = rule.weights[q] * g.area * w.f(s, z) * std::pow(s, n - 2);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) me[i][j] += common * (b[i] * b[j]);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) me[i][j] = me[j][i];
}

// element touching the pole: local polar rule (radial x angular Gauss) about
// vertex `p`; rows/columns of the pole vertex are skipped (it is Dirichlet
// and its hat function is not integrable against the weight)
void elem_mass_polar(const ElemGeom& g, int n, const Weight& w, int p, double me[3][3]) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) me[i][j] = 0.0;
    const int q1 = (p + 1) % 3, q2 = (p + 2) % 3;
    const auto& ru = quad::gauss_legendre(16);  // along the opposite edge
    const auto& rr = quad::gauss_legendre(8);   // radial
    for (size_t a = 0; a < ru.nodes.size(); ++a) {
        const double u = 0.5 * (1.0 + ru.nodes[a]);
        const double wu = 0.5 * ru.weights[a];
        const double es = g.s[q1] + u * (g.s[q2] - g.s[q1]) - g.s[p];
        const double ez = g.z[q1] + u * (g.z[q2] - g.z[q1]) - g.z[p];
        for (size_t b = 0; b < rr.nodes.size(); ++b) {
            const double rho = 0.5 * (1.0 + rr.nodes[b]);
            const double wr = 0.5 * rr.weights[b];
            const double s = g.s[p] + rho * es;
            const double z = g.z[p] + rho * ez;
            // jacobian of (rho, u) -> (s, z) is 2 area rho
            const double common = wu * wr * 2.0 * g.area * rho * w.f(s, z) * std::pow(s, n - 2);
            // barycentric coords along the ray
            double bc[3];
            bc[p] = 1.0 - rho;
            bc[q1] = rho * (1.0 - u);
            bc[q2] = rho * u;
            for (int i = 0; i < 3; ++i) {
                if (i == p) continue;
                for (int j = 0; j < 3; ++j) {
                    if (j == p) continue;
                    me[i][j] += common * (bc[i] * bc[j]);  // grouping keeps exact symmetry
                }
            }
        }
    }
}

}  // namespace

SparseMatrix assemble_mass(const MeridianMesh& mesh, int n, const Weight& w,
                           const std::vector<int>& free_of_vertex, int free_count,
                           double* quad_rel_error) {
    Triplets trip;
    double err_abs = 0.0, total_abs = 0.0;
    double me[3][3], lo[3][3];
    for (const auto& t : mesh.triangles) {
        const ElemGeom g = elem_geom(mesh, t);
        int pole = -1;
        if (w.singular_at_pole)
            for (int i = 0; i < 3; ++i)
                if (t[i] == mesh.singular_vertex) pole = i;
        if (pole >= 0) {
            if (mesh.vtag[t[pole]] != tag_dirichlet)
                throw IndefiniteFormError("singular weight at a non-Dirichlet vertex");
            elem_mass_polar(g, n, w, pole, me);
        } else {
            elem_mass(g, n, w, 5, me);
            elem_mass(g, n, w, 2, lo);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) err_abs += std::abs(me[i][j] - lo[i][j]);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) total_abs += std::abs(me[i][j]);
        for (int i = 0; i < 3; ++i) {
            const int fi = free_of_vertex[t[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int fj = free_of_vertex[t[j]];
                if (fj < 0) continue;
                trip.add(fi, fj, me[i][j]);
            }
        }
    }
    if (quad_rel_error) *quad_rel_error = total_abs > 0.0 ? err_abs / total_abs : 0.0;
    SparseMatrix M = trip.compress(free_count);
    const double omega = sphere_surface(n - 2);
    for (double& v : M.val) v *= omega;
    return M;
}

SparseSystem assemble(const MeridianMesh& mesh, int n, const Weight& w) {
    if (n < 2) throw DomainError("assemble: n >= 2");
    SparseSystem sys;
    sys.n_dim = n;
    sys.free_of_vertex.assign(mesh.vertices.size(), -1);
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        if (mesh.vtag[v] != tag_dirichlet) {
            sys.free_of_vertex[v] = int(sys.vertex_of_free.size());
            sys.vertex_of_free.push_back(int(v));
        }
    }
    const int nf = int(sys.vertex_of_free.size());
    const double omega = sphere_surface(n - 2);

    Triplets ktrip;
    for (const auto& t : mesh.triangles) {
        const ElemGeom g = elem_geom(mesh, t);
        // exact integral of s^{n-2} over the triangle
        const double iw =
            2.0 * g.area * homog_sym(n - 2, g.s[0], g.s[1], g.s[2]) / ((n - 1.0) * n);
        for (int i = 0; i < 3; ++i) {
            const int fi = sys.free_of_vertex[t[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int fj = sys.free_of_vertex[t[j]];
                if (fj < 0) continue;
                ktrip.add(fi, fj, omega * iw * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]));
            }
        }
    }
    sys.K = ktrip.compress(nf);
    sys.M = assemble_mass(mesh, n, w, sys.free_of_vertex, nf, &sys.mass_quad_rel_error);
    return sys;
}

std::vector<double> interpolate(const MeridianMesh& mesh,
                                const std::function<double(double s, double z)>& f) {
    std::vector<double> out(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i) out[i] = f(mesh.vertices[i][0], mesh.vertices[i][1]);
    return out;
}

double stiffness_energy(const MeridianMesh& mesh, int n, const std::vector<double>& vertex_values) {
    const double omega = sphere_surface(n - 2);
    double acc = 0.0;
    for (const auto& t : mesh.triangles) {
        const ElemGeom g = elem_geom(mesh, t);
        const double iw = 2.0 * g.area * homog_sym(n - 2, g.s[0], g.s[1], g.s[2]) / ((n - 1.0) * n);
        double gx = 0.0, gy = 0.0;
        for (int i = 0; i < 3; ++i) {
            gx += vertex_values[t[i]] * g.bx[i];
            gy += vertex_values[t[i]] * g.by[i];
        }
        acc += omega * iw * (gx * gx + gy * gy);
    }
    return acc;
}

double hardy_quotient_of(const std::vector<double>& vertex_values, const SparseSystem& sys) {
    std::vector<double> u(sys.vertex_of_free.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = vertex_values[sys.vertex_of_free[i]];
    const double den = sys.M.quadratic(u);
    if (!(den > 0.0)) throw DomainError("hardy_quotient_of: zero trial");
    return sys.K.quadratic(u) / den;
}

}  // namespace hardylab::femlab
