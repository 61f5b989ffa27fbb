#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "hardylab/femlab.hpp"

namespace hardylab::femlab {

namespace {

// reverse Cuthill-McKee ordering to keep the band narrow
std::vector<int> rcm_order(const SparseMatrix& A) {
    const int n = A.n;
    std::vector<int> degree(n), order;
    order.reserve(n);
    for (int i = 0; i < n; ++i) degree[i] = A.row_ptr[i + 1] - A.row_ptr[i];
    std::vector<char> seen(n, 0);
    for (;;) {
        int start = -1, best = 1 << 30;
        for (int i = 0; i < n; ++i)
            if (!seen[i] && degree[i] < best) {
                best = degree[i];
                start = i;
            }
        if (start < 0) break;
        std::queue<int> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            order.push_back(v);
            std::vector<int> nb;
            for (int k = A.row_ptr[v]; k < A.row_ptr[v + 1]; ++k)
                if (!seen[A.col[k]]) nb.push_back(A.col[k]);
            std::sort(nb.begin(), nb.end(), [&](int a, int b) { return degree[a] < degree[b]; });
            for (int w : nb) {
                seen[w] = 1;
                q.push(w);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;  // order[k] = original index placed at position k
}

struct BandMatrix {
    int n = 0, bw = 0;
    std::vector<double> a;  // row-major, a[i*(bw+1) + (bw - (i-j))] for j in [i-bw, i]

    double& at(int i, int j) { return a[size_t(i) * (bw + 1) + (bw - (i - j))]; }
    double get(int i, int j) const { return a[size_t(i) * (bw + 1) + (bw - (i - j))]; }

    // in-place LDL^T; returns false on a nonpositive pivot
    bool factorize() {
        for (int i = 0; i < n; ++i) {
            const int j0 = std::max(0, i - bw);
            double d = at(i, i);
            for (int k = j0; k < i; ++k) {
                const double lik = at(i, k);
                d -= lik * lik * at(k, k);
            }
            if (!(d > 0.0)) return false;
            at(i, i) = d;
            // update column i of the remaining rows lazily during their turn
            for (int r = i + 1; r <= std::min(n - 1, i + bw); ++r) {
                double v = at(r, i);
                const int k0 = std::max({0, r - bw, i - bw});
                for (int k = k0; k < i; ++k) v -= at(r, k) * at(i, k) * at(k, k);
                at(r, i) = v / d;
            }
        }
        return true;
    }

    void solve(std::vector<double>& x) const {
        for (int i = 0; i < n; ++i) {
            double v = x[i];
            for (int k = std::max(0, i - bw); k < i; ++k) v -= get(i, k) * x[k];
            x[i] = v;
        }
        for (int i = 0; i < n; ++i) x[i] /= get(i, i);
        for (int i = n - 1; i >= 0; --i) {
            double v = x[i];
            for (int k = i + 1; k <= std::min(n - 1, i + bw); ++k) v -= get(k, i) * x[k];
            x[i] = v;
        }
    }
};

// band assembly of K - sigma M under a permutation
bool build_shifted_band(const SparseMatrix& K, const SparseMatrix& M, double sigma,
                        const std::vector<int>& pos_of, int bw, BandMatrix& B) {
    B.n = K.n;
    B.bw = bw;
    B.a.assign(size_t(K.n) * (bw + 1), 0.0);
    auto scatter = [&](const SparseMatrix& A, double coef) {
        for (int r = 0; r < A.n; ++r) {
            const int pr = pos_of[r];
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
                const int pc = pos_of[A.col[k]];
                if (pc <= pr) B.at(pr, pc) += coef * A.val[k];
            }
        }
    };
    scatter(K, 1.0);
    scatter(M, -sigma);
    return B.factorize();
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

EigenEstimate smallest_eig(const SparseMatrix& K, const SparseMatrix& M, double tol,
                           std::vector<double>* eigvec_out) {
    if (K.n != M.n || K.n == 0) throw DomainError("smallest_eig: empty or mismatched system");
    const int n = K.n;

    const std::vector<int> order = rcm_order(K);
    std::vector<int> pos_of(n);
    for (int p = 0; p < n; ++p) pos_of[order[p]] = p;
    int bw = 0;
    for (int r = 0; r < n; ++r)
        for (int k = K.row_ptr[r]; k < K.row_ptr[r + 1]; ++k)
            bw = std::max(bw, std::abs(pos_of[r] - pos_of[K.col[k]]));

    // Gershgorin lower estimate of the pencil with a lumped mass
    double gersh = 1e300;
    {
        std::vector<double> mlump(n, 0.0);
        for (int r = 0; r < n; ++r)
            for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) mlump[r] += M.val[k];
        for (int r = 0; r < n; ++r) {
            double diag = 0.0, off = 0.0;
            for (int k = K.row_ptr[r]; k < K.row_ptr[r + 1]; ++k) {
                if (K.col[k] == r)
                    diag = K.val[k];
                else
                    off += std::abs(K.val[k]);
            }
            if (mlump[r] > 0.0) gersh = std::min(gersh, (diag - off) / mlump[r]);
        }
    }
    double sigma = std::max(0.0, 0.9 * gersh);

    BandMatrix B;
    if (!build_shifted_band(K, M, sigma, pos_of, bw, B)) {
        sigma = 0.0;
        if (!build_shifted_band(K, M, sigma, pos_of, bw, B))
            throw IndefiniteFormError("smallest_eig: stiffness form not positive definite");
    }

    std::vector<double> x(n, 1.0), y(n), kx, mx;
    double lambda = 0.0, residual = 1e300;
    bool reshifted = false;
    for (int it = 0; it < 200; ++it) {
        // z = (K - sigma M)^{-1} M x, in permuted coordinates
        mx = M.multiply(x);
        for (int i = 0; i < n; ++i) y[pos_of[i]] = mx[i];
        B.solve(y);
        for (int i = 0; i < n; ++i) x[i] = y[pos_of[i]];
        const double nrm = std::sqrt(std::max(1e-300, dot(x, M.multiply(x))));
        for (double& v : x) v /= nrm;

        kx = K.multiply(x);
        mx = M.multiply(x);
        lambda = dot(x, kx) / dot(x, mx);
        double r2 = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ri = kx[i] - lambda * mx[i];
            r2 += ri * ri;
            m2 += mx[i] * mx[i];
        }
        residual = std::sqrt(r2 / m2);
        if (residual <= tol) break;
        if (!reshifted && it >= 4) {
            // one Rayleigh re-shift accelerates clustered spectra
            double trial = 0.97 * lambda;
            if (trial > sigma && build_shifted_band(K, M, trial, pos_of, bw, B)) {
                sigma = trial;
                reshifted = true;
            } else {
                reshifted = true;  // keep the old factorization
            }
        }
    }
    if (residual > tol)
        throw ConvergenceError("smallest_eig: no convergence within iteration budget");
    if (eigvec_out) *eigvec_out = x;
    EigenEstimate out;
    out.value = lambda;
    out.residual = residual;
    return out;
}

LambdaTauResult lambda_tau(int n, double tau, int levels, double h0, double grading, double tol) {
    if (levels < 1) throw DomainError("lambda_tau: levels >= 1");
    MeridianDomain dom;
    dom.kind = DomainKind::annulus_offcenter;
    dom.n = n;
    dom.rho = 1.0;
    dom.tau = tau;
    MeridianMesh mesh = build_meridian_mesh(dom, h0, grading);

    LambdaTauResult out;
    double prev = 1e300;
    for (int lev = 0; lev < levels; ++lev) {
        SparseSystem sys = assemble(mesh, n, weight_hardy({0.0, 1.0}));
        EigenEstimate e = smallest_eig(sys.K, sys.M, tol);
        out.estimate.trace.emplace_back(int(sys.vertex_of_free.size()), e.value);
        out.level_h.push_back(mesh.max_diameter());
        out.level_dofs.push_back(int(sys.vertex_of_free.size()));
        out.level_residual.push_back(e.residual);
        out.estimate.value = e.value;
        out.estimate.residual = e.residual;
        out.mass_quad_rel_error = sys.mass_quad_rel_error;
        if (e.value > prev * (1.0 + 1e-6))
            throw ConvergenceError("lambda_tau: nonmonotone refinement trace");
        prev = e.value;
        if (lev + 1 < levels) mesh = refine(mesh);
    }
    return out;
}

}  // namespace hardylab::femlab
