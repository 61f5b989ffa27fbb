#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::femlab {

// Axisymmetric finite elements on the meridian half-plane (s, z), s >= 0,
// with the volume weight omega_{n-2} s^{n-2}. Linear triangles; the Hardy
// pole always sits at a Dirichlet vertex, so the weighted mass stays finite.

enum class DomainKind {
    half_ball,         // {|x| < radius, x_n > 0}, pole at the origin
    annulus_offcenter, // {rho < |x| < rho(1+tau)}, pole at rho e_n on the inner sphere
    cap_sector,        // {x in B_1 : x_n < cot(theta)|x'|, |x - rho e_n| > rho}, pole at 0
    exterior_ball_cap, // {|x + 2 rho e_n| > 2 rho} cap B_radius, pole at 0
    custom_polygon,    // star-shaped meridian polygon about the pole
};

struct MeridianDomain {
    DomainKind kind = DomainKind::half_ball;
    int n = 3;
    double rho = 1.0;
    double tau = 1.0;
    double theta = 1.0;
    double radius = 1.0;
    // custom_polygon: closed polyline in (s,z), first vertex = singularity
    std::vector<std::array<double, 2>> polygon;
};

enum VertexTag : uint8_t { tag_interior = 0, tag_dirichlet = 1, tag_axis = 2 };

struct MeridianMesh {
    int n = 3;  // dimension carried along for the s^{n-2} weight
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<uint8_t> vtag;
    std::array<double, 2> singularity{0.0, 0.0};
    int singular_vertex = -1;   // index into vertices, or -1
    double pole_clearance = 0.0;  // Dirichlet collar radius around an excluded pole

    double min_angle_deg() const;
    double max_diameter() const;
};

// Structured polar-fan mesh around the singularity, boundary vertices placed
// exactly on the domain boundary. h controls the pitch; radial layers grade
// geometrically toward the singular point with the given factor.
MeridianMesh build_meridian_mesh(const MeridianDomain& d, double h, double grading = 1.7);

// Dyadic midpoint refinement. The polygon geometry is kept fixed, so the P1
// spaces nest and eigenvalue traces are monotone.
MeridianMesh refine(const MeridianMesh& m);

void write_mesh(const MeridianMesh& m, std::ostream& os);

// Mass weight: w(s, z), optionally with a pole at the singularity where
// elements switch to a local polar rule.
struct Weight {
    std::function<double(double s, double z)> f;
    bool singular_at_pole = false;
};

Weight weight_one();
Weight weight_hardy(std::array<double, 2> pole);  // 1/|x - pole|^2

struct SparseMatrix {
    int n = 0;
    std::vector<int> row_ptr, col;
    std::vector<double> val;

    std::vector<double> multiply(const std::vector<double>& x) const;
    double quadratic(const std::vector<double>& x) const;
};

// ca A + cb B with merged sparsity
SparseMatrix combine(const SparseMatrix& A, double ca, const SparseMatrix& B, double cb);

struct SparseSystem {
    int n_dim = 3;
    std::vector<int> free_of_vertex;  // -1 on Dirichlet vertices
    std::vector<int> vertex_of_free;
    SparseMatrix K;  // stiffness on free dofs
    SparseMatrix M;  // weighted mass on free dofs
    double mass_quad_rel_error = 0.0;  // relative quadrature error estimate of M
};

SparseSystem assemble(const MeridianMesh& mesh, int n, const Weight& w);
// mass matrix only, for composite forms (numerators with several weights)
SparseMatrix assemble_mass(const MeridianMesh& mesh, int n, const Weight& w,
                           const std::vector<int>& free_of_vertex, int free_count,
                           double* quad_rel_error = nullptr);

// Smallest generalized eigenvalue K x = lambda M x by shift-and-invert
// inverse iteration on a reverse-Cuthill-McKee banded factorization;
// deterministic all-ones start. residual = |K x - lambda M x| / |M x|.
// eigvec_out, when given, receives the M-normalized eigenvector on free dofs.
EigenEstimate smallest_eig(const SparseMatrix& K, const SparseMatrix& M, double tol = 1e-9,
                           std::vector<double>* eigvec_out = nullptr);

// Rayleigh quotient of an explicit vertex vector (restricted to free dofs).
double hardy_quotient_of(const std::vector<double>& vertex_values, const SparseSystem& sys);

// Dirichlet energy omega int |grad U|^2 s^{n-2} of a vertex vector over the
// whole mesh, no boundary handling; exact for P1 data.
double stiffness_energy(const MeridianMesh& mesh, int n, const std::vector<double>& vertex_values);

// interpolate a meridian function at the mesh vertices (zero on Dirichlet
// vertices is NOT enforced; hardy_quotient_of drops them)
std::vector<double> interpolate(const MeridianMesh& mesh,
                                const std::function<double(double s, double z)>& f);

struct LambdaTauResult {
    EigenEstimate estimate;           // last level + trace over levels (dofs, value)
    std::vector<double> level_h;      // max element diameter per level
    std::vector<int> level_dofs;
    std::vector<double> level_residual;
    double mass_quad_rel_error = 0.0; // of the finest level
};

// Certified upper bounds for the annulus Hardy constant with the pole on the
// inner sphere, over `levels` nested refinements.
LambdaTauResult lambda_tau(int n, double tau, int levels, double h0 = 1.0 / 12.0,
                           double grading = 1.7, double tol = 1e-9);

}  // namespace hardylab::femlab
