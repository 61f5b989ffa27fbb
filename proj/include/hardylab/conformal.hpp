#pragma once

#include <functional>
#include <vector>

#include "hardylab/common.hpp"

namespace hardylab::conformal {

// Points in R^n; the last coordinate is the e_n direction.
using PointN = std::vector<double>;

struct BallSpec {
    PointN center;
    double radius = 0.0;
};

double norm(const PointN& x);
double dist(const PointN& x, const PointN& y);
PointN unit_en(int n);

// Kelvin inversion x -> x/|x|^2; involutive, undefined at 0.
PointN kelvin(const PointN& x);

// S(v) = (2v', 1-|v|^2)/|v+e_n|^2 maps the upper half space onto the unit
// ball; S is its own inverse.
PointN map_s(const PointN& v);

// T = K o S maps the upper half space onto the exterior of the unit ball.
PointN map_t(const PointN& v);

// T^{-1}(x) = (2x', |x|^2-1)/|x+e_n|^2.
PointN inv_t(const PointN& x);

// |det JT(v)| = 2^n / |v-e_n|^{2n}.
double jac_t(const PointN& v);

// images of centered balls: T(B(r)) = B(((1+r^2)/(1-r^2)) e_n, 2r/(1-r^2)).
BallSpec image_ball(int n, double r);

// sigma_n = 1/(sqrt(75) n^2).
double sigma_n(int n);

enum class MapKind { kelvin, s, t };

// Smooth compactly supported test function on the image side with an
// analytic gradient.
struct TrialField {
    std::function<double(const PointN&)> value;
    std::function<PointN(const PointN&)> gradient;
    // points spanning the support; the source integration box is the padded
    // bounding box of their preimages
    std::vector<PointN> support_samples;
};

// C-infinity bump of |x-center|: nonzero on (inner, outer), identically zero
// outside. inner = 0 gives a ball bump.
TrialField radial_bump(PointN center, double inner, double outer);
// product of coordinate bumps on the box center +- halfwidth
TrialField tensor_bump(PointN center, std::vector<double> halfwidth);

struct EnergyPair {
    double source = 0.0;  // Dirichlet energy of the conformal pullback
    double image = 0.0;   // Dirichlet energy of f, by change of variables
    long points = 0;
};

// Pulls f back through the chosen map as G(v) = f(map(v)) |J(v)|^{(n-2)/2n}
// and integrates |grad G|^2 over the preimage of the support with a tensor
// Gauss-Legendre grid of the given order per axis; the image energy uses the
// same grid through the change of variables. Conformality makes the two
// energies equal up to quadrature error.
EnergyPair pullback_energy_pair(int n, const TrialField& f, MapKind which, int points_per_axis);

}  // namespace hardylab::conformal
