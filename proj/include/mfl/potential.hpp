#pragma once

#include <string>

#include "mfl/field.hpp"

namespace mfl {

// Smooth compactly supported radial profile:
//   v(x) = sign * a * exp(-1 / (1 - |x/r|^2))  for |x| < r, 0 otherwise
// sign = -1 attractive, +1 repulsive.
struct BumpProfile {
    double amplitude = 1.0;
    double radius = 1.0;
    int sign = -1;

    double operator()(double rad) const {
        const double u = rad / radius;
        if (!(u * u < 1.0)) return 0.0;
        return sign * amplitude * std::exp(-1.0 / (1.0 - u * u));
    }
};

// v_N(x) = N^{dim*beta} v(N^beta x) sampled on the grid; the L1 integral is
// invariant under the scaling.
struct ScaledPotential {
    BumpProfile profile;
    int N = 1;
    double beta = 0.0;
    Field samples;

    bool zero() const { return profile.amplitude == 0.0; }
};

// Guards: scaled support must fit the box (N^{-beta} r < L/2) and be resolved
// by at least min_points grid points across its diameter (8 for scaling
// studies; Fock-space runs on few-site grids relax this).
ScaledPotential sample_scaled(const BumpProfile& profile, int N, double beta, const Grid& grid,
                              int min_points = 8);

// integral of the unscaled profile over R^dim (the limiting NLS coupling)
double coupling_constant(const BumpProfile& profile, int dim);

}  // namespace mfl
