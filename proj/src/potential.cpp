#include "mfl/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace mfl {

ScaledPotential sample_scaled(const BumpProfile& profile, int N, double beta, const Grid& grid,
                              int min_points) {
    if (N < 1) throw std::invalid_argument("sample_scaled: N must be >= 1");
    if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("sample_scaled: beta must be in [0,1]");
    const double scale = std::pow((double)N, beta);
    const double rad_scaled = profile.radius / scale;
    if (profile.amplitude != 0.0) {
        if (!(rad_scaled < grid.L / 2))
            throw std::invalid_argument("sample_scaled: bump support exceeds box");
        if (2.0 * rad_scaled < min_points * grid.dx())
            throw std::invalid_argument(
                "sample_scaled: scaled support under-resolved (needs >= " +
                std::to_string(min_points) + " points across 2 r N^-beta)");
    }
    ScaledPotential out;
    out.profile = profile;
    out.N = N;
    out.beta = beta;
    const double amp = std::pow((double)N, grid.dim * beta);
    out.samples = make_field(grid, [&](double x, double y, double z) {
        const double r = std::sqrt(x * x + y * y + z * z);
        return cplx(amp * profile(r * scale), 0.0);
    });
    return out;
}

double coupling_constant(const BumpProfile& profile, int dim) {
    if (profile.amplitude == 0.0) return 0.0;
    // radial quadrature over [0, r]; integrand is C^infty with flat endpoints,
    // so the trapezoid rule converges superalgebraically
    const int n = 1 << 14;
    const double h = profile.radius / n;
    double s = 0.0;
    for (int i = 1; i < n; ++i) {
        const double r = i * h;
        double w = 1.0;
        if (dim == 2) w = 2.0 * M_PI * r;
        if (dim == 3) w = 4.0 * M_PI * r * r;
        s += w * profile(r);
    }
    s *= h;
    if (dim == 1) s *= 2.0;  // both sides of the origin
    if (dim == 1) s += h * profile(0.0);
    return s;
}

}  // namespace mfl
