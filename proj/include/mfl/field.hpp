#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mfl/grid.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

// Complex scalar function sampled on the grid, stored row-major over axes.
struct Field {
    Grid grid;
    std::vector<cplx> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(g.size(), cplx(0.0)) {}
    Field(const Grid& g, std::vector<cplx> vals) : grid(g), v(std::move(vals)) {
        if ((std::int64_t)v.size() != g.size()) throw std::invalid_argument("field: size mismatch");
    }

    std::int64_t size() const { return (std::int64_t)v.size(); }
    cplx* data() { return v.data(); }
    const cplx* data() const { return v.data(); }
};

inline double mass(const Field& f) {  // ||f||_L2^2
    return f.grid.cell() * kern::sum_abs2(f.data(), f.size());
}

inline double norm_l2(const Field& f) { return std::sqrt(mass(f)); }

inline cplx inner(const Field& a, const Field& b) {  // <a, b>, conjugate-linear in a
    require_same_grid(a.grid, b.grid, "inner");
    return a.grid.cell() * kern::dot(a.data(), b.data(), a.size());
}

// L^p norm, p >= 1 or infinity (p <= 0 encodes infinity)
inline double norm_lp(const Field& f, double p) {
    if (p > 0.0 && p < 1.0) throw std::invalid_argument("norm: p must be >= 1 or inf");
    const std::int64_t n = f.size();
    if (p <= 0.0 || std::isinf(p)) {
        double m = 0.0;
        for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(f.v[i]));
        return m;
    }
    std::vector<double> pw(n);
    for (std::int64_t i = 0; i < n; ++i) pw[i] = std::pow(std::abs(f.v[i]), p);
    return std::pow(f.grid.cell() * kern::sum(pw.data(), n), 1.0 / p);
}

inline constexpr double lp_inf = -1.0;

inline bool finite(const Field& f) {
    for (auto& z : f.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

// build a 1D/2D/3D field from a callable on coordinates
template <class F>
Field make_field(const Grid& g, F&& fn) {
    Field out(g);
    const int M = g.M;
    if (g.dim == 1) {
        for (int i = 0; i < M; ++i) out.v[i] = fn(g.x(i), 0.0, 0.0);
    } else if (g.dim == 2) {
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) out.v[(std::int64_t)i * M + j] = fn(g.x(i), g.x(j), 0.0);
    } else {
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                for (int k = 0; k < M; ++k)
                    out.v[((std::int64_t)i * M + j) * M + k] = fn(g.x(i), g.x(j), g.x(k));
    }
    return out;
}

inline void normalize_l2(Field& f) {
    const double n = norm_l2(f);
    if (n == 0.0) throw std::invalid_argument("normalize: zero field");
    kern::scal(f.data(), 1.0 / n, f.size());
}

}  // namespace mfl
