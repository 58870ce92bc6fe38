#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mfl {

using cplx = std::complex<double>;

// Periodic box [-L/2, L/2)^dim sampled with M points per axis, M a power of two.
struct Grid {
    int dim = 1;
    int M = 0;
    double L = 0.0;

    Grid() = default;
    Grid(int dim_, int M_, double L_) : dim(dim_), M(M_), L(L_) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
        if (M < 2 || (M & (M - 1)) != 0) throw std::invalid_argument("grid: M must be a power of two");
        if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
    }

    double dx() const { return L / M; }
    std::int64_t size() const {
        std::int64_t n = 1;
        for (int d = 0; d < dim; ++d) n *= M;
        return n;
    }
    double cell() const {  // quadrature weight dx^dim
        double w = 1.0;
        for (int d = 0; d < dim; ++d) w *= dx();
        return w;
    }
    double x(int j) const { return -L / 2 + j * dx(); }

    // wavenumbers in standard DFT ordering: 0, 1, ..., M/2, -M/2+1, ..., -1 (times 2*pi/L)
    std::vector<double> wavenumbers() const {
        std::vector<double> xi(M);
        const double k0 = 2.0 * M_PI / L;
        for (int j = 0; j < M; ++j) xi[j] = k0 * (j <= M / 2 ? j : j - M);
        return xi;
    }

    bool operator==(const Grid& o) const { return dim == o.dim && M == o.M && L == o.L; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace mfl
