#pragma once

#include <vector>

#include "mfl/field.hpp"
#include "mfl/grid.hpp"

namespace mfl {

// Two-point kernel K(x, y) on a 1D grid, row-major M x M. Operator composition
// carries the quadrature weight dx: (A o B)(x,y) = sum_z A(x,z) B(z,y) dx, so
// the discrete delta (identity element) is I/dx on the diagonal.
struct Kernel {
    Grid grid;  // dim must be 1
    std::vector<cplx> v;

    Kernel() = default;
    explicit Kernel(const Grid& g) : grid(g), v((std::size_t)g.M * g.M, cplx(0.0)) {
        if (g.dim != 1) throw std::invalid_argument("kernel: grid must be 1D");
    }

    int M() const { return grid.M; }
    cplx& at(int i, int j) { return v[(std::size_t)i * grid.M + j]; }
    const cplx& at(int i, int j) const { return v[(std::size_t)i * grid.M + j]; }
    cplx* data() { return v.data(); }
    const cplx* data() const { return v.data(); }
};

Kernel kernel_compose(const Kernel& A, const Kernel& B);
Kernel kernel_transpose(const Kernel& A);
Kernel kernel_conj(const Kernel& A);
Kernel delta_kernel(const Grid& g);  // 1/dx on the diagonal

Kernel operator+(const Kernel& A, const Kernel& B);
Kernel operator-(const Kernel& A, const Kernel& B);
Kernel operator*(cplx a, const Kernel& A);

double kernel_norm_l2(const Kernel& A);       // quadrature-weighted Frobenius norm
double symmetry_defect(const Kernel& A);      // max |K(x,y) - K(y,x)|
double hermiticity_defect(const Kernel& A);   // max |K(x,y) - conj(K(y,x))|

// operator hyperbolic series for symmetric k:
//   sh(k) = k + k o kbar o k / 3! + k o kbar o k o kbar o k / 5! + ...
//   ch(k) = delta + (k o kbar)/2! + (k o kbar)^2/4! + ...   (returned without the delta)
// Composition order in ch fixed by the identity ch(k) o ch(k) - sh(k) o conj(sh(k)) = delta,
// verified against the series oracle in the tests. Truncated when the next
// term's L2 norm drops below tol; throws if 40 terms do not reach that.
Kernel sh_series(const Kernel& k, double tol = 1e-12);
Kernel ch_series(const Kernel& k, double tol = 1e-12);

// f applied to a Hermitian kernel by spectral calculus, result in kernel convention
Kernel operator_function(const Kernel& A, double (*fn)(double));

// Half-angle recovery: given s2 = sh(2k), p2 = ch(2k) - delta, return
// sh(k) = (1/2) [(delta + ch(2k))/2]^{-1/2} o s2 and ch(k) - delta.
// min_eig reports the smallest eigenvalue of (delta + ch(2k))/2; values
// noticeably below 1 mean (s2, p2) drifted off the sh/ch manifold.
struct HalfAngle {
    Kernel sh_k;
    Kernel p1;
    double min_eig = 1.0;
};
HalfAngle half_angle(const Kernel& s2, const Kernel& p2);

}  // namespace mfl
