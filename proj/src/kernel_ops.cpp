#include "mfl/kernel_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "mfl/eig.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

Kernel kernel_compose(const Kernel& A, const Kernel& B) {
    require_same_grid(A.grid, B.grid, "kernel_compose");
    Kernel C(A.grid);
    kern::matmul(C.data(), A.data(), B.data(), A.M(), A.grid.dx());
    return C;
}

Kernel kernel_transpose(const Kernel& A) {
    Kernel T(A.grid);
    const int M = A.M();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) T.at(i, j) = A.at(j, i);
    return T;
}

Kernel kernel_conj(const Kernel& A) {
    Kernel C(A.grid);
    for (std::size_t i = 0; i < A.v.size(); ++i) C.v[i] = std::conj(A.v[i]);
    return C;
}

Kernel delta_kernel(const Grid& g) {
    Kernel D(g);
    const double inv = 1.0 / g.dx();
    for (int i = 0; i < g.M; ++i) D.at(i, i) = inv;
    return D;
}

Kernel operator+(const Kernel& A, const Kernel& B) {
    require_same_grid(A.grid, B.grid, "kernel add");
    Kernel C = A;
    for (std::size_t i = 0; i < C.v.size(); ++i) C.v[i] += B.v[i];
    return C;
}

Kernel operator-(const Kernel& A, const Kernel& B) {
    require_same_grid(A.grid, B.grid, "kernel sub");
    Kernel C = A;
    for (std::size_t i = 0; i < C.v.size(); ++i) C.v[i] -= B.v[i];
    return C;
}

Kernel operator*(cplx a, const Kernel& A) {
    Kernel C = A;
    kern::scal(C.data(), a, (std::int64_t)C.v.size());
    return C;
}

double kernel_norm_l2(const Kernel& A) {
    return A.grid.dx() * std::sqrt(kern::sum_abs2(A.data(), (std::int64_t)A.v.size()));
}

double symmetry_defect(const Kernel& A) {
    double m = 0.0;
    const int M = A.M();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < i; ++j) m = std::max(m, std::abs(A.at(i, j) - A.at(j, i)));
    return m;
}

double hermiticity_defect(const Kernel& A) {
    double m = 0.0;
    const int M = A.M();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j <= i; ++j) m = std::max(m, std::abs(A.at(i, j) - std::conj(A.at(j, i))));
    return m;
}

namespace {
constexpr int series_cap = 40;
}

Kernel sh_series(const Kernel& k, double tol) {
    Kernel S = k;
    Kernel term = k;
    const Kernel kk = kernel_compose(kernel_conj(k), k);  // kbar o k, applied on the right
    for (int n = 0; n < series_cap; ++n) {
        term = kernel_compose(term, kk);
        const double fac = 1.0 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
        kern::scal(term.data(), fac, (std::int64_t)term.v.size());
        const double tn = kernel_norm_l2(term);
        for (std::size_t i = 0; i < S.v.size(); ++i) S.v[i] += term.v[i];
        if (tn < tol) return S;
    }
    throw std::runtime_error("sh_series: no decay within 40 terms (kernel too large)");
}

Kernel ch_series(const Kernel& k, double tol) {
    const Kernel kk = kernel_compose(k, kernel_conj(k));  // k o kbar
    Kernel term = 0.5 * kk;
    Kernel P = term;
    if (kernel_norm_l2(term) < tol) return P;
    for (int n = 1; n < series_cap; ++n) {
        term = kernel_compose(term, kk);
        const double fac = 1.0 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
        kern::scal(term.data(), fac, (std::int64_t)term.v.size());
        const double tn = kernel_norm_l2(term);
        for (std::size_t i = 0; i < P.v.size(); ++i) P.v[i] += term.v[i];
        if (tn < tol) return P;
    }
    throw std::runtime_error("ch_series: no decay within 40 terms (kernel too large)");
}

Kernel operator_function(const Kernel& A, double (*fn)(double)) {
    const int M = A.M();
    const double dx = A.grid.dx();
    // matrix of the operator in the orthonormalized basis is dx * A
    std::vector<cplx> mat(A.v);
    for (auto& z : mat) z *= dx;
    std::vector<double> w;
    std::vector<cplx> V;
    hermitian_eig(mat, M, w, &V);
    Kernel out(A.grid);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            cplx s = 0.0;
            for (int q = 0; q < M; ++q)
                s += V[(std::size_t)i * M + q] * fn(w[q]) * std::conj(V[(std::size_t)j * M + q]);
            out.at(i, j) = s / dx;
        }
    return out;
}

HalfAngle half_angle(const Kernel& s2, const Kernel& p2) {
    require_same_grid(s2.grid, p2.grid, "half_angle");
    const int M = s2.M();
    const double dx = s2.grid.dx();
    // X = (delta + ch(2k))/2 = delta + p2/2; orthonormal-basis matrix I + dx*p2/2
    std::vector<cplx> mat(p2.v);
    for (auto& z : mat) z *= 0.5 * dx;
    for (int i = 0; i < M; ++i) mat[(std::size_t)i * M + i] += 1.0;
    std::vector<double> w;
    std::vector<cplx> V;
    hermitian_eig(mat, M, w, &V);

    HalfAngle out;
    out.min_eig = w.front();
    const double floor_ev = 1e-12;

    // kernel-convention matrices of X^{-1/2} and X^{1/2}
    Kernel xm(s2.grid), xp(s2.grid);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            cplx sm = 0.0, sp = 0.0;
            for (int q = 0; q < M; ++q) {
                const double ev = std::max(w[q], floor_ev);
                const cplx vv = V[(std::size_t)i * M + q] * std::conj(V[(std::size_t)j * M + q]);
                sm += vv / std::sqrt(ev);
                sp += vv * std::sqrt(ev);
            }
            xm.at(i, j) = sm / dx;
            xp.at(i, j) = sp / dx;
        }
    out.sh_k = 0.5 * kernel_compose(xm, s2);
    out.p1 = xp - delta_kernel(s2.grid);
    return out;
}

}  // namespace mfl
