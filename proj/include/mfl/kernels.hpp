#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

// Hot inner loops. Every kernel exists twice: a plain serial reference in
// kern::serial and an OpenMP version in kern::par. The dispatchers at the
// bottom pick the parallel path above a size threshold; tests compare the two
// paths on random data and tools/bench_kernels times them.
//
// Reductions (dot, sum_abs2) are serial pairwise sums on all paths so that
// results do not depend on thread count.

namespace mfl::kern {

using cplx = std::complex<double>;

namespace serial {

// C = alpha * A * B, dense complex n x n, row-major
inline void matmul(cplx* C, const cplx* A, const cplx* B, int n, double alpha) {
    for (int i = 0; i < n; ++i) {
        cplx* Ci = C + (std::int64_t)i * n;
        for (int j = 0; j < n; ++j) Ci[j] = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx a = alpha * A[(std::int64_t)i * n + k];
            const cplx* Bk = B + (std::int64_t)k * n;
            for (int j = 0; j < n; ++j) Ci[j] += a * Bk[j];
        }
    }
}

// v[i] *= exp(i * c * theta[i])
inline void phase_mul(cplx* v, const double* theta, double c, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = c * theta[i];
        v[i] *= cplx(std::cos(t), std::sin(t));
    }
}

// v[i] *= w[i]
inline void cmul(cplx* v, const cplx* w, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) v[i] *= w[i];
}

// y += a * x
inline void axpy(cplx* y, cplx a, const cplx* x, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline void scal(cplx* v, cplx a, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) v[i] *= a;
}

// G = alpha * A * A^H with A of shape rows x cols (row-major), G rows x rows
inline void gram(cplx* G, const cplx* A, std::int64_t rows, std::int64_t cols, double alpha) {
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            cplx s = 0.0;
            const cplx* ai = A + i * cols;
            const cplx* aj = A + j * cols;
            for (std::int64_t k = 0; k < cols; ++k) s += ai[k] * std::conj(aj[k]);
            G[i * rows + j] = alpha * s;
            G[j * rows + i] = std::conj(alpha * s);
        }
    }
}

// y = S * x for CSR complex matrix
inline void csr_matvec(cplx* y, const std::int64_t* rowptr, const std::int32_t* col,
                       const cplx* val, const cplx* x, std::int64_t nrows) {
    for (std::int64_t i = 0; i < nrows; ++i) {
        cplx s = 0.0;
        for (std::int64_t p = rowptr[i]; p < rowptr[i + 1]; ++p) s += val[p] * x[col[p]];
        y[i] = s;
    }
}

}  // namespace serial

namespace par {

inline void matmul(cplx* C, const cplx* A, const cplx* B, int n, double alpha) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        cplx* Ci = C + (std::int64_t)i * n;
        for (int j = 0; j < n; ++j) Ci[j] = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx a = alpha * A[(std::int64_t)i * n + k];
            const cplx* Bk = B + (std::int64_t)k * n;
            for (int j = 0; j < n; ++j) Ci[j] += a * Bk[j];
        }
    }
}

inline void phase_mul(cplx* v, const double* theta, double c, std::int64_t n) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = c * theta[i];
        v[i] *= cplx(std::cos(t), std::sin(t));
    }
}

inline void cmul(cplx* v, const cplx* w, std::int64_t n) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) v[i] *= w[i];
}

inline void axpy(cplx* y, cplx a, const cplx* x, std::int64_t n) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline void scal(cplx* v, cplx a, std::int64_t n) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) v[i] *= a;
}

inline void gram(cplx* G, const cplx* A, std::int64_t rows, std::int64_t cols, double alpha) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            cplx s = 0.0;
            const cplx* ai = A + i * cols;
            const cplx* aj = A + j * cols;
            for (std::int64_t k = 0; k < cols; ++k) s += ai[k] * std::conj(aj[k]);
            G[i * rows + j] = alpha * s;
            G[j * rows + i] = std::conj(alpha * s);
        }
    }
}

inline void csr_matvec(cplx* y, const std::int64_t* rowptr, const std::int32_t* col,
                       const cplx* val, const cplx* x, std::int64_t nrows) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nrows; ++i) {
        cplx s = 0.0;
        for (std::int64_t p = rowptr[i]; p < rowptr[i + 1]; ++p) s += val[p] * x[col[p]];
        y[i] = s;
    }
}

}  // namespace par

// ---- dispatchers -----------------------------------------------------------

inline constexpr std::int64_t par_threshold = 1 << 14;

inline void matmul(cplx* C, const cplx* A, const cplx* B, int n, double alpha) {
    if ((std::int64_t)n * n >= par_threshold) par::matmul(C, A, B, n, alpha);
    else serial::matmul(C, A, B, n, alpha);
}
inline void phase_mul(cplx* v, const double* theta, double c, std::int64_t n) {
    if (n >= par_threshold) par::phase_mul(v, theta, c, n);
    else serial::phase_mul(v, theta, c, n);
}
inline void cmul(cplx* v, const cplx* w, std::int64_t n) {
    if (n >= par_threshold) par::cmul(v, w, n);
    else serial::cmul(v, w, n);
}
inline void axpy(cplx* y, cplx a, const cplx* x, std::int64_t n) {
    if (n >= par_threshold) par::axpy(y, a, x, n);
    else serial::axpy(y, a, x, n);
}
inline void scal(cplx* v, cplx a, std::int64_t n) {
    if (n >= par_threshold) par::scal(v, a, n);
    else serial::scal(v, a, n);
}
inline void gram(cplx* G, const cplx* A, std::int64_t rows, std::int64_t cols, double alpha) {
    if (rows * cols >= par_threshold) par::gram(G, A, rows, cols, alpha);
    else serial::gram(G, A, rows, cols, alpha);
}
inline void csr_matvec(cplx* y, const std::int64_t* rowptr, const std::int32_t* col,
                       const cplx* val, const cplx* x, std::int64_t nrows) {
    if (nrows >= par_threshold) par::csr_matvec(y, rowptr, col, val, x, nrows);
    else serial::csr_matvec(y, rowptr, col, val, x, nrows);
}

// ---- deterministic reductions (pairwise, thread-count independent) ---------

inline double sum_abs2(const cplx* v, std::int64_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += std::norm(v[i]);
        return s;
    }
    const std::int64_t h = n / 2;
    return sum_abs2(v, h) + sum_abs2(v + h, n - h);
}

inline cplx dot(const cplx* a, const cplx* b, std::int64_t n) {  // <a, b> = sum conj(a) b
    if (n <= 32) {
        cplx s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
        return s;
    }
    const std::int64_t h = n / 2;
    return dot(a, b, h) + dot(a + h, b + h, n - h);
}

inline double sum(const double* v, std::int64_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::int64_t h = n / 2;
    return sum(v, h) + sum(v + h, n - h);
}

}  // namespace mfl::kern
