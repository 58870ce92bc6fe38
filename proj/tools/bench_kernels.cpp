// Times the serial reference kernels against the OpenMP versions.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mfl/kernels.hpp"

using namespace mfl;
using clk = std::chrono::steady_clock;

static double seconds(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <class F>
static double time_best(F&& f, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clk::now();
        f();
        auto t1 = clk::now();
        best = std::min(best, seconds(t0, t1));
    }
    return best;
}

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "omp[s]", "speedup");

    for (int n : {64, 128, 256}) {
        std::vector<kern::cplx> A((std::size_t)n * n), B(A.size()), C(A.size());
        for (auto& z : A) z = {nd(rng), nd(rng)};
        for (auto& z : B) z = {nd(rng), nd(rng)};
        const double ts = time_best([&] { kern::serial::matmul(C.data(), A.data(), B.data(), n, 0.1); }, 3);
        const double tp = time_best([&] { kern::par::matmul(C.data(), A.data(), B.data(), n, 0.1); }, 3);
        std::printf("matmul %dx%d %*s %10.4f %10.4f %8.2f\n", n, n, 12 - (n >= 100 ? 8 : 6), "", ts,
                    tp, ts / tp);
    }

    for (std::int64_t n : {1 << 20, 1 << 24}) {
        std::vector<kern::cplx> v(n);
        std::vector<double> th(n);
        for (auto& z : v) z = {nd(rng), nd(rng)};
        for (auto& x : th) x = nd(rng);
        const double ts = time_best([&] { kern::serial::phase_mul(v.data(), th.data(), 0.01, n); }, 3);
        const double tp = time_best([&] { kern::par::phase_mul(v.data(), th.data(), 0.01, n); }, 3);
        std::printf("phase_mul n=2^%-2d %11s %10.4f %10.4f %8.2f\n",
                    (int)std::round(std::log2((double)n)), "", ts, tp, ts / tp);
    }

    {
        const std::int64_t rows = 48, cols = 1 << 16;
        std::vector<kern::cplx> A(rows * cols), G(rows * rows);
        for (auto& z : A) z = {nd(rng), nd(rng)};
        const double ts = time_best([&] { kern::serial::gram(G.data(), A.data(), rows, cols, 0.5); }, 3);
        const double tp = time_best([&] { kern::par::gram(G.data(), A.data(), rows, cols, 0.5); }, 3);
        std::printf("gram 48x65536 %13s %10.4f %10.4f %8.2f\n", "", ts, tp, ts / tp);
    }

    {
        // random sparse matrix, ~32 entries per row
        const std::int64_t nrows = 1 << 17;
        const int per = 32;
        std::vector<std::int64_t> rowptr(nrows + 1);
        std::vector<std::int32_t> col(nrows * per);
        std::vector<kern::cplx> val(nrows * per), x(nrows), y(nrows);
        std::uniform_int_distribution<std::int32_t> ci(0, (std::int32_t)nrows - 1);
        for (std::int64_t i = 0; i <= nrows; ++i) rowptr[i] = i * per;
        for (auto& c : col) c = ci(rng);
        for (auto& z : val) z = {nd(rng), nd(rng)};
        for (auto& z : x) z = {nd(rng), nd(rng)};
        const double ts = time_best(
            [&] { kern::serial::csr_matvec(y.data(), rowptr.data(), col.data(), val.data(), x.data(), nrows); }, 3);
        const double tp = time_best(
            [&] { kern::par::csr_matvec(y.data(), rowptr.data(), col.data(), val.data(), x.data(), nrows); }, 3);
        std::printf("csr_matvec 131072x32 %6s %10.4f %10.4f %8.2f\n", "", ts, tp, ts / tp);
    }
    return 0;
}
