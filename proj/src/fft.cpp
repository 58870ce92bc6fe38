#include "mfl/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace mfl {

namespace {

std::mutex plan_mutex;

fftw_plan get_plan(const std::vector<int>& dims, int sign) {
    static std::map<std::pair<std::vector<int>, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(dims, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::int64_t n = 1;
    for (int d : dims) n *= d;
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft((int)dims.size(), dims.data(), buf, buf,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

}  // namespace

void fft_raw(cplx* data, const std::vector<int>& dims, int sign) {
    fftw_plan p = get_plan(dims, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
}

std::vector<cplx> spectrum(const Field& f) {
    std::vector<cplx> c = f.v;
    std::vector<int> dims(f.grid.dim, f.grid.M);
    fft_raw(c.data(), dims, -1);
    const double s = 1.0 / (double)f.grid.size();
    kern::scal(c.data(), s, (std::int64_t)c.size());
    return c;
}

Field from_spectrum(const Grid& g, const std::vector<cplx>& coef) {
    Field out(g, coef);
    std::vector<int> dims(g.dim, g.M);
    fft_raw(out.data(), dims, +1);
    return out;
}

// apply fn(|xi|^2) as a spectral multiplier, fused over up to 3 axes
template <class F>
static void spectral_multiplier(Field& f, F&& fn) {
    const Grid& g = f.grid;
    const int M = g.M;
    std::vector<int> dims(g.dim, M);
    fft_raw(f.data(), dims, -1);
    const auto xi = g.wavenumbers();
    const double inv = 1.0 / (double)g.size();
    if (g.dim == 1) {
        for (int i = 0; i < M; ++i) f.v[i] *= inv * fn(xi[i] * xi[i]);
    } else if (g.dim == 2) {
        for (int i = 0; i < M; ++i) {
            const double a = xi[i] * xi[i];
            for (int j = 0; j < M; ++j) f.v[(std::int64_t)i * M + j] *= inv * fn(a + xi[j] * xi[j]);
        }
    } else {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < M; ++i) {
            const double a = xi[i] * xi[i];
            for (int j = 0; j < M; ++j) {
                const double b = a + xi[j] * xi[j];
                cplx* row = f.data() + ((std::int64_t)i * M + j) * M;
                for (int k = 0; k < M; ++k) row[k] *= inv * fn(b + xi[k] * xi[k]);
            }
        }
    }
    fft_raw(f.data(), dims, +1);
}

Field free_propagate(const Field& f, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("free_propagate: t not finite");
    Field out = f;
    spectral_multiplier(out, [t](double xi2) { return std::polar(1.0, -xi2 * t); });
    return out;
}

Field convolve(const Field& a, const Field& b) {
    require_same_grid(a.grid, b.grid, "convolve");
    std::vector<int> dims(a.grid.dim, a.grid.M);
    std::vector<cplx> fa = a.v, fb = b.v;
    fft_raw(fa.data(), dims, -1);
    fft_raw(fb.data(), dims, -1);
    const double s = a.grid.cell() / (double)a.grid.size();  // dx^d / M^d
    for (std::int64_t i = 0; i < (std::int64_t)fa.size(); ++i) fa[i] *= s * fb[i];
    fft_raw(fa.data(), dims, +1);
    return Field(a.grid, std::move(fa));
}

namespace {

// sum over modes of w(|xi|^2) |c_xi|^2, with c the Fourier coefficients
template <class W>
double spectral_quadratic(const Field& f, W&& w) {
    const Grid& g = f.grid;
    const int M = g.M;
    std::vector<cplx> c = f.v;
    std::vector<int> dims(g.dim, M);
    fft_raw(c.data(), dims, -1);
    const auto xi = g.wavenumbers();
    const double inv2 = 1.0 / ((double)g.size() * (double)g.size());
    std::vector<double> acc(c.size());
    if (g.dim == 1) {
        for (int i = 0; i < M; ++i) acc[i] = w(xi[i] * xi[i]) * std::norm(c[i]) * inv2;
    } else if (g.dim == 2) {
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                acc[(std::int64_t)i * M + j] =
                    w(xi[i] * xi[i] + xi[j] * xi[j]) * std::norm(c[(std::int64_t)i * M + j]) * inv2;
    } else {
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                for (int k = 0; k < M; ++k) {
                    const std::int64_t idx = ((std::int64_t)i * M + j) * M + k;
                    acc[idx] = w(xi[i] * xi[i] + xi[j] * xi[j] + xi[k] * xi[k]) * std::norm(c[idx]) * inv2;
                }
    }
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.L;
    return vol * kern::sum(acc.data(), (std::int64_t)acc.size());
}

}  // namespace

double norm_l2_spectral(const Field& f) {
    return std::sqrt(spectral_quadratic(f, [](double) { return 1.0; }));
}

double half_deriv_norm(const Field& f) {
    return std::sqrt(spectral_quadratic(f, [](double xi2) { return std::sqrt(std::sqrt(xi2 * xi2)); }));
}

double spectral_support(const Field& f, double mass_fraction) {
    const Grid& g = f.grid;
    std::vector<cplx> c = f.v;
    std::vector<int> dims(g.dim, g.M);
    fft_raw(c.data(), dims, -1);
    const auto xi = g.wavenumbers();
    // gather (|xi|, |c|^2) pairs
    std::vector<std::pair<double, double>> m;
    m.reserve(c.size());
    const int M = g.M;
    for (std::int64_t idx = 0; idx < (std::int64_t)c.size(); ++idx) {
        std::int64_t r = idx;
        double xi2 = 0.0;
        for (int d = g.dim - 1; d >= 0; --d) {
            const int j = (int)(r % M);
            r /= M;
            xi2 += xi[j] * xi[j];
        }
        m.emplace_back(std::sqrt(xi2), std::norm(c[idx]));
    }
    std::sort(m.begin(), m.end());
    double tot = 0.0;
    for (auto& p : m) tot += p.second;
    if (tot <= 0.0) return 0.0;
    double cum = 0.0;
    for (auto& p : m) {
        cum += p.second;
        if (cum >= mass_fraction * tot) return p.first;
    }
    return m.back().first;
}

double wraparound_horizon(const Field& f, double mass_fraction) {
    const double xi_c = spectral_support(f, mass_fraction);
    if (xi_c <= 0.0) return std::numeric_limits<double>::infinity();
    return f.grid.L / (4.0 * 2.0 * xi_c);
}

}  // namespace mfl
