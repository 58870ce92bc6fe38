#include "mfl/manybody.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/eig.hpp"
#include "mfl/fft.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

std::int64_t mb_bytes(const Grid& g, int N) {
    std::int64_t n = 1;
    for (int a = 0; a < N; ++a) n *= g.M;
    return 16 * n;
}

ManyBodyState::ManyBodyState(const Grid& g, int N_, std::int64_t mem_cap_bytes) : grid(g), N(N_) {
    if (g.dim != 1) throw std::invalid_argument("manybody: grid must be 1D");
    if (N < 2 || N > 5) throw std::invalid_argument("manybody: N must be in [2,5]");
    const std::int64_t bytes = mb_bytes(g, N);
    if (bytes > mem_cap_bytes)
        throw GuardError("manybody: memory guard: 16*M^N = " + std::to_string(bytes) +
                         " bytes exceeds cap " + std::to_string(mem_cap_bytes));
    psi.assign(bytes / 16, cplx(0.0));
}

double ManyBodyState::cell() const {
    double c = 1.0;
    for (int a = 0; a < N; ++a) c *= grid.dx();
    return c;
}

double ManyBodyState::norm() const { return std::sqrt(cell() * kern::sum_abs2(psi.data(), size())); }

double ManyBodyState::swap_defect() const {
    const int M = grid.M;
    double worst = 0.0;
    for (int a = 0; a + 1 < N; ++a) {
        // strides of axes a and a+1 (axis 0 slowest)
        std::int64_t sa = 1;
        for (int q = a + 1; q < N; ++q) sa *= M;
        const std::int64_t sb = sa / M;
        double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
        for (std::int64_t i = 0; i < size(); ++i) {
            const int da = (int)((i / sa) % M);
            const int db = (int)((i / sb) % M);
            if (da >= db) continue;
            const std::int64_t j = i + (std::int64_t)(db - da) * sa + (std::int64_t)(da - db) * sb;
            m = std::max(m, std::abs(psi[i] - psi[j]));
        }
        worst = std::max(worst, m);
    }
    return worst;
}

ManyBodyState factorized_state(const Field& phi, int N, std::int64_t mem_cap_bytes) {
    if (std::abs(norm_l2(phi) - 1.0) > 1e-8)
        throw std::invalid_argument("factorized_state: phi must be L2-normalized");
    ManyBodyState st(phi.grid, N, mem_cap_bytes);
    const int M = phi.grid.M;
    // grow the product one axis at a time, replicating the current block
    st.psi[0] = 1.0;
    std::int64_t blk = 1;
    for (int a = 0; a < N; ++a) {
        for (std::int64_t j = M - 1; j >= 0; --j) {
            const cplx f = phi.v[j];
            cplx* dst = st.psi.data() + j * blk;
            const cplx* src = st.psi.data();
            for (std::int64_t q = 0; q < blk; ++q) dst[q] = src[q] * f;
        }
        blk *= M;
    }
    return st;
}

MbPropagator::MbPropagator(const Grid& g, int N, const ScaledPotential& vN, double dt)
    : grid_(g), N_(N), dt_(dt) {
    const int M = g.M;
    const auto xi = g.wavenumbers();
    xi2_.resize(M);
    for (int i = 0; i < M; ++i) xi2_[i] = xi[i] * xi[i];

    // pair displacement row: v_N(x_i - x_j) = vrow[(i-j) mod M]
    std::vector<double> vrow(M);
    for (int d = 0; d < M; ++d) vrow[d] = vN.samples.v[(d + M / 2) % M].real();

    std::int64_t n = 1;
    for (int a = 0; a < N; ++a) n *= M;
    has_potential_ = !vN.zero();
    w_.assign(has_potential_ ? n : 0, 0.0);
    if (has_potential_) {
        // odometer over the outer N-1 digits, tight inner loop over the last axis
        std::vector<int> dgt(N, 0);
        const unsigned mask = (unsigned)M - 1;
        std::int64_t idx = 0;
        while (idx < n) {
            double outer = 0.0;
            for (int a = 0; a < N - 1; ++a)
                for (int b = a + 1; b < N - 1; ++b)
                    outer += vrow[(unsigned)(dgt[a] - dgt[b]) & mask];
            for (int j = 0; j < M; ++j) {
                double s = outer;
                for (int a = 0; a < N - 1; ++a) s += vrow[(unsigned)(dgt[a] - j) & mask];
                w_[idx++] = s;
            }
            int a = N - 2;
            while (a >= 0 && ++dgt[a] == M) dgt[a--] = 0;
            if (a < 0) break;
            for (int q = a + 1; q < N - 1; ++q) dgt[q] = 0;
        }
    }
}

void MbPropagator::kinetic_phase(ManyBodyState& st, double t, bool with_fft_scale) {
    const int M = grid_.M;
    std::vector<cplx> tab(M);
    for (int j = 0; j < M; ++j) tab[j] = std::polar(1.0, -xi2_[j] * t);
    std::vector<cplx> tab0 = tab;
    if (with_fft_scale) {
        const double s = 1.0 / (double)st.size();
        for (auto& z : tab0) z *= s;
    }
    // odometer with prefix products, last axis innermost
    std::vector<int> dgt(N_, 0);
    std::vector<cplx> pref(N_, 1.0);
    // pref[a] = product of tables over axes 0..a-1 ; axis 0 uses tab0
    auto refresh = [&](int from) {
        for (int a = std::max(from, 1); a < N_; ++a)
            pref[a] = pref[a - 1] * (a - 1 == 0 ? tab0[dgt[0]] : tab[dgt[a - 1]]);
    };
    refresh(1);
    std::int64_t idx = 0;
    const std::int64_t n = st.size();
    while (idx < n) {
        const cplx base = N_ == 1 ? cplx(1.0) : pref[N_ - 1];
        cplx* p = st.psi.data() + idx;
        for (int j = 0; j < M; ++j) p[j] *= base * (N_ == 1 ? tab0[j] : tab[j]);
        idx += M;
        int a = N_ - 2;
        while (a >= 0 && ++dgt[a] == M) dgt[a--] = 0;
        if (a < 0) break;
        refresh(a + 1);
    }
}

void MbPropagator::step(ManyBodyState& st, int nsteps) {
    if (nsteps <= 0) return;
    const std::vector<int> dims((std::size_t)N_, grid_.M);
    const double c = -dt_ / (double)N_;
    fft_raw(st.psi.data(), dims, -1);
    kinetic_phase(st, dt_ / 2, true);
    fft_raw(st.psi.data(), dims, +1);
    for (int s = 0; s < nsteps; ++s) {
        if (has_potential_) kern::phase_mul(st.psi.data(), w_.data(), c, st.size());
        fft_raw(st.psi.data(), dims, -1);
        kinetic_phase(st, s + 1 == nsteps ? dt_ / 2 : dt_, true);
        fft_raw(st.psi.data(), dims, +1);
    }
    for (auto& z : st.psi)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericalAbort("mb_step: NaN/Inf in state");
}

ManyBodyState mb_step(const ManyBodyState& st, const ScaledPotential& vN, double dt) {
    MbPropagator prop(st.grid, st.N, vN, dt);
    ManyBodyState out = st;
    prop.step(out, 1);
    return out;
}

Marginal marginal(const ManyBodyState& st) {
    const int M = st.grid.M;
    Marginal g{st.grid, std::vector<cplx>((std::size_t)M * M)};
    const std::int64_t cols = st.size() / M;
    double w = 1.0;
    for (int a = 0; a < st.N - 1; ++a) w *= st.grid.dx();
    kern::gram(g.g.data(), st.psi.data(), M, cols, w);
    return g;
}

double Marginal::trace() const {
    const int M = grid.M;
    double t = 0.0;
    for (int i = 0; i < M; ++i) t += g[(std::size_t)i * M + i].real();
    return t * grid.dx();
}

double Marginal::hermiticity_defect() const {
    const int M = grid.M;
    double m = 0.0;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j <= i; ++j)
            m = std::max(m, std::abs(g[(std::size_t)i * M + j] - std::conj(g[(std::size_t)j * M + i])));
    return m;
}

double Marginal::min_eigenvalue() const {
    const int M = grid.M;
    std::vector<cplx> a(g);
    for (auto& z : a) z *= grid.dx();
    std::vector<double> w;
    hermitian_eig(a, M, w, nullptr);
    return w.front();
}

double trace_distance(const Marginal& gamma, const Field& phi) {
    require_same_grid(gamma.grid, phi.grid, "trace_distance");
    const int M = gamma.grid.M;
    std::vector<cplx> a((std::size_t)M * M);
    const double dx = gamma.grid.dx();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            a[(std::size_t)i * M + j] =
                dx * (gamma.g[(std::size_t)i * M + j] - phi.v[i] * std::conj(phi.v[j]));
    std::vector<double> w;
    hermitian_eig(a, M, w, nullptr);
    double s = 0.0;
    for (double l : w) s += std::abs(l);
    return s;
}

namespace {

// apply p_axis (projection onto phi in one coordinate) in place
void project_axis(std::vector<cplx>& psi, const Field& phi, int axis, int N) {
    const int M = phi.grid.M;
    const double dx = phi.grid.dx();
    std::int64_t stride = 1;
    for (int q = axis + 1; q < N; ++q) stride *= M;
    const std::int64_t n = (std::int64_t)psi.size();
    const std::int64_t block = stride * M;
#pragma omp parallel for schedule(static)
    for (std::int64_t outer = 0; outer < n / block; ++outer) {
        cplx* base = psi.data() + outer * block;
        for (std::int64_t inner = 0; inner < stride; ++inner) {
            cplx c = 0.0;
            for (int j = 0; j < M; ++j) c += std::conj(phi.v[j]) * base[inner + j * stride];
            c *= dx;
            for (int j = 0; j < M; ++j) base[inner + j * stride] = phi.v[j] * c;
        }
    }
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

PicklResult pickl_alpha(const ManyBodyState& st, const Field& phi, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("pickl_alpha: lambda in (0,1]");
    require_same_grid(st.grid, phi.grid, "pickl_alpha");
    const int N = st.N;
    const double cellN = st.cell();

    PicklResult out;
    out.mu.assign(N + 1, 0.0);
    out.mu[0] = cellN * kern::sum_abs2(st.psi.data(), st.size());  // ||Psi||^2
    std::vector<cplx> T = st.psi;
    for (int m = 1; m <= N; ++m) {
        project_axis(T, phi, m - 1, N);
        out.mu[m] = (cellN * kern::dot(st.psi.data(), T.data(), st.size())).real();
    }
    out.alpha_N = out.mu[0] - out.mu[1];

    out.w.assign(N + 1, 0.0);
    for (int k = 0; k <= N; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += (j % 2 ? -1.0 : 1.0) * binom(k, j) * out.mu[N - k + j];
        out.w[k] = binom(N, k) * s;
    }
    const double Nl = std::pow((double)N, lambda);
    for (int k = 1; k <= N; ++k) out.alpha_lambda += std::min((double)k / Nl, 1.0) * out.w[k];
    return out;
}

double delta_lambda(double beta, double lambda) {
    return 0.5 * std::max({1.0 - lambda - 4.0 * beta, 3.0 * beta - lambda, -1.0 + lambda + 3.0 * beta});
}

std::pair<double, double> delta_lambda_scan(double beta) {
    std::vector<double> cand;
    for (int i = 1; i < 1000; ++i) cand.push_back(i * 1e-3);
    cand.push_back(1.0);
    cand.push_back(0.5);  // analytic minimizers of the max expression
    cand.push_back(1.0 - 3.5 * beta);
    double best_l = cand.front(), best_d = std::numeric_limits<double>::infinity();
    for (double l : cand) {
        if (!(l > 0.0 && l <= 1.0)) continue;
        const double d = delta_lambda(beta, l);
        if (d < best_d) {
            best_d = d;
            best_l = l;
        }
    }
    return {best_l, best_d};
}

double lap_density_l2(const Field& phi) {
    Field dens(phi.grid);
    for (std::int64_t i = 0; i < phi.size(); ++i) dens.v[i] = std::norm(phi.v[i]);
    auto c = spectrum(dens);
    const auto xi = phi.grid.wavenumbers();
    const int M = phi.grid.M;
    std::vector<double> acc(c.size());
    for (std::int64_t idx = 0; idx < (std::int64_t)c.size(); ++idx) {
        std::int64_t r = idx;
        double xi2 = 0.0;
        for (int d = 0; d < phi.grid.dim; ++d) {
            xi2 += xi[r % M] * xi[r % M];
            r /= M;
        }
        acc[idx] = xi2 * xi2 * std::norm(c[idx]);
    }
    double vol = 1.0;
    for (int d = 0; d < phi.grid.dim; ++d) vol *= phi.grid.L;
    return std::sqrt(vol * kern::sum(acc.data(), (std::int64_t)acc.size()));
}

namespace {

double traj_exponent_integral(const PicklTrajectory& tr, double t) {
    double acc = 0.0;
    for (std::size_t i = 1; i < tr.t.size() && tr.t[i - 1] < t; ++i) {
        const double t1 = std::min(tr.t[i], t);
        acc += 0.5 * (tr.linf[i] * tr.linf[i] + tr.linf[i - 1] * tr.linf[i - 1]) * (t1 - tr.t[i - 1]);
    }
    return acc;
}

double traj_supK(const PicklTrajectory& tr, double t, double C_v) {
    double m = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        if (tr.t[i] > t) break;
        m = std::max(m, C_v * (tr.lapdens[i] + tr.linf[i] + 1.0) * tr.linf[i]);
    }
    return m;
}

}  // namespace

double pickl_bound(const PicklTrajectory& traj, double t, double C_v, int N, double beta,
                   double lambda, double alpha0) {
    const double I = traj_exponent_integral(traj, t);
    const double e = std::exp(C_v * I);
    return e * alpha0 + (e - 1.0) * traj_supK(traj, t, C_v) * std::pow((double)N, delta_lambda(beta, lambda));
}

double calibrate_Cv(const PicklTrajectory& traj, double t, int N, double beta, double lambda,
                    double alpha_measured) {
    if (!(alpha_measured > 0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (pickl_bound(traj, t, hi, N, beta, lambda, 0.0) < alpha_measured && hi < 1e8) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pickl_bound(traj, t, mid, N, beta, lambda, 0.0) < alpha_measured) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

RateFit rate_fit(const Grid& g, const Field& phi0, const BumpProfile& profile, double beta,
                 const std::vector<int>& N_list, double t, double dt, double lambda,
                 std::int64_t mem_cap_bytes) {
    if (N_list.empty()) throw std::invalid_argument("rate_fit: empty N list");
    RateFit out;
    out.lambda = lambda;
    const int nsteps = (int)std::llround(t / dt);

    for (int N : N_list) {
        ScaledPotential vN = sample_scaled(profile, N, beta, g);
        // mean-field trajectory with recorded bound ingredients
        PicklTrajectory traj;
        Field phi = phi0;
        auto rec = [&](double tt) {
            traj.t.push_back(tt);
            traj.linf.push_back(norm_lp(phi, lp_inf));
            traj.lapdens.push_back(lap_density_l2(phi));
        };
        rec(0.0);
        for (int s = 1; s <= nsteps; ++s) {
            phi = hartree_step(phi, vN, dt);
            if (s % 10 == 0 || s == nsteps) rec(s * dt);
        }
        ManyBodyState st = factorized_state(phi0, N, mem_cap_bytes);
        MbPropagator prop(g, N, vN, dt);
        prop.step(st, nsteps);
        Marginal gam = marginal(st);
        RatePoint pt;
        pt.N = N;
        pt.trace_dist = trace_distance(gam, phi);
        PicklResult pr = pickl_alpha(st, phi, lambda);
        pt.alpha_N = pr.alpha_N;
        pt.alpha_lambda = pr.alpha_lambda;
        out.points.push_back(pt);
        if (N == N_list.front()) {
            out.C_v = calibrate_Cv(traj, t, N, beta, lambda, pt.alpha_lambda);
        }
        out.points.back().bound = pickl_bound(traj, t, out.C_v, N, beta, lambda, 0.0);
    }

    if (out.points.size() >= 3) {
        std::vector<std::pair<double, double>> pts;
        bool pos = true;
        for (auto& p : out.points) {
            if (!(p.trace_dist > 0.0)) pos = false;
            pts.emplace_back((double)p.N, p.trace_dist);
        }
        if (pos) {
            FitResult f = loglog_fit(pts);
            out.slope = f.slope;
            out.residual = f.residual;
            out.slope_valid = f.residual < 0.5;
        }
    }
    return out;
}

}  // namespace mfl
