#include "mfl/fock.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/eig.hpp"
#include "mfl/fft.hpp"
#include "mfl/kernels.hpp"
#include "mfl/pairexc.hpp"

namespace mfl {

std::uint64_t FockBasis::pack(const std::uint8_t* n, int m) {
    std::uint64_t key = 0;
    for (int j = 0; j < m; ++j) key = (key << 5) | (std::uint64_t)n[j];
    return key;
}

FockBasis::FockBasis(const Grid& g, int n_max_) : grid(g), n_max(n_max_) {
    if (g.dim != 1) throw std::invalid_argument("fock: grid must be 1D");
    const int m = g.M;
    if (m > 12) throw std::invalid_argument("fock: at most 12 modes");
    if (n_max < 1 || n_max > 31) throw std::invalid_argument("fock: n_max in [1,31]");
    // enumerate shell by shell, lexicographic within a shell
    std::vector<std::uint8_t> state(m, 0);
    for (int n = 0; n <= n_max; ++n) {
        shell_start.push_back((std::int64_t)total.size());
        // first composition: everything on the last mode
        std::fill(state.begin(), state.end(), 0);
        state[m - 1] = (std::uint8_t)n;
        while (true) {
            occ.insert(occ.end(), state.begin(), state.end());
            total.push_back(n);
            // next composition of n into m parts
            int j = m - 1;
            while (j > 0 && state[j] == 0) --j;
            if (j == 0) break;
            const int move = state[j];
            state[j] = 0;
            state[j - 1] += 1;
            state[m - 1] = (std::uint8_t)(move - 1);
        }
    }
    dim = (std::int64_t)total.size();
    shell_start.push_back(dim);
    index.reserve((std::size_t)dim * 2);
    for (std::int64_t i = 0; i < dim; ++i) index.emplace(pack(state(i), m), (std::int32_t)i);
}

std::int64_t FockBasis::find(const std::uint8_t* n) const {
    auto it = index.find(pack(n, modes()));
    return it == index.end() ? -1 : (std::int64_t)it->second;
}

double FockState::norm() const { return std::sqrt(kern::sum_abs2(c.data(), (std::int64_t)c.size())); }

double FockState::leakage() const {
    const auto& b = *basis;
    double w = 0.0;
    for (std::int64_t i = b.shell_start[b.n_max]; i < b.dim; ++i) w += std::norm(c[i]);
    return w;
}

FockState vacuum(std::shared_ptr<const FockBasis> basis) {
    FockState s(std::move(basis));
    s.c[0] = 1.0;
    return s;
}

void apply_a(const FockBasis& b, int mode, const cplx* in, cplx* out) {
    const int m = b.modes();
    std::vector<std::uint8_t> tmp(m);
#pragma omp parallel for schedule(static) firstprivate(tmp)
    for (std::int64_t t = 0; t < b.dim; ++t) {
        const std::uint8_t* n = b.state(t);
        if (b.total[t] + 1 > b.n_max) {
            out[t] = 0.0;
            continue;
        }
        std::copy(n, n + m, tmp.begin());
        tmp[mode] += 1;
        const std::int64_t src = b.find(tmp.data());
        out[t] = src < 0 ? cplx(0.0) : std::sqrt((double)tmp[mode]) * in[src];
    }
}

void apply_adag(const FockBasis& b, int mode, const cplx* in, cplx* out) {
    const int m = b.modes();
    std::vector<std::uint8_t> tmp(m);
#pragma omp parallel for schedule(static) firstprivate(tmp)
    for (std::int64_t t = 0; t < b.dim; ++t) {
        const std::uint8_t* n = b.state(t);
        if (n[mode] == 0) {
            out[t] = 0.0;
            continue;
        }
        std::copy(n, n + m, tmp.begin());
        tmp[mode] -= 1;
        const std::int64_t src = b.find(tmp.data());
        out[t] = src < 0 ? cplx(0.0) : std::sqrt((double)n[mode]) * in[src];
    }
}

std::vector<double> number_diagonal(const FockBasis& b) {
    std::vector<double> d(b.dim);
    for (std::int64_t i = 0; i < b.dim; ++i) d[i] = (double)b.total[i];
    return d;
}

double number_expectation(const FockState& s) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < s.basis->dim; ++i) acc += s.basis->total[i] * std::norm(s.c[i]);
    return acc;
}

void SparseH::apply(const cplx* in, cplx* out) const {
    kern::csr_matvec(out, rowptr.data(), col.data(), val.data(), in, dim);
}

namespace {

// real spectral Laplacian matrix on the mode grid
std::vector<double> mode_laplacian(const Grid& g) {
    const int M = g.M;
    const auto xi = g.wavenumbers();
    std::vector<cplx> col(M);
    std::vector<double> lap((std::size_t)M * M);
    for (int j = 0; j < M; ++j) {
        for (int i = 0; i < M; ++i) col[i] = (i == j) ? 1.0 : 0.0;
        fft_raw(col.data(), {M}, -1);
        for (int i = 0; i < M; ++i) col[i] *= -xi[i] * xi[i] / (double)M;
        fft_raw(col.data(), {M}, +1);
        for (int i = 0; i < M; ++i) lap[(std::size_t)i * M + j] = col[i].real();
    }
    return lap;
}

std::vector<double> displacement_row(const ScaledPotential& vN) {
    const int M = vN.samples.grid.M;
    std::vector<double> vrow(M);
    for (int d = 0; d < M; ++d) vrow[d] = vN.samples.v[(d + M / 2) % M].real();
    return vrow;
}

}  // namespace

SparseH fock_hamiltonian(const FockBasis& b, const ScaledPotential& vN, int N) {
    require_same_grid(b.grid, vN.samples.grid, "fock_hamiltonian");
    const int m = b.modes();
    const auto lap = mode_laplacian(b.grid);
    const auto vrow = displacement_row(vN);
    const unsigned mask = (unsigned)m - 1;

    SparseH H;
    H.dim = b.dim;
    H.rowptr.assign(b.dim + 1, 0);
    std::vector<std::uint8_t> tmp(m);

    // two passes: count then fill
    for (int pass = 0; pass < 2; ++pass) {
        std::int64_t nnz = 0;
        for (std::int64_t t = 0; t < b.dim; ++t) {
            const std::uint8_t* n = b.state(t);
            if (pass == 1) H.rowptr[t] = nnz;
            // diagonal: kinetic j=k part + interaction
            double diag = 0.0;
            for (int j = 0; j < m; ++j) diag += lap[(std::size_t)j * m + j] * n[j];
            double inter = 0.0;
            for (int j = 0; j < m; ++j) {
                if (n[j] == 0) continue;
                inter += 0.5 * vrow[0] * (double)n[j] * (n[j] - 1);
                for (int k = j + 1; k < m; ++k)
                    inter += vrow[(unsigned)(j - k) & mask] * (double)n[j] * n[k];
            }
            diag -= inter / (double)N;
            if (pass == 1) {
                H.col.push_back((std::int32_t)t);
                H.val.push_back(diag);
            }
            ++nnz;
            // hopping: adag_j a_k, j != k
            for (int k = 0; k < m; ++k) {
                if (n[k] == 0) continue;
                for (int j = 0; j < m; ++j) {
                    if (j == k) continue;
                    std::copy(n, n + m, tmp.begin());
                    tmp[k] -= 1;
                    tmp[j] += 1;
                    const std::int64_t s = b.find(tmp.data());
                    if (s < 0) continue;
                    if (pass == 1) {
                        const double amp = lap[(std::size_t)j * m + k] *
                                           std::sqrt((double)n[k] * (double)(n[j] + 1));
                        H.col.push_back((std::int32_t)s);
                        H.val.push_back(amp);
                    }
                    ++nnz;
                }
            }
        }
        if (pass == 0) {
            H.col.reserve(nnz);
            H.val.reserve(nnz);
        } else {
            H.rowptr[b.dim] = nnz;
        }
    }
    return H;
}

std::vector<cplx> apply_expi(const ApplyFn& op, std::int64_t dim, const std::vector<cplx>& psi,
                             double tau, double tol, int krylov_dim) {
    const double nrm0 = std::sqrt(kern::sum_abs2(psi.data(), dim));
    if (nrm0 == 0.0 || tau == 0.0) return psi;

    std::vector<cplx> cur = psi;
    double remaining = tau;
    int guard = 0;

    while (std::abs(remaining) > 1e-15 * std::abs(tau) && guard++ < 1000) {
        const double beta0 = std::sqrt(kern::sum_abs2(cur.data(), dim));
        std::vector<std::vector<cplx>> V;
        std::vector<double> alpha, beta;
        V.emplace_back(cur);
        kern::scal(V[0].data(), 1.0 / beta0, dim);
        std::vector<cplx> w(dim);
        int mdim = 0;
        bool breakdown = false;
        for (int j = 0; j < krylov_dim; ++j) {
            op(V[j].data(), w.data());
            if (j > 0) kern::axpy(w.data(), -beta[j - 1], V[j - 1].data(), dim);
            cplx a = kern::dot(V[j].data(), w.data(), dim);
            kern::axpy(w.data(), -a, V[j].data(), dim);
            // one extra orthogonalization pass against the whole basis
            for (int q = 0; q <= j; ++q) {
                const cplx c = kern::dot(V[q].data(), w.data(), dim);
                kern::axpy(w.data(), -c, V[q].data(), dim);
                if (q == j) a += c;
            }
            alpha.push_back(a.real());
            const double bnx = std::sqrt(kern::sum_abs2(w.data(), dim));
            mdim = j + 1;
            if (bnx < 1e-14) {
                breakdown = true;  // invariant subspace, projected exponential is exact
                break;
            }
            beta.push_back(bnx);
            if (j + 1 < krylov_dim) {
                V.emplace_back(w);
                kern::scal(V[j + 1].data(), 1.0 / bnx, dim);
            }
        }
        // substep control: shrink until the residual estimate is below tol
        double sub = remaining;
        std::vector<cplx> y;
        for (int halvings = 0; halvings < 60; ++halvings) {
            std::vector<double> d(alpha.begin(), alpha.begin() + mdim);
            std::vector<double> e;
            for (int q = 0; q + 1 < mdim; ++q) e.push_back(beta[q]);
            std::vector<double> Z;
            tridiag_eig(d, e, Z, mdim);
            y.assign(mdim, 0.0);
            for (int q = 0; q < mdim; ++q) {
                const cplx ph = std::polar(1.0, sub * d[q]);
                for (int r = 0; r < mdim; ++r)
                    y[r] += Z[(std::size_t)r * mdim + q] * ph * Z[(std::size_t)0 * mdim + q];
            }
            if (breakdown) break;
            const double err = beta[mdim - 1] * std::abs(y[mdim - 1]);
            if (err < tol || std::abs(sub) < 1e-12) break;
            sub *= 0.5;
        }
        std::vector<cplx> nxt(dim, cplx(0.0));
        for (int q = 0; q < mdim; ++q) kern::axpy(nxt.data(), beta0 * y[q], V[q].data(), dim);
        cur.swap(nxt);
        remaining -= sub;
    }
    return cur;
}

namespace {

// generator matvecs
void weyl_generator(const FockBasis& b, const Field& phi, double s, double N_scale, const cplx* in,
                    cplx* out) {
    // K = i s sqrt(N) A(phi), A = sum_j sqrt(dx) (conj(phi_j) a_j - phi_j adag_j)
    const int m = b.modes();
    const double sdx = std::sqrt(b.grid.dx());
    const double fac = s * std::sqrt(N_scale);
    std::vector<cplx> tmp(b.dim);
    std::fill(out, out + b.dim, cplx(0.0));
    for (int j = 0; j < m; ++j) {
        apply_a(b, j, in, tmp.data());
        kern::axpy(out, cplx(0.0, 1.0) * fac * sdx * std::conj(phi.v[j]), tmp.data(), b.dim);
        apply_adag(b, j, in, tmp.data());
        kern::axpy(out, cplx(0.0, -1.0) * fac * sdx * phi.v[j], tmp.data(), b.dim);
    }
}

// K = i B(k): gather form over pair moves
void bog_generator(const FockBasis& b, const Kernel& k, const cplx* in, cplx* out) {
    const int m = b.modes();
    const double dx = b.grid.dx();
    std::vector<std::uint8_t> tmp(m);
#pragma omp parallel for schedule(static) firstprivate(tmp)
    for (std::int64_t t = 0; t < b.dim; ++t) {
        const std::uint8_t* n = b.state(t);
        cplx acc = 0.0;
        // kbar_{jk} a_j a_k term: source = t + e_j + e_k
        if (b.total[t] + 2 <= b.n_max) {
            for (int j = 0; j < m; ++j)
                for (int kk = 0; kk < m; ++kk) {
                    std::copy(n, n + m, tmp.begin());
                    tmp[j] += 1;
                    tmp[kk] += 1;
                    const std::int64_t src = b.find(tmp.data());
                    if (src < 0) continue;
                    double amp;
                    if (j == kk) amp = std::sqrt((double)(n[j] + 1) * (n[j] + 2));
                    else amp = std::sqrt((double)(n[j] + 1) * (n[kk] + 1));
                    acc += std::conj(k.at(j, kk)) * amp * in[src];
                }
        }
        // -k_{jk} adag_j adag_k term: source = t - e_j - e_k
        for (int j = 0; j < m; ++j) {
            if (n[j] == 0) continue;
            for (int kk = 0; kk < m; ++kk) {
                if (kk == j && n[j] < 2) continue;
                if (n[kk] == 0) continue;
                std::copy(n, n + m, tmp.begin());
                tmp[j] -= 1;
                tmp[kk] -= 1;
                const std::int64_t src = b.find(tmp.data());
                if (src < 0) continue;
                double amp;
                if (j == kk) amp = std::sqrt((double)n[j] * (n[j] - 1));
                else amp = std::sqrt((double)n[j] * (double)n[kk]);
                acc -= k.at(j, kk) * amp * in[src];
            }
        }
        out[t] = cplx(0.0, 1.0) * dx * acc;
    }
}

void check_leakage(const FockState& s, double leak_tol, const char* what) {
    const double l = s.leakage();
    if (l > leak_tol)
        throw GuardError(std::string(what) + ": truncation leakage " + std::to_string(l) +
                         " above threshold (raise n_max)");
}

}  // namespace

FockState weyl_displace(const FockState& psi, const Field& phi, double s, double N_scale,
                        double leak_tol) {
    require_same_grid(psi.basis->grid, phi.grid, "weyl_displace");
    FockState out = psi;
    const FockBasis& b = *psi.basis;
    // e^{-s sqrt(N) A} = e^{i K}, K = i s sqrt(N) A Hermitian
    out.c = apply_expi(
        [&](const cplx* in, cplx* o) { weyl_generator(b, phi, s, N_scale, in, o); }, b.dim, psi.c,
        1.0);
    check_leakage(out, leak_tol, "weyl_displace");
    return out;
}

FockState bogoliubov_apply(const FockState& psi, const Kernel& k, double leak_tol) {
    require_same_grid(psi.basis->grid, k.grid, "bogoliubov_apply");
    FockState out = psi;
    const FockBasis& b = *psi.basis;
    // e^{-B} = e^{i K}, K = i B Hermitian
    out.c = apply_expi([&](const cplx* in, cplx* o) { bog_generator(b, k, in, o); }, b.dim, psi.c,
                       1.0);
    check_leakage(out, leak_tol, "bogoliubov_apply");
    return out;
}

FockState evolve_exact(const FockState& psi, const SparseH& H, double t) {
    FockState out = psi;
    out.c = apply_expi([&](const cplx* in, cplx* o) { H.apply(in, o); }, H.dim, psi.c, t);
    return out;
}

Kernel pair_kernel_from_sh(const Kernel& sh_k) {
    // S conj(S) = sinh^2(sqrt(w)); multiplier asinh(sqrt(u))/sqrt(u) recovers k = h(S Sbar) o S
    Kernel ss = kernel_compose(sh_k, kernel_conj(sh_k));
    Kernel h = operator_function(ss, [](double u) {
        if (u < 1e-28) return 1.0;
        const double su = std::sqrt(std::max(u, 0.0));
        return std::asinh(su) / su;
    });
    return kernel_compose(h, sh_k);
}

FockState approx_state(const Field& phi, const Kernel& s2, const Kernel& p2, int N,
                       std::shared_ptr<const FockBasis> basis, double leak_tol) {
    HalfAngle ha = half_angle(s2, p2);
    Kernel k = pair_kernel_from_sh(ha.sh_k);
    FockState psi = vacuum(basis);
    psi = bogoliubov_apply(psi, k, leak_tol);
    psi = weyl_displace(psi, phi, 1.0, (double)N, leak_tol);
    return psi;
}

double fock_distance(const FockState& a, const FockState& b) {
    const cplx ip = kern::dot(a.c.data(), b.c.data(), a.basis->dim);
    const double na = a.norm(), nb = b.norm();
    double x = 2.0 - 2.0 * std::abs(ip) / (na * nb);
    return std::sqrt(std::max(0.0, x));
}

Marginal fock_marginal(const FockState& psi) {
    const FockBasis& b = *psi.basis;
    const int m = b.modes();
    const double nbar = number_expectation(psi);
    if (nbar <= 0.0) throw std::invalid_argument("fock_marginal: vacuum input");
    std::vector<cplx> rows((std::size_t)m * b.dim);
    for (int j = 0; j < m; ++j) apply_a(b, j, psi.c.data(), rows.data() + (std::size_t)j * b.dim);
    Marginal g{b.grid, std::vector<cplx>((std::size_t)m * m)};
    kern::gram(g.g.data(), rows.data(), m, b.dim, 1.0 / (b.grid.dx() * nbar));
    return g;
}

int poisson_cutoff(double mu) {
    return (int)std::ceil(mu + 6.0 * std::sqrt(std::max(mu, 0.25)));
}

FockScalingResult fock_error_scaling(const BumpProfile& profile, double beta, const Field& phi0,
                                     const std::vector<double>& t_samples,
                                     const std::vector<int>& N_list, double dt, double leak_tol) {
    FockScalingResult out;
    const Grid& g = phi0.grid;
    const double mass0 = mass(phi0);

    for (int N : N_list) {
        ScaledPotential vN = sample_scaled(profile, N, beta, g, 4);
        const int n_max = poisson_cutoff(N * mass0) + 2;  // margin keeps shell leakage under tol
        auto basis = std::make_shared<const FockBasis>(g, n_max);
        SparseH H = fock_hamiltonian(*basis, vN, N);

        FockScalingPoint pt;
        pt.N = N;
        pt.dim_fock = basis->dim;
        pt.n_max = n_max;

        FockState psi0 = weyl_displace(vacuum(basis), phi0, 1.0, (double)N, leak_tol);
        FockState psi = psi0;
        PairState pair(phi0, g);
        double t_cur = 0.0;
        for (double ts : t_samples) {
            const int nst = (int)std::llround((ts - t_cur) / dt);
            psi = evolve_exact(psi, H, ts - t_cur);
            for (int s = 0; s < nst; ++s) pair_step(pair, vN, dt);
            t_cur = ts;
            FockState app = approx_state(pair.phi, pair.s2, pair.p2, N, basis, leak_tol);
            pt.t.push_back(ts);
            pt.distance.push_back(fock_distance(psi, app));
            pt.leakage = std::max({pt.leakage, psi.leakage(), app.leakage()});
        }
        out.points.push_back(std::move(pt));
    }

    if (out.points.size() >= 3) {
        std::vector<std::pair<double, double>> pts;
        bool pos = true;
        for (auto& p : out.points) {
            const double d = p.distance.back();
            if (!(d > 0.0)) pos = false;
            pts.emplace_back((double)p.N, d);
        }
        if (pos) {
            FitResult f = loglog_fit(pts);
            out.slope = f.slope;
            out.slope_valid = f.residual < 0.5;
        }
    }
    return out;
}

}  // namespace mfl
