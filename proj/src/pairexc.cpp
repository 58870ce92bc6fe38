#include "mfl/pairexc.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "mfl/fft.hpp"
#include "mfl/kernels.hpp"

namespace mfl {

namespace {

// v_N(x_i - x_j) with periodic wrap: displacement (i-j) dx maps to the sample
// of the scaled potential at grid index ((i-j) + M/2) mod M shifted to the box
std::vector<double> pair_matrix(const ScaledPotential& vN) {
    const Grid& g = vN.samples.grid;
    const int M = g.M;
    std::vector<double> row(M);
    for (int d = 0; d < M; ++d) {
        const int idx = ((d + M / 2) % M + M) % M;
        row[d] = vN.samples.v[idx].real();
    }
    std::vector<double> v2((std::size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) v2[(std::size_t)i * M + j] = row[((i - j) % M + M) % M];
    return v2;
}

// real spectral Laplacian matrix, cached per grid
const std::vector<double>& laplacian_matrix(const Grid& g) {
    static std::map<std::pair<int, double>, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(g.M, g.L);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
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
    return cache.emplace(key, std::move(lap)).first->second;
}

std::vector<double> hartree_potential(const Field& phi, const ScaledPotential& vN) {
    Field dens(phi.grid);
    for (std::int64_t i = 0; i < phi.size(); ++i) dens.v[i] = std::norm(phi.v[i]);
    Field conv = convolve(vN.samples, dens);
    std::vector<double> w(phi.size());
    for (std::int64_t i = 0; i < phi.size(); ++i) w[i] = conv.v[i].real();
    return w;
}

// dense helpers on raw row-major complex M x M
void plain_matmul(std::vector<cplx>& C, const std::vector<cplx>& A, const std::vector<double>& Breal,
                  int M, bool real_left) {
    // real_left: C = Breal * A, else C = A * Breal
    C.assign((std::size_t)M * M, 0.0);
    if (real_left) {
        for (int i = 0; i < M; ++i)
            for (int k = 0; k < M; ++k) {
                const double b = Breal[(std::size_t)i * M + k];
                if (b == 0.0) continue;
                const cplx* Ak = A.data() + (std::size_t)k * M;
                cplx* Ci = C.data() + (std::size_t)i * M;
                for (int j = 0; j < M; ++j) Ci[j] += b * Ak[j];
            }
    } else {
        for (int i = 0; i < M; ++i) {
            const cplx* Ai = A.data() + (std::size_t)i * M;
            cplx* Ci = C.data() + (std::size_t)i * M;
            for (int k = 0; k < M; ++k) {
                const cplx a = Ai[k];
                const double* Bk = Breal.data() + (std::size_t)k * M;
                for (int j = 0; j < M; ++j) Ci[j] += a * Bk[j];
            }
        }
    }
}

struct BoundedCoeffs {
    std::vector<double> V;   // (v_N * |phi|^2)(x)
    std::vector<cplx> B;     // v_N(x-y) conj(phi)(x) phi(y)
    std::vector<cplx> m;     // -v_N(x-y) phi(x) phi(y)
};

BoundedCoeffs make_coeffs(const Field& phi, const ScaledPotential& vN, const std::vector<double>& v2) {
    const int M = phi.grid.M;
    BoundedCoeffs c;
    c.V = hartree_potential(phi, vN);
    c.B.resize((std::size_t)M * M);
    c.m.resize((std::size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const double v = v2[(std::size_t)i * M + j];
            c.B[(std::size_t)i * M + j] = v * std::conj(phi.v[i]) * phi.v[j];
            c.m[(std::size_t)i * M + j] = -v * phi.v[i] * phi.v[j];
        }
    return c;
}

// bounded part of the S/W right-hand sides (free Laplacian handled spectrally
// in the splitting, not here)
void bounded_rhs(const BoundedCoeffs& c, const Grid& g, const std::vector<cplx>& s,
                 const std::vector<cplx>& p, std::vector<cplx>& sd, std::vector<cplx>& pd) {
    const int M = g.M;
    const double dx = g.dx();
    const std::size_t n = (std::size_t)M * M;
    std::vector<cplx> t1(n), t2(n);

    // sd = i [ -V(x) s - s V(y) - B^T o s - s o B + 2 m + m o p + conj(p) o m ]
    sd.assign(n, 0.0);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            sd[(std::size_t)i * M + j] = -(c.V[i] + c.V[j]) * s[(std::size_t)i * M + j] +
                                         2.0 * c.m[(std::size_t)i * M + j];
    // B^T o s : (B^T)(i,k) = B(k,i)
    kern::matmul(t1.data(), c.B.data(), s.data(), M, dx);  // t1 = B o s ; need B^T o s
    // compute B^T o s directly
    {
        std::vector<cplx> BT(n);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) BT[(std::size_t)i * M + j] = c.B[(std::size_t)j * M + i];
        kern::matmul(t1.data(), BT.data(), s.data(), M, dx);
        for (std::size_t q = 0; q < n; ++q) sd[q] -= t1[q];
        kern::matmul(t1.data(), s.data(), c.B.data(), M, dx);  // s o B
        for (std::size_t q = 0; q < n; ++q) sd[q] -= t1[q];
        kern::matmul(t1.data(), c.m.data(), p.data(), M, dx);  // m o p
        for (std::size_t q = 0; q < n; ++q) sd[q] += t1[q];
        std::vector<cplx> pc(n);
        for (std::size_t q = 0; q < n; ++q) pc[q] = std::conj(p[q]);
        kern::matmul(t1.data(), pc.data(), c.m.data(), M, dx);  // conj(p) o m
        for (std::size_t q = 0; q < n; ++q) sd[q] += t1[q];

        // pd = i [ -V(x) p + p V(y) - B^T o p + p o B^T + m o conj(s) - s o conj(m) ]
        pd.assign(n, 0.0);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                pd[(std::size_t)i * M + j] = (-c.V[i] + c.V[j]) * p[(std::size_t)i * M + j];
        kern::matmul(t1.data(), BT.data(), p.data(), M, dx);  // B^T o p
        for (std::size_t q = 0; q < n; ++q) pd[q] -= t1[q];
        kern::matmul(t1.data(), p.data(), BT.data(), M, dx);  // p o B^T
        for (std::size_t q = 0; q < n; ++q) pd[q] += t1[q];
        std::vector<cplx> sc(n);
        for (std::size_t q = 0; q < n; ++q) sc[q] = std::conj(s[q]);
        kern::matmul(t1.data(), c.m.data(), sc.data(), M, dx);  // m o conj(s)
        for (std::size_t q = 0; q < n; ++q) pd[q] += t1[q];
        std::vector<cplx> mc(n);
        for (std::size_t q = 0; q < n; ++q) mc[q] = std::conj(c.m[q]);
        kern::matmul(t1.data(), s.data(), mc.data(), M, dx);  // s o conj(m)
        for (std::size_t q = 0; q < n; ++q) pd[q] -= t1[q];
    }
    for (std::size_t q = 0; q < n; ++q) {
        sd[q] *= cplx(0.0, 1.0);
        pd[q] *= cplx(0.0, 1.0);
    }
}

// free two-variable half step: s gets exp(-i(xi^2+eta^2)t), p gets exp(-i(xi^2-eta^2)t)
void free_kernel_step(Kernel& s2, Kernel& p2, double t) {
    const Grid& g = s2.grid;
    const int M = g.M;
    const auto xi = g.wavenumbers();
    std::vector<int> dims = {M, M};
    fft_raw(s2.data(), dims, -1);
    fft_raw(p2.data(), dims, -1);
    const double inv = 1.0 / ((double)M * M);
    for (int i = 0; i < M; ++i) {
        const double a = xi[i] * xi[i];
        for (int j = 0; j < M; ++j) {
            const double b = xi[j] * xi[j];
            s2.at(i, j) *= inv * std::polar(1.0, -(a + b) * t);
            p2.at(i, j) *= inv * std::polar(1.0, -(a - b) * t);
        }
    }
    fft_raw(s2.data(), dims, +1);
    fft_raw(p2.data(), dims, +1);
}

}  // namespace

Kernel build_mN(const Field& phi, const ScaledPotential& vN) {
    require_same_grid(phi.grid, vN.samples.grid, "build_mN");
    const auto v2 = pair_matrix(vN);
    const int M = phi.grid.M;
    Kernel m(phi.grid);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) m.at(i, j) = -v2[(std::size_t)i * M + j] * phi.v[i] * phi.v[j];
    return m;
}

Kernel apply_gN(const Field& phi, const ScaledPotential& vN, const Kernel& K, GNSide side) {
    require_same_grid(phi.grid, K.grid, "apply_gN");
    const Grid& g = phi.grid;
    const int M = g.M;
    const auto& lap = laplacian_matrix(g);
    const auto v2 = pair_matrix(vN);
    const auto V = hartree_potential(phi, vN);
    std::vector<cplx> B((std::size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            B[(std::size_t)i * M + j] = v2[(std::size_t)i * M + j] * std::conj(phi.v[i]) * phi.v[j];

    Kernel out(g);
    std::vector<cplx> tmp((std::size_t)M * M);
    if (side == GNSide::left_transpose) {
        // g^T o K = -lap_x K + V(x) K + B^T o K
        plain_matmul(tmp, K.v, lap, M, true);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                out.at(i, j) = -tmp[(std::size_t)i * M + j] + V[i] * K.at(i, j);
        std::vector<cplx> BT((std::size_t)M * M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) BT[(std::size_t)i * M + j] = B[(std::size_t)j * M + i];
        kern::matmul(tmp.data(), BT.data(), K.data(), M, g.dx());
        for (std::size_t q = 0; q < tmp.size(); ++q) out.v[q] += tmp[q];
    } else {
        // K o g = -lap_y K + K V(y) + K o B ; K o g^T uses B^T
        // lap is symmetric, so right-multiplication is K * lap
        std::vector<cplx> KL((std::size_t)M * M, 0.0);
        for (int i = 0; i < M; ++i)
            for (int k = 0; k < M; ++k) {
                const cplx a = K.at(i, k);
                const double* Lk = lap.data() + (std::size_t)k * M;
                for (int j = 0; j < M; ++j) KL[(std::size_t)i * M + j] += a * Lk[j];
            }
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                out.at(i, j) = -KL[(std::size_t)i * M + j] + K.at(i, j) * V[j];
        std::vector<cplx> Bo = B;
        if (side == GNSide::right_transpose) {
            for (int i = 0; i < M; ++i)
                for (int j = 0; j < M; ++j) Bo[(std::size_t)i * M + j] = B[(std::size_t)j * M + i];
        }
        kern::matmul(tmp.data(), K.data(), Bo.data(), M, g.dx());
        for (std::size_t q = 0; q < tmp.size(); ++q) out.v[q] += tmp[q];
    }
    return out;
}

Kernel dense_gN(const Field& phi, const ScaledPotential& vN) {
    const Grid& g = phi.grid;
    const int M = g.M;
    const auto& lap = laplacian_matrix(g);
    const auto v2 = pair_matrix(vN);
    const auto V = hartree_potential(phi, vN);
    Kernel out(g);
    const double inv_dx = 1.0 / g.dx();
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            cplx val = -lap[(std::size_t)i * M + j] * inv_dx;  // -lap delta as a kernel
            if (i == j) val += V[i] * inv_dx;
            val += v2[(std::size_t)i * M + j] * std::conj(phi.v[i]) * phi.v[j];
            out.at(i, j) = val;
        }
    return out;
}

void pair_step(PairState& st, const ScaledPotential& vN, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("pair_step: dt must be positive");
    const Grid& g = st.phi.grid;
    const auto v2 = pair_matrix(vN);

    const Field phi0 = st.phi;
    const Field phim = hartree_step(phi0, vN, dt / 2);
    const Field phie = hartree_step(phim, vN, dt / 2);

    free_kernel_step(st.s2, st.p2, dt / 2);

    const BoundedCoeffs c0 = make_coeffs(phi0, vN, v2);
    const BoundedCoeffs cm = make_coeffs(phim, vN, v2);
    const BoundedCoeffs ce = make_coeffs(phie, vN, v2);

    const std::size_t n = st.s2.v.size();
    std::vector<cplx> k1s, k1p, k2s, k2p, k3s, k3p, k4s, k4p, ts(n), tp(n);
    bounded_rhs(c0, g, st.s2.v, st.p2.v, k1s, k1p);
    for (std::size_t q = 0; q < n; ++q) {
        ts[q] = st.s2.v[q] + 0.5 * dt * k1s[q];
        tp[q] = st.p2.v[q] + 0.5 * dt * k1p[q];
    }
    bounded_rhs(cm, g, ts, tp, k2s, k2p);
    for (std::size_t q = 0; q < n; ++q) {
        ts[q] = st.s2.v[q] + 0.5 * dt * k2s[q];
        tp[q] = st.p2.v[q] + 0.5 * dt * k2p[q];
    }
    bounded_rhs(cm, g, ts, tp, k3s, k3p);
    for (std::size_t q = 0; q < n; ++q) {
        ts[q] = st.s2.v[q] + dt * k3s[q];
        tp[q] = st.p2.v[q] + dt * k3p[q];
    }
    bounded_rhs(ce, g, ts, tp, k4s, k4p);
    for (std::size_t q = 0; q < n; ++q) {
        st.s2.v[q] += dt / 6.0 * (k1s[q] + 2.0 * k2s[q] + 2.0 * k3s[q] + k4s[q]);
        st.p2.v[q] += dt / 6.0 * (k1p[q] + 2.0 * k2p[q] + 2.0 * k3p[q] + k4p[q]);
    }

    free_kernel_step(st.s2, st.p2, dt / 2);

    st.phi = phie;
    st.t += dt;
}

double bogoliubov_residual(const Kernel& s2, const Kernel& p2) {
    Kernel r = kernel_compose(p2, p2) - kernel_compose(s2, kernel_conj(s2));
    for (std::size_t q = 0; q < r.v.size(); ++q) r.v[q] += 2.0 * p2.v[q];
    return kernel_norm_l2(r);
}

std::pair<double, double> pair_norms(const PairState& st) {
    return {kernel_norm_l2(st.s2), kernel_norm_l2(st.p2)};
}

ErrorTermNorms error_term_norms_from_sh(const Kernel& sh_k, const Field& phi,
                                        const ScaledPotential& vN_probe, int N) {
    const Grid& g = sh_k.grid;
    const int M = g.M;
    const double dx = g.dx();
    const auto v2 = pair_matrix(vN_probe);

    // diagonal densities d1(y) = (conj(s) o s)(y,y), d2(y) = (s o conj(s))(y,y)
    std::vector<double> d1(M, 0.0), d2(M, 0.0);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const double a2 = std::norm(sh_k.at(i, j));
            d2[i] += a2 * dx;
            d1[j] += a2 * dx;
        }

    ErrorTermNorms out;
    double q1 = 0.0, qd6 = 0.0, c1 = 0.0;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const double vv = v2[(std::size_t)i * M + j] * v2[(std::size_t)i * M + j];
            q1 += vv * d1[i] * d2[j];
            qd6 += vv * std::norm(sh_k.at(i, j));
            c1 += vv * std::norm(phi.v[j]) * d1[i];
        }
    out.q1 = std::sqrt(q1 * dx * dx) / N;
    out.qd6 = std::sqrt(qd6 * dx * dx) / N;
    out.c1 = std::sqrt(c1 * dx * dx) / std::sqrt((double)N);
    double l3 = 0.0;
    for (int i = 0; i < M; ++i) {
        cplx h = 0.0;
        for (int j = 0; j < M; ++j)
            h += sh_k.at(i, j) * std::conj(phi.v[j]) * v2[(std::size_t)i * M + j] * dx;
        l3 += std::norm(h);
    }
    out.l3 = std::sqrt(l3 * dx) / std::sqrt((double)N);
    return out;
}

ErrorTermNorms error_term_norms(const PairState& st, const ScaledPotential& vN_probe, int N) {
    HalfAngle ha = half_angle(st.s2, st.p2);
    ErrorTermNorms out = error_term_norms_from_sh(ha.sh_k, st.phi, vN_probe, N);
    out.half_angle_min_eig = ha.min_eig;
    return out;
}

double c1_chain_bound(const Kernel& sh_k, const Field& phi, const ScaledPotential& vN_probe, int N) {
    return norm_lp(phi, lp_inf) * norm_l2(vN_probe.samples) * kernel_norm_l2(sh_k) /
           std::sqrt((double)N);
}

PairRunResult PairRun::run(PairState* final_state) const {
    PairState st(phi0, grid);
    PairRunResult res;
    const int nsteps = (int)std::llround(t_end / dt);
    auto record = [&](double t) {
        res.t.push_back(t);
        auto [sn, pn] = pair_norms(st);
        res.s2_l2.push_back(sn);
        res.p2_l2.push_back(pn);
        const double r = bogoliubov_residual(st.s2, st.p2);
        res.residual.push_back(r);
        if (r > 100.0 * residual_tol)
            throw NumericalAbort("pair run: Bogoliubov residual " + std::to_string(r) +
                                 " exceeds 100 x tolerance");
        ErrorTermNorms en = error_term_norms(st, vN, N);
        res.q1.push_back(en.q1);
        res.qd6.push_back(en.qd6);
        res.c1.push_back(en.c1);
        res.l3.push_back(en.l3);
        res.half_angle_min_eig = std::min(res.half_angle_min_eig, en.half_angle_min_eig);
    };
    record(0.0);
    for (int s = 1; s <= nsteps; ++s) {
        pair_step(st, vN, dt);
        if (s % record_every == 0 || s == nsteps) record(s * dt);
    }
    res.half_angle_warning = res.half_angle_min_eig < 0.999;
    if (final_state) *final_state = st;
    return res;
}

}  // namespace mfl
