#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "mfl/kernel_ops.hpp"
#include "mfl/manybody.hpp"
#include "mfl/potential.hpp"

namespace mfl {

// Truncated bosonic Fock space over the grid sites of a small 1D grid.
// Dictionary: a_j ~ sqrt(dx) a_x, which keeps [a_j, a_j^dag] = 1 exact.
// States are occupation vectors (n_1..n_m) with sum n_j <= n_max, enumerated
// by total particle number, lexicographic within each shell.
struct FockBasis {
    Grid grid;  // dim 1, M = number of modes
    int n_max = 0;
    std::vector<std::uint8_t> occ;   // dim x modes, row-major
    std::vector<int> total;          // particle number per state
    std::vector<std::int64_t> shell_start;  // first index of each total-n shell
    std::unordered_map<std::uint64_t, std::int32_t> index;
    std::int64_t dim = 0;

    FockBasis(const Grid& g, int n_max_);
    int modes() const { return grid.M; }
    const std::uint8_t* state(std::int64_t i) const { return occ.data() + i * modes(); }
    std::int64_t find(const std::uint8_t* n) const;  // -1 if outside the truncation
    static std::uint64_t pack(const std::uint8_t* n, int m);
};

struct FockState {
    std::shared_ptr<const FockBasis> basis;
    std::vector<cplx> c;

    FockState() = default;
    explicit FockState(std::shared_ptr<const FockBasis> b)
        : basis(std::move(b)), c(basis->dim, cplx(0.0)) {}

    double norm() const;
    double leakage() const;  // weight in the top shell n = n_max
};

FockState vacuum(std::shared_ptr<const FockBasis> basis);

// ladder operators in gather form (parallel safe); bounds-checked against the cutoff
void apply_a(const FockBasis& b, int mode, const cplx* in, cplx* out);
void apply_adag(const FockBasis& b, int mode, const cplx* in, cplx* out);
std::vector<double> number_diagonal(const FockBasis& b);
double number_expectation(const FockState& s);

// sparse Hermitian Fock Hamiltonian H = dGamma(lap) - (1/N) V with
// V = 1/2 sum_{jk} v_N(x_j - x_k) adag_j adag_k a_j a_k (diagonal in this basis)
struct SparseH {
    std::vector<std::int64_t> rowptr;
    std::vector<std::int32_t> col;
    std::vector<cplx> val;
    std::int64_t dim = 0;
    void apply(const cplx* in, cplx* out) const;
};
SparseH fock_hamiltonian(const FockBasis& b, const ScaledPotential& vN, int N);

// Krylov (Lanczos) propagator: returns exp(i tau Op) psi for Hermitian Op
using ApplyFn = std::function<void(const cplx*, cplx*)>;
std::vector<cplx> apply_expi(const ApplyFn& op, std::int64_t dim, const std::vector<cplx>& psi,
                             double tau, double tol = 1e-10, int krylov_dim = 40);

// Weyl displacement exp(-s sqrt(N) A(phi)), A(phi) = a(conj phi) - adag(phi)
FockState weyl_displace(const FockState& psi, const Field& phi, double s, double N_scale,
                        double leak_tol = 1e-6);

// Bogoliubov exp(-B(k)) with B(k) = int kbar a a - k adag adag (k symmetric)
FockState bogoliubov_apply(const FockState& psi, const Kernel& k, double leak_tol = 1e-6);

// exact evolution exp(i t H) psi
FockState evolve_exact(const FockState& psi, const SparseH& H, double t);

// invert the sh series: given S = sh(k) return k (spectral calculus on S o conj(S))
Kernel pair_kernel_from_sh(const Kernel& sh_k);

// psi_approx = e^{-sqrt(N) A(phi)} e^{-B(k)} Omega with k recovered from (s2, p2)
FockState approx_state(const Field& phi, const Kernel& s2, const Kernel& p2, int N,
                       std::shared_ptr<const FockBasis> basis, double leak_tol = 1e-6);

// phase-optimized distance min_theta || a - e^{i theta} b || = sqrt(2 - 2 |<a,b>|)
double fock_distance(const FockState& a, const FockState& b);

// one-particle marginal Gamma(x,y) = <a_y psi, a_x psi> / (dx <N>)  (same kernel
// convention as manybody::Marginal: coherent state of phi gives phi(x) conj(phi(y)) / ||phi||^2)
Marginal fock_marginal(const FockState& psi);

// co-evolve phi (Hartree), (s2, p2) (pair system) and psi_exact; report
// phase-optimized distances per sample time and the per-N slope at t_end
struct FockScalingPoint {
    int N = 0;
    std::int64_t dim_fock = 0;
    int n_max = 0;
    double leakage = 0.0;
    std::vector<double> t;
    std::vector<double> distance;
};
struct FockScalingResult {
    std::vector<FockScalingPoint> points;
    double slope = 0.0;
    bool slope_valid = false;
};
FockScalingResult fock_error_scaling(const BumpProfile& profile, double beta, const Field& phi0,
                                     const std::vector<double>& t_samples,
                                     const std::vector<int>& N_list, double dt,
                                     double leak_tol = 1e-6);

// Poisson-tail cutoff rule n_max >= mu + 6 sqrt(mu), mu = N ||phi||^2
int poisson_cutoff(double mu);

}  // namespace mfl
