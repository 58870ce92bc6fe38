#pragma once

#include <vector>

#include "mfl/hartree.hpp"
#include "mfl/potential.hpp"

namespace mfl {

struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bosonic N-particle wave function on grid^N (1D grid), row-major with
// coordinate 0 slowest. N in [2,5]; allocation is gated by the memory guard
// 16 * M^N bytes <= cap.
struct ManyBodyState {
    Grid grid;
    int N = 2;
    std::vector<cplx> psi;

    ManyBodyState() = default;
    ManyBodyState(const Grid& g, int N_, std::int64_t mem_cap_bytes = (std::int64_t)1 << 30);

    std::int64_t size() const { return (std::int64_t)psi.size(); }
    double cell() const;      // dx^N
    double norm() const;      // L2 norm with quadrature weight
    double swap_defect() const;  // max deviation under adjacent coordinate swaps
};

std::int64_t mb_bytes(const Grid& g, int N);

// product state phi^{tensor N}; requires ||phi|| = 1
ManyBodyState factorized_state(const Field& phi, int N,
                               std::int64_t mem_cap_bytes = (std::int64_t)1 << 30);

// Strang stepper for (1/i) d_t Psi = (sum_j lap_j - (1/N) sum_{i<j} v_N(x_i-x_j)) Psi.
// Holds the precomputed pair-potential tensor; step() fuses adjacent kinetic
// half-kicks, flush() completes a pending half-kick before measurements.
class MbPropagator {
  public:
    MbPropagator(const Grid& g, int N, const ScaledPotential& vN, double dt);
    void step(ManyBodyState& st, int nsteps = 1);

  private:
    void kinetic_phase(ManyBodyState& st, double t, bool with_fft_scale);
    Grid grid_;
    int N_;
    double dt_;
    bool has_potential_ = false;
    std::vector<double> w_;        // sum over pairs of v_N(x_i - x_j)
    std::vector<double> xi2_;      // per-axis |xi|^2
};

// convenience: one Strang step (no fusion)
ManyBodyState mb_step(const ManyBodyState& st, const ScaledPotential& vN, double dt);

// one-particle reduced density: gamma(x,y) = int Psi(x,r) conj(Psi(y,r)) dr
struct Marginal {
    Grid grid;
    std::vector<cplx> g;  // M x M row-major

    double trace() const;
    double hermiticity_defect() const;
    double min_eigenvalue() const;
};

Marginal marginal(const ManyBodyState& st);

// trace norm of gamma - |phi><phi| via Hermitian eigendecomposition
double trace_distance(const Marginal& gamma, const Field& phi);

// excitation-number distribution w_k = <Psi, P_k Psi> and the weighted
// functionals; the 2^N projector expansion is evaluated through the chain
// mu_m = <Psi, p_1...p_m Psi> using exchange symmetry
struct PicklResult {
    double alpha_N = 0.0;        // ||q_1 Psi||^2
    double alpha_lambda = 0.0;   // sum_k m^lambda(k) w_k
    std::vector<double> w;       // k = 0..N
    std::vector<double> mu;      // m = 0..N
};
PicklResult pickl_alpha(const ManyBodyState& st, const Field& phi, double lambda);

double delta_lambda(double beta, double lambda);
// minimum of delta_lambda over lambda in (0,1]; returns {lambda*, delta*}
std::pair<double, double> delta_lambda_scan(double beta);

// || lap |phi|^2 ||_L2 (enters the K^phi factor)
double lap_density_l2(const Field& phi);

// trajectory data for the alpha bound
struct PicklTrajectory {
    std::vector<double> t, linf, lapdens;
};
// exp(C_v int ||phi||_inf^2) alpha0 + [exp(...) - 1] sup_s K^{phi_s} N^{delta_lambda},
// K^phi = C_v (||lap |phi|^2|| + ||phi||_inf + 1) ||phi||_inf
double pickl_bound(const PicklTrajectory& traj, double t, double C_v, int N, double beta,
                   double lambda, double alpha0);
// calibrate C_v so the bound matches alpha at the smallest N
double calibrate_Cv(const PicklTrajectory& traj, double t, int N, double beta, double lambda,
                    double alpha_measured);

struct RatePoint {
    int N = 0;
    double trace_dist = 0.0;
    double alpha_N = 0.0;
    double alpha_lambda = 0.0;
    double bound = 0.0;
};

struct RateFit {
    std::vector<RatePoint> points;
    double slope = 0.0;
    double residual = 0.0;
    bool slope_valid = false;
    double C_v = 0.0;
    double lambda = 0.0;
};

// full pipeline per N: evolve Psi_N and phi_t, marginal, trace distance, alpha,
// bound (C_v calibrated at the smallest N)
RateFit rate_fit(const Grid& g, const Field& phi0, const BumpProfile& profile, double beta,
                 const std::vector<int>& N_list, double t, double dt, double lambda,
                 std::int64_t mem_cap_bytes = (std::int64_t)1 << 30);

}  // namespace mfl
