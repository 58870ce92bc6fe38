#pragma once

#include "mfl/hartree.hpp"
#include "mfl/kernel_ops.hpp"

namespace mfl {

// State of the pair-excitation system evolved alongside the Hartree flow:
// s2 = sh(2k) (symmetric), p2 = ch(2k) - delta (Hermitian), initial data zero.
struct PairState {
    double t = 0.0;
    Field phi;
    Kernel s2, p2;

    PairState() = default;
    PairState(const Field& phi0, const Grid& g) : phi(phi0), s2(g), p2(g) {}
};

// m_N(x,y) = -v_N(x-y) phi(x) phi(y), dense
Kernel build_mN(const Field& phi, const ScaledPotential& vN);

enum class GNSide { left_transpose, right, right_transpose };

// Apply g_N = -lap delta + (v_N*|phi|^2) delta + v_N(x-y) conj(phi)(x) phi(y) to a
// kernel without materializing it: spectral Laplacian along the contracted
// index, pointwise multiplier, dense compose with the rank-structured part.
Kernel apply_gN(const Field& phi, const ScaledPotential& vN, const Kernel& K, GNSide side);

// dense assembly of g_N as a kernel (test oracle, small M only)
Kernel dense_gN(const Field& phi, const ScaledPotential& vN);

// One step: phi advances by two Strang half-steps; (s2, p2) by Strang with the
// free two-variable flows exp(it(lap_x + lap_y)) / exp(it(lap_x - lap_y)) and
// an RK4 update of the bounded remainder plus m_N forcing.
void pair_step(PairState& st, const ScaledPotential& vN, double dt);

// || ch(2k) o ch(2k) - sh(2k) o conj(sh(2k)) - delta ||_L2
//   = || 2 p2 + p2 o p2 - s2 o conj(s2) ||_L2
// (conjugation placement fixed by the series oracle; see tests)
double bogoliubov_residual(const Kernel& s2, const Kernel& p2);

std::pair<double, double> pair_norms(const PairState& st);  // (||s2||, ||p2||)

// L2 norms of four representative error terms at particle number N, evaluated
// through their factorized contractions; sh = sh(k), recovered from (s2, p2)
// by the half-angle relation unless supplied directly.
struct ErrorTermNorms {
    double q1 = 0.0;   // quartic  (1/N)  || v_N(y1-y2) sh(y3,y1) sh(y2,y4) ||
    double qd6 = 0.0;  // quadratic (1/N) || v_N(y1-y2) sh(y1,y2) ||
    double c1 = 0.0;   // cubic (1/sqrtN) || v_N(y1-y2) phi(y2) sh(y3,y1) ||
    double l3 = 0.0;   // linear (1/sqrtN)|| int v_N(y-x) conj(phi)(x) sh(y,x) dx ||
    double half_angle_min_eig = 1.0;
};
ErrorTermNorms error_term_norms(const PairState& st, const ScaledPotential& vN_probe, int N);
ErrorTermNorms error_term_norms_from_sh(const Kernel& sh_k, const Field& phi,
                                        const ScaledPotential& vN_probe, int N);

// chain bound of the cubic representative: ||phi||_inf ||v_N||_L2 ||sh||_L2 / sqrt(N)
double c1_chain_bound(const Kernel& sh_k, const Field& phi, const ScaledPotential& vN_probe, int N);

struct PairRunResult {
    std::vector<double> t, s2_l2, p2_l2, residual, q1, qd6, c1, l3;
    double half_angle_min_eig = 1.0;
    bool half_angle_warning = false;
};

struct PairRun {
    Grid grid;
    Field phi0;
    ScaledPotential vN;
    int N = 1;
    double dt = 1e-3;
    double t_end = 1.0;
    int record_every = 50;
    double residual_tol = 1e-5;  // abort when residual > 100 x this

    PairRunResult run(PairState* final_state = nullptr) const;
};

}  // namespace mfl
