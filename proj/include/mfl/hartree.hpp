#pragma once

#include <vector>

#include "mfl/fft.hpp"
#include "mfl/potential.hpp"

namespace mfl {

struct NumericalAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One Strang step of (1/i) d_t phi - lap phi + (v_N * |phi|^2) phi = 0:
// half free flight, full nonlinear phase exp(-i dt (v_N * |phi|^2)), half free
// flight. Mass-preserving by construction. Throws NumericalAbort on NaN.
Field hartree_step(const Field& phi, const ScaledPotential& vN, double dt);

// same with the local nonlinearity g |phi|^2 (cubic NLS)
Field nls_step(const Field& phi, double g, double dt);

// E = int |grad phi|^2 + 1/2 int (v_N * |phi|^2) |phi|^2
double energy(const Field& phi, const ScaledPotential& vN);
// cubic analog with g/2 int |phi|^4
double energy_nls(const Field& phi, double g);

struct Observables {
    std::vector<double> t, mass, energy, linf, h_half;
    std::vector<std::vector<double>> lr;  // one column per requested L^r norm
};

struct HartreeRun {
    Grid grid;
    Field phi0;
    double dt = 1e-3;
    double t_end = 1.0;
    int record_every = 10;
    bool cubic = false;           // false: Hartree with vN, true: NLS with coupling g
    ScaledPotential vN;           // used when !cubic
    double g = 0.0;               // used when cubic
    std::vector<double> record_lr;  // extra L^r norms to record

    Observables run(Field* final_state = nullptr) const;
};

// admissible Strichartz pair: 2/q + dim/r = dim/2, q, r >= 2 (q may be inf)
bool strichartz_admissible(double q, double r, int dim);

// (integral over the window of ||phi(t)||_{L^r}^q dt)^{1/q} from recorded samples
double strichartz_window_norm(const Observables& obs, int lr_col, double q, double t0, double t1);

// evolve Hartree (per N in N_list) and the limiting NLS from the same data,
// return ||phi_N(t) - phi_nls(t)||_L2 per N
std::vector<std::pair<int, double>> hartree_to_nls_distance(const Field& phi0,
                                                            const BumpProfile& profile, double beta,
                                                            const std::vector<int>& N_list, double t,
                                                            double dt);

}  // namespace mfl
