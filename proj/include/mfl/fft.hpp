#pragma once

#include <vector>

#include "mfl/field.hpp"

namespace mfl {

// Unnormalized in-place DFTs (FFTW), cached plans, any rank up to 5.
void fft_raw(cplx* data, const std::vector<int>& dims, int sign);  // sign: -1 forward, +1 backward

// Fourier coefficients c_k with f_j = sum_k c_k exp(2*pi*i j.k / M), i.e. raw forward / M^dim.
std::vector<cplx> spectrum(const Field& f);
Field from_spectrum(const Grid& g, const std::vector<cplx>& coef);

// solution of (1/i) d_t phi - lap phi = 0: multiply mode xi by exp(-i |xi|^2 t)
Field free_propagate(const Field& f, double t);

// periodic convolution, approximates integral a(x-y) b(y) dy
Field convolve(const Field& a, const Field& b);

// L2 norm computed on the spectral side (Parseval check partner)
double norm_l2_spectral(const Field& f);

// || |xi|^{1/2} f ||_L2
double half_deriv_norm(const Field& f);

// smallest xi_c containing the given fraction of spectral L2 mass; used for
// the wrap-around horizon T_max = L / (4 v_max), v_max = 2 xi_c
double spectral_support(const Field& f, double mass_fraction = 0.95);
double wraparound_horizon(const Field& f, double mass_fraction = 0.95);

}  // namespace mfl
