#include "mfl/eig.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <stdexcept>

namespace mfl {

void hermitian_eig(const std::vector<std::complex<double>>& a, int n,
                   std::vector<double>& w, std::vector<std::complex<double>>* V) {
    std::vector<std::complex<double>> work = a;
    w.assign(n, 0.0);
    int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, V ? 'V' : 'N', 'U', n,
                             reinterpret_cast<lapack_complex_double*>(work.data()), n, w.data());
    if (info != 0) throw std::runtime_error("hermitian_eig: zheev failed, info=" + std::to_string(info));
    if (V) *V = std::move(work);
}

void dense_solve(std::vector<std::complex<double>>& A, std::vector<std::complex<double>>& B,
                 int n, int nrhs) {
    std::vector<lapack_int> ipiv(n);
    int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, n, nrhs,
                             reinterpret_cast<lapack_complex_double*>(A.data()), n, ipiv.data(),
                             reinterpret_cast<lapack_complex_double*>(B.data()), nrhs);
    if (info != 0) throw std::runtime_error("dense_solve: zgesv failed, info=" + std::to_string(info));
}

void tridiag_eig(std::vector<double>& diag, std::vector<double>& off, std::vector<double>& z, int n) {
    z.assign((std::size_t)n * n, 0.0);
    int info = LAPACKE_dstev(LAPACK_ROW_MAJOR, 'V', n, diag.data(), off.data(), z.data(), n);
    if (info != 0) throw std::runtime_error("tridiag_eig: dstev failed, info=" + std::to_string(info));
}

}  // namespace mfl
