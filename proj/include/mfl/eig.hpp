#pragma once

#include <complex>
#include <vector>

namespace mfl {

// Eigendecomposition of a Hermitian n x n matrix (row-major). Eigenvalues
// ascending; if vectors requested, column j of V (row-major) is the j-th
// eigenvector. Throws on LAPACK failure.
void hermitian_eig(const std::vector<std::complex<double>>& a, int n,
                   std::vector<double>& w, std::vector<std::complex<double>>* V);

// Solve A X = B in place (dense LU), A n x n row-major, B n x nrhs row-major.
void dense_solve(std::vector<std::complex<double>>& A, std::vector<std::complex<double>>& B,
                 int n, int nrhs);

// Eigenvalues/vectors of a real symmetric tridiagonal matrix (for Lanczos).
void tridiag_eig(std::vector<double>& diag, std::vector<double>& off, std::vector<double>& z, int n);

}  // namespace mfl
