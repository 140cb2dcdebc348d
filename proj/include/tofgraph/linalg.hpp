#pragma once

#include <vector>

// Small dense routines backing the direct-solve path at low pixel counts and
// the spectral checks in the test suites. Matrices are row-major n x n.

namespace tofgraph {

// Solves A x = b by LU with partial pivoting. Throws NumericError on a
// singular pivot.
std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b);

// Cyclic Jacobi eigendecomposition of a symmetric matrix. On return,
// eigenvalues are ascending and eigenvectors[k*n + i] is component i of the
// k-th eigenvector.
void jacobi_eigen_sym(std::vector<double> a, int n, std::vector<double>& eigenvalues,
                      std::vector<double>& eigenvectors);

}  // namespace tofgraph
