#ifndef WISHART_HERMITIAN_EIG_HPP
#define WISHART_HERMITIAN_EIG_HPP

#include <complex>
#include <vector>

namespace wishart {

/// Eigenvalues (ascending) of a dense complex Hermitian matrix, row-major.
/// Householder tridiagonalization followed by implicit-shift QL, values only.
/// The matrix is consumed. Throws EigensolverFailureError if QL stalls.
std::vector<double> hermitian_eigenvalues(std::vector<std::complex<double>> a, int n);

/// QL with implicit shifts on a real symmetric tridiagonal (d, e); d is
/// replaced by the eigenvalues, unsorted.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e);

} // namespace wishart

#endif // WISHART_HERMITIAN_EIG_HPP
