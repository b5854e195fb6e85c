#include "wishart/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wishart/errors.hpp"

namespace wishart {

namespace {

using Cplx = std::complex<double>;

/// Householder reflector annihilating x[1:]: returns real beta with
/// H^H x = beta e_1, writes v (v[0] = 1 implicit) into x, returns tau.
Cplx make_reflector(Cplx* x, int len, double& beta) {
  Cplx alpha = x[0];
  double xnorm = 0.0;
  for (int i = 1; i < len; ++i) xnorm = std::hypot(xnorm, std::abs(x[i]));
  if (xnorm == 0.0 && alpha.imag() == 0.0) {
    beta = alpha.real();
    return Cplx(0.0);
  }
  double anorm = std::hypot(std::hypot(alpha.real(), alpha.imag()), xnorm);
  beta = (alpha.real() >= 0.0) ? -anorm : anorm;
  Cplx tau((beta - alpha.real()) / beta, -alpha.imag() / beta);
  Cplx scale = 1.0 / (alpha - beta);
  for (int i = 1; i < len; ++i) x[i] *= scale;
  x[0] = 1.0;
  return tau;
}

} // namespace

void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e.resize(n, 0.0); // e[n-1] used as workspace
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw EigensolverFailureError("tridiagonal QL: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (i == l) {
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
          }
        }
      }
    } while (m != l);
  }
}

std::vector<double> hermitian_eigenvalues(std::vector<Cplx> a, int n) {
  if (n <= 0) return {};
  if (static_cast<int>(a.size()) != n * n)
    throw ValidationError("hermitian_eigenvalues: matrix size mismatch");
  std::vector<double> d(n), e(std::max(n - 1, 0));
  std::vector<Cplx> v(n), p(n);

  for (int i = 0; i < n - 1; ++i) {
    const int len = n - 1 - i;
    // reflector on the column below the diagonal
    for (int j = 0; j < len; ++j) v[j] = a[(i + 1 + j) * n + i];
    double beta;
    Cplx tau = make_reflector(v.data(), len, beta);
    e[i] = beta;
    if (tau != Cplx(0.0)) {
      // p = tau * B v over the trailing Hermitian block B
      for (int r = 0; r < len; ++r) {
        Cplx acc = 0.0;
        const Cplx* row = &a[(i + 1 + r) * n + (i + 1)];
        for (int c = 0; c < len; ++c) acc += row[c] * v[c];
        p[r] = tau * acc;
      }
      // w = p - (tau/2) (p^H v) v, then B -= v w^H + w v^H
      Cplx phv = 0.0;
      for (int r = 0; r < len; ++r) phv += std::conj(p[r]) * v[r];
      Cplx kappa = -0.5 * tau * phv;
      for (int r = 0; r < len; ++r) p[r] += kappa * v[r];
      for (int r = 0; r < len; ++r) {
        Cplx* row = &a[(i + 1 + r) * n + (i + 1)];
        const Cplx vr = v[r];
        const Cplx pr = p[r];
        for (int c = 0; c < len; ++c)
          row[c] -= vr * std::conj(p[c]) + pr * std::conj(v[c]);
      }
    }
  }
  for (int i = 0; i < n; ++i) d[i] = a[i * n + i].real();
  tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

} // namespace wishart
