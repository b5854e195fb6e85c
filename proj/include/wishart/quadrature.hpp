#ifndef WISHART_QUADRATURE_HPP
#define WISHART_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace wishart {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1], computed by Newton iteration on the
/// Legendre recurrence. Results are cached per order.
const QuadratureRule& gauss_legendre(int order);

/// Gauss-Legendre rule mapped to (lo, hi).
QuadratureRule gauss_legendre(int order, double lo, double hi);

/// Adaptive Simpson integration to the requested absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tolerance, int max_depth = 40);

} // namespace wishart

#endif // WISHART_QUADRATURE_HPP
