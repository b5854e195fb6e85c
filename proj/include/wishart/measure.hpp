#ifndef WISHART_MEASURE_HPP
#define WISHART_MEASURE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "wishart/errors.hpp"

namespace wishart {

using Complex = std::complex<double>;

/// One atom of a discrete spectral measure.
struct Atom {
  double lambda; // location, > 0
  double weight; // mass, > 0
};

/// Discrete population spectral measure: positive atoms with total mass 1.
/// Atoms are kept sorted ascending by location; duplicates are merged at
/// construction so the pole set of the g-function stays minimal.
class AtomicMeasure {
public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  /// Point mass at lambda.
  static AtomicMeasure dirac(double lambda) { return AtomicMeasure({{lambda, 1.0}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double min_lambda() const { return atoms_.front().lambda; }
  double max_lambda() const { return atoms_.back().lambda; }

  /// Integral of f(lambda) against the measure.
  template <class F>
  auto integrate(F&& f) const {
    decltype(f(1.0)) acc{};
    for (const Atom& a : atoms_) acc += a.weight * f(a.lambda);
    return acc;
  }

private:
  std::vector<Atom> atoms_;
};

/// Asymptotic dimension ratio gamma = lim n/N, in (0, inf).
struct ShapeRatio {
  double gamma;
  explicit ShapeRatio(double g);
};

/// Finite-N model: N samples of an n-dimensional population with diagonal
/// covariance spectrum lambdas (sorted ascending, all positive).
class WishartModel {
public:
  WishartModel(int n, int N, std::vector<double> lambdas);

  int n() const { return n_; }
  int N() const { return N_; }
  const std::vector<double>& lambdas() const { return lambdas_; }

  ShapeRatio gamma() const { return ShapeRatio(static_cast<double>(n_) / N_); }

  /// Uniform measure (1/n per eigenvalue), duplicates merged.
  AtomicMeasure spectral_measure() const;

private:
  int n_ = 0;
  int N_ = 0;
  std::vector<double> lambdas_;
};

/// Distance below which an evaluation point is considered to sit on a pole
/// of the g-function (the origin or an inverse population eigenvalue).
inline constexpr double kPoleTolerance = 1e-14;

/// g(z) = 1/z + gamma * sum_j w_j lambda_j / (1 - z lambda_j).
/// Functional inverse of the Cauchy-Stieltjes transform outside the bulk.
/// Throws PoleProximityError within kPoleTolerance of 0 or any 1/lambda_j.
Complex g_eval(const AtomicMeasure& nu, ShapeRatio gamma, Complex z);
double g_eval(const AtomicMeasure& nu, ShapeRatio gamma, double x);

/// Exact k-th derivative of g (termwise differentiation of the rational
/// terms), k in {1,2,3}. Throws UnsupportedOrderError otherwise.
Complex g_deriv(const AtomicMeasure& nu, ShapeRatio gamma, Complex z, int order);
double g_deriv(const AtomicMeasure& nu, ShapeRatio gamma, double x, int order);

struct StieltjesOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  long max_iterations = 100000;
};

/// Solve the fixed point m = (z - gamma * int lambda/(1-m lambda) dnu)^{-1}
/// for Im z > 0; the solution has Im m < 0 and satisfies g(m) = z.
/// Damped iteration from m0 = 1/z; throws NoConvergenceError at the cap.
Complex stieltjes_solve(const AtomicMeasure& nu, ShapeRatio gamma, Complex z,
                        const StieltjesOptions& opts = {});

/// Limiting spectral density rho(x) for x > 0, via -Im m(x+ie)/pi with a
/// Richardson step over e in {1e-5, 5e-6}. Values in (-1e-8, 0) clamp to 0.
double density(const AtomicMeasure& nu, ShapeRatio gamma, double x);

} // namespace wishart

#endif // WISHART_MEASURE_HPP
