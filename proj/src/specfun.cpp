#include "wishart/specfun.hpp"

#include <cmath>
#include <utility>

#include "wishart/quadrature.hpp"

namespace wishart {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
const long double kAi0 = std::pow(3.0L, -2.0L / 3.0L) / std::tgammal(2.0L / 3.0L);
const long double kAip0 = -std::pow(3.0L, -1.0L / 3.0L) / std::tgammal(1.0L / 3.0L);

/// Maclaurin sums of the two Airy ODE solutions and their derivatives,
/// accumulated in long double; reliable for |x| <= ~7.
std::pair<long double, long double> airy_maclaurin(long double x) {
  const long double x3 = x * x * x;
  long double pf = 1.0L;          // term of f
  long double pfp = 0.5L * x * x; // term of f'
  long double pg = x;             // term of g
  long double pgp = 1.0L;         // term of g'
  long double f = pf, fp = pfp, g = pg, gp = pgp;
  for (int k = 1; k < 140; ++k) {
    pf *= x3 / ((3.0L * k) * (3.0L * k - 1.0L));
    pg *= x3 / ((3.0L * k + 1.0L) * (3.0L * k));
    pgp *= x3 / ((3.0L * k) * (3.0L * k - 2.0L));
    f += pf;
    g += pg;
    gp += pgp;
    if (k >= 2) {
      pfp *= x3 / ((3.0L * k - 1.0L) * (3.0L * k - 3.0L));
      fp += pfp;
    }
    if (std::abs(pf) < 1e-22L * std::abs(f) && std::abs(pg) < 1e-22L * std::abs(g)) break;
  }
  return {kAi0 * f + kAip0 * g, kAi0 * fp + kAip0 * gp};
}

/// Poincare expansion for x > ~6, truncated at the smallest term.
std::pair<double, double> airy_asymptotic(double x) {
  const long double xi = (2.0L / 3.0L) * std::pow((long double)x, 1.5L);
  long double u = 1.0L;
  long double s = 1.0L, sp = 1.0L;
  long double sign = 1.0L;
  long double xik = 1.0L;
  long double prev_term = 1e400L;
  for (int k = 1; k < 80; ++k) {
    u *= (6.0L * k - 1.0L) * (6.0L * k - 3.0L) * (6.0L * k - 5.0L) /
         (216.0L * k * (2.0L * k - 1.0L));
    xik *= xi;
    long double term = u / xik;
    if (term > prev_term) break; // divergent tail reached
    prev_term = term;
    sign = -sign;
    s += sign * term;
    sp += sign * (-(6.0L * k + 1.0L) / (6.0L * k - 1.0L)) * term;
    if (term < 1e-20L) break;
  }
  const long double pref = std::exp(-xi) / (2.0L * std::sqrt((long double)kPi));
  const long double x14 = std::pow((long double)x, 0.25L);
  return {(double)(pref * s / x14), (double)(-pref * sp * x14)};
}

/// Taylor-series march of y'' = x y from x = -6 into the oscillatory region,
/// step -1/4; both solutions stay bounded there so rounding does not grow.
std::pair<double, double> airy_march(double x) {
  long double x0 = -6.0L;
  auto [y, yp] = airy_maclaurin(x0);
  while (x0 > x + 1e-18L) {
    long double h = std::max((long double)x - x0, -0.25L);
    long double a[130];
    a[0] = y;
    a[1] = yp;
    a[2] = x0 * y / 2.0L;
    int kmax = 2;
    for (int k = 1; k <= 126; ++k) {
      a[k + 2] = (x0 * a[k] + a[k - 1]) / ((long double)(k + 2) * (k + 1));
      kmax = k + 2;
      if (std::abs(a[k + 2]) < 1e-26L * (std::abs(y) + std::abs(yp) + 1.0L) && k > 8) break;
    }
    long double yn = a[kmax], ypn = kmax * a[kmax];
    for (int k = kmax - 1; k >= 1; --k) {
      yn = yn * h + a[k];
      ypn = ypn * h + (long double)k * a[k];
    }
    yn = yn * h + a[0];
    y = yn;
    yp = ypn;
    x0 += h;
  }
  return {(double)y, (double)yp};
}

std::pair<double, double> airy_eval(double x) {
  if (!(std::abs(x) <= 200.0))
    throw DomainOverflowError("airy_ai: |x| must be <= 200");
  if (x > 6.0) return airy_asymptotic(x);
  if (x < -6.0) return airy_march(x);
  auto [a, ap] = airy_maclaurin((long double)x);
  return {(double)a, (double)ap};
}

} // namespace

double airy_ai(double x) { return airy_eval(x).first; }
double airy_ai_prime(double x) { return airy_eval(x).second; }
std::pair<double, double> airy_ai_both(double x) { return airy_eval(x); }

namespace {

/// Series evaluation, reliable for x <= ~20 in long double.
long double bessel_series(int a, long double x) {
  long double half = 0.5L * x;
  long double t = 1.0L;
  for (int i = 1; i <= a; ++i) t *= half / i; // (x/2)^a / a!
  long double sum = t;
  const long double q = -half * half;
  for (int n = 1; n < 400; ++n) {
    t *= q / ((long double)n * (n + a));
    sum += t;
    if (std::abs(t) < 1e-22L * (std::abs(sum) + 1e-300L) && n > 4) break;
  }
  return sum;
}

/// Miller backward recurrence with even-order normalization, for x > 20.
long double bessel_miller(int a, long double x) {
  int m = (int)(x + std::sqrt(40.0 * x));
  m = std::max(m, a + 24);
  m += m % 2;
  long double bjp = 0.0L, bj = 1e-30L;
  long double sum = 0.0L;
  long double ans = 0.0L;
  const long double tox = 2.0L / x;
  for (int k = m; k >= 1; --k) {
    long double bjm = k * tox * bj - bjp;
    bjp = bj;
    bj = bjm;
    if (std::abs(bj) > 1e25L) {
      bj *= 1e-25L;
      bjp *= 1e-25L;
      sum *= 1e-25L;
      ans *= 1e-25L;
    }
    int order = k - 1; // bj now holds J_{k-1}
    if (order % 2 == 0) sum += (order == 0) ? bj : 2.0L * bj;
    if (order == a) ans = bj;
  }
  return ans / sum;
}

long double bessel_core(int alpha, double x) {
  int a = std::abs(alpha);
  long double v = (x <= 20.0) ? bessel_series(a, (long double)x)
                              : bessel_miller(a, (long double)x);
  if (alpha < 0 && a % 2 == 1) v = -v; // J_{-a} = (-1)^a J_a for integer a
  return v;
}

void bessel_domain_check(int alpha, double x) {
  if (!(x > 0.0) || x > 1e4)
    throw DomainOverflowError("bessel_j: x must lie in (0, 1e4]");
  if (std::abs(alpha) > 50)
    throw DomainOverflowError("bessel_j: |alpha| must be <= 50");
}

} // namespace

double bessel_j(int alpha, double x) {
  bessel_domain_check(alpha, x);
  return (double)bessel_core(alpha, x);
}

namespace detail {
double bessel_j_unchecked(int alpha, double x) { return (double)bessel_core(alpha, x); }
} // namespace detail

double bessel_j_prime(int alpha, double x) {
  bessel_domain_check(alpha, x);
  return (double)(((long double)alpha / x) * bessel_core(alpha, x) -
                  bessel_core(alpha + 1, x));
}

double airy_kernel(double x, double y) {
  if (std::abs(x - y) > 1e-6) {
    auto [ax, apx] = airy_ai_both(x);
    auto [ay, apy] = airy_ai_both(y);
    return (ax * apy - ay * apx) / (x - y);
  }
  // l'Hopital limit at the midpoint plus the quadratic cross term, via
  // d^2/dh^2 int Ai(m+u+h)Ai(m+u-h) du = 2 int [t Ai^2 - Ai'^2](t) dt
  double m = 0.5 * (x + y);
  double h = 0.5 * (x - y);
  auto [a, ap] = airy_ai_both(m);
  double diag = ap * ap - m * a * a;
  double curv = (2.0 * m * ap * ap - 2.0 * m * m * a * a + a * ap) / 3.0;
  return diag + h * h * curv;
}

namespace detail {

RayContour make_airy_rays(double z_anchor, double w_anchor, double reach,
                          int nodes_per_ray) {
  if (!(z_anchor - w_anchor >= 1e-3))
    throw ContourOverlapError("airy rays: contours closer than 1e-3");
  RayContour c;
  c.z_anchor = z_anchor;
  c.w_anchor = w_anchor;
  const std::complex<double> up(0.5, 0.8660254037844386);    // e^{i pi/3}
  const std::complex<double> down(0.5, -0.8660254037844386); // e^{-i pi/3}
  QuadratureRule rule = gauss_legendre(nodes_per_ray, 0.0, reach);
  const int n = nodes_per_ray;
  c.z_nodes.reserve(2 * n);
  c.z_weights.reserve(2 * n);
  c.w_nodes.reserve(2 * n);
  c.w_weights.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    const double t = rule.nodes[i];
    const double w = rule.weights[i];
    // Xi runs from e^{i pi/3} inf down through z_anchor and out along e^{-i pi/3}
    c.z_nodes.push_back(z_anchor + t * up);
    c.z_weights.push_back(-up * w);
    c.z_nodes.push_back(z_anchor + t * down);
    c.z_weights.push_back(down * w);
    // Xi' runs from e^{-2i pi/3} inf through w_anchor and out along e^{2i pi/3}
    c.w_nodes.push_back(w_anchor - t * up); // w_anchor + t e^{-2i pi/3}
    c.w_weights.push_back(up * w);
    c.w_nodes.push_back(w_anchor - t * down); // w_anchor + t e^{2i pi/3}
    c.w_weights.push_back(-down * w);
  }
  return c;
}

} // namespace detail

namespace {

/// Ray length at which the integrand sits 1e-18 below its peak for all
/// kernel arguments >= xmin.
double ray_reach(double xmin, double anchor) {
  const double drive = std::max(0.0, -xmin);
  double reach = 3.0;
  while (reach * reach * reach / 3.0 - drive * (anchor + 0.5 * reach) <= 43.0 &&
         reach < 60.0)
    reach += 0.25;
  return reach;
}

} // namespace

double deformed_airy_kernel(int k, double x, double y, int nodes_per_ray) {
  if (k < 0 || k > 10) throw ValidationError("deformed_airy_kernel: k must lie in [0, 10]");
  if (x < -10.0 || y < -10.0)
    throw DomainOverflowError("deformed_airy_kernel: x, y must be >= -10");
  // Xi must keep the pole of z^{-k} at the origin on its enclosed side (the
  // finite-N contour Gamma encircles every inverse population eigenvalue,
  // critical spikes included), so both rays anchor on the negative axis.
  detail::RayContour c = detail::make_airy_rays(
      -0.75, -2.0, ray_reach(std::min(x, y), 2.0), nodes_per_ray);

  std::complex<double> acc = 0.0;
  for (std::size_t a = 0; a < c.z_nodes.size(); ++a) {
    const std::complex<double> z = c.z_nodes[a];
    const std::complex<double> fz = c.z_weights[a] * std::exp(-x * z + z * z * z / 3.0);
    for (std::size_t b = 0; b < c.w_nodes.size(); ++b) {
      const std::complex<double> w = c.w_nodes[b];
      std::complex<double> ratio = 1.0;
      for (int j = 0; j < k; ++j) ratio *= w / z;
      acc += fz * c.w_weights[b] * ratio * std::exp(y * w - w * w * w / 3.0) / (w - z);
    }
  }
  acc *= -1.0 / (4.0 * kPi * kPi); // 1/(2 i pi)^2
  if (std::abs(acc.imag()) >= 1e-9)
    throw NumericalError("deformed_airy_kernel: imaginary residual exceeds 1e-9");
  return acc.real();
}

double bessel_kernel(int alpha, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0) || x > 1e4 || y > 1e4)
    throw DomainOverflowError("bessel_kernel: x, y must lie in (0, 1e4]");
  if (std::abs(alpha) > 50)
    throw DomainOverflowError("bessel_kernel: |alpha| must be <= 50");
  if (std::abs(x - y) > 1e-6 * std::max(1.0, std::max(x, y))) {
    const double sx = std::sqrt(x), sy = std::sqrt(y);
    const double jx = (double)bessel_core(alpha, sx);
    const double jy = (double)bessel_core(alpha, sy);
    // x J_a'(x) = a J_a(x) - x J_{a+1}(x)
    const double jpx = (double)((alpha / (long double)sx) * bessel_core(alpha, sx) -
                                bessel_core(alpha + 1, sx));
    const double jpy = (double)((alpha / (long double)sy) * bessel_core(alpha, sy) -
                                bessel_core(alpha + 1, sy));
    return (sy * jx * jpy - sx * jpx * jy) / (2.0 * (x - y));
  }
  // diagonal of (1/4) int_0^1 J_a(sqrt(xu)) J_a(sqrt(yu)) du in closed form
  const double m = std::sqrt(0.5 * (x + y));
  const double ja = (double)bessel_core(alpha, m);
  const double jm = (double)bessel_core(alpha - 1, m);
  const double jp = (double)bessel_core(alpha + 1, m);
  return 0.25 * (ja * ja - jm * jp);
}

double bessel_kernel_contour(int alpha, double x, double y, double r, double R, int nodes) {
  if (!(r > 0.0) || !(r < R)) throw ContourOrderError("bessel_kernel_contour: need 0 < r < R");
  if (!(x > 0.0) || !(y > 0.0))
    throw DomainOverflowError("bessel_kernel_contour: x, y must be positive");
  if (x / r + y / R + R / 2.0 > 700.0)
    throw NumericalOverflowError("bessel_kernel_contour: contour exponent exceeds 700");
  const int M = nodes;
  std::complex<double> acc = 0.0;
  for (int a = 0; a < M; ++a) {
    const std::complex<double> z = std::polar(r, 2.0 * kPi * a / M);
    const std::complex<double> fz = std::exp(-x / z + z / 4.0);
    for (int b = 0; b < M; ++b) {
      const std::complex<double> w = std::polar(R, 2.0 * kPi * (b + 0.5) / M);
      std::complex<double> ratio = 1.0;
      if (alpha >= 0)
        for (int j = 0; j < alpha; ++j) ratio *= z / w;
      else
        for (int j = 0; j < -alpha; ++j) ratio *= w / z;
      acc += fz * ratio * std::exp(y / w - w / 4.0) / (z - w);
    }
  }
  acc /= (double)M * (double)M;
  if (std::abs(acc.imag()) >= 1e-8 * std::max(1.0, std::abs(acc.real())))
    throw NumericalError("bessel_kernel_contour: imaginary residual too large");
  return acc.real();
}

} // namespace wishart
