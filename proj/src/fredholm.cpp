#include "wishart/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "wishart/quadrature.hpp"
#include "wishart/specfun.hpp"

namespace wishart {

namespace {

using Cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

double lu_det(std::vector<double>& m, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(m[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(m[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
      det = -det;
    }
    det *= m[col * n + col];
    double inv = 1.0 / m[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      double f = m[r * n + col] * inv;
      if (f == 0.0) continue;
      for (int c = col + 1; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
    }
  }
  return det;
}

Cplx lu_det(std::vector<Cplx>& m, int n) {
  Cplx det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(m[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(m[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m[pivot * n + c], m[col * n + c]);
      det = -det;
    }
    det *= m[col * n + col];
    Cplx inv = 1.0 / m[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      Cplx f = m[r * n + col] * inv;
      if (f == Cplx(0.0)) continue;
      for (int c = col + 1; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
    }
  }
  return det;
}

/// det(I - sqrt(w) K sqrt(w)) for a real symmetric-kernel matrix K(x_i, x_j).
double nystrom_det(const std::vector<double>& kernel_matrix, const QuadratureRule& rule) {
  const int n = static_cast<int>(rule.nodes.size());
  std::vector<double> sw(n);
  for (int i = 0; i < n; ++i) sw[i] = std::sqrt(rule.weights[i]);
  std::vector<double> m(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[i * n + j] = (i == j ? 1.0 : 0.0) - sw[i] * kernel_matrix[i * n + j] * sw[j];
  return lu_det(m, n);
}

struct MatrixResult {
  double value = 1.0;
  double imag_residual = 0.0;
};

MatrixResult airy_det(double lo, double hi, int order) {
  QuadratureRule rule = gauss_legendre(order, lo, hi);
  const int n = order;
  std::vector<double> ai(n), aip(n);
  for (int i = 0; i < n; ++i) {
    auto [a, ap] = airy_ai_both(rule.nodes[i]);
    ai[i] = a;
    aip[i] = ap;
  }
  std::vector<double> k(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double v = (ai[i] * aip[j] - ai[j] * aip[i]) / (rule.nodes[i] - rule.nodes[j]);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
    k[i * n + i] = aip[i] * aip[i] - rule.nodes[i] * ai[i] * ai[i];
  }
  return {nystrom_det(k, rule), 0.0};
}

MatrixResult bessel_det(int alpha, double lo, double hi, int order) {
  QuadratureRule rule = gauss_legendre(order, lo, hi);
  const int n = order;
  std::vector<double> ja(n), rj(n), jm(n), jp(n);
  for (int i = 0; i < n; ++i) {
    double s = std::sqrt(rule.nodes[i]);
    ja[i] = detail::bessel_j_unchecked(alpha, s);
    jm[i] = detail::bessel_j_unchecked(alpha - 1, s);
    jp[i] = detail::bessel_j_unchecked(alpha + 1, s);
    rj[i] = alpha * ja[i] - s * jp[i]; // sqrt(x) J'(sqrt(x))
  }
  std::vector<double> k(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double v = (ja[i] * rj[j] - rj[i] * ja[j]) / (2.0 * (rule.nodes[i] - rule.nodes[j]));
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
    k[i * n + i] = 0.25 * (ja[i] * ja[i] - jm[i] * jp[i]);
  }
  return {nystrom_det(k, rule), 0.0};
}

MatrixResult deformed_det(int kk, double lo, double hi, int order) {
  QuadratureRule rule = gauss_legendre(order, lo, hi);
  double reach = 3.0;
  {
    double drive = std::max(0.0, -lo);
    while (reach * reach * reach / 3.0 - drive * (2.0 + 0.5 * reach) <= 43.0 &&
           reach < 60.0)
      reach += 0.25;
  }
  detail::RayContour c = detail::make_airy_rays(-0.75, -2.0, reach, 128);
  const int nz = static_cast<int>(c.z_nodes.size());
  const int nw = static_cast<int>(c.w_nodes.size());
  const int n = order;

  // K = E C F^T with C independent of the evaluation points
  std::vector<Cplx> C(nz * nw);
  for (int a = 0; a < nz; ++a) {
    Cplx z = c.z_nodes[a];
    Cplx fz = c.z_weights[a] * std::exp(z * z * z / 3.0);
    for (int b = 0; b < nw; ++b) {
      Cplx w = c.w_nodes[b];
      Cplx ratio = 1.0;
      for (int j = 0; j < kk; ++j) ratio *= w / z;
      C[a * nw + b] = fz * c.w_weights[b] * std::exp(-w * w * w / 3.0) * ratio / (w - z) *
                      (-1.0 / (4.0 * kPi * kPi));
    }
  }
  std::vector<Cplx> F(n * nw);
  for (int j = 0; j < n; ++j)
    for (int b = 0; b < nw; ++b) F[j * nw + b] = std::exp(rule.nodes[j] * c.w_nodes[b]);
  // G = C F^T (nz x n)
  std::vector<Cplx> G(nz * n, Cplx(0.0));
  for (int a = 0; a < nz; ++a)
    for (int b = 0; b < nw; ++b) {
      Cplx cab = C[a * nw + b];
      for (int j = 0; j < n; ++j) G[a * n + j] += cab * F[j * nw + b];
    }
  std::vector<double> k(n * n);
  double imag_residual = 0.0;
  std::vector<Cplx> E(nz);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < nz; ++a) E[a] = std::exp(-rule.nodes[i] * c.z_nodes[a]);
    for (int j = 0; j < n; ++j) {
      Cplx acc = 0.0;
      for (int a = 0; a < nz; ++a) acc += E[a] * G[a * n + j];
      k[i * n + j] = acc.real();
      imag_residual = std::max(imag_residual, std::abs(acc.imag()));
    }
  }
  return {nystrom_det(k, rule), imag_residual};
}

struct FiniteContourData {
  std::vector<Cplx> z, w;      // trapezoid nodes
  std::vector<Cplx> zp, wq;    // P(z_a), Q(w_b)
  double q = 0.0;
  double gamma_center = 0.0;
  int N = 0;
};

FiniteContourData finite_contour_data(const WishartModel& model, const ContourSpec& contour,
                                      int nodes) {
  FiniteContourData d;
  d.q = contour.q;
  d.gamma_center = contour.gamma_center;
  d.N = model.N();
  std::vector<double> poles;
  poles.reserve(model.lambdas().size());
  for (double l : model.lambdas()) poles.push_back(1.0 / l);
  d.z.resize(nodes);
  d.w.resize(nodes);
  d.zp.resize(nodes);
  d.wq.resize(nodes);
  for (int a = 0; a < nodes; ++a) {
    double th = 2.0 * kPi * a / nodes;
    Cplx z = contour.gamma_center + std::polar(contour.gamma_radius, th);
    Cplx w = std::polar(contour.theta_radius, th);
    for (double p : poles) {
      if (std::abs(z - p) < 1e-10)
        throw ContourPoleCollisionError(
            "finite kernel: quadrature node within 1e-10 of a pole 1/lambda_j");
    }
    // P(z) = N log z - sum_j log(z - p_j); Q(w) = -N log w + sum_j log(w - p_j)
    Cplx P = static_cast<double>(d.N) * std::log(z);
    Cplx Q = -static_cast<double>(d.N) * std::log(w);
    for (double p : poles) {
      P -= std::log(z - p);
      Q += std::log(w - p);
    }
    d.z[a] = z;
    d.w[a] = w;
    d.zp[a] = P;
    d.wq[a] = Q;
  }
  return d;
}

MatrixResult finite_det(const WishartModel& model, const ContourSpec& contour, double lo,
                        double hi, int order) {
  validate_contour(contour, model);
  QuadratureRule rule = gauss_legendre(order, lo, hi);
  const int M = contour.nodes_per_contour;
  FiniteContourData d = finite_contour_data(model, contour, M);
  const int n = order;
  const double N = d.N;

  // row-scaled E and F keep every stored entry at magnitude <= 1
  std::vector<Cplx> E(n * M), F(n * M);
  std::vector<double> srow(n), trow(n);
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double smax = -std::numeric_limits<double>::infinity(), tmax = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < M; ++a) {
      smax = std::max(smax, (-N * x * (d.z[a] - d.q) + d.zp[a]).real());
      tmax = std::max(tmax, (N * x * (d.w[a] - d.q) + d.wq[a]).real());
    }
    srow[i] = smax;
    trow[i] = tmax;
    for (int a = 0; a < M; ++a) {
      E[i * M + a] = std::exp(-N * x * (d.z[a] - d.q) + d.zp[a] - smax);
      F[i * M + a] = std::exp(N * x * (d.w[a] - d.q) + d.wq[a] - tmax);
    }
  }
  for (int i = 0; i < n; ++i)
    if (srow[i] + trow[i] > 660.0)
      throw NumericalOverflowError(
          "finite kernel: log-magnitude exceeds the overflow budget even after rebalancing");

  std::vector<Cplx> C(M * M);
  const double pref = N / (static_cast<double>(M) * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      C[a * M + b] = pref * (d.z[a] - d.gamma_center) * d.w[b] / (d.w[b] - d.z[a]);

  // B = E C F^T, then det(I - B diag(w_i e^{s_i + t_i})) via the switch identity
  std::vector<Cplx> G(M * n, Cplx(0.0));
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      Cplx cab = C[a * M + b];
      for (int j = 0; j < n; ++j) G[a * n + j] += cab * F[j * M + b];
    }
  std::vector<Cplx> mat(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Cplx acc = 0.0;
      for (int a = 0; a < M; ++a) acc += E[i * M + a] * G[a * n + j];
      double scale = rule.weights[j] * std::exp(std::min(srow[j] + trow[j], 700.0));
      mat[i * n + j] = (i == j ? Cplx(1.0) : Cplx(0.0)) - acc * scale;
    }
  Cplx det = lu_det(mat, n);
  return {det.real(), std::abs(det.imag())};
}

MatrixResult generic_det(const std::function<double(double, double)>& kernel, double lo,
                         double hi, int order) {
  QuadratureRule rule = gauss_legendre(order, lo, hi);
  const int n = order;
  std::vector<double> k(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k[i * n + j] = kernel(rule.nodes[i], rule.nodes[j]);
  return {nystrom_det(k, rule), 0.0};
}

MatrixResult eval_kernel_det(const KernelSpec& spec, double lo, double hi, int order) {
  return std::visit(
      [&](const auto& v) -> MatrixResult {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, AiryVariant>)
          return airy_det(lo, hi, order);
        else if constexpr (std::is_same_v<T, DeformedAiryVariant>)
          return deformed_det(v.k, lo, hi, order);
        else if constexpr (std::is_same_v<T, BesselVariant>)
          return bessel_det(v.alpha, lo, hi, order);
        else
          return finite_det(v.model, v.contour, lo, hi, order);
      },
      spec.variant);
}

template <class Eval>
FredholmResult det_with_estimate(Eval&& eval, double lo, double hi, int order) {
  if (!(lo < hi)) throw ValidationError("fredholm_det: interval must satisfy lo < hi");
  if (order < 8 || order > 2048)
    throw ValidationError("fredholm_det: order must lie in [8, 2048]");
  MatrixResult full = eval(lo, hi, order);
  MatrixResult half = eval(lo, hi, std::max(order / 2, 4));
  FredholmResult result;
  result.value = full.value;
  result.order = order;
  result.error_estimate = std::abs(full.value - half.value);
  result.imag_residual = full.imag_residual;
  if (order >= 2048 && result.error_estimate > 1e-4)
    throw QuadratureDivergenceError("fredholm_det: node-halving estimate above 1e-4 at max order");
  return result;
}

double clamp_gap(double v, const char* what) {
  if (v < 0.0) {
    if (v < -1e-6) throw NumericalError(std::string(what) + ": value escaped [0, 1]");
    return 0.0;
  }
  if (v > 1.0) {
    if (v > 1.0 + 1e-6) throw NumericalError(std::string(what) + ": value escaped [0, 1]");
    return 1.0;
  }
  return v;
}

} // namespace

KernelSpec KernelSpec::deformed_airy(int k) {
  if (k < 0 || k > 10) throw ValidationError("KernelSpec: deformed rank must lie in [0, 10]");
  return {DeformedAiryVariant{k}};
}

KernelSpec KernelSpec::bessel(int alpha) {
  if (std::abs(alpha) > 50) throw ValidationError("KernelSpec: |alpha| must be <= 50");
  return {BesselVariant{alpha}};
}

KernelSpec KernelSpec::finite_n(WishartModel model, ContourSpec contour) {
  validate_contour(contour, model);
  return {FiniteNVariant{std::move(model), contour}};
}

ContourSpec default_contour(const WishartModel& model) {
  ContourSpec c;
  const double pole_lo = 1.0 / model.lambdas().back();  // 1/lambda_max
  const double pole_hi = 1.0 / model.lambdas().front(); // 1/lambda_min
  c.q = 0.5 * pole_lo;
  c.theta_radius = 0.5 * c.q;
  const double margin = 0.4 * (pole_lo - c.q);
  c.gamma_center = 0.5 * (pole_lo + pole_hi);
  c.gamma_radius = 0.5 * (pole_hi - pole_lo) + margin;
  c.nodes_per_contour = 256;
  return c;
}

void validate_contour(const ContourSpec& contour, const WishartModel& model) {
  const double spread = model.lambdas().back() / model.lambdas().front();
  if (spread > 1e3)
    throw ValidationError("contour: population eigenvalue spread above 1e3 is unsupported");
  if (!(contour.theta_radius > 0.0) || !(contour.theta_radius < contour.q))
    throw ValidationError("contour: Theta must enclose 0 inside {Re z < q}");
  if (!(contour.gamma_radius > 0.0) ||
      !(contour.gamma_center - contour.gamma_radius > contour.q))
    throw ValidationError("contour: Gamma must lie inside {Re z > q}");
  const double pole_lo = 1.0 / model.lambdas().back();
  const double pole_hi = 1.0 / model.lambdas().front();
  if (!(contour.gamma_center - contour.gamma_radius < pole_lo) ||
      !(contour.gamma_center + contour.gamma_radius > pole_hi))
    throw ValidationError("contour: Gamma must enclose every 1/lambda_j");
  if (contour.nodes_per_contour < 16 || contour.nodes_per_contour > 4096)
    throw ValidationError("contour: nodes_per_contour out of range");
}

FredholmResult fredholm_det(const KernelSpec& kernel, double lo, double hi, int order) {
  return det_with_estimate(
      [&](double l, double h, int o) { return eval_kernel_det(kernel, l, h, o); }, lo, hi,
      order);
}

FredholmResult fredholm_det(const std::function<double(double, double)>& kernel, double lo,
                            double hi, int order) {
  return det_with_estimate(
      [&](double l, double h, int o) { return generic_det(kernel, l, h, o); }, lo, hi,
      order);
}

FredholmResult tw_cdf_full(double s, int order, double window) {
  if (s < -12.0) throw DomainOverflowError("tw_cdf: s must be >= -12");
  const double hi = std::max(s + window, 8.0); // Airy tail below 1e-12 past 8
  FredholmResult r = fredholm_det(KernelSpec::airy(), s, hi, order);
  r.value = clamp_gap(r.value, "tw_cdf");
  return r;
}

double tw_cdf(double s) { return tw_cdf_full(s).value; }

FredholmResult deformed_tw_cdf_full(int k, double s, int order, double window) {
  if (s < -12.0) throw DomainOverflowError("deformed_tw_cdf: s must be >= -12");
  const double hi = std::max(s + window, 8.0);
  FredholmResult r = fredholm_det(KernelSpec::deformed_airy(k), s, hi, order);
  r.value = clamp_gap(r.value, "deformed_tw_cdf");
  return r;
}

double deformed_tw_cdf(int k, double s) { return deformed_tw_cdf_full(k, s).value; }

FredholmResult bessel_gap_full(int alpha, double s, int order) {
  if (!(s > 0.0) || s > 500.0)
    throw DomainOverflowError("bessel_gap: s must lie in (0, 500]");
  if (std::abs(alpha) > 50) throw DomainOverflowError("bessel_gap: |alpha| must be <= 50");
  // det(I - K_Be,alpha) over (0, 4s): in this normalization the alpha = 0 law
  // is exactly Exp(1), matching the exact square-Laguerre identity
  // P(lambda_min(X*X) > t) = e^{-nt} under the hard-edge rescaling.
  FredholmResult r = fredholm_det(KernelSpec::bessel(alpha), 0.0, 4.0 * s, order);
  r.value = clamp_gap(r.value, "bessel_gap");
  return r;
}

double bessel_gap(int alpha, double s) { return bessel_gap_full(alpha, s).value; }

double finite_kernel(const WishartModel& model, const ContourSpec& contour, double x,
                     double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw ValidationError("finite_kernel: x, y must be positive");
  validate_contour(contour, model);
  const int M = contour.nodes_per_contour;
  FiniteContourData d = finite_contour_data(model, contour, M);
  const double N = d.N;

  std::vector<Cplx> u(M), v(M);
  double umax = -std::numeric_limits<double>::infinity(), vmax = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < M; ++a) {
    u[a] = -N * x * (d.z[a] - d.q) + d.zp[a];
    v[a] = N * y * (d.w[a] - d.q) + d.wq[a];
    umax = std::max(umax, u[a].real());
    vmax = std::max(vmax, v[a].real());
  }
  Cplx S = 0.0;
  for (int a = 0; a < M; ++a) {
    Cplx ea = std::exp(u[a] - umax) * (d.z[a] - d.gamma_center);
    for (int b = 0; b < M; ++b)
      S += ea * std::exp(v[b] - vmax) * d.w[b] / (d.w[b] - d.z[a]);
  }
  S *= N / (static_cast<double>(M) * M);
  const double log_mag = umax + vmax + std::log(std::abs(S) + 1e-320);
  if (log_mag > 709.0)
    throw NumericalOverflowError(
        "finite_kernel: log-magnitude exceeds 700 even after rebalancing q");
  if (std::abs(S) == 0.0) return 0.0;
  Cplx value = (S / std::abs(S)) * std::exp(log_mag);
  if (std::abs(value.imag()) >= 1e-8 * std::abs(value))
    throw NumericalError("finite_kernel: imaginary residual exceeds 1e-8 of the value");
  return value.real();
}

FredholmResult finite_gap_probability(const WishartModel& model, const ContourSpec& contour,
                                      double lo, double hi, int order) {
  if (lo == hi) return FredholmResult{1.0, order, 0.0, 0.0};
  if (!(lo >= 0.0) || !(lo < hi))
    throw ValidationError("finite_gap_probability: need 0 <= lo < hi");
  if (order > 256)
    throw ValidationError("finite_gap_probability: order capped at 256");
  FredholmResult r = det_with_estimate(
      [&](double l, double h, int o) { return finite_det(model, contour, l, h, o); }, lo,
      hi, order);
  r.value = clamp_gap(r.value, "finite_gap_probability");
  return r;
}

} // namespace wishart
