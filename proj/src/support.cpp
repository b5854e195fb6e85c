#include "wishart/support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wishart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kHardEdgeGammaTol = 1e-12;
constexpr int kScanGridSize = 4096;

double g1(const AtomicMeasure& nu, ShapeRatio gamma, double x) {
  return g_deriv(nu, gamma, x, 1);
}

/// Extended-precision g' and g'' for the final Newton polish: double
/// evaluation of g' carries eps * (pole terms) of roundoff, which can exceed
/// the 1e-10 duality budget when a critical point hugs a pole.
std::pair<long double, long double> g12_ld(const AtomicMeasure& nu, ShapeRatio gamma,
                                           long double x) {
  long double d1 = -1.0L / (x * x);
  long double d2 = 2.0L / (x * x * x);
  for (const Atom& a : nu.atoms()) {
    long double lam = a.lambda;
    long double den = 1.0L - x * lam;
    long double w = gamma.gamma * a.weight;
    d1 += w * lam * lam / (den * den);
    d2 += w * 2.0L * lam * lam * lam / (den * den * den);
  }
  return {d1, d2};
}

/// Bisection+Newton hybrid for a root of g' inside a sign-change bracket.
double refine_critical_point(const AtomicMeasure& nu, ShapeRatio gamma, double a, double b,
                             double fa, double fb) {
  (void)fb;
  double x = 0.5 * (a + b);
  for (int iter = 0; iter < 300; ++iter) {
    double fx = g1(nu, gamma, x);
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(b - a) < 1e-13 * scale) break;
    double slope = g_deriv(nu, gamma, x, 2);
    double xn = (slope != 0.0) ? x - fx / slope : 0.5 * (a + b);
    double lo = std::min(a, b), hi = std::max(a, b);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) < 1e-14 * scale && iter > 2) {
      x = xn;
      break;
    }
    x = xn;
  }
  long double xp = x;
  for (int polish = 0; polish < 3; ++polish) {
    auto [d1, d2] = g12_ld(nu, gamma, xp);
    if (d2 == 0.0L) break;
    xp -= d1 / d2;
  }
  return static_cast<double>(xp);
}

struct DComponent {
  double lo;   // -inf, 0, or a pole 1/lambda_j
  double hi;   // 0, a pole, or +inf
};

std::vector<double> g_poles(const AtomicMeasure& nu) {
  std::vector<double> poles;
  poles.reserve(nu.size());
  for (const Atom& a : nu.atoms()) poles.push_back(1.0 / a.lambda);
  std::sort(poles.begin(), poles.end());
  return poles;
}

std::vector<DComponent> d_components(const AtomicMeasure& nu) {
  std::vector<double> poles = g_poles(nu);
  std::vector<DComponent> comps;
  comps.push_back({-kInf, 0.0});
  comps.push_back({0.0, poles.front()});
  for (std::size_t j = 0; j + 1 < poles.size(); ++j)
    comps.push_back({poles[j], poles[j + 1]});
  comps.push_back({poles.back(), kInf});
  return comps;
}

void check_pole_collision(double root, const std::vector<double>& poles) {
  for (double p : poles)
    if (std::abs(root - p) < 1e-12 * std::max(1.0, std::abs(p)))
      throw NonRegularGeometryError(
          "support endpoint has no interior critical preimage: the search collapsed onto a pole of g");
  if (std::abs(root) < 1e-12)
    throw NonRegularGeometryError("edge preimage collides with the origin");
}

/// Roots of g' on a bounded component (both ends are poles of g).
/// Grid is cosine-graded so points cluster quadratically at the poles.
std::vector<double> scan_bounded(const AtomicMeasure& nu, ShapeRatio gamma,
                                 const DComponent& comp) {
  const double width = comp.hi - comp.lo;
  const double pi = 3.14159265358979323846;
  std::vector<double> roots;
  double xprev = kNaN, fprev = kNaN;
  for (int i = 0; i < kScanGridSize; ++i) {
    double s = 0.5 * (1.0 - std::cos(pi * (i + 0.5) / kScanGridSize));
    double x = comp.lo + width * s;
    double f;
    try {
      f = g1(nu, gamma, x);
    } catch (const PoleProximityError&) {
      continue;
    }
    if (!std::isnan(fprev) && (f > 0.0) != (fprev > 0.0))
      roots.push_back(refine_critical_point(nu, gamma, xprev, x, fprev, f));
    xprev = x;
    fprev = f;
  }
  return roots;
}

/// Upper bound beyond which g' can have no root (|x^2 g'(x) - (gamma-1)|
/// shrinks like 1/x, so the sign is settled by gamma - 1 far out).
double far_root_bound(const AtomicMeasure& nu, ShapeRatio gamma) {
  double inv_lambda_mean = nu.integrate([](double l) { return 1.0 / l; });
  double denom = std::max(std::abs(gamma.gamma - 1.0), 1e-13);
  double bound = 64.0 * std::max(1.0, gamma.gamma) *
                 std::max(inv_lambda_mean, 1.0 / nu.min_lambda()) / denom;
  return std::min(std::max(bound, 8.0 / nu.min_lambda()), 1e14);
}

/// Single root of g' on an unbounded component, if any: expand geometrically
/// from the finite end until the sign flips, then refine.
std::optional<double> scan_unbounded(const AtomicMeasure& nu, ShapeRatio gamma,
                                     double finite_end, int direction) {
  const double scale = std::max(1.0, std::abs(finite_end));
  const double bound = far_root_bound(nu, gamma);
  double t = scale * 1e-9;
  double xa = finite_end + direction * t;
  double fa = g1(nu, gamma, xa);
  while (std::abs(xa) < bound + scale) {
    t *= 1.4;
    double xb = finite_end + direction * t;
    double fb;
    try {
      fb = g1(nu, gamma, xb);
    } catch (const PoleProximityError&) {
      continue;
    }
    if ((fb > 0.0) != (fa > 0.0))
      return refine_critical_point(nu, gamma, xa, xb, fa, fb);
    xa = xb;
    fa = fb;
  }
  return std::nullopt;
}

/// A maximal decreasing interval of g mapped through g: an open interval of
/// the real line lying outside supp(mu). Finite endpoints generated by a
/// critical point carry the preimage.
struct RemovedInterval {
  double lo = -kInf;
  double hi = kInf;
  std::optional<double> lo_preimage; // local minimum of g: a right-edge preimage
  std::optional<double> hi_preimage; // local maximum of g: a left-edge preimage
};

struct ScanResult {
  std::vector<RemovedInterval> removed;
  std::vector<double> poles;
};

ScanResult scan_measure(const AtomicMeasure& nu, ShapeRatio gamma) {
  ScanResult out;
  out.poles = g_poles(nu);
  const double g_ = gamma.gamma;
  const bool hard = std::abs(g_ - 1.0) <= kHardEdgeGammaTol;
  std::vector<DComponent> comps = d_components(nu);

  for (const DComponent& comp : comps) {
    if (comp.lo == -kInf) {
      // (-inf, 0): g decreasing throughout when gamma <= 1; for gamma > 1 it
      // rises to the leftmost edge at c < 0 and then decreases to -inf.
      RemovedInterval r;
      r.lo = -kInf; // g -> -inf as x -> 0^-
      if (!hard && g_ > 1.0) {
        std::optional<double> c = scan_unbounded(nu, gamma, 0.0, -1);
        if (!c)
          throw RootBracketFailureError(
              "support scan: no critical point of g' found on (-inf, 0) although gamma > 1");
        check_pole_collision(*c, out.poles);
        r.hi = g_eval(nu, gamma, *c);
        r.hi_preimage = *c;
      } else {
        r.hi = 0.0; // g -> 0 as x -> -inf
      }
      out.removed.push_back(r);
      continue;
    }
    if (comp.lo == 0.0) {
      // (0, 1/lambda_max): g falls from +inf to the rightmost edge and rises
      // back toward the pole; exactly one critical point.
      std::vector<double> roots = scan_bounded(nu, gamma, comp);
      if (roots.size() != 1)
        throw RootBracketFailureError(
            "support scan: expected exactly one sign change of g' on (0, 1/lambda_max)");
      check_pole_collision(roots[0], out.poles);
      RemovedInterval r;
      r.lo = g_eval(nu, gamma, roots[0]);
      r.lo_preimage = roots[0];
      r.hi = kInf; // g -> +inf as x -> 0^+
      out.removed.push_back(r);
      continue;
    }
    if (comp.hi == kInf) {
      // (1/lambda_min, +inf): for gamma < 1 the leftmost positive edge sits
      // at the unique maximum; otherwise g is increasing and negative.
      if (hard || g_ > 1.0) continue;
      std::optional<double> c = scan_unbounded(nu, gamma, comp.lo, +1);
      if (!c)
        throw RootBracketFailureError(
            "support scan: no critical point of g' found on (1/lambda_min, inf) although gamma < 1");
      check_pole_collision(*c, out.poles);
      RemovedInterval r;
      r.lo = 0.0; // g -> 0 as x -> +inf
      r.hi = g_eval(nu, gamma, *c);
      r.hi_preimage = *c;
      out.removed.push_back(r);
      continue;
    }
    // Interior component between two poles: either no decreasing stretch
    // (bulks merged) or a local max followed by a local min bounding a gap.
    std::vector<double> roots = scan_bounded(nu, gamma, comp);
    if (roots.empty()) continue;
    if (roots.size() != 2)
      throw RootBracketFailureError(
          "support scan: interior component of D shows an odd sign-change pattern of g'");
    check_pole_collision(roots[0], out.poles);
    check_pole_collision(roots[1], out.poles);
    RemovedInterval r;
    r.hi = g_eval(nu, gamma, roots[0]); // local max: left edge of the upper bulk
    r.hi_preimage = roots[0];
    r.lo = g_eval(nu, gamma, roots[1]); // local min: right edge of the lower bulk
    r.lo_preimage = roots[1];
    if (!(r.lo < r.hi))
      throw RootBracketFailureError("support scan: degenerate gap between bulk components");
    out.removed.push_back(r);
  }

  std::sort(out.removed.begin(), out.removed.end(),
            [](const RemovedInterval& a, const RemovedInterval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < out.removed.size(); ++i)
    if (out.removed[i].hi > out.removed[i + 1].lo + 1e-10)
      throw RootBracketFailureError("support scan: overlapping removed intervals");
  return out;
}

} // namespace

SupportProfile compute_support(const AtomicMeasure& nu, ShapeRatio gamma) {
  ScanResult scan = scan_measure(nu, gamma);
  SupportProfile profile;
  profile.zero_mass = std::max(1.0 - gamma.gamma, 0.0);
  for (std::size_t i = 0; i + 1 < scan.removed.size(); ++i) {
    double a = scan.removed[i].hi;
    double b = scan.removed[i + 1].lo;
    if (b - a <= 1e-12 * std::max(1.0, std::abs(b))) continue; // isolated point at 0
    profile.components.push_back({a, b});
  }
  return profile;
}

std::vector<EdgeReport> find_edges(const AtomicMeasure& nu, ShapeRatio gamma) {
  ScanResult scan = scan_measure(nu, gamma);
  const bool hard = std::abs(gamma.gamma - 1.0) <= kHardEdgeGammaTol;
  std::vector<EdgeReport> edges;
  for (std::size_t i = 0; i + 1 < scan.removed.size(); ++i) {
    const RemovedInterval& below = scan.removed[i];
    const RemovedInterval& above = scan.removed[i + 1];
    double a = below.hi;
    double b = above.lo;
    if (b - a <= 1e-12 * std::max(1.0, std::abs(b))) continue;

    EdgeReport left;
    left.position = a;
    left.side = Side::Left;
    left.regularity_margin = kInf;
    if (below.hi_preimage) {
      left.preimage = *below.hi_preimage;
      left.second_deriv = g_deriv(nu, gamma, left.preimage, 2);
      left.scaling = std::cbrt(2.0 / std::abs(left.second_deriv));
    } else {
      // endpoint generated by a limit of g rather than a critical point:
      // only the hard edge at the origin survives for atomic measures
      if (!hard)
        throw NonRegularGeometryError("support endpoint has no critical preimage in D");
      left.hard = true;
      left.position = 0.0;
      left.preimage = kNaN;
      left.second_deriv = kNaN;
      left.scaling = 4.0 * nu.integrate([](double l) { return 1.0 / l; });
    }
    edges.push_back(left);

    EdgeReport right;
    right.position = b;
    right.side = Side::Right;
    right.regularity_margin = kInf;
    if (!above.lo_preimage)
      throw NonRegularGeometryError("support endpoint has no critical preimage in D");
    right.preimage = *above.lo_preimage;
    right.second_deriv = g_deriv(nu, gamma, right.preimage, 2);
    right.scaling = std::cbrt(2.0 / std::abs(right.second_deriv));
    edges.push_back(right);
  }
  return edges;
}

std::pair<bool, double> check_regularity(const EdgeReport& edge, const WishartModel& model,
                                         double threshold) {
  if (edge.hard) throw ValidationError("check_regularity: hard edge has no preimage");
  double margin = kInf;
  for (double l : model.lambdas())
    margin = std::min(margin, std::abs(edge.preimage - 1.0 / l));
  bool regular = margin > threshold;
  if (edge.preimage < 0.0) regular = true; // gamma > 1 leftmost edge
  return {regular, margin};
}

FiniteNEdge finite_n_edge(const EdgeReport& edge, const WishartModel& model) {
  if (edge.hard) throw ValidationError("finite_n_edge: hard edge has no critical point");
  AtomicMeasure nu_n = model.spectral_measure();
  ShapeRatio gamma_n = model.gamma();
  auto [regular, margin] = check_regularity(edge, model);
  if (!regular)
    throw ValidationError("finite_n_edge: edge is not regular for this model");

  const double c = edge.preimage;
  double radius = 0.9 * std::min(margin, std::abs(c));
  if (!std::isfinite(radius) || radius <= 0.0)
    throw RootBracketFailureError("finite_n_edge: empty search bracket around the preimage");

  // sample g_N' across the bracket and keep the sign change nearest c
  const int grid = 257;
  double best = kNaN;
  double xprev = kNaN, fprev = kNaN;
  for (int i = 0; i < grid; ++i) {
    double x = c - radius + 2.0 * radius * i / (grid - 1);
    double f;
    try {
      f = g_deriv(nu_n, gamma_n, x, 1);
    } catch (const PoleProximityError&) {
      continue;
    }
    if (!std::isnan(fprev) && (f > 0.0) != (fprev > 0.0)) {
      double root = refine_critical_point(nu_n, gamma_n, xprev, x, fprev, f);
      if (std::isnan(best) || std::abs(root - c) < std::abs(best - c)) best = root;
    }
    xprev = x;
    fprev = f;
  }
  if (std::isnan(best))
    throw RootBracketFailureError("finite_n_edge: no root of g_N' within the regularity margin");

  FiniteNEdge fe;
  fe.preimage = best;
  fe.position = g_eval(nu_n, gamma_n, best);
  fe.scaling = std::cbrt(2.0 / std::abs(g_deriv(nu_n, gamma_n, best, 2)));
  return fe;
}

int extremal_index(const EdgeReport& edge, const WishartModel& model) {
  const int n = model.n();
  const int N = model.N();
  if (edge.hard) return std::max(n - N, 0) + 1;
  if (edge.side == Side::Left && edge.preimage < 0.0) {
    // gamma > 1 leftmost edge
    if (n <= N)
      throw ValidationError("extremal_index: negative preimage requires n > N");
    return n - N + 1;
  }
  const std::vector<double>& lambdas = model.lambdas();
  if (edge.side == Side::Right) {
    int count = 0;
    for (double l : lambdas)
      if (1.0 / l > edge.preimage) ++count;
    if (count == 0)
      throw EmptyIndexSetError("extremal_index: no 1/lambda_j above the right-edge preimage");
    return count; // lambdas ascending, so {1/lambda_j > d} is a prefix
  }
  int above = 0;
  for (double l : lambdas)
    if (1.0 / l < edge.preimage) ++above;
  if (above == 0)
    throw EmptyIndexSetError("extremal_index: no 1/lambda_j below the left-edge preimage");
  return n - above + 1;
}

SpikeVerdict classify_spike(const AtomicMeasure& base, ShapeRatio gamma, double zeta,
                            double critical_tolerance) {
  if (!(zeta > 0.0)) throw ValidationError("classify_spike: zeta must be positive");
  double gp = g_deriv(base, gamma, 1.0 / zeta, 1);
  SpikeVerdict verdict;
  verdict.g_prime_at_inverse = gp;
  if (gp < -critical_tolerance)
    verdict.kind = SpikeKind::Outlier;
  else if (gp > critical_tolerance)
    verdict.kind = SpikeKind::NoOutlier;
  else
    verdict.kind = SpikeKind::Critical;
  return verdict;
}

double hard_edge_sigma(const WishartModel& model) {
  double sum = 0.0;
  for (double l : model.lambdas()) sum += 1.0 / l;
  return 4.0 * sum / model.N();
}

} // namespace wishart
