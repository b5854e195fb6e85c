#ifndef WISHART_SUPPORT_HPP
#define WISHART_SUPPORT_HPP

#include <optional>
#include <vector>

#include "wishart/measure.hpp"

namespace wishart {

enum class Side { Left, Right };

/// Connected components [a_k, b_k] of the bulk plus the mass of the atom
/// at the origin, max(1-gamma, 0).
struct SupportProfile {
  struct Component {
    double a;
    double b;
  };
  std::vector<Component> components;
  double zero_mass = 0.0;
};

/// Finite-N refinement of an edge: the critical point of g_N closest to the
/// limiting preimage, its image, and the N^{2/3} fluctuation scale.
struct FiniteNEdge {
  double preimage;  // c_N (root of g_N')
  double position;  // g_N(c_N)
  double scaling;   // (2/|g_N''(c_N)|)^{1/3}
};

/// One bulk edge. For a soft edge the preimage is the critical point of g
/// and scaling = (2/|g''|)^{1/3}; the hard edge (gamma = 1, position 0) has
/// no preimage and carries the Bessel variance constant 4*int(1/x)dnu as
/// its scaling.
struct EdgeReport {
  double position = 0.0;
  double preimage = 0.0; // NaN for the hard edge
  Side side = Side::Left;
  bool hard = false;
  bool regular = true;
  double regularity_margin = 0.0; // +inf when no model has been consulted
  double second_deriv = 0.0;      // g'' at the preimage, NaN for the hard edge
  double scaling = 0.0;
  std::optional<int> extremal_index;    // 1-based index into ascending eigenvalues
  std::optional<FiniteNEdge> finite_n;  // filled by finite_n_edge
};

enum class SpikeKind { Outlier, NoOutlier, Critical };

struct SpikeVerdict {
  SpikeKind kind;
  double g_prime_at_inverse;
};

/// Bulk of mu(gamma, nu): complement within [0, inf) of the g-images of the
/// maximal decreasing intervals of g on D = {x != 0 : 1/x not a pole}.
/// Endpoint accuracy 1e-10. Throws RootBracketFailureError if the critical
/// point scan cannot isolate the required sign changes of g'.
SupportProfile compute_support(const AtomicMeasure& nu, ShapeRatio gamma);

/// All edges of the bulk with preimages, sides, curvature and limit scaling
/// constants; model-dependent fields are left unset. A hard edge is emitted
/// iff |gamma - 1| <= 1e-12. Throws NonRegularGeometryError when an edge
/// preimage collides with a pole of g.
std::vector<EdgeReport> find_edges(const AtomicMeasure& nu, ShapeRatio gamma);

inline constexpr double kDefaultRegularityThreshold = 1e-6;

/// Margin min_j |c - 1/lambda_j| over the model's eigenvalues; the edge is
/// regular when the margin clears the threshold. The leftmost edge with
/// gamma > 1 (negative preimage) is always regular.
std::pair<bool, double> check_regularity(const EdgeReport& edge, const WishartModel& model,
                                         double threshold = kDefaultRegularityThreshold);

/// Root of g_N' nearest the limiting preimage, refined to 1e-12, with the
/// finite-N edge position and scaling constant. Requires a regular soft edge.
FiniteNEdge finite_n_edge(const EdgeReport& edge, const WishartModel& model);

/// Deterministic index of the eigenvalue converging to the edge, 1-based in
/// the ascending eigenvalues of the n x n companion matrix:
///   right edge:            max{ j : 1/lambda_j > d }
///   left edge:             min{ j : 1/lambda_j < c }
///   gamma > 1 leftmost:    n - N + 1
///   hard edge:             max(n - N, 0) + 1
/// Throws EmptyIndexSetError if no eigenvalue satisfies the inequality.
int extremal_index(const EdgeReport& edge, const WishartModel& model);

/// Classify a spike zeta against a spike-free base measure by the sign of
/// g'(1/zeta): outliers appear iff the derivative is negative.
SpikeVerdict classify_spike(const AtomicMeasure& base, ShapeRatio gamma, double zeta,
                            double critical_tolerance = 1e-10);

/// Hard-edge variance constant sigma_N = (4/N) sum_j 1/lambda_j.
double hard_edge_sigma(const WishartModel& model);

} // namespace wishart

#endif // WISHART_SUPPORT_HPP
