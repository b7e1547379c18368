#pragma once

// Transversal exploration across equivalence classes, and reconstruction of
// the connected component of N^{-1}([c - eps, c + eps]) through a start point
// as a family of traced leaves.

#include "simec/tracer.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace simec {

enum class ExploreStatus {
  reached,    // output offset reached leaf_eps
  boundary,   // left (halt) or was clamped onto (project) the hypercube
  exhausted,  // max_steps taken without reaching leaf_eps
};

std::string_view to_string(ExploreStatus s);

struct SimExpStep {
  Vector point;
  Vector direction;  // last direction used, sign-consistent with the input direction
  std::size_t steps = 0;
  double length = 0.0;       // sum of step lengths
  double energy = 0.0;       // sum of max(0, w^T g w) * step
  double pseudolength = 0.0; // sum of sqrt(|w^T g w|) * step
  ExploreStatus status = ExploreStatus::reached;
};

/// Steps p <- p + delta * w_plus until |N(p) - N(p_start)| >= leaf_eps.
///
/// w_plus is the largest-eigenvalue direction of the pullback metric, kept
/// sign-consistent with `prev_dir` (or canonical at the start when absent).
/// With `fixed_direction` the direction is evaluated once and reused for
/// every step. Requires a model with a single output.
SimExpStep simexp_step(const PullbackProvider& provider, const Vector& p,
                       const std::optional<Vector>& prev_dir, double delta, double leaf_eps,
                       std::size_t max_steps, const TraceConfig& boundary_cfg,
                       bool fixed_direction = false);

struct ExploreConfig {
  double delta = 1e-4;              // transversal step
  double tol_eps = 0.05;            // half-width of the target output interval
  double leaf_eps = 0.005;          // output spacing between consecutive leaves
  std::size_t max_leaf_steps = 1000000;  // transversal steps allowed between two leaves
  TraceConfig simec;                // per-leaf tracing, run in both orientations
  bool allow_outside = false;       // transversal may leave the hypercube
  std::optional<Box> outer_box;     // bound for allow_outside; default: hypercube grown by 50%
  bool refresh_direction = true;    // recompute w_plus at every transversal step
  unsigned jobs = 1;                // leaf tracing threads

  void validate() const;
};

enum class TransversalStop { interval_exceeded, boundary, exhausted };
std::string_view to_string(TransversalStop s);

struct FoliationResult {
  /// Leaf k starts at transversal.points[k]. Ordered along the transversal,
  /// from the far end of the -w_plus pass through the start point to the far
  /// end of the +w_plus pass.
  std::vector<Polygonal> leaves;
  /// Leaf start points as a polyline; each segment summarizes the SiMExp
  /// sub-path between two leaves.
  Polygonal transversal;
  std::size_t center_index = 0;
  double center_output = 0.0;
  std::pair<double, double> covered_interval{0.0, 0.0};
  TransversalStop plus_stop = TransversalStop::interval_exceeded;
  TransversalStop minus_stop = TransversalStop::interval_exceeded;

  /// Mean distance between consecutive transversal points.
  double mean_leaf_spacing() const;
  std::vector<Vector> all_leaf_vertices() const;
};

FoliationResult preimage_interval(std::shared_ptr<const MlpModel> model, const Vector& p0,
                                  const ExploreConfig& cfg);

}  // namespace simec
