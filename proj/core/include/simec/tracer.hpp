#pragma once

// Polygonal approximation of one-dimensional null curves (equivalence classes).

#include "simec/metric.hpp"

#include <optional>
#include <vector>

namespace simec {

enum class BoundaryPolicy { halt, project, ignore };

std::string_view to_string(BoundaryPolicy b);
BoundaryPolicy parse_boundary(std::string_view name);

/// Closed axis-aligned box [lower_i, upper_i].
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vector& p) const;
  Vector clamp(const Vector& p) const;
  /// Grows every side by `fraction` of its extent.
  Box inflated(double fraction) const;
};

struct TraceConfig {
  double delta = 1e-4;
  std::size_t max_steps = 10000;
  BoundaryPolicy boundary = BoundaryPolicy::ignore;
  std::optional<Box> hypercube;
  double tau_rel = kDefaultNullThreshold;

  /// Throws ConfigError when delta <= 0 or a boundary policy lacks its box.
  void validate() const;
};

/// Vertices p_0..p_n of a traced polygonal with per-segment bookkeeping.
/// Vectors indexed by vertex have n + 1 entries; segment vectors have n.
struct Polygonal {
  std::vector<Vector> points;
  std::vector<Vector> outputs;  // network output per vertex; empty for analytic fields
  std::vector<double> segment_energies;
  std::vector<double> segment_pseudolengths;
  std::vector<bool> projected;  // per vertex: reached through a clamped step
  double cumulative_energy = 0.0;
  double pseudolength_bound = 0.0;
  std::size_t projected_steps = 0;
  bool halted_at_boundary = false;
  std::size_t start_index = 0;  // position of the start point in `points`
  std::optional<Vector> final_direction;

  std::size_t size() const { return points.size(); }
  std::size_t segments() const { return segment_energies.size(); }
};

/// max(0, v^T g v) * delta: energy of the straight segment p + s v, s in [0, delta],
/// with the metric frozen at the start point.
double segment_energy(const MetricTensor& g, const Vector& v, double delta);

/// sqrt(|v^T g v|) * delta: upper bound on the segment pseudolength.
double pseudolength_bound(const MetricTensor& g, const Vector& v, double delta);

struct BoundaryAction {
  Vector point;
  bool halted = false;
};

/// project clamps into the box; halt flags points outside it; ignore is the identity.
BoundaryAction apply_boundary(const Vector& p, const TraceConfig& cfg);

/// Euler stepping along the sign-consistent null eigenvector.
///
/// `v0` orients the first step; without it the canonical-sign null direction
/// at p0 is used. Emits at most max_steps + 1 vertices including p0. With the
/// halt policy the trace stops before the first vertex that leaves the box,
/// and that vertex is not recorded.
Polygonal simec_trace(const MetricProvider& provider, const Vector& p0,
                      const std::optional<Vector>& v0, const TraceConfig& cfg);

/// Traces from p0 in both orientations and joins the halves into one
/// polygonal running from the backward end through p0 to the forward end.
Polygonal simec_trace_both(const MetricProvider& provider, const Vector& p0,
                           const TraceConfig& cfg);

/// Largest |N(p_k) - N(start)| over the outputs of a polygonal (0 if no outputs).
double max_output_drift(const Polygonal& poly);

}  // namespace simec
