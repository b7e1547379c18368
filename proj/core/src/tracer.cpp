#include "simec/tracer.hpp"

#include "simec/errors.hpp"

#include <algorithm>
#include <cmath>

namespace simec {

std::string_view to_string(BoundaryPolicy b) {
  switch (b) {
    case BoundaryPolicy::halt: return "halt";
    case BoundaryPolicy::project: return "project";
    case BoundaryPolicy::ignore: return "ignore";
  }
  return "ignore";
}

BoundaryPolicy parse_boundary(std::string_view name) {
  if (name == "halt") return BoundaryPolicy::halt;
  if (name == "project") return BoundaryPolicy::project;
  if (name == "ignore") return BoundaryPolicy::ignore;
  throw ConfigError("unknown boundary policy '" + std::string(name) +
                    "' (expected halt, project or ignore)");
}

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw ConfigError("box bounds must be non-empty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw ConfigError("box side " + std::to_string(i) + " is empty (lower >= upper)");
    }
  }
}

bool Box::contains(const Vector& p) const {
  if (p.size() != dim()) throw ShapeError("point and box dimensions differ");
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!(p[i] >= lower[i] && p[i] <= upper[i])) return false;
  return true;
}

Vector Box::clamp(const Vector& p) const {
  if (p.size() != dim()) throw ShapeError("point and box dimensions differ");
  return p.cwiseMax(lower).cwiseMin(upper);
}

Box Box::inflated(double fraction) const {
  const Vector pad = fraction * (upper - lower);
  return Box(lower - pad, upper + pad);
}

void TraceConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("step delta must be positive");
  if (!(tau_rel > 0.0)) throw ConfigError("null threshold must be positive");
  if (boundary != BoundaryPolicy::ignore && !hypercube) {
    throw ConfigError("boundary policy '" + std::string(to_string(boundary)) +
                      "' requires a hypercube");
  }
}

double segment_energy(const MetricTensor& g, const Vector& v, double delta) {
  return std::max(0.0, g.quadratic_form(v)) * delta;
}

double pseudolength_bound(const MetricTensor& g, const Vector& v, double delta) {
  return std::sqrt(std::abs(g.quadratic_form(v))) * delta;
}

BoundaryAction apply_boundary(const Vector& p, const TraceConfig& cfg) {
  switch (cfg.boundary) {
    case BoundaryPolicy::project: return {cfg.hypercube->clamp(p), false};
    case BoundaryPolicy::halt: return {p, !cfg.hypercube->contains(p)};
    case BoundaryPolicy::ignore: break;
  }
  return {p, false};
}

namespace {

void push_vertex(Polygonal& poly, const MetricProvider& provider, Vector p, bool projected) {
  if (auto out = provider.output_at(p)) poly.outputs.push_back(std::move(*out));
  poly.points.push_back(std::move(p));
  poly.projected.push_back(projected);
}

}  // namespace

Polygonal simec_trace(const MetricProvider& provider, const Vector& p0,
                      const std::optional<Vector>& v0, const TraceConfig& cfg) {
  cfg.validate();
  if (p0.size() != provider.dim()) {
    throw ShapeError("start point has length " + std::to_string(p0.size()) +
                     ", metric is " + std::to_string(provider.dim()) + "-dimensional");
  }
  if (cfg.boundary != BoundaryPolicy::ignore && !cfg.hypercube->contains(p0)) {
    throw ConfigError("start point lies outside the hypercube");
  }
  if (v0 && v0->size() != p0.size()) throw ShapeError("initial direction has the wrong dimension");

  Polygonal poly;
  poly.points.reserve(cfg.max_steps + 1);
  push_vertex(poly, provider, p0, false);

  std::optional<Vector> prev = v0;
  Vector p = p0;
  for (std::size_t k = 0; k < cfg.max_steps; ++k) {
    const MetricTensor g = provider.metric_at(p);
    const SpectralDecomposition decomp = spectral_decompose(g, cfg.tau_rel);
    if (decomp.null_count < 1) {
      throw DegenerateMetricError("metric has no null direction",
                                  static_cast<std::ptrdiff_t>(k));
    }
    const Vector v = select_direction(decomp, Subspace::null, prev);
    const Vector stepped = p + cfg.delta * v;
    BoundaryAction act = apply_boundary(stepped, cfg);
    if (act.halted) {
      poly.halted_at_boundary = true;
      break;
    }
    const bool projected = cfg.boundary == BoundaryPolicy::project && act.point != stepped;
    double energy = 0.0;
    double plen = 0.0;
    if (projected) {
      // Accumulate over the clamped segment actually taken.
      const Vector d = act.point - p;
      const double len = d.norm();
      if (len > 0.0) {
        const Vector u = d / len;
        energy = segment_energy(g, u, len);
        plen = pseudolength_bound(g, u, len);
      }
      ++poly.projected_steps;
    } else {
      energy = segment_energy(g, v, cfg.delta);
      plen = pseudolength_bound(g, v, cfg.delta);
    }
    poly.segment_energies.push_back(energy);
    poly.segment_pseudolengths.push_back(plen);
    poly.cumulative_energy += energy;
    poly.pseudolength_bound += plen;
    p = act.point;
    push_vertex(poly, provider, p, projected);
    prev = v;
  }
  poly.final_direction = prev;
  return poly;
}

Polygonal simec_trace_both(const MetricProvider& provider, const Vector& p0,
                           const TraceConfig& cfg) {
  cfg.validate();
  const SpectralDecomposition d0 = spectral_decompose(provider.metric_at(p0), cfg.tau_rel);
  if (d0.null_count < 1) throw DegenerateMetricError("metric has no null direction", 0);
  const Vector v = select_direction(d0, Subspace::null);

  Polygonal fwd = simec_trace(provider, p0, v, cfg);
  Polygonal bwd = simec_trace(provider, p0, Vector(-v), cfg);

  Polygonal joined;
  const std::size_t nb = bwd.points.size();
  joined.points.reserve(nb + fwd.points.size() - 1);
  for (std::size_t i = nb; i-- > 1;) {
    joined.points.push_back(bwd.points[i]);
    if (!bwd.outputs.empty()) joined.outputs.push_back(bwd.outputs[i]);
    joined.projected.push_back(bwd.projected[i]);
  }
  for (std::size_t s = bwd.segments(); s-- > 0;) {
    joined.segment_energies.push_back(bwd.segment_energies[s]);
    joined.segment_pseudolengths.push_back(bwd.segment_pseudolengths[s]);
  }
  for (std::size_t i = 0; i < fwd.points.size(); ++i) {
    joined.points.push_back(fwd.points[i]);
    if (!fwd.outputs.empty()) joined.outputs.push_back(fwd.outputs[i]);
    joined.projected.push_back(i == 0 ? false : static_cast<bool>(fwd.projected[i]));
  }
  joined.segment_energies.insert(joined.segment_energies.end(), fwd.segment_energies.begin(),
                                 fwd.segment_energies.end());
  joined.segment_pseudolengths.insert(joined.segment_pseudolengths.end(),
                                      fwd.segment_pseudolengths.begin(),
                                      fwd.segment_pseudolengths.end());
  for (double e : joined.segment_energies) joined.cumulative_energy += e;
  for (double l : joined.segment_pseudolengths) joined.pseudolength_bound += l;
  joined.projected_steps = fwd.projected_steps + bwd.projected_steps;
  joined.halted_at_boundary = fwd.halted_at_boundary || bwd.halted_at_boundary;
  joined.start_index = nb - 1;
  joined.final_direction = fwd.final_direction;
  return joined;
}

double max_output_drift(const Polygonal& poly) {
  if (poly.outputs.empty()) return 0.0;
  const Vector& ref = poly.outputs.at(poly.start_index);
  double worst = 0.0;
  for (const auto& o : poly.outputs) worst = std::max(worst, (o - ref).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace simec
