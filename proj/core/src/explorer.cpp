#include "simec/explorer.hpp"

#include "simec/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace simec {

std::string_view to_string(ExploreStatus s) {
  switch (s) {
    case ExploreStatus::reached: return "reached";
    case ExploreStatus::boundary: return "boundary";
    case ExploreStatus::exhausted: return "exhausted";
  }
  return "reached";
}

std::string_view to_string(TransversalStop s) {
  switch (s) {
    case TransversalStop::interval_exceeded: return "interval_exceeded";
    case TransversalStop::boundary: return "boundary";
    case TransversalStop::exhausted: return "exhausted";
  }
  return "interval_exceeded";
}

namespace {

double scalar_output(const PullbackProvider& provider, const Vector& p) {
  return forward(provider.model(), p)[0];
}

Vector positive_direction(const PullbackProvider& provider, const Vector& p, double tau,
                          const std::optional<Vector>& prev, std::size_t step) {
  const SpectralDecomposition d = spectral_decompose(provider.metric_at(p), tau);
  if (d.positive_count() < 1) {
    throw DegenerateMetricError("metric has no positive direction",
                                static_cast<std::ptrdiff_t>(step));
  }
  return select_direction(d, Subspace::positive, prev);
}

}  // namespace

SimExpStep simexp_step(const PullbackProvider& provider, const Vector& p,
                       const std::optional<Vector>& prev_dir, double delta, double leaf_eps,
                       std::size_t max_steps, const TraceConfig& boundary_cfg,
                       bool fixed_direction) {
  if (provider.model().output_dim() != 1) {
    throw ShapeError("transversal exploration needs a model with one output");
  }
  if (!(delta > 0.0)) throw ConfigError("step delta must be positive");
  if (leaf_eps < 0.0) throw ConfigError("leaf_eps must be non-negative");
  TraceConfig bcfg = boundary_cfg;
  bcfg.delta = delta;
  bcfg.validate();
  if (bcfg.boundary != BoundaryPolicy::ignore && !bcfg.hypercube->contains(p)) {
    throw ConfigError("transversal start point lies outside the hypercube");
  }

  const double start_out = scalar_output(provider, p);
  SimExpStep res;
  res.point = p;
  if (leaf_eps <= 0.0) {
    res.direction = prev_dir ? *prev_dir : positive_direction(provider, p, bcfg.tau_rel, {}, 0);
    return res;
  }

  std::optional<Vector> dir = prev_dir;
  Vector q = p;
  for (std::size_t k = 0; k < max_steps; ++k) {
    const MetricTensor g = provider.metric_at(q);
    if (!fixed_direction || !dir) {
      const SpectralDecomposition d = spectral_decompose(g, bcfg.tau_rel);
      if (d.positive_count() < 1) {
        throw DegenerateMetricError("metric has no positive direction",
                                    static_cast<std::ptrdiff_t>(k));
      }
      dir = select_direction(d, Subspace::positive, dir);
    }
    const Vector next = q + delta * *dir;
    const BoundaryAction act = apply_boundary(next, bcfg);
    res.direction = *dir;
    if (act.halted) {
      res.status = ExploreStatus::boundary;
      return res;
    }
    const double len = (act.point - q).norm();
    if (len > 0.0) {
      const Vector u = (act.point - q) / len;
      res.energy += segment_energy(g, u, len);
      res.pseudolength += pseudolength_bound(g, u, len);
    }
    res.length += len;
    q = act.point;
    res.point = q;
    res.steps = k + 1;
    if (act.point != next) {
      res.status = ExploreStatus::boundary;
      return res;
    }
    if (std::abs(scalar_output(provider, q) - start_out) >= leaf_eps) {
      res.status = ExploreStatus::reached;
      return res;
    }
  }
  if (!dir) res.direction = positive_direction(provider, p, bcfg.tau_rel, {}, 0);
  res.status = ExploreStatus::exhausted;
  return res;
}

void ExploreConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("step delta must be positive");
  if (!(tol_eps > 0.0) || !(leaf_eps > 0.0)) throw ConfigError("eps and leaf_eps must be positive");
  if (!(leaf_eps < tol_eps)) throw ConfigError("leaf_eps must be smaller than eps");
  if (max_leaf_steps == 0) throw ConfigError("max_leaf_steps must be positive");
  simec.validate();
  if (allow_outside && !simec.hypercube) {
    throw ConfigError("allow_outside needs a hypercube to step outside of");
  }
}

double FoliationResult::mean_leaf_spacing() const {
  const auto& pts = transversal.points;
  if (pts.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total / static_cast<double>(pts.size() - 1);
}

std::vector<Vector> FoliationResult::all_leaf_vertices() const {
  std::vector<Vector> out;
  for (const auto& leaf : leaves) out.insert(out.end(), leaf.points.begin(), leaf.points.end());
  return out;
}

namespace {

struct Hop {
  Vector point;
  SimExpStep step;
};

// Walks the transversal in one orientation, returning the reached leaf start
// points (excluding the start itself) and why the walk stopped.
std::pair<std::vector<Hop>, TransversalStop> walk_transversal(const PullbackProvider& provider,
                                                              const Vector& p0, double center,
                                                              const Vector& initial_dir,
                                                              const ExploreConfig& cfg,
                                                              const TraceConfig& bcfg) {
  std::vector<Hop> hops;
  Vector p = p0;
  Vector dir = initial_dir;
  for (;;) {
    SimExpStep s = simexp_step(provider, p, dir, cfg.delta, cfg.leaf_eps, cfg.max_leaf_steps,
                               bcfg, !cfg.refresh_direction);
    if (s.status == ExploreStatus::boundary) return {std::move(hops), TransversalStop::boundary};
    if (s.status == ExploreStatus::exhausted) return {std::move(hops), TransversalStop::exhausted};
    if (std::abs(scalar_output(provider, s.point) - center) > cfg.tol_eps) {
      return {std::move(hops), TransversalStop::interval_exceeded};
    }
    p = s.point;
    dir = cfg.refresh_direction ? s.direction : initial_dir;
    hops.push_back({p, std::move(s)});
  }
}

template <typename E>
[[noreturn]] void rethrow_with_leaf(const E& e, std::size_t leaf) {
  throw E("leaf " + std::to_string(leaf) + ": " + e.what());
}

}  // namespace

FoliationResult preimage_interval(std::shared_ptr<const MlpModel> model, const Vector& p0,
                                  const ExploreConfig& cfg) {
  cfg.validate();
  if (!model) throw ConfigError("preimage_interval needs a model");
  if (model->output_dim() != 1) throw ShapeError("preimage_interval needs a model with one output");
  if (p0.size() != model->input_dim()) throw ShapeError("start point has the wrong dimension");
  if (cfg.simec.boundary != BoundaryPolicy::ignore && !cfg.simec.hypercube->contains(p0)) {
    throw ConfigError("start point lies outside the hypercube");
  }

  const PullbackProvider provider(model);
  FoliationResult res;
  res.center_output = scalar_output(provider, p0);
  if (!std::isfinite(res.center_output)) throw NumericalError("network output at start is not finite");

  // Transversal stepping bound.
  TraceConfig bcfg = cfg.simec;
  std::optional<Box> outer;
  if (cfg.allow_outside) {
    outer = cfg.outer_box ? *cfg.outer_box : cfg.simec.hypercube->inflated(0.5);
    bcfg.boundary = BoundaryPolicy::halt;
    bcfg.hypercube = outer;
  }

  const Vector w = positive_direction(provider, p0, cfg.simec.tau_rel, {}, 0);
  auto [plus, plus_stop] = walk_transversal(provider, p0, res.center_output, w, cfg, bcfg);
  auto [minus, minus_stop] = walk_transversal(provider, p0, res.center_output, Vector(-w), cfg, bcfg);
  res.plus_stop = plus_stop;
  res.minus_stop = minus_stop;

  // Transversal polyline: far end of the minus pass ... p0 ... far end of the plus pass.
  Polygonal& tr = res.transversal;
  auto push_point = [&](const Vector& p) {
    tr.points.push_back(p);
    tr.outputs.push_back(forward(*model, p));
    tr.projected.push_back(false);
  };
  auto push_segment = [&](const SimExpStep& s) {
    tr.segment_energies.push_back(s.energy);
    tr.segment_pseudolengths.push_back(s.pseudolength);
  };
  for (std::size_t i = minus.size(); i-- > 0;) {
    push_point(minus[i].point);
    push_segment(minus[i].step);  // segment from this point toward p0
  }
  res.center_index = tr.points.size();
  tr.start_index = res.center_index;
  push_point(p0);
  for (const auto& h : plus) {
    push_segment(h.step);
    push_point(h.point);
  }
  for (double e : tr.segment_energies) tr.cumulative_energy += e;
  for (double l : tr.segment_pseudolengths) tr.pseudolength_bound += l;
  tr.halted_at_boundary =
      plus_stop == TransversalStop::boundary || minus_stop == TransversalStop::boundary;

  // Leaves are independent given their start points.
  const std::size_t n_leaves = tr.points.size();
  res.leaves.resize(n_leaves);
  std::vector<std::exception_ptr> errors(n_leaves);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n_leaves; k = next++) {
      try {
        const Vector& start = tr.points[k];
        TraceConfig lcfg = cfg.simec;
        if (lcfg.boundary != BoundaryPolicy::ignore && !lcfg.hypercube->contains(start)) {
          // Only reachable with allow_outside: trace within the outer box instead.
          lcfg.boundary = BoundaryPolicy::halt;
          lcfg.hypercube = outer;
        }
        res.leaves[k] = simec_trace_both(provider, start, lcfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(n_leaves)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t k = 0; k < n_leaves; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const DegenerateMetricError& e) {
      throw DegenerateMetricError("leaf " + std::to_string(k) + ": " + e.what());
    } catch (const ShapeError& e) {
      rethrow_with_leaf(e, k);
    } catch (const ConfigError& e) {
      rethrow_with_leaf(e, k);
    } catch (const NumericalError& e) {
      rethrow_with_leaf(e, k);
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& leaf : res.leaves) {
    for (const auto& o : leaf.outputs) {
      lo = std::min(lo, o[0]);
      hi = std::max(hi, o[0]);
    }
  }
  res.covered_interval = {lo, hi};
  return res;
}

}  // namespace simec
