#include "simec/oracle.hpp"

#include "simec/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace simec {

Matrix fd_jacobian(const VectorFunction& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Vector f0 = f(x);
  Matrix jac(f0.size(), x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Divide by the representable step actually taken, not by 2h.
    const double hi = x[i] + h;
    const double lo = x[i] - h;
    xp[i] = hi;
    const Vector fp = f(xp);
    xp[i] = lo;
    const Vector fm = f(xp);
    xp[i] = x[i];
    if (!fp.allFinite() || !fm.allFinite()) {
      throw NumericalError("non-finite function value in finite differences");
    }
    jac.col(i) = (fp - fm) / (hi - lo);
  }
  return jac;
}

ScalarField model_field(const MlpModel& model) {
  if (model.input_dim() != 2 || model.output_dim() != 1) {
    throw ShapeError("scalar field view needs a 2 -> 1 model");
  }
  return [&model](double x, double y) { return forward(model, Vector{{x, y}})[0]; };
}

GridSpec::GridSpec(Box b, std::size_t res) : box(std::move(b)), resolution(res) {
  if (box.dim() != 2) throw ConfigError("grid box must be two-dimensional");
  if (resolution < 2) throw ConfigError("grid resolution must be at least 2");
}

double GridSpec::spacing(Eigen::Index axis) const {
  return (box.upper[axis] - box.lower[axis]) / static_cast<double>(resolution - 1);
}

double GridSpec::cell_diagonal() const { return std::hypot(spacing(0), spacing(1)); }

Vector GridSpec::node(std::size_t i, std::size_t j) const {
  // Last node pinned to the upper bound exactly.
  const double x = i + 1 == resolution ? box.upper[0] : box.lower[0] + static_cast<double>(i) * spacing(0);
  const double y = j + 1 == resolution ? box.upper[1] : box.lower[1] + static_cast<double>(j) * spacing(1);
  return Vector{{x, y}};
}

std::vector<Vector> ContourSet::vertices() const {
  std::vector<Vector> out;
  for (const auto& pl : polylines) out.insert(out.end(), pl.begin(), pl.end());
  return out;
}

std::size_t ContourSet::vertex_count() const {
  std::size_t n = 0;
  for (const auto& pl : polylines) n += pl.size();
  return n;
}

namespace {

struct Segment {
  std::int64_t a;  // edge ids of the two endpoints
  std::int64_t b;
};

}  // namespace

ContourSet marching_contour(const ScalarField& f, const GridSpec& grid, double level) {
  const std::size_t n = grid.resolution;
  std::vector<double> values(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vector p = grid.node(i, j);
      const double v = f(p[0], p[1]);
      if (!std::isfinite(v)) throw NumericalError("field is not finite on the grid");
      values[j * n + i] = v;
    }
  }
  auto val = [&](std::size_t i, std::size_t j) { return values[j * n + i]; };

  // Edge ids: 2 * node + 0 for the edge to the right, 2 * node + 1 for the edge upward.
  auto h_edge = [&](std::size_t i, std::size_t j) {
    return static_cast<std::int64_t>(2 * (j * n + i));
  };
  auto v_edge = [&](std::size_t i, std::size_t j) {
    return static_cast<std::int64_t>(2 * (j * n + i) + 1);
  };
  std::unordered_map<std::int64_t, Vector> edge_points;
  auto crossing = [&](std::int64_t id) -> std::int64_t {
    if (edge_points.count(id)) return id;
    const auto node = static_cast<std::size_t>(id / 2);
    const std::size_t i = node % n;
    const std::size_t j = node / n;
    const bool vertical = id % 2 == 1;
    const std::size_t i1 = vertical ? i : i + 1;
    const std::size_t j1 = vertical ? j + 1 : j;
    const double f0 = val(i, j);
    const double f1 = val(i1, j1);
    const double t = f1 == f0 ? 0.5 : std::clamp((level - f0) / (f1 - f0), 0.0, 1.0);
    const Vector p0 = grid.node(i, j);
    const Vector p1 = grid.node(i1, j1);
    edge_points.emplace(id, p0 + t * (p1 - p0));
    return id;
  };

  std::vector<Segment> segments;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const bool bl = val(i, j) >= level;
      const bool br = val(i + 1, j) >= level;
      const bool tr = val(i + 1, j + 1) >= level;
      const bool tl = val(i, j + 1) >= level;
      const int code = (bl ? 1 : 0) | (br ? 2 : 0) | (tr ? 4 : 0) | (tl ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const std::int64_t bottom = h_edge(i, j);
      const std::int64_t top = h_edge(i, j + 1);
      const std::int64_t left = v_edge(i, j);
      const std::int64_t right = v_edge(i + 1, j);
      if (code == 5 || code == 10) {
        const Vector c = 0.5 * (grid.node(i, j) + grid.node(i + 1, j + 1));
        const bool center_in = f(c[0], c[1]) >= level;
        // Pair the crossings so that the center's side stays connected.
        const bool cut_bl_tr = (code == 5) != center_in;
        if (cut_bl_tr) {
          segments.push_back({crossing(bottom), crossing(left)});
          segments.push_back({crossing(right), crossing(top)});
        } else {
          segments.push_back({crossing(bottom), crossing(right)});
          segments.push_back({crossing(left), crossing(top)});
        }
        continue;
      }
      std::array<std::int64_t, 2> ends{};
      int k = 0;
      if (bl != br) ends[k++] = crossing(bottom);
      if (br != tr) ends[k++] = crossing(right);
      if (tl != tr) ends[k++] = crossing(top);
      if (bl != tl) ends[k++] = crossing(left);
      segments.push_back({ends[0], ends[1]});
    }
  }

  // Stitch segments sharing edge points into polylines.
  std::unordered_map<std::int64_t, std::vector<std::size_t>> at_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    at_edge[segments[s].a].push_back(s);
    at_edge[segments[s].b].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto other_end = [&](std::size_t s, std::int64_t e) {
    return segments[s].a == e ? segments[s].b : segments[s].a;
  };
  auto next_segment = [&](std::int64_t e) -> std::ptrdiff_t {
    for (std::size_t s : at_edge[e])
      if (!used[s]) return static_cast<std::ptrdiff_t>(s);
    return -1;
  };

  ContourSet out;
  out.level = level;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<std::int64_t> chain{segments[s0].a, segments[s0].b};
    for (std::ptrdiff_t s; (s = next_segment(chain.back())) >= 0;) {
      used[static_cast<std::size_t>(s)] = true;
      chain.push_back(other_end(static_cast<std::size_t>(s), chain.back()));
    }
    if (chain.back() != chain.front()) {
      std::vector<std::int64_t> head;
      for (std::ptrdiff_t s; (s = next_segment(chain.front())) >= 0;) {
        used[static_cast<std::size_t>(s)] = true;
        const auto e = other_end(static_cast<std::size_t>(s), chain.front());
        chain.insert(chain.begin(), e);
      }
    }
    std::vector<Vector> pl;
    pl.reserve(chain.size());
    for (auto e : chain) pl.push_back(edge_points.at(e));
    out.polylines.push_back(std::move(pl));
  }
  return out;
}

std::vector<Vector> grid_preimage(const ScalarField& f, const GridSpec& grid, double lo, double hi) {
  if (hi < lo) throw ConfigError("preimage interval is empty (hi < lo)");
  std::vector<Vector> out;
  for (std::size_t j = 0; j < grid.resolution; ++j) {
    for (std::size_t i = 0; i < grid.resolution; ++i) {
      Vector p = grid.node(i, j);
      const double v = f(p[0], p[1]);
      if (v >= lo && v <= hi) out.push_back(std::move(p));
    }
  }
  return out;
}

double directed_hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.empty() || b.empty()) throw ConfigError("Hausdorff distance of an empty point set");
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) {
      best = std::min(best, (p - q).squaredNorm());
      if (best <= worst) break;  // cannot raise the maximum
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

namespace {

double point_segment_distance(const Vector& p, const Vector& a, const Vector& b) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

double distance_to_contour(const Vector& p, const ContourSet& contour) {
  if (contour.empty()) throw ConfigError("distance to an empty contour");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pl : contour.polylines) {
    if (pl.size() == 1) best = std::min(best, (p - pl[0]).norm());
    for (std::size_t i = 1; i < pl.size(); ++i)
      best = std::min(best, point_segment_distance(p, pl[i - 1], pl[i]));
  }
  return best;
}

double max_distance_to_contour(const std::vector<Vector>& points, const ContourSet& contour) {
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, distance_to_contour(p, contour));
  return worst;
}

std::vector<Vector> restrict_to(const std::vector<Vector>& points, const Box& box) {
  std::vector<Vector> out;
  for (const auto& p : points)
    if (box.contains(p)) out.push_back(p);
  return out;
}

PointIndex::PointIndex(const std::vector<Vector>& points, double cell) : cell_(cell) {
  if (!(cell > 0.0)) throw ConfigError("index cell size must be positive");
  for (const auto& p : points) {
    if (p.size() != 2) throw ShapeError("PointIndex stores 2-D points");
    const auto ix = static_cast<std::int64_t>(std::floor(p[0] / cell_));
    const auto iy = static_cast<std::int64_t>(std::floor(p[1] / cell_));
    buckets_[key(ix, iy)].push_back(p);
  }
}

std::int64_t PointIndex::key(std::int64_t ix, std::int64_t iy) const {
  return (ix << 32) ^ (iy & 0xffffffffLL);
}

bool PointIndex::any_within(const Vector& p, double radius) const {
  if (radius > cell_) throw ConfigError("query radius exceeds the index cell size");
  const auto ix = static_cast<std::int64_t>(std::floor(p[0] / cell_));
  const auto iy = static_cast<std::int64_t>(std::floor(p[1] / cell_));
  const double r2 = radius * radius;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      const auto it = buckets_.find(key(ix + dx, iy + dy));
      if (it == buckets_.end()) continue;
      for (const auto& q : it->second)
        if ((p - q).squaredNorm() <= r2) return true;
    }
  }
  return false;
}

double coverage_fraction(const std::vector<Vector>& targets, const std::vector<Vector>& sources,
                         double radius) {
  if (targets.empty()) return 1.0;
  const PointIndex index(sources, radius);
  std::size_t hit = 0;
  for (const auto& t : targets)
    if (index.any_within(t, radius)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(targets.size());
}

double covered_area(const GridSpec& grid, const std::vector<Vector>& sources, double radius) {
  const PointIndex index(sources, radius);
  std::size_t hit = 0;
  for (std::size_t j = 0; j < grid.resolution; ++j)
    for (std::size_t i = 0; i < grid.resolution; ++i)
      if (index.any_within(grid.node(i, j), radius)) ++hit;
  return static_cast<double>(hit) * grid.spacing(0) * grid.spacing(1);
}

}  // namespace simec
