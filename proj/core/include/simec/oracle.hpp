#pragma once

// Brute-force ground truth used to check traced curves and foliations:
// finite-difference Jacobians, marching-squares contours, grid preimages and
// point-set distances. None of it goes through the Jacobian/eigenvector path.

#include "simec/nn.hpp"
#include "simec/tracer.hpp"

#include <functional>
#include <unordered_map>
#include <vector>

namespace simec {

using VectorFunction = std::function<Vector(const Vector&)>;
using ScalarField = std::function<double(double, double)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h, one column per input.
Matrix fd_jacobian(const VectorFunction& f, const Vector& x, double h = 1e-6);

/// Scalar field view of a single-output model.
ScalarField model_field(const MlpModel& model);

/// Regular 2-D sampling grid with `resolution` nodes per axis.
struct GridSpec {
  Box box;
  std::size_t resolution = 512;

  GridSpec() = default;
  GridSpec(Box b, std::size_t res);

  double spacing(Eigen::Index axis) const;
  double cell_diagonal() const;
  Vector node(std::size_t i, std::size_t j) const;
};

struct ContourSet {
  std::vector<std::vector<Vector>> polylines;  // closed ones repeat their first vertex
  double level = 0.0;

  bool empty() const { return polylines.empty(); }
  std::vector<Vector> vertices() const;
  std::size_t vertex_count() const;
};

/// Marching squares with linear edge interpolation. Saddle cells are
/// resolved by sampling f at the cell center. A level outside the sampled
/// range yields an empty set.
ContourSet marching_contour(const ScalarField& f, const GridSpec& grid, double level);

/// Grid nodes with lo <= f <= hi. Throws ConfigError when hi < lo.
std::vector<Vector> grid_preimage(const ScalarField& f, const GridSpec& grid, double lo, double hi);

/// max over a of min over b of |a - b|.
double directed_hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// Symmetric Hausdorff distance, brute force. Throws ConfigError on empty input.
double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// Distance from p to the nearest segment of any contour polyline.
double distance_to_contour(const Vector& p, const ContourSet& contour);

/// max over points of distance_to_contour.
double max_distance_to_contour(const std::vector<Vector>& points, const ContourSet& contour);

/// Points inside `box`.
std::vector<Vector> restrict_to(const std::vector<Vector>& points, const Box& box);

/// Uniform bucket grid over 2-D points for fixed-radius queries.
class PointIndex {
 public:
  PointIndex(const std::vector<Vector>& points, double cell);

  /// True when some indexed point lies within `radius` (<= cell) of p.
  bool any_within(const Vector& p, double radius) const;

 private:
  std::int64_t key(std::int64_t ix, std::int64_t iy) const;

  double cell_;
  std::unordered_map<std::int64_t, std::vector<Vector>> buckets_;
};

/// Fraction of `targets` lying within `radius` of some point of `sources`.
double coverage_fraction(const std::vector<Vector>& targets, const std::vector<Vector>& sources,
                         double radius);

/// Grid area (node count times cell area) within `radius` of some source point.
double covered_area(const GridSpec& grid, const std::vector<Vector>& sources, double radius);

}  // namespace simec
