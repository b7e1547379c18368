#pragma once

// Pullback metric on the input space and its null/positive eigenspaces.

#include "simec/nn.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace simec {

/// Symmetric positive-semidefinite form attached to a point. The matrix is
/// symmetrized on construction; positive semidefiniteness is checked by
/// spectral_decompose, which has the eigenvalues at hand.
class MetricTensor {
 public:
  MetricTensor(Vector base_point, Matrix matrix);

  const Vector& base_point() const { return base_point_; }
  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// v^T g v
  double quadratic_form(const Vector& v) const;

 private:
  Vector base_point_;
  Matrix matrix_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending; entries below tau_rel * max are exactly 0
  Matrix eigenvectors;  // column k pairs with eigenvalues[k]
  Eigen::Index null_count = 0;
  int sweeps = 0;

  Eigen::Index dim() const { return eigenvalues.size(); }
  Eigen::Index positive_count() const { return dim() - null_count; }
  double max_eigenvalue() const { return dim() ? eigenvalues[dim() - 1] : 0.0; }
};

inline constexpr double kDefaultNullThreshold = 1e-9;

/// Cyclic Jacobi eigendecomposition (rotation threshold 1e-14, at most 100 sweeps).
SpectralDecomposition spectral_decompose(const MetricTensor& g,
                                         double tau_rel = kDefaultNullThreshold);

/// Same solver on a bare symmetric matrix, without the semidefiniteness check.
SpectralDecomposition jacobi_eigen(const Matrix& symmetric, double tau_rel = kDefaultNullThreshold);

enum class Subspace { null, positive };

/// Unit eigenvector of the smallest (null) or largest (positive) eigenvalue.
///
/// With `prev`, the candidate is negated when dot(candidate, prev) < 0, so
/// consecutive directions never turn by more than a right angle. Without
/// `prev`, the component of largest magnitude (first one on ties) is made
/// positive.
Vector select_direction(const SpectralDecomposition& decomp, Subspace which,
                        const std::optional<Vector>& prev = std::nullopt);

/// J^T g_out J with J the network Jacobian at x. Rejects g_out whose
/// asymmetry exceeds 1e-9.
MetricTensor pullback_metric(const MlpModel& model, const Vector& x, const Matrix& g_out);

/// Source of metric tensors over the input space.
class MetricProvider {
 public:
  virtual ~MetricProvider() = default;

  virtual Eigen::Index dim() const = 0;
  virtual MetricTensor metric_at(const Vector& p) const = 0;

  /// Network output at p, for providers backed by a model.
  virtual std::optional<Vector> output_at(const Vector& /*p*/) const { return std::nullopt; }
};

class PullbackProvider final : public MetricProvider {
 public:
  /// Output metric defaults to the Euclidean identity.
  explicit PullbackProvider(std::shared_ptr<const MlpModel> model,
                            std::optional<Matrix> g_out = std::nullopt);

  Eigen::Index dim() const override { return model_->input_dim(); }
  MetricTensor metric_at(const Vector& p) const override;
  std::optional<Vector> output_at(const Vector& p) const override;

  const MlpModel& model() const { return *model_; }
  const Matrix& output_metric() const { return g_out_; }

 private:
  std::shared_ptr<const MlpModel> model_;
  Matrix g_out_;
};

class AnalyticProvider final : public MetricProvider {
 public:
  using Field = std::function<Matrix(const Vector&)>;

  AnalyticProvider(Eigen::Index dim, Field field, std::string name = "analytic");

  Eigen::Index dim() const override { return dim_; }
  MetricTensor metric_at(const Vector& p) const override;
  const std::string& name() const { return name_; }

 private:
  Eigen::Index dim_;
  Field field_;
  std::string name_;
};

/// g(x, y) = [[x^2, x], [x, 1]] on the positive quadrant. The kernel is
/// spanned by (1, -x), so the null curve through (x0, y0) is the parabola
/// y = y0 - (x^2 - x0^2) / 2.
std::shared_ptr<const AnalyticProvider> example2_metric();

/// Looks up an analytic field by name ("example2"); throws ConfigError otherwise.
std::shared_ptr<const AnalyticProvider> analytic_metric(const std::string& name);

}  // namespace simec
