#include "simec/metric.hpp"

#include "simec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simec {

namespace {

constexpr double kRotationThreshold = 1e-14;
constexpr int kMaxSweeps = 100;
constexpr double kPsdTolerance = 1e-10;
constexpr double kAsymmetryTolerance = 1e-9;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

MetricTensor::MetricTensor(Vector base_point, Matrix matrix)
    : base_point_(std::move(base_point)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw ShapeError("metric matrix must be square, got " + std::to_string(matrix_.rows()) +
                     "x" + std::to_string(matrix_.cols()));
  }
  if (base_point_.size() != matrix_.rows()) {
    throw ShapeError("metric base point has length " + std::to_string(base_point_.size()) +
                     " but matrix is " + std::to_string(matrix_.rows()) + "-dimensional");
  }
  const Matrix sym = 0.5 * (matrix_ + matrix_.transpose());
  matrix_ = sym;
}

double MetricTensor::quadratic_form(const Vector& v) const {
  if (v.size() != dim()) throw ShapeError("vector length does not match metric dimension");
  return v.dot(matrix_ * v);
}

SpectralDecomposition jacobi_eigen(const Matrix& symmetric, double tau_rel) {
  if (symmetric.rows() != symmetric.cols()) throw ShapeError("jacobi_eigen needs a square matrix");
  if (!(tau_rel > 0.0)) throw ConfigError("null threshold must be positive");
  if (!symmetric.allFinite()) throw NumericalError("metric has non-finite entries");

  const Eigen::Index n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();
  // Skipped entries have off-diagonal norm below the stopping threshold, so a
  // sweep without rotations has converged.
  const double skip = kRotationThreshold * scale / static_cast<double>(std::max<Eigen::Index>(n, 1));

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kRotationThreshold * scale) break;
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        rotated = true;
        // Rotation zeroing a(p, q); t is the smaller root of t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(a) > kRotationThreshold * scale) {
    throw NumericalError("Jacobi eigensolver did not converge in " +
                         std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  SpectralDecomposition out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[k] = a(src, src);
    out.eigenvectors.col(k) = v.col(src).normalized();
  }

  const double lmax = n ? out.eigenvalues[n - 1] : 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = out.eigenvalues[k];
    const bool is_null = lmax > 0.0 ? std::abs(l) < tau_rel * lmax : true;
    if (is_null) {
      out.eigenvalues[k] = 0.0;
      ++out.null_count;
    }
  }
  return out;
}

SpectralDecomposition spectral_decompose(const MetricTensor& g, double tau_rel) {
  SpectralDecomposition d = jacobi_eigen(g.matrix(), tau_rel);
  if (d.dim() > 0) {
    const double lmin = d.eigenvalues[0];
    const double lmax = d.max_eigenvalue();
    if (lmin < -kPsdTolerance * std::max(1.0, lmax)) {
      throw NumericalError("metric is not positive semidefinite (smallest eigenvalue " +
                           std::to_string(lmin) + ")");
    }
  }
  return d;
}

Vector select_direction(const SpectralDecomposition& decomp, Subspace which,
                        const std::optional<Vector>& prev) {
  const Eigen::Index n = decomp.dim();
  if (which == Subspace::null && decomp.null_count < 1) {
    throw DegenerateMetricError("metric has no null direction");
  }
  if (which == Subspace::positive && decomp.positive_count() < 1) {
    throw DegenerateMetricError("metric has no positive direction");
  }
  Vector v = which == Subspace::null ? Vector(decomp.eigenvectors.col(0))
                                     : Vector(decomp.eigenvectors.col(n - 1));
  if (prev) {
    if (prev->size() != n) throw ShapeError("previous direction has the wrong dimension");
    if (v.dot(*prev) < 0.0) v = -v;
  } else {
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[big])) big = i;
    if (v[big] < 0.0) v = -v;
  }
  return v;
}

MetricTensor pullback_metric(const MlpModel& model, const Vector& x, const Matrix& g_out) {
  if (g_out.rows() != model.output_dim() || g_out.cols() != model.output_dim()) {
    throw ShapeError("output metric must be " + std::to_string(model.output_dim()) + "x" +
                     std::to_string(model.output_dim()));
  }
  if ((g_out - g_out.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTolerance) {
    throw ConfigError("output metric is not symmetric");
  }
  const Matrix j = network_jacobian(model, x);
  return MetricTensor(x, j.transpose() * g_out * j);
}

PullbackProvider::PullbackProvider(std::shared_ptr<const MlpModel> model,
                                   std::optional<Matrix> g_out)
    : model_(std::move(model)) {
  if (!model_) throw ConfigError("pullback provider needs a model");
  const auto m = model_->output_dim();
  g_out_ = g_out ? *g_out : Matrix::Identity(m, m);
  if (g_out_.rows() != m || g_out_.cols() != m) {
    throw ShapeError("output metric must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if ((g_out_ - g_out_.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTolerance) {
    throw ConfigError("output metric is not symmetric");
  }
  // Positive semidefiniteness of the output metric.
  spectral_decompose(MetricTensor(Vector::Zero(m), g_out_));
}

MetricTensor PullbackProvider::metric_at(const Vector& p) const {
  return pullback_metric(*model_, p, g_out_);
}

std::optional<Vector> PullbackProvider::output_at(const Vector& p) const {
  return forward(*model_, p);
}

AnalyticProvider::AnalyticProvider(Eigen::Index dim, Field field, std::string name)
    : dim_(dim), field_(std::move(field)), name_(std::move(name)) {
  if (dim_ < 1) throw ConfigError("analytic metric dimension must be positive");
  if (!field_) throw ConfigError("analytic metric needs a field");
}

MetricTensor AnalyticProvider::metric_at(const Vector& p) const {
  if (p.size() != dim_) {
    throw ShapeError("point has length " + std::to_string(p.size()) + ", metric is " +
                     std::to_string(dim_) + "-dimensional");
  }
  return MetricTensor(p, field_(p));
}

std::shared_ptr<const AnalyticProvider> example2_metric() {
  return std::make_shared<const AnalyticProvider>(
      2,
      [](const Vector& p) {
        const double x = p[0];
        Matrix g(2, 2);
        g << x * x, x, x, 1.0;
        return g;
      },
      "example2");
}

std::shared_ptr<const AnalyticProvider> analytic_metric(const std::string& name) {
  if (name == "example2") return example2_metric();
  throw ConfigError("unknown analytic metric '" + name + "' (available: example2)");
}

}  // namespace simec
