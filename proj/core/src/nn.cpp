#include "simec/nn.hpp"

#include "simec/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace simec {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
    case Activation::identity: return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "softplus") return Activation::softplus;
  if (name == "identity") return Activation::identity;
  if (name == "relu") {
    throw ModelFormatError(
        "activation 'relu' is not smooth and is not supported; use 'softplus' instead");
  }
  throw ModelFormatError("unknown activation '" + std::string(name) + "'");
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double activate(Activation a, double x) {
  switch (a) {
    case Activation::sigmoid: return sigmoid(x);
    case Activation::tanh: return std::tanh(x);
    case Activation::softplus:
      // log(1 + e^x) without overflow
      return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case Activation::identity: return x;
  }
  return x;
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    // Forms that stay positive in the tails, where s(1 - s) and 1 - t^2 round to 0.
    case Activation::sigmoid: {
      const double e = std::exp(-std::abs(x));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case Activation::tanh: {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    }
    case Activation::softplus: return sigmoid(x);
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

MlpModel::MlpModel(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ModelFormatError("model has no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& l = layers_[k];
    if (l.weights.rows() == 0 || l.weights.cols() == 0) {
      throw ModelFormatError("layer " + std::to_string(k) + " has an empty weight matrix");
    }
    if (l.bias.size() != l.weights.rows()) {
      throw ModelFormatError("layer " + std::to_string(k) + ": bias length " +
                             std::to_string(l.bias.size()) + " != weight rows " +
                             std::to_string(l.weights.rows()));
    }
    if (k > 0 && l.weights.cols() != layers_[k - 1].weights.rows()) {
      throw ModelFormatError("layer " + std::to_string(k) + " expects " +
                             std::to_string(l.weights.cols()) + " inputs but layer " +
                             std::to_string(k - 1) + " produces " +
                             std::to_string(layers_[k - 1].weights.rows()));
    }
    if (!l.weights.allFinite() || !l.bias.allFinite()) {
      throw ModelFormatError("layer " + std::to_string(k) + " has non-finite parameters");
    }
  }
}

Eigen::Index MlpModel::min_width() const {
  Eigen::Index w = input_dim();
  for (const auto& l : layers_) w = std::min(w, l.out_dim());
  return w;
}

namespace {

void check_input(const MlpModel& model, const Vector& x) {
  if (x.size() != model.input_dim()) {
    throw ShapeError("input has length " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(model.input_dim()));
  }
}

}  // namespace

Vector forward(const MlpModel& model, const Vector& x) {
  check_input(model, x);
  Vector a = x;
  for (const auto& l : model.layers()) {
    Vector z = l.weights * a + l.bias;
    a = z.unaryExpr([act = l.activation](double v) { return activate(act, v); });
  }
  return a;
}

Matrix layer_jacobian(const Layer& layer, const Vector& x) {
  if (x.size() != layer.in_dim()) {
    throw ShapeError("layer input has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(layer.in_dim()));
  }
  const Vector z = layer.weights * x + layer.bias;
  const Vector d = z.unaryExpr([act = layer.activation](double v) {
    return activate_derivative(act, v);
  });
  return d.asDiagonal() * layer.weights;
}

Evaluation evaluate(const MlpModel& model, const Vector& x) {
  check_input(model, x);
  Vector a = x;
  Matrix jac = Matrix::Identity(x.size(), x.size());
  for (const auto& l : model.layers()) {
    const Vector z = l.weights * a + l.bias;
    Vector d(z.size());
    a.resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      a[i] = activate(l.activation, z[i]);
      d[i] = activate_derivative(l.activation, z[i]);
    }
    jac = d.asDiagonal() * (l.weights * jac);
  }
  return {std::move(a), std::move(jac)};
}

Matrix network_jacobian(const MlpModel& model, const Vector& x) {
  return evaluate(model, x).jacobian;
}

RankReport check_full_rank(const MlpModel& model, double tol_ratio) {
  RankReport report;
  report.pass = true;
  for (const auto& l : model.layers()) {
    Eigen::JacobiSVD<Matrix> svd(l.weights);
    const auto& s = svd.singularValues();
    LayerRank r;
    r.sigma_max = s.size() ? s[0] : 0.0;
    r.sigma_min = s.size() ? s[s.size() - 1] : 0.0;
    r.pass = r.sigma_max > 0.0 && r.sigma_min / r.sigma_max > tol_ratio;
    report.pass = report.pass && r.pass;
    report.layers.push_back(r);
  }
  return report;
}

}  // namespace simec
