#pragma once

// Smooth feedforward networks: evaluation and exact Jacobians.
//
// A network is a chain of layers x -> F(A x + b) where F is a componentwise
// smooth, strictly increasing activation. All arithmetic is double precision.

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace simec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { sigmoid, tanh, softplus, identity };

std::string_view to_string(Activation a);

/// Parses "sigmoid" | "tanh" | "softplus" | "identity". Anything else,
/// including "relu", throws ModelFormatError.
Activation parse_activation(std::string_view name);

double activate(Activation a, double x);
double activate_derivative(Activation a, double x);

struct Layer {
  Matrix weights;  // out_dim x in_dim, row r feeds output unit r
  Vector bias;     // out_dim
  Activation activation = Activation::sigmoid;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

/// Immutable chain of layers. The constructor checks that dimensions chain.
class MlpModel {
 public:
  explicit MlpModel(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  Eigen::Index input_dim() const { return layers_.front().in_dim(); }
  Eigen::Index output_dim() const { return layers_.back().out_dim(); }

  /// Smallest layer width, including the input dimension.
  Eigen::Index min_width() const;

 private:
  std::vector<Layer> layers_;
};

Vector forward(const MlpModel& model, const Vector& x);

/// diag(F'(Ax + b)) * A evaluated at x.
Matrix layer_jacobian(const Layer& layer, const Vector& x);

/// J_n * ... * J_1, accumulated alongside the forward pass.
Matrix network_jacobian(const MlpModel& model, const Vector& x);

/// Forward value and Jacobian from a single pass.
struct Evaluation {
  Vector output;
  Matrix jacobian;
};
Evaluation evaluate(const MlpModel& model, const Vector& x);

struct LayerRank {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool pass = false;
};

struct RankReport {
  std::vector<LayerRank> layers;
  bool pass = false;
};

RankReport check_full_rank(const MlpModel& model, double tol_ratio = 1e-10);

// Model file: {"layers":[{"weights":[[...]],"bias":[...],"activation":"sigmoid"}]}
MlpModel model_from_json(std::string_view text);
std::string model_to_json(const MlpModel& model);
MlpModel load_model(const std::string& path);
void save_model(const MlpModel& model, const std::string& path);

}  // namespace simec
