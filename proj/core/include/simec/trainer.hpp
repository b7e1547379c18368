#pragma once

// Synthetic datasets and deterministic minibatch Adam training for the
// smooth MLP family in nn.hpp.

#include "simec/nn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace simec {

/// SplitMix64: tiny, seedable, identical output on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

enum class DatasetKind { circle_exp, parabola_exp, ideal_gas, sine_classifier };

std::string_view to_string(DatasetKind k);
DatasetKind parse_dataset_kind(std::string_view name);

struct Range {
  double min = 0.0;
  double max = 1.0;
};

/// Samples are stored column-wise: inputs is d_in x n, targets is d_out x n.
/// The ranges are empty unless the data has been min-max normalized.
struct Dataset {
  Matrix inputs;
  Matrix targets;
  std::vector<Range> input_ranges;
  std::vector<Range> target_ranges;

  Eigen::Index size() const { return inputs.cols(); }
  bool normalized() const { return !input_ranges.empty(); }
  /// Columns [begin, begin + count).
  Dataset slice(Eigen::Index begin, Eigen::Index count) const;
};

inline constexpr double kGasConstant = 8.314462;

/// circle_exp:      (x, y) ~ U(-1,1)^2,           z = exp(x^2 + y^2 - 2)
/// parabola_exp:    (x, y) ~ U(0,1)^2,            z = exp(x^2 + y - 2)
/// ideal_gas:       V ~ U(2.5e-2, 7.5e-2), P ~ U(1e5, 2e5), T = P V / R, min-max
///                  normalized over the sampling box
/// sine_classifier: (x, y) ~ U(-pi,pi) x U(-1,1), z = [y >= sin x]
Dataset generate_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed);

/// Ideal-gas sampling box, and the temperature range it induces.
std::vector<Range> ideal_gas_input_ranges();
Range ideal_gas_temperature_range();

/// Per-dimension min-max map to [0, 1], ranges taken from the data.
/// Already-normalized data keeps its original-unit ranges.
Dataset normalize(const Dataset& data);
/// Same map with explicit ranges.
Dataset normalize(const Dataset& data, const std::vector<Range>& input_ranges,
                  const std::vector<Range>& target_ranges);
Dataset denormalize(const Dataset& data);

inline double normalize_value(const Range& r, double v) { return (v - r.min) / (r.max - r.min); }
inline double denormalize_value(const Range& r, double v) { return r.min + v * (r.max - r.min); }

/// Mean over samples of the squared Euclidean error.
double mse_loss(const MlpModel& model, const Dataset& batch);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Backpropagated gradient of mse_loss with respect to every parameter.
Gradients mse_gradient(const MlpModel& model, const Dataset& batch);

struct LayerSpec {
  Eigen::Index width = 1;
  Activation activation = Activation::sigmoid;
};

struct Architecture {
  Eigen::Index input_dim = 2;
  std::vector<LayerSpec> layers;

  /// "2,5,5,1" with one activation for every layer.
  static Architecture parse(std::string_view widths, Activation act = Activation::sigmoid);
  std::string to_string() const;
};

struct TrainConfig {
  std::size_t epochs = 5000;
  std::size_t batch_size = 512;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 7;
  double split = 0.5;  // leading fraction used for training, the rest for validation

  void validate() const;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochLoss> history;
};

/// Uniform Glorot initialization, zero biases.
MlpModel initialize(const Architecture& arch, std::uint64_t seed);

/// Shuffled minibatch Adam on the leading `split` fraction of `data`.
/// Throws TrainingDivergedError when a loss becomes non-finite.
TrainResult train(const Architecture& arch, const Dataset& data, const TrainConfig& cfg);

}  // namespace simec
