#include "simec/trainer.hpp"

#include "simec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace simec {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % n;
}

std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::circle_exp: return "circle_exp";
    case DatasetKind::parabola_exp: return "parabola_exp";
    case DatasetKind::ideal_gas: return "ideal_gas";
    case DatasetKind::sine_classifier: return "sine_classifier";
  }
  return "circle_exp";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "circle_exp") return DatasetKind::circle_exp;
  if (name == "parabola_exp") return DatasetKind::parabola_exp;
  if (name == "ideal_gas") return DatasetKind::ideal_gas;
  if (name == "sine_classifier") return DatasetKind::sine_classifier;
  throw ConfigError("unknown dataset kind '" + std::string(name) +
                    "' (expected circle_exp, parabola_exp, ideal_gas or sine_classifier)");
}

Dataset Dataset::slice(Eigen::Index begin, Eigen::Index count) const {
  Dataset d;
  d.inputs = inputs.middleCols(begin, count);
  d.targets = targets.middleCols(begin, count);
  d.input_ranges = input_ranges;
  d.target_ranges = target_ranges;
  return d;
}

std::vector<Range> ideal_gas_input_ranges() { return {{2.5e-2, 7.5e-2}, {1e5, 2e5}}; }

Range ideal_gas_temperature_range() {
  const auto r = ideal_gas_input_ranges();
  return {r[0].min * r[1].min / kGasConstant, r[0].max * r[1].max / kGasConstant};
}

Dataset generate_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("dataset size must be at least 1");
  SplitMix64 rng(seed);
  const auto cols = static_cast<Eigen::Index>(n);
  Dataset d;
  d.inputs.resize(2, cols);
  d.targets.resize(1, cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    double a = 0.0;
    double b = 0.0;
    double z = 0.0;
    switch (kind) {
      case DatasetKind::circle_exp:
        a = rng.uniform(-1.0, 1.0);
        b = rng.uniform(-1.0, 1.0);
        z = std::exp(a * a + b * b - 2.0);
        break;
      case DatasetKind::parabola_exp:
        a = rng.uniform(0.0, 1.0);
        b = rng.uniform(0.0, 1.0);
        z = std::exp(a * a + b - 2.0);
        break;
      case DatasetKind::ideal_gas:
        a = rng.uniform(2.5e-2, 7.5e-2);  // V [m^3]
        b = rng.uniform(1e5, 2e5);        // P [Pa]
        z = a * b / kGasConstant;         // T [K], one mole
        break;
      case DatasetKind::sine_classifier:
        a = rng.uniform(-std::numbers::pi, std::numbers::pi);
        b = rng.uniform(-1.0, 1.0);
        z = b >= std::sin(a) ? 1.0 : 0.0;
        break;
    }
    d.inputs(0, i) = a;
    d.inputs(1, i) = b;
    d.targets(0, i) = z;
  }
  if (kind == DatasetKind::ideal_gas) {
    return normalize(d, ideal_gas_input_ranges(), {ideal_gas_temperature_range()});
  }
  return d;
}

namespace {

std::vector<Range> row_ranges(const Matrix& m) {
  std::vector<Range> out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Range range{m.row(r).minCoeff(), m.row(r).maxCoeff()};
    if (!(range.max > range.min)) {
      throw ConfigError("cannot normalize: dimension " + std::to_string(r) + " is constant");
    }
    out.push_back(range);
  }
  return out;
}

Matrix apply_ranges(const Matrix& m, const std::vector<Range>& ranges) {
  if (ranges.size() != static_cast<std::size_t>(m.rows())) {
    throw ShapeError("number of ranges does not match the data dimension");
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Range& rg = ranges[static_cast<std::size_t>(r)];
    if (!(rg.max > rg.min)) throw ConfigError("normalization range is empty");
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = normalize_value(rg, m(r, c));
  }
  return out;
}

Matrix invert_ranges(const Matrix& m, const std::vector<Range>& ranges) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Range& rg = ranges[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = denormalize_value(rg, m(r, c));
  }
  return out;
}

// Ranges of already-normalized data, expressed in the original units.
std::vector<Range> compose(const std::vector<Range>& outer, const std::vector<Range>& inner) {
  if (outer.empty()) return inner;
  std::vector<Range> out;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    out.push_back({denormalize_value(outer[i], inner[i].min),
                   denormalize_value(outer[i], inner[i].max)});
  }
  return out;
}

}  // namespace

Dataset normalize(const Dataset& data, const std::vector<Range>& input_ranges,
                  const std::vector<Range>& target_ranges) {
  Dataset out;
  out.inputs = apply_ranges(data.inputs, input_ranges);
  out.targets = apply_ranges(data.targets, target_ranges);
  out.input_ranges = compose(data.input_ranges, input_ranges);
  out.target_ranges = compose(data.target_ranges, target_ranges);
  return out;
}

Dataset normalize(const Dataset& data) {
  return normalize(data, row_ranges(data.inputs), row_ranges(data.targets));
}

Dataset denormalize(const Dataset& data) {
  if (!data.normalized()) return data;
  Dataset out;
  out.inputs = invert_ranges(data.inputs, data.input_ranges);
  out.targets = invert_ranges(data.targets, data.target_ranges);
  return out;
}

namespace {

// Column-batched activation. Sigmoid goes through Eigen's vectorized exp in
// its overflow-free form; the rest fall back to the scalar definitions.
Matrix activate_block(Activation act, const Matrix& z) {
  if (act == Activation::sigmoid) {
    const Eigen::ArrayXXd e = (-z.array().abs()).exp();
    return (z.array() >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e));
  }
  return z.unaryExpr([act](double v) { return activate(act, v); });
}

struct ForwardCache {
  std::vector<Matrix> activations;  // a_0 = inputs, a_k = layer k output
  std::vector<Matrix> derivatives;  // F'(z_k)
};

ForwardCache forward_batch(const MlpModel& model, const Matrix& inputs) {
  ForwardCache c;
  c.activations.push_back(inputs);
  for (const auto& l : model.layers()) {
    Matrix z = l.weights * c.activations.back();
    z.colwise() += l.bias;
    Matrix a = activate_block(l.activation, z);
    Matrix d(z.rows(), z.cols());
    switch (l.activation) {
      // Derivatives recovered from the activations, saving a second exp.
      case Activation::sigmoid: d = a.array() * (1.0 - a.array()); break;
      case Activation::tanh: d = 1.0 - a.array().square(); break;
      default:
        d = z.unaryExpr([act = l.activation](double v) { return activate_derivative(act, v); });
    }
    c.activations.push_back(std::move(a));
    c.derivatives.push_back(std::move(d));
  }
  return c;
}

void check_batch(const MlpModel& model, const Dataset& batch) {
  if (batch.size() == 0) throw ConfigError("empty batch");
  if (batch.inputs.rows() != model.input_dim() || batch.targets.rows() != model.output_dim()) {
    throw ShapeError("batch dimensions do not match the model");
  }
}

double batch_mse(const MlpModel& model, const Matrix& inputs, const Matrix& targets) {
  // Fixed-size column chunks keep the temporaries small.
  constexpr Eigen::Index kChunk = 1024;
  double total = 0.0;
  for (Eigen::Index start = 0; start < inputs.cols(); start += kChunk) {
    const Eigen::Index count = std::min(kChunk, inputs.cols() - start);
    Matrix a = inputs.middleCols(start, count);
    for (const auto& l : model.layers()) {
      Matrix z = l.weights * a;
      z.colwise() += l.bias;
      a = activate_block(l.activation, z);
    }
    total += (a - targets.middleCols(start, count)).colwise().squaredNorm().sum();
  }
  return total / static_cast<double>(inputs.cols());
}

}  // namespace

double mse_loss(const MlpModel& model, const Dataset& batch) {
  check_batch(model, batch);
  return batch_mse(model, batch.inputs, batch.targets);
}

namespace {

Gradients backprop(const MlpModel& model, const Matrix& inputs, const Matrix& targets) {
  const ForwardCache c = forward_batch(model, inputs);
  const auto& layers = model.layers();
  const std::size_t n = layers.size();
  Gradients g;
  g.weights.resize(n);
  g.biases.resize(n);
  const double scale = 2.0 / static_cast<double>(inputs.cols());
  // dL/dz for the last layer
  Matrix delta = (scale * (c.activations.back() - targets)).cwiseProduct(c.derivatives.back());
  for (std::size_t k = n; k-- > 0;) {
    g.weights[k] = delta * c.activations[k].transpose();
    g.biases[k] = delta.rowwise().sum();
    if (k > 0) {
      delta = (layers[k].weights.transpose() * delta).cwiseProduct(c.derivatives[k - 1]);
    }
  }
  return g;
}

}  // namespace

Gradients mse_gradient(const MlpModel& model, const Dataset& batch) {
  check_batch(model, batch);
  return backprop(model, batch.inputs, batch.targets);
}

Architecture Architecture::parse(std::string_view widths, Activation act) {
  std::vector<Eigen::Index> w;
  std::stringstream ss{std::string(widths)};
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      w.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("invalid layer width '" + tok + "' in architecture '" +
                        std::string(widths) + "'");
    }
  }
  if (w.size() < 2) throw ConfigError("architecture needs at least an input and an output width");
  Architecture a;
  a.input_dim = w.front();
  for (std::size_t i = 1; i < w.size(); ++i) a.layers.push_back({w[i], act});
  return a;
}

std::string Architecture::to_string() const {
  std::string s = std::to_string(input_dim);
  for (const auto& l : layers) s += "," + std::to_string(l.width);
  return s;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

MlpModel initialize(const Architecture& arch, std::uint64_t seed) {
  if (arch.layers.empty()) throw ConfigError("architecture has no layers");
  SplitMix64 rng(seed);
  std::vector<Layer> layers;
  Eigen::Index fan_in = arch.input_dim;
  for (const auto& spec : arch.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + spec.width));
    Layer l;
    l.weights.resize(spec.width, fan_in);
    for (Eigen::Index r = 0; r < spec.width; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) l.weights(r, c) = rng.uniform(-limit, limit);
    l.bias = Vector::Zero(spec.width);
    l.activation = spec.activation;
    layers.push_back(std::move(l));
    fan_in = spec.width;
  }
  return MlpModel(std::move(layers));
}

TrainResult train(const Architecture& arch, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.inputs.rows() != arch.input_dim || data.targets.rows() != arch.layers.back().width) {
    throw ShapeError("architecture " + arch.to_string() + " does not match dataset dimensions " +
                     std::to_string(data.inputs.rows()) + " -> " +
                     std::to_string(data.targets.rows()));
  }
  const auto n_train = static_cast<Eigen::Index>(
      std::floor(cfg.split * static_cast<double>(data.size())));
  if (n_train < 1) throw ConfigError("training split is empty");
  const Eigen::Index n_val = data.size() - n_train;
  const Matrix train_x = data.inputs.leftCols(n_train);
  const Matrix train_y = data.targets.leftCols(n_train);
  const Matrix val_x = data.inputs.rightCols(n_val);
  const Matrix val_y = data.targets.rightCols(n_val);

  // Mutable parameters; the immutable model is rebuilt from them as needed.
  std::vector<Layer> params = initialize(arch, cfg.seed).layers();
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;
  for (const auto& l : params) {
    mw.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    vw.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    mb.push_back(Vector::Zero(l.bias.size()));
    vb.push_back(Vector::Zero(l.bias.size()));
  }

  // Shuffle stream independent of the initialization stream.
  SplitMix64 shuffle_rng(cfg.seed ^ 0xa5a5a5a5deadbeefULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const auto batch = static_cast<Eigen::Index>(cfg.batch_size);
  Matrix bx(train_x.rows(), std::min(batch, n_train));
  Matrix by(train_y.rows(), std::min(batch, n_train));
  std::size_t t = 0;
  std::vector<EpochLoss> history;
  history.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (Eigen::Index start = 0; start < n_train; start += batch) {
      const Eigen::Index count = std::min(batch, n_train - start);
      bx.resize(Eigen::NoChange, count);
      by.resize(Eigen::NoChange, count);
      for (Eigen::Index j = 0; j < count; ++j) {
        const auto src = order[static_cast<std::size_t>(start + j)];
        bx.col(j) = train_x.col(src);
        by.col(j) = train_y.col(src);
      }
      const MlpModel current(params);
      const Gradients g = backprop(current, bx, by);
      ++t;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
      for (std::size_t k = 0; k < params.size(); ++k) {
        mw[k] = cfg.beta1 * mw[k] + (1.0 - cfg.beta1) * g.weights[k];
        vw[k] = cfg.beta2 * vw[k] + (1.0 - cfg.beta2) * g.weights[k].cwiseAbs2();
        mb[k] = cfg.beta1 * mb[k] + (1.0 - cfg.beta1) * g.biases[k];
        vb[k] = cfg.beta2 * vb[k] + (1.0 - cfg.beta2) * g.biases[k].cwiseAbs2();
        params[k].weights.array() -= cfg.learning_rate * (mw[k].array() / c1) /
                                     ((vw[k].array() / c2).sqrt() + cfg.adam_eps);
        params[k].bias.array() -= cfg.learning_rate * (mb[k].array() / c1) /
                                  ((vb[k].array() / c2).sqrt() + cfg.adam_eps);
      }
    }
    bool finite = true;
    for (const auto& l : params) finite = finite && l.weights.allFinite() && l.bias.allFinite();
    if (!finite) throw TrainingDivergedError(epoch);
    const MlpModel current(params);
    EpochLoss e;
    e.epoch = epoch;
    e.train_mse = batch_mse(current, train_x, train_y);
    e.val_mse = n_val > 0 ? batch_mse(current, val_x, val_y) : 0.0;
    if (!std::isfinite(e.train_mse) || !std::isfinite(e.val_mse)) throw TrainingDivergedError(epoch);
    history.push_back(e);
  }
  return {MlpModel(std::move(params)), std::move(history)};
}

}  // namespace simec
