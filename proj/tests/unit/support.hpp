#pragma once

// Shared fixtures for the unit tests.

#include "simec/nn.hpp"
#include "simec/trainer.hpp"

#include <memory>

namespace simec::test {

/// Single identity-activation layer with the given weights and zero bias.
inline MlpModel linear_model(const Matrix& w) {
  return MlpModel({Layer{w, Vector::Zero(w.rows()), Activation::identity}});
}

inline Matrix example3_weights() {
  Matrix a(2, 3);
  a << 1, 2, 2, 3, 1, 5;
  return a;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// 2-5-5-1 sigmoid net briefly trained on circle_exp: enough structure for
/// Jacobian and metric checks, cheap to build.
inline std::shared_ptr<const MlpModel> small_circle_model() {
  static const auto model = [] {
    TrainConfig cfg;
    cfg.epochs = 300;
    const auto data = generate_dataset(DatasetKind::circle_exp, 1000, 11);
    return std::make_shared<const MlpModel>(
        train(Architecture::parse("2,5,5,1"), data, cfg).model);
  }();
  return model;
}

/// The full circle_exp setup: 2000 samples, 5000 epochs, batch 512.
struct CircleFit {
  std::shared_ptr<const MlpModel> model;
  double train_mse = 0.0;
};

inline const CircleFit& full_circle_model() {
  static const CircleFit fit = [] {
    TrainConfig cfg;
    cfg.epochs = 5000;
    cfg.batch_size = 512;
    cfg.seed = 7;
    const auto data = generate_dataset(DatasetKind::circle_exp, 2000, 7);
    auto res = train(Architecture::parse("2,5,5,1"), data, cfg);
    return CircleFit{std::make_shared<const MlpModel>(std::move(res.model)),
                     res.history.back().train_mse};
  }();
  return fit;
}

}  // namespace simec::test
