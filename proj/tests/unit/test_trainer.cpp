#include "support.hpp"

#include "simec/errors.hpp"
#include "simec/trainer.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace simec;
using simec::test::vec;

namespace {

Dataset make_data(const Matrix& in, const Matrix& out) {
  Dataset d;
  d.inputs = in;
  d.targets = out;
  return d;
}

double param_loss(MlpModel m, std::size_t layer, bool weight, Eigen::Index idx, double value,
                  const Dataset& batch) {
  auto layers = m.layers();
  if (weight) {
    layers[layer].weights.data()[idx] = value;
  } else {
    layers[layer].bias[idx] = value;
  }
  return mse_loss(MlpModel(std::move(layers)), batch);
}

bool same_model(const MlpModel& a, const MlpModel& b) {
  if (a.layers().size() != b.layers().size()) return false;
  for (std::size_t k = 0; k < a.layers().size(); ++k) {
    const auto& la = a.layers()[k];
    const auto& lb = b.layers()[k];
    if (std::memcmp(la.weights.data(), lb.weights.data(), sizeof(double) * la.weights.size()) != 0)
      return false;
    if (std::memcmp(la.bias.data(), lb.bias.data(), sizeof(double) * la.bias.size()) != 0)
      return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("splitmix64 is deterministic and in range") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      const double u = a.uniform();
      CHECK(u == b.uniform());
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      CHECK(a.below(7) < 7);
      b.below(7);
    }
    SplitMix64 z(0);
    CHECK(z.next() == 0xe220a8397b1dcdafULL);
  }

  TEST_CASE("dataset formulas") {
    const auto c = generate_dataset(DatasetKind::circle_exp, 500, 1);
    CHECK(c.size() == 500);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double x = c.inputs(0, i), y = c.inputs(1, i);
      CHECK(std::abs(x) < 1.0);
      CHECK(std::abs(y) < 1.0);
      CHECK(c.targets(0, i) == doctest::Approx(std::exp(x * x + y * y - 2)).epsilon(1e-15));
    }
    CHECK(std::exp(-2.0) == doctest::Approx(0.1353353).epsilon(1e-6));

    const auto p = generate_dataset(DatasetKind::parabola_exp, 200, 2);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double x = p.inputs(0, i), y = p.inputs(1, i);
      CHECK(x >= 0.0);
      CHECK(y < 1.0);
      CHECK(p.targets(0, i) == doctest::Approx(std::exp(x * x + y - 2)).epsilon(1e-15));
    }

    const auto s = generate_dataset(DatasetKind::sine_classifier, 500, 3);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double x = s.inputs(0, i), y = s.inputs(1, i);
      CHECK(std::abs(x) <= M_PI);
      CHECK(s.targets(0, i) == (y >= std::sin(x) ? 1.0 : 0.0));
    }
  }

  TEST_CASE("ideal gas ranges and normalization") {
    const Range t = ideal_gas_temperature_range();
    CHECK(t.min == doctest::Approx(300.7).epsilon(0.5 / 300.7));
    CHECK(std::abs(t.max - 1804.2) <= 0.2);
    const auto g = generate_dataset(DatasetKind::ideal_gas, 1000, 4);
    REQUIRE(g.normalized());
    CHECK(g.inputs.minCoeff() >= 0.0);
    CHECK(g.inputs.maxCoeff() <= 1.0);
    CHECK(g.targets.minCoeff() >= 0.0);
    CHECK(g.targets.maxCoeff() <= 1.0);
    const auto raw = denormalize(g);
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      const double v = raw.inputs(0, i), pr = raw.inputs(1, i);
      CHECK(raw.targets(0, i) == doctest::Approx(pr * v / kGasConstant).epsilon(1e-12));
    }
    // T_A from the quoted range.
    CHECK(normalize_value(Range{300.7, 1804.2}, 631.77) == doctest::Approx(0.2202).epsilon(1e-3));
    CHECK(normalize_value(t, 631.77) == doctest::Approx(0.2202).epsilon(1e-3));
  }

  TEST_CASE("normalize maps to the unit interval and round-trips") {
    Matrix in(2, 4), out(1, 4);
    in << 1, 2, 3, 5, -4, 0, 4, 2;
    out << 10, 20, 15, 30;
    const auto d = make_data(in, out);
    const auto n = normalize(d);
    CHECK(n.inputs.row(0).minCoeff() == 0.0);
    CHECK(n.inputs.row(0).maxCoeff() == 1.0);
    CHECK(n.targets(0, 0) == 0.0);
    CHECK(n.targets(0, 3) == 1.0);
    const auto back = denormalize(n);
    CHECK((back.inputs - in).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.targets - out).cwiseAbs().maxCoeff() <= 1e-12);
    const auto twice = normalize(n);
    CHECK((twice.inputs - n.inputs).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(twice.input_ranges[0].max == 5.0);

    Matrix flat(1, 3);
    flat << 2, 2, 2;
    CHECK_THROWS_AS(normalize(make_data(flat, out.leftCols(3))), ConfigError);
  }

  TEST_CASE("mse examples") {
    const MlpModel half({Layer{Matrix::Zero(1, 1), Vector::Zero(1), Activation::sigmoid}});
    Matrix in(1, 1), out(1, 1);
    in << 3;
    out << 0;
    CHECK(mse_loss(half, make_data(in, out)) == doctest::Approx(0.25).epsilon(1e-15));
    out << 0.5;
    CHECK(mse_loss(half, make_data(in, out)) == 0.0);

    const auto id = test::linear_model(Matrix::Identity(1, 1));
    Matrix in2(1, 2), out2(1, 2);
    in2 << 0.1, 0.3;
    out2 << 0, 0;
    CHECK(mse_loss(id, make_data(in2, out2)) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK_THROWS_AS(mse_loss(id, make_data(Matrix(1, 0), Matrix(1, 0))), ConfigError);
    CHECK_THROWS_AS(mse_loss(id, make_data(Matrix::Zero(2, 2), out2)), ShapeError);
  }

  TEST_CASE("backprop matches finite differences") {
    const auto arch = Architecture::parse("2,3,1");
    const auto data = generate_dataset(DatasetKind::circle_exp, 64, 9);
    auto check_model = [&](const MlpModel& m) {
      const auto grad = mse_gradient(m, data);
      SplitMix64 rng(17);
      for (int t = 0; t < 10; ++t) {
        const std::size_t layer = rng.below(m.layers().size());
        const bool weight = rng.below(2) == 0;
        const auto& l = m.layers()[layer];
        const Eigen::Index idx = static_cast<Eigen::Index>(
            rng.below(static_cast<std::uint64_t>(weight ? l.weights.size() : l.bias.size())));
        const double v = weight ? l.weights.data()[idx] : l.bias[idx];
        const double h = 1e-6;
        const double fd = (param_loss(m, layer, weight, idx, v + h, data) -
                           param_loss(m, layer, weight, idx, v - h, data)) /
                          (2 * h);
        const double g = weight ? grad.weights[layer].data()[idx] : grad.biases[layer][idx];
        CHECK(std::abs(g - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
      }
    };
    check_model(initialize(arch, 5));
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 16;
    check_model(train(arch, data, cfg).model);
  }

  TEST_CASE("glorot initialization bounds") {
    const auto m = initialize(Architecture::parse("2,5,5,1"), 3);
    for (const auto& l : m.layers()) {
      const double lim = std::sqrt(6.0 / static_cast<double>(l.in_dim() + l.out_dim()));
      CHECK(l.weights.cwiseAbs().maxCoeff() <= lim);
      CHECK(l.bias.isZero());
    }
  }

  TEST_CASE("constant targets are fitted") {
    const auto base = generate_dataset(DatasetKind::circle_exp, 200, 6);
    const auto data = make_data(base.inputs, Matrix::Constant(1, 200, 0.5));
    TrainConfig cfg;
    cfg.epochs = 500;
    cfg.batch_size = 32;
    cfg.learning_rate = 1e-2;
    const auto res = train(Architecture::parse("2,1"), data, cfg);
    CHECK(res.history.back().train_mse < 1e-6);
  }

  TEST_CASE("training is bit-deterministic and finite") {
    const auto data = generate_dataset(DatasetKind::parabola_exp, 400, 8);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.batch_size = 64;
    const auto a = train(Architecture::parse("2,4,1"), data, cfg);
    const auto b = train(Architecture::parse("2,4,1"), data, cfg);
    CHECK(same_model(a.model, b.model));
    REQUIRE(a.history.size() == 40);
    for (std::size_t e = 0; e < a.history.size(); ++e) {
      CHECK(a.history[e].train_mse == b.history[e].train_mse);
      CHECK(std::isfinite(a.history[e].train_mse));
      CHECK(std::isfinite(a.history[e].val_mse));
    }
    cfg.seed = 8;
    CHECK_FALSE(same_model(a.model, train(Architecture::parse("2,4,1"), data, cfg).model));
  }

  TEST_CASE("every shipped dataset trains to finite losses") {
    for (auto kind : {DatasetKind::circle_exp, DatasetKind::parabola_exp, DatasetKind::ideal_gas,
                      DatasetKind::sine_classifier}) {
      const auto data = generate_dataset(kind, 300, 1);
      TrainConfig cfg;
      cfg.epochs = 20;
      cfg.batch_size = 32;
      const auto res = train(Architecture::parse("2,5,1"), data, cfg);
      for (const auto& e : res.history) CHECK(std::isfinite(e.train_mse));
    }
  }

  TEST_CASE("divergence is reported with the epoch") {
    const auto base = generate_dataset(DatasetKind::circle_exp, 64, 6);
    const auto data = make_data(base.inputs, Matrix::Constant(1, 64, 1e300));
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 16;
    Architecture arch = Architecture::parse("2,1", Activation::identity);
    CHECK_THROWS_AS(train(arch, data, cfg), TrainingDivergedError);
  }

  TEST_CASE("trained circle net fits the surface") {
    const auto& fit = test::full_circle_model();
    CHECK(fit.train_mse <= 1e-3);
    const double expected = std::exp(0.25 * 0.25 * 2 - 2);
    CHECK(expected == doctest::Approx(0.1534).epsilon(1e-3));
    const double got = forward(*fit.model, vec({0.25, 0.25}))[0];
    CHECK(std::abs(got - expected) <= 0.02);
  }

  TEST_CASE("architecture and config validation") {
    const auto a = Architecture::parse("2,5,10,10,5,1");
    CHECK(a.input_dim == 2);
    CHECK(a.layers.size() == 5);
    CHECK(a.to_string() == "2,5,10,10,5,1");
    CHECK_THROWS_AS(Architecture::parse("2"), ConfigError);
    CHECK_THROWS_AS(Architecture::parse("2,x,1"), ConfigError);
    TrainConfig cfg;
    cfg.split = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.split = 0.5;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(parse_dataset_kind("mnist"), ConfigError);
    const auto data = generate_dataset(DatasetKind::circle_exp, 10, 1);
    CHECK_THROWS_AS(train(Architecture::parse("3,1"), data, TrainConfig{}), ShapeError);
  }
}
