#include "support.hpp"

#include "simec/errors.hpp"
#include "simec/nn.hpp"
#include "simec/oracle.hpp"
#include "simec/trainer.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace simec;
using simec::test::vec;

TEST_SUITE("nn") {
  TEST_CASE("activation derivatives are positive") {
    for (auto a : {Activation::sigmoid, Activation::tanh, Activation::softplus, Activation::identity}) {
      for (double x : {-30.0, -2.0, 0.0, 0.7, 30.0}) {
        CHECK(activate_derivative(a, x) > 0.0);
      }
    }
  }

  TEST_CASE("activation names") {
    CHECK(parse_activation("softplus") == Activation::softplus);
    CHECK(to_string(Activation::tanh) == "tanh");
    CHECK_THROWS_AS(parse_activation("relu"), ModelFormatError);
    CHECK_THROWS_AS(parse_activation("gelu"), ModelFormatError);
  }

  TEST_CASE("forward examples") {
    const auto m = test::linear_model(test::example3_weights());
    CHECK((forward(m, vec({1, 0, 0})) - vec({1, 3})).norm() == 0.0);

    const auto id = test::linear_model(Matrix::Identity(2, 2));
    CHECK((forward(id, vec({0.3, -0.7})) - vec({0.3, -0.7})).norm() == 0.0);

    MlpModel sig({Layer{Matrix::Ones(1, 1), Vector::Zero(1), Activation::sigmoid}});
    CHECK(forward(sig, vec({0}))[0] == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("dimension mismatch is rejected") {
    const auto m = test::linear_model(test::example3_weights());
    CHECK_THROWS_AS(forward(m, vec({1, 2})), ShapeError);
    CHECK_THROWS_AS(network_jacobian(m, vec({1, 2, 3, 4})), ShapeError);
    CHECK_THROWS_AS(layer_jacobian(m.layers()[0], vec({1})), ShapeError);
  }

  TEST_CASE("model construction checks the chain") {
    CHECK_THROWS_AS(MlpModel(std::vector<Layer>{}), ModelFormatError);
    Layer a{Matrix::Ones(3, 2), Vector::Zero(3), Activation::sigmoid};
    Layer b{Matrix::Ones(1, 4), Vector::Zero(1), Activation::sigmoid};
    CHECK_THROWS_AS(MlpModel({a, b}), ModelFormatError);
    Layer bad_bias{Matrix::Ones(3, 2), Vector::Zero(2), Activation::sigmoid};
    CHECK_THROWS_AS(MlpModel({bad_bias}), ModelFormatError);
  }

  TEST_CASE("layer jacobian examples") {
    Matrix a(2, 3);
    a << 0.5, -1, 2, 3, 0.25, -4;
    Layer lin{a, vec({1, -1}), Activation::identity};
    CHECK((layer_jacobian(lin, vec({0.1, 0.2, 0.3})) - a).norm() == 0.0);

    Layer sig{Matrix::Ones(1, 1), Vector::Zero(1), Activation::sigmoid};
    CHECK(layer_jacobian(sig, vec({0}))(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("random sigmoid layer matches finite differences") {
    SplitMix64 rng(3);
    Matrix a(4, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-2, 2);
    Vector b(4);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-1, 1);
    const Layer layer{a, b, Activation::sigmoid};
    const MlpModel m({layer});
    for (int t = 0; t < 20; ++t) {
      const Vector x = vec({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      const Matrix j = layer_jacobian(layer, x);
      const Matrix fd = fd_jacobian([&](const Vector& v) { return forward(m, v); }, x);
      CHECK((j - fd).cwiseAbs().maxCoeff() / j.cwiseAbs().maxCoeff() <= 1e-6);
    }
  }

  TEST_CASE("network jacobian of linear chains") {
    Matrix a1(3, 2), a2(2, 3);
    a1 << 1, 2, -1, 0.5, 3, 1;
    a2 << 2, 0, 1, -1, 1, 4;
    MlpModel m({Layer{a1, vec({1, 2, 3}), Activation::identity},
                Layer{a2, vec({0, 1}), Activation::identity}});
    for (const auto& x : {vec({0, 0}), vec({1.5, -2}), vec({100, 7})}) {
      CHECK((network_jacobian(m, x) - a2 * a1).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto ex3 = test::linear_model(test::example3_weights());
    CHECK((network_jacobian(ex3, vec({4, -2, 9})) - test::example3_weights()).norm() == 0.0);
  }

  TEST_CASE("trained network jacobian matches finite differences") {
    const auto model = test::small_circle_model();
    SplitMix64 rng(99);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vector x = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      const Matrix j = network_jacobian(*model, x);
      const Matrix fd = fd_jacobian([&](const Vector& v) { return forward(*model, v); }, x);
      worst = std::max(worst, (j - fd).cwiseAbs().maxCoeff() / j.cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("evaluate agrees with forward and network_jacobian") {
    const auto model = test::small_circle_model();
    const Vector x = vec({0.3, -0.4});
    const auto e = evaluate(*model, x);
    CHECK((e.output - forward(*model, x)).norm() == 0.0);
    CHECK((e.jacobian - network_jacobian(*model, x)).norm() == 0.0);
  }

  TEST_CASE("identity-activation models are affine") {
    SplitMix64 rng(5);
    Matrix a1(4, 3), a2(2, 4);
    for (Eigen::Index i = 0; i < a1.size(); ++i) a1.data()[i] = rng.uniform(-1, 1);
    for (Eigen::Index i = 0; i < a2.size(); ++i) a2.data()[i] = rng.uniform(-1, 1);
    MlpModel m({Layer{a1, vec({0.1, 0.2, 0.3, 0.4}), Activation::identity},
                Layer{a2, vec({-1, 1}), Activation::identity}});
    const Vector f0 = forward(m, Vector::Zero(3));
    auto lin = [&](const Vector& x) -> Vector { return forward(m, x) - f0; };
    for (int t = 0; t < 50; ++t) {
      Vector u(3), v(3);
      for (int i = 0; i < 3; ++i) {
        u[i] = rng.uniform(-1, 1);
        v[i] = rng.uniform(-1, 1);
      }
      const double s = rng.uniform(-2, 2);
      CHECK((lin(u + s * v) - lin(u) - s * lin(v)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("forward and jacobian are pure") {
    const auto model = test::small_circle_model();
    const Vector x = vec({0.11, 0.77});
    const Vector y1 = forward(*model, x), y2 = forward(*model, x);
    const Matrix j1 = network_jacobian(*model, x), j2 = network_jacobian(*model, x);
    CHECK(std::memcmp(y1.data(), y2.data(), sizeof(double) * y1.size()) == 0);
    CHECK(std::memcmp(j1.data(), j2.data(), sizeof(double) * j1.size()) == 0);
  }

  TEST_CASE("full rank check") {
    CHECK(check_full_rank(test::linear_model(test::example3_weights())).pass);

    Matrix rep(2, 2);
    rep << 1, 1, 1, 1;
    const auto r = check_full_rank(test::linear_model(rep));
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.layers[0].pass);

    Matrix tiny(2, 2);
    tiny << 1, 0, 0, 1e-15;
    const auto t = check_full_rank(test::linear_model(tiny), 1e-10);
    CHECK_FALSE(t.pass);
    CHECK(t.layers[0].sigma_max == doctest::Approx(1.0));
  }

  TEST_CASE("model json round trip") {
    const auto model = test::small_circle_model();
    const auto back = model_from_json(model_to_json(*model));
    REQUIRE(back.layers().size() == model->layers().size());
    for (std::size_t k = 0; k < back.layers().size(); ++k) {
      CHECK(back.layers()[k].weights == model->layers()[k].weights);
      CHECK(back.layers()[k].bias == model->layers()[k].bias);
      CHECK(back.layers()[k].activation == model->layers()[k].activation);
    }
  }

  TEST_CASE("model json rejects bad input") {
    CHECK_THROWS_AS(model_from_json("not json"), ModelFormatError);
    CHECK_THROWS_AS(model_from_json(R"({"layers":[]})"), ModelFormatError);
    CHECK_THROWS_AS(
        model_from_json(R"({"layers":[{"weights":[[1]],"bias":[0],"activation":"relu"}]})"),
        ModelFormatError);
    CHECK_THROWS_AS(
        model_from_json(R"({"layers":[{"weights":[[1,2],[3]],"bias":[0,0],"activation":"tanh"}]})"),
        ModelFormatError);
  }
}
