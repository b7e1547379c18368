#include "support.hpp"

#include "simec/errors.hpp"
#include "simec/explorer.hpp"
#include "simec/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace simec;
using simec::test::vec;

namespace {

std::shared_ptr<const MlpModel> strip_model() {
  Matrix w(1, 2);
  w << 1, 2;
  return std::make_shared<const MlpModel>(test::linear_model(w));
}

Box unit_square() { return Box(vec({0, 0}), vec({1, 1})); }

ExploreConfig strip_config() {
  ExploreConfig cfg;
  cfg.delta = 1e-3;
  cfg.tol_eps = 0.1;
  cfg.leaf_eps = 0.01;
  cfg.simec.delta = 1e-3;
  cfg.simec.max_steps = 2000;
  cfg.simec.boundary = BoundaryPolicy::halt;
  cfg.simec.hypercube = unit_square();
  return cfg;
}

}  // namespace

TEST_SUITE("explorer") {
  TEST_CASE("linear model step count is closed form") {
    const PullbackProvider provider(strip_model());
    const double delta = 1e-3, leaf_eps = 0.01;
    const auto s = simexp_step(provider, vec({0, 0}), std::nullopt, delta, leaf_eps, 1000, TraceConfig{});
    CHECK(s.status == ExploreStatus::reached);
    const auto expected = static_cast<std::size_t>(std::ceil(leaf_eps / (delta * std::sqrt(5.0))));
    CHECK(s.steps == expected);
    CHECK((s.direction - vec({1, 2}) / std::sqrt(5.0)).norm() <= 1e-12);
    CHECK(s.point[0] + 2 * s.point[1] == doctest::Approx(expected * delta * std::sqrt(5.0)));
    CHECK(s.length == doctest::Approx(expected * delta));
    CHECK(s.energy == doctest::Approx(5.0 * expected * delta));
  }

  TEST_CASE("zero leaf_eps returns immediately") {
    const PullbackProvider provider(strip_model());
    const auto s = simexp_step(provider, vec({0.3, 0.3}), std::nullopt, 1e-3, 0.0, 1000, TraceConfig{});
    CHECK(s.steps == 0);
    CHECK(s.point == vec({0.3, 0.3}));
    CHECK(s.status == ExploreStatus::reached);
  }

  TEST_CASE("exhaustion and boundary are reported distinctly") {
    const PullbackProvider provider(strip_model());
    const auto ex = simexp_step(provider, vec({0, 0}), std::nullopt, 1e-3, 1.0, 10, TraceConfig{});
    CHECK(ex.status == ExploreStatus::exhausted);
    CHECK(ex.steps == 10);

    TraceConfig halt;
    halt.boundary = BoundaryPolicy::halt;
    halt.hypercube = unit_square();
    const auto bd = simexp_step(provider, vec({0.99, 0.99}), std::nullopt, 1e-2, 1.0, 1000, halt);
    CHECK(bd.status == ExploreStatus::boundary);
    CHECK(unit_square().contains(bd.point));
  }

  TEST_CASE("orientation follows the previous direction") {
    const PullbackProvider provider(strip_model());
    const auto s = simexp_step(provider, vec({0.5, 0.5}), vec({-1, 0}), 1e-3, 0.01, 1000, TraceConfig{});
    CHECK(s.direction.dot(vec({-1, 0})) >= 0.0);
    CHECK(s.point[0] + 2 * s.point[1] < 1.5);
  }

  TEST_CASE("circle net overshoot is bounded by one step") {
    const auto& fit = test::full_circle_model();
    const PullbackProvider provider(fit.model);
    const Vector p = vec({0.2, 0.2});
    const double delta = 1e-4, leaf_eps = 0.01;
    const auto s = simexp_step(provider, p, std::nullopt, delta, leaf_eps, 1000000, TraceConfig{});
    REQUIRE(s.status == ExploreStatus::reached);
    const double change = std::abs(forward(*fit.model, s.point)[0] - forward(*fit.model, p)[0]);
    const double lam = spectral_decompose(provider.metric_at(s.point)).max_eigenvalue();
    CHECK(change >= leaf_eps);
    CHECK(change <= leaf_eps + 5 * delta * std::sqrt(lam));
  }

  TEST_CASE("strip foliation stays in the interval and covers it") {
    const auto model = strip_model();
    const auto res = preimage_interval(model, vec({0.5, 0.5}), strip_config());
    CHECK(res.center_output == doctest::Approx(1.5));
    REQUIRE(res.leaves.size() == res.transversal.size());
    CHECK(res.leaves.size() > 10);
    for (const auto& q : res.all_leaf_vertices()) {
      CHECK(std::abs(q[0] + 2 * q[1] - 1.5) <= 0.1 + 1e-3);
    }
    CHECK(res.covered_interval.first >= 1.4 - 1e-3);
    CHECK(res.covered_interval.second <= 1.6 + 1e-3);

    const GridSpec grid(unit_square(), 256);
    const auto strip = grid_preimage(model_field(*model), grid, 1.4, 1.6);
    const double radius = 2 * res.mean_leaf_spacing();
    CHECK(coverage_fraction(strip, res.all_leaf_vertices(), radius) >= 0.9);
  }

  TEST_CASE("transversal is monotone and passes the start once") {
    const auto res = preimage_interval(strip_model(), vec({0.5, 0.5}), strip_config());
    const auto& pts = res.transversal.points;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      CHECK(res.transversal.outputs[k][0] > res.transversal.outputs[k - 1][0]);
    }
    std::size_t hits = 0;
    for (const auto& p : pts) hits += (p == vec({0.5, 0.5})) ? 1 : 0;
    CHECK(hits == 1);
    CHECK(pts[res.center_index] == vec({0.5, 0.5}));
    CHECK(res.plus_stop == TransversalStop::interval_exceeded);
    CHECK(res.minus_stop == TransversalStop::interval_exceeded);
  }

  TEST_CASE("leaf order does not depend on the thread count") {
    auto cfg = strip_config();
    const auto one = preimage_interval(strip_model(), vec({0.5, 0.5}), cfg);
    cfg.jobs = 3;
    const auto three = preimage_interval(strip_model(), vec({0.5, 0.5}), cfg);
    REQUIRE(one.leaves.size() == three.leaves.size());
    for (std::size_t k = 0; k < one.leaves.size(); ++k) {
      CHECK(one.leaves[k].points == three.leaves[k].points);
    }
  }

  TEST_CASE("annulus leaves stay within the interval") {
    const auto& fit = test::full_circle_model();
    ExploreConfig cfg;
    cfg.delta = 1e-4;
    cfg.tol_eps = 0.05;
    cfg.leaf_eps = 0.01;
    cfg.simec.delta = 1e-4;
    cfg.simec.max_steps = 12000;
    cfg.simec.boundary = BoundaryPolicy::halt;
    cfg.simec.hypercube = unit_square();
    const auto res = preimage_interval(fit.model, vec({0.2, 0.2}), cfg);
    CHECK(res.leaves.size() >= 5);
    for (const auto& leaf : res.leaves) {
      for (const auto& o : leaf.outputs) {
        CHECK(std::abs(o[0] - res.center_output) <= 0.05 + 1e-3);
      }
    }
  }

  TEST_CASE("allow_outside continues past the hypercube") {
    auto cfg = strip_config();
    cfg.tol_eps = 0.9;
    cfg.leaf_eps = 0.1;
    const auto inside = preimage_interval(strip_model(), vec({0.5, 0.8}), cfg);
    CHECK(inside.plus_stop == TransversalStop::boundary);
    cfg.allow_outside = true;
    const auto outside = preimage_interval(strip_model(), vec({0.5, 0.8}), cfg);
    CHECK(outside.plus_stop == TransversalStop::interval_exceeded);
    CHECK(outside.transversal.size() > inside.transversal.size());
    const Box outer = unit_square().inflated(0.5);
    for (const auto& q : outside.all_leaf_vertices()) CHECK(outer.contains(q));
  }

  TEST_CASE("configuration validation") {
    auto cfg = strip_config();
    cfg.leaf_eps = 0.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(preimage_interval(strip_model(), vec({0.5, 0.5}), cfg), ConfigError);
    cfg = strip_config();
    CHECK_THROWS_AS(preimage_interval(strip_model(), vec({1.5, 0.5}), cfg), ConfigError);
    cfg.simec.hypercube.reset();
    cfg.simec.boundary = BoundaryPolicy::ignore;
    cfg.allow_outside = true;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    const auto two_out = std::make_shared<const MlpModel>(test::linear_model(Matrix::Identity(2, 2)));
    CHECK_THROWS_AS(preimage_interval(two_out, vec({0.5, 0.5}), strip_config()), ShapeError);
  }
}
