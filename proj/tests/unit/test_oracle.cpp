#include "support.hpp"

#include "simec/errors.hpp"
#include "simec/oracle.hpp"
#include "simec/trainer.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace simec;
using simec::test::vec;

namespace {

Box square(double lo, double hi) { return Box(vec({lo, lo}), vec({hi, hi})); }

std::vector<Vector> circle_points(double r, int n) {
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * M_PI * i / n;
    out.push_back(vec({r * std::cos(t), r * std::sin(t)}));
  }
  return out;
}

std::vector<Vector> random_set(SplitMix64& rng) {
  std::vector<Vector> out(1 + rng.below(12));
  for (auto& p : out) p = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("finite differences of affine and quadratic maps") {
    Matrix a(2, 3);
    a << 1, -2, 0.5, 3, 4, -1;
    // Rounding of f itself contributes about eps * |f| / h, so keep |f| of order one.
    const auto f = [&](const Vector& x) -> Vector { return a * x + vec({0.1, -0.2}); };
    CHECK((fd_jacobian(f, vec({0.03, -0.2, 0.5})) - a).cwiseAbs().maxCoeff() <= 1e-10);
    const auto sq = [](const Vector& x) -> Vector { return x.cwiseProduct(x); };
    CHECK(std::abs(fd_jacobian(sq, vec({3}))(0, 0) - 6.0) <= 1e-9);
  }

  TEST_CASE("finite differences agree with the network jacobian") {
    const auto model = test::small_circle_model();
    const Vector x = vec({-0.4, 0.6});
    const Matrix fd = fd_jacobian([&](const Vector& v) { return forward(*model, v); }, x);
    const Matrix j = network_jacobian(*model, x);
    CHECK((fd - j).cwiseAbs().maxCoeff() / j.cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("non-finite values are rejected") {
    const auto bad = [](const Vector& x) -> Vector { return vec({std::log(x[0])}); };
    CHECK_THROWS_AS(fd_jacobian(bad, vec({0.0})), NumericalError);
  }

  TEST_CASE("grid geometry") {
    const GridSpec g(square(-1, 1), 5);
    CHECK(g.spacing(0) == doctest::Approx(0.5));
    CHECK(g.cell_diagonal() == doctest::Approx(0.5 * std::sqrt(2.0)));
    CHECK(g.node(0, 0) == vec({-1, -1}));
    CHECK(g.node(4, 4) == vec({1, 1}));
    CHECK_THROWS_AS(GridSpec(square(0, 1), 1), ConfigError);
    CHECK_THROWS_AS(GridSpec(Box(vec({0}), vec({1})), 8), ConfigError);
  }

  TEST_CASE("circle contour") {
    const GridSpec grid(square(-1, 1), 512);
    const auto f = [](double x, double y) { return x * x + y * y; };
    const auto c = marching_contour(f, grid, 0.125);
    REQUIRE_FALSE(c.empty());
    CHECK(c.level == 0.125);
    const double r = std::sqrt(0.125);
    CHECK(hausdorff(c.vertices(), circle_points(r, 4000)) <= 2 * grid.cell_diagonal());
    double dev = 0.0;
    for (const auto& pl : c.polylines) {
      CHECK((pl.front() - pl.back()).norm() == 0.0);
      for (const auto& v : pl) dev = std::max(dev, std::abs(v.norm() - r));
    }
    CHECK(dev <= 2 * 2.0 / 512);
    CHECK(c.polylines.size() == 1);
  }

  TEST_CASE("levels outside the sampled range give nothing") {
    const GridSpec grid(square(-1, 1), 64);
    const auto f = [](double x, double y) { return x * x + y * y; };
    CHECK(marching_contour(f, grid, -0.5).empty());
    CHECK(marching_contour(f, grid, 5.0).empty());
  }

  TEST_CASE("sine boundary contour") {
    const GridSpec grid(Box(vec({-M_PI, -1}), vec({M_PI, 1})), 512);
    const auto f = [](double x, double y) { return y - std::sin(x); };
    const auto c = marching_contour(f, grid, 0.0);
    REQUIRE_FALSE(c.empty());
    double worst = 0.0;
    for (const auto& v : c.vertices()) worst = std::max(worst, std::abs(v[1] - std::sin(v[0])));
    CHECK(worst <= 1e-4);
    std::vector<Vector> curve;
    for (int i = 0; i <= 2000; ++i) {
      const double x = -M_PI + 2 * M_PI * i / 2000;
      curve.push_back(vec({x, std::sin(x)}));
    }
    CHECK(hausdorff(c.vertices(), curve) <= 2 * grid.cell_diagonal());
  }

  TEST_CASE("saddle cells follow the center value") {
    // One cell with f = x y: inside corners are bottom-left and top-right.
    const GridSpec grid(square(-1, 1), 2);
    const auto f = [](double x, double y) { return x * y; };
    const auto high = marching_contour(f, grid, 0.1);  // center 0 is outside
    REQUIRE(high.polylines.size() == 2);
    for (const auto& pl : high.polylines) {
      REQUIRE(pl.size() == 2);
      CHECK((pl[0][0] + pl[0][1] > 0) == (pl[1][0] + pl[1][1] > 0));
    }
    const auto low = marching_contour(f, grid, -0.1);  // center 0 is inside
    REQUIRE(low.polylines.size() == 2);
    for (const auto& pl : low.polylines) {
      REQUIRE(pl.size() == 2);
      CHECK((pl[0][0] - pl[0][1] > 0) == (pl[1][0] - pl[1][1] > 0));
    }
  }

  TEST_CASE("contour vertices interpolate the level") {
    const GridSpec grid(square(0, 1), 64);
    const auto f = [](double x, double y) { return x + 2 * y; };
    const auto c = marching_contour(f, grid, 1.3);
    for (const auto& v : c.vertices()) CHECK(std::abs(f(v[0], v[1]) - 1.3) <= 1e-12);
  }

  TEST_CASE("grid preimage of a strip") {
    const GridSpec grid(square(0, 1), 101);
    const auto f = [](double x, double y) { return x + 2 * y; };
    const auto pts = grid_preimage(f, grid, 1.4, 1.6);
    CHECK_FALSE(pts.empty());
    std::size_t expected = 0;
    for (std::size_t i = 0; i < 101; ++i) {
      for (std::size_t j = 0; j < 101; ++j) {
        const Vector n = grid.node(i, j);
        const double v = f(n[0], n[1]);
        expected += (v >= 1.4 && v <= 1.6) ? 1 : 0;
      }
    }
    CHECK(pts.size() == expected);
    for (const auto& p : pts) {
      CHECK(p[0] + 2 * p[1] >= 1.4);
      CHECK(p[0] + 2 * p[1] <= 1.6);
    }
    CHECK_THROWS_AS(grid_preimage(f, grid, 1.6, 1.4), ConfigError);
  }

  TEST_CASE("grid preimage is monotone in the interval") {
    const GridSpec grid(square(-1, 1), 64);
    const auto f = [](double x, double y) { return std::exp(x * x + y * y - 2); };
    SplitMix64 rng(31);
    for (int t = 0; t < 20; ++t) {
      const double lo = rng.uniform(0.1, 0.3), hi = lo + rng.uniform(0, 0.2);
      const double lo2 = lo - rng.uniform(0, 0.05), hi2 = hi + rng.uniform(0, 0.05);
      const auto inner = grid_preimage(f, grid, lo, hi);
      const auto outer = grid_preimage(f, grid, lo2, hi2);
      CHECK(inner.size() <= outer.size());
      CHECK((inner.empty() || directed_hausdorff(inner, outer) == 0.0));
    }
  }

  TEST_CASE("hausdorff examples") {
    const std::vector<Vector> a{vec({0, 0}), vec({1, 0})};
    CHECK(hausdorff(a, a) == 0.0);
    CHECK(hausdorff({vec({0, 0})}, {vec({3, 4})}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(directed_hausdorff({vec({0, 0})}, {vec({0, 0}), vec({10, 0})}) == 0.0);
    CHECK(hausdorff({vec({0, 0})}, {vec({0, 0}), vec({10, 0})}) == 10.0);
    CHECK_THROWS_AS(hausdorff({}, a), ConfigError);
    CHECK_THROWS_AS(hausdorff(a, {}), ConfigError);
  }

  TEST_CASE("hausdorff is symmetric and satisfies the triangle inequality") {
    SplitMix64 rng(2024);
    for (int t = 0; t < 100; ++t) {
      const auto a = random_set(rng), b = random_set(rng), c = random_set(rng);
      const double ab = hausdorff(a, b), ba = hausdorff(b, a);
      CHECK(ab == ba);
      CHECK(ab <= hausdorff(a, c) + hausdorff(c, b) + 1e-12);
    }
  }

  TEST_CASE("point to contour distances") {
    ContourSet c;
    c.polylines.push_back({vec({0, 0}), vec({1, 0}), vec({1, 1})});
    CHECK(distance_to_contour(vec({0.5, 0.3}), c) == doctest::Approx(0.3));
    CHECK(distance_to_contour(vec({2, 0.5}), c) == doctest::Approx(1.0));
    CHECK(distance_to_contour(vec({-3, 4}), c) == doctest::Approx(5.0));
    CHECK(max_distance_to_contour({vec({0.5, 0}), vec({0.5, 0.3})}, c) == doctest::Approx(0.3));
    CHECK(c.vertex_count() == 3);
  }

  TEST_CASE("restriction, bucket index and coverage") {
    const std::vector<Vector> pts{vec({0.1, 0.1}), vec({0.5, 0.5}), vec({2, 2})};
    CHECK(restrict_to(pts, square(0, 1)).size() == 2);

    const PointIndex idx(pts, 0.2);
    CHECK(idx.any_within(vec({0.6, 0.5}), 0.15));
    CHECK_FALSE(idx.any_within(vec({0.8, 0.5}), 0.2));
    CHECK(idx.any_within(vec({-0.05, 0.1}), 0.2));

    SplitMix64 rng(77);
    std::vector<Vector> cloud(300);
    for (auto& p : cloud) p = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const PointIndex big(cloud, 0.1);
    for (int t = 0; t < 200; ++t) {
      const Vector q = vec({rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)});
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : cloud) best = std::min(best, (p - q).norm());
      CHECK(big.any_within(q, 0.1) == (best <= 0.1));
    }

    const std::vector<Vector> targets{vec({0, 0}), vec({1, 0}), vec({5, 5}), vec({0.05, 0})};
    CHECK(coverage_fraction(targets, {vec({0, 0}), vec({1, 0.01})}, 0.1) == doctest::Approx(0.75));

    const GridSpec grid(square(0, 1), 11);
    const double cell = 0.01;
    CHECK(covered_area(grid, {vec({0.5, 0.5})}, 0.05) == doctest::Approx(cell));
    CHECK(covered_area(grid, {vec({0.5, 0.5})}, 0.10001) == doctest::Approx(5 * cell));
  }

  TEST_CASE("model field evaluates single-output models") {
    const auto model = test::small_circle_model();
    const auto f = model_field(*model);
    CHECK(f(0.2, -0.3) == forward(*model, vec({0.2, -0.3}))[0]);
    const auto two = test::linear_model(Matrix::Identity(2, 2));
    CHECK_THROWS_AS(model_field(two), ShapeError);
  }
}
