// Microbenchmarks for the per-step kernels and one training epoch.

#include "simec/explorer.hpp"
#include "simec/metric.hpp"
#include "simec/oracle.hpp"
#include "simec/tracer.hpp"
#include "simec/trainer.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

using namespace simec;

std::shared_ptr<const MlpModel> circle_model() {
  static const auto model = [] {
    TrainConfig cfg;
    cfg.epochs = 200;
    const auto data = generate_dataset(DatasetKind::circle_exp, 2000, 7);
    return std::make_shared<const MlpModel>(train(Architecture::parse("2,5,5,1"), data, cfg).model);
  }();
  return model;
}

Vector point(double x, double y) {
  Vector p(2);
  p << x, y;
  return p;
}

void BM_NetworkJacobian(benchmark::State& state) {
  const auto model = circle_model();
  const Vector x = point(0.25, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(network_jacobian(*model, x));
}
BENCHMARK(BM_NetworkJacobian);

void BM_JacobiEigen(benchmark::State& state) {
  const auto n = state.range(0);
  SplitMix64 rng(1);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-1, 1);
  const Matrix s = a.transpose() * a;
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(s));
}
BENCHMARK(BM_JacobiEigen)->Arg(2)->Arg(3)->Arg(8);

void BM_TraceSteps(benchmark::State& state) {
  const PullbackProvider provider(circle_model());
  TraceConfig cfg;
  cfg.delta = 1e-4;
  cfg.max_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simec_trace(provider, point(0.25, 0.25), std::nullopt, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TraceSteps)->Arg(10000);

void BM_MarchingContour(benchmark::State& state) {
  const auto f = model_field(*circle_model());
  const GridSpec grid(Box(point(-1, -1), point(1, 1)), static_cast<std::size_t>(state.range(0)));
  const double level = f(0.25, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(marching_contour(f, grid, level));
}
BENCHMARK(BM_MarchingContour)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Hausdorff(benchmark::State& state) {
  SplitMix64 rng(2);
  std::vector<Vector> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& p : a) p = point(rng.uniform(), rng.uniform());
  for (auto& p : b) p = point(rng.uniform(), rng.uniform());
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b));
}
BENCHMARK(BM_Hausdorff)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  const auto data = generate_dataset(DatasetKind::circle_exp, 2000, 7);
  TrainConfig cfg;
  cfg.epochs = 1;
  const auto arch = Architecture::parse("2,5,5,1");
  for (auto _ : state) benchmark::DoNotOptimize(train(arch, data, cfg));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMicrosecond);

void BM_StripFoliation(benchmark::State& state) {
  Matrix w(1, 2);
  w << 1, 2;
  const auto model = std::make_shared<const MlpModel>(
      std::vector<Layer>{Layer{w, Vector::Zero(1), Activation::identity}});
  ExploreConfig cfg;
  cfg.delta = 1e-3;
  cfg.tol_eps = 0.1;
  cfg.leaf_eps = 0.01;
  cfg.simec.delta = 1e-3;
  cfg.simec.max_steps = 2000;
  cfg.simec.boundary = BoundaryPolicy::halt;
  cfg.simec.hypercube = Box(point(0, 0), point(1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(preimage_interval(model, point(0.5, 0.5), cfg));
}
BENCHMARK(BM_StripFoliation)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
