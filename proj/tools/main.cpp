// simec: train networks, trace equivalence classes, reconstruct preimages and
// run the acceptance suite from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical error,
// 4 validation failure.

#include "commands.hpp"

#include "simec/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

using namespace simec::cli;

CLI::Option* add_list(CLI::App* app, const std::string& name, std::vector<double>& v,
                      const std::string& help) {
  return app->add_option(name, v, help)->delimiter(',');
}

void add_trace_box(CLI::App* app, std::string& boundary, std::vector<double>& bounds) {
  app->add_option("--boundary", boundary, "hypercube policy: halt, project or ignore")
      ->capture_default_str();
  add_list(app, "--bounds", bounds, "hypercube as lo_1,hi_1,lo_2,hi_2,...");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null-curve tracing of the pullback metric of neural networks"};
  app.set_version_flag("--version", SIMEC_VERSION);
  app.require_subcommand(1);
  std::string out_dir = ".";
  std::function<void()> action;

  auto* train = app.add_subcommand("train", "train a network on a synthetic or CSV dataset");
  TrainOptions tr;
  train->add_option("--dataset", tr.dataset,
                    "circle_exp, parabola_exp, ideal_gas, sine_classifier or a dataset CSV path")
      ->required();
  train->add_option("--samples", tr.samples, "generated sample count")->capture_default_str();
  train->add_option("--arch", tr.arch, "layer widths including the input, e.g. 2,5,5,1")
      ->capture_default_str();
  train->add_option("--activation", tr.activation, "sigmoid, tanh, softplus or identity")
      ->capture_default_str();
  train->add_option("--epochs", tr.epochs)->capture_default_str();
  train->add_option("--batch", tr.batch)->capture_default_str();
  train->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  train->add_option("--seed", tr.seed)->capture_default_str();
  train->add_option("--split", tr.split, "leading fraction used for training")->capture_default_str();
  train->add_flag("--normalize", tr.normalize, "min-max normalize a CSV dataset");
  train->add_flag("--emit-data", tr.emit_data, "write dataset.csv");
  train->add_flag("--gnuplot", tr.gnuplot, "write a loss plot script");
  train->add_option("--out-dir", out_dir)->capture_default_str();
  train->callback([&] { action = [&] { run_train(tr, out_dir); }; });

  auto* trace = app.add_subcommand("trace", "trace one equivalence class (SiMEC)");
  TraceOptions tc;
  trace->add_option("--model", tc.model, "model JSON");
  trace->add_option("--analytic", tc.analytic, "analytic metric field (example2)");
  add_list(trace, "--start", tc.start, "start point x_1,x_2,...")->required();
  add_list(trace, "--direction", tc.direction, "orientation of the first step");
  trace->add_option("--delta", tc.delta, "step length")->capture_default_str();
  trace->add_option("--steps", tc.steps, "maximum number of steps")->capture_default_str();
  add_trace_box(trace, tc.boundary, tc.bounds);
  trace->add_flag("--both", tc.both, "trace both orientations and join them");
  trace->add_option("--tau", tc.tau, "relative null-eigenvalue threshold")->capture_default_str();
  add_list(trace, "--output-metric", tc.output_metric, "constant SPD output metric, row-major");
  trace->add_flag("--gnuplot", tc.gnuplot, "write a plot script");
  trace->add_option("--out-dir", out_dir)->capture_default_str();
  trace->callback([&] { action = [&] { run_trace(tc, out_dir); }; });

  auto* explore = app.add_subcommand("explore", "step across equivalence classes (SiMExp)");
  ExploreOptions ex;
  explore->add_option("--model", ex.model, "model JSON")->required();
  add_list(explore, "--start", ex.start, "start point")->required();
  explore->add_option("--orientation", ex.orientation, "plus or minus the positive eigenvector")
      ->capture_default_str();
  explore->add_option("--delta", ex.delta)->capture_default_str();
  explore->add_option("--leaf-eps", ex.leaf_eps, "output change per hop")->capture_default_str();
  explore->add_option("--hops", ex.hops, "number of consecutive hops")->capture_default_str();
  explore->add_option("--max-steps", ex.max_steps, "step limit per hop")->capture_default_str();
  add_trace_box(explore, ex.boundary, ex.bounds);
  explore->add_flag("--fixed-direction", ex.fixed_direction,
                    "evaluate the direction once per hop");
  explore->add_option("--tau", ex.tau)->capture_default_str();
  explore->add_flag("--gnuplot", ex.gnuplot);
  explore->add_option("--out-dir", out_dir)->capture_default_str();
  explore->callback([&] { action = [&] { run_explore(ex, out_dir); }; });

  auto* foliate = app.add_subcommand("foliate", "reconstruct the preimage of [c-eps, c+eps]");
  FoliateOptions fo;
  foliate->add_option("--model", fo.model, "model JSON")->required();
  auto* start = add_list(foliate, "--start", fo.start, "start point");
  auto* bisect = add_list(foliate, "--bisect-start", fo.bisect_start,
                          "x,y_lo,y_hi,target: start at N(x, y) = target found by bisection");
  start->excludes(bisect);
  foliate->add_option("--eps", fo.eps, "half-width of the output interval")->capture_default_str();
  foliate->add_option("--leaf-eps", fo.leaf_eps, "output spacing between leaves")
      ->capture_default_str();
  foliate->add_option("--delta", fo.delta, "transversal step")->capture_default_str();
  foliate->add_option("--simec-delta", fo.simec_delta, "leaf step (default: --delta)");
  foliate->add_option("--steps", fo.steps, "leaf steps per orientation")->capture_default_str();
  foliate->add_option("--max-leaf-steps", fo.max_leaf_steps, "transversal steps between leaves")
      ->capture_default_str();
  add_trace_box(foliate, fo.boundary, fo.bounds);
  foliate->add_flag("--allow-outside", fo.allow_outside,
                    "let the transversal continue outside the hypercube");
  add_list(foliate, "--outer-bounds", fo.outer_bounds, "bound for --allow-outside");
  foliate->add_flag("--fixed-direction", fo.fixed_direction,
                    "evaluate the transversal direction once per hop");
  foliate->add_option("--tau", fo.tau)->capture_default_str();
  foliate->add_option("--jobs", fo.jobs, "leaf tracing threads")->capture_default_str();
  foliate->add_flag("--oracle-check", fo.oracle_check, "compare with a grid preimage scan");
  foliate->add_option("--oracle-resolution", fo.oracle_resolution)->capture_default_str();
  foliate->add_flag("--gnuplot", fo.gnuplot);
  foliate->add_option("--out-dir", out_dir)->capture_default_str();
  foliate->callback([&] { action = [&] { run_foliate(fo, out_dir); }; });

  auto* oracle = app.add_subcommand("oracle", "marching-squares contour and grid preimage");
  OracleOptions orc;
  oracle->add_option("--model", orc.model, "model JSON");
  oracle->add_option("--field", orc.field, "circle_exp, parabola_exp or sine_boundary");
  add_list(oracle, "--bounds", orc.bounds, "grid box lo_x,hi_x,lo_y,hi_y")->required();
  oracle->add_option("--resolution", orc.resolution, "nodes per axis")->capture_default_str();
  add_list(oracle, "--level", orc.level, "contour level");
  add_list(oracle, "--interval", orc.interval, "preimage interval lo,hi");
  oracle->add_flag("--gnuplot", orc.gnuplot);
  oracle->add_option("--out-dir", out_dir)->capture_default_str();
  oracle->callback([&] { action = [&] { run_oracle(orc, out_dir); }; });

  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  ValidateOptions va;
  validate->add_option("--suite", va.suite, "exact, oracle, all or long")->capture_default_str();
  validate->add_option("--seed", va.seed)->capture_default_str();
  validate->add_option("--jobs", va.jobs)->capture_default_str();
  validate->add_option("--artifacts", va.artifacts, "directory receiving every CSV produced");
  validate->add_option("--out-dir", out_dir)->capture_default_str();
  validate->callback([&] { action = [&] { run_validate(va, out_dir); }; });

  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  std::string manifest;
  std::string replay_out;
  replay->add_option("--manifest", manifest)->required();
  replay->add_option("--out-dir", replay_out, "default: the manifest's directory");
  replay->callback([&] {
    action = [&] {
      const std::filesystem::path m(manifest);
      const auto dir = replay_out.empty() ? (m.has_parent_path() ? m.parent_path() : ".")
                                          : std::filesystem::path(replay_out);
      run_replay(m, dir);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    action();
    return 0;
  } catch (const ValidationFailed& e) {
    std::fprintf(stderr, "simec: %s\n", e.what());
    return kExitValidation;
  } catch (const simec::NumericalError& e) {
    std::fprintf(stderr, "simec: numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const simec::ConfigError& e) {
    std::fprintf(stderr, "simec: configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "simec: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simec: %s\n", e.what());
    return 1;
  }
}
