#include "commands.hpp"

#include "simec/csv.hpp"
#include "simec/errors.hpp"
#include "simec/explorer.hpp"
#include "simec/oracle.hpp"
#include "simec/trainer.hpp"
#include "simec/validation.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#ifndef SIMEC_VERSION
#define SIMEC_VERSION "unknown"
#endif

namespace simec::cli {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainOptions, dataset, samples, arch, activation, epochs, batch,
                                   lr, seed, split, normalize, emit_data, gnuplot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TraceOptions, model, analytic, start, direction, delta, steps,
                                   boundary, bounds, both, tau, output_metric, gnuplot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExploreOptions, model, start, orientation, delta, leaf_eps, hops,
                                   max_steps, boundary, bounds, fixed_direction, tau, gnuplot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FoliateOptions, model, start, bisect_start, eps, leaf_eps, delta,
                                   simec_delta, steps, max_leaf_steps, boundary, bounds,
                                   allow_outside, outer_bounds, fixed_direction, tau, jobs,
                                   oracle_check, oracle_resolution, gnuplot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OracleOptions, model, field, bounds, resolution, level, interval,
                                   gnuplot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ValidateOptions, suite, seed, jobs, artifacts)

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string absolute_path(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw ConfigError("cannot write " + path.string());
}

// The manifest goes to disk before any computation; `result` is filled in
// afterwards by subcommands that have something to summarize.
class Manifest {
 public:
  template <typename Options>
  Manifest(const fs::path& out, const char* subcommand, std::uint64_t seed, const Options& o,
           const std::vector<std::string>& outputs)
      : path_(out / "manifest.json") {
    fs::create_directories(out);
    doc_["tool"] = "simec";
    doc_["version"] = SIMEC_VERSION;
    doc_["subcommand"] = subcommand;
    doc_["seed"] = seed;
    doc_["config"] = nlohmann::json(o);
    doc_["outputs"] = outputs;
    flush();
  }

  void set_result(ordered_json result) {
    doc_["result"] = std::move(result);
    flush();
  }

 private:
  void flush() const { write_text(path_, doc_.dump(2) + "\n"); }

  fs::path path_;
  ordered_json doc_;
};

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::optional<Box> box_from(const std::vector<double>& bounds, const char* flag) {
  if (bounds.empty()) return std::nullopt;
  if (bounds.size() % 2 != 0) {
    throw ConfigError(std::string(flag) + " needs pairs lo,hi per dimension");
  }
  const auto d = static_cast<Eigen::Index>(bounds.size() / 2);
  Vector lo(d);
  Vector hi(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    lo[i] = bounds[static_cast<std::size_t>(2 * i)];
    hi[i] = bounds[static_cast<std::size_t>(2 * i + 1)];
  }
  return Box(lo, hi);
}

TraceConfig trace_config(double delta, std::size_t steps, const std::string& boundary,
                         const std::vector<double>& bounds, double tau) {
  TraceConfig cfg;
  cfg.delta = delta;
  cfg.max_steps = steps;
  cfg.boundary = parse_boundary(boundary);
  cfg.hypercube = box_from(bounds, "--bounds");
  cfg.tau_rel = tau;
  cfg.validate();
  return cfg;
}

std::shared_ptr<const MlpModel> load_shared(const std::string& path) {
  return std::make_shared<const MlpModel>(load_model(path));
}

void check_dim(const Vector& p, Eigen::Index d, const char* what) {
  if (p.size() != d) {
    throw ShapeError(std::string(what) + " has " + std::to_string(p.size()) +
                     " coordinates, expected " + std::to_string(d));
  }
}

ordered_json interval_json(double lo, double hi) { return ordered_json::array({lo, hi}); }

}  // namespace

void run_train(TrainOptions o, const fs::path& out) {
  if (o.dataset.empty()) throw ConfigError("--dataset is required");
  bool generated = true;
  DatasetKind kind{};
  try {
    kind = parse_dataset_kind(o.dataset);
  } catch (const ConfigError&) {
    if (!fs::exists(o.dataset)) throw;
    generated = false;
    o.dataset = absolute_path(o.dataset);
  }
  std::vector<std::string> outputs{"model.json", "loss.csv"};
  if (o.emit_data) outputs.push_back("dataset.csv");
  if (o.gnuplot) outputs.push_back("loss.gp");
  Manifest manifest(out, "train", o.seed, o, outputs);

  Dataset data = generated ? generate_dataset(kind, o.samples, o.seed) : read_dataset_csv(o.dataset);
  if (!generated && o.normalize) data = normalize(data);
  const Architecture arch = Architecture::parse(o.arch, parse_activation(o.activation));
  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.split = o.split;
  if (o.emit_data) write_dataset_csv(out / "dataset.csv", data);

  const TrainResult r = train(arch, data, cfg);
  save_model(r.model, (out / "model.json").string());
  write_loss_csv(out / "loss.csv", r.history);
  if (o.gnuplot) {
    std::ofstream gp(out / "loss.gp", std::ios::binary);
    gp << "set datafile separator ','\nset logscale y\nset xlabel 'epoch'\nset ylabel 'mse'\n"
       << "plot 'loss.csv' using 1:2 every ::1 with lines title 'train', \\\n"
       << "     'loss.csv' using 1:3 every ::1 with lines title 'validation'\n"
       << "pause mouse close\n";
  }

  const EpochLoss& last = r.history.back();
  ordered_json result{{"architecture", arch.to_string()},
                      {"train_mse", last.train_mse},
                      {"val_mse", last.val_mse}};
  if (data.normalized()) {
    ordered_json ranges = ordered_json::array();
    for (const auto& rg : data.input_ranges) ranges.push_back(interval_json(rg.min, rg.max));
    result["input_ranges"] = ranges;
    ranges = ordered_json::array();
    for (const auto& rg : data.target_ranges) ranges.push_back(interval_json(rg.min, rg.max));
    result["target_ranges"] = ranges;
  }
  manifest.set_result(result);
  std::printf("architecture: %s\nepochs: %zu\ntrain mse: %.6e\nvalidation mse: %.6e\n",
              arch.to_string().c_str(), r.history.size(), last.train_mse, last.val_mse);
}

void run_trace(TraceOptions o, const fs::path& out) {
  if (o.model.empty() == o.analytic.empty()) {
    throw ConfigError("exactly one of --model and --analytic is required");
  }
  if (o.start.empty()) throw ConfigError("--start is required");
  o.model = absolute_path(o.model);
  const TraceConfig cfg = trace_config(o.delta, o.steps, o.boundary, o.bounds, o.tau);
  Manifest manifest(out, "trace", 0, o,
                    o.gnuplot ? std::vector<std::string>{"trace.csv", "trace.gp"}
                              : std::vector<std::string>{"trace.csv"});

  std::shared_ptr<const MetricProvider> provider;
  if (!o.model.empty()) {
    auto model = load_shared(o.model);
    std::optional<Matrix> g_out;
    if (!o.output_metric.empty()) {
      const auto n = model->output_dim();
      if (static_cast<Eigen::Index>(o.output_metric.size()) != n * n) {
        throw ShapeError("--output-metric needs " + std::to_string(n * n) + " entries");
      }
      g_out = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          o.output_metric.data(), n, n);
    }
    provider = std::make_shared<PullbackProvider>(model, g_out);
  } else {
    if (!o.output_metric.empty()) throw ConfigError("--output-metric needs --model");
    provider = analytic_metric(o.analytic);
  }
  const Vector p0 = to_vector(o.start);
  check_dim(p0, provider->dim(), "--start");
  std::optional<Vector> v0;
  if (!o.direction.empty()) {
    if (o.both) throw ConfigError("--direction and --both are mutually exclusive");
    v0 = to_vector(o.direction);
    check_dim(*v0, provider->dim(), "--direction");
  }

  const Polygonal poly = o.both ? simec_trace_both(*provider, p0, cfg)
                                : simec_trace(*provider, p0, v0, cfg);
  write_trace_csv(out / "trace.csv", poly);
  if (o.gnuplot) write_gnuplot_script(out / "trace.gp", "SiMEC trace", {out / "trace.csv"});

  const double drift = max_output_drift(poly);
  manifest.set_result({{"vertices", poly.size()},
                       {"cumulative_energy", poly.cumulative_energy},
                       {"pseudolength_bound", poly.pseudolength_bound},
                       {"max_output_drift", drift},
                       {"projected_steps", poly.projected_steps},
                       {"halted_at_boundary", poly.halted_at_boundary}});
  std::printf("vertices: %zu\nfinal cumulative energy: %.6e\nmax output drift: %.6e\n", poly.size(),
              poly.cumulative_energy, drift);
  if (poly.halted_at_boundary) std::printf("halted at the boundary\n");
}

void run_explore(ExploreOptions o, const fs::path& out) {
  if (o.model.empty()) throw ConfigError("--model is required");
  if (o.start.empty()) throw ConfigError("--start is required");
  if (o.orientation != "plus" && o.orientation != "minus") {
    throw ConfigError("--orientation must be plus or minus");
  }
  if (o.hops == 0) throw ConfigError("--hops must be positive");
  o.model = absolute_path(o.model);
  const TraceConfig bcfg = trace_config(o.delta, 1, o.boundary, o.bounds, o.tau);
  Manifest manifest(out, "explore", 0, o,
                    o.gnuplot ? std::vector<std::string>{"explore.csv", "explore.gp"}
                              : std::vector<std::string>{"explore.csv"});

  auto model = load_shared(o.model);
  const PullbackProvider provider(model);
  Vector p = to_vector(o.start);
  check_dim(p, provider.dim(), "--start");

  std::optional<Vector> dir;
  if (o.orientation == "minus") {
    const auto d = spectral_decompose(provider.metric_at(p), o.tau);
    if (d.positive_count() < 1) throw DegenerateMetricError("metric has no positive direction", 0);
    dir = Vector(-select_direction(d, Subspace::positive));
  }
  Polygonal path;
  path.points.push_back(p);
  path.outputs.push_back(forward(*model, p));
  path.projected.push_back(false);
  ExploreStatus status = ExploreStatus::reached;
  for (std::size_t h = 0; h < o.hops && status == ExploreStatus::reached; ++h) {
    const SimExpStep s = simexp_step(provider, p, dir, o.delta, o.leaf_eps, o.max_steps, bcfg,
                                     o.fixed_direction);
    status = s.status;
    dir = s.direction;
    if (s.steps == 0) break;
    p = s.point;
    path.points.push_back(p);
    path.outputs.push_back(forward(*model, p));
    path.projected.push_back(status == ExploreStatus::boundary && bcfg.boundary == BoundaryPolicy::project);
    path.segment_energies.push_back(s.energy);
    path.segment_pseudolengths.push_back(s.pseudolength);
    path.cumulative_energy += s.energy;
    path.pseudolength_bound += s.pseudolength;
  }
  write_trace_csv(out / "explore.csv", path);
  if (o.gnuplot) write_gnuplot_script(out / "explore.gp", "SiMExp path", {out / "explore.csv"});

  const double start_out = path.outputs.front()[0];
  const double end_out = path.outputs.back()[0];
  manifest.set_result({{"hops", path.segments()},
                       {"status", std::string(to_string(status))},
                       {"start_output", start_out},
                       {"final_output", end_out},
                       {"final_point", std::vector<double>(p.data(), p.data() + p.size())}});
  std::printf("hops: %zu\nstatus: %s\noutput: %.10g -> %.10g\nfinal point:", path.segments(),
              std::string(to_string(status)).c_str(), start_out, end_out);
  for (Eigen::Index i = 0; i < p.size(); ++i) std::printf("%s%.10g", i ? "," : " ", p[i]);
  std::printf("\n");
}

void run_foliate(FoliateOptions o, const fs::path& out) {
  if (o.model.empty()) throw ConfigError("--model is required");
  if (o.start.empty() == o.bisect_start.empty()) {
    throw ConfigError("exactly one of --start and --bisect-start is required");
  }
  if (!o.bisect_start.empty() && o.bisect_start.size() != 4) {
    throw ConfigError("--bisect-start takes x,y_lo,y_hi,target");
  }
  o.model = absolute_path(o.model);
  ExploreConfig cfg;
  cfg.delta = o.delta;
  cfg.tol_eps = o.eps;
  cfg.leaf_eps = o.leaf_eps;
  cfg.max_leaf_steps = o.max_leaf_steps;
  cfg.simec = trace_config(o.simec_delta > 0.0 ? o.simec_delta : o.delta, o.steps, o.boundary,
                           o.bounds, o.tau);
  cfg.allow_outside = o.allow_outside;
  cfg.outer_box = box_from(o.outer_bounds, "--outer-bounds");
  cfg.refresh_direction = !o.fixed_direction;
  cfg.jobs = o.jobs;
  cfg.validate();
  Manifest manifest(out, "foliate", 0, o,
                    o.gnuplot ? std::vector<std::string>{"transversal.csv", "leaf_<k>.csv", "foliation.gp"}
                              : std::vector<std::string>{"transversal.csv", "leaf_<k>.csv"});

  auto model = load_shared(o.model);
  Vector p0;
  if (!o.bisect_start.empty()) {
    if (model->input_dim() != 2) throw ShapeError("--bisect-start needs a two-input model");
    const double x = o.bisect_start[0];
    const auto g = [&](double y) { return forward(*model, Vector{{x, y}})[0]; };
    p0 = Vector{{x, bisect_level(g, o.bisect_start[1], o.bisect_start[2], o.bisect_start[3])}};
  } else {
    p0 = to_vector(o.start);
  }
  check_dim(p0, model->input_dim(), "start point");

  const FoliationResult f = preimage_interval(model, p0, cfg);
  const auto files = write_foliation(out, f);
  if (o.gnuplot) write_gnuplot_script(out / "foliation.gp", "foliation", files);

  ordered_json result{{"start", std::vector<double>(p0.data(), p0.data() + p0.size())},
                      {"c", f.center_output},
                      {"leaves", f.leaves.size()},
                      {"center_leaf", f.center_index},
                      {"covered_interval", interval_json(f.covered_interval.first,
                                                         f.covered_interval.second)},
                      {"plus_stop", std::string(to_string(f.plus_stop))},
                      {"minus_stop", std::string(to_string(f.minus_stop))},
                      {"mean_leaf_spacing", f.mean_leaf_spacing()}};
  std::printf("c: %.10g\nleaves: %zu\ncovered interval: [%.10g, %.10g]\n", f.center_output,
              f.leaves.size(), f.covered_interval.first, f.covered_interval.second);

  if (o.oracle_check) {
    if (!cfg.simec.hypercube || cfg.simec.hypercube->dim() != 2) {
      throw ConfigError("--oracle-check needs two-dimensional --bounds");
    }
    const GridSpec grid(*cfg.simec.hypercube, o.oracle_resolution);
    const auto nodes = grid_preimage(model_field(*model), grid, f.center_output - o.eps,
                                     f.center_output + o.eps);
    const double radius = 2.0 * f.mean_leaf_spacing();
    const double coverage = radius > 0.0 ? coverage_fraction(nodes, f.all_leaf_vertices(), radius)
                                         : 0.0;
    result["oracle_check"] = {{"resolution", o.oracle_resolution},
                              {"oracle_nodes", nodes.size()},
                              {"radius", radius},
                              {"coverage", coverage}};
    std::printf("oracle coverage: %.4f of %zu nodes within %.4g\n", coverage, nodes.size(), radius);
  }
  manifest.set_result(result);
}

void run_oracle(OracleOptions o, const fs::path& out) {
  if (o.model.empty() == o.field.empty()) throw ConfigError("exactly one of --model and --field is required");
  if (o.level.size() > 1) throw ConfigError("--level takes one value");
  if (!o.interval.empty() && o.interval.size() != 2) throw ConfigError("--interval takes lo,hi");
  if (o.level.empty() && o.interval.empty()) throw ConfigError("--level or --interval is required");
  const auto box = box_from(o.bounds, "--bounds");
  if (!box || box->dim() != 2) throw ConfigError("--bounds must give a two-dimensional box");
  const GridSpec grid(*box, o.resolution);
  o.model = absolute_path(o.model);
  std::vector<std::string> outputs;
  if (!o.level.empty()) outputs.push_back("contour.csv");
  if (!o.interval.empty()) outputs.push_back("preimage.csv");
  if (o.gnuplot) outputs.push_back("oracle.gp");
  Manifest manifest(out, "oracle", 0, o, outputs);

  std::shared_ptr<const MlpModel> model;
  ScalarField f;
  if (!o.model.empty()) {
    model = load_shared(o.model);
    f = model_field(*model);
  } else if (o.field == "circle_exp") {
    f = [](double x, double y) { return std::exp(x * x + y * y - 2.0); };
  } else if (o.field == "parabola_exp") {
    f = [](double x, double y) { return std::exp(x * x + y - 2.0); };
  } else if (o.field == "sine_boundary") {
    f = [](double x, double y) { return y - std::sin(x); };
  } else {
    throw ConfigError("unknown field '" + o.field +
                      "' (expected circle_exp, parabola_exp or sine_boundary)");
  }

  ordered_json result = ordered_json::object();
  std::vector<fs::path> files;
  if (!o.level.empty()) {
    const ContourSet c = marching_contour(f, grid, o.level[0]);
    files.push_back(out / "contour.csv");
    write_contour_csv(files.back(), c);
    result["contour"] = {{"level", o.level[0]},
                         {"polylines", c.polylines.size()},
                         {"vertices", c.vertex_count()}};
    std::printf("contour: %zu polylines, %zu vertices\n", c.polylines.size(), c.vertex_count());
  }
  if (!o.interval.empty()) {
    const auto nodes = grid_preimage(f, grid, o.interval[0], o.interval[1]);
    files.push_back(out / "preimage.csv");
    write_points_csv(files.back(), nodes, f);
    result["preimage"] = {{"interval", interval_json(o.interval[0], o.interval[1])},
                          {"nodes", nodes.size()}};
    std::printf("preimage: %zu grid nodes\n", nodes.size());
  }
  if (o.gnuplot) write_gnuplot_script(out / "oracle.gp", "oracle", files);
  manifest.set_result(result);
}

void run_validate(ValidateOptions o, const fs::path& out) {
  const Suite suite = parse_suite(o.suite);
  o.artifacts = absolute_path(o.artifacts);
  Manifest manifest(out, "validate", o.seed, o, {"validation_report.json"});
  SuiteOptions opts;
  opts.seed = o.seed;
  opts.jobs = o.jobs;
  opts.artifacts_dir = o.artifacts;
  opts.on_result = [](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
  };
  const SuiteReport report = run_suite(suite, opts);
  write_text(out / "validation_report.json", report.to_json());
  std::size_t n_pass = 0;
  for (const auto& r : report.results) n_pass += r.passed ? 1 : 0;
  std::printf("%zu/%zu criteria passed\n", n_pass, report.results.size());
  manifest.set_result({{"passed", report.passed()}, {"criteria", report.results.size()},
                       {"criteria_passed", n_pass}});
  if (!report.passed()) throw ValidationFailed("validation suite failed");
}

void run_replay(const fs::path& manifest, const fs::path& out) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + manifest.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("tool", "") != "simec" || !doc.contains("config")) {
    throw ConfigError("manifest " + manifest.string() + " was not written by simec");
  }
  const std::string sub = doc.value("subcommand", "");
  const auto& cfg = doc["config"];
  try {
    if (sub == "train") return run_train(cfg.get<TrainOptions>(), out);
    if (sub == "trace") return run_trace(cfg.get<TraceOptions>(), out);
    if (sub == "explore") return run_explore(cfg.get<ExploreOptions>(), out);
    if (sub == "foliate") return run_foliate(cfg.get<FoliateOptions>(), out);
    if (sub == "oracle") return run_oracle(cfg.get<OracleOptions>(), out);
    if (sub == "validate") return run_validate(cfg.get<ValidateOptions>(), out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest config: " + std::string(e.what()));
  }
  throw ConfigError("manifest names unknown subcommand '" + sub + "'");
}

}  // namespace simec::cli
