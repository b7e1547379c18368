#include "simec/validation.hpp"

#include "simec/csv.hpp"
#include "simec/errors.hpp"
#include "simec/explorer.hpp"
#include "simec/oracle.hpp"
#include "simec/trainer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace simec {

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::exact: return "exact";
    case Suite::oracle: return "oracle";
    case Suite::all: return "all";
    case Suite::long_run: return "long";
  }
  return "all";
}

Suite parse_suite(std::string_view name) {
  if (name == "exact") return Suite::exact;
  if (name == "oracle") return Suite::oracle;
  if (name == "all") return Suite::all;
  if (name == "long") return Suite::long_run;
  throw ConfigError("unknown suite '" + std::string(name) + "' (expected exact, oracle, all or long)");
}

std::vector<int> suite_criteria(Suite s) {
  switch (s) {
    case Suite::exact: return {1, 2};
    case Suite::oracle: return {3, 4, 5};
    case Suite::all: return {1, 2, 3, 4, 5, 6, 7, 8, 9};
    case Suite::long_run: return {10};
  }
  return {};
}

double bisect_level(const std::function<double(double)>& g, double lo, double hi, double target,
                    double tol) {
  double flo = g(lo) - target;
  const double fhi = g(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw ConfigError("bisection bracket has no sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = g(mid) - target;
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Digest {
  std::uint64_t hash = 0;
  std::size_t size = 0;
  bool operator==(const Digest&) const = default;
};

// Every CSV a criterion produces goes through here: it is fingerprinted for
// the determinism check and written out when an artifacts directory is set.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& bytes) {
    digests_[name] = {fnv1a(bytes), bytes.size()};
    if (dir_.empty()) return;
    const auto path = dir_ / name;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    os << bytes;
    if (!os) throw ConfigError("cannot write artifact " + path.string());
  }

  const std::map<std::string, Digest>& digests() const { return digests_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, Digest> digests_;
};

std::string trace_csv(const Polygonal& poly) {
  std::ostringstream os;
  write_trace_csv(os, poly);
  return os.str();
}

std::string loss_csv(const std::vector<EpochLoss>& history) {
  std::ostringstream os;
  os << "epoch,train_mse,val_mse\n";
  for (const auto& h : history)
    os << h.epoch << ',' << format_real(h.train_mse) << ',' << format_real(h.val_mse) << '\n';
  return os.str();
}

std::string contour_csv(const ContourSet& c) {
  std::ostringstream os;
  os << "step,x_0,x_1,output,polyline\n";
  std::size_t step = 0;
  for (std::size_t k = 0; k < c.polylines.size(); ++k)
    for (const auto& p : c.polylines[k])
      os << step++ << ',' << format_real(p[0]) << ',' << format_real(p[1]) << ','
         << format_real(c.level) << ',' << k << '\n';
  return os.str();
}

void add_foliation(Artifacts& art, const std::string& prefix, const FoliationResult& f) {
  art.add(prefix + "/transversal.csv", trace_csv(f.transversal));
  for (std::size_t k = 0; k < f.leaves.size(); ++k)
    art.add(prefix + "/leaf_" + std::to_string(k) + ".csv", trace_csv(f.leaves[k]));
}

// Experiment parameters. The criteria fix the data sizes, architectures,
// epochs, start points and steps; the remaining knobs are chosen here.
constexpr std::size_t kCircleSamples = 2000;
constexpr std::size_t kCircleEpochs = 5000;
constexpr std::size_t kJacobianEpochs = 300;
constexpr std::size_t kSineSamples = 20000;
constexpr std::size_t kSineEpochs = 20000;
constexpr std::size_t kOracleResolution = 512;
constexpr double kLongDelta = 2e-6;
constexpr std::size_t kLongSteps = 1500000;

// Runtime ceilings per criterion, in seconds.
constexpr double kBudget[] = {0, 1, 1, 5, 300, 60, 30, 300, 600, 1e9, 1e9};

Box square(double lo, double hi) { return Box(Vector::Constant(2, lo), Vector::Constant(2, hi)); }

class Session {
 public:
  explicit Session(const SuiteOptions& opts, const std::filesystem::path& dir)
      : opts_(opts), art_(dir) {}

  Artifacts& artifacts() { return art_; }
  const SuiteOptions& options() const { return opts_; }
  void mark_run(int id) { ran_.insert(id); }
  bool has_run(int id) const { return ran_.count(id) > 0; }

  struct Trained {
    std::shared_ptr<const MlpModel> model;
    double train_mse = 0.0;
    double val_mse = 0.0;
  };

  const Trained& circle() {
    if (!circle_) {
      const Dataset data = generate_dataset(DatasetKind::circle_exp, kCircleSamples, opts_.seed);
      TrainConfig cfg;
      cfg.epochs = kCircleEpochs;
      cfg.batch_size = 512;
      cfg.seed = opts_.seed;
      circle_ = fit(Architecture::parse("2,5,5,1"), data, cfg, "circle");
    }
    return *circle_;
  }

  const Trained& sine() {
    if (!sine_) {
      const Dataset data = generate_dataset(DatasetKind::sine_classifier, kSineSamples, opts_.seed);
      TrainConfig cfg;
      cfg.epochs = kSineEpochs;
      cfg.batch_size = 512;
      cfg.seed = opts_.seed;
      sine_ = fit(Architecture::parse("2,5,5,5,1"), data, cfg, "sine");
    }
    return *sine_;
  }

 private:
  Trained fit(const Architecture& arch, const Dataset& data, const TrainConfig& cfg,
              const std::string& name) {
    TrainResult r = train(arch, data, cfg);
    art_.add(name + "/loss.csv", loss_csv(r.history));
    art_.add(name + "/model.json", model_to_json(r.model));
    Trained t;
    t.train_mse = r.history.back().train_mse;
    t.val_mse = r.history.back().val_mse;
    t.model = std::make_shared<const MlpModel>(std::move(r.model));
    return t;
  }

  const SuiteOptions& opts_;
  Artifacts art_;
  std::optional<Trained> circle_;
  std::optional<Trained> sine_;
  std::set<int> ran_;
};

struct Outcome {
  bool passed = false;
  std::string detail;
};

// 1: pullback through the linear map [[1,2,2],[3,1,5]].
Outcome linear_example(Session&) {
  Matrix w(2, 3);
  w << 1, 2, 2, 3, 1, 5;
  const MlpModel model({Layer{w, Vector::Zero(2), Activation::identity}});
  const MetricTensor g = pullback_metric(model, Vector::Zero(3), Matrix::Identity(2, 2));
  Matrix expected(3, 3);
  expected << 10, 5, 17, 5, 5, 9, 17, 9, 29;
  const double err_g = (g.matrix() - expected).cwiseAbs().maxCoeff();

  const SpectralDecomposition d = spectral_decompose(g);
  const double r = std::sqrt(394.0);
  const Vector lambda{{0.0, 22.0 - r, 22.0 + r}};
  const double err_l = (d.eigenvalues - lambda).cwiseAbs().maxCoeff();

  const Eigen::Vector3d u = Eigen::Vector3d(8, 1, -5).normalized();
  const Eigen::Vector3d v = d.eigenvectors.col(0);
  const double sine = u.cross(v).norm();

  return {err_g <= 1e-12 && err_l <= 1e-9 && sine <= 1e-9 && d.null_count == 1,
          fmt("metric err %.2e (<=1e-12), eigenvalue err %.2e (<=1e-9), null |sin| %.2e (<=1e-9), "
              "null count %d",
              err_g, err_l, sine, static_cast<int>(d.null_count))};
}

// 2: analytic null curve of [[x^2, x], [x, 1]] from (1, 1).
Outcome analytic_parabola(Session& s) {
  TraceConfig cfg;
  cfg.delta = 1e-4;
  cfg.max_steps = 10000;
  cfg.boundary = BoundaryPolicy::ignore;
  const Vector p0{{1.0, 1.0}};
  const Polygonal poly = simec_trace(*example2_metric(), p0, std::nullopt, cfg);
  s.artifacts().add("example2/trace.csv", trace_csv(poly));
  // Integral curve of the kernel direction (1, -x): y = y0 - (x^2 - x0^2) / 2.
  double err = 0.0;
  double err_shifted = 0.0;
  for (const auto& p : poly.points) {
    err = std::max(err, std::abs(p[1] - (1.0 - (p[0] * p[0] - 1.0) / 2.0)));
    err_shifted = std::max(err_shifted, std::abs(p[1] - (1.0 - (p[0] - 1.0) * (p[0] - 1.0) / 2.0)));
  }
  return {err <= 1e-3 && poly.size() == cfg.max_steps + 1,
          fmt("max |y - (3/2 - x^2/2)| = %.2e (<=1e-3) over %zu vertices, x in [1, %.4f]; "
              "vs 1 - (x-1)^2/2: %.3f",
              err, poly.size(), poly.points.back()[0], err_shifted)};
}

// 3: forward-mode Jacobian against central differences.
Outcome jacobian_check(Session& s) {
  const Dataset data = generate_dataset(DatasetKind::circle_exp, 1000, s.options().seed);
  TrainConfig cfg;
  cfg.epochs = kJacobianEpochs;
  cfg.seed = s.options().seed;
  const TrainResult r = train(Architecture::parse("2,5,5,1"), data, cfg);
  const MlpModel& model = r.model;

  SplitMix64 rng(s.options().seed ^ 0x3c3c3c3cULL);
  std::ostringstream os;
  os << "x_0,x_1,jac_0,jac_1,fd_0,fd_1,rel_err\n";
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
    const Matrix j = network_jacobian(model, x);
    const Matrix fd = fd_jacobian([&](const Vector& p) { return forward(model, p); }, x);
    const double rel = (j - fd).cwiseAbs().maxCoeff() / std::max(j.cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst, rel);
    os << format_real(x[0]) << ',' << format_real(x[1]) << ',' << format_real(j(0, 0)) << ','
       << format_real(j(0, 1)) << ',' << format_real(fd(0, 0)) << ',' << format_real(fd(0, 1))
       << ',' << format_real(rel) << '\n';
  }
  s.artifacts().add("jacobian/model.json", model_to_json(model));
  s.artifacts().add("jacobian/comparison.csv", os.str());
  return {worst <= 1e-6, fmt("max relative error %.2e (<=1e-6) over 100 points", worst)};
}

ContourSet model_contour(const MlpModel& model, const Box& box, double level) {
  return marching_contour(model_field(model), GridSpec(box, kOracleResolution), level);
}

// 4: trained circle model, SiMEC from (0.25, 0.25).
Outcome circle_trace(Session& s) {
  const auto& t = s.circle();
  TraceConfig cfg;
  cfg.delta = 1e-4;
  cfg.max_steps = 100000;
  cfg.boundary = BoundaryPolicy::ignore;
  const PullbackProvider provider(t.model);
  const Vector p0{{0.25, 0.25}};
  const Polygonal poly = simec_trace(provider, p0, std::nullopt, cfg);
  s.artifacts().add("circle/trace.csv", trace_csv(poly));

  const double level = forward(*t.model, p0)[0];
  const ContourSet contour = model_contour(*t.model, square(-1.0, 1.0), level);
  s.artifacts().add("circle/contour.csv", contour_csv(contour));
  const double drift = max_output_drift(poly);
  const double h = contour.empty() ? INFINITY : hausdorff(poly.points, contour.vertices());
  const double h_tol = 2.0 * (2.0 / 512.0) * std::sqrt(2.0);
  const bool ok = t.train_mse <= 1e-3 && drift <= 1e-3 && poly.cumulative_energy <= 1e-8 &&
                  h <= h_tol;
  return {ok, fmt("train mse %.3e (<=1e-3, val %.3e), drift %.2e (<=1e-3), energy %.2e (<=1e-8), "
                  "Hausdorff %.2e (<=%.2e, %zu contour polylines)",
                  t.train_mse, t.val_mse, drift, poly.cumulative_energy, h, h_tol,
                  contour.polylines.size())};
}

// 5: distance to the oracle contour grows with the step size.
Outcome delta_ordering(Session& s) {
  const auto& t = s.circle();
  const PullbackProvider provider(t.model);
  const Vector p0{{0.25, 0.25}};
  const double level = forward(*t.model, p0)[0];
  const ContourSet contour = model_contour(*t.model, square(-1.0, 1.0), level);
  if (contour.empty()) return {false, "oracle contour is empty"};

  // Same curve length at every step size: 150 steps at the largest one.
  const double deltas[] = {1e-4, 1e-3, 1.25e-2, 2.5e-2, 5e-2};
  const double length = 150 * 5e-2;
  std::vector<double> dist;
  std::string detail = "max distance:";
  for (double delta : deltas) {
    TraceConfig cfg;
    cfg.delta = delta;
    cfg.max_steps = static_cast<std::size_t>(std::llround(length / delta));
    cfg.boundary = BoundaryPolicy::ignore;
    const Polygonal poly = simec_trace(provider, p0, std::nullopt, cfg);
    s.artifacts().add(fmt("delta/trace_%g.csv", delta), trace_csv(poly));
    dist.push_back(max_distance_to_contour(poly.points, contour));
    detail += fmt(" %g:%.2e", delta, dist.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < dist.size(); ++i) ok = ok && dist[i] >= dist[i - 1];
  return {ok, detail + " (non-decreasing)"};
}

// 6: strip of the linear model x + 2y.
Outcome linear_strip(Session& s) {
  Matrix w(1, 2);
  w << 1.0, 2.0;
  auto model = std::make_shared<const MlpModel>(
      std::vector<Layer>{Layer{w, Vector::Zero(1), Activation::identity}});
  ExploreConfig cfg;
  cfg.delta = 1e-3;
  cfg.tol_eps = 0.1;
  cfg.leaf_eps = 0.01;
  cfg.simec.delta = 1e-3;
  cfg.simec.max_steps = 2000;
  cfg.simec.boundary = BoundaryPolicy::halt;
  cfg.simec.hypercube = square(0.0, 1.0);
  cfg.jobs = s.options().jobs;
  const FoliationResult f = preimage_interval(model, Vector{{0.5, 0.5}}, cfg);
  add_foliation(s.artifacts(), "strip", f);

  double worst = 0.0;
  for (const auto& p : f.all_leaf_vertices()) worst = std::max(worst, std::abs(p[0] + 2 * p[1] - 1.5));
  const auto field = [](double x, double y) { return x + 2 * y; };
  const auto nodes = grid_preimage(field, GridSpec(square(0.0, 1.0), kOracleResolution), 1.4, 1.6);
  const double radius = 2.0 * f.mean_leaf_spacing();
  const double cov = coverage_fraction(nodes, f.all_leaf_vertices(), radius);
  return {worst <= 0.101 && cov >= 0.9,
          fmt("%zu leaves, max |x+2y-1.5| %.4f (<=0.101), coverage %.4f (>=0.9) at radius %.4f of "
              "%zu oracle nodes",
              f.leaves.size(), worst, cov, radius, nodes.size())};
}

ExploreConfig annulus_config(double delta, unsigned jobs) {
  ExploreConfig cfg;
  cfg.delta = delta;
  cfg.tol_eps = 0.05;
  cfg.leaf_eps = 0.0025;
  cfg.simec.delta = delta;
  cfg.simec.max_steps = 12000;
  cfg.simec.boundary = BoundaryPolicy::halt;
  cfg.simec.hypercube = square(0.0, 1.0);
  cfg.jobs = jobs;
  return cfg;
}

// 7: annulus around the origin restricted to the unit square.
Outcome annulus(Session& s) {
  const auto& t = s.circle();
  const Vector p0{{0.2, 0.2}};
  const FoliationResult fine = preimage_interval(t.model, p0, annulus_config(1e-4, s.options().jobs));
  add_foliation(s.artifacts(), "annulus/delta_1e-4", fine);
  const FoliationResult coarse = preimage_interval(t.model, p0, annulus_config(1e-3, s.options().jobs));
  add_foliation(s.artifacts(), "annulus/delta_1e-3", coarse);

  const GridSpec grid(square(0.0, 1.0), kOracleResolution);
  const double c = fine.center_output;
  const auto nodes = grid_preimage(model_field(*t.model), grid, c - 0.05, c + 0.05);
  const double radius = 2.0 * fine.mean_leaf_spacing();
  const auto fine_pts = fine.all_leaf_vertices();
  const auto coarse_pts = coarse.all_leaf_vertices();
  const double cov = coverage_fraction(nodes, fine_pts, radius);
  const double a_fine = covered_area(grid, fine_pts, radius);
  const double a_coarse = covered_area(grid, coarse_pts, radius);
  return {cov >= 0.9 && a_coarse > a_fine,
          fmt("c = %.6f, %zu leaves, coverage %.4f (>=0.9) at radius %.4f; covered area "
              "delta 1e-3 %.5f > delta 1e-4 %.5f",
              c, fine.leaves.size(), cov, radius, a_coarse, a_fine)};
}

// 8: separating surface of the sine classifier.
Outcome separating_surface(Session& s) {
  const auto& t = s.sine();
  const double pi = std::numbers::pi;
  const Box train_box(Vector{{-pi, -1.0}}, Vector{{pi, 1.0}});
  const auto at_x0 = [&](double y) { return forward(*t.model, Vector{{0.0, y}})[0]; };
  const double y0 = bisect_level(at_x0, -1.0, 1.0, 0.5, 1e-6);
  const Vector p0{{0.0, y0}};

  // Leaves may leave the training box where the learned boundary bulges
  // past y = +-1; they are traced in a wider box and clipped afterwards.
  // The learned boundary is steep (|grad N| ~ 1e2), so the transversal step
  // must be much finer than the leaf step for hops to resolve leaf_eps.
  ExploreConfig cfg;
  cfg.delta = 1e-5;
  cfg.tol_eps = 0.1;
  cfg.leaf_eps = 0.02;
  cfg.simec.delta = 2e-4;
  cfg.simec.max_steps = 25000;
  cfg.simec.boundary = BoundaryPolicy::halt;
  cfg.simec.hypercube = train_box.inflated(0.25);
  cfg.jobs = s.options().jobs;
  const FoliationResult f = preimage_interval(t.model, p0, cfg);
  add_foliation(s.artifacts(), "sine", f);

  const auto medial = restrict_to(f.leaves[f.center_index].points, train_box);
  const ContourSet oracle = marching_contour([](double x, double y) { return y - std::sin(x); },
                                             GridSpec(train_box, kOracleResolution), 0.0);
  const auto truth = restrict_to(oracle.vertices(), train_box);
  if (medial.empty() || truth.empty()) return {false, "empty medial leaf or oracle contour"};
  const double h = hausdorff(medial, truth);
  return {t.train_mse <= 5e-3 && h <= 0.15,
          fmt("train mse %.3e (<=5e-3, val %.3e), start (0, %.6f) N = %.6f, %zu leaves, "
              "medial-leaf Hausdorff %.4f (<=0.15), medial drift %.2e",
              t.train_mse, t.val_mse, y0, forward(*t.model, p0)[0], f.leaves.size(), h,
              max_output_drift(f.leaves[f.center_index]))};
}

// 10: energy at the fine step over the full step count.
Outcome long_energy(Session& s) {
  const auto& t = s.circle();
  TraceConfig cfg;
  cfg.delta = kLongDelta;
  cfg.max_steps = kLongSteps;
  cfg.boundary = BoundaryPolicy::ignore;
  const PullbackProvider provider(t.model);
  const Polygonal poly = simec_trace(provider, Vector{{0.25, 0.25}}, std::nullopt, cfg);
  return {poly.cumulative_energy <= 1e-18,
          fmt("energy %.3e (<=1e-18) after %zu steps at delta %g, drift %.2e",
              poly.cumulative_energy, poly.segments(), kLongDelta, max_output_drift(poly))};
}

const char* criterion_name(int id) {
  switch (id) {
    case 1: return "linear pullback";
    case 2: return "analytic parabola";
    case 3: return "jacobian vs finite differences";
    case 4: return "circle trace";
    case 5: return "step-size ordering";
    case 6: return "linear strip";
    case 7: return "annulus reconstruction";
    case 8: return "separating surface";
    case 9: return "determinism";
    case 10: return "long-run energy";
  }
  return "unknown";
}

Outcome dispatch(int id, Session& s) {
  switch (id) {
    case 1: return linear_example(s);
    case 2: return analytic_parabola(s);
    case 3: return jacobian_check(s);
    case 4: return circle_trace(s);
    case 5: return delta_ordering(s);
    case 6: return linear_strip(s);
    case 7: return annulus(s);
    case 8: return separating_surface(s);
    case 10: return long_energy(s);
  }
  throw ConfigError("unknown criterion " + std::to_string(id));
}

CriterionResult run_one(int id, Session& s) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  s.mark_run(id);
  const auto t0 = Clock::now();
  try {
    const Outcome o = dispatch(id, s);
    r.passed = o.passed;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.seconds > kBudget[id]) {
    r.passed = false;
    r.detail += fmt("; runtime %.1f s exceeds %.0f s", r.seconds, kBudget[id]);
  }
  return r;
}

// 9: criteria 3..8 re-run in a fresh session must reproduce every artifact.
CriterionResult determinism(const SuiteOptions& opts, Session& first) {
  CriterionResult r;
  r.id = 9;
  r.name = criterion_name(9);
  const auto t0 = Clock::now();
  for (int id = 3; id <= 8; ++id)
    if (!first.has_run(id)) run_one(id, first);
  Session second(opts, opts.artifacts_dir.empty() ? std::filesystem::path()
                                                  : opts.artifacts_dir / "run2");
  for (int id = 3; id <= 8; ++id) run_one(id, second);

  std::size_t compared = 0;
  std::vector<std::string> mismatched;
  const auto& a = first.artifacts().digests();
  const auto& b = second.artifacts().digests();
  for (const auto& [name, d] : a) {
    if (name.rfind("example2/", 0) == 0) continue;  // criterion 2 output, not re-run
    ++compared;
    const auto it = b.find(name);
    if (it == b.end() || !(it->second == d)) mismatched.push_back(name);
  }
  for (const auto& [name, d] : b)
    if (!a.count(name)) mismatched.push_back(name + " (only in re-run)");
  r.passed = mismatched.empty() && compared > 0;
  r.detail = fmt("%zu artifacts compared, %zu differ", compared, mismatched.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(mismatched.size(), 5); ++i)
    r.detail += (i ? ", " : ": ") + mismatched[i];
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

}  // namespace

bool SuiteReport::passed() const {
  for (const auto& r : results)
    if (!r.passed) return false;
  return !results.empty();
}

std::string format_result(const CriterionResult& r) {
  return fmt("[%s] %d %s: ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.detail +
         fmt(" (%.2f s)", r.seconds);
}

std::string SuiteReport::summary() const {
  std::string out;
  std::size_t n_pass = 0;
  for (const auto& r : results) {
    out += format_result(r) + "\n";
    if (r.passed) ++n_pass;
  }
  out += fmt("%zu/%zu criteria passed\n", n_pass, results.size());
  return out;
}

// Timings are left out so that the report is reproducible byte for byte.
std::string SuiteReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = std::string(to_string(suite));
  j["seed"] = seed;
  j["passed"] = passed();
  auto& arr = j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"passed", r.passed},
                   {"detail", r.detail}});
  }
  return j.dump(2) + "\n";
}

SuiteReport run_criteria(const std::vector<int>& ids, const SuiteOptions& opts) {
  for (int id : ids) {
    if (id < 1 || id > 10) throw ConfigError("unknown criterion " + std::to_string(id));
  }
  SuiteReport report;
  report.seed = opts.seed;
  const bool rerun = std::find(ids.begin(), ids.end(), 9) != ids.end();
  const auto dir = opts.artifacts_dir.empty() || !rerun ? opts.artifacts_dir
                                                        : opts.artifacts_dir / "run1";
  Session session(opts, dir);
  for (int id : ids) {
    CriterionResult r = id == 9 ? determinism(opts, session) : run_one(id, session);
    if (opts.on_result) opts.on_result(r);
    report.results.push_back(std::move(r));
  }
  return report;
}

SuiteReport run_suite(Suite suite, const SuiteOptions& opts) {
  SuiteReport report = run_criteria(suite_criteria(suite), opts);
  report.suite = suite;
  return report;
}

}  // namespace simec
