#pragma once

// Subcommand option sets and their implementations. Every option struct
// round-trips through the run manifest, which is how replay works.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace simec::cli {

struct TrainOptions {
  std::string dataset;  // kind name or dataset CSV path
  std::size_t samples = 2000;
  std::string arch = "2,5,5,1";
  std::string activation = "sigmoid";
  std::size_t epochs = 5000;
  std::size_t batch = 512;
  double lr = 1e-3;
  std::uint64_t seed = 7;
  double split = 0.5;
  bool normalize = false;  // min-max a CSV dataset (generated kinds decide themselves)
  bool emit_data = false;
  bool gnuplot = false;
};

struct TraceOptions {
  std::string model;
  std::string analytic;
  std::vector<double> start;
  std::vector<double> direction;
  double delta = 1e-4;
  std::size_t steps = 10000;
  std::string boundary = "ignore";
  std::vector<double> bounds;
  bool both = false;
  double tau = 1e-9;
  std::vector<double> output_metric;
  bool gnuplot = false;
};

struct ExploreOptions {
  std::string model;
  std::vector<double> start;
  std::string orientation = "plus";
  double delta = 1e-4;
  double leaf_eps = 0.005;
  std::size_t hops = 1;
  std::size_t max_steps = 1000000;
  std::string boundary = "ignore";
  std::vector<double> bounds;
  bool fixed_direction = false;
  double tau = 1e-9;
  bool gnuplot = false;
};

struct FoliateOptions {
  std::string model;
  std::vector<double> start;
  std::vector<double> bisect_start;  // x, y_lo, y_hi, target
  double eps = 0.05;
  double leaf_eps = 0.005;
  double delta = 1e-4;
  double simec_delta = 0.0;  // 0: same as delta
  std::size_t steps = 10000;
  std::size_t max_leaf_steps = 1000000;
  std::string boundary = "ignore";
  std::vector<double> bounds;
  bool allow_outside = false;
  std::vector<double> outer_bounds;
  bool fixed_direction = false;
  double tau = 1e-9;
  unsigned jobs = 1;
  bool oracle_check = false;
  std::size_t oracle_resolution = 512;
  bool gnuplot = false;
};

struct OracleOptions {
  std::string model;
  std::string field;
  std::vector<double> bounds;
  std::size_t resolution = 512;
  std::vector<double> level;     // zero or one value
  std::vector<double> interval;  // zero or two values
  bool gnuplot = false;
};

struct ValidateOptions {
  std::string suite = "all";
  std::uint64_t seed = 7;
  unsigned jobs = 1;
  std::string artifacts;
};

/// Thrown when the validation suite ran but some criterion failed.
struct ValidationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void run_train(TrainOptions o, const std::filesystem::path& out);
void run_trace(TraceOptions o, const std::filesystem::path& out);
void run_explore(ExploreOptions o, const std::filesystem::path& out);
void run_foliate(FoliateOptions o, const std::filesystem::path& out);
void run_oracle(OracleOptions o, const std::filesystem::path& out);
void run_validate(ValidateOptions o, const std::filesystem::path& out);

/// Re-runs the subcommand recorded in a manifest, writing into `out`.
void run_replay(const std::filesystem::path& manifest, const std::filesystem::path& out);

}  // namespace simec::cli
