#pragma once

// Self-contained acceptance suite: closed-form checks, oracle comparisons on
// freshly trained models, and a determinism re-run.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace simec {

enum class Suite {
  exact,     // 1, 2
  oracle,    // 3, 4, 5
  all,       // 1..9
  long_run,  // energy at the fine step and full step count
};

std::string_view to_string(Suite s);
Suite parse_suite(std::string_view name);

/// Criterion ids run by a suite; the long run has id 10.
std::vector<int> suite_criteria(Suite s);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  std::filesystem::path artifacts_dir;  // empty: keep artifacts in memory only
  unsigned jobs = 1;
  std::function<void(const CriterionResult&)> on_result;
};

struct SuiteReport {
  Suite suite = Suite::all;
  std::uint64_t seed = 7;
  std::vector<CriterionResult> results;

  bool passed() const;
  std::string to_json() const;
  /// One "[PASS]/[FAIL] <id> <name>: <detail>" line per criterion.
  std::string summary() const;
};

SuiteReport run_suite(Suite suite, const SuiteOptions& opts);
/// Runs the listed criterion ids (1..10) in one session, in order.
SuiteReport run_criteria(const std::vector<int>& ids, const SuiteOptions& opts);

/// "[PASS] 4 circle trace: ..." style line.
std::string format_result(const CriterionResult& r);

/// Bisection for g(t) = target on [lo, hi], stopped once the bracket is
/// narrower than `tol`. Throws ConfigError without a sign change.
double bisect_level(const std::function<double(double)>& g, double lo, double hi, double target,
                    double tol = 1e-6);

}  // namespace simec
