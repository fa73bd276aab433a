#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mfrail/app/csv_input.hpp"
#include "mfrail/correlation.hpp"

namespace mfrail::app {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitConvergence = 3 };

constexpr std::uint64_t kDefaultSeed = 20240521;

// MFRAIL_SEED when set to an unsigned integer, else kDefaultSeed.
std::uint64_t default_seed();

struct FitOptions {
  std::string data_path;
  ColumnSpec columns;
  CorrelationKind correlation = CorrelationKind::Exchangeable;
  std::optional<std::string> out_path;  // stdout when empty
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-6;
  int max_outer = 500;
};

// Writes the FitReport JSON. Diagnostics go to `err`.
int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  // "table1", "table2" or a scenario file path.
  std::string scenario = "table1";
  double rho = 0.5;
  int censoring = 40;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;  // overrides the scenario's master seed
  std::optional<std::string> out_prefix;  // writes <prefix>.csv and <prefix>.json
  int threads = 0;
};

// Prints the display table to `out`; exit 3 when the scenario is flagged.
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

struct BenchmarkOptions {
  int reps = 200;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir;
  bool force = false;
  std::optional<int> table;
  std::optional<int> censoring;
  std::optional<double> rho;
  int threads = 0;
};

// The 2 structures x 2 censoring levels x 5 rho grid, filtered by the
// optional selectors. One <name>.csv/.json per scenario plus
// combined.{csv,json,txt}.
int cmd_benchmark(const BenchmarkOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace mfrail::app
