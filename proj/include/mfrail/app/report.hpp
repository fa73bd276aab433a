#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfrail/app/csv_input.hpp"
#include "mfrail/em.hpp"
#include "mfrail/simulation.hpp"
#include "mfrail/variance.hpp"

namespace mfrail::app {

struct CoefficientReport {
  std::string name;
  double estimate = 0.0;
  std::optional<double> se;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  double exp_estimate = 0.0;
  std::optional<double> exp_ci_lower;
  std::optional<double> exp_ci_upper;
};

struct RhoReport {
  std::string structure;
  std::optional<double> estimate;  // absent for a fixed matrix
  std::optional<double> se;        // absent when treated as known
  std::optional<double> ci_lower;  // truncated to the admissible range
  std::optional<double> ci_upper;
  bool estimated = false;
  bool at_boundary = false;
};

struct BaselinePoint {
  double time = 0.0;
  double cumulative_hazard = 0.0;
  std::optional<double> se;
};

struct FitReport {
  std::vector<CoefficientReport> coefficients;
  RhoReport rho;
  std::vector<BaselinePoint> baseline;
  double loglik = 0.0;
  int outer_iterations = 0;
  int em_sweeps = 0;
  bool converged = false;
  bool beta_at_boundary = false;
  std::string message;
  std::size_t n_clusters = 0;
  std::size_t n_observations = 0;
  std::size_t n_events = 0;
  std::vector<std::string> warnings;
  nlohmann::json config;  // echo of the inputs that produced the fit
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const FitReport& r);
void from_json(const nlohmann::json& j, FitReport& r);

// `est` is null when the sandwich could not be formed; SE fields are then
// left empty.
FitReport make_fit_report(const LoadedData& loaded, const FitResult& fit,
                          const SandwichEstimate* est, nlohmann::json config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Simulation summaries. JSON and CSV carry raw units; only the display
// table multiplies Bias/SEE/SSE/MSE by 1000.
// ---------------------------------------------------------------------------

nlohmann::json summary_to_json(const SummaryTable& table);
void write_summary_csv(std::ostream& out, const std::vector<SummaryTable>& tables);
void write_display_table(std::ostream& out, const std::vector<SummaryTable>& tables);

}  // namespace mfrail::app
