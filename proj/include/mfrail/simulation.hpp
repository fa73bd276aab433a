#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mfrail/correlation.hpp"
#include "mfrail/data.hpp"
#include "mfrail/em.hpp"

namespace mfrail {

// One Monte Carlo design. Failure times follow the conditional hazard
// w exp(z'beta) dLambda0(t) with Lambda0(t) = baseline_scale * t^baseline_shape;
// censoring is min(censor_cap, Exp(mean censor_mean)).
struct ScenarioConfig {
  std::string name = "custom";
  int m_clusters = 200;
  int cluster_size_min = 5;
  int cluster_size_max = 7;
  Eigen::VectorXd beta_true = (Eigen::VectorXd(2) << 1.2, 2.5).finished();
  double z1_sd = 0.7071067811865476;  // Var(Z1) = 0.5
  double rho_true = 0.5;
  double baseline_scale = 2.0 / 3.0;
  double baseline_shape = 1.5;
  CorrelationKind corr_kind = CorrelationKind::Exchangeable;
  double censor_mean = 3.64;
  double censor_cap = 10.0;
  int n_reps = 200;
  std::uint64_t master_seed = 20240521;

  // Throws ParameterError.
  void validate() const;

  double cumulative_baseline(double t) const;
  double baseline_inverse(double x) const;
};

// table 1 -> exchangeable, table 2 -> AR(1); censoring 40 or 75 (percent)
// selects an exponential censoring mean of 3.64 or 0.59.
ScenarioConfig table_scenario(int table, double rho, int censoring_percent, int n_reps,
                              std::uint64_t master_seed);

// key = value lines; '#' starts a comment. Keys mirror ScenarioConfig field
// names, beta_true is comma separated, corr_kind is exchangeable|ar1.
// Throws ParameterError on unknown keys or bad values.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

// Per-replicate seed derived from the master seed (splitmix64 mixing).
std::uint64_t rep_seed(std::uint64_t master_seed, int rep);

Cluster generate_cluster(const ScenarioConfig& cfg, std::mt19937_64& rng,
                         const std::string& id = "0");
Dataset generate_dataset(const ScenarioConfig& cfg, std::mt19937_64& rng);

struct RepResult {
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;  // fitted, converged and sandwich available
  bool converged = false;
  std::string message;
  double censoring_fraction = 0.0;
  Eigen::VectorXd beta_hat;
  double rho_hat = 0.0;
  Eigen::VectorXd se_beta;
  double se_rho = 0.0;  // NaN when rho was on its bound
  std::vector<bool> ci_covers;  // beta entries, then rho
};

RepResult run_rep(const ScenarioConfig& cfg, const FitConfig& fit_config, int rep,
                  std::uint64_t seed);

struct ParameterSummary {
  std::string name;
  double truth = 0.0;
  double bias = 0.0;
  double see = 0.0;  // mean model-based SE
  double sse = 0.0;  // Monte Carlo standard deviation
  double mse = 0.0;  // bias^2 + sse^2
  double coverage = 0.0;
  int n = 0;
};

struct SummaryTable {
  ScenarioConfig scenario;
  std::vector<ParameterSummary> rows;  // beta_0 .. beta_{p-1}, rho
  int n_reps = 0;
  int n_used = 0;
  int n_failed = 0;
  bool flagged = false;  // more than 5% of reps failed
  double mean_censoring = 0.0;
  std::vector<std::string> failures;
};

// Aggregates in rep order, so the result does not depend on execution order.
SummaryTable summarize(const ScenarioConfig& cfg, const std::vector<RepResult>& reps);

// Runs cfg.n_reps generate -> fit -> sandwich pipelines. `threads` <= 0 uses
// the hardware concurrency. Throws ParameterError when n_reps < 2.
SummaryTable run_scenario(const ScenarioConfig& cfg, const FitConfig& fit_config,
                          int threads = 0);

}  // namespace mfrail
