#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mfrail/baseline.hpp"
#include "mfrail/correlation.hpp"
#include "mfrail/data.hpp"
#include "mfrail/indexed.hpp"
#include "mfrail/likelihood.hpp"

namespace mfrail {

// ---------------------------------------------------------------------------
// E-step
// ---------------------------------------------------------------------------

struct PairExpectation {
  double w_j = 1.0;
  double w_k = 1.0;
};

// Conditional frailty means E[W_j | X_j, X_k] and E[W_k | X_j, X_k]. Throws
// DegenerateError ("E-step degenerate pair") if the closed form breaks down,
// which cannot happen for rho_jk < 1.
PairExpectation estep_pair_expectation(double u_j, double u_k, int event_j, int event_k,
                                       double rho_jk);
PairExpectation estep_pair_expectation(const Observation& obs_j, const Observation& obs_k,
                                       const ModelParams& params,
                                       const BaselineFunction& baseline);

// Averaged conditional frailty expectations, one per observation in dataset
// order (cluster by cluster).
struct EStepWeights {
  Eigen::VectorXd w_hat;
};

EStepWeights estep_weights(const IndexedData& data, const CorrelationModel& corr,
                           const Eigen::VectorXd& u);
EStepWeights estep_weights(const Dataset& data, const ModelParams& params,
                           const BaselineFunction& baseline);

// ---------------------------------------------------------------------------
// M-step
// ---------------------------------------------------------------------------

struct NewtonOptions {
  int max_iters = 50;
  double grad_tol = 1e-9;
  double beta_bound = 20.0;
};

struct MStepBetaResult {
  Eigen::VectorXd beta;
  bool at_boundary = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Root of the frailty-offset partial score: a weighted Cox partial
// likelihood with case weights w_hat exp(Z'beta), Breslow handling of ties.
// Newton-Raphson with step halving; iterates that leave ||beta|| <= bound
// are projected back and flagged. Throws DegenerateError when the
// information is singular and ConvergenceError when the iteration budget is
// exhausted.
MStepBetaResult mstep_beta(const IndexedData& data, const EStepWeights& weights,
                           const Eigen::VectorXd& beta_init, const NewtonOptions& options = {});
MStepBetaResult mstep_beta(const Dataset& data, const EStepWeights& weights,
                           const Eigen::VectorXd& beta_init, const NewtonOptions& options = {});

// Breslow-type jumps: failures at s over sum of w_hat exp(Z'beta) at risk.
Eigen::VectorXd mstep_jumps(const IndexedData& data, const EStepWeights& weights,
                            const Eigen::VectorXd& beta);
BaselineFunction mstep_baseline(const Dataset& data, const EStepWeights& weights,
                                const Eigen::VectorXd& beta);

// ---------------------------------------------------------------------------
// Correlation step
// ---------------------------------------------------------------------------

struct RhoBounds {
  double lower = 0.0;
  double upper = CorrelationModel::kRhoMax;
};

struct RhoResult {
  CorrelationModel corr = CorrelationModel::exchangeable(0.0);
  double loglik = 0.0;
  bool at_boundary = false;
};

// Maximizes the composite log-likelihood over rho with beta and Lambda held
// fixed. A grid scan brackets the best cell and Brent's method refines it;
// the result never scores below `corr_init`. Fixed structures are returned
// unchanged.
RhoResult maximize_rho(const IndexedData& data, const Eigen::VectorXd& beta,
                       const Eigen::VectorXd& jumps, const CorrelationModel& corr_init,
                       const RhoBounds& bounds = {});
RhoResult maximize_rho(const Dataset& data, const Eigen::VectorXd& beta,
                       const BaselineFunction& baseline, const CorrelationModel& corr_init,
                       const RhoBounds& bounds = {});

// ---------------------------------------------------------------------------
// Hybrid fit
// ---------------------------------------------------------------------------

struct FitConfig {
  double tol_params = 1e-6;
  double tol_loglik = 1e-8;
  int max_outer_iters = 500;
  int max_newton_iters = 50;
  int max_em_sweeps = 100;
  double beta_bound = 20.0;
  RhoBounds rho_bounds;
  CorrelationKind correlation = CorrelationKind::Exchangeable;
  Eigen::MatrixXd fixed_matrix;  // used when correlation == Fixed
  std::optional<Eigen::VectorXd> init_beta;  // default zero
  double init_rho = 0.1;
  bool estimate_rho = true;  // false keeps rho at init_rho

  // Throws ParameterError on nonpositive tolerances or empty budgets.
  void validate() const;
};

struct FitResult {
  Eigen::VectorXd beta;
  CorrelationModel corr = CorrelationModel::exchangeable(0.0);
  BaselineFunction baseline;
  double loglik = 0.0;
  int n_outer_iters = 0;
  int n_em_sweeps = 0;
  bool converged = false;
  bool beta_at_boundary = false;
  bool rho_at_boundary = false;
  bool rho_estimated = true;
  std::vector<double> loglik_trace;  // one entry per outer iteration
  std::optional<Eigen::MatrixXd> vcov;  // (beta, rho) covariance, set by the variance module
  std::string message;

  double rho() const { return corr.rho(); }
};

// Alternates EM sweeps in (beta, Lambda) at fixed rho with a direct rho
// maximization, until the outer parameter change and log-likelihood change
// fall below tolerance. Non-convergence is reported through `converged`;
// M-step errors propagate.
FitResult fit(const Dataset& data, const FitConfig& config = {});

}  // namespace mfrail
