#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mfrail/baseline.hpp"
#include "mfrail/data.hpp"
#include "mfrail/em.hpp"
#include "mfrail/indexed.hpp"
#include "mfrail/likelihood.hpp"

namespace mfrail {

// Gradient of a composite log-likelihood in the coordinates
// (beta, rho params, jump sizes at t_(1) .. t_(Q)).
struct ScoreVector {
  Eigen::VectorXd entries;
  int n_beta = 0;
  int n_rho = 0;
  int n_jumps = 0;
};

// Analytic gradient of one cluster's composite log-likelihood; the jump
// coordinates are those of `baseline`.
ScoreVector cluster_score(const Cluster& cluster, const ModelParams& params,
                          const BaselineFunction& baseline);

// Per-cluster gradients S_i as rows of an m x dim matrix. With
// `include_rho` false the rho column is omitted.
Eigen::MatrixXd cluster_scores(const IndexedData& data, const Eigen::VectorXd& beta,
                               const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                               bool include_rho = true);

// Gradient of the mean composite log-likelihood, (1/m) sum_i S_i.
Eigen::VectorXd composite_score(const IndexedData& data, const Eigen::VectorXd& beta,
                                const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                                bool include_rho = true);

// Packs/unpacks the coordinate vector used by the score and Hessian.
Eigen::VectorXd pack_coordinates(const Eigen::VectorXd& beta, const CorrelationModel& corr,
                                 const Eigen::VectorXd& jumps, bool include_rho = true);

// Hessian of the mean composite log-likelihood: central differences of the
// analytic score with relative step 1e-5, then symmetrized. Throws Error
// naming the coordinate if an entry is not finite.
Eigen::MatrixXd hessian(const IndexedData& data, const Eigen::VectorXd& beta,
                        const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                        bool include_rho = true);
Eigen::MatrixXd hessian(const Dataset& data, const ModelParams& params,
                        const BaselineFunction& baseline);

struct SandwichEstimate {
  Eigen::MatrixXd H;            // Hessian of the mean composite log-likelihood
  Eigen::MatrixXd J;            // mean outer product of cluster scores
  Eigen::MatrixXd vcov_finite;  // covariance of (beta, rho), already divided by m
  Eigen::VectorXd se;           // sqrt(diag(vcov_finite))
  std::vector<double> jump_times;
  int m = 0;
  int n_beta = 0;
  int n_rho = 0;                // 0 when rho is fixed or on the boundary
  double rcond = 0.0;           // reciprocal condition estimate of H
  Eigen::PartialPivLU<Eigen::MatrixXd> H_lu;

  int dim() const { return n_beta + n_rho + static_cast<int>(jump_times.size()); }
};

// H^{-1} J H^{-1} / m restricted to (beta, rho). When rho was not estimated
// or sits on its bound it is treated as known and dropped from the
// coordinates. Throws DegenerateError("information singular") with the
// condition estimate when H cannot be inverted.
SandwichEstimate sandwich(const Dataset& data, const FitResult& fit);

// Linear functional h1'beta + h2'rho + sum_q h3(t_q) dLambda(t_q).
struct ContrastVector {
  Eigen::VectorXd h1;
  Eigen::VectorXd h2;
  std::vector<double> h3;  // values at the jump times; empty means zero

  // h1 = h2 = 0 and h3 = 1{s <= t}: the contrast for Lambda(t).
  static ContrastVector cumulative_hazard(const SandwichEstimate& est, double t);
  static ContrastVector unit(const SandwichEstimate& est, int coordinate);
};

// h' H^{-1} J H^{-1} h: asymptotic variance of sqrt(m) times the contrast.
// Throws ParameterError unless ||h1|| <= 1, ||h2|| <= 1 and the total
// variation norm of h3 is at most 1.
double contrast_variance(const SandwichEstimate& est, const ContrastVector& h);

}  // namespace mfrail
