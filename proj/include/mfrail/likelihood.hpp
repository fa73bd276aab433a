#pragma once

#include <Eigen/Dense>

#include "mfrail/baseline.hpp"
#include "mfrail/correlation.hpp"
#include "mfrail/data.hpp"

namespace mfrail {

// Finite-dimensional parameters: marginal log failure odds ratios and the
// frailty correlation structure.
struct ModelParams {
  Eigen::VectorXd beta;
  CorrelationModel corr = CorrelationModel::exchangeable(0.0);
};

// Throws ParameterError if ||beta|| > beta_bound or beta is not finite.
void check_beta_box(const Eigen::VectorXd& beta, double beta_bound);

struct PairKernel {
  double u_j = 0.0;
  double u_k = 0.0;
  double v = 1.0;
  double w = 1.0;
  double rho_jk = 0.0;
};

// Lambda(Y) exp(Z'beta), with Lambda evaluated right-continuously.
double u_value(const Observation& obs, const Eigen::VectorXd& beta,
               const BaselineFunction& baseline);

// Throws ParameterError when rho_jk is outside [0, rho_max].
PairKernel pair_kernel(double u_j, double u_k, int event_j, int event_k, double rho_jk);
PairKernel pair_kernel(const Observation& obs_j, const Observation& obs_k,
                       const ModelParams& params, const BaselineFunction& baseline);

// log w + d_j log lambda(Y_j) + d_k log lambda(Y_k) + (d_j Z_j + d_k Z_k)'beta
//   - (1 + d_j + d_k) log v
double pairwise_loglik(const Observation& obs_j, const Observation& obs_k,
                       const ModelParams& params, const BaselineFunction& baseline);

// Univariate contribution d [log lambda(Y) + Z'beta] - (1 + d) log(1 + u).
double singleton_loglik(const Observation& obs, const Eigen::VectorXd& beta,
                        const BaselineFunction& baseline);

// Pairs weighted by 1/(n_i - 1); singletons contribute their univariate
// marginal term.
double cluster_composite_loglik(const Cluster& cluster, const ModelParams& params,
                                const BaselineFunction& baseline);

// Mean of the cluster composite log-likelihoods.
double dataset_composite_loglik(const Dataset& data, const ModelParams& params,
                                const BaselineFunction& baseline);

// Marginal proportional-odds survival 1 / (1 + Lambda(t) exp(z'beta)).
double marginal_survival(double t, const Eigen::VectorXd& z, const Eigen::VectorXd& beta,
                         const BaselineFunction& baseline);

}  // namespace mfrail
