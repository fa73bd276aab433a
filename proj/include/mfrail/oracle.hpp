#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfrail/frailty.hpp"

// Brute-force reference computations for the test suites. Nothing here is
// used on the fitting path.
namespace mfrail::oracle {

struct OracleConfig {
  long n_draws = 1'000'000;
  double fd_step = 1e-6;  // relative
  std::uint64_t seed = 12345;
};

// E exp(-sum_j W_j u_j) = |I + C diag(u)|^{-1}.
double laplace_transform(const Eigen::VectorXd& u, const GaussianFactor& factor);

enum class PairQuantity { SurvivalProb, EStepWj };

struct McEstimate {
  double estimate = 0.0;
  double mc_se = 0.0;
  bool precise = true;  // false when mc_se exceeds 10% of the estimate
};

// Frailty pairs drawn with correlation rho. SurvivalProb averages
// exp(-w_j u_j - w_k u_k); EStepWj is the self-normalized mean of w_j under
// weights w_j^{d_j} w_k^{d_k} exp(-w_j u_j - w_k u_k).
McEstimate mc_pair_quantity(double u_j, double u_k, int event_j, int event_k, double rho,
                            PairQuantity kind, const OracleConfig& cfg = {});

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

// Central differences with step fd_step * max(|x_i|, 1e-3). Throws
// std::runtime_error naming the coordinate on a non-finite evaluation.
Eigen::VectorXd fd_gradient(const ScalarFn& fn, const Eigen::VectorXd& point,
                            const OracleConfig& cfg = {});

// Central mixed second difference d^2 f / dx_i dx_j with absolute step h.
double fd_mixed_partial(const ScalarFn& fn, const Eigen::VectorXd& point, int i, int j,
                        double h);

// One-sample Kolmogorov-Smirnov test; p-value from the asymptotic
// Kolmogorov distribution with the Stephens small-sample correction.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Quasi-Newton (BFGS) maximizer on central-difference gradients with an
// Armijo backtracking line search. Independent of the library solvers.
struct MaximizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
MaximizeResult maximize_bfgs(const ScalarFn& fn, const Eigen::VectorXd& x0,
                             double grad_tol = 1e-9, int max_iters = 5000);

}  // namespace mfrail::oracle
