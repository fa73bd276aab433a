#pragma once

#include <Eigen/Dense>
#include <random>

namespace mfrail {

// Covariance C of the Gaussian vectors behind a multivariate standard
// exponential frailty: C has unit diagonal and C_jk^2 = R_jk.
struct GaussianFactor {
  Eigen::MatrixXd C;
  Eigen::MatrixXd chol;  // lower triangular, chol * chol^T == C
  double min_eigenvalue = 0.0;
};

struct FrailtyVector {
  Eigen::VectorXd w;
};

// Element-wise square root of R followed by a PSD check. Eigenvalues down to
// -1e-10 are clipped to zero; anything lower throws ParameterError naming the
// smallest eigenvalue.
GaussianFactor gaussian_factor(const Eigen::MatrixXd& R);

// Two independent N(0, C) draws V1, V2; returns (V1^2 + V2^2) / 2, which is
// marginally Exp(1) with correlation matrix R.
FrailtyVector sample_frailties(const GaussianFactor& factor, std::mt19937_64& rng);

}  // namespace mfrail
