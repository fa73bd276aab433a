#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mfrail {

enum class CorrelationKind { Exchangeable, AR1, Fixed };

std::string to_string(CorrelationKind kind);
// Accepts "exchangeable", "ar1" and "fixed" (case-insensitive).
CorrelationKind parse_correlation_kind(const std::string& name);

// Frailty correlation structure R(rho). Pair correlations are always in
// [0, kRhoMax]; the element-wise square root of R is the covariance of the
// Gaussian factors the frailties are built from.
class CorrelationModel {
 public:
  static constexpr double kRhoMax = 0.99;

  static CorrelationModel exchangeable(double rho);
  static CorrelationModel ar1(double rho);
  // `R` is indexed by member_index; it must be symmetric with unit diagonal.
  static CorrelationModel fixed(Eigen::MatrixXd R);

  CorrelationKind kind() const { return kind_; }

  // Number of free correlation parameters (1 for Exchangeable and AR1, 0 for
  // Fixed).
  int n_params() const { return kind_ == CorrelationKind::Fixed ? 0 : 1; }
  Eigen::VectorXd params() const;
  // Scalar parameter; NaN for Fixed.
  double rho() const { return rho_; }

  // Same structure with new parameters, validated against the box.
  CorrelationModel with_params(const Eigen::VectorXd& params) const;
  // Same structure without the box check. Used for numerical derivatives
  // that step slightly outside [0, kRhoMax].
  CorrelationModel with_params_unchecked(const Eigen::VectorXd& params) const;

  // rho_jk for members with the given member indices.
  double pair_rho(int member_j, int member_k) const;
  // d rho_jk / d params (length n_params()).
  Eigen::VectorXd pair_rho_gradient(int member_j, int member_k) const;

  const Eigen::MatrixXd& fixed_matrix() const { return fixed_; }

 private:
  CorrelationModel(CorrelationKind kind, double rho, Eigen::MatrixXd fixed)
      : kind_(kind), rho_(rho), fixed_(std::move(fixed)) {}

  CorrelationKind kind_ = CorrelationKind::Exchangeable;
  double rho_ = 0.0;
  Eigen::MatrixXd fixed_;
};

// R(rho) restricted to the listed members. Throws ParameterError when an
// entry leaves [0, kRhoMax].
Eigen::MatrixXd frailty_corr_matrix(const CorrelationModel& model,
                                    const std::vector<int>& member_indices);
// Members 0..n-1.
Eigen::MatrixXd frailty_corr_matrix(const CorrelationModel& model, int n);

}  // namespace mfrail
