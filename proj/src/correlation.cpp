#include "mfrail/correlation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "mfrail/error.hpp"

namespace mfrail {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= CorrelationModel::kRhoMax)) {
    std::ostringstream os;
    os << "correlation parameter " << rho << " outside [0, " << CorrelationModel::kRhoMax
       << "]";
    throw ParameterError(os.str());
  }
}

}  // namespace

std::string to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::Exchangeable: return "exchangeable";
    case CorrelationKind::AR1: return "ar1";
    case CorrelationKind::Fixed: return "fixed";
  }
  return "unknown";
}

CorrelationKind parse_correlation_kind(const std::string& name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "exchangeable" || s == "exch") return CorrelationKind::Exchangeable;
  if (s == "ar1" || s == "ar(1)") return CorrelationKind::AR1;
  if (s == "fixed") return CorrelationKind::Fixed;
  throw ParameterError("unknown correlation structure '" + name + "'");
}

CorrelationModel CorrelationModel::exchangeable(double rho) {
  check_rho(rho);
  return CorrelationModel(CorrelationKind::Exchangeable, rho, {});
}

CorrelationModel CorrelationModel::ar1(double rho) {
  check_rho(rho);
  return CorrelationModel(CorrelationKind::AR1, rho, {});
}

CorrelationModel CorrelationModel::fixed(Eigen::MatrixXd R) {
  if (R.rows() != R.cols() || R.rows() == 0)
    throw ParameterError("fixed correlation matrix must be square and non-empty");
  for (Eigen::Index j = 0; j < R.rows(); ++j) {
    if (std::abs(R(j, j) - 1.0) > 1e-12)
      throw ParameterError("fixed correlation matrix must have unit diagonal");
    for (Eigen::Index k = 0; k < j; ++k) {
      if (std::abs(R(j, k) - R(k, j)) > 1e-12)
        throw ParameterError("fixed correlation matrix must be symmetric");
      check_rho(R(j, k));
    }
  }
  return CorrelationModel(CorrelationKind::Fixed, std::nan(""), std::move(R));
}

Eigen::VectorXd CorrelationModel::params() const {
  if (kind_ == CorrelationKind::Fixed) return Eigen::VectorXd(0);
  return Eigen::VectorXd::Constant(1, rho_);
}

CorrelationModel CorrelationModel::with_params(const Eigen::VectorXd& params) const {
  if (params.size() != n_params())
    throw ParameterError("wrong number of correlation parameters");
  if (kind_ == CorrelationKind::Fixed) return *this;
  check_rho(params(0));
  return CorrelationModel(kind_, params(0), fixed_);
}

CorrelationModel CorrelationModel::with_params_unchecked(const Eigen::VectorXd& params) const {
  if (kind_ == CorrelationKind::Fixed) return *this;
  return CorrelationModel(kind_, params(0), fixed_);
}

double CorrelationModel::pair_rho(int member_j, int member_k) const {
  switch (kind_) {
    case CorrelationKind::Exchangeable: return rho_;
    case CorrelationKind::AR1: return std::pow(rho_, std::abs(member_j - member_k));
    case CorrelationKind::Fixed:
      if (member_j >= fixed_.rows() || member_k >= fixed_.rows())
        throw ParameterError("member_index beyond the fixed correlation matrix");
      return fixed_(member_j, member_k);
  }
  return 0.0;
}

Eigen::VectorXd CorrelationModel::pair_rho_gradient(int member_j, int member_k) const {
  switch (kind_) {
    case CorrelationKind::Exchangeable: return Eigen::VectorXd::Ones(1);
    case CorrelationKind::AR1: {
      const int d = std::abs(member_j - member_k);
      return Eigen::VectorXd::Constant(1, d == 0 ? 0.0 : d * std::pow(rho_, d - 1));
    }
    case CorrelationKind::Fixed: return Eigen::VectorXd(0);
  }
  return Eigen::VectorXd(0);
}

Eigen::MatrixXd frailty_corr_matrix(const CorrelationModel& model,
                                    const std::vector<int>& member_indices) {
  const auto n = static_cast<Eigen::Index>(member_indices.size());
  if (n < 1) throw ParameterError("correlation matrix needs at least one member");
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) {
      const double r = model.pair_rho(member_indices[j], member_indices[k]);
      check_rho(r);
      R(j, k) = R(k, j) = r;
    }
  }
  return R;
}

Eigen::MatrixXd frailty_corr_matrix(const CorrelationModel& model, int n) {
  std::vector<int> idx(static_cast<std::size_t>(std::max(n, 0)));
  for (int j = 0; j < n; ++j) idx[static_cast<std::size_t>(j)] = j;
  return frailty_corr_matrix(model, idx);
}

}  // namespace mfrail
