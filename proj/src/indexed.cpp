#include "mfrail/indexed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mfrail/error.hpp"
#include "mfrail/pair_math.hpp"

namespace mfrail {

IndexedData::IndexedData(const std::vector<Cluster>& clusters, std::vector<double> jump_times)
    : jump_times_(std::move(jump_times)) {
  if (!std::is_sorted(jump_times_.begin(), jump_times_.end()) ||
      std::adjacent_find(jump_times_.begin(), jump_times_.end()) != jump_times_.end())
    throw ParameterError("jump times must be strictly increasing");

  int n = 0;
  int p = -1;
  for (const Cluster& c : clusters) {
    n += static_cast<int>(c.size());
    for (const Observation& o : c.members) {
      if (p < 0) p = static_cast<int>(o.covariates.size());
      if (o.covariates.size() != p) throw DataError("covariate dimension mismatch");
    }
  }
  Z_.resize(n, std::max(p, 0));
  time_.reserve(n);
  event_.reserve(n);
  member_.reserve(n);
  cluster_start_.reserve(clusters.size() + 1);
  cluster_start_.push_back(0);
  int r = 0;
  for (const Cluster& c : clusters) {
    for (const Observation& o : c.members) {
      Z_.row(r++) = o.covariates.transpose();
      time_.push_back(o.time);
      event_.push_back(o.event);
      member_.push_back(o.member_index);
    }
    cluster_start_.push_back(r);
  }

  const int Q = n_jumps();
  n_le_.resize(n);
  jump_index_.assign(n, -1);
  failures_at_.assign(Q, 0);
  failure_z_sum_ = Eigen::MatrixXd::Zero(Q, Z_.cols());
  for (int j = 0; j < n; ++j) {
    n_le_[j] = static_cast<int>(
        std::upper_bound(jump_times_.begin(), jump_times_.end(), time_[j]) - jump_times_.begin());
    if (event_[j] == 1 && n_le_[j] > 0 && jump_times_[n_le_[j] - 1] == time_[j]) {
      const int q = n_le_[j] - 1;
      jump_index_[j] = q;
      failures_at_[q] += 1;
      failure_z_sum_.row(q) += Z_.row(j);
    }
  }
  order_desc_.resize(n);
  std::iota(order_desc_.begin(), order_desc_.end(), 0);
  std::stable_sort(order_desc_.begin(), order_desc_.end(),
                   [this](int a, int b) { return time_[a] > time_[b]; });
}

IndexedData::IndexedData(const Dataset& data)
    : IndexedData(data.clusters(), data.failure_times()) {}

std::vector<double> IndexedData::cumulative(const Eigen::VectorXd& jumps) const {
  std::vector<double> cum(jumps.size());
  double acc = 0.0;
  for (Eigen::Index q = 0; q < jumps.size(); ++q) {
    acc += jumps(q);
    cum[q] = acc;
  }
  return cum;
}

Eigen::VectorXd IndexedData::u_values(const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& jumps) const {
  const std::vector<double> cum = cumulative(jumps);
  const Eigen::VectorXd eta = Z_ * beta;
  Eigen::VectorXd u(n_obs());
  for (int j = 0; j < n_obs(); ++j) {
    const double lam = n_le_[j] == 0 ? 0.0 : cum[n_le_[j] - 1];
    u(j) = lam * std::exp(eta(j));
  }
  return u;
}

double IndexedData::cluster_loglik(int i, const Eigen::VectorXd& beta,
                                   const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                                   const Eigen::VectorXd& u) const {
  const int b = cluster_begin(i);
  const int e = cluster_end(i);
  double direct = 0.0;
  for (int j = b; j < e; ++j) {
    if (event_[j] == 0) continue;
    const int q = jump_index_[j];
    if (q < 0 || !(jumps(q) > 0.0)) {
      std::ostringstream os;
      os << "baseline support violation: failure at time " << time_[j]
         << " has no positive baseline jump";
      throw BaselineSupportError(os.str());
    }
    direct += std::log(jumps(q)) + Z_.row(j).dot(beta);
  }
  const int n = e - b;
  if (n == 1) return direct + pair_math::singleton_core(u(b), event_[b]);
  double pairs = 0.0;
  for (int j = b; j < e; ++j)
    for (int k = j + 1; k < e; ++k)
      pairs += pair_math::core(u(j), u(k), event_[j], event_[k],
                               corr.pair_rho(member_[j], member_[k]));
  return direct + pairs / (n - 1);
}

double IndexedData::composite_loglik(const Eigen::VectorXd& beta, const CorrelationModel& corr,
                                     const Eigen::VectorXd& jumps) const {
  const Eigen::VectorXd u = u_values(beta, jumps);
  double total = 0.0;
  for (int i = 0; i < n_clusters(); ++i) total += cluster_loglik(i, beta, corr, jumps, u);
  return total / n_clusters();
}

double IndexedData::rho_dependent_loglik(const CorrelationModel& corr,
                                         const Eigen::VectorXd& u) const {
  double total = 0.0;
  for (int i = 0; i < n_clusters(); ++i) {
    const int b = cluster_begin(i);
    const int e = cluster_end(i);
    if (e - b < 2) continue;
    double pairs = 0.0;
    for (int j = b; j < e; ++j)
      for (int k = j + 1; k < e; ++k)
        pairs += pair_math::core(u(j), u(k), event_[j], event_[k],
                                 corr.pair_rho(member_[j], member_[k]));
    total += pairs / (e - b - 1);
  }
  return total / n_clusters();
}

BaselineFunction IndexedData::baseline(const Eigen::VectorXd& jumps) const {
  return BaselineFunction(jump_times_, std::vector<double>(jumps.data(), jumps.data() + jumps.size()));
}

Eigen::VectorXd IndexedData::jumps_from(const BaselineFunction& baseline) const {
  Eigen::VectorXd jumps(n_jumps());
  for (int q = 0; q < n_jumps(); ++q) jumps(q) = baseline.jump_at(jump_times_[q]);
  return jumps;
}

}  // namespace mfrail
