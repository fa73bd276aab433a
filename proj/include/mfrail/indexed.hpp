#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mfrail/baseline.hpp"
#include "mfrail/correlation.hpp"
#include "mfrail/data.hpp"

namespace mfrail {

// Flattened, pre-indexed view of a set of clusters against a fixed set of
// baseline jump times. Observations keep dataset order: cluster by cluster,
// members in their stored order. All fitting and scoring routines run on
// this view; the Dataset-level API builds one on the fly.
class IndexedData {
 public:
  IndexedData(const std::vector<Cluster>& clusters, std::vector<double> jump_times);
  // Jump times are the distinct failure times of the dataset.
  explicit IndexedData(const Dataset& data);

  int n_obs() const { return static_cast<int>(time_.size()); }
  int n_clusters() const { return static_cast<int>(cluster_start_.size()) - 1; }
  int n_covariates() const { return static_cast<int>(Z_.cols()); }
  int n_jumps() const { return static_cast<int>(jump_times_.size()); }

  int cluster_begin(int i) const { return cluster_start_[i]; }
  int cluster_end(int i) const { return cluster_start_[i + 1]; }

  const Eigen::MatrixXd& Z() const { return Z_; }
  const std::vector<double>& time() const { return time_; }
  const std::vector<int>& event() const { return event_; }
  const std::vector<int>& member() const { return member_; }
  const std::vector<double>& jump_times() const { return jump_times_; }
  // Number of jump times <= time of each observation.
  const std::vector<int>& n_le() const { return n_le_; }
  // Jump index of each failure, -1 for censored records and for failures
  // that do not sit on a jump time.
  const std::vector<int>& jump_index() const { return jump_index_; }
  // Failures pooled on each jump time.
  const std::vector<int>& failures_at() const { return failures_at_; }
  // Observation indices sorted by decreasing time.
  const std::vector<int>& order_desc() const { return order_desc_; }
  // Sum of covariates over the failures at each jump time (Q x p).
  const Eigen::MatrixXd& failure_z_sum() const { return failure_z_sum_; }

  std::vector<double> cumulative(const Eigen::VectorXd& jumps) const;
  // u = Lambda(Y) exp(Z'beta) for every observation.
  Eigen::VectorXd u_values(const Eigen::VectorXd& beta, const Eigen::VectorXd& jumps) const;

  // Mean composite log-likelihood over clusters. Throws
  // BaselineSupportError when a failure carries no positive jump.
  double composite_loglik(const Eigen::VectorXd& beta, const CorrelationModel& corr,
                          const Eigen::VectorXd& jumps) const;
  // Composite log-likelihood of one cluster.
  double cluster_loglik(int i, const Eigen::VectorXd& beta, const CorrelationModel& corr,
                        const Eigen::VectorXd& jumps, const Eigen::VectorXd& u) const;

  // Parts of the mean composite log-likelihood that depend on rho, given u.
  double rho_dependent_loglik(const CorrelationModel& corr, const Eigen::VectorXd& u) const;

  BaselineFunction baseline(const Eigen::VectorXd& jumps) const;
  // Jump sizes of `baseline` read at this view's jump times (zero where the
  // baseline has no jump).
  Eigen::VectorXd jumps_from(const BaselineFunction& baseline) const;

 private:
  Eigen::MatrixXd Z_;
  std::vector<double> time_;
  std::vector<int> event_;
  std::vector<int> member_;
  std::vector<int> cluster_start_;
  std::vector<double> jump_times_;
  std::vector<int> n_le_;
  std::vector<int> jump_index_;
  std::vector<int> failures_at_;
  std::vector<int> order_desc_;
  Eigen::MatrixXd failure_z_sum_;
};

}  // namespace mfrail
