#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace mfrail {

// One right-censored record. `time` is min(T, C); `event` is 1 when the
// failure was observed. `member_index` is the subject's position inside its
// cluster and drives AR(1) distances.
struct Observation {
  double time = 0.0;
  int event = 0;
  Eigen::VectorXd covariates;
  int member_index = 0;
};

struct Cluster {
  std::string id;
  std::vector<Observation> members;

  std::size_t size() const { return members.size(); }
};

// Validated collection of independent clusters.
class Dataset {
 public:
  static constexpr std::size_t kDefaultMaxClusterSize = 1000;

  // Throws DataError when an invariant fails: empty input, no failures,
  // mismatched covariate dimension, negative times, duplicate member indices,
  // non-finite covariates, or a cluster larger than `max_cluster_size`.
  // `tau` defaults to the largest observed time.
  static Dataset make(std::vector<Cluster> clusters,
                      std::optional<double> tau = std::nullopt,
                      std::size_t max_cluster_size = kDefaultMaxClusterSize);

  const std::vector<Cluster>& clusters() const { return clusters_; }
  std::size_t n_clusters() const { return clusters_.size(); }
  std::size_t n_observations() const;
  std::size_t n_events() const;
  int n_covariates() const { return p_; }
  double tau() const { return tau_; }

  // Distinct observed failure times, ascending.
  std::vector<double> failure_times() const;

 private:
  Dataset() = default;
  std::vector<Cluster> clusters_;
  double tau_ = 0.0;
  int p_ = 0;
};

}  // namespace mfrail
