#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mfrail/data.hpp"
#include "mfrail/simulation.hpp"

namespace mfrail::testing {

inline Observation obs(double time, int event, std::vector<double> z, int member = 0) {
  Observation o;
  o.time = time;
  o.event = event;
  o.covariates = Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  o.member_index = member;
  return o;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Small simulated dataset from the two-covariate design.
inline Dataset simulated(int m_clusters, std::uint64_t seed, double rho = 0.5,
                         CorrelationKind kind = CorrelationKind::Exchangeable,
                         double censor_mean = 3.64) {
  ScenarioConfig cfg;
  cfg.m_clusters = m_clusters;
  cfg.rho_true = rho;
  cfg.corr_kind = kind;
  cfg.censor_mean = censor_mean;
  std::mt19937_64 rng(seed);
  return generate_dataset(cfg, rng);
}

}  // namespace mfrail::testing
