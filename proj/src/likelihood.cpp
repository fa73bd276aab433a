#include "mfrail/likelihood.hpp"

#include <cmath>
#include <sstream>

#include "mfrail/error.hpp"
#include "mfrail/pair_math.hpp"

namespace mfrail {

namespace {

double log_hazard_jump(const Observation& obs, const BaselineFunction& baseline) {
  const double jump = baseline.jump_at(obs.time);
  if (!(jump > 0.0)) {
    std::ostringstream os;
    os << "baseline support violation: failure at time " << obs.time
       << " has no positive baseline jump";
    throw BaselineSupportError(os.str());
  }
  return std::log(jump);
}

double direct_term(const Observation& obs, const Eigen::VectorXd& beta,
                   const BaselineFunction& baseline) {
  if (obs.event == 0) return 0.0;
  return log_hazard_jump(obs, baseline) + obs.covariates.dot(beta);
}

}  // namespace

void check_beta_box(const Eigen::VectorXd& beta, double beta_bound) {
  if (!beta.allFinite() || beta.norm() > beta_bound) {
    std::ostringstream os;
    os << "beta outside the parameter box ||beta|| <= " << beta_bound;
    throw ParameterError(os.str());
  }
}

double u_value(const Observation& obs, const Eigen::VectorXd& beta,
               const BaselineFunction& baseline) {
  return baseline(obs.time) * std::exp(obs.covariates.dot(beta));
}

PairKernel pair_kernel(double u_j, double u_k, int event_j, int event_k, double rho_jk) {
  if (!(rho_jk >= 0.0 && rho_jk <= CorrelationModel::kRhoMax)) {
    std::ostringstream os;
    os << "pair correlation " << rho_jk << " outside [0, " << CorrelationModel::kRhoMax << "]";
    throw ParameterError(os.str());
  }
  PairKernel k;
  k.u_j = u_j;
  k.u_k = u_k;
  k.rho_jk = rho_jk;
  k.v = pair_math::v_term(u_j, u_k, rho_jk);
  k.w = pair_math::w_term(u_j, u_k, event_j, event_k, rho_jk);
  return k;
}

PairKernel pair_kernel(const Observation& obs_j, const Observation& obs_k,
                       const ModelParams& params, const BaselineFunction& baseline) {
  return pair_kernel(u_value(obs_j, params.beta, baseline), u_value(obs_k, params.beta, baseline),
                     obs_j.event, obs_k.event,
                     params.corr.pair_rho(obs_j.member_index, obs_k.member_index));
}

double pairwise_loglik(const Observation& obs_j, const Observation& obs_k,
                       const ModelParams& params, const BaselineFunction& baseline) {
  const PairKernel k = pair_kernel(obs_j, obs_k, params, baseline);
  return std::log(k.w) + direct_term(obs_j, params.beta, baseline) +
         direct_term(obs_k, params.beta, baseline) -
         (1.0 + obs_j.event + obs_k.event) * std::log(k.v);
}

double singleton_loglik(const Observation& obs, const Eigen::VectorXd& beta,
                        const BaselineFunction& baseline) {
  return direct_term(obs, beta, baseline) +
         pair_math::singleton_core(u_value(obs, beta, baseline), obs.event);
}

double cluster_composite_loglik(const Cluster& cluster, const ModelParams& params,
                                const BaselineFunction& baseline) {
  const std::size_t n = cluster.size();
  if (n == 0) throw DataError("cluster '" + cluster.id + "' is empty");
  if (n == 1) return singleton_loglik(cluster.members.front(), params.beta, baseline);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      total += pairwise_loglik(cluster.members[j], cluster.members[k], params, baseline);
  return total / static_cast<double>(n - 1);
}

double dataset_composite_loglik(const Dataset& data, const ModelParams& params,
                                const BaselineFunction& baseline) {
  double total = 0.0;
  for (const Cluster& c : data.clusters()) total += cluster_composite_loglik(c, params, baseline);
  return total / static_cast<double>(data.n_clusters());
}

double marginal_survival(double t, const Eigen::VectorXd& z, const Eigen::VectorXd& beta,
                         const BaselineFunction& baseline) {
  return 1.0 / (1.0 + baseline(t) * std::exp(z.dot(beta)));
}

}  // namespace mfrail
