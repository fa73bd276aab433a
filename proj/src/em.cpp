#include "mfrail/em.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfrail/error.hpp"
#include "mfrail/pair_math.hpp"

namespace mfrail {

// ---------------------------------------------------------------------------
// E-step
// ---------------------------------------------------------------------------

PairExpectation estep_pair_expectation(double u_j, double u_k, int event_j, int event_k,
                                       double rho_jk) {
  PairExpectation e;
  e.w_j = pair_math::conditional_frailty(u_j, u_k, event_j, event_k, rho_jk);
  e.w_k = pair_math::conditional_frailty(u_k, u_j, event_k, event_j, rho_jk);
  if (!(e.w_j > 0.0) || !(e.w_k > 0.0) || !std::isfinite(e.w_j) || !std::isfinite(e.w_k))
    throw DegenerateError("E-step degenerate pair");
  return e;
}

PairExpectation estep_pair_expectation(const Observation& obs_j, const Observation& obs_k,
                                       const ModelParams& params,
                                       const BaselineFunction& baseline) {
  const double rho = params.corr.pair_rho(obs_j.member_index, obs_k.member_index);
  return estep_pair_expectation(u_value(obs_j, params.beta, baseline),
                                u_value(obs_k, params.beta, baseline), obs_j.event,
                                obs_k.event, rho);
}

EStepWeights estep_weights(const IndexedData& data, const CorrelationModel& corr,
                           const Eigen::VectorXd& u) {
  const auto& event = data.event();
  const auto& member = data.member();
  EStepWeights out;
  out.w_hat = Eigen::VectorXd::Zero(data.n_obs());
  for (int i = 0; i < data.n_clusters(); ++i) {
    const int b = data.cluster_begin(i);
    const int e = data.cluster_end(i);
    if (e - b == 1) {
      out.w_hat(b) = (1.0 + event[b]) / (1.0 + u(b));
      continue;
    }
    for (int j = b; j < e; ++j) {
      for (int k = j + 1; k < e; ++k) {
        const PairExpectation pe = estep_pair_expectation(
            u(j), u(k), event[j], event[k], corr.pair_rho(member[j], member[k]));
        out.w_hat(j) += pe.w_j;
        out.w_hat(k) += pe.w_k;
      }
    }
    out.w_hat.segment(b, e - b) /= static_cast<double>(e - b - 1);
  }
  return out;
}

EStepWeights estep_weights(const Dataset& data, const ModelParams& params,
                           const BaselineFunction& baseline) {
  const IndexedData idx(data.clusters(), baseline.jump_times());
  const Eigen::VectorXd u = idx.u_values(params.beta, idx.jumps_from(baseline));
  return estep_weights(idx, params.corr, u);
}

// ---------------------------------------------------------------------------
// M-step
// ---------------------------------------------------------------------------

namespace {

struct PartialLik {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd info;
  double info_scale = 0.0;
};

// Breslow partial log-likelihood with case weights w_hat exp(Z'beta). The
// linear predictor is shifted by its maximum before exponentiation; the shift
// is added back to the value.
PartialLik weighted_partial(const IndexedData& data, const Eigen::VectorXd& w_hat,
                            const Eigen::VectorXd& beta, bool derivatives) {
  const int p = data.n_covariates();
  const int Q = data.n_jumps();
  const Eigen::VectorXd eta = data.Z() * beta;
  const double shift = eta.size() ? eta.maxCoeff() : 0.0;
  const auto& order = data.order_desc();
  const auto& time = data.time();
  const auto& jt = data.jump_times();
  const auto& d = data.failures_at();

  PartialLik out;
  if (derivatives) {
    out.grad = Eigen::VectorXd::Zero(p);
    out.info = Eigen::MatrixXd::Zero(p, p);
  }
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  std::size_t next = 0;
  for (int q = Q - 1; q >= 0; --q) {
    while (next < order.size() && time[order[next]] >= jt[q]) {
      const int j = order[next++];
      const double r = w_hat(j) * std::exp(eta(j) - shift);
      s0 += r;
      if (derivatives) {
        const auto z = data.Z().row(j).transpose();
        s1.noalias() += r * z;
        s2.noalias() += r * z * z.transpose();
      }
    }
    if (d[q] == 0) continue;
    out.value += data.failure_z_sum().row(q).dot(beta) - d[q] * (std::log(s0) + shift);
    if (derivatives) {
      const Eigen::VectorXd zbar = s1 / s0;
      out.grad += data.failure_z_sum().row(q).transpose() - d[q] * zbar;
      out.info += d[q] * (s2 / s0 - zbar * zbar.transpose());
      out.info_scale += d[q] * (s2.diagonal().sum() / s0);
    }
  }
  return out;
}

Eigen::VectorXd project_to_box(const Eigen::VectorXd& beta, double bound, bool& projected) {
  const double n = beta.norm();
  projected = n > bound;
  return projected ? Eigen::VectorXd(beta * (bound / n)) : beta;
}

}  // namespace

MStepBetaResult mstep_beta(const IndexedData& data, const EStepWeights& weights,
                           const Eigen::VectorXd& beta_init, const NewtonOptions& options) {
  MStepBetaResult res;
  bool projected = false;
  res.beta = project_to_box(beta_init, options.beta_bound, projected);
  res.at_boundary = projected;
  if (data.n_covariates() == 0) return res;

  for (int it = 0; it < options.max_iters; ++it) {
    const PartialLik cur = weighted_partial(data, weights.w_hat, res.beta, true);
    res.iterations = it;
    res.grad_norm = cur.grad.norm();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cur.info);
    const Eigen::VectorXd D = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(D.minCoeff() > 1e-12 * std::max(cur.info_scale, 1e-300)))
      throw DegenerateError("degenerate design: singular information in the beta M-step");
    if (res.grad_norm < options.grad_tol) return res;

    const Eigen::VectorXd step = ldlt.solve(cur.grad);

    double t = 1.0;
    Eigen::VectorXd cand;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, t *= 0.5) {
      cand = project_to_box(res.beta + t * step, options.beta_bound, projected);
      const double val = weighted_partial(data, weights.w_hat, cand, false).value;
      if (val >= cur.value - 1e-12 * std::abs(cur.value)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent along the Newton direction at machine precision: the
      // current point is as good as this iteration can do.
      return res;
    }
    if (projected) {
      const bool stalled = (cand - res.beta).norm() <= 1e-12 * std::max(1.0, res.beta.norm());
      res.beta = cand;
      res.at_boundary = true;
      if (stalled) return res;
      continue;
    }
    res.at_boundary = false;
    res.beta = cand;
  }
  const PartialLik last = weighted_partial(data, weights.w_hat, res.beta, true);
  res.grad_norm = last.grad.norm();
  res.iterations = options.max_iters;
  if (res.grad_norm < options.grad_tol || res.at_boundary) return res;
  std::ostringstream os;
  os << "beta M-step did not converge in " << options.max_iters
     << " Newton iterations (gradient norm " << res.grad_norm << ")";
  throw ConvergenceError(os.str());
}

MStepBetaResult mstep_beta(const Dataset& data, const EStepWeights& weights,
                           const Eigen::VectorXd& beta_init, const NewtonOptions& options) {
  return mstep_beta(IndexedData(data), weights, beta_init, options);
}

Eigen::VectorXd mstep_jumps(const IndexedData& data, const EStepWeights& weights,
                            const Eigen::VectorXd& beta) {
  const int Q = data.n_jumps();
  const Eigen::VectorXd eta = data.Z() * beta;
  const auto& order = data.order_desc();
  const auto& time = data.time();
  const auto& jt = data.jump_times();
  const auto& d = data.failures_at();
  Eigen::VectorXd jumps = Eigen::VectorXd::Zero(Q);
  double s0 = 0.0;
  std::size_t next = 0;
  for (int q = Q - 1; q >= 0; --q) {
    while (next < order.size() && time[order[next]] >= jt[q]) {
      const int j = order[next++];
      s0 += weights.w_hat(j) * std::exp(eta(j));
    }
    if (d[q] == 0) continue;
    if (!(s0 > 0.0)) throw DegenerateError("empty risk set at a failure time");
    jumps(q) = d[q] / s0;
  }
  return jumps;
}

BaselineFunction mstep_baseline(const Dataset& data, const EStepWeights& weights,
                                const Eigen::VectorXd& beta) {
  const IndexedData idx(data);
  return idx.baseline(mstep_jumps(idx, weights, beta));
}

// ---------------------------------------------------------------------------
// Correlation step
// ---------------------------------------------------------------------------

namespace {

constexpr int kRhoGrid = 34;
constexpr double kLocalHalfWidth = 0.05;

CorrelationModel with_rho(const CorrelationModel& base, double rho) {
  return base.with_params(Eigen::VectorXd::Constant(1, rho));
}

}  // namespace

RhoResult maximize_rho(const IndexedData& data, const Eigen::VectorXd& beta,
                       const Eigen::VectorXd& jumps, const CorrelationModel& corr_init,
                       const RhoBounds& bounds) {
  RhoResult res;
  res.corr = corr_init;
  if (corr_init.n_params() == 0) {
    res.loglik = data.composite_loglik(beta, corr_init, jumps);
    return res;
  }
  if (!(bounds.lower >= 0.0 && bounds.upper <= CorrelationModel::kRhoMax &&
        bounds.lower <= bounds.upper))
    throw ParameterError("rho bounds must satisfy 0 <= lower <= upper <= rho_max");

  const Eigen::VectorXd u = data.u_values(beta, jumps);
  auto profile = [&](double rho) {
    return data.rho_dependent_loglik(with_rho(corr_init, rho), u);
  };
  auto refine = [&](double lo, double hi) {
    const auto r = boost::math::tools::brent_find_minima(
        [&](double rho) { return -profile(rho); }, lo, hi,
        std::numeric_limits<double>::digits / 2);
    return std::make_pair(r.first, -r.second);
  };

  const double init = std::clamp(corr_init.rho(), bounds.lower, bounds.upper);
  double best_rho = init;
  double best_val = profile(init);

  // Local search first; fall back to the global grid when the local optimum
  // sits on the edge of its window.
  const double lo = std::max(bounds.lower, init - kLocalHalfWidth);
  const double hi = std::min(bounds.upper, init + kLocalHalfWidth);
  bool need_global = true;
  if (hi > lo) {
    const auto [r, val] = refine(lo, hi);
    if (val > best_val) {
      best_rho = r;
      best_val = val;
    }
    const double edge_tol = 1e-6;
    need_global = (best_rho - lo < edge_tol && lo > bounds.lower) ||
                  (hi - best_rho < edge_tol && hi < bounds.upper);
  }
  if (need_global) {
    const double span = bounds.upper - bounds.lower;
    int argmax = 0;
    double grid_best = -std::numeric_limits<double>::infinity();
    std::vector<double> grid(kRhoGrid);
    for (int g = 0; g < kRhoGrid; ++g) {
      grid[g] = g + 1 == kRhoGrid ? bounds.upper : bounds.lower + span * g / (kRhoGrid - 1);
      const double val = profile(grid[g]);
      if (val > grid_best) {
        grid_best = val;
        argmax = g;
      }
    }
    if (grid_best > best_val) {
      best_val = grid_best;
      best_rho = grid[argmax];
    }
    const double glo = grid[std::max(argmax - 1, 0)];
    const double ghi = grid[std::min(argmax + 1, kRhoGrid - 1)];
    if (ghi > glo) {
      const auto [r, val] = refine(glo, ghi);
      if (val > best_val) {
        best_rho = r;
        best_val = val;
      }
    }
  }
  best_rho = std::clamp(best_rho, bounds.lower, bounds.upper);
  res.corr = with_rho(corr_init, best_rho);
  res.at_boundary =
      best_rho - bounds.lower < 1e-6 || bounds.upper - best_rho < 1e-6;
  res.loglik = data.composite_loglik(beta, res.corr, jumps);
  return res;
}

RhoResult maximize_rho(const Dataset& data, const Eigen::VectorXd& beta,
                       const BaselineFunction& baseline, const CorrelationModel& corr_init,
                       const RhoBounds& bounds) {
  const IndexedData idx(data.clusters(), baseline.jump_times());
  return maximize_rho(idx, beta, idx.jumps_from(baseline), corr_init, bounds);
}

// ---------------------------------------------------------------------------
// Hybrid fit
// ---------------------------------------------------------------------------

void FitConfig::validate() const {
  if (!(tol_params > 0.0) || !(tol_loglik > 0.0))
    throw ParameterError("fit tolerances must be positive");
  if (max_outer_iters < 1 || max_newton_iters < 1 || max_em_sweeps < 1)
    throw ParameterError("fit iteration budgets must be positive");
  if (!(beta_bound > 0.0)) throw ParameterError("beta bound must be positive");
  if (!(rho_bounds.lower >= 0.0 && rho_bounds.upper <= CorrelationModel::kRhoMax &&
        rho_bounds.lower <= rho_bounds.upper))
    throw ParameterError("rho bounds must satisfy 0 <= lower <= upper <= rho_max");
}

namespace {

double sup_change(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, std::abs(a[q] - b[q]));
  return m;
}

CorrelationModel initial_correlation(const FitConfig& config) {
  switch (config.correlation) {
    case CorrelationKind::Fixed: return CorrelationModel::fixed(config.fixed_matrix);
    case CorrelationKind::AR1:
      return CorrelationModel::ar1(
          std::clamp(config.init_rho, config.rho_bounds.lower, config.rho_bounds.upper));
    case CorrelationKind::Exchangeable: break;
  }
  return CorrelationModel::exchangeable(
      std::clamp(config.init_rho, config.rho_bounds.lower, config.rho_bounds.upper));
}

}  // namespace

FitResult fit(const Dataset& data, const FitConfig& config) {
  config.validate();
  const IndexedData idx(data);
  const int p = idx.n_covariates();

  FitResult res;
  res.rho_estimated = config.estimate_rho && config.correlation != CorrelationKind::Fixed;
  CorrelationModel corr = initial_correlation(config);

  Eigen::VectorXd beta = config.init_beta.value_or(Eigen::VectorXd::Zero(p));
  if (beta.size() != p) throw ParameterError("init_beta has the wrong length");
  check_beta_box(beta, config.beta_bound);

  NewtonOptions newton;
  newton.max_iters = config.max_newton_iters;
  newton.beta_bound = config.beta_bound;

  EStepWeights ones{Eigen::VectorXd::Ones(idx.n_obs())};
  Eigen::VectorXd jumps = mstep_jumps(idx, ones, beta);
  double loglik = idx.composite_loglik(beta, corr, jumps);
  res.loglik_trace.push_back(loglik);

  for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
    const Eigen::VectorXd beta_prev = beta;
    const std::vector<double> cum_prev = idx.cumulative(jumps);
    const double rho_prev = corr.n_params() ? corr.rho() : 0.0;
    const double loglik_prev = loglik;

    for (int sweep = 0; sweep < config.max_em_sweeps; ++sweep) {
      const std::vector<double> cum_before = idx.cumulative(jumps);
      const EStepWeights w = estep_weights(idx, corr, idx.u_values(beta, jumps));
      const MStepBetaResult mb = mstep_beta(idx, w, beta, newton);
      const Eigen::VectorXd jumps_new = mstep_jumps(idx, w, mb.beta);
      const double change =
          std::max(p ? (mb.beta - beta).lpNorm<Eigen::Infinity>() : 0.0,
                   sup_change(idx.cumulative(jumps_new), cum_before));
      beta = mb.beta;
      jumps = jumps_new;
      res.beta_at_boundary = mb.at_boundary;
      ++res.n_em_sweeps;
      if (change < 10.0 * config.tol_params) break;
    }

    if (res.rho_estimated) {
      const RhoResult r = maximize_rho(idx, beta, jumps, corr, config.rho_bounds);
      corr = r.corr;
      res.rho_at_boundary = r.at_boundary;
      loglik = r.loglik;
    } else {
      loglik = idx.composite_loglik(beta, corr, jumps);
    }
    res.loglik_trace.push_back(loglik);
    res.n_outer_iters = outer;

    const double change = std::max(
        {p ? (beta - beta_prev).lpNorm<Eigen::Infinity>() : 0.0,
         std::abs((corr.n_params() ? corr.rho() : 0.0) - rho_prev),
         sup_change(idx.cumulative(jumps), cum_prev)});
    if (change < config.tol_params && std::abs(loglik - loglik_prev) < config.tol_loglik) {
      res.converged = true;
      break;
    }
  }

  res.beta = beta;
  res.corr = corr;
  res.baseline = idx.baseline(jumps);
  res.loglik = loglik;
  if (!res.converged) {
    std::ostringstream os;
    os << "hybrid EM did not converge in " << config.max_outer_iters << " outer iterations";
    res.message = os.str();
  }
  return res;
}

}  // namespace mfrail
