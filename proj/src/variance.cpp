#include "mfrail/variance.hpp"

#include <cmath>
#include <sstream>

#include "mfrail/error.hpp"
#include "mfrail/pair_math.hpp"

namespace mfrail {

namespace {

int rho_dim(const CorrelationModel& corr, bool include_rho) {
  return include_rho ? corr.n_params() : 0;
}

// Adds the gradient of cluster i's composite log-likelihood. The beta and
// rho parts go straight into `head` (length p + p2); the jump part is left
// in `bucket` keyed by the last jump index each observation has reached, so
// a reverse cumulative sum turns it into d/d dLambda_q.
void cluster_gradient(const IndexedData& data, int i, const CorrelationModel& corr,
                      const Eigen::VectorXd& jumps, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& exp_eta, int p2,
                      Eigen::Ref<Eigen::VectorXd> head, Eigen::Ref<Eigen::VectorXd> bucket,
                      Eigen::Ref<Eigen::VectorXd> direct_jumps) {
  const int p = data.n_covariates();
  const int b = data.cluster_begin(i);
  const int e = data.cluster_end(i);
  const int n = e - b;
  const auto& event = data.event();
  const auto& member = data.member();
  const auto& n_le = data.n_le();
  const auto& jump_index = data.jump_index();

  double gu_local[64];
  std::vector<double> gu_heap;
  double* gu = gu_local;
  if (n > 64) {
    gu_heap.assign(n, 0.0);
    gu = gu_heap.data();
  } else {
    std::fill(gu, gu + n, 0.0);
  }

  for (int j = b; j < e; ++j) {
    if (event[j] == 0) continue;
    const int q = jump_index[j];
    if (q < 0 || !(jumps(q) > 0.0))
      throw BaselineSupportError("baseline support violation in score evaluation");
    if (p) head.head(p) += data.Z().row(j).transpose();
    direct_jumps(q) += 1.0 / jumps(q);
  }

  if (n == 1) {
    gu[0] = -(1.0 + event[b]) / (1.0 + u(b));
  } else {
    const double wgt = 1.0 / (n - 1);
    for (int j = b; j < e; ++j) {
      for (int k = j + 1; k < e; ++k) {
        const double r = corr.pair_rho(member[j], member[k]);
        const auto g = pair_math::core_gradient(u(j), u(k), event[j], event[k], r);
        gu[j - b] += wgt * g.du_j;
        gu[k - b] += wgt * g.du_k;
        if (p2) head.segment(p, p2) += (wgt * g.drho) * corr.pair_rho_gradient(member[j], member[k]);
      }
    }
  }

  for (int j = b; j < e; ++j) {
    const double g = gu[j - b];
    if (p) head.head(p) += (g * u(j)) * data.Z().row(j).transpose();
    if (n_le[j] > 0) bucket(n_le[j] - 1) += g * exp_eta(j);
  }
}

void reverse_cumsum(Eigen::Ref<Eigen::VectorXd> x) {
  double acc = 0.0;
  for (Eigen::Index q = x.size() - 1; q >= 0; --q) {
    acc += x(q);
    x(q) = acc;
  }
}

struct Unpacked {
  Eigen::VectorXd beta;
  CorrelationModel corr;
  Eigen::VectorXd jumps;
};

Unpacked unpack(const Eigen::VectorXd& theta, int p, int p2, const CorrelationModel& base) {
  Unpacked out{theta.head(p), base, theta.tail(theta.size() - p - p2)};
  if (p2) out.corr = base.with_params_unchecked(theta.segment(p, p2));
  return out;
}

}  // namespace

Eigen::VectorXd pack_coordinates(const Eigen::VectorXd& beta, const CorrelationModel& corr,
                                 const Eigen::VectorXd& jumps, bool include_rho) {
  const int p = static_cast<int>(beta.size());
  const int p2 = rho_dim(corr, include_rho);
  Eigen::VectorXd theta(p + p2 + jumps.size());
  theta.head(p) = beta;
  if (p2) theta.segment(p, p2) = corr.params();
  theta.tail(jumps.size()) = jumps;
  return theta;
}

Eigen::MatrixXd cluster_scores(const IndexedData& data, const Eigen::VectorXd& beta,
                               const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                               bool include_rho) {
  const int p = data.n_covariates();
  const int p2 = rho_dim(corr, include_rho);
  const int Q = data.n_jumps();
  const Eigen::VectorXd u = data.u_values(beta, jumps);
  const Eigen::VectorXd exp_eta = (data.Z() * beta).array().exp().matrix();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(data.n_clusters(), p + p2 + Q);
  Eigen::VectorXd head(p + p2), bucket(Q), direct(Q);
  for (int i = 0; i < data.n_clusters(); ++i) {
    head.setZero();
    bucket.setZero();
    direct.setZero();
    cluster_gradient(data, i, corr, jumps, u, exp_eta, p2, head, bucket, direct);
    reverse_cumsum(bucket);
    S.row(i).head(p + p2) = head.transpose();
    S.row(i).tail(Q) = (bucket + direct).transpose();
  }
  return S;
}

Eigen::VectorXd composite_score(const IndexedData& data, const Eigen::VectorXd& beta,
                                const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                                bool include_rho) {
  const int p = data.n_covariates();
  const int p2 = rho_dim(corr, include_rho);
  const int Q = data.n_jumps();
  const Eigen::VectorXd u = data.u_values(beta, jumps);
  const Eigen::VectorXd exp_eta = (data.Z() * beta).array().exp().matrix();
  Eigen::VectorXd head = Eigen::VectorXd::Zero(p + p2);
  Eigen::VectorXd bucket = Eigen::VectorXd::Zero(Q);
  Eigen::VectorXd direct = Eigen::VectorXd::Zero(Q);
  for (int i = 0; i < data.n_clusters(); ++i)
    cluster_gradient(data, i, corr, jumps, u, exp_eta, p2, head, bucket, direct);
  reverse_cumsum(bucket);
  Eigen::VectorXd g(p + p2 + Q);
  g.head(p + p2) = head;
  g.tail(Q) = bucket + direct;
  return g / data.n_clusters();
}

ScoreVector cluster_score(const Cluster& cluster, const ModelParams& params,
                          const BaselineFunction& baseline) {
  const IndexedData idx({cluster}, baseline.jump_times());
  const Eigen::VectorXd jumps = idx.jumps_from(baseline);
  ScoreVector s;
  s.entries = cluster_scores(idx, params.beta, params.corr, jumps).row(0).transpose();
  s.n_beta = static_cast<int>(params.beta.size());
  s.n_rho = params.corr.n_params();
  s.n_jumps = idx.n_jumps();
  return s;
}

Eigen::MatrixXd hessian(const IndexedData& data, const Eigen::VectorXd& beta,
                        const CorrelationModel& corr, const Eigen::VectorXd& jumps,
                        bool include_rho) {
  const int p = data.n_covariates();
  const int p2 = rho_dim(corr, include_rho);
  const Eigen::VectorXd theta = pack_coordinates(beta, corr, jumps, include_rho);
  const Eigen::Index dim = theta.size();
  auto score_at = [&](const Eigen::VectorXd& t) {
    const Unpacked x = unpack(t, p, p2, corr);
    return composite_score(data, x.beta, x.corr, x.jumps, include_rho);
  };

  Eigen::MatrixXd H(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const bool is_jump = c >= p + p2;
    const double h = 1e-5 * (is_jump ? std::abs(theta(c)) : std::max(std::abs(theta(c)), 1.0));
    Eigen::VectorXd tp = theta, tm = theta;
    tp(c) += h;
    tm(c) -= h;
    H.col(c) = (score_at(tp) - score_at(tm)) / (2.0 * h);
    if (!H.col(c).allFinite()) {
      std::ostringstream os;
      os << "non-finite Hessian entry in coordinate " << c;
      throw Error(os.str());
    }
  }
  return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd hessian(const Dataset& data, const ModelParams& params,
                        const BaselineFunction& baseline) {
  const IndexedData idx(data.clusters(), baseline.jump_times());
  return hessian(idx, params.beta, params.corr, idx.jumps_from(baseline), true);
}

SandwichEstimate sandwich(const Dataset& data, const FitResult& fit) {
  const IndexedData idx(data.clusters(), fit.baseline.jump_times());
  const Eigen::VectorXd jumps = idx.jumps_from(fit.baseline);
  const bool include_rho = fit.rho_estimated && !fit.rho_at_boundary && fit.corr.n_params() > 0;

  SandwichEstimate est;
  est.m = idx.n_clusters();
  est.n_beta = idx.n_covariates();
  est.n_rho = include_rho ? fit.corr.n_params() : 0;
  est.jump_times = idx.jump_times();
  est.H = hessian(idx, fit.beta, fit.corr, jumps, include_rho);
  const Eigen::MatrixXd S = cluster_scores(idx, fit.beta, fit.corr, jumps, include_rho);
  est.J = S.transpose() * S / static_cast<double>(est.m);

  est.H_lu = est.H.partialPivLu();
  est.rcond = est.H_lu.rcond();
  if (!(est.rcond > 1e-14)) {
    std::ostringstream os;
    os << "information singular (reciprocal condition number " << est.rcond << ")";
    throw DegenerateError(os.str());
  }
  const int k = est.n_beta + est.n_rho;
  const Eigen::MatrixXd E = Eigen::MatrixXd::Identity(est.dim(), k);
  const Eigen::MatrixXd X = est.H_lu.solve(E);
  est.vcov_finite = X.transpose() * est.J * X / static_cast<double>(est.m);
  est.vcov_finite = 0.5 * (est.vcov_finite + est.vcov_finite.transpose()).eval();
  est.se = est.vcov_finite.diagonal().cwiseMax(0.0).cwiseSqrt();
  return est;
}

ContrastVector ContrastVector::cumulative_hazard(const SandwichEstimate& est, double t) {
  ContrastVector h;
  h.h1 = Eigen::VectorXd::Zero(est.n_beta);
  h.h2 = Eigen::VectorXd::Zero(est.n_rho);
  h.h3.resize(est.jump_times.size());
  for (std::size_t q = 0; q < est.jump_times.size(); ++q) h.h3[q] = est.jump_times[q] <= t;
  return h;
}

ContrastVector ContrastVector::unit(const SandwichEstimate& est, int coordinate) {
  ContrastVector h;
  h.h1 = Eigen::VectorXd::Zero(est.n_beta);
  h.h2 = Eigen::VectorXd::Zero(est.n_rho);
  if (coordinate < 0 || coordinate >= est.n_beta + est.n_rho)
    throw ParameterError("contrast coordinate out of range");
  if (coordinate < est.n_beta)
    h.h1(coordinate) = 1.0;
  else
    h.h2(coordinate - est.n_beta) = 1.0;
  return h;
}

double contrast_variance(const SandwichEstimate& est, const ContrastVector& h) {
  const int Q = static_cast<int>(est.jump_times.size());
  if (h.h1.size() != est.n_beta) throw ParameterError("contrast h1 has the wrong length");
  if (h.h2.size() != est.n_rho)
    throw ParameterError("contrast h2 has the wrong length (rho may be treated as known)");
  if (!h.h3.empty() && static_cast<int>(h.h3.size()) != Q)
    throw ParameterError("contrast h3 must have one value per jump time");
  double sup = 0.0, tv = 0.0;
  for (std::size_t q = 0; q < h.h3.size(); ++q) {
    sup = std::max(sup, std::abs(h.h3[q]));
    if (q > 0) tv += std::abs(h.h3[q] - h.h3[q - 1]);
  }
  constexpr double slack = 1e-12;
  if (h.h1.norm() > 1.0 + slack || h.h2.norm() > 1.0 + slack || std::max(sup, tv) > 1.0 + slack)
    throw ParameterError("contrast must lie in the unit balls");

  Eigen::VectorXd hm = Eigen::VectorXd::Zero(est.dim());
  hm.head(est.n_beta) = h.h1;
  hm.segment(est.n_beta, est.n_rho) = h.h2;
  for (int q = 0; q < static_cast<int>(h.h3.size()); ++q) hm(est.n_beta + est.n_rho + q) = h.h3[q];
  const Eigen::VectorXd x = est.H_lu.solve(hm);
  return std::max(0.0, x.dot(est.J * x));
}

}  // namespace mfrail
