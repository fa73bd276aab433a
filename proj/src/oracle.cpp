#include "mfrail/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <limits>
#include <stdexcept>

namespace mfrail::oracle {

double laplace_transform(const Eigen::VectorXd& u, const GaussianFactor& factor) {
  const Eigen::Index n = u.size();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + factor.C * u.asDiagonal();
  return 1.0 / m.determinant();
}

McEstimate mc_pair_quantity(double u_j, double u_k, int event_j, int event_k, double rho,
                            PairQuantity kind, const OracleConfig& cfg) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("oracle: rho outside [0, 1]");
  if (cfg.n_draws < 1000) throw std::invalid_argument("oracle: n_draws must be at least 1000");
  // Each frailty is (V1^2 + V2^2)/2 with (V_j, V_k) standard bivariate
  // normal at correlation sqrt(rho), so corr(W_j, W_k) = rho.
  const double c = std::sqrt(rho);
  const double s = std::sqrt(1.0 - rho);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;

  double sum_g = 0.0, sum_g2 = 0.0, sum_h = 0.0, sum_h2 = 0.0, sum_gh = 0.0;
  for (long i = 0; i < cfg.n_draws; ++i) {
    const double a1 = nd(rng), a2 = nd(rng), b1 = nd(rng), b2 = nd(rng);
    const double vj1 = a1, vk1 = c * a1 + s * a2;
    const double vj2 = b1, vk2 = c * b1 + s * b2;
    const double wj = 0.5 * (vj1 * vj1 + vj2 * vj2);
    const double wk = 0.5 * (vk1 * vk1 + vk2 * vk2);
    double g = std::exp(-wj * u_j - wk * u_k);
    if (kind == PairQuantity::EStepWj) {
      if (event_j) g *= wj;
      if (event_k) g *= wk;
    }
    const double h = g * wj;
    sum_g += g;
    sum_g2 += g * g;
    sum_h += h;
    sum_h2 += h * h;
    sum_gh += g * h;
  }
  const double n = static_cast<double>(cfg.n_draws);
  McEstimate out;
  const double mg = sum_g / n;
  const double vg = std::max(0.0, sum_g2 / n - mg * mg);
  if (kind == PairQuantity::SurvivalProb) {
    out.estimate = mg;
    out.mc_se = std::sqrt(vg / n);
  } else {
    const double mh = sum_h / n;
    const double r = mh / mg;
    // Delta method for the ratio of means.
    const double vh = std::max(0.0, sum_h2 / n - mh * mh);
    const double cgh = sum_gh / n - mg * mh;
    const double var = std::max(0.0, (vh - 2.0 * r * cgh + r * r * vg) / (mg * mg));
    out.estimate = r;
    out.mc_se = std::sqrt(var / n);
  }
  out.precise = out.mc_se <= 0.1 * std::abs(out.estimate);
  return out;
}

Eigen::VectorXd fd_gradient(const ScalarFn& fn, const Eigen::VectorXd& point,
                            const OracleConfig& cfg) {
  Eigen::VectorXd g(point.size());
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double h = cfg.fd_step * std::max(std::abs(point(i)), 1e-3);
    Eigen::VectorXd xp = point, xm = point;
    xp(i) += h;
    xm(i) -= h;
    const double fp = fn(xp), fm = fn(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("oracle: non-finite evaluation at coordinate " + std::to_string(i));
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

double fd_mixed_partial(const ScalarFn& fn, const Eigen::VectorXd& point, int i, int j, double h) {
  auto at = [&](double di, double dj) {
    Eigen::VectorXd x = point;
    x(i) += di;
    x(j) += dj;
    return fn(x);
  };
  if (i == j) return (at(h, 0) - 2.0 * fn(point) + at(-h, 0)) / (h * h);
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    q += term;
    if (std::abs(term) < 1e-16) break;
  }
  return {d, std::clamp(q, 0.0, 1.0)};
}

MaximizeResult maximize_bfgs(const ScalarFn& fn, const Eigen::VectorXd& x0, double grad_tol,
                             int max_iters) {
  const Eigen::Index n = x0.size();
  OracleConfig fd;
  fd.fd_step = 6e-6;  // ~ eps^(1/3), balances truncation and roundoff
  auto grad = [&](const Eigen::VectorXd& x) { return fd_gradient(fn, x, fd); };
  MaximizeResult res;
  Eigen::VectorXd x = x0;
  double f = fn(x);
  Eigen::VectorXd g = grad(x);
  // Inverse Hessian approximation of -fn.
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it;
    if (g.lpNorm<Eigen::Infinity>() < grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = B * g;
    if (dir.dot(g) <= 0.0) {
      B.setIdentity();
      dir = g;
    }
    // Keep trial points near x; far steps overflow exp() in log-scale objectives.
    if (dir.norm() > 1.0) dir /= dir.norm();
    double step = 1.0;
    Eigen::VectorXd xn;
    double fn_new = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < 60; ++h, step *= 0.5) {
      xn = x + step * dir;
      fn_new = fn(xn);
      if (std::isfinite(fn_new) && fn_new >= f + 1e-4 * step * g.dot(dir)) break;
    }
    if (!(fn_new >= f)) break;
    const Eigen::VectorXd gn = grad(xn);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = g - gn;  // gradient change of -fn
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const Eigen::VectorXd By = B * y;
      B += ((sy + y.dot(By)) / (sy * sy)) * (s * s.transpose()) -
           (By * s.transpose() + s * By.transpose()) / sy;
    }
    x = xn;
    f = fn_new;
    g = gn;
  }
  res.x = x;
  res.value = f;
  if (!res.converged) res.converged = g.lpNorm<Eigen::Infinity>() < grad_tol;
  return res;
}

}  // namespace mfrail::oracle
