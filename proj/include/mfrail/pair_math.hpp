#pragma once

#include <cmath>

// Closed-form pieces of the bivariate exponential-frailty likelihood. With
// a = 1 + (1-r) u_k and b = 1 + (1-r) u_j, the pair Laplace transform is 1/v
// and w is the event-weighted derivative numerator:
//   v = (1-r) u_j u_k + u_j + u_k + 1
//   w = d_j d_k (1-r)^2 u_j u_k + d_j (1-r) u_k + d_k (1-r) u_j + 1 + d_j d_k r
namespace mfrail::pair_math {

inline double v_term(double uj, double uk, double r) {
  return (1.0 - r) * uj * uk + uj + uk + 1.0;
}

inline double w_term(double uj, double uk, int dj, int dk, double r) {
  const double s = 1.0 - r;
  return dj * dk * s * s * uj * uk + dj * s * uk + dk * s * uj + 1.0 + dj * dk * r;
}

// log w - (1 + d_j + d_k) log v: the part of the pair log-likelihood that
// depends on rho and on Lambda through u.
inline double core(double uj, double uk, int dj, int dk, double r) {
  return std::log(w_term(uj, uk, dj, dk, r)) -
         (1.0 + dj + dk) * std::log(v_term(uj, uk, r));
}

struct CoreGradient {
  double du_j;
  double du_k;
  double drho;
};

inline CoreGradient core_gradient(double uj, double uk, int dj, int dk, double r) {
  const double s = 1.0 - r;
  const double v = v_term(uj, uk, r);
  const double w = w_term(uj, uk, dj, dk, r);
  const double c = 1.0 + dj + dk;
  CoreGradient g;
  g.du_j = (dj * dk * s * s * uk + dk * s) / w - c * (s * uk + 1.0) / v;
  g.du_k = (dj * dk * s * s * uj + dj * s) / w - c * (s * uj + 1.0) / v;
  g.drho = (-2.0 * s * dj * dk * uj * uk - dj * uk - dk * uj + dj * dk) / w +
           c * uj * uk / v;
  return g;
}

// E[W_j | X_j, X_k] for the four event patterns. Returns NaN if the
// case-(1,1) denominator is not positive.
inline double conditional_frailty(double uj, double uk, int dj, int dk, double r) {
  const double s = 1.0 - r;
  const double v = v_term(uj, uk, r);
  const double a = 1.0 + s * uk;
  const double b = 1.0 + s * uj;
  if (dj == 1 && dk == 1) {
    const double ab_v = a * b / v;
    const double denom = 2.0 * ab_v - s;
    if (!(denom > 0.0)) return std::nan("");
    return (2.0 * a / v) * (3.0 * ab_v - 2.0 * s) / denom;
  }
  if (dj == 1) return 2.0 * a / v;
  if (dk == 1) return 2.0 * a / v - s / b;
  return a / v;
}

// Univariate marginal: Delta (log lambda + z'beta) handled by the caller;
// this is -(1 + d) log(1 + u).
inline double singleton_core(double u, int d) { return -(1.0 + d) * std::log1p(u); }

}  // namespace mfrail::pair_math
