#include "mfrail/app/report.hpp"

#include <cmath>
#include <cstdio>

namespace mfrail::app {

namespace {

using nlohmann::json;

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

// Finite doubles only; NaN becomes null in JSON.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(const char* f, double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

void to_json(json& j, const FitReport& r) {
  json coefs = json::array();
  for (const auto& c : r.coefficients) {
    coefs.push_back({{"name", c.name},
                     {"estimate", c.estimate},
                     {"se", opt(c.se)},
                     {"ci_lower", opt(c.ci_lower)},
                     {"ci_upper", opt(c.ci_upper)},
                     {"exp_estimate", c.exp_estimate},
                     {"exp_ci_lower", opt(c.exp_ci_lower)},
                     {"exp_ci_upper", opt(c.exp_ci_upper)}});
  }
  json base = json::array();
  for (const auto& b : r.baseline)
    base.push_back({{"time", b.time}, {"cumulative_hazard", b.cumulative_hazard}, {"se", opt(b.se)}});
  j = json{{"coefficients", coefs},
           {"rho",
            {{"structure", r.rho.structure},
             {"estimate", opt(r.rho.estimate)},
             {"se", opt(r.rho.se)},
             {"ci_lower", opt(r.rho.ci_lower)},
             {"ci_upper", opt(r.rho.ci_upper)},
             {"estimated", r.rho.estimated},
             {"at_boundary", r.rho.at_boundary}}},
           {"baseline", base},
           {"loglik", r.loglik},
           {"outer_iterations", r.outer_iterations},
           {"em_sweeps", r.em_sweeps},
           {"converged", r.converged},
           {"beta_at_boundary", r.beta_at_boundary},
           {"message", r.message},
           {"n_clusters", r.n_clusters},
           {"n_observations", r.n_observations},
           {"n_events", r.n_events},
           {"warnings", r.warnings},
           {"config", r.config},
           {"seed", r.seed}};
}

void from_json(const json& j, FitReport& r) {
  r = FitReport{};
  for (const auto& c : j.at("coefficients")) {
    CoefficientReport cr;
    cr.name = c.at("name").get<std::string>();
    cr.estimate = c.at("estimate").get<double>();
    cr.se = get_opt(c, "se");
    cr.ci_lower = get_opt(c, "ci_lower");
    cr.ci_upper = get_opt(c, "ci_upper");
    cr.exp_estimate = c.at("exp_estimate").get<double>();
    cr.exp_ci_lower = get_opt(c, "exp_ci_lower");
    cr.exp_ci_upper = get_opt(c, "exp_ci_upper");
    r.coefficients.push_back(std::move(cr));
  }
  const json& rho = j.at("rho");
  r.rho.structure = rho.at("structure").get<std::string>();
  r.rho.estimate = get_opt(rho, "estimate");
  r.rho.se = get_opt(rho, "se");
  r.rho.ci_lower = get_opt(rho, "ci_lower");
  r.rho.ci_upper = get_opt(rho, "ci_upper");
  r.rho.estimated = rho.at("estimated").get<bool>();
  r.rho.at_boundary = rho.at("at_boundary").get<bool>();
  for (const auto& b : j.at("baseline"))
    r.baseline.push_back({b.at("time").get<double>(), b.at("cumulative_hazard").get<double>(),
                          get_opt(b, "se")});
  r.loglik = j.at("loglik").get<double>();
  r.outer_iterations = j.at("outer_iterations").get<int>();
  r.em_sweeps = j.at("em_sweeps").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.beta_at_boundary = j.at("beta_at_boundary").get<bool>();
  r.message = j.at("message").get<std::string>();
  r.n_clusters = j.at("n_clusters").get<std::size_t>();
  r.n_observations = j.at("n_observations").get<std::size_t>();
  r.n_events = j.at("n_events").get<std::size_t>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
}

FitReport make_fit_report(const LoadedData& loaded, const FitResult& fit,
                          const SandwichEstimate* est, json config, std::uint64_t seed) {
  constexpr double z = 1.96;
  FitReport r;
  for (Eigen::Index k = 0; k < fit.beta.size(); ++k) {
    CoefficientReport c;
    c.name = loaded.covariate_names.at(static_cast<std::size_t>(k));
    c.estimate = fit.beta(k);
    c.exp_estimate = std::exp(c.estimate);
    if (est) {
      const double se = est->se(k);
      c.se = se;
      c.ci_lower = c.estimate - z * se;
      c.ci_upper = c.estimate + z * se;
      c.exp_ci_lower = std::exp(*c.ci_lower);
      c.exp_ci_upper = std::exp(*c.ci_upper);
    }
    r.coefficients.push_back(std::move(c));
  }

  r.rho.structure = to_string(fit.corr.kind());
  r.rho.estimated = fit.rho_estimated;
  r.rho.at_boundary = fit.rho_at_boundary;
  if (fit.corr.n_params() > 0) {
    r.rho.estimate = fit.rho();
    if (est && est->n_rho > 0) {
      const double se = est->se(est->n_beta);
      r.rho.se = se;
      r.rho.ci_lower = std::max(0.0, fit.rho() - z * se);
      r.rho.ci_upper = std::min(CorrelationModel::kRhoMax, fit.rho() + z * se);
    }
  }

  const auto& times = fit.baseline.jump_times();
  const auto& cum = fit.baseline.cumulative();
  for (std::size_t q = 0; q < times.size(); ++q) {
    BaselinePoint b{times[q], cum[q], std::nullopt};
    if (est) {
      const double var = contrast_variance(*est, ContrastVector::cumulative_hazard(*est, times[q]));
      b.se = std::sqrt(var / est->m);
    }
    r.baseline.push_back(b);
  }
  if (!est) r.warnings.push_back("standard errors unavailable");

  r.loglik = fit.loglik;
  r.outer_iterations = fit.n_outer_iters;
  r.em_sweeps = fit.n_em_sweeps;
  r.converged = fit.converged;
  r.beta_at_boundary = fit.beta_at_boundary;
  r.message = fit.message;
  r.n_clusters = loaded.data.n_clusters();
  r.n_observations = loaded.data.n_observations();
  r.n_events = loaded.data.n_events();
  r.config = std::move(config);
  r.seed = seed;
  if (fit.beta_at_boundary) r.warnings.push_back("beta reached its bound; estimates may diverge");
  if (fit.rho_at_boundary) r.warnings.push_back("rho on its bound; treated as known for SEs");
  return r;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

json summary_to_json(const SummaryTable& t) {
  const ScenarioConfig& s = t.scenario;
  json rows = json::array();
  for (const auto& p : t.rows) {
    rows.push_back({{"parameter", p.name},
                    {"truth", p.truth},
                    {"bias", num(p.bias)},
                    {"see", num(p.see)},
                    {"sse", num(p.sse)},
                    {"mse", num(p.mse)},
                    {"coverage", num(p.coverage)},
                    {"n", p.n}});
  }
  return json{{"scenario",
               {{"name", s.name},
                {"m_clusters", s.m_clusters},
                {"cluster_size_min", s.cluster_size_min},
                {"cluster_size_max", s.cluster_size_max},
                {"beta_true", std::vector<double>(s.beta_true.data(),
                                                  s.beta_true.data() + s.beta_true.size())},
                {"z1_sd", s.z1_sd},
                {"rho_true", s.rho_true},
                {"baseline_scale", s.baseline_scale},
                {"baseline_shape", s.baseline_shape},
                {"corr_kind", to_string(s.corr_kind)},
                {"censor_mean", s.censor_mean},
                {"censor_cap", s.censor_cap},
                {"n_reps", s.n_reps},
                {"master_seed", s.master_seed}}},
              {"rows", rows},
              {"n_reps", t.n_reps},
              {"n_used", t.n_used},
              {"n_failed", t.n_failed},
              {"flagged", t.flagged},
              {"mean_censoring", t.mean_censoring},
              {"failures", t.failures}};
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryTable>& tables) {
  out << "scenario,corr_kind,rho_true,censor_mean,n_reps,n_used,n_failed,flagged,mean_censoring,"
         "parameter,truth,bias,see,sse,mse,coverage,n\n";
  for (const auto& t : tables) {
    const ScenarioConfig& s = t.scenario;
    for (const auto& p : t.rows) {
      out << s.name << ',' << to_string(s.corr_kind) << ',' << fmt("%.17g", s.rho_true) << ','
          << fmt("%.17g", s.censor_mean) << ',' << t.n_reps << ',' << t.n_used << ','
          << t.n_failed << ',' << (t.flagged ? 1 : 0) << ',' << fmt("%.17g", t.mean_censoring)
          << ',' << p.name << ',' << fmt("%.17g", p.truth) << ',' << fmt("%.17g", p.bias) << ','
          << fmt("%.17g", p.see) << ',' << fmt("%.17g", p.sse) << ',' << fmt("%.17g", p.mse)
          << ',' << fmt("%.17g", p.coverage) << ',' << p.n << '\n';
    }
  }
}

void write_display_table(std::ostream& out, const std::vector<SummaryTable>& tables) {
  // Bias, SEE, SSE and MSE are shown x 10^3; coverage in percent.
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %5s %6s | %7s %7s | %6s %6s | %6s %6s | %6s %6s | %5s %5s | %7s\n",
                "scenario", "rho0", "cens", "Bias0", "Bias1", "SEE0", "SEE1", "SSE0", "SSE1",
                "MSE0", "MSE1", "Cov0", "Cov1", "BiasRho");
  out << line;
  for (const auto& t : tables) {
    if (t.rows.size() < 3) continue;
    const auto& b0 = t.rows[0];
    const auto& b1 = t.rows[1];
    const auto& r = t.rows.back();
    std::snprintf(line, sizeof line,
                  "%-28s %5.2f %5.1f%% | %7s %7s | %6s %6s | %6s %6s | %6s %6s | %4s%% %4s%% | %7s%s\n",
                  t.scenario.name.c_str(), t.scenario.rho_true, 100.0 * t.mean_censoring,
                  fmt("%.1f", 1e3 * b0.bias).c_str(), fmt("%.1f", 1e3 * b1.bias).c_str(),
                  fmt("%.0f", 1e3 * b0.see).c_str(), fmt("%.0f", 1e3 * b1.see).c_str(),
                  fmt("%.0f", 1e3 * b0.sse).c_str(), fmt("%.0f", 1e3 * b1.sse).c_str(),
                  fmt("%.0f", 1e3 * b0.mse).c_str(), fmt("%.0f", 1e3 * b1.mse).c_str(),
                  fmt("%.0f", 100.0 * b0.coverage).c_str(), fmt("%.0f", 100.0 * b1.coverage).c_str(),
                  fmt("%.1f", 1e3 * r.bias).c_str(), t.flagged ? "  FLAGGED" : "");
    out << line;
  }
}

}  // namespace mfrail::app
