#include "mfrail/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "mfrail/error.hpp"
#include "mfrail/frailty.hpp"
#include "mfrail/variance.hpp"

namespace mfrail {

void ScenarioConfig::validate() const {
  if (m_clusters < 1) throw ParameterError("scenario: m_clusters must be positive");
  if (cluster_size_min < 1 || cluster_size_max < cluster_size_min)
    throw ParameterError("scenario: invalid cluster size range");
  if (beta_true.size() != 2)
    throw ParameterError("scenario: beta_true must have two entries (Z1, Z2)");
  if (!(z1_sd >= 0.0) || !std::isfinite(z1_sd)) throw ParameterError("scenario: z1_sd must be nonnegative");
  if (!(rho_true >= 0.0 && rho_true <= CorrelationModel::kRhoMax))
    throw ParameterError("scenario: rho_true outside [0, 0.99]");
  if (corr_kind == CorrelationKind::Fixed)
    throw ParameterError("scenario: corr_kind must be exchangeable or ar1");
  if (!(baseline_scale > 0.0) || !(baseline_shape > 0.0) || !std::isfinite(baseline_scale) ||
      !std::isfinite(baseline_shape))
    throw ParameterError("scenario: baseline scale and shape must be positive");
  if (!(censor_mean > 0.0) || !(censor_cap > 0.0))
    throw ParameterError("scenario: censoring parameters must be positive");
  if (n_reps < 1) throw ParameterError("scenario: n_reps must be positive");
}

double ScenarioConfig::cumulative_baseline(double t) const {
  return baseline_scale * std::pow(t, baseline_shape);
}

double ScenarioConfig::baseline_inverse(double x) const {
  return std::pow(x / baseline_scale, 1.0 / baseline_shape);
}

ScenarioConfig table_scenario(int table, double rho, int censoring_percent, int n_reps,
                              std::uint64_t master_seed) {
  ScenarioConfig cfg;
  if (table != 1 && table != 2) throw ParameterError("scenario table must be 1 or 2");
  if (censoring_percent != 40 && censoring_percent != 75)
    throw ParameterError("censoring level must be 40 or 75");
  cfg.corr_kind = table == 1 ? CorrelationKind::Exchangeable : CorrelationKind::AR1;
  cfg.censor_mean = censoring_percent == 40 ? 3.64 : 0.59;
  cfg.rho_true = rho;
  cfg.n_reps = n_reps;
  cfg.master_seed = master_seed;
  std::ostringstream name;
  name << "table" << table << "_cens" << censoring_percent << "_rho" << rho;
  cfg.name = name.str();
  cfg.validate();
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParameterError("scenario: '" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ParameterError("scenario: '" + key + "' expects an integer");
  return static_cast<int>(x);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("scenario line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "name") {
      cfg.name = val;
    } else if (key == "m_clusters") {
      cfg.m_clusters = to_int(key, val);
    } else if (key == "cluster_size_min") {
      cfg.cluster_size_min = to_int(key, val);
    } else if (key == "cluster_size_max") {
      cfg.cluster_size_max = to_int(key, val);
    } else if (key == "beta_true") {
      std::vector<double> xs;
      std::istringstream parts(val);
      std::string part;
      while (std::getline(parts, part, ',')) xs.push_back(to_double(key, trim(part)));
      cfg.beta_true = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    } else if (key == "z1_sd") {
      cfg.z1_sd = to_double(key, val);
    } else if (key == "baseline_scale") {
      cfg.baseline_scale = to_double(key, val);
    } else if (key == "baseline_shape") {
      cfg.baseline_shape = to_double(key, val);
    } else if (key == "rho_true") {
      cfg.rho_true = to_double(key, val);
    } else if (key == "corr_kind") {
      cfg.corr_kind = parse_correlation_kind(val);
    } else if (key == "censor_mean") {
      cfg.censor_mean = to_double(key, val);
    } else if (key == "censor_cap") {
      cfg.censor_cap = to_double(key, val);
    } else if (key == "n_reps") {
      cfg.n_reps = to_int(key, val);
    } else if (key == "master_seed") {
      try {
        cfg.master_seed = std::stoull(val);
      } catch (const std::exception&) {
        throw ParameterError("scenario: master_seed expects an unsigned integer");
      }
    } else {
      throw ParameterError("scenario line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::uint64_t rep_seed(std::uint64_t master_seed, int rep) {
  // splitmix64 finalizer over the master seed advanced by the rep index.
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(rep) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Cluster generate_cluster(const ScenarioConfig& cfg, std::mt19937_64& rng, const std::string& id) {
  std::uniform_int_distribution<int> size_dist(cfg.cluster_size_min, cfg.cluster_size_max);
  const int n = size_dist(rng);
  const CorrelationModel corr = cfg.corr_kind == CorrelationKind::AR1
                                    ? CorrelationModel::ar1(cfg.rho_true)
                                    : CorrelationModel::exchangeable(cfg.rho_true);
  const GaussianFactor factor = gaussian_factor(frailty_corr_matrix(corr, n));
  const Eigen::VectorXd w = sample_frailties(factor, rng).w;

  std::normal_distribution<double> z1_dist(0.0, cfg.z1_sd);
  std::bernoulli_distribution z0_dist(0.3);
  std::exponential_distribution<double> unit_exp(1.0);
  std::exponential_distribution<double> censor_exp(1.0 / cfg.censor_mean);

  Cluster c;
  c.id = id;
  c.members.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double z1 = z1_dist(rng);
    const double z0 = z0_dist(rng) ? 1.0 : 0.0;
    const double z2 = 0.2 * z1 + z0 - 0.3;
    Observation o;
    o.covariates = (Eigen::VectorXd(2) << z1, z2).finished();
    o.member_index = j;
    const double target = unit_exp(rng) / (w(j) * std::exp(o.covariates.dot(cfg.beta_true)));
    const double t = cfg.baseline_inverse(target);
    const double cens = std::min(cfg.censor_cap, censor_exp(rng));
    o.time = std::min(t, cens);
    o.event = t <= cens ? 1 : 0;
    c.members.push_back(std::move(o));
  }
  return c;
}

Dataset generate_dataset(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  std::vector<Cluster> clusters;
  clusters.reserve(static_cast<std::size_t>(cfg.m_clusters));
  for (int i = 0; i < cfg.m_clusters; ++i) clusters.push_back(generate_cluster(cfg, rng, std::to_string(i)));
  return Dataset::make(std::move(clusters));
}

RepResult run_rep(const ScenarioConfig& cfg, const FitConfig& fit_config, int rep,
                  std::uint64_t seed) {
  RepResult out;
  out.rep = rep;
  out.seed = seed;
  try {
    std::mt19937_64 rng(seed);
    const Dataset data = generate_dataset(cfg, rng);
    out.censoring_fraction =
        1.0 - static_cast<double>(data.n_events()) / static_cast<double>(data.n_observations());

    FitConfig fc = fit_config;
    fc.correlation = cfg.corr_kind;
    const FitResult f = fit(data, fc);
    out.converged = f.converged;
    out.beta_hat = f.beta;
    out.rho_hat = f.rho();
    if (!f.converged) {
      out.message = f.message;
      return out;
    }
    const SandwichEstimate est = sandwich(data, f);
    out.se_beta = est.se.head(est.n_beta);
    out.se_rho = est.n_rho ? est.se(est.n_beta) : std::nan("");
    for (Eigen::Index k = 0; k < out.beta_hat.size(); ++k)
      out.ci_covers.push_back(std::abs(out.beta_hat(k) - cfg.beta_true(k)) <= 1.96 * out.se_beta(k));
    if (std::isfinite(out.se_rho)) {
      const double lo = std::max(0.0, out.rho_hat - 1.96 * out.se_rho);
      const double hi = std::min(CorrelationModel::kRhoMax, out.rho_hat + 1.96 * out.se_rho);
      out.ci_covers.push_back(cfg.rho_true >= lo && cfg.rho_true <= hi);
    }
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.message = e.what();
  }
  return out;
}

SummaryTable summarize(const ScenarioConfig& cfg, const std::vector<RepResult>& reps) {
  SummaryTable t;
  t.scenario = cfg;
  t.n_reps = static_cast<int>(reps.size());
  const int p = static_cast<int>(cfg.beta_true.size());
  std::vector<const RepResult*> ordered;
  for (const RepResult& r : reps) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const RepResult* a, const RepResult* b) { return a->rep < b->rep; });
  std::vector<const RepResult*> used;
  double cens = 0.0;
  for (const RepResult* rp : ordered) {
    const RepResult& r = *rp;
    cens += r.censoring_fraction;
    if (r.ok) {
      used.push_back(&r);
    } else {
      ++t.n_failed;
      t.failures.push_back("rep " + std::to_string(r.rep) + ": " + r.message);
    }
  }
  t.n_used = static_cast<int>(used.size());
  t.mean_censoring = reps.empty() ? 0.0 : cens / static_cast<double>(reps.size());
  t.flagged = t.n_failed > 0.05 * t.n_reps;

  auto summarize_param = [&](const std::string& name, double truth, auto estimate, auto se,
                             int cover_index) {
    ParameterSummary s;
    s.name = name;
    s.truth = truth;
    double sum = 0.0, see_sum = 0.0, covered = 0.0;
    int n_se = 0;
    for (const RepResult* r : used) sum += estimate(*r);
    s.n = static_cast<int>(used.size());
    const double mean = s.n ? sum / s.n : std::nan("");
    double ss = 0.0;
    for (const RepResult* r : used) {
      const double d = estimate(*r) - mean;
      ss += d * d;
      const double e = se(*r);
      if (std::isfinite(e) && cover_index < static_cast<int>(r->ci_covers.size())) {
        see_sum += e;
        covered += r->ci_covers[cover_index] ? 1.0 : 0.0;
        ++n_se;
      }
    }
    s.bias = mean - truth;
    s.sse = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : std::nan("");
    s.see = n_se ? see_sum / n_se : std::nan("");
    s.coverage = n_se ? covered / n_se : std::nan("");
    s.mse = s.bias * s.bias + s.sse * s.sse;
    return s;
  };

  for (int k = 0; k < p; ++k) {
    t.rows.push_back(summarize_param(
        "beta_" + std::to_string(k), cfg.beta_true(k),
        [k](const RepResult& r) { return r.beta_hat(k); },
        [k](const RepResult& r) { return r.se_beta(k); }, k));
  }
  t.rows.push_back(summarize_param(
      "rho", cfg.rho_true, [](const RepResult& r) { return r.rho_hat; },
      [](const RepResult& r) { return r.se_rho; }, p));
  return t;
}

SummaryTable run_scenario(const ScenarioConfig& cfg, const FitConfig& fit_config, int threads) {
  cfg.validate();
  if (cfg.n_reps < 2) throw ParameterError("run_scenario needs at least 2 replicates");
  std::vector<RepResult> reps(static_cast<std::size_t>(cfg.n_reps));
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, cfg.n_reps);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < cfg.n_reps; r = next++)
      reps[static_cast<std::size_t>(r)] = run_rep(cfg, fit_config, r, rep_seed(cfg.master_seed, r));
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return summarize(cfg, reps);
}

}  // namespace mfrail
