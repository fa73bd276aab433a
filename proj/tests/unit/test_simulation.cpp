#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mfrail/error.hpp"
#include "mfrail/oracle.hpp"
#include "mfrail/simulation.hpp"

using namespace mfrail;

namespace {

double censoring_fraction(const ScenarioConfig& cfg, int n_subjects, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long n = 0, censored = 0;
  while (n < n_subjects) {
    const Cluster c = generate_cluster(cfg, rng);
    for (const auto& o : c.members) {
      ++n;
      censored += o.event == 0;
    }
  }
  return static_cast<double>(censored) / n;
}

bool same_summary(const SummaryTable& a, const SummaryTable& b) {
  if (a.rows.size() != b.rows.size() || a.n_used != b.n_used || a.n_failed != b.n_failed ||
      a.mean_censoring != b.mean_censoring)
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto &x = a.rows[i], &y = b.rows[i];
    if (x.bias != y.bias || x.see != y.see || x.sse != y.sse || x.mse != y.mse ||
        x.coverage != y.coverage || x.n != y.n)
      return false;
  }
  return true;
}

ScenarioConfig small_scenario(int reps) {
  ScenarioConfig cfg = table_scenario(1, 0.5, 40, reps, 77);
  cfg.m_clusters = 40;
  return cfg;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("censoring rates of the two designs") {
  CHECK(std::abs(censoring_fraction(table_scenario(1, 0.5, 40, 2, 1), 100'000, 11) - 0.40) <= 0.02);
  CHECK(std::abs(censoring_fraction(table_scenario(1, 0.5, 75, 2, 1), 100'000, 12) - 0.75) <= 0.02);
  CHECK(std::abs(censoring_fraction(table_scenario(2, 0.9, 40, 2, 1), 100'000, 13) - 0.40) <= 0.02);
  CHECK(std::abs(censoring_fraction(table_scenario(2, 0.1, 75, 2, 1), 100'000, 14) - 0.75) <= 0.02);
}

TEST_CASE("inverse transform with a unit-rate baseline gives Exp(1)") {
  ScenarioConfig cfg;
  cfg.baseline_scale = 1.0;
  cfg.baseline_shape = 1.0;
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> E(1.0);
  std::vector<double> t;
  for (int i = 0; i < 100'000; ++i) t.push_back(cfg.baseline_inverse(E(rng)));
  CHECK(oracle::ks_test(t, [](double x) { return 1.0 - std::exp(-x); }).p_value > 0.01);
  for (double x : {0.1, 1.0, 7.5}) {
    ScenarioConfig d;
    CHECK(d.cumulative_baseline(d.baseline_inverse(x)) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("uncensored generated times have log-logistic marginals") {
  // Integrating out a unit exponential frailty, Lambda0(T) exp(z'beta) has
  // survival 1 / (1 + x).
  ScenarioConfig cfg;
  cfg.censor_mean = 1e12;
  cfg.censor_cap = 1e12;
  std::mt19937_64 rng(8);
  std::vector<double> x;
  for (int i = 0; i < 50'000; ++i) {
    const Cluster c = generate_cluster(cfg, rng);
    const auto& o = c.members.front();
    REQUIRE(o.event == 1);
    x.push_back(cfg.cumulative_baseline(o.time) * std::exp(o.covariates.dot(cfg.beta_true)));
  }
  CHECK(oracle::ks_test(x, [](double s) { return s / (1.0 + s); }).p_value > 0.01);
}

TEST_CASE("generated covariates follow the design") {
  ScenarioConfig cfg;
  std::mt19937_64 rng(21);
  double s1 = 0.0, s11 = 0.0, z0 = 0.0;
  long n = 0;
  std::vector<int> sizes(8, 0);
  for (int i = 0; i < 20'000; ++i) {
    const Cluster c = generate_cluster(cfg, rng);
    ++sizes[c.size()];
    for (const auto& o : c.members) {
      const double a = o.covariates(0);
      const double b = o.covariates(1) - 0.2 * a + 0.3;  // recovers Z0
      CHECK((std::abs(b) < 1e-12 || std::abs(b - 1.0) < 1e-12));
      s1 += a;
      s11 += a * a;
      z0 += b;
      ++n;
    }
  }
  CHECK(sizes[4] == 0);
  for (int k = 5; k <= 7; ++k) CHECK(std::abs(sizes[k] / 20'000.0 - 1.0 / 3.0) < 0.015);
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s11 / n - 0.5) < 0.01);
  CHECK(std::abs(z0 / n - 0.3) < 0.01);
}

TEST_CASE("rho = 0: exchangeable and AR(1) generators coincide") {
  ScenarioConfig ex = table_scenario(1, 0.0, 40, 2, 1);
  ScenarioConfig ar = table_scenario(2, 0.0, 40, 2, 1);
  std::mt19937_64 r1(99), r2(99);
  const Dataset a = generate_dataset(ex, r1), b = generate_dataset(ar, r2);
  REQUIRE(a.n_clusters() == b.n_clusters());
  for (std::size_t i = 0; i < a.n_clusters(); ++i) {
    const auto &ca = a.clusters()[i], &cb = b.clusters()[i];
    REQUIRE(ca.size() == cb.size());
    for (std::size_t j = 0; j < ca.size(); ++j) {
      CHECK(ca.members[j].time == cb.members[j].time);
      CHECK(ca.members[j].event == cb.members[j].event);
      CHECK(ca.members[j].covariates == cb.members[j].covariates);
    }
  }
}

TEST_CASE("degenerate aggregation with identical replicates") {
  const ScenarioConfig cfg = small_scenario(2);
  const FitConfig fc;
  RepResult r0 = run_rep(cfg, fc, 0, rep_seed(cfg.master_seed, 0));
  REQUIRE(r0.ok);
  RepResult r1 = r0;
  r1.rep = 1;
  const SummaryTable s = summarize(cfg, {r0, r1});
  REQUIRE(s.rows.size() == 3);
  for (const auto& row : s.rows) {
    CHECK(row.sse == 0.0);
    CHECK((row.coverage == 0.0 || row.coverage == 0.5 || row.coverage == 1.0));
    CHECK(row.mse == row.bias * row.bias);
  }
  CHECK(s.rows[0].bias == r0.beta_hat(0) - 1.2);
}

TEST_CASE("aggregates: MSE identity, order and thread invariance") {
  const ScenarioConfig cfg = small_scenario(8);
  const FitConfig fc;
  const SummaryTable one = run_scenario(cfg, fc, 1);
  const SummaryTable three = run_scenario(cfg, fc, 3);
  CHECK(same_summary(one, three));
  CHECK(one.n_reps == 8);
  for (const auto& row : one.rows) {
    CHECK(row.mse == row.bias * row.bias + row.sse * row.sse);
    CHECK(row.see > 0.0);
  }

  std::vector<RepResult> reps;
  for (int r = 0; r < 8; ++r) reps.push_back(run_rep(cfg, fc, r, rep_seed(cfg.master_seed, r)));
  const SummaryTable ordered = summarize(cfg, reps);
  std::mt19937_64 rng(4);
  std::shuffle(reps.begin(), reps.end(), rng);
  CHECK(same_summary(ordered, summarize(cfg, reps)));
  CHECK(same_summary(ordered, one));
}

TEST_CASE("failed replicates are excluded and flag the scenario") {
  const ScenarioConfig cfg = small_scenario(4);
  const FitConfig fc;
  std::vector<RepResult> reps;
  for (int r = 0; r < 4; ++r) reps.push_back(run_rep(cfg, fc, r, rep_seed(cfg.master_seed, r)));
  reps[2].ok = false;
  reps[2].message = "forced";
  const SummaryTable s = summarize(cfg, reps);
  CHECK(s.n_used == 3);
  CHECK(s.n_failed == 1);
  CHECK(s.flagged);
  CHECK(s.failures.size() == 1);
}

TEST_CASE("run_scenario needs two replicates") {
  CHECK_THROWS_AS(run_scenario(small_scenario(1), FitConfig{}, 1), ParameterError);
}

TEST_CASE("rep_seed") {
  CHECK(rep_seed(1, 0) == rep_seed(1, 0));
  CHECK(rep_seed(1, 0) != rep_seed(1, 1));
  CHECK(rep_seed(1, 0) != rep_seed(2, 0));
}

TEST_CASE("table_scenario and parse_scenario") {
  const ScenarioConfig t = table_scenario(2, 0.3, 75, 10, 5);
  CHECK(t.corr_kind == CorrelationKind::AR1);
  CHECK(t.censor_mean == 0.59);
  CHECK(t.rho_true == 0.3);
  CHECK_THROWS_AS(table_scenario(3, 0.3, 75, 10, 5), ParameterError);
  CHECK_THROWS_AS(table_scenario(1, 0.3, 50, 10, 5), ParameterError);

  const ScenarioConfig p = parse_scenario(
      "# comment\nname = mine\nm_clusters = 50\nbeta_true = 0.5, -1\ncorr_kind = ar1\n"
      "rho_true = 0.2 # trailing\nn_reps = 3\nmaster_seed = 17\n");
  CHECK(p.name == "mine");
  CHECK(p.m_clusters == 50);
  CHECK(p.beta_true.size() == 2);
  CHECK(p.beta_true(1) == -1.0);
  CHECK(p.corr_kind == CorrelationKind::AR1);
  CHECK(p.rho_true == 0.2);
  CHECK(p.master_seed == 17u);

  CHECK_THROWS_AS(parse_scenario("bogus = 1\n"), ParameterError);
  CHECK_THROWS_AS(parse_scenario("m_clusters = many\n"), ParameterError);
  CHECK_THROWS_AS(parse_scenario("rho_true = 1.5\n"), ParameterError);
  CHECK_THROWS_AS(parse_scenario("censor_mean = -1\n"), ParameterError);
}

TEST_CASE("AR(1), 75% censoring, rho 0.1: rho estimate biased upward") {
  const ScenarioConfig cfg = table_scenario(2, 0.1, 75, 200, 20240521);
  const SummaryTable s = run_scenario(cfg, FitConfig{});
  CHECK_FALSE(s.flagged);
  MESSAGE("rho bias = " << s.rows.back().bias);
  CHECK(s.rows.back().bias > 0.0);
}

}  // TEST_SUITE
