#include "mfrail/app/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfrail/app/report.hpp"
#include "mfrail/em.hpp"
#include "mfrail/simulation.hpp"
#include "mfrail/variance.hpp"

namespace mfrail::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MFRAIL_SEED")) {
    try {
      std::size_t pos = 0;
      const std::string s(env);
      const auto v = std::stoull(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  return kDefaultSeed;
}

namespace {

bool write_file(const fs::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << path.string() << "'\n";
    return false;
  }
  f << content;
  return static_cast<bool>(f);
}

json fit_config_echo(const FitOptions& o) {
  json where = json::array();
  for (const auto& [k, v] : o.columns.where) where.push_back({{"column", k}, {"value", v}});
  return json{{"data", o.data_path},
              {"cluster_col", o.columns.cluster},
              {"time_col", o.columns.time},
              {"event_col", o.columns.event},
              {"covariates", o.columns.covariates},
              {"member_index_col", o.columns.member_index ? json(*o.columns.member_index) : json(nullptr)},
              {"where", where},
              {"correlation", to_string(o.correlation)},
              {"tol", o.tol},
              {"max_outer", o.max_outer}};
}

}  // namespace

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  std::optional<LoadedData> loaded;
  try {
    loaded = load_csv_file(opts.data_path, opts.columns);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& d : e.diagnostics()) err << "  " << d << '\n';
    return kExitInput;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  if (opts.correlation == CorrelationKind::Fixed) {
    err << "error: --correlation must be exchangeable or ar1\n";
    return kExitInput;
  }

  FitConfig cfg;
  cfg.correlation = opts.correlation;
  cfg.tol_params = opts.tol;
  cfg.max_outer_iters = opts.max_outer;
  FitResult result;
  try {
    cfg.validate();
    result = fit(loaded->data, cfg);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "error: fit failed: " << e.what() << '\n';
    return kExitConvergence;
  }

  std::optional<SandwichEstimate> est;
  std::string se_problem;
  try {
    est = sandwich(loaded->data, result);
  } catch (const Error& e) {
    se_problem = e.what();
  }
  FitReport report = make_fit_report(*loaded, result, est ? &*est : nullptr,
                                     fit_config_echo(opts), opts.seed);
  if (!se_problem.empty()) report.warnings.push_back("variance: " + se_problem);

  const std::string text = json(report).dump(2) + "\n";
  if (opts.out_path) {
    if (!write_file(*opts.out_path, text, err)) return kExitInput;
  } else {
    out << text;
  }
  if (!result.converged) {
    err << "error: " << (result.message.empty() ? "fit did not converge" : result.message) << '\n';
    return kExitConvergence;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    if (opts.scenario == "table1" || opts.scenario == "table2") {
      cfg = table_scenario(opts.scenario == "table1" ? 1 : 2, opts.rho, opts.censoring,
                           opts.reps.value_or(200), opts.seed.value_or(default_seed()));
    } else {
      cfg = load_scenario_file(opts.scenario);
      if (opts.reps) cfg.n_reps = *opts.reps;
      if (opts.seed) cfg.master_seed = *opts.seed;
    }
    cfg.validate();
    if (cfg.n_reps < 2) throw ParameterError("--reps must be at least 2 (SSE needs two replicates)");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  const SummaryTable table = run_scenario(cfg, FitConfig{}, opts.threads);
  write_display_table(out, {table});
  if (opts.out_prefix) {
    std::ostringstream csv;
    write_summary_csv(csv, {table});
    if (!write_file(*opts.out_prefix + ".csv", csv.str(), err) ||
        !write_file(*opts.out_prefix + ".json", summary_to_json(table).dump(2) + "\n", err))
      return kExitInput;
  }
  if (table.flagged) {
    err << "warning: scenario " << cfg.name << " flagged: " << table.n_failed << " of "
        << table.n_reps << " replicates failed\n";
    return kExitConvergence;
  }
  return kExitOk;
}

int cmd_benchmark(const BenchmarkOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.reps < 2) {
    err << "error: --reps must be at least 2\n";
    return kExitInput;
  }
  if (opts.out_dir.empty()) {
    err << "error: --out is required\n";
    return kExitInput;
  }
  const fs::path dir(opts.out_dir);
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      err << "error: '" << opts.out_dir << "' is not a directory\n";
      return kExitInput;
    }
    if (!fs::is_empty(dir, ec) && !opts.force) {
      err << "error: output directory '" << opts.out_dir << "' is not empty (use --force)\n";
      return kExitInput;
    }
  } else if (!fs::create_directories(dir, ec)) {
    err << "error: cannot create '" << opts.out_dir << "'\n";
    return kExitInput;
  }

  std::vector<ScenarioConfig> grid;
  for (int table : {1, 2}) {
    if (opts.table && *opts.table != table) continue;
    for (int cens : {40, 75}) {
      if (opts.censoring && *opts.censoring != cens) continue;
      for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        if (opts.rho && std::abs(*opts.rho - rho) > 1e-9) continue;
        grid.push_back(table_scenario(table, rho, cens, opts.reps, opts.seed));
      }
    }
  }
  if (grid.empty()) {
    err << "error: the row filter selects no scenario\n";
    return kExitInput;
  }

  std::vector<SummaryTable> tables;
  json combined = json::array();
  bool any_flagged = false;
  for (const ScenarioConfig& cfg : grid) {
    err << "running " << cfg.name << " (" << cfg.n_reps << " reps)\n";
    try {
      SummaryTable t = run_scenario(cfg, FitConfig{}, opts.threads);
      std::ostringstream csv;
      write_summary_csv(csv, {t});
      const json j = summary_to_json(t);
      if (!write_file(dir / (cfg.name + ".csv"), csv.str(), err) ||
          !write_file(dir / (cfg.name + ".json"), j.dump(2) + "\n", err))
        return kExitInput;
      combined.push_back(j);
      any_flagged = any_flagged || t.flagged;
      tables.push_back(std::move(t));
    } catch (const std::exception& e) {
      err << "error: scenario " << cfg.name << " failed: " << e.what() << '\n';
      combined.push_back({{"scenario", {{"name", cfg.name}}}, {"error", e.what()}});
      any_flagged = true;
    }
  }

  std::ostringstream csv, txt;
  write_summary_csv(csv, tables);
  write_display_table(txt, tables);
  if (!write_file(dir / "combined.csv", csv.str(), err) ||
      !write_file(dir / "combined.json", combined.dump(2) + "\n", err) ||
      !write_file(dir / "combined.txt", txt.str(), err))
    return kExitInput;
  out << txt.str();
  return any_flagged ? kExitConvergence : kExitOk;
}

}  // namespace mfrail::app
