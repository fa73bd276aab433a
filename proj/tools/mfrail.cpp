#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfrail/app/commands.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mfrail;
  CLI::App app{"Marginalizable frailty proportional-odds models for clustered survival data"};
  app.require_subcommand(1);

  // fit
  app::FitOptions fit_opts;
  fit_opts.seed = app::default_seed();
  std::string covariates, correlation = "exchangeable", out_path;
  std::vector<std::string> where;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a clustered right-censored dataset from CSV");
  fit_cmd->add_option("--data", fit_opts.data_path, "Input CSV")->required();
  fit_cmd->add_option("--cluster-col", fit_opts.columns.cluster, "Cluster id column")
      ->capture_default_str();
  fit_cmd->add_option("--time-col", fit_opts.columns.time, "Follow-up time column")
      ->capture_default_str();
  fit_cmd->add_option("--event-col", fit_opts.columns.event, "Event indicator column (0/1)")
      ->capture_default_str();
  fit_cmd->add_option("--covariates", covariates, "Comma separated covariate columns")->required();
  fit_cmd->add_option("--member-col", "Position within cluster (defaults to row order)")
      ->type_name("TEXT")
      ->each([&](const std::string& s) { fit_opts.columns.member_index = s; });
  fit_cmd->add_option("--where", where, "Row filter COLUMN=VALUE (repeatable)");
  fit_cmd->add_option("--correlation", correlation, "exchangeable | ar1")
      ->check(CLI::IsMember({"exchangeable", "ar1"}))
      ->capture_default_str();
  fit_cmd->add_option("--out", out_path, "Write the JSON report here instead of stdout");
  fit_cmd->add_option("--seed", fit_opts.seed, "Seed echoed into the report (default $MFRAIL_SEED)");
  fit_cmd->add_option("--tol", fit_opts.tol, "Outer parameter tolerance")->capture_default_str();
  fit_cmd->add_option("--max-iter", fit_opts.max_outer, "Outer iteration budget")
      ->capture_default_str();

  // simulate
  app::SimulateOptions sim_opts;
  std::uint64_t sim_seed = 0;
  int sim_reps = 0;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one Monte Carlo scenario");
  sim_cmd->add_option("--scenario", sim_opts.scenario, "table1 | table2 | scenario file")
      ->capture_default_str();
  sim_cmd->add_option("--rho", sim_opts.rho, "True frailty correlation")->capture_default_str();
  sim_cmd->add_option("--censoring", sim_opts.censoring, "40 | 75")->capture_default_str();
  auto* sim_reps_opt = sim_cmd->add_option("--reps", sim_reps, "Replicates (default 200)");
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Master seed (default $MFRAIL_SEED)");
  sim_cmd->add_option("--out", sim_out, "Output prefix for <prefix>.csv and <prefix>.json");
  sim_cmd->add_option("--threads", sim_opts.threads, "Worker threads (0 = all cores)");

  // benchmark
  app::BenchmarkOptions bench_opts;
  bench_opts.seed = app::default_seed();
  auto* bench_cmd = app.add_subcommand("benchmark", "Run the full scenario grid");
  bench_cmd->add_option("--reps", bench_opts.reps, "Replicates per scenario")->capture_default_str();
  bench_cmd->add_option("--seed", bench_opts.seed, "Master seed (default $MFRAIL_SEED)");
  bench_cmd->add_option("--out", bench_opts.out_dir, "Output directory")->required();
  bench_cmd->add_flag("--force", bench_opts.force, "Allow a non-empty output directory");
  bench_cmd->add_option("--table", "Only structure 1 (exchangeable) or 2 (ar1)")
      ->type_name("INT")
      ->check(CLI::IsMember({1, 2}))
      ->each([&](const std::string& s) { bench_opts.table = std::stoi(s); });
  bench_cmd->add_option("--censoring", "Only censoring level 40 or 75")
      ->type_name("INT")
      ->check(CLI::IsMember({40, 75}))
      ->each([&](const std::string& s) { bench_opts.censoring = std::stoi(s); });
  bench_cmd->add_option("--rho", "Only this true rho")
      ->type_name("FLOAT")
      ->check(CLI::Number)
      ->each([&](const std::string& s) { bench_opts.rho = std::stod(s); });
  bench_cmd->add_option("--threads", bench_opts.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : app::kExitInput;
  }

  try {
    if (*fit_cmd) {
      fit_opts.columns.covariates = split_list(covariates);
      fit_opts.correlation = parse_correlation_kind(correlation);
      for (const auto& w : where) {
        const auto eq = w.find('=');
        if (eq == std::string::npos || eq == 0) {
          std::cerr << "error: --where expects COLUMN=VALUE, got '" << w << "'\n";
          return app::kExitInput;
        }
        fit_opts.columns.where.emplace_back(w.substr(0, eq), w.substr(eq + 1));
      }
      if (!out_path.empty()) fit_opts.out_path = out_path;
      return app::cmd_fit(fit_opts, std::cout, std::cerr);
    }
    if (*sim_cmd) {
      if (*sim_reps_opt) sim_opts.reps = sim_reps;
      if (*sim_seed_opt) sim_opts.seed = sim_seed;
      if (!sim_out.empty()) sim_opts.out_prefix = sim_out;
      return app::cmd_simulate(sim_opts, std::cout, std::cerr);
    }
    if (*bench_cmd) return app::cmd_benchmark(bench_opts, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return app::kExitInput;
  }
  return app::kExitInput;
}
