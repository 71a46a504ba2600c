// hybrid_dfo: derivative-free optimization with a hybrid trust-region /
// direct-search solver, baselines, a benchmark harness and a weighted-sum
// multiobjective driver.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "dfo/cli.hpp"

namespace {

// flags win over the config file: parse --config first, then reapply flags
struct FlagState {
  std::string config_path;
  std::string problem, solver, mo_problem, metric, fl_source, out, weights_csv, taus_csv;
  std::string problems_csv, solvers_csv, summaries_dir;
  long long budget = -1;
  long long seed = -1;
  long long t_ds_max = -1;
  int jobs = 0;
  double max_time_s = -1;
  bool dump_points = false;
};

void apply_flags(const FlagState& fs, dfo::RunConfig& cfg) {
  if (!fs.problem.empty()) cfg.problem = fs.problem;
  if (!fs.solver.empty()) cfg.solver = fs.solver;
  if (!fs.mo_problem.empty()) cfg.mo_problem = fs.mo_problem;
  if (!fs.metric.empty()) cfg.metric = fs.metric;
  if (!fs.fl_source.empty()) cfg.fl_source = fs.fl_source;
  if (!fs.out.empty()) cfg.output_dir = fs.out;
  if (!fs.summaries_dir.empty()) cfg.summaries_dir = fs.summaries_dir;
  if (fs.budget >= 0) cfg.budget = fs.budget;
  if (fs.seed >= 0) cfg.hybrid.seed = static_cast<std::uint64_t>(fs.seed);
  if (fs.t_ds_max >= 0) cfg.hybrid.t_ds_max = static_cast<int>(fs.t_ds_max);
  if (fs.jobs > 0) cfg.jobs = fs.jobs;
  if (fs.max_time_s >= 0) cfg.hybrid.max_time_s = fs.max_time_s;
  if (fs.dump_points) cfg.dump_points = true;
  if (!fs.problems_csv.empty()) cfg.problems = dfo::detail::split_list(fs.problems_csv);
  if (!fs.solvers_csv.empty()) cfg.solvers = dfo::detail::split_list(fs.solvers_csv);
  if (!fs.taus_csv.empty()) {
    cfg.taus.clear();
    for (const auto& s : dfo::detail::split_list(fs.taus_csv))
      cfg.taus.push_back(dfo::detail::parse_double(s, "--tau"));
  }
  if (!fs.weights_csv.empty()) {
    std::vector<double> w;
    for (const auto& s : dfo::detail::split_list(fs.weights_csv))
      w.push_back(dfo::detail::parse_double(s, "--weights"));
    cfg.weights = w;
  }
}

void add_common(CLI::App* app, FlagState& fs) {
  app->add_option("--config", fs.config_path, "sectioned key/value config file");
  app->add_option("--seed", fs.seed, "run seed");
  app->add_option("--budget", fs.budget, "evaluation budget (0 = auto)");
  app->add_option("--out", fs.out, "output directory");
  app->add_option("--max-time", fs.max_time_s, "wall-clock cap in seconds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid trust-region / direct-search derivative-free optimizer"};
  app.require_subcommand(1);

  FlagState fs_solve, fs_bench, fs_pareto, fs_profiles;

  CLI::App* solve = app.add_subcommand("solve", "run one solver on one problem");
  add_common(solve, fs_solve);
  solve->add_option("--problem", fs_solve.problem, "problem name");
  solve->add_option("--solver", fs_solve.solver, "tr_ds | basic_tr | basic_ds");
  solve->add_flag("--dump-points", fs_solve.dump_points, "add coordinates to the history CSV");

  CLI::App* bench = app.add_subcommand("bench", "suite x solvers sweep with profiles");
  add_common(bench, fs_bench);
  bench->add_option("--problems", fs_bench.problems_csv, "comma list (default: full suite)");
  bench->add_option("--solvers", fs_bench.solvers_csv, "comma list of solvers");
  bench->add_option("--tau", fs_bench.taus_csv, "comma list of convergence tolerances");
  bench->add_option("--metric", fs_bench.metric, "time | evals");
  bench->add_option("--fl-source", fs_bench.fl_source, "hint | best_found");
  bench->add_option("--jobs", fs_bench.jobs, "parallel runs");

  CLI::App* pareto = app.add_subcommand("pareto", "weighted-sum multiobjective driver");
  add_common(pareto, fs_pareto);
  pareto->add_option("--problem", fs_pareto.mo_problem, "multiobjective problem name");
  pareto->add_option("--solver", fs_pareto.solver, "scalar solver");
  pareto->add_option("--weights", fs_pareto.weights_csv, "single weight vector, comma list");
  pareto->add_option("--t-ds-max", fs_pareto.t_ds_max, "max TR->DS switches");

  CLI::App* profiles = app.add_subcommand("profiles", "re-derive profiles from summaries");
  add_common(profiles, fs_profiles);
  profiles->add_option("--in", fs_profiles.summaries_dir, "directory of run summaries")
      ->required();
  profiles->add_option("--tau", fs_profiles.taus_csv, "comma list of tolerances");
  profiles->add_option("--metric", fs_profiles.metric, "time | evals");
  profiles->add_option("--fl-source", fs_profiles.fl_source, "hint | best_found");

  CLI11_PARSE(app, argc, argv);

  auto run = [&](CLI::App* sub, FlagState& fs, auto&& fn) -> int {
    dfo::RunConfig cfg;
    try {
      if (!fs.config_path.empty()) dfo::load_config_file(fs.config_path, cfg);
      apply_flags(fs, cfg);
    } catch (const std::exception& e) {
      std::cerr << sub->get_name() << ": " << e.what() << "\n";
      return 2;
    }
    return fn(cfg, std::cerr);
  };

  if (solve->parsed())
    return run(solve, fs_solve, [](const auto& c, auto& e) { return dfo::cmd_solve(c, e); });
  if (bench->parsed())
    return run(bench, fs_bench, [](const auto& c, auto& e) { return dfo::cmd_bench(c, e); });
  if (pareto->parsed())
    return run(pareto, fs_pareto, [](const auto& c, auto& e) { return dfo::cmd_pareto(c, e); });
  if (profiles->parsed())
    return run(profiles, fs_profiles,
               [](const auto& c, auto& e) { return dfo::cmd_profiles(c, e); });
  return 2;
}
