#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dfo/benchmarking.hpp"
#include "dfo/hybrid.hpp"
#include "dfo/io.hpp"
#include "dfo/multiobjective.hpp"
#include "dfo/objective.hpp"
#include "dfo/svg.hpp"

namespace dfo {

struct RunConfig {
  std::string problem;                 // solve
  std::vector<std::string> problems;   // bench filter; empty = full suite
  std::string solver = "tr_ds";
  std::vector<std::string> solvers = {"tr_ds", "basic_tr", "basic_ds"};
  std::string mo_problem = "toy_biobj";
  std::optional<std::vector<double>> weights;  // pareto single-weight override
  std::vector<double> taus = {1e-1, 1e-3, 1e-5};
  std::string metric = "time";      // time | evals
  std::string fl_source = "hint";   // hint | best_found
  std::int64_t budget = 0;          // 0: solve -> hybrid.max_evals, bench -> 5000(n+1)
  int jobs = 1;
  std::string output_dir = "out";
  std::string summaries_dir;        // profiles subcommand input
  bool dump_points = false;
  HybridConfig hybrid;

  // Env var wins over flags and config file for the output directory.
  std::string effective_output_dir() const {
    if (const char* env = std::getenv("HYBRID_DFO_OUT"); env && *env) return env;
    return output_dir;
  }
};

// ---------------------------------------------------------------------------
// Sectioned key/value config file
// ---------------------------------------------------------------------------

namespace detail {

inline std::string ini_trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

inline std::int64_t parse_int(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = ini_trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Parses the sectioned key/value config file into cfg. Unknown sections or
// keys fail with a line-anchored message. CLI flags are applied afterwards
// by the caller, so flags win.
inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    std::string t = detail::ini_trim(line);
    if (auto h = t.find_first_of("#;"); h != std::string::npos) t = detail::ini_trim(t.substr(0, h));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": malformed section header");
      section = detail::ini_trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = detail::ini_trim(t.substr(0, eq));
    const std::string val = detail::ini_trim(t.substr(eq + 1));

    auto& tr = cfg.hybrid.tr;
    auto& ds = cfg.hybrid.ds;
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;

    if (section == "trust_region") {
      if (key == "delta0") tr.delta0 = parse_double(val, where);
      else if (key == "delta_min") tr.delta_min = parse_double(val, where);
      else if (key == "delta_max") tr.delta_max = parse_double(val, where);
      else if (key == "eta0") tr.eta0 = parse_double(val, where);
      else if (key == "eta1") tr.eta1 = parse_double(val, where);
      else if (key == "gamma_inc") tr.gamma_inc = parse_double(val, where);
      else if (key == "gamma_dec") tr.gamma_dec = parse_double(val, where);
      else if (key == "epsilon_low") tr.epsilon_low = parse_double(val, where);
      else if (key == "mu") tr.mu = parse_double(val, where);
      else if (key == "beta") tr.beta = parse_double(val, where);
      else if (key == "omega") tr.omega = parse_double(val, where);
      else if (key == "kappa_bhm") tr.kappa_bhm = parse_double(val, where);
      else if (key == "criticality_round_budget")
        tr.criticality_round_budget = static_cast<int>(parse_int(val, where));
      else throw ConfigError(where + ": unknown trust_region key '" + key + "'");
    } else if (section == "direct_search") {
      if (key == "epsilon_ds") ds.epsilon_ds = parse_double(val, where);
      else if (key == "k_ds") ds.k_ds = static_cast<int>(parse_int(val, where));
      else if (key == "t_fail") ds.t_fail = static_cast<int>(parse_int(val, where));
      else if (key == "tau_shrink") ds.tau_shrink = parse_double(val, where);
      else if (key == "expand_factor") ds.expand_factor = parse_double(val, where);
      else if (key == "use_search_step") ds.use_search_step = parse_bool(val, where);
      else throw ConfigError(where + ": unknown direct_search key '" + key + "'");
    } else if (section == "hybrid") {
      if (key == "t_ds_max") cfg.hybrid.t_ds_max = static_cast<int>(parse_int(val, where));
      else if (key == "max_evals") cfg.hybrid.max_evals = parse_int(val, where);
      else if (key == "max_time_s") cfg.hybrid.max_time_s = parse_double(val, where);
      else if (key == "seed") cfg.hybrid.seed = static_cast<std::uint64_t>(parse_int(val, where));
      else if (key == "max_set_size") cfg.hybrid.max_set_size = static_cast<int>(parse_int(val, where));
      else throw ConfigError(where + ": unknown hybrid key '" + key + "'");
    } else if (section == "run") {
      if (key == "problem") cfg.problem = val;
      else if (key == "problems") cfg.problems = detail::split_list(val);
      else if (key == "solver") cfg.solver = val;
      else if (key == "solvers") cfg.solvers = detail::split_list(val);
      else if (key == "mo_problem") cfg.mo_problem = val;
      else if (key == "metric") cfg.metric = val;
      else if (key == "fl_source") cfg.fl_source = val;
      else if (key == "budget") cfg.budget = parse_int(val, where);
      else if (key == "jobs") cfg.jobs = static_cast<int>(parse_int(val, where));
      else if (key == "output_dir") cfg.output_dir = val;
      else if (key == "dump_points") cfg.dump_points = parse_bool(val, where);
      else if (key == "taus") {
        cfg.taus.clear();
        for (const auto& s : detail::split_list(val)) cfg.taus.push_back(parse_double(s, where));
      } else throw ConfigError(where + ": unknown run key '" + key + "'");
    } else {
      throw ConfigError(where + ": unknown section '" + section + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

namespace detail {

inline SolveResult dispatch_solver(const std::string& solver, const ObjectiveProblem& problem,
                                   const HybridConfig& cfg,
                                   std::vector<EvalRecord>* history) {
  if (solver == "tr_ds") return hybrid_solve(problem, cfg, history);
  if (solver == "basic_tr") return basic_tr_solve(problem, cfg, history);
  if (solver == "basic_ds") return basic_ds_solve(problem, cfg, history);
  throw ConfigError("unknown solver '" + solver + "' (valid: tr_ds, basic_tr, basic_ds)");
}

inline std::string tau_tag(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", tau);
  return buf;
}

struct BenchRun {
  RunSummary summary;
  bool failed = false;
  std::string error;
};

}  // namespace detail

inline int cmd_solve(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    const auto registry = problem_registry();
    const ObjectiveProblem* problem = find_problem(registry, cfg.problem);
    if (!problem) {
      std::string names;
      for (const auto& p : registry) names += (names.empty() ? "" : ", ") + p.name;
      throw ConfigError("unknown problem '" + cfg.problem + "' (valid: " + names + ")");
    }
    HybridConfig hc = cfg.hybrid;
    if (cfg.budget > 0) hc.max_evals = cfg.budget;
    hc.validate();

    std::vector<EvalRecord> history;
    SolveResult result = detail::dispatch_solver(cfg.solver, *problem, hc, &history);

    const std::string dir = cfg.effective_output_dir();
    std::filesystem::create_directories(dir);
    const std::string stem = dir + "/" + problem->name + "_" + cfg.solver;

    std::ostringstream trace;
    write_trace_csv(trace, result.trace);
    if (!write_text_file(stem + "_trace.csv", trace.str()))
      throw ConfigError("cannot write " + stem + "_trace.csv");

    std::ostringstream hist;
    hist << "eval_index,time_s,f_value";
    if (cfg.dump_points)
      for (int i = 0; i < problem->dim; ++i) hist << ",x" << i + 1;
    hist << "\n";
    for (const auto& rec : history) {
      hist << rec.index << "," << fmt::num(rec.time_s) << "," << fmt::num(rec.value);
      if (cfg.dump_points)
        for (int i = 0; i < rec.x.size(); ++i) hist << "," << fmt::num(rec.x[i]);
      hist << "\n";
    }
    write_text_file(stem + "_history.csv", hist.str());

    RunSummary summary = make_summary(*problem, cfg.solver, result, history, hc.seed);
    write_text_file(stem + "_summary.json", to_json(summary).dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    err << "solve: " << e.what() << "\n";
    return 2;
  }
}

namespace detail {

inline std::vector<ResultCell> cells_for_tau(const std::vector<RunSummary>& runs, double tau,
                                             const std::string& metric,
                                             const std::string& fl_source) {
  // f_L per problem: the known optimum when requested and available,
  // otherwise the best value any solver found
  std::map<std::string, double> fl;
  std::map<std::string, bool> pinned;
  for (const auto& r : runs) {
    if (fl_source == "hint" && r.f_opt_hint) {
      fl[r.problem] = *r.f_opt_hint;
      pinned[r.problem] = true;
      continue;
    }
    if (pinned[r.problem]) continue;
    auto it = fl.find(r.problem);
    fl[r.problem] = it == fl.end() ? r.f_best : std::min(it->second, r.f_best);
  }
  std::vector<ResultCell> cells;
  for (const auto& r : runs) {
    ResultCell cell;
    cell.problem = r.problem;
    cell.solver = r.solver;
    cell.n_p = r.n;
    cell.f_best = r.f_best;
    auto cost = convergence_cost(r.improvements, r.f0, fl[r.problem], tau, metric);
    cell.converged = cost.has_value();
    // zero-cost crossings (already converged at x0) count epsilon cost
    cell.t = cost ? std::max(*cost, 1e-9) : 0.0;
    cells.push_back(std::move(cell));
  }
  return cells;
}

inline void write_profiles_for(const std::vector<RunSummary>& runs, const RunConfig& cfg,
                               const std::string& dir, Json& report) {
  for (double tau : cfg.taus) {
    auto cells = cells_for_tau(runs, tau, cfg.metric, cfg.fl_source);
    const std::string tag = tau_tag(tau);
    for (const char* family : {"performance", "data"}) {
      std::vector<ProfileCurve> curves;
      try {
        curves = std::string(family) == "performance" ? performance_profile(cells)
                                                      : data_profile(cells);
      } catch (const EmptyResults& e) {
        report["warnings"].push_back(std::string(family) + " tau=" + tag + ": " + e.what());
        continue;
      }
      std::ostringstream csv;
      write_profile_csv(csv, curves);
      const std::string stem = dir + "/" + family + "_profile_tau" + tag;
      write_text_file(stem + ".csv", csv.str());

      const std::string xl = std::string(family) == "performance"
                                 ? "performance ratio alpha"
                                 : "unit cost t/(n+1)";
      SvgPlot plot(std::string(family) + " profile, tau=" + tag + ", metric=" + cfg.metric, xl,
                   "fraction of problems");
      for (const auto& c : curves) plot.add_step(c.solver, c.abscissae, c.ordinates);
      plot.write(stem + ".svg");
    }
  }
}

}  // namespace detail

inline int cmd_bench(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    auto suite = benchmark_suite();
    std::vector<ObjectiveProblem> problems;
    if (cfg.problems.empty()) {
      problems = suite;
    } else {
      for (const auto& name : cfg.problems) {
        const ObjectiveProblem* p = find_problem(suite, name);
        if (!p) throw ConfigError("unknown suite problem '" + name + "'");
        problems.push_back(*p);
      }
    }
    if (problems.empty()) throw ConfigError("empty problem selection");
    for (const auto& s : cfg.solvers)
      if (s != "tr_ds" && s != "basic_tr" && s != "basic_ds")
        throw ConfigError("unknown solver '" + s + "' (valid: tr_ds, basic_tr, basic_ds)");
    if (cfg.metric != "time" && cfg.metric != "evals")
      throw ConfigError("metric must be 'time' or 'evals'");
    if (cfg.fl_source != "hint" && cfg.fl_source != "best_found")
      throw ConfigError("fl_source must be 'hint' or 'best_found'");

    const std::string dir = cfg.effective_output_dir();
    std::filesystem::create_directories(dir + "/runs");

    struct Task {
      const ObjectiveProblem* problem;
      std::string solver;
    };
    std::vector<Task> tasks;
    for (const auto& p : problems)
      for (const auto& s : cfg.solvers) tasks.push_back({&p, s});

    std::vector<detail::BenchRun> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        const Task& task = tasks[i];
        detail::BenchRun& out = results[i];
        try {
          HybridConfig hc = cfg.hybrid;
          hc.max_evals = cfg.budget > 0 ? cfg.budget : 5000LL * (task.problem->dim + 1);
          hc.seed = fork_seed(cfg.hybrid.seed, task.problem->name + "/" + task.solver);
          std::vector<EvalRecord> history;
          SolveResult res = detail::dispatch_solver(task.solver, *task.problem, hc, &history);
          out.summary = make_summary(*task.problem, task.solver, res, history, hc.seed);
        } catch (const std::exception& e) {
          out.failed = true;
          out.error = task.problem->name + "/" + task.solver + ": " + e.what();
        }
      }
    };
    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Json report;
    report["fl_source"] = cfg.fl_source;
    report["metric"] = cfg.metric;
    report["warnings"] = Json::array();
    report["failures"] = Json::array();

    std::vector<RunSummary> runs;
    for (const auto& r : results) {
      if (r.failed) {
        report["failures"].push_back(r.error);
        err << "bench: run failed: " << r.error << "\n";
        continue;
      }
      runs.push_back(r.summary);
      write_text_file(dir + "/runs/" + r.summary.problem + "_" + r.summary.solver +
                          "_summary.json",
                      to_json(r.summary).dump(2) + "\n");
    }
    if (runs.empty()) throw ConfigError("all benchmark runs failed");

    detail::write_profiles_for(runs, cfg, dir, report);
    write_text_file(dir + "/bench_report.json", report.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    err << "bench: " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_pareto(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    const auto registry = mo_registry();
    const MoProblem* mo = find_mo_problem(registry, cfg.mo_problem);
    if (!mo) {
      std::string names;
      for (const auto& p : registry) names += (names.empty() ? "" : ", ") + p.name;
      throw ConfigError("unknown multiobjective problem '" + cfg.mo_problem +
                        "' (valid: " + names + ")");
    }
    const int m = static_cast<int>(mo->objectives.size());

    ScalarSolverKind kind;
    if (cfg.solver == "tr_ds") kind = ScalarSolverKind::tr_ds;
    else if (cfg.solver == "basic_tr") kind = ScalarSolverKind::basic_tr;
    else if (cfg.solver == "basic_ds") kind = ScalarSolverKind::basic_ds;
    else throw ConfigError("unknown solver '" + cfg.solver +
                           "' (valid: tr_ds, basic_tr, basic_ds)");

    HybridConfig hc = cfg.hybrid;
    if (cfg.budget > 0) hc.max_evals = cfg.budget;
    hc.validate();

    MoResult result;
    if (cfg.weights) {
      if (static_cast<int>(cfg.weights->size()) != m)
        throw ConfigError("weights length " + std::to_string(cfg.weights->size()) +
                          " does not match objective count " + std::to_string(m));
      WeightVector w{*cfg.weights};
      w.validate();
      // single-weight run: restrict the driver to the given weight by
      // running the scalarization directly through the same machinery
      MoProblem single = *mo;
      result = [&] {
        MoResult out;
        ObjectiveVector ref;
        ref.values.assign(static_cast<std::size_t>(m), 1.0);
        std::int64_t counter = 0;
        const auto t0 = std::chrono::steady_clock::now();
        ObjectiveProblem scalarized;
        scalarized.name = single.name + "_w";
        scalarized.dim = single.objectives.front().dim;
        scalarized.x0 = single.objectives.front().x0;
        scalarized.bounds = single.objectives.front().bounds;
        scalarized.eval = [&](const Vector& x) {
          std::vector<double> raw(static_cast<std::size_t>(m));
          for (int i = 0; i < m; ++i) raw[static_cast<std::size_t>(i)] = single.objectives[static_cast<std::size_t>(i)].eval(x);
          ObjectiveVector fvec = normalize_objectives(raw, single.ranges);
          double fws = weighted_sum(fvec, w);
          ParetoEntry entry;
          entry.x = x;
          entry.f = std::move(fvec);
          entry.weight_index = 0;
          entry.eval_index = ++counter;
          entry.time_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          out.archive.entries.push_back(std::move(entry));
          return fws;
        };
        switch (kind) {
          case ScalarSolverKind::tr_ds: hybrid_solve(scalarized, hc); break;
          case ScalarSolverKind::basic_tr: basic_tr_solve(scalarized, hc); break;
          case ScalarSolverKind::basic_ds: basic_ds_solve(scalarized, hc); break;
        }
        out.archive.front = pareto_filter(out.archive);
        ObjectiveVector unit = ref;
        std::vector<ObjectiveVector> running;
        for (const auto& e : out.archive.entries) {
          bool covered = false;
          for (const auto& p : running)
            if (dominates(p, e.f) || p == e.f) {
              covered = true;
              break;
            }
          if (!covered) {
            std::erase_if(running, [&](const ObjectiveVector& p) { return dominates(e.f, p); });
            running.push_back(e.f);
          }
          out.curve.push_back({e.time_s, e.eval_index, hypervolume(running, unit)});
        }
        return out;
      }();
    } else {
      result = mo_driver(*mo, kind, hc);
    }

    const std::string dir = cfg.effective_output_dir();
    std::filesystem::create_directories(dir);
    const std::string stem = dir + "/" + mo->name + "_" + cfg.solver;

    std::ostringstream front;
    front << "f1";
    for (int i = 1; i < m; ++i) front << ",f" << i + 1;
    front << ",weight_index,eval_index\n";
    for (int idx : result.archive.front) {
      const auto& e = result.archive.entries[static_cast<std::size_t>(idx)];
      for (int i = 0; i < m; ++i) front << (i ? "," : "") << fmt::num(e.f.values[static_cast<std::size_t>(i)]);
      front << "," << e.weight_index << "," << e.eval_index << "\n";
    }
    write_text_file(stem + "_front.csv", front.str());

    std::ostringstream curve;
    curve << "time_s,evals,hypervolume\n";
    for (const auto& s : result.curve)
      curve << fmt::num(s.time_s) << "," << s.evals << "," << fmt::num(s.hypervolume) << "\n";
    write_text_file(stem + "_hv_curve.csv", curve.str());

    if (m == 2) {
      SvgPlot plot(mo->name + " Pareto front (" + cfg.solver + ")", "f1", "f2");
      std::vector<double> f1, f2;
      for (int idx : result.archive.front) {
        f1.push_back(result.archive.entries[static_cast<std::size_t>(idx)].f.values[0]);
        f2.push_back(result.archive.entries[static_cast<std::size_t>(idx)].f.values[1]);
      }
      plot.add_scatter("front", f1, f2);
      plot.write(stem + "_front.svg");
    }
    {
      SvgPlot plot(mo->name + " hypervolume (" + cfg.solver + ")", "evaluations",
                   "hypervolume");
      std::vector<double> xs, ys;
      for (const auto& s : result.curve) {
        xs.push_back(double(s.evals));
        ys.push_back(s.hypervolume);
      }
      plot.add_line("hv", xs, ys);
      plot.write(stem + "_hv.svg");
    }

    Json j;
    j["problem"] = mo->name;
    j["solver"] = cfg.solver;
    j["objectives"] = m;
    j["front_size"] = result.archive.front.size();
    j["final_hypervolume"] = result.curve.empty() ? 0.0 : result.curve.back().hypervolume;
    j["evals"] = result.archive.entries.size();
    j["errors"] = result.errors;
    write_text_file(stem + "_summary.json", j.dump(2) + "\n");
    for (const auto& e : result.errors) err << "pareto: weight run failed: " << e << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "pareto: " << e.what() << "\n";
    return 2;
  }
}

// Re-derive profiles from a directory of per-run JSON summaries.
inline int cmd_profiles(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    if (cfg.summaries_dir.empty()) throw ConfigError("profiles: need an input directory");
    std::vector<RunSummary> runs;
    for (const auto& entry : std::filesystem::directory_iterator(cfg.summaries_dir)) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream is(entry.path());
      Json j;
      is >> j;
      if (!j.contains("problem") || !j.contains("improvements")) continue;
      runs.push_back(summary_from_json(j));
    }
    if (runs.empty())
      throw ConfigError("profiles: no run summaries found in '" + cfg.summaries_dir + "'");

    const std::string dir = cfg.effective_output_dir();
    std::filesystem::create_directories(dir);
    Json report;
    report["fl_source"] = cfg.fl_source;
    report["metric"] = cfg.metric;
    report["warnings"] = Json::array();
    detail::write_profiles_for(runs, cfg, dir, report);
    write_text_file(dir + "/bench_report.json", report.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    err << "profiles: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace dfo
