#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfo/benchmarking.hpp"
#include "dfo/hybrid.hpp"
#include "dfo/objective.hpp"

namespace dfo {

using Json = nlohmann::json;

inline void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << "k,class,f,delta,rho,evals\n";
  for (const auto& rec : trace) {
    os << rec.k << "," << to_string(rec.cls) << "," << fmt::num(rec.f) << ","
       << fmt::num(rec.delta) << ",";
    if (rec.rho) os << fmt::num(*rec.rho);
    os << "," << rec.evals_so_far << "\n";
  }
}

struct Improvement {
  std::int64_t eval = 0;
  double time_s = 0.0;
  double f = 0.0;
};

// monotone envelope of best-so-far f over the evaluation history
inline std::vector<Improvement> improvements_from_history(const std::vector<EvalRecord>& history) {
  std::vector<Improvement> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : history) {
    if (rec.value < best) {
      best = rec.value;
      out.push_back({rec.index, rec.time_s, rec.value});
    }
  }
  return out;
}

// first cost (evaluations or seconds) at which the convergence test passes
inline std::optional<double> convergence_cost(const std::vector<Improvement>& improvements,
                                              double f0, double fL, double tau,
                                              const std::string& metric) {
  for (const auto& imp : improvements)
    if (convergence_test(imp.f, f0, fL, tau))
      return metric == "evals" ? double(imp.eval) : imp.time_s;
  return std::nullopt;
}

// Per-run summary. The spec'd keys plus what profile post-processing needs.
struct RunSummary {
  std::string problem;
  std::string solver;
  double f_best = 0.0;
  std::int64_t evals = 0;
  double time_s = 0.0;
  std::string stop_reason;
  int n = 0;
  double f0 = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> f_opt_hint;
  std::vector<Improvement> improvements;
};

inline Json to_json(const RunSummary& s) {
  Json j;
  j["problem"] = s.problem;
  j["solver"] = s.solver;
  j["f_best"] = s.f_best;
  j["evals"] = s.evals;
  j["time_s"] = s.time_s;
  j["stop_reason"] = s.stop_reason;
  j["n"] = s.n;
  j["f0"] = s.f0;
  j["seed"] = s.seed;
  if (s.f_opt_hint)
    j["f_opt_hint"] = *s.f_opt_hint;
  else
    j["f_opt_hint"] = nullptr;
  Json imps = Json::array();
  for (const auto& imp : s.improvements) imps.push_back({imp.eval, imp.time_s, imp.f});
  j["improvements"] = imps;
  return j;
}

inline RunSummary summary_from_json(const Json& j) {
  RunSummary s;
  s.problem = j.at("problem").get<std::string>();
  s.solver = j.at("solver").get<std::string>();
  s.f_best = j.at("f_best").get<double>();
  s.evals = j.at("evals").get<std::int64_t>();
  s.time_s = j.at("time_s").get<double>();
  s.stop_reason = j.at("stop_reason").get<std::string>();
  s.n = j.at("n").get<int>();
  s.f0 = j.at("f0").get<double>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("f_opt_hint") && !j.at("f_opt_hint").is_null())
    s.f_opt_hint = j.at("f_opt_hint").get<double>();
  if (j.contains("improvements"))
    for (const auto& e : j.at("improvements"))
      s.improvements.push_back({e.at(0).get<std::int64_t>(), e.at(1).get<double>(),
                                e.at(2).get<double>()});
  return s;
}

inline RunSummary make_summary(const ObjectiveProblem& problem, const std::string& solver,
                               const SolveResult& result, const std::vector<EvalRecord>& history,
                               std::uint64_t seed) {
  RunSummary s;
  s.problem = problem.name;
  s.solver = solver;
  s.f_best = result.f_best;
  s.evals = result.evals;
  s.time_s = result.time_s;
  s.stop_reason = to_string(result.stop_reason);
  s.n = problem.dim;
  s.f0 = history.empty() ? std::numeric_limits<double>::quiet_NaN() : history.front().value;
  s.seed = seed;
  s.f_opt_hint = problem.f_opt_hint;
  s.improvements = improvements_from_history(history);
  return s;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves) {
  os << "alpha,fraction,solver\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.abscissae.size(); ++i)
      os << fmt::num(c.abscissae[i]) << "," << fmt::num(c.ordinates[i]) << "," << c.solver
         << "\n";
}

inline bool write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) return false;
  os << content;
  return bool(os);
}

}  // namespace dfo
