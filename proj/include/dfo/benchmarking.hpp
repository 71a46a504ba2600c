#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dfo/errors.hpp"

namespace dfo {

// f(x) <= f_L + tau (f(x0) - f_L)
inline bool convergence_test(double f, double f0, double fL, double tau) {
  return f <= fL + tau * (f0 - fL);
}

struct ResultCell {
  std::string problem;
  std::string solver;
  double t = 0.0;  // cost to convergence (seconds or evaluations)
  bool converged = false;
  double f_best = std::numeric_limits<double>::quiet_NaN();
  int n_p = 0;  // problem dimension
};

struct ProfileCurve {
  std::string solver;
  std::vector<double> abscissae;  // sorted breakpoints
  std::vector<double> ordinates;  // non-decreasing fractions in [0,1]
};

// step-constant, right-continuous evaluation
inline double profile_value(const ProfileCurve& curve, double alpha) {
  double v = 0.0;
  for (std::size_t i = 0; i < curve.abscissae.size(); ++i) {
    if (curve.abscissae[i] <= alpha)
      v = curve.ordinates[i];
    else
      break;
  }
  return v;
}

namespace detail {

struct Grouped {
  std::vector<std::string> problems;
  std::vector<std::string> solvers;
  // cost[p][s]: +inf when unconverged
  std::vector<std::vector<double>> cost;
  std::vector<int> dims;
};

inline Grouped group_cells(const std::vector<ResultCell>& cells) {
  Grouped g;
  for (const auto& c : cells) {
    if (std::find(g.problems.begin(), g.problems.end(), c.problem) == g.problems.end())
      g.problems.push_back(c.problem);
    if (std::find(g.solvers.begin(), g.solvers.end(), c.solver) == g.solvers.end())
      g.solvers.push_back(c.solver);
  }
  const double inf = std::numeric_limits<double>::infinity();
  g.cost.assign(g.problems.size(), std::vector<double>(g.solvers.size(), inf));
  g.dims.assign(g.problems.size(), 0);
  for (const auto& c : cells) {
    const auto pi = static_cast<std::size_t>(
        std::find(g.problems.begin(), g.problems.end(), c.problem) - g.problems.begin());
    const auto si = static_cast<std::size_t>(
        std::find(g.solvers.begin(), g.solvers.end(), c.solver) - g.solvers.begin());
    g.cost[pi][si] = c.converged ? c.t : inf;
    g.dims[pi] = c.n_p;
  }
  return g;
}

inline std::vector<ProfileCurve> step_curves(const Grouped& g,
                                             const std::vector<std::vector<double>>& metric,
                                             bool include_one) {
  std::set<double> breaks;
  if (include_one) breaks.insert(1.0);
  for (const auto& row : metric)
    for (double v : row)
      if (std::isfinite(v)) breaks.insert(v);
  if (breaks.empty()) breaks.insert(1.0);

  std::vector<ProfileCurve> curves;
  for (std::size_t s = 0; s < g.solvers.size(); ++s) {
    ProfileCurve c;
    c.solver = g.solvers[s];
    for (double alpha : breaks) {
      int count = 0;
      for (std::size_t p = 0; p < g.problems.size(); ++p)
        if (metric[p][s] <= alpha) ++count;
      c.abscissae.push_back(alpha);
      c.ordinates.push_back(double(count) / double(g.problems.size()));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace detail

// Performance profiles: r_{p,s} = t_{p,s} / min_s' t_{p,s'}; rho_s(alpha) is
// the fraction of problems solved within factor alpha of the best solver.
inline std::vector<ProfileCurve> performance_profile(const std::vector<ResultCell>& cells) {
  if (cells.empty()) throw EmptyResults("performance_profile: no result cells");
  auto g = detail::group_cells(cells);
  const double inf = std::numeric_limits<double>::infinity();

  bool any_converged = false;
  std::vector<std::vector<double>> ratio(g.problems.size(),
                                         std::vector<double>(g.solvers.size(), inf));
  for (std::size_t p = 0; p < g.problems.size(); ++p) {
    double tmin = inf;
    for (double v : g.cost[p]) tmin = std::min(tmin, v);
    if (!std::isfinite(tmin)) continue;  // no solver converged on p
    any_converged = true;
    for (std::size_t s = 0; s < g.solvers.size(); ++s)
      if (std::isfinite(g.cost[p][s])) ratio[p][s] = g.cost[p][s] / tmin;
  }
  if (!any_converged)
    throw EmptyResults("performance_profile: no problem was solved by any solver");
  return detail::step_curves(g, ratio, /*include_one=*/true);
}

// Data profiles: dp_s(alpha) is the fraction of problems solved within
// unit cost t_{p,s}/(n_p + 1) <= alpha.
inline std::vector<ProfileCurve> data_profile(const std::vector<ResultCell>& cells) {
  if (cells.empty()) throw EmptyResults("data_profile: no result cells");
  auto g = detail::group_cells(cells);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> ucost(g.problems.size(),
                                         std::vector<double>(g.solvers.size(), inf));
  for (std::size_t p = 0; p < g.problems.size(); ++p)
    for (std::size_t s = 0; s < g.solvers.size(); ++s)
      if (std::isfinite(g.cost[p][s])) ucost[p][s] = g.cost[p][s] / (g.dims[p] + 1.0);
  return detail::step_curves(g, ucost, /*include_one=*/false);
}

}  // namespace dfo
