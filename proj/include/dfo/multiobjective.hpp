#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dfo/errors.hpp"
#include "dfo/hybrid.hpp"
#include "dfo/objective.hpp"

namespace dfo {

// Objective vector, normalized to [0,1] per coordinate by caller-supplied
// (min,max) ranges and clipped.
struct ObjectiveVector {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  bool operator==(const ObjectiveVector& other) const { return values == other.values; }
};

inline ObjectiveVector normalize_objectives(const std::vector<double>& raw,
                                            const std::vector<std::pair<double, double>>& ranges) {
  if (raw.size() != ranges.size())
    throw DimensionMismatch("normalize_objectives: ranges do not match objective count");
  ObjectiveVector out;
  out.values.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto [lo, hi] = ranges[i];
    double v = hi > lo ? (raw[i] - lo) / (hi - lo) : raw[i];
    out.values[i] = std::min(1.0, std::max(0.0, v));
  }
  return out;
}

struct WeightVector {
  std::vector<double> weights;

  void validate() const {
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw ConfigError("weights must be nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("weights must sum to 1");
  }
};

// F_ws(x) = sum_i w_i f_i(x)
inline double weighted_sum(const ObjectiveVector& fvec, const WeightVector& w) {
  if (fvec.size() != static_cast<int>(w.weights.size()))
    throw DimensionMismatch("weighted_sum: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < fvec.size(); ++i) s += w.weights[static_cast<std::size_t>(i)] * fvec.values[static_cast<std::size_t>(i)];
  return s;
}

// The paper's weight grids: m=2 gives the five pairs (0.25i, 1-0.25i); m=3
// gives all (i1,i2,i3)/3 with nonnegative integers summing to 3 (10 vectors).
inline std::vector<WeightVector> weight_grid(int m) {
  std::vector<WeightVector> grid;
  if (m == 2) {
    for (int i = 0; i <= 4; ++i) grid.push_back({{0.25 * i, 1.0 - 0.25 * i}});
  } else if (m == 3) {
    for (int i1 = 3; i1 >= 0; --i1)
      for (int i2 = 3 - i1; i2 >= 0; --i2)
        grid.push_back({{i1 / 3.0, i2 / 3.0, (3 - i1 - i2) / 3.0}});
  } else {
    throw UnsupportedObjectiveCount("weight_grid: m must be 2 or 3, got " + std::to_string(m));
  }
  return grid;
}

// a dominates b: a_i <= b_i for all i, strictly better somewhere
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dominates: dimension mismatch");
  bool strict = false;
  for (int i = 0; i < a.size(); ++i) {
    if (a.values[static_cast<std::size_t>(i)] > b.values[static_cast<std::size_t>(i)]) return false;
    if (a.values[static_cast<std::size_t>(i)] < b.values[static_cast<std::size_t>(i)]) strict = true;
  }
  return strict;
}

struct ParetoEntry {
  Vector x;
  ObjectiveVector f;
  int weight_index = -1;
  std::int64_t eval_index = 0;
  double time_s = 0.0;
};

struct ParetoArchive {
  std::vector<ParetoEntry> entries;
  std::vector<int> front;  // indices of non-dominated entries
};

// Non-dominated indices; exact duplicates keep the earliest eval index.
inline std::vector<int> pareto_filter(const ParetoArchive& archive) {
  const auto& e = archive.entries;
  std::vector<int> front;
  for (std::size_t i = 0; i < e.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < e.size() && keep; ++j) {
      if (i == j) continue;
      if (dominates(e[j].f, e[i].f)) keep = false;
      if (e[j].f == e[i].f && e[j].eval_index < e[i].eval_index) keep = false;
    }
    if (keep) front.push_back(static_cast<int>(i));
  }
  return front;
}

// ---------------------------------------------------------------------------
// Exact hypervolume (minimization), reference point componentwise above the
// front. m=2: rectangle sweep; m=3: slicing over the sorted third objective.
// ---------------------------------------------------------------------------

namespace detail {

inline double hv2_sweep(std::vector<std::array<double, 2>> pts, double r1, double r2) {
  std::sort(pts.begin(), pts.end());
  double hv = 0.0;
  double ymin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ymin = std::min(ymin, pts[i][1]);
    const double xnext = i + 1 < pts.size() ? std::min(pts[i + 1][0], r1) : r1;
    if (xnext > pts[i][0]) hv += (xnext - pts[i][0]) * (r2 - ymin);
  }
  return hv;
}

}  // namespace detail

inline double hypervolume(const std::vector<ObjectiveVector>& front,
                          const ObjectiveVector& ref) {
  const int m = ref.size();
  if (m != 2 && m != 3)
    throw UnsupportedObjectiveCount("hypervolume: m must be 2 or 3, got " + std::to_string(m));

  // drop points outside the reference box
  std::vector<const ObjectiveVector*> pts;
  for (const auto& p : front) {
    if (p.size() != m) throw DimensionMismatch("hypervolume: point/ref dimension mismatch");
    bool inside = true;
    for (int i = 0; i < m; ++i)
      if (p.values[static_cast<std::size_t>(i)] > ref.values[static_cast<std::size_t>(i)]) inside = false;
    if (inside) pts.push_back(&p);
  }
  if (pts.empty()) return 0.0;

  if (m == 2) {
    std::vector<std::array<double, 2>> v;
    v.reserve(pts.size());
    for (auto* p : pts) v.push_back({p->values[0], p->values[1]});
    return detail::hv2_sweep(std::move(v), ref.values[0], ref.values[1]);
  }

  // m == 3: sweep slabs of f3 between consecutive distinct levels
  std::vector<double> levels;
  for (auto* p : pts) levels.push_back(p->values[2]);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  double hv = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double z0 = levels[k];
    const double z1 = k + 1 < levels.size() ? levels[k + 1] : ref.values[2];
    if (z1 <= z0) continue;
    std::vector<std::array<double, 2>> slab;
    for (auto* p : pts)
      if (p->values[2] <= z0) slab.push_back({p->values[0], p->values[1]});
    hv += (z1 - z0) * detail::hv2_sweep(std::move(slab), ref.values[0], ref.values[1]);
  }
  return hv;
}

inline double hypervolume_of_front(const ParetoArchive& archive, const std::vector<int>& front,
                                   const ObjectiveVector& ref) {
  std::vector<ObjectiveVector> pts;
  pts.reserve(front.size());
  for (int idx : front) pts.push_back(archive.entries[static_cast<std::size_t>(idx)].f);
  return hypervolume(pts, ref);
}

// ---------------------------------------------------------------------------
// Weighted-sum driver
// ---------------------------------------------------------------------------

struct MoProblem {
  std::string name;
  std::vector<ObjectiveProblem> objectives;  // shared decision space
  std::vector<std::pair<double, double>> ranges;
};

struct HvSample {
  double time_s = 0.0;
  std::int64_t evals = 0;
  double hypervolume = 0.0;
};

enum class ScalarSolverKind { tr_ds, basic_tr, basic_ds };

struct MoResult {
  ParetoArchive archive;
  std::vector<HvSample> curve;
  std::vector<std::string> errors;  // per-weight failures, run continues
};

// Runs the scalar solver once per weight on F_ws; every evaluation's full
// objective vector enters the archive; the curve tracks the running front's
// hypervolume against the unit reference point.
inline MoResult mo_driver(const MoProblem& mo, ScalarSolverKind solver, const HybridConfig& cfg) {
  const int m = static_cast<int>(mo.objectives.size());
  if (m != 2 && m != 3)
    throw UnsupportedObjectiveCount("mo_driver: need 2 or 3 objectives, got " +
                                    std::to_string(m));
  if (mo.ranges.size() != static_cast<std::size_t>(m))
    throw ConfigError("mo_driver: need one (min,max) range per objective");
  const int dim = mo.objectives.front().dim;
  for (const auto& p : mo.objectives)
    if (p.dim != dim) throw DimensionMismatch("mo_driver: objectives must share the decision space");

  const auto grid = weight_grid(m);
  MoResult out;
  ObjectiveVector ref;
  ref.values.assign(static_cast<std::size_t>(m), 1.0);

  const std::int64_t per_weight = std::max<std::int64_t>(1, cfg.max_evals / static_cast<std::int64_t>(grid.size()));
  std::int64_t eval_counter = 0;
  const auto t0 = std::chrono::steady_clock::now();
  auto now_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  for (std::size_t wi = 0; wi < grid.size(); ++wi) {
    const WeightVector& w = grid[wi];
    ObjectiveProblem scalarized;
    scalarized.name = mo.name + "_w" + std::to_string(wi);
    scalarized.dim = dim;
    scalarized.x0 = mo.objectives.front().x0;
    scalarized.bounds = mo.objectives.front().bounds;
    scalarized.eval = [&, wi](const Vector& x) {
      std::vector<double> raw(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) raw[static_cast<std::size_t>(i)] = mo.objectives[static_cast<std::size_t>(i)].eval(x);
      ObjectiveVector fvec = normalize_objectives(raw, mo.ranges);
      double fws = weighted_sum(fvec, w);
      ParetoEntry entry;
      entry.x = x;
      entry.f = std::move(fvec);
      entry.weight_index = static_cast<int>(wi);
      entry.eval_index = ++eval_counter;
      entry.time_s = now_s();
      out.archive.entries.push_back(std::move(entry));
      return fws;
    };

    HybridConfig run_cfg = cfg;
    run_cfg.max_evals = per_weight;
    run_cfg.seed = fork_seed(cfg.seed, "mo_weight_" + std::to_string(wi));
    try {
      switch (solver) {
        case ScalarSolverKind::tr_ds: hybrid_solve(scalarized, run_cfg); break;
        case ScalarSolverKind::basic_tr: basic_tr_solve(scalarized, run_cfg); break;
        case ScalarSolverKind::basic_ds: basic_ds_solve(scalarized, run_cfg); break;
      }
    } catch (const std::exception& e) {
      out.errors.push_back(scalarized.name + ": " + e.what());
    }
  }

  // hypervolume of the running front at each evaluation timestamp,
  // maintained incrementally
  std::vector<ObjectiveVector> running;
  for (const auto& entry : out.archive.entries) {
    bool covered = false;
    for (const auto& p : running)
      if (dominates(p, entry.f) || p == entry.f) {
        covered = true;
        break;
      }
    if (!covered) {
      std::erase_if(running, [&](const ObjectiveVector& p) { return dominates(entry.f, p); });
      running.push_back(entry.f);
    }
    HvSample s;
    s.time_s = entry.time_s;
    s.evals = entry.eval_index;
    s.hypervolume = hypervolume(running, ref);
    out.curve.push_back(s);
  }
  out.archive.front = pareto_filter(out.archive);
  return out;
}

// Built-in multiobjective demo problems.
inline std::vector<MoProblem> mo_registry() {
  std::vector<MoProblem> reg;
  {
    MoProblem toy;
    toy.name = "toy_biobj";
    Bounds box{Vector::Zero(1), Vector::Ones(1)};
    ObjectiveProblem f1, f2;
    f1.name = "toy_f1";
    f1.dim = 1;
    f1.eval = [](const Vector& x) { return x[0] * x[0]; };
    f1.x0 = Vector::Constant(1, 0.5);
    f1.bounds = box;
    f2 = f1;
    f2.name = "toy_f2";
    f2.eval = [](const Vector& x) { return (1.0 - x[0]) * (1.0 - x[0]); };
    toy.objectives = {f1, f2};
    toy.ranges = {{0.0, 1.0}, {0.0, 1.0}};
    reg.push_back(std::move(toy));
  }
  {
    MoProblem tri;
    tri.name = "toy_triobj";
    Bounds box{Vector::Zero(2), Vector::Ones(2)};
    auto make = [&](const char* name, double ax, double ay) {
      ObjectiveProblem p;
      p.name = name;
      p.dim = 2;
      p.x0 = Vector::Constant(2, 0.5);
      p.bounds = box;
      p.eval = [ax, ay](const Vector& x) {
        const double dx = x[0] - ax, dy = x[1] - ay;
        return 0.5 * (dx * dx + dy * dy);
      };
      return p;
    };
    tri.objectives = {make("tri_f1", 0.0, 0.0), make("tri_f2", 1.0, 0.0),
                      make("tri_f3", 0.5, 1.0)};
    tri.ranges = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    reg.push_back(std::move(tri));
  }
  return reg;
}

inline const MoProblem* find_mo_problem(const std::vector<MoProblem>& reg,
                                        const std::string& name) {
  for (const auto& p : reg)
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace dfo
