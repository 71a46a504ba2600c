#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dfo/errors.hpp"
#include "dfo/objective.hpp"
#include "dfo/rng.hpp"

namespace dfo {

struct DsConfig {
  double epsilon_ds = 1e-8;  // sufficient-decrease threshold
  int k_ds = 0;              // max evaluations per DS invocation; 0 = 2n at call site
  int t_fail = 1;            // failed rounds tolerated before switching back
  double tau_shrink = 0.5;   // mesh shrink (standalone DS baseline only)
  double expand_factor = 2.0;
  bool use_search_step = false;

  void validate() const {
    if (!(epsilon_ds > 0.0)) throw ConfigError("direct_search: need epsilon_ds > 0");
    if (k_ds < 0) throw ConfigError("direct_search: need k_ds >= 1 (or 0 for auto)");
    if (t_fail < 1) throw ConfigError("direct_search: need t_fail >= 1");
    if (!(tau_shrink > 0.0 && tau_shrink < 1.0))
      throw ConfigError("direct_search: need tau_shrink in (0,1)");
    if (!(expand_factor >= 1.0)) throw ConfigError("direct_search: need expand_factor >= 1");
  }

  int k_ds_for(int n) const { return k_ds > 0 ? k_ds : 2 * n; }
};

// Mesh around an incumbent: M = {center + delta * D z}. Columns of D must
// positively span R^n.
struct MeshState {
  Vector center;
  double delta_mesh = 1.0;
  Matrix directions;  // n x m, columns
  double tau_shrink = 0.5;
  double expand_factor = 2.0;

  // GPS direction set [I, -I]
  static MeshState gps(Vector center, double delta, double tau = 0.5, double expand = 2.0) {
    const int n = static_cast<int>(center.size());
    MeshState m;
    m.center = std::move(center);
    m.delta_mesh = delta;
    m.tau_shrink = tau;
    m.expand_factor = expand;
    m.directions.resize(n, 2 * n);
    m.directions << Matrix::Identity(n, n), -Matrix::Identity(n, n);
    m.verify_spanning();
    return m;
  }

  static MeshState with_directions(Vector center, double delta, Matrix dirs) {
    MeshState m;
    m.center = std::move(center);
    m.delta_mesh = delta;
    m.directions = std::move(dirs);
    m.verify_spanning();
    return m;
  }

  // Positive-spanning certificate: D must have rank n and every probe
  // direction (simplex vertices covering all orthants) must see a column
  // with positive dot product.
  void verify_spanning() const {
    const int n = static_cast<int>(center.size());
    if (delta_mesh <= 0.0) throw ConfigError("mesh: delta_mesh must be positive");
    if (directions.rows() != n)
      throw DimensionMismatch("mesh: direction rows do not match dimension");
    Eigen::ColPivHouseholderQR<Matrix> qr(directions);
    if (qr.rank() < n)
      throw ConfigError("mesh: directions do not span the space");
    std::vector<Vector> probes;
    for (int i = 0; i < n; ++i) probes.push_back(Vector::Unit(n, i));
    probes.push_back(-Vector::Ones(n) / std::sqrt(double(n)));
    for (std::size_t k = 0; k < probes.size(); ++k) {
      double best = -1.0;
      for (int c = 0; c < directions.cols(); ++c)
        best = std::max(best, directions.col(c).dot(probes[k]));
      if (best <= 0.0)
        throw ConfigError("mesh: directions are not a positive spanning set");
    }
  }
};

// P = {center + delta * d : d in D}, clipped to bounds when present.
inline std::vector<Vector> poll_set(const MeshState& mesh,
                                    const std::optional<Bounds>& bounds = std::nullopt) {
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(mesh.directions.cols()));
  for (int c = 0; c < mesh.directions.cols(); ++c) {
    Vector p = mesh.center + mesh.delta_mesh * mesh.directions.col(c);
    if (bounds)
      for (int i = 0; i < p.size(); ++i)
        p[i] = std::min(bounds->hi[i], std::max(bounds->lo[i], p[i]));
    pts.push_back(std::move(p));
  }
  return pts;
}

struct DsResult {
  Vector x;
  double f = 0.0;
  double delta = 0.0;
  int evals_used = 0;
  int fail_count = 0;
  bool budget_hit = false;
};

namespace detail {

// Evaluate with in-run dedup: bitwise-identical points reuse their cached
// value and do not charge the budget.
inline std::optional<double> eval_dedup(const ObjectiveProblem& problem,
                                        EvaluationLedger& ledger, const Vector& x,
                                        int k_ds, int& evals_used, bool& budget_hit) {
  const Vector xc = problem.clip(x);
  if (auto cached = ledger.lookup(xc)) return *cached;
  if (evals_used >= k_ds) return std::nullopt;
  if (ledger.exhausted()) {
    budget_hit = true;
    return std::nullopt;
  }
  double v = evaluate(problem, ledger, xc);
  ++evals_used;
  return v;
}

}  // namespace detail

// Algorithm-3 DS phase: poll rounds with a sufficient-decrease guard. On a
// successful round the incumbent moves and the mesh expands; on a failed
// round incumbent and mesh size are retained and the failure counter grows.
// Exits when fail_count reaches t_fail or k_ds evaluations were spent.
inline DsResult ds_phase(const Vector& x_in, double f_in, double delta_in,
                         const ObjectiveProblem& problem, EvaluationLedger& ledger,
                         const DsConfig& cfg, Rng* search_rng = nullptr,
                         double delta_cap = std::numeric_limits<double>::infinity()) {
  cfg.validate();
  if (!(delta_in > 0.0)) throw ConfigError("ds_phase: need delta_in > 0");
  const int n = problem.dim;
  const int k_ds = cfg.k_ds_for(n);

  DsResult res;
  res.x = x_in;
  res.f = f_in;
  res.delta = delta_in;

  MeshState mesh = MeshState::gps(x_in, delta_in, cfg.tau_shrink, cfg.expand_factor);

  while (res.fail_count < cfg.t_fail && res.evals_used < k_ds && !res.budget_hit) {
    mesh.center = res.x;
    mesh.delta_mesh = res.delta;

    // optional search step: one random mesh point; success skips the poll
    if (cfg.use_search_step && search_rng) {
      Vector z = Vector::Zero(2 * n);
      std::uniform_int_distribution<int> pick(0, 2 * n - 1);
      std::uniform_int_distribution<int> mag(1, 3);
      z[pick(*search_rng)] = mag(*search_rng);
      z[pick(*search_rng)] += mag(*search_rng);
      Vector cand = res.x + res.delta * (mesh.directions * z);
      auto v = detail::eval_dedup(problem, ledger, cand, k_ds, res.evals_used, res.budget_hit);
      if (v && res.f - *v >= cfg.epsilon_ds) {
        res.x = problem.clip(cand);
        res.f = *v;
        res.delta = std::min(res.delta * cfg.expand_factor, delta_cap);
        continue;
      }
    }

    // poll step; ties resolved by lowest direction index
    auto polls = poll_set(mesh, problem.bounds);
    double best_val = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (std::size_t i = 0; i < polls.size(); ++i) {
      if (res.evals_used >= k_ds || res.budget_hit) break;
      auto v = detail::eval_dedup(problem, ledger, polls[i], k_ds, res.evals_used,
                                  res.budget_hit);
      if (v && *v < best_val) {
        best_val = *v;
        best_idx = static_cast<int>(i);
      }
    }

    if (best_idx >= 0 && res.f - best_val >= cfg.epsilon_ds) {
      res.x = problem.clip(polls[static_cast<std::size_t>(best_idx)]);
      res.f = best_val;
      res.delta = std::min(res.delta * cfg.expand_factor, delta_cap);
    } else {
      ++res.fail_count;  // incumbent and mesh size retained
    }
  }
  return res;
}

}  // namespace dfo
