#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dfo/direct_search.hpp"
#include "dfo/errors.hpp"
#include "dfo/interp_model.hpp"
#include "dfo/objective.hpp"
#include "dfo/rng.hpp"
#include "dfo/trust_region.hpp"

namespace dfo {

struct HybridConfig {
  TrustRegionConfig tr;
  DsConfig ds;
  int t_ds_max = 50;          // max TR -> DS switches
  std::int64_t max_evals = 100000;
  std::optional<double> max_time_s;
  std::uint64_t seed = 0;
  int max_set_size = 0;  // working-set cap after init; 0 = min(q+1, 2n+2)

  void validate() const {
    tr.validate();
    ds.validate();
    if (t_ds_max < 0) throw ConfigError("hybrid: need t_ds_max >= 0");
    if (max_evals < 1) throw ConfigError("hybrid: need max_evals >= 1");
  }

  int set_cap(int n) const {
    if (max_set_size > 0) return std::max(max_set_size, n + 2);
    return std::min(determined_size(n), 2 * n + 2);
  }
};

struct IterationRecord {
  std::int64_t k = 0;
  IterationClass cls = IterationClass::successful;
  Vector x;
  double f = 0.0;
  double delta = 0.0;
  std::optional<double> rho;
  std::int64_t evals_so_far = 0;
};

enum class StopReason { radius_min, budget, time_limit };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::radius_min: return "radius_min";
    case StopReason::budget: return "budget";
    case StopReason::time_limit: return "time";
  }
  return "?";
}

struct SolveResult {
  Vector x_best;
  double f_best = std::numeric_limits<double>::quiet_NaN();
  std::vector<IterationRecord> trace;
  StopReason stop_reason = StopReason::budget;
  std::int64_t evals = 0;
  double time_s = 0.0;
};

namespace detail {

class HybridSolver {
 public:
  HybridSolver(const ObjectiveProblem& problem, const HybridConfig& cfg)
      : problem_(problem),
        cfg_(cfg),
        ledger_(cfg.max_evals),
        basis_(PolynomialBasis::quadratic(problem.dim)),
        rng_(make_rng(cfg.seed, "ds_search")) {}

  SolveResult run() {
    cfg_.validate();
    try {
      init();
      while (true) {
        if (auto stop = check_stops()) return finish(*stop);
        iterate();
      }
    } catch (const BudgetExhausted&) {
      return finish(StopReason::budget);
    }
  }

 private:
  const ObjectiveProblem& problem_;
  HybridConfig cfg_;
  EvaluationLedger ledger_;
  PolynomialBasis basis_;
  Rng rng_;

  Vector x_;
  double fx_ = 0.0;
  double delta_ = 0.0;
  InterpolationSet Y_;
  QuadraticModel model_;
  bool poised_ = false;
  int n_ds_ = 0;
  std::int64_t k_ = 0;
  std::vector<IterationRecord> trace_;

  void emit(IterationClass cls, std::optional<double> rho) {
    IterationRecord rec;
    rec.k = ++k_;
    rec.cls = cls;
    rec.x = x_;
    rec.f = fx_;
    rec.delta = delta_;
    rec.rho = rho;
    rec.evals_so_far = ledger_.count();
    trace_.push_back(std::move(rec));
  }

  std::optional<StopReason> check_stops() const {
    if (delta_ < cfg_.tr.delta_min) return StopReason::radius_min;
    if (ledger_.exhausted()) return StopReason::budget;
    if (cfg_.max_time_s && ledger_.elapsed_s() > *cfg_.max_time_s)
      return StopReason::time_limit;
    return std::nullopt;
  }

  // Initial Y0: x0, coordinate cross at Delta0, then diagonal pairs up to
  // the determined-set size; truncated when the budget is tight.
  void init() {
    const int n = problem_.dim;
    x_ = problem_.clip(problem_.x0);
    fx_ = evaluate(problem_, ledger_, x_);
    delta_ = cfg_.tr.delta0;

    Y_ = InterpolationSet{};
    Y_.center = x_;
    Y_.radius = delta_;
    Y_.points.push_back(x_);
    Y_.values.push_back(fx_);

    std::vector<Vector> offsets;
    for (double sgn : {1.0, -1.0})
      for (int i = 0; i < n; ++i) offsets.push_back(sgn * Vector::Unit(n, i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        offsets.push_back(Vector::Unit(n, i) + Vector::Unit(n, j));

    for (const auto& off : offsets) {
      if (Y_.size() >= determined_size(n)) break;
      if (ledger_.exhausted()) break;
      Vector p = problem_.clip(x_ + delta_ * off);
      if (Y_.contains_exact(p)) continue;
      Y_.points.push_back(p);
      Y_.values.push_back(evaluate(problem_, ledger_, p));
    }
    Y_.update_radius();
    refit(Matrix::Zero(n, n));
  }

  void insert_point(const Vector& p, double v) {
    if (Y_.contains_exact(p)) return;
    Y_.points.push_back(p);
    Y_.values.push_back(v);
  }

  void recenter() {
    Y_.center = x_;
    Y_.update_radius();
  }

  // drop farthest points once over the working cap, then evict points whose
  // distance to the center dwarfs the current radius (a stale set makes the
  // scaled fit's tolerance swamp the local objective variation)
  static constexpr double kStaleFactor = 100.0;

  void maintain() {
    const int cap = cfg_.set_cap(problem_.dim);
    auto drop_farthest = [&] {
      int worst = 0;
      double dmax = -1.0;
      for (int i = 0; i < Y_.size(); ++i) {
        double d = (Y_.points[static_cast<std::size_t>(i)] - Y_.center).norm();
        if (d > dmax) {
          dmax = d;
          worst = i;
        }
      }
      Y_.points.erase(Y_.points.begin() + worst);
      Y_.values.erase(Y_.values.begin() + worst);
      return dmax;
    };
    while (Y_.size() > cap) drop_farthest();
    const double horizon = kStaleFactor * std::max(delta_, cfg_.tr.delta_min);
    while (Y_.size() > problem_.dim + 1) {
      double dmax = 0.0;
      for (int i = 0; i < Y_.size(); ++i)
        dmax = std::max(dmax, (Y_.points[static_cast<std::size_t>(i)] - Y_.center).norm());
      if (dmax <= horizon) break;
      drop_farthest();
    }
    Y_.update_radius();
  }

  void refit(const Matrix& href) {
    try {
      Y_ = repair_poisedness(Y_, basis_, std::nullopt, nullptr);
      model_ = fit_min_frobenius(Y_, href, cfg_.tr.kappa_bhm);
      poised_ = true;
      return;
    } catch (const BudgetExhausted&) {
      throw;
    } catch (const std::exception&) {
      // degenerate geometry: fall back to a fresh cross around the incumbent
    }
    Y_ = detail::sample_cross_set(problem_, ledger_, x_, fx_,
                                  std::max(delta_, cfg_.tr.delta_min));
    Y_ = repair_poisedness(Y_, basis_, std::nullopt, nullptr);
    model_ = fit_min_frobenius(Y_, href, cfg_.tr.kappa_bhm);
    poised_ = true;
  }

  void adopt_and_refit(const Vector& p, double v) {
    insert_point(p, v);
    recenter();
    maintain();
    refit(model_.H);
  }

  void iterate() {
    // criticality guard
    const double gn = model_.g.norm();
    if (gn < cfg_.tr.epsilon_low && delta_ > cfg_.tr.mu * gn) {
      TrState st{x_, delta_, model_, Y_, IterationClass::criticality_noreduce};
      try {
        TrState out = criticality_step(st, problem_, ledger_, cfg_.tr);
        const bool reduced = out.delta < delta_;
        delta_ = out.delta;
        model_ = std::move(out.model);
        Y_ = std::move(out.yset);
        poised_ = true;
        emit(reduced ? IterationClass::criticality_reduce
                     : IterationClass::criticality_noreduce,
             std::nullopt);
      } catch (const RoundBudgetExhausted&) {
        // gradient numerically zero; collapse the radius so the radius_min
        // termination fires
        delta_ = 0.0;
        emit(IterationClass::criticality_reduce, std::nullopt);
      }
      return;
    }

    // trust-region step
    const double m_x = model_.value(x_);
    const Vector s = solve_subproblem(model_, delta_);
    const Vector trial = problem_.clip(x_ + s);
    const double m_trial = model_.value(trial);
    const double pred = m_x - m_trial;

    IterationClass cls;
    std::optional<double> rho;
    double ftrial = 0.0;
    bool evaluated = false;

    if (pred <= 1e-15 * (1.0 + std::abs(fx_))) {
      cls = IterationClass::unsuccessful;  // broken model or critical point
    } else {
      ftrial = evaluate(problem_, ledger_, trial);
      evaluated = true;
      rho = (fx_ - ftrial) / pred;
      if (*rho >= cfg_.tr.eta1)
        cls = IterationClass::successful;
      else if (*rho >= cfg_.tr.eta0 && poised_)
        cls = IterationClass::acceptable;
      else if (!poised_)
        cls = IterationClass::model_improving;
      else
        cls = IterationClass::unsuccessful;
    }

    switch (cls) {
      case IterationClass::successful:
      case IterationClass::acceptable:
        x_ = trial;
        fx_ = ftrial;
        delta_ = update_radius(rho.value_or(1.0), delta_, cls, cfg_.tr);
        adopt_and_refit(trial, ftrial);
        emit(cls, rho);
        break;

      case IterationClass::model_improving:
        refit(model_.H);
        emit(cls, rho);
        break;

      case IterationClass::unsuccessful: {
        delta_ = update_radius(rho.value_or(0.0), delta_, cls, cfg_.tr);
        if (evaluated) {
          insert_point(trial, ftrial);
          maintain();
          refit(model_.H);
        }
        emit(cls, rho);

        // transition check: a switch is granted while N_ds < T_ds_max
        if (poised_ && n_ds_ < cfg_.t_ds_max && !ledger_.exhausted() &&
            delta_ >= cfg_.tr.delta_min) {
          ++n_ds_;
          DsResult res = ds_phase(x_, fx_, delta_, problem_, ledger_, cfg_.ds, &rng_,
                                  cfg_.tr.delta_max);
          if (res.f < fx_) {
            x_ = res.x;
            fx_ = res.f;
            adopt_and_refit(res.x, res.f);
          }
          emit(IterationClass::ds_phase, std::nullopt);
        }
        break;
      }
      default: break;
    }
  }

  SolveResult finish(StopReason reason) {
    SolveResult out;
    out.stop_reason = reason;
    out.trace = std::move(trace_);
    out.evals = ledger_.count();
    out.time_s = ledger_.elapsed_s();
    out.f_best = std::numeric_limits<double>::infinity();
    for (const auto& rec : ledger_.history()) {
      if (rec.value < out.f_best) {
        out.f_best = rec.value;
        out.x_best = rec.x;
      }
    }
    return out;
  }

 public:
  const EvaluationLedger& ledger() const { return ledger_; }
};

}  // namespace detail

// Algorithm-1 hybrid TR-DS solver.
inline SolveResult hybrid_solve(const ObjectiveProblem& problem, const HybridConfig& cfg,
                                std::vector<EvalRecord>* history_out = nullptr) {
  detail::HybridSolver solver(problem, cfg);
  SolveResult out = solver.run();
  if (history_out) *history_out = solver.ledger().history();
  return out;
}

// Pure TR baseline: the hybrid loop with the DS branch disabled.
inline SolveResult basic_tr_solve(const ObjectiveProblem& problem, const HybridConfig& cfg,
                                  std::vector<EvalRecord>* history_out = nullptr) {
  HybridConfig c = cfg;
  c.t_ds_max = 0;
  return hybrid_solve(problem, c, history_out);
}

// Standalone mesh search baseline: poll/search loop, shrink-on-failure,
// terminate at delta_min or budget. Unlike the TR solvers, the initial mesh
// size may legitimately start below delta_min (immediate termination).
inline SolveResult basic_ds_solve(const ObjectiveProblem& problem, const HybridConfig& cfg,
                                  std::vector<EvalRecord>* history_out = nullptr) {
  cfg.ds.validate();
  if (cfg.max_evals < 1) throw ConfigError("hybrid: need max_evals >= 1");
  if (!(cfg.tr.delta0 > 0.0) || !(cfg.tr.delta_min > 0.0))
    throw ConfigError("basic_ds: need positive delta0 and delta_min");
  EvaluationLedger ledger(cfg.max_evals);
  Rng rng = make_rng(cfg.seed, "ds_search");
  std::vector<IterationRecord> trace;
  std::int64_t k = 0;

  auto finish = [&](StopReason reason) {
    SolveResult out;
    out.stop_reason = reason;
    out.trace = std::move(trace);
    out.evals = ledger.count();
    out.time_s = ledger.elapsed_s();
    out.f_best = std::numeric_limits<double>::infinity();
    for (const auto& rec : ledger.history())
      if (rec.value < out.f_best) {
        out.f_best = rec.value;
        out.x_best = rec.x;
      }
    if (history_out) *history_out = ledger.history();
    return out;
  };

  Vector x = problem.clip(problem.x0);
  double fx;
  try {
    fx = evaluate(problem, ledger, x);
  } catch (const BudgetExhausted&) {
    return finish(StopReason::budget);
  }
  double delta = cfg.tr.delta0;
  MeshState mesh = MeshState::gps(x, delta, cfg.ds.tau_shrink, cfg.ds.expand_factor);

  auto eval_cached = [&](const Vector& p) -> std::optional<double> {
    const Vector pc = problem.clip(p);
    if (auto cached = ledger.lookup(pc)) return *cached;
    if (ledger.exhausted()) return std::nullopt;
    return evaluate(problem, ledger, pc);
  };

  while (true) {
    if (delta < cfg.tr.delta_min) return finish(StopReason::radius_min);
    if (ledger.exhausted()) return finish(StopReason::budget);
    if (cfg.max_time_s && ledger.elapsed_s() > *cfg.max_time_s)
      return finish(StopReason::time_limit);

    mesh.center = x;
    mesh.delta_mesh = delta;
    bool moved = false;

    if (cfg.ds.use_search_step) {
      Vector z = Vector::Zero(2 * problem.dim);
      std::uniform_int_distribution<int> pick(0, 2 * problem.dim - 1);
      std::uniform_int_distribution<int> mag(1, 3);
      z[pick(rng)] = mag(rng);
      auto v = eval_cached(x + delta * (mesh.directions * z));
      if (v && *v < fx) {  // search success: move, expand, skip the poll
        x = problem.clip(x + delta * (mesh.directions * z));
        fx = *v;
        delta = std::min(delta * cfg.ds.expand_factor, cfg.tr.delta_max);
        moved = true;
      }
    }

    if (!moved) {
      auto polls = poll_set(mesh, problem.bounds);
      double best = std::numeric_limits<double>::infinity();
      int best_idx = -1;
      for (std::size_t i = 0; i < polls.size(); ++i) {
        auto v = eval_cached(polls[i]);
        if (v && *v < best) {
          best = *v;
          best_idx = static_cast<int>(i);
        }
      }
      if (best_idx >= 0 && best < fx) {
        x = problem.clip(polls[static_cast<std::size_t>(best_idx)]);
        fx = best;
        delta = std::min(delta * cfg.ds.expand_factor, cfg.tr.delta_max);
      } else {
        delta *= cfg.ds.tau_shrink;  // refine the mesh
      }
    }

    IterationRecord rec;
    rec.k = ++k;
    rec.cls = IterationClass::ds_phase;
    rec.x = x;
    rec.f = fx;
    rec.delta = delta;
    rec.evals_so_far = ledger.count();
    trace.push_back(std::move(rec));
  }
}

}  // namespace dfo
