#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "dfo/errors.hpp"
#include "dfo/interp_model.hpp"
#include "dfo/objective.hpp"

namespace dfo {

struct TrustRegionConfig {
  double delta0 = 1.0;
  double delta_min = 1e-8;
  double delta_max = 1e3;
  double eta0 = 0.1;
  double eta1 = 0.75;
  double gamma_inc = 2.0;
  double gamma_dec = 0.5;
  double epsilon_low = 1e-3;
  double mu = 1.0;
  double beta = 0.01;
  double omega = 0.5;
  double kappa_bhm = 1e6;
  int criticality_round_budget = 50;

  void validate() const {
    if (!(eta1 >= eta0 && eta0 > 0.0 && eta1 < 1.0))
      throw ConfigError("trust_region: need 1 > eta1 >= eta0 > 0");
    if (!(gamma_inc > 1.0)) throw ConfigError("trust_region: need gamma_inc > 1");
    if (!(gamma_dec > 0.0 && gamma_dec < 1.0))
      throw ConfigError("trust_region: need gamma_dec in (0,1)");
    if (!(mu > beta && beta > 0.0)) throw ConfigError("trust_region: need mu > beta > 0");
    if (!(omega > 0.0 && omega < 1.0)) throw ConfigError("trust_region: need omega in (0,1)");
    if (!(delta_min <= delta0 && delta0 <= delta_max))
      throw ConfigError("trust_region: need delta_min <= delta0 <= delta_max");
    if (!(epsilon_low > 0.0)) throw ConfigError("trust_region: need epsilon_low > 0");
    if (criticality_round_budget < 1)
      throw ConfigError("trust_region: criticality_round_budget >= 1");
  }
};

enum class IterationClass {
  successful,
  acceptable,
  model_improving,
  unsuccessful,
  criticality_reduce,
  criticality_noreduce,
  ds_phase,
};

inline const char* to_string(IterationClass cls) {
  switch (cls) {
    case IterationClass::successful: return "successful";
    case IterationClass::acceptable: return "acceptable";
    case IterationClass::model_improving: return "model_improving";
    case IterationClass::unsuccessful: return "unsuccessful";
    case IterationClass::criticality_reduce: return "criticality_reduce";
    case IterationClass::criticality_noreduce: return "criticality_noreduce";
    case IterationClass::ds_phase: return "ds_phase";
  }
  return "?";
}

struct TrState {
  Vector x;
  double delta = 0.0;
  QuadraticModel model;
  InterpolationSet yset;
  IterationClass last_class = IterationClass::successful;
};

inline double spectral_norm(const Matrix& H) {
  if (H.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Guaranteed model reduction of the exact Cauchy point:
//   m(x) - m(x+s) >= ||g||/2 * min{Delta, ||g||/||H||}, with ||g||/||H|| = inf
// when H = 0.
inline double cauchy_lower_bound(const Vector& g, const Matrix& H, double delta) {
  const double gn = g.norm();
  if (gn == 0.0) return 0.0;
  const double hn = spectral_norm(H);
  const double ratio = hn > 0.0 ? gn / hn : std::numeric_limits<double>::infinity();
  return 0.5 * gn * std::min(delta, ratio);
}

// ---------------------------------------------------------------------------
// Trust-region subproblem
// ---------------------------------------------------------------------------

namespace detail {

// minimize b'w + w'Bw/2 over ||w|| <= delta in 2-D: interior stationary point
// when B is positive definite, otherwise dense boundary sampling plus a few
// bisection refinements.
inline Eigen::Vector2d minimize_disc_2d(const Eigen::Vector2d& b, const Eigen::Matrix2d& B,
                                        double delta) {
  Eigen::Vector2d best = Eigen::Vector2d::Zero();
  double fbest = 0.0;
  auto q = [&](const Eigen::Vector2d& w) { return b.dot(w) + 0.5 * w.dot(B * w); };

  const double det = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
  if (det > 0 && B(0, 0) > 0) {  // PD: try interior Newton point
    Eigen::Vector2d w = -B.inverse() * b;
    if (w.norm() <= delta && q(w) < fbest) {
      fbest = q(w);
      best = w;
    }
  }
  auto boundary = [&](double th) {
    return Eigen::Vector2d(delta * std::cos(th), delta * std::sin(th));
  };
  const int N = 256;
  double thbest = 0.0;
  double fb = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    double th = 2.0 * M_PI * i / N;
    double v = q(boundary(th));
    if (v < fb) {
      fb = v;
      thbest = th;
    }
  }
  double lo = thbest - 2.0 * M_PI / N, hi = thbest + 2.0 * M_PI / N;
  for (int it = 0; it < 60; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (q(boundary(m1)) < q(boundary(m2)))
      hi = m2;
    else
      lo = m1;
  }
  double th = 0.5 * (lo + hi);
  if (q(boundary(th)) < fbest) best = boundary(th);
  return best;
}

}  // namespace detail

// Exact Cauchy point along -g, refined over span{-g, -H^-1 g} when the
// Newton direction exists. The returned step never predicts less decrease
// than the Cauchy point, so the Cauchy bound always holds.
inline Vector solve_subproblem(const QuadraticModel& model, double delta) {
  const Vector& g = model.g;
  const int n = static_cast<int>(g.size());
  const double gn = g.norm();
  if (gn == 0.0 || delta <= 0.0) return Vector::Zero(n);

  const double gHg = g.dot(model.H * g);
  const double tmax = delta / gn;
  const double t = gHg > 0.0 ? std::min(gn * gn / gHg, tmax) : tmax;
  Vector s = -t * g;
  double fbest = model.value_at_step(s) - model.c;

  // 2-D subspace refinement
  Eigen::LDLT<Matrix> ldlt(model.H);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Vector dn = ldlt.solve(-g);
    if (dn.allFinite()) {
      Vector u = -g / gn;
      Vector v = dn - dn.dot(u) * u;
      const double vn = v.norm();
      if (vn > 1e-14 * dn.norm()) {
        v /= vn;
        Eigen::Vector2d b(u.dot(g), v.dot(g));
        Eigen::Matrix2d B;
        B(0, 0) = u.dot(model.H * u);
        B(0, 1) = B(1, 0) = u.dot(model.H * v);
        B(1, 1) = v.dot(model.H * v);
        Eigen::Vector2d w = detail::minimize_disc_2d(b, B, delta);
        Vector cand = w[0] * u + w[1] * v;
        double fc = model.value_at_step(cand) - model.c;
        if (fc < fbest) {
          s = cand;
          fbest = fc;
        }
      } else if (dn.norm() <= delta) {
        // Newton direction parallel to -g and interior
        double fc = model.value_at_step(dn) - model.c;
        if (fc < fbest) s = dn;
      }
    }
  }

  if (s.norm() > delta) s *= delta / s.norm();
  return s;
}

// rho = actual decrease / predicted decrease
inline double acceptance_ratio(double f_x, double f_trial, double m_x, double m_trial) {
  const double pred = m_x - m_trial;
  if (pred <= 1e-15 * (1.0 + std::abs(f_x)))
    throw ZeroPredictedDecrease("acceptance_ratio: predicted decrease " +
                                std::to_string(pred) + " is numerically zero");
  return (f_x - f_trial) / pred;
}

inline double update_radius(double rho, double delta, IterationClass cls,
                            const TrustRegionConfig& cfg) {
  (void)rho;  // the class already encodes the branch taken
  double next = delta;
  switch (cls) {
    case IterationClass::successful:
      next = std::min(cfg.gamma_inc * delta, cfg.delta_max);
      break;
    case IterationClass::acceptable:
    case IterationClass::unsuccessful:
      next = cfg.gamma_dec * delta;
      break;
    default: break;  // model improvement and criticality leave delta alone
  }
  return std::min(std::max(next, 0.0), cfg.delta_max);
}

// ---------------------------------------------------------------------------
// Criticality step
// ---------------------------------------------------------------------------

inline double criticality_exit_radius(double delta_i, double gnorm, double beta) {
  return std::max(delta_i, beta * gnorm);
}

namespace detail {

// center + coordinate cross at the given radius; center value reused
inline InterpolationSet sample_cross_set(const ObjectiveProblem& problem,
                                         EvaluationLedger& ledger, const Vector& x, double fx,
                                         double radius) {
  InterpolationSet Y;
  Y.center = x;
  Y.radius = radius;
  Y.points.push_back(x);
  Y.values.push_back(fx);
  const int n = problem.dim;
  for (int i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      Vector e = x;
      e[i] += sgn * radius;
      e = problem.clip(e);
      if (Y.contains_exact(e)) continue;
      Y.points.push_back(e);
      Y.values.push_back(evaluate(problem, ledger, e));
    }
  }
  Y.update_radius();
  return Y;
}

}  // namespace detail

// Algorithm-2-style criticality loop: shrink the sampling radius by omega,
// refit on a fresh cross until Delta_i <= mu * ||g_i||, then exit with
// Delta = max{Delta_i, beta * ||g_i||}. x never moves.
inline TrState criticality_step(TrState state, const ObjectiveProblem& problem,
                                EvaluationLedger& ledger, const TrustRegionConfig& cfg) {
  const double gn = state.model.g.norm();
  if (gn >= cfg.epsilon_low || state.delta <= cfg.mu * gn) return state;  // guard false

  double fx;
  if (auto cached = ledger.lookup(problem.clip(state.x)))
    fx = *cached;
  else
    fx = evaluate(problem, ledger, state.x);
  const double delta_entry = state.delta;
  Matrix href = state.model.H;
  for (int i = 1; i <= cfg.criticality_round_budget; ++i) {
    const double delta_i = std::pow(cfg.omega, i - 1) * delta_entry;
    InterpolationSet Y = detail::sample_cross_set(problem, ledger, state.x, fx, delta_i);
    Y = repair_poisedness(Y, PolynomialBasis::quadratic(problem.dim), std::nullopt, nullptr);
    QuadraticModel m = fit_min_frobenius(Y, href, cfg.kappa_bhm);
    href = m.H;
    const double gni = m.g.norm();
    if (delta_i <= cfg.mu * gni) {
      // the radius may only grow on successful iterations, so the exit
      // value is capped at the entry radius
      state.delta = std::min(criticality_exit_radius(delta_i, gni, cfg.beta), delta_entry);
      state.model = std::move(m);
      state.yset = std::move(Y);
      return state;
    }
  }
  throw RoundBudgetExhausted("criticality_step: gradient numerically zero after " +
                             std::to_string(cfg.criticality_round_budget) + " rounds");
}

}  // namespace dfo
