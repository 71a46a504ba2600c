#include <gtest/gtest.h>

#include <random>

#include "dfo/trust_region.hpp"
#include "oracles.hpp"

using dfo::Matrix;
using dfo::QuadraticModel;
using dfo::TrustRegionConfig;
using dfo::Vector;

namespace {

QuadraticModel make_model(Vector g, Matrix H, Vector center) {
  QuadraticModel m;
  m.center = std::move(center);
  m.c = 0.0;
  m.g = std::move(g);
  m.H = std::move(H);
  return m;
}

TEST(Subproblem, SteepestDescentToBoundary) {
  auto m = make_model((Vector(2) << 1, 0).finished(), Matrix::Zero(2, 2), Vector::Zero(2));
  Vector s = dfo::solve_subproblem(m, 1.0);
  EXPECT_NEAR(s[0], -1.0, 1e-12);
  EXPECT_NEAR(s[1], 0.0, 1e-12);
  const double decrease = m.c - m.value_at_step(s);
  EXPECT_GE(decrease, 0.5 * 1.0 * 1.0 - 1e-12);  // 1/2 ||g|| min{Delta, inf}
}

TEST(Subproblem, ZeroGradientReturnsZeroStep) {
  auto m = make_model(Vector::Zero(3), Matrix::Identity(3, 3), Vector::Zero(3));
  EXPECT_EQ(dfo::solve_subproblem(m, 1.0).norm(), 0.0);
}

TEST(Subproblem, NewtonInteriorStep) {
  auto m = make_model((Vector(2) << 2, 0).finished(), 4.0 * Matrix::Identity(2, 2),
                      Vector::Zero(2));
  Vector s = dfo::solve_subproblem(m, 10.0);
  EXPECT_NEAR(s[0], -0.5, 1e-9);
  EXPECT_NEAR(s[1], 0.0, 1e-9);
  const double decrease = -m.value_at_step(s);
  EXPECT_NEAR(decrease, 0.5, 1e-9);  // equals the Cauchy bound here
  EXPECT_GE(decrease + 1e-12, dfo::cauchy_lower_bound(m.g, m.H, 10.0));
}

TEST(Subproblem, CauchyDecreaseProperty) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + int(rng() % 6);
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = 3.0 * gauss(rng);
    Matrix H = Matrix::Zero(n, n);
    if (t % 4 != 0) {  // keep some H = 0 cases
      Matrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
      H = 0.5 * (A + A.transpose()) * (t % 3 == 0 ? 100.0 : 1.0);
    }
    const double delta = 1e-3 + 2.0 * uni(rng);
    auto m = make_model(g, H, Vector::Zero(n));
    Vector s = dfo::solve_subproblem(m, delta);
    EXPECT_LE(s.norm(), delta * (1.0 + 1e-12));
    const double decrease = m.c - m.value_at_step(s);
    EXPECT_GE(decrease, dfo::cauchy_lower_bound(g, H, delta) * (1.0 - 1e-9) - 1e-12);
  }
}

TEST(AcceptanceRatio, Examples) {
  EXPECT_DOUBLE_EQ(dfo::acceptance_ratio(10, 9, 10, 9), 1.0);  // exact model
  EXPECT_DOUBLE_EQ(dfo::acceptance_ratio(10, 10, 10, 9), 0.0);
  EXPECT_DOUBLE_EQ(dfo::acceptance_ratio(10, 8, 10, 9), 2.0);
  EXPECT_THROW(dfo::acceptance_ratio(10, 8, 10, 10), dfo::ZeroPredictedDecrease);
}

TEST(UpdateRadius, Branches) {
  TrustRegionConfig cfg;
  cfg.eta0 = 0.1;
  cfg.eta1 = 0.75;
  cfg.gamma_inc = 2.0;
  cfg.gamma_dec = 0.5;
  cfg.delta_max = 1.5;
  EXPECT_DOUBLE_EQ(dfo::update_radius(0.9, 1.0, dfo::IterationClass::successful, cfg), 1.5);
  EXPECT_DOUBLE_EQ(dfo::update_radius(0.3, 1.0, dfo::IterationClass::acceptable, cfg), 0.5);
  EXPECT_DOUBLE_EQ(dfo::update_radius(0.05, 1.0, dfo::IterationClass::unsuccessful, cfg), 0.5);
  EXPECT_DOUBLE_EQ(dfo::update_radius(0.3, 1.0, dfo::IterationClass::model_improving, cfg),
                   1.0);
}

TEST(Criticality, ExitRadiusFormula) {
  // omega=0.5, Delta0=1, exit at i=3: Delta_i = 0.25; ||g|| = 0.6, beta = 0.1
  EXPECT_DOUBLE_EQ(dfo::criticality_exit_radius(0.25, 0.6, 0.1), 0.25);
  EXPECT_DOUBLE_EQ(dfo::criticality_exit_radius(0.01, 0.6, 0.1), 0.06);
}

TEST(Criticality, GuardFalseLeavesStateUntouched) {
  dfo::ObjectiveProblem p;
  p.name = "sphere";
  p.dim = 2;
  p.eval = dfo::problems::sphere;
  p.x0 = Vector::Zero(2);
  dfo::EvaluationLedger ledger;
  TrustRegionConfig cfg;

  dfo::TrState state;
  state.x = Vector::Ones(2);
  state.delta = 1.0;
  state.model = make_model(10.0 * Vector::Ones(2), Matrix::Identity(2, 2), state.x);
  auto out = dfo::criticality_step(state, p, ledger, cfg);
  EXPECT_EQ(ledger.count(), 0);  // untouched
  EXPECT_DOUBLE_EQ(out.delta, 1.0);
  EXPECT_EQ(out.model.g, state.model.g);
}

TEST(Criticality, RefitsStaleModelAndBoundsRadiusByGradient) {
  // f = ||x||^2 / 2; at x = (5,5) the true gradient is x, but the stale
  // model pretends it is tiny
  dfo::ObjectiveProblem p;
  p.name = "halfsq";
  p.dim = 2;
  p.eval = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.x0 = Vector::Zero(2);
  dfo::EvaluationLedger ledger;
  TrustRegionConfig cfg;

  dfo::TrState state;
  state.x = (Vector(2) << 5, 5).finished();
  state.delta = 1.0;
  state.model = make_model(1e-4 * Vector::Ones(2), Matrix::Zero(2, 2), state.x);

  auto out = dfo::criticality_step(state, p, ledger, cfg);
  EXPECT_EQ(out.x, state.x);  // x unchanged
  EXPECT_GT(ledger.count(), 0);
  EXPECT_LT((out.model.g - state.x).norm(), 1e-6);  // grad of f is x
  EXPECT_LE(out.delta, cfg.mu * out.model.g.norm() + 1e-12);
}

TEST(Criticality, RoundBudgetSignalsNumericallyZeroGradient) {
  // truly flat function: every refit sees g = 0, the loop cannot exit
  dfo::ObjectiveProblem p;
  p.name = "flat";
  p.dim = 1;
  p.eval = [](const Vector&) { return 7.0; };
  p.x0 = Vector::Zero(1);
  dfo::EvaluationLedger ledger;
  TrustRegionConfig cfg;
  cfg.criticality_round_budget = 8;

  dfo::TrState state;
  state.x = Vector::Zero(1);
  state.delta = 1.0;
  state.model = make_model(1e-6 * Vector::Ones(1), Matrix::Zero(1, 1), state.x);
  EXPECT_THROW(dfo::criticality_step(state, p, ledger, cfg), dfo::RoundBudgetExhausted);
}

TEST(Config, OrderingConstraintsEnforced) {
  TrustRegionConfig cfg;
  cfg.eta0 = 0.8;
  cfg.eta1 = 0.5;
  EXPECT_THROW(cfg.validate(), dfo::ConfigError);
  cfg = TrustRegionConfig{};
  cfg.beta = 2.0;  // beta must stay below mu
  EXPECT_THROW(cfg.validate(), dfo::ConfigError);
  cfg = TrustRegionConfig{};
  EXPECT_NO_THROW(cfg.validate());
}

}  // namespace
