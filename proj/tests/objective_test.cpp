#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "dfo/objective.hpp"

using dfo::EvaluationLedger;
using dfo::ObjectiveProblem;
using dfo::Vector;

namespace {

ObjectiveProblem sphere2() {
  ObjectiveProblem p;
  p.name = "sphere2";
  p.dim = 2;
  p.eval = dfo::problems::sphere;
  p.x0 = (Vector(2) << 3.0, 4.0).finished();
  p.f_opt_hint = 0.0;
  return p;
}

TEST(Evaluate, KnownValues) {
  auto p = sphere2();
  EvaluationLedger ledger;
  EXPECT_DOUBLE_EQ(dfo::evaluate(p, ledger, Vector::Zero(2)), 0.0);
  EXPECT_DOUBLE_EQ(dfo::evaluate(p, ledger, (Vector(2) << 1.0, 2.0).finished()), 5.0);

  ObjectiveProblem r;
  r.dim = 2;
  r.eval = dfo::problems::rosenbrock_chained;
  EvaluationLedger l2;
  EXPECT_DOUBLE_EQ(dfo::evaluate(r, l2, Vector::Ones(2)), 0.0);
}

TEST(Evaluate, LedgerAccounting) {
  auto p = sphere2();
  EvaluationLedger ledger(3);
  dfo::evaluate(p, ledger, Vector::Zero(2));
  dfo::evaluate(p, ledger, Vector::Ones(2));
  EXPECT_EQ(ledger.count(), 2);
  EXPECT_EQ(ledger.history().size(), 2u);
  EXPECT_EQ(ledger.history()[0].index, 1);
  EXPECT_EQ(ledger.history()[1].index, 2);
  EXPECT_FALSE(ledger.exhausted());
  dfo::evaluate(p, ledger, 2.0 * Vector::Ones(2));
  EXPECT_TRUE(ledger.exhausted());
  EXPECT_THROW(dfo::evaluate(p, ledger, Vector::Zero(2)), dfo::BudgetExhausted);
  EXPECT_EQ(ledger.count(), 3);
}

TEST(Evaluate, DimensionMismatch) {
  auto p = sphere2();
  EvaluationLedger ledger;
  EXPECT_THROW(dfo::evaluate(p, ledger, Vector::Zero(3)), dfo::DimensionMismatch);
}

TEST(Evaluate, Determinism) {
  auto p = sphere2();
  EvaluationLedger ledger;
  Vector x = (Vector(2) << 0.1234567890123, -7.5).finished();
  double a = dfo::evaluate(p, ledger, x);
  double b = dfo::evaluate(p, ledger, x);
  EXPECT_EQ(a, b);  // bit identical
  EXPECT_EQ(*ledger.lookup(x), a);
}

TEST(Evaluate, BoundsClipBeforeEvaluation) {
  auto p = sphere2();
  p.bounds = dfo::Bounds{Vector::Zero(2), Vector::Ones(2)};
  EvaluationLedger ledger;
  double v = dfo::evaluate(p, ledger, (Vector(2) << 5.0, -5.0).finished());
  EXPECT_DOUBLE_EQ(v, 1.0);  // clipped to (1, 0)
  EXPECT_EQ(ledger.history()[0].x[0], 1.0);
  EXPECT_EQ(ledger.history()[0].x[1], 0.0);
}

TEST(Suite, SizeAndHistogram) {
  auto suite = dfo::benchmark_suite();
  ASSERT_EQ(suite.size(), 13u);
  std::map<int, int> hist;
  for (const auto& p : suite) hist[p.dim]++;
  std::map<int, int> expected{{5, 1}, {8, 1}, {15, 3}, {20, 4}, {25, 2}, {30, 2}};
  EXPECT_EQ(hist, expected);
  EXPECT_EQ(hist[20], 4);
}

TEST(Suite, EveryProblemEvaluatesFinitelyAtStart) {
  for (const auto& p : dfo::benchmark_suite()) {
    ASSERT_TRUE(p.f_opt_hint.has_value()) << p.name;
    EvaluationLedger ledger;
    double f0 = dfo::evaluate(p, ledger, p.x0);
    EXPECT_TRUE(std::isfinite(f0)) << p.name;
    EXPECT_GE(f0, *p.f_opt_hint) << p.name;
  }
}

TEST(Suite, HintsAreAttainable) {
  // spot-check the analytic minimizers that are known in closed form
  auto suite = dfo::benchmark_suite();
  const auto* sphere = dfo::find_problem(suite, "sphere15");
  ASSERT_NE(sphere, nullptr);
  EXPECT_DOUBLE_EQ(sphere->eval(Vector::Zero(15)), 0.0);

  const auto* rosen = dfo::find_problem(suite, "ext_rosenbrock20");
  ASSERT_NE(rosen, nullptr);
  EXPECT_DOUBLE_EQ(rosen->eval(Vector::Ones(20)), 0.0);

  const auto* dq = dfo::find_problem(suite, "dqrtic20");
  ASSERT_NE(dq, nullptr);
  Vector xs(20);
  for (int i = 0; i < 20; ++i) xs[i] = i + 1;
  EXPECT_DOUBLE_EQ(dq->eval(xs), 0.0);

  // trid optimum x_i = i(n+1-i), f = -n(n+4)(n-1)/6
  const auto* t5 = dfo::find_problem(suite, "trid5");
  ASSERT_NE(t5, nullptr);
  Vector xt(5);
  for (int i = 0; i < 5; ++i) xt[i] = (i + 1) * (5 + 1 - (i + 1));
  EXPECT_NEAR(t5->eval(xt), -30.0, 1e-12);
  EXPECT_DOUBLE_EQ(*t5->f_opt_hint, -30.0);
}

TEST(Suite, HistoryCsvSchema) {
  auto p = sphere2();
  EvaluationLedger ledger;
  dfo::evaluate(p, ledger, Vector::Zero(2));
  dfo::evaluate(p, ledger, Vector::Ones(2));
  std::ostringstream os;
  ledger.write_history_csv(os, /*dump_points=*/true);
  std::string out = os.str();
  EXPECT_EQ(out.substr(0, out.find('\n')), "eval_index,time_s,f_value,x1,x2");
  std::ostringstream plain;
  ledger.write_history_csv(plain);
  EXPECT_EQ(plain.str().substr(0, plain.str().find('\n')), "eval_index,time_s,f_value");
}

}  // namespace
