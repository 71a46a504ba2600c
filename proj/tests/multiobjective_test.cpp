#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dfo/multiobjective.hpp"
#include "oracles.hpp"

using dfo::ObjectiveVector;
using dfo::Vector;
using dfo::WeightVector;

namespace {

ObjectiveVector vec2(double a, double b) { return {{a, b}}; }

TEST(WeightedSum, Examples) {
  EXPECT_DOUBLE_EQ(dfo::weighted_sum(vec2(2, 4), {{0.5, 0.5}}), 3.0);
  EXPECT_DOUBLE_EQ(dfo::weighted_sum(vec2(7, 3), {{1.0, 0.0}}), 7.0);
  EXPECT_DOUBLE_EQ(dfo::weighted_sum(vec2(0, 0), {{0.3, 0.7}}), 0.0);
  EXPECT_THROW(dfo::weighted_sum(vec2(1, 2), {{1.0, 0.0, 0.0}}), dfo::DimensionMismatch);
}

TEST(WeightGrid, BiObjectivePairs) {
  auto grid = dfo::weight_grid(2);
  ASSERT_EQ(grid.size(), 5u);
  const double expected[5][2] = {{0, 1}, {0.25, 0.75}, {0.5, 0.5}, {0.75, 0.25}, {1, 0}};
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(grid[(std::size_t)i].weights[0], expected[i][0]);
    EXPECT_DOUBLE_EQ(grid[(std::size_t)i].weights[1], expected[i][1]);
    grid[(std::size_t)i].validate();
  }
}

TEST(WeightGrid, TriObjectiveSimplex) {
  auto grid = dfo::weight_grid(3);
  ASSERT_EQ(grid.size(), 10u);  // C(5,2)
  bool has_unit = false, has_equal = false;
  for (const auto& w : grid) {
    w.validate();
    if (w.weights[0] == 1.0 && w.weights[1] == 0.0 && w.weights[2] == 0.0) has_unit = true;
    if (std::abs(w.weights[0] - 1.0 / 3) < 1e-15 && std::abs(w.weights[1] - 1.0 / 3) < 1e-15)
      has_equal = true;
  }
  EXPECT_TRUE(has_unit);
  EXPECT_TRUE(has_equal);
}

TEST(WeightGrid, UnsupportedCountsRejected) {
  EXPECT_THROW(dfo::weight_grid(4), dfo::UnsupportedObjectiveCount);
  EXPECT_THROW(dfo::weight_grid(1), dfo::UnsupportedObjectiveCount);
}

TEST(Dominates, Examples) {
  EXPECT_TRUE(dfo::dominates(vec2(0, 1), vec2(1, 1)));
  EXPECT_FALSE(dfo::dominates(vec2(0, 1), vec2(1, 0)));  // incomparable
  EXPECT_FALSE(dfo::dominates(vec2(1, 0), vec2(0, 1)));
  EXPECT_FALSE(dfo::dominates(vec2(0.5, 0.5), vec2(0.5, 0.5)));  // no strict gain
}

TEST(Dominates, StrictPartialOrderProperties) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto rand_vec = [&](int m) {
    ObjectiveVector v;
    for (int i = 0; i < m; ++i) v.values.push_back(std::round(uni(rng) * 4) / 4);
    return v;
  };
  for (int t = 0; t < 2000; ++t) {
    const int m = 2 + (t % 2);
    auto a = rand_vec(m), b = rand_vec(m), c = rand_vec(m);
    EXPECT_FALSE(dfo::dominates(a, a));  // irreflexive
    if (dfo::dominates(a, b)) EXPECT_FALSE(dfo::dominates(b, a));  // antisymmetric
    if (dfo::dominates(a, b) && dfo::dominates(b, c))
      EXPECT_TRUE(dfo::dominates(a, c));  // transitive
  }
}

TEST(ParetoFilter, SmallExamples) {
  dfo::ParetoArchive archive;
  auto add = [&](double a, double b, std::int64_t idx) {
    archive.entries.push_back({Vector::Zero(1), vec2(a, b), 0, idx, 0.0});
  };
  add(0, 1, 1);
  add(1, 0, 2);
  add(1, 1, 3);
  auto front = dfo::pareto_filter(archive);
  EXPECT_EQ(front, (std::vector<int>{0, 1}));

  dfo::ParetoArchive single;
  single.entries.push_back({Vector::Zero(1), vec2(0.4, 0.2), 0, 1, 0.0});
  EXPECT_EQ(dfo::pareto_filter(single), std::vector<int>{0});
}

TEST(ParetoFilter, TiesKeepEarliestEvalIndex) {
  dfo::ParetoArchive archive;
  archive.entries.push_back({Vector::Zero(1), vec2(0.5, 0.5), 0, 7, 0.0});
  archive.entries.push_back({Vector::Zero(1), vec2(0.5, 0.5), 1, 3, 0.0});
  auto front = dfo::pareto_filter(archive);
  ASSERT_EQ(front.size(), 1u);
  EXPECT_EQ(archive.entries[(std::size_t)front[0]].eval_index, 3);
}

TEST(ParetoFilter, MatchesBruteForceOnRandomClouds) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  dfo::ParetoArchive archive;
  std::vector<ObjectiveVector> pts;
  for (int i = 0; i < 200; ++i) {
    auto v = vec2(uni(rng), uni(rng));
    pts.push_back(v);
    archive.entries.push_back({Vector::Zero(1), v, 0, i + 1, 0.0});
  }
  EXPECT_EQ(dfo::pareto_filter(archive), oracles::brute_force_front(pts));
}

TEST(Hypervolume, HandValues) {
  ObjectiveVector ref = vec2(1, 1);
  EXPECT_DOUBLE_EQ(dfo::hypervolume({vec2(0.5, 0.5)}, ref), 0.25);
  EXPECT_DOUBLE_EQ(dfo::hypervolume({vec2(0, 1), vec2(1, 0)}, ref), 0.0);
  // rectangle-sweep oracle: 0.8*0.4 + 0.5*0.7 - 0.5*0.4 = 0.47
  EXPECT_NEAR(dfo::hypervolume({vec2(0.2, 0.6), vec2(0.5, 0.3)}, ref), 0.47, 1e-12);
}

TEST(Hypervolume, ClipsPointsOutsideTheReferenceBox) {
  ObjectiveVector ref = vec2(1, 1);
  EXPECT_DOUBLE_EQ(dfo::hypervolume({vec2(0.5, 0.5), vec2(2.0, 0.1)}, ref), 0.25);
  EXPECT_DOUBLE_EQ(dfo::hypervolume({}, ref), 0.0);
}

TEST(Hypervolume, UnsupportedObjectiveCount) {
  ObjectiveVector ref{{1, 1, 1, 1}};
  EXPECT_THROW(dfo::hypervolume({{{0.5, 0.5, 0.5, 0.5}}}, ref), dfo::UnsupportedObjectiveCount);
}

TEST(Hypervolume, MonotoneUnderInsertion) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int m : {2, 3}) {
    ObjectiveVector ref;
    ref.values.assign((std::size_t)m, 1.0);
    std::vector<ObjectiveVector> front;
    double prev = 0.0;
    for (int k = 0; k < 40; ++k) {
      ObjectiveVector v;
      for (int i = 0; i < m; ++i) v.values.push_back(uni(rng));
      front.push_back(v);
      double hv = dfo::hypervolume(front, ref);
      EXPECT_GE(hv, prev - 1e-12);
      EXPECT_LE(hv, 1.0 + 1e-12);
      prev = hv;
    }
  }
}

TEST(Hypervolume, AgreesWithMonteCarlo) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int m : {2, 3}) {
    for (int t = 0; t < 3; ++t) {
      std::vector<ObjectiveVector> front;
      const int np = 3 + int(rng() % 18);
      for (int k = 0; k < np; ++k) {
        ObjectiveVector v;
        for (int i = 0; i < m; ++i) v.values.push_back(uni(rng));
        front.push_back(v);
      }
      ObjectiveVector ref;
      ref.values.assign((std::size_t)m, 1.0);
      const double exact = dfo::hypervolume(front, ref);
      const double mc = oracles::mc_hypervolume(front, ref, 1000000, 99 + (std::uint64_t)t);
      EXPECT_NEAR(exact, mc, 3e-3) << "m=" << m;
    }
  }
}

TEST(MoDriver, ToyBiobjectiveMatchesGridOracle) {
  const auto reg = dfo::mo_registry();
  const auto* toy = dfo::find_mo_problem(reg, "toy_biobj");
  ASSERT_NE(toy, nullptr);

  dfo::HybridConfig cfg;
  cfg.max_evals = 3000;  // split over 5 weights
  cfg.seed = 7;
  auto res = dfo::mo_driver(*toy, dfo::ScalarSolverKind::tr_ds, cfg);
  ASSERT_TRUE(res.errors.empty());
  ASSERT_FALSE(res.curve.empty());

  // curve is non-decreasing (archives only grow)
  for (std::size_t i = 1; i < res.curve.size(); ++i)
    EXPECT_GE(res.curve[i].hypervolume, res.curve[i - 1].hypervolume - 1e-12);

  const auto oracle = oracles::toy_grid_oracle(100001);
  EXPECT_NEAR(oracle.front_hv, 5.0 / 6.0, 1e-4);      // true front
  EXPECT_NEAR(oracle.minimizers_hv, 0.7265625, 1e-9);  // 5 scalarization minimizers
  const double final_hv = res.curve.back().hypervolume;
  EXPECT_GE(final_hv, 0.55);
  EXPECT_GE(final_hv, oracle.minimizers_hv - 1e-9);  // archive contains the minimizers
  EXPECT_NEAR(final_hv, oracle.front_hv, 0.02);

  // the unit-weight runs pin the extreme points: best f1 in the archive is 0
  double best_f1 = 1.0;
  for (const auto& e : res.archive.entries) best_f1 = std::min(best_f1, e.f.values[0]);
  EXPECT_LE(best_f1, 1e-6);
}

TEST(MoDriver, GridSizedRunSplit) {
  const auto reg = dfo::mo_registry();
  const auto* toy = dfo::find_mo_problem(reg, "toy_biobj");
  dfo::HybridConfig cfg;
  cfg.max_evals = 500;
  auto res = dfo::mo_driver(*toy, dfo::ScalarSolverKind::tr_ds, cfg);
  // five scalarized runs; weight indices 0..4 all appear
  std::set<int> widx;
  for (const auto& e : res.archive.entries) widx.insert(e.weight_index);
  EXPECT_EQ(widx.size(), 5u);
  EXPECT_LE(res.archive.entries.size(), 500u + 5u);
}

TEST(MoDriver, RejectsUnsupportedObjectiveCounts) {
  dfo::MoProblem bad;
  bad.name = "quad";
  dfo::ObjectiveProblem f;
  f.dim = 1;
  f.eval = [](const Vector& x) { return x[0]; };
  f.x0 = Vector::Zero(1);
  bad.objectives = {f, f, f, f};
  bad.ranges = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
  dfo::HybridConfig cfg;
  EXPECT_THROW(dfo::mo_driver(bad, dfo::ScalarSolverKind::tr_ds, cfg),
               dfo::UnsupportedObjectiveCount);
}

TEST(MoDriver, TriObjectiveRunsAndImproves) {
  const auto reg = dfo::mo_registry();
  const auto* tri = dfo::find_mo_problem(reg, "toy_triobj");
  ASSERT_NE(tri, nullptr);
  dfo::HybridConfig cfg;
  cfg.max_evals = 1200;
  auto res = dfo::mo_driver(*tri, dfo::ScalarSolverKind::tr_ds, cfg);
  ASSERT_FALSE(res.curve.empty());
  EXPECT_GT(res.curve.back().hypervolume, 0.3);
  for (std::size_t i = 1; i < res.curve.size(); ++i)
    EXPECT_GE(res.curve[i].hypervolume, res.curve[i - 1].hypervolume - 1e-12);
}

TEST(Normalization, ClipsIntoUnitBox) {
  auto v = dfo::normalize_objectives({-1.0, 5.0, 0.5}, {{0, 1}, {0, 1}, {0, 1}});
  EXPECT_DOUBLE_EQ(v.values[0], 0.0);
  EXPECT_DOUBLE_EQ(v.values[1], 1.0);
  EXPECT_DOUBLE_EQ(v.values[2], 0.5);
}

}  // namespace
