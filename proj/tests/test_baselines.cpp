#include <gtest/gtest.h>

#include <limits>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "stowrl/baselines.hpp"
#include "stowrl/bench.hpp"
#include "stowrl/problem_io.hpp"

using namespace stowrl;

namespace {

// Small feasible instance: up to `slots` fill slots drawn from a random yard.
ProblemInstance small_instance(std::mt19937_64& rng, int stacks, int height, int masks, int slots) {
  std::uniform_int_distribution<int> h(0, height), m(1, masks);
  ProblemInstance p;
  p.id = "small";
  p.yard.max_stack_height = height;
  p.yard.stacks.resize(stacks);
  std::vector<int> supply;
  for (auto& st : p.yard.stacks) {
    const int n = h(rng);
    for (int i = 0; i < n; ++i) {
      st.push_back(MaskId{m(rng)});
      supply.push_back(st.back().value);
    }
  }
  std::shuffle(supply.begin(), supply.end(), rng);
  supply.resize(std::min<std::size_t>(supply.size(), slots));
  std::vector<int> ship;
  for (int v : supply) {
    if (rng() % 3 == 0) ship.push_back(0);
    ship.push_back(v);
  }
  p.ship = make_ship(ship);
  return p;
}

}  // namespace

TEST(RandomPolicy, SingleCandidate) {
  ProblemInstance p{"p", make_ship({1}), make_yard({{1, 2}})};
  Rng rng(0);
  const auto r = random_policy(p, rng);
  EXPECT_EQ(r.plan, (std::vector<ContainerRef>{{0, 0}}));
  EXPECT_EQ(r.total_shuffles, 1);
  EXPECT_FALSE(r.optimal);
}

TEST(RandomPolicy, SeededAndOnTop) {
  const auto p = generate(GenSpec{});
  Rng a(7), b(7);
  EXPECT_EQ(random_policy(p, a).plan, random_policy(p, b).plan);

  ProblemInstance tops{"t", make_ship({1, 1}), make_yard({{1}, {1}})};
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    EXPECT_EQ(random_policy(tops, rng).total_shuffles, 0);
  }
  ProblemInstance bad{"b", make_ship({1}), make_yard({{2}})};
  Rng rng(0);
  EXPECT_THROW(random_policy(bad, rng), InfeasibleProblem);
}

TEST(Lookahead, ZeroStepPicksMinimumQ) {
  ProblemInstance p{"p", make_ship({1}), make_yard({{1, 2, 3}, {1, 4}, {5, 1, 6}})};
  const auto r = lookahead(p, 0);
  EXPECT_EQ(r.plan, (std::vector<ContainerRef>{{1, 0}}));
  EXPECT_EQ(r.total_shuffles, 1);
}

TEST(Lookahead, TwoSlotExampleMatchesBruteForce) {
  ProblemInstance p{"p", make_ship({1, 2}), make_yard({{2, 1}, {1}})};
  const int best = oracle::brute_force_optimum(p);
  const auto k0 = lookahead(p, 0);
  const auto k1 = lookahead(p, 1);
  EXPECT_EQ(best, 0);
  EXPECT_EQ(k0.total_shuffles, 0);
  EXPECT_EQ(k0.plan.front(), (ContainerRef{0, 1}));
  EXPECT_EQ(k1.total_shuffles, 0);
  EXPECT_LE(k1.total_shuffles, k0.total_shuffles);
}

TEST(Lookahead, OneStepSometimesBeatsZeroStep) {
  std::mt19937_64 rng(20);
  int better = 0, worse = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto p = small_instance(rng, 3, 4, 3, 6);
    const int k0 = lookahead(p, 0).total_shuffles;
    const int k1 = lookahead(p, 1).total_shuffles;
    better += k1 < k0;
    worse += k1 > k0;
  }
  EXPECT_GT(better, 0);
  EXPECT_GT(better, worse);
}

TEST(Lookahead, HorizonTruncatesAtShipEnd) {
  ProblemInstance p{"p", make_ship({1, 2}), make_yard({{2, 1}, {1}})};
  EXPECT_EQ(lookahead(p, 10).total_shuffles, lookahead(p, 1).total_shuffles);
}

TEST(ExactSolve, SingleChoice) {
  ProblemInstance p{"p", make_ship({1}), make_yard({{1, 2}})};
  const auto r = exact_solve(p);
  EXPECT_EQ(r.plan, (std::vector<ContainerRef>{{0, 0}}));
  EXPECT_EQ(r.total_shuffles, 1);
  EXPECT_TRUE(r.optimal);
  EXPECT_GE(r.nodes_explored, 1u);
}

TEST(ExactSolve, FourSlotsThreeByThree) {
  ProblemInstance p{"p", make_ship({2, 1, 0, 3, 1}), make_yard({{1, 2, 3}, {3, 1, 2}, {2, 1, 1}}, 3)};
  const auto r = exact_solve(p);
  EXPECT_TRUE(r.optimal);
  EXPECT_EQ(r.total_shuffles, oracle::brute_force_optimum(p));
  EXPECT_EQ(plan_cost(p, r.plan), r.total_shuffles);
}

TEST(ExactSolve, InfeasibleThrows) {
  EXPECT_THROW(exact_solve({"b", make_ship({1}), make_yard({{2}})}), InfeasibleProblem);
}

TEST(ExactSolve, DefaultScaleInstanceIsProven) {
  const auto p = generate(GenSpec{});
  const auto r = exact_solve(p);
  EXPECT_TRUE(r.optimal);
  EXPECT_EQ(plan_cost(p, r.plan), r.total_shuffles);
}

// Oracle and dominance properties on small instances.

TEST(BaselineProperties, ExactMatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = small_instance(rng, 3, 3, 3, 6);
    const auto r = exact_solve(p);
    ASSERT_TRUE(r.optimal);
    EXPECT_EQ(r.total_shuffles, oracle::brute_force_optimum(p)) << serialize_problem(p);
    EXPECT_EQ(plan_cost(p, r.plan), r.total_shuffles);
  }
}

TEST(BaselineProperties, Dominance) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = small_instance(rng, 4, 4, 3, 8);
    const int opt = exact_solve(p).total_shuffles;
    for (int k = 0; k <= 2; ++k) {
      const auto r = lookahead(p, k);
      EXPECT_EQ(plan_cost(p, r.plan), r.total_shuffles);
      EXPECT_GE(r.total_shuffles, opt);
    }
    double random_sum = 0;
    for (int s = 0; s < 30; ++s) {
      Rng r(s);
      const auto res = random_policy(p, r);
      EXPECT_GE(res.total_shuffles, opt);
      random_sum += res.total_shuffles;
    }
    EXPECT_GE(random_sum / 30.0, opt);
  }
}

TEST(BaselineProperties, LookaheadDeterministic) {
  const auto problems = generate_batch(GenSpec{}, 5);
  for (const auto& p : problems)
    for (int k = 0; k <= 1; ++k) EXPECT_EQ(lookahead(p, k).plan, lookahead(p, k).plan);
}

TEST(BaselineProperties, OrderInvariance) {
  std::mt19937_64 rng(23);
  GenSpec spec;
  spec.seed = 300;
  auto problems = generate_batch(spec, 5);
  for (int i = 0; i < 40; ++i) problems.push_back(small_instance(rng, 4, 4, 3, 7));
  for (const auto& p : problems) {
    std::vector<int> totals;
    for (auto order : {BranchOrder::cheapest_first, BranchOrder::stack_ascending,
                       BranchOrder::stack_descending})
      for (bool memo : {true, false}) {
        if (!memo && p.yard.container_count() > 20) continue;
        ExactOptions o;
        o.order = order;
        o.memoize = memo;
        const auto r = exact_solve(p, o);
        ASSERT_TRUE(r.optimal);
        totals.push_back(r.total_shuffles);
      }
    EXPECT_EQ(std::count(totals.begin(), totals.end(), totals.front()),
              static_cast<long>(totals.size()));
  }
}

TEST(BaselineProperties, MonotoneBudget) {
  GenSpec spec;
  spec.seed = 400;
  for (const auto& p : generate_batch(spec, 5)) {
    int prev = std::numeric_limits<int>::max();
    for (std::uint64_t budget : std::vector<std::uint64_t>{1, 10, 100, 1000, 100000, kDefaultNodeBudget}) {
      const auto r = exact_solve(p, budget);
      EXPECT_LE(r.total_shuffles, prev);
      EXPECT_EQ(plan_cost(p, r.plan), r.total_shuffles);
      prev = r.total_shuffles;
    }
  }
}
