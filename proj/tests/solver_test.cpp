#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "rotagap/solver.hpp"
#include "test_util.hpp"

namespace rotagap {
namespace {

GapProblem make(std::vector<std::int64_t> caps, const std::vector<std::vector<std::int64_t>>& w,
                const std::vector<std::vector<double>>& v) {
  const std::size_t m = caps.size(), n = w.front().size();
  GapProblem p;
  p.capacities = std::move(caps);
  p.weights = Matrix<std::int64_t>(m, n, 0);
  p.values = Matrix<double>(m, n, 0.0);
  p.feasible = Matrix<std::uint8_t>(m, n, 1);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) p.weights(i, j) = w[i][j], p.values(i, j) = v[i][j];
  return p;
}

GapProblem two_by_three() {
  return make({5, 5}, {{4, 4, 4}, {4, 4, 4}}, {{3, 2, 1}, {3, 2, 1}});
}

// Every optimal task -> agent map, by plain enumeration.
std::set<std::vector<int>> optimal_maps(const GapProblem& p) {
  const std::size_t m = p.num_agents(), n = p.num_tasks();
  std::set<std::vector<int>> best;
  double best_value = -1;
  std::vector<int> cur(n, kUnassigned);
  auto rec = [&](auto&& self, std::size_t j, std::vector<std::int64_t>& room, double value) -> void {
    if (j == n) {
      if (value > best_value) best.clear(), best_value = value;
      if (value == best_value) best.insert(cur);
      return;
    }
    self(self, j + 1, room, value);
    for (std::size_t i = 0; i < m; ++i) {
      if (!p.feasible(i, j) || p.weights(i, j) > room[i]) continue;
      room[i] -= p.weights(i, j);
      cur[j] = static_cast<int>(i);
      self(self, j + 1, room, value + p.values(i, j));
      cur[j] = kUnassigned;
      room[i] += p.weights(i, j);
    }
  };
  std::vector<std::int64_t> room = p.capacities;
  rec(rec, 0, room, 0.0);
  return best;
}

TEST(Solve, EmptyProblemIsProvenOptimal) {
  GapProblem p;
  p.capacities = {3, 4};
  p.weights = Matrix<std::int64_t>(2, 0, 0);
  p.values = Matrix<double>(2, 0, 0.0);
  p.feasible = Matrix<std::uint8_t>(2, 0, 0);
  Assignment a = solve(p, SolverBudget::nodes(10));
  EXPECT_EQ(a.objective, 0.0);
  EXPECT_TRUE(a.proven_optimal);
  EXPECT_TRUE(a.agent_of.empty());

  GapProblem none = two_by_three();
  none.feasible = Matrix<std::uint8_t>(2, 3, 0);
  Assignment b = solve(none, SolverBudget::nodes(10));
  EXPECT_EQ(b.objective, 0.0);
  EXPECT_TRUE(b.proven_optimal);
  EXPECT_EQ(b.assigned_count(), 0u);
}

TEST(Solve, TwoAgentsThreeTasks) {
  GapProblem p = two_by_three();
  EXPECT_EQ(brute_force_oracle(p).objective, 5.0);
  Assignment a = solve(p, SolverBudget::nodes(1000));
  EXPECT_EQ(a.objective, 5.0);
  EXPECT_TRUE(a.proven_optimal);
  EXPECT_NE(a.agent_of[0], kUnassigned);
  EXPECT_NE(a.agent_of[1], kUnassigned);
  EXPECT_NE(a.agent_of[0], a.agent_of[1]);
  EXPECT_EQ(a.agent_of[2], kUnassigned);

  Assignment ls = local_search_improve(p, Assignment::empty(3), SolverBudget::nodes(100));
  EXPECT_EQ(ls.objective, 5.0);
  EXPECT_TRUE(verify_assignment(p, ls).empty());
}

TEST(BruteForce, TrivialCases) {
  GapProblem one = make({3}, {{2}}, {{4}});
  Assignment a = brute_force_oracle(one);
  EXPECT_EQ(a.agent_of, std::vector<int>{0});
  EXPECT_TRUE(a.proven_optimal);

  GapProblem heavy = make({3, 5}, {{9}, {6}}, {{4}, {4}});
  Assignment b = brute_force_oracle(heavy);
  EXPECT_EQ(b.agent_of, std::vector<int>{kUnassigned});
  EXPECT_EQ(b.objective, 0.0);
}

TEST(BruteForce, RefusesLargeProblems) {
  GapProblem p = make({1, 1, 1}, {std::vector<std::int64_t>(12, 1), std::vector<std::int64_t>(12, 1),
                                  std::vector<std::int64_t>(12, 1)},
                      {std::vector<double>(12, 1), std::vector<double>(12, 1), std::vector<double>(12, 1)});
  // 4^12 = 16.7M > 1e7
  EXPECT_THROW(brute_force_oracle(p), DegenerateInput);
}

TEST(Greedy, WorkedCases) {
  GapProblem all_fit = make({10}, {{2, 3, 4}}, {{1, 1, 1}});
  EXPECT_EQ(greedy_construct(all_fit).assigned_count(), 3u);

  GapProblem ratio = make({1}, {{1, 1}}, {{9, 1}});
  EXPECT_EQ(greedy_construct(ratio).agent_of, (std::vector<int>{0, kUnassigned}));

  GapProblem tie = make({2}, {{2, 1}}, {{4, 2}});  // both ratio 2
  EXPECT_EQ(greedy_construct(tie).agent_of, (std::vector<int>{0, kUnassigned}));
}

TEST(LocalSearch, ZeroBudgetLeavesStartAlone) {
  GapProblem p = two_by_three();
  Assignment start = Assignment::empty(3);
  start.agent_of[2] = 1;
  WorkMeter meter(SolverBudget::nodes(1));
  ASSERT_TRUE(meter.charge());  // spend the only unit
  Assignment out = local_search_improve(p, start, meter);
  EXPECT_EQ(out.agent_of, start.agent_of);
  EXPECT_TRUE(out.budget_exhausted);
  EXPECT_THROW(SolverBudget::nodes(0).validate(), ConfigError);
}

TEST(LocalSearch, OptimalStartUnchanged) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GapProblem p = testing::random_gap(seed);
    Assignment opt = brute_force_oracle(p);
    Assignment out = local_search_improve(p, opt, SolverBudget::nodes(1000));
    EXPECT_EQ(out.objective, opt.objective) << seed;
    EXPECT_TRUE(verify_assignment(p, out).empty());
  }
}

TEST(LocalSearch, NeverDecreasesAndStaysFeasible) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GapProblem p = testing::random_gap(seed, 4, 14);
    Assignment g = greedy_construct(p);
    Assignment out = local_search_improve(p, g, SolverBudget::nodes(1000));
    EXPECT_GE(out.objective, g.objective);
    EXPECT_TRUE(verify_assignment(p, out).empty()) << seed;
  }
}

TEST(BranchAndBound, MatchesOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GapProblem p = testing::random_gap(seed);
    Assignment oracle = brute_force_oracle(p);
    Assignment bb = branch_and_bound(p, Assignment::empty(p.num_tasks()), SolverBudget::nodes(10'000'000));
    EXPECT_EQ(bb.objective, oracle.objective) << "seed " << seed;
    EXPECT_TRUE(bb.proven_optimal);
    EXPECT_TRUE(verify_assignment(p, bb).empty());
    EXPECT_GE(relaxed_upper_bound(p), oracle.objective);
    Assignment s = solve(p, SolverBudget::nodes(10'000'000));
    EXPECT_EQ(s.objective, oracle.objective) << "seed " << seed;
  }
}

TEST(BranchAndBound, ExhaustedBudgetKeepsIncumbent) {
  std::uint64_t seed = 0;
  GapProblem p = testing::random_gap(seed, 3, 10);
  while (p.num_tasks() < 8 || p.num_agents() < 2) p = testing::random_gap(++seed, 3, 10);
  Assignment cut = branch_and_bound(p, Assignment::empty(p.num_tasks()), SolverBudget::nodes(2));
  EXPECT_FALSE(cut.proven_optimal);
  EXPECT_TRUE(cut.budget_exhausted);
  EXPECT_TRUE(verify_assignment(p, cut).empty());

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GapProblem q = testing::random_gap(seed, 3, 10);
    Assignment g = greedy_construct(q);
    Assignment out = branch_and_bound(q, g, SolverBudget::nodes(2));
    EXPECT_GE(out.objective, g.objective);
    EXPECT_TRUE(verify_assignment(q, out).empty());
    EXPECT_EQ(out.proven_optimal, !out.budget_exhausted);
  }
}

TEST(Solve, WallClockBudgetReturnsFeasible) {
  GapProblem p = testing::random_gap(17, 3, 10);
  Assignment a = solve(p, SolverBudget::seconds(5));
  EXPECT_TRUE(verify_assignment(p, a).empty());
  EXPECT_EQ(a.objective, brute_force_oracle(p).objective);
}

TEST(Solve, DominatesGreedyAndIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GapProblem p = testing::random_gap(seed, 6, 30);
    for (std::uint64_t budget : {1, 5, 50, 5000}) {
      Assignment a = solve(p, SolverBudget::nodes(budget));
      Assignment b = solve(p, SolverBudget::nodes(budget));
      EXPECT_EQ(a.agent_of, b.agent_of);
      EXPECT_EQ(a.nodes_explored, b.nodes_explored);
      EXPECT_GE(a.objective, greedy_construct(p).objective);
      EXPECT_TRUE(verify_assignment(p, a).empty());
      if (a.proven_optimal) {
        EXPECT_FALSE(a.budget_exhausted);
      }
    }
  }
}

TEST(Solve, ScalingValuesKeepsTheOptimalSet) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    GapProblem p = testing::random_gap(seed, 3, 7);
    const auto base = optimal_maps(p);
    Assignment a = solve(p, SolverBudget::nodes(1'000'000));
    EXPECT_EQ(base.count(a.agent_of), 1u) << seed;
    for (double k : {3.0, 0.25, 1024.0}) {
      GapProblem q = p;
      for (double& x : q.values.data()) x *= k;
      EXPECT_EQ(optimal_maps(q), base) << seed;
      Assignment b = solve(q, SolverBudget::nodes(1'000'000));
      EXPECT_EQ(base.count(b.agent_of), 1u) << seed;
      EXPECT_DOUBLE_EQ(b.objective, k * a.objective);
    }
  }
}

TEST(Verify, NamesEachViolation) {
  GapProblem p = two_by_three();
  p.feasible(1, 2) = 0;
  Assignment a = Assignment::empty(3);
  a.agent_of = {0, 0, 1};
  a.objective = 99;
  auto v = verify_assignment(p, a);
  EXPECT_GE(v.size(), 3u);  // overload on agent 0, infeasible pair, objective mismatch
  Assignment ok = Assignment::empty(3);
  ok.agent_of = {0, 1, kUnassigned};
  ok.objective = 5;
  EXPECT_TRUE(verify_assignment(p, ok).empty());
  Assignment short_map = Assignment::empty(2);
  EXPECT_FALSE(verify_assignment(p, short_map).empty());
}

TEST(LpDump, ExactListing) {
  GapProblem p = make({5, 6}, {{4, 3}, {2, 7}}, {{3, 2.5}, {1, 8}});
  p.feasible(1, 0) = 0;
  std::ostringstream os;
  write_lp(os, p);
  EXPECT_EQ(os.str(),
            "\\ GAP 2 agents 2 tasks\n"
            "maximize\n"
            " obj: 3 x_0_0 + 2.5 x_0_1 + 8 x_1_1\n"
            "subject to\n"
            " cap_0: 4 x_0_0 + 3 x_0_1 <= 5\n"
            " cap_1: 7 x_1_1 <= 6\n"
            " one_0: x_0_0 <= 1\n"
            " one_1: x_0_1 + x_1_1 <= 1\n"
            "binary\n"
            " x_0_0\n"
            " x_0_1\n"
            " x_1_1\n"
            "end\n");
}

}  // namespace
}  // namespace rotagap
