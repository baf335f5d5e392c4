#include <gtest/gtest.h>

#include <algorithm>

#include "rotagap/domain.hpp"
#include "rotagap/rng.hpp"
#include "test_util.hpp"

namespace rotagap {
namespace {

Instance three_by_three() {
  std::vector<AgentSpec> agents{{"A", 5}, {"B", 5}, {"C", 5}};
  std::vector<TaskSpec> tasks;
  for (std::string id : {"T1", "T2", "T3"}) {
    TaskSpec t{id, {}, {}, {"A", "B", "C"}};
    for (const auto& a : t.compatible) t.profits[a] = 3, t.weights[a] = 2;
    tasks.push_back(t);
  }
  return Instance(agents, tasks);
}

bool mentions(const std::vector<std::string>& v, const std::string& what) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(what) != std::string::npos; });
}

TEST(ValidateInstance, WellFormedInstanceHasNoViolations) {
  EXPECT_TRUE(validate_instance(three_by_three()).empty());
}

TEST(ValidateInstance, UnknownAgentIsNamed) {
  Instance base = three_by_three();
  auto tasks = base.tasks();
  tasks[1].compatible.insert("Z");
  tasks[1].profits["Z"] = 1;
  tasks[1].weights["Z"] = 1;
  auto v = validate_instance(Instance(base.agents(), tasks));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("'Z'"), std::string::npos);
}

TEST(ValidateInstance, EmptyCompatibleSetIsNamed) {
  Instance base = three_by_three();
  auto tasks = base.tasks();
  tasks[2] = TaskSpec{"T3", {}, {}, {}};
  auto v = validate_instance(Instance(base.agents(), tasks));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("T3"), std::string::npos);
}

TEST(ValidateInstance, ReportsEachBrokenRule) {
  std::vector<AgentSpec> agents{{"A", -1}, {"A", 3}};
  TaskSpec t{"T", {{"A", -2}, {"B", 1}}, {{"A", 0}}, {"A"}};
  auto v = validate_instance(Instance(agents, {t}));
  EXPECT_TRUE(mentions(v, "negative capacity"));
  EXPECT_TRUE(mentions(v, "duplicate id"));
  EXPECT_TRUE(mentions(v, "negative profit"));
  EXPECT_TRUE(mentions(v, "non-positive weight"));
  EXPECT_TRUE(mentions(v, "profit for incompatible agent 'B'"));
  EXPECT_TRUE(validate_instance(Instance({}, {})).size() >= 2);
}

TEST(ValidateInstance, ZeroProfitIsAllowed) {
  Instance base = three_by_three();
  auto tasks = base.tasks();
  tasks[0].profits["A"] = 0;
  EXPECT_TRUE(validate_instance(Instance(base.agents(), tasks)).empty());
}

// validate_instance must be total: arbitrary junk yields violations, never
// an exception.
TEST(ValidateInstance, TotalOnArbitraryInput) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    std::vector<AgentSpec> agents;
    for (int i = 0, m = static_cast<int>(rng.uniform_int(0, 4)); i < m; ++i)
      agents.push_back({std::string(1, static_cast<char>('A' + rng.uniform_int(0, 3))),
                        rng.uniform_int(-5, 5)});
    std::vector<TaskSpec> tasks;
    for (int j = 0, n = static_cast<int>(rng.uniform_int(0, 4)); j < n; ++j) {
      TaskSpec t;
      t.id = "T" + std::to_string(rng.uniform_int(0, 2));
      for (int k = 0; k < 3; ++k) {
        std::string a(1, static_cast<char>('A' + rng.uniform_int(0, 5)));
        if (rng.bernoulli(0.5)) t.compatible.insert(a);
        if (rng.bernoulli(0.5)) t.profits[a] = rng.uniform_int(-3, 3);
        if (rng.bernoulli(0.5)) t.weights[a] = rng.uniform_int(-3, 3);
      }
      tasks.push_back(t);
    }
    EXPECT_NO_THROW({
      Instance inst(agents, tasks);
      (void)validate_instance(inst);
    });
  }
}

TEST(ValidateTrace, FlagsUnknownIdsAndEmptyCycles) {
  Instance inst = three_by_three();
  ScenarioTrace t;
  t.cycles = {{{"A"}, {"T1"}}, {{}, {"T2"}}, {{"Q"}, {"T9"}}};
  auto v = validate_trace(inst, t);
  EXPECT_TRUE(mentions(v, "cycle 2: no available agents"));
  EXPECT_TRUE(mentions(v, "unknown agent 'Q'"));
  EXPECT_TRUE(mentions(v, "unknown task 'T9'"));
  EXPECT_FALSE(validate_trace(inst, ScenarioTrace{}).empty());
}

TEST(Resolve, RejectsUnknownIds) {
  Instance inst = three_by_three();
  EXPECT_THROW(resolve(inst, {{"A", "X"}, {"T1"}}), ConfigError);
  Availability av = resolve(inst, {{"C"}, {"T1", "T3"}});
  EXPECT_EQ(av.agents, (std::vector<std::uint8_t>{0, 0, 1}));
  EXPECT_EQ(av.tasks, (std::vector<std::uint8_t>{1, 0, 1}));
}

TEST(WorkedExampleFixture, MatchesTheWorkedExample) {
  auto [inst, trace] = worked_example_fixture();
  EXPECT_TRUE(validate_instance(inst).empty());
  EXPECT_TRUE(validate_trace(inst, trace).empty());
  ASSERT_EQ(trace.num_cycles(), 4u);

  EXPECT_EQ(inst.tasks()[0].compatible, (std::set<std::string>{"A", "B"}));
  EXPECT_EQ(inst.tasks()[1].compatible, (std::set<std::string>{"A", "B", "C"}));
  EXPECT_EQ(inst.tasks()[2].compatible, (std::set<std::string>{"B", "C"}));
  EXPECT_FALSE(inst.compatible(2, 0));  // (C, T1)

  const auto& c3 = trace.cycles[2].tasks;
  EXPECT_EQ(std::count(c3.begin(), c3.end(), "T3"), 0);
  for (std::size_t k : {0u, 1u, 3u}) EXPECT_EQ(trace.cycles[k].tasks.size(), 3u);
  for (const auto& a : inst.agents()) EXPECT_EQ(a.capacity, 1);
}

TEST(Instance, DenseViewsFollowListOrder) {
  Instance inst = testing::random_instance(11);
  for (std::size_t j = 0; j < inst.num_tasks(); ++j) {
    const TaskSpec& t = inst.tasks()[j];
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
      const std::string& a = inst.agents()[i].id;
      EXPECT_EQ(inst.compatible(i, j), t.compatible.count(a) == 1);
      if (inst.compatible(i, j)) {
        EXPECT_EQ(inst.profit(i, j), t.profits.at(a));
        EXPECT_EQ(inst.weight(i, j), t.weights.at(a));
      }
    }
    EXPECT_EQ(inst.compatible_count(j), t.compatible.size());
  }
}

}  // namespace
}  // namespace rotagap
