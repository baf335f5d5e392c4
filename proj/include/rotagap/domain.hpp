#ifndef ROTAGAP_DOMAIN_HPP
#define ROTAGAP_DOMAIN_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rotagap/error.hpp"
#include "rotagap/matrix.hpp"

namespace rotagap {

struct AgentSpec {
  std::string id;
  std::int64_t capacity = 0;

  bool operator==(const AgentSpec&) const = default;
};

struct TaskSpec {
  std::string id;
  std::map<std::string, std::int64_t> profits;
  std::map<std::string, std::int64_t> weights;
  std::set<std::string> compatible;

  bool operator==(const TaskSpec&) const = default;
};

using Metadata = std::map<std::string, std::string>;

/// Immutable problem data. List order of agents and tasks fixes the row and
/// column order of every matrix derived from the instance.
///
/// Construction never throws on inconsistent data; references to unknown
/// agents are dropped from the dense views and reported by validate_instance.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<AgentSpec> agents, std::vector<TaskSpec> tasks,
           Metadata metadata = {})
      : agents_(std::move(agents)),
        tasks_(std::move(tasks)),
        metadata_(std::move(metadata)) {
    build_index();
  }

  const std::vector<AgentSpec>& agents() const { return agents_; }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const Metadata& metadata() const { return metadata_; }

  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_tasks() const { return tasks_.size(); }

  std::optional<std::size_t> agent_index(const std::string& id) const {
    auto it = agent_index_.find(id);
    if (it == agent_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> task_index(const std::string& id) const {
    auto it = task_index_.find(id);
    if (it == task_index_.end()) return std::nullopt;
    return it->second;
  }

  bool compatible(std::size_t agent, std::size_t task) const {
    return compat_(agent, task) != 0;
  }
  std::int64_t profit(std::size_t agent, std::size_t task) const {
    return profit_(agent, task);
  }
  std::int64_t weight(std::size_t agent, std::size_t task) const {
    return weight_(agent, task);
  }
  std::int64_t capacity(std::size_t agent) const {
    return agents_[agent].capacity;
  }

  const Matrix<std::uint8_t>& compatibility() const { return compat_; }
  const Matrix<std::int64_t>& profits() const { return profit_; }
  const Matrix<std::int64_t>& weights() const { return weight_; }

  /// Number of compatible agents per task (|C_j| with full availability).
  std::size_t compatible_count(std::size_t task) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < num_agents(); ++i) c += compat_(i, task);
    return c;
  }

  bool operator==(const Instance& o) const {
    return agents_ == o.agents_ && tasks_ == o.tasks_ &&
           metadata_ == o.metadata_;
  }

 private:
  void build_index() {
    for (std::size_t i = 0; i < agents_.size(); ++i)
      agent_index_.emplace(agents_[i].id, i);
    for (std::size_t j = 0; j < tasks_.size(); ++j)
      task_index_.emplace(tasks_[j].id, j);
    compat_ = Matrix<std::uint8_t>(agents_.size(), tasks_.size(), 0);
    profit_ = Matrix<std::int64_t>(agents_.size(), tasks_.size(), 0);
    weight_ = Matrix<std::int64_t>(agents_.size(), tasks_.size(), 0);
    for (std::size_t j = 0; j < tasks_.size(); ++j) {
      const TaskSpec& t = tasks_[j];
      for (const std::string& a : t.compatible) {
        auto idx = agent_index(a);
        if (!idx) continue;
        compat_(*idx, j) = 1;
        if (auto p = t.profits.find(a); p != t.profits.end())
          profit_(*idx, j) = p->second;
        if (auto w = t.weights.find(a); w != t.weights.end())
          weight_(*idx, j) = w->second;
      }
    }
  }

  std::vector<AgentSpec> agents_;
  std::vector<TaskSpec> tasks_;
  Metadata metadata_;
  std::unordered_map<std::string, std::size_t> agent_index_;
  std::unordered_map<std::string, std::size_t> task_index_;
  Matrix<std::uint8_t> compat_;
  Matrix<std::int64_t> profit_;
  Matrix<std::int64_t> weight_;
};

/// Entity ids available in one cycle.
struct CycleAvailability {
  std::vector<std::string> agents;
  std::vector<std::string> tasks;

  bool operator==(const CycleAvailability&) const = default;
};

/// Pre-generated per-cycle availability, replayed identically for every
/// strategy of an experiment.
struct ScenarioTrace {
  std::vector<CycleAvailability> cycles;
  std::uint64_t seed = 0;

  std::size_t num_cycles() const { return cycles.size(); }

  bool operator==(const ScenarioTrace&) const = default;
};

/// Availability resolved against an instance as index masks.
struct Availability {
  std::vector<std::uint8_t> agents;
  std::vector<std::uint8_t> tasks;

  static Availability all(const Instance& inst) {
    return {std::vector<std::uint8_t>(inst.num_agents(), 1),
            std::vector<std::uint8_t>(inst.num_tasks(), 1)};
  }
};

inline Availability resolve(const Instance& inst, const CycleAvailability& c) {
  Availability av{std::vector<std::uint8_t>(inst.num_agents(), 0),
                  std::vector<std::uint8_t>(inst.num_tasks(), 0)};
  for (const auto& id : c.agents) {
    auto i = inst.agent_index(id);
    if (!i) throw ConfigError("trace references unknown agent '" + id + "'");
    av.agents[*i] = 1;
  }
  for (const auto& id : c.tasks) {
    auto j = inst.task_index(id);
    if (!j) throw ConfigError("trace references unknown task '" + id + "'");
    av.tasks[*j] = 1;
  }
  return av;
}

inline std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  if (inst.agents().empty()) out.push_back("instance has no agents");
  if (inst.tasks().empty()) out.push_back("instance has no tasks");

  std::set<std::string> seen;
  for (const AgentSpec& a : inst.agents()) {
    if (!seen.insert(a.id).second)
      out.push_back("agent '" + a.id + "': duplicate id");
    if (a.capacity < 0)
      out.push_back("agent '" + a.id + "': negative capacity");
  }
  std::set<std::string> seen_tasks;
  for (const TaskSpec& t : inst.tasks()) {
    const std::string who = "task '" + t.id + "': ";
    if (!seen_tasks.insert(t.id).second) out.push_back(who + "duplicate id");
    if (t.compatible.empty()) out.push_back(who + "empty compatible set");
    for (const auto& a : t.compatible) {
      if (!seen.count(a)) out.push_back(who + "unknown agent '" + a + "'");
      if (!t.profits.count(a))
        out.push_back(who + "missing profit for agent '" + a + "'");
      if (!t.weights.count(a))
        out.push_back(who + "missing weight for agent '" + a + "'");
    }
    for (const auto& [a, p] : t.profits) {
      if (!t.compatible.count(a))
        out.push_back(who + "profit for incompatible agent '" + a + "'");
      if (p < 0) out.push_back(who + "negative profit for agent '" + a + "'");
    }
    for (const auto& [a, w] : t.weights) {
      if (!t.compatible.count(a))
        out.push_back(who + "weight for incompatible agent '" + a + "'");
      if (w <= 0)
        out.push_back(who + "non-positive weight for agent '" + a + "'");
    }
  }
  return out;
}

inline std::vector<std::string> validate_trace(const Instance& inst,
                                               const ScenarioTrace& trace) {
  std::vector<std::string> out;
  if (trace.cycles.empty()) out.push_back("trace has no cycles");
  for (std::size_t k = 0; k < trace.cycles.size(); ++k) {
    const std::string who = "cycle " + std::to_string(k + 1) + ": ";
    const auto& c = trace.cycles[k];
    if (c.agents.empty()) out.push_back(who + "no available agents");
    if (c.tasks.empty()) out.push_back(who + "no available tasks");
    for (const auto& a : c.agents)
      if (!inst.agent_index(a)) out.push_back(who + "unknown agent '" + a + "'");
    for (const auto& t : c.tasks)
      if (!inst.task_index(t)) out.push_back(who + "unknown task '" + t + "'");
  }
  return out;
}

/// Three agents A, B, C and three tasks over four cycles, with T3 unavailable
/// in cycle 3. Unit weights and capacities, so any one-task-per-agent
/// sequence is feasible.
inline std::pair<Instance, ScenarioTrace> worked_example_fixture() {
  std::vector<AgentSpec> agents{{"A", 1}, {"B", 1}, {"C", 1}};
  auto task = [](std::string id, std::set<std::string> compat) {
    TaskSpec t{std::move(id), {}, {}, std::move(compat)};
    for (const auto& a : t.compatible) {
      t.profits[a] = 1;
      t.weights[a] = 1;
    }
    return t;
  };
  std::vector<TaskSpec> tasks{task("T1", {"A", "B"}), task("T2", {"A", "B", "C"}),
                              task("T3", {"B", "C"})};
  Instance inst(std::move(agents), std::move(tasks), {{"generator", "worked_example"}});

  ScenarioTrace trace;
  const CycleAvailability full{{"A", "B", "C"}, {"T1", "T2", "T3"}};
  trace.cycles = {full, full, {{"A", "B", "C"}, {"T1", "T2"}}, full};
  return {std::move(inst), std::move(trace)};
}

}  // namespace rotagap

#endif  // ROTAGAP_DOMAIN_HPP
