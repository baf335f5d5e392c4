#ifndef ROTAGAP_AFFINITY_HPP
#define ROTAGAP_AFFINITY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rotagap/assignment.hpp"
#include "rotagap/domain.hpp"
#include "rotagap/error.hpp"
#include "rotagap/matrix.hpp"

namespace rotagap {

/// Affinity a_ij counts the cycles since task j was last assigned to agent i.
/// It is 0 for incompatible pairs and starts at 1 otherwise. The state also
/// keeps how often each pair has been assigned over the run.
struct AffinityState {
  Matrix<std::int64_t> affinities;
  Matrix<std::int64_t> assignment_counts;
  std::int64_t cycle = 1;

  std::int64_t operator()(std::size_t agent, std::size_t task) const {
    return affinities(agent, task);
  }

  bool operator==(const AffinityState&) const = default;
};

inline AffinityState init_affinities(const Instance& inst) {
  AffinityState s;
  s.affinities = Matrix<std::int64_t>(inst.num_agents(), inst.num_tasks(), 0);
  s.assignment_counts =
      Matrix<std::int64_t>(inst.num_agents(), inst.num_tasks(), 0);
  for (std::size_t i = 0; i < inst.num_agents(); ++i)
    for (std::size_t j = 0; j < inst.num_tasks(); ++j)
      if (inst.compatible(i, j)) s.affinities(i, j) = 1;
  s.cycle = 1;
  return s;
}

/// Advances the state from cycle k-1 to k given what was available and
/// assigned in cycle k-1:
///   assigned pair                      -> 1
///   both sides available, not assigned -> a + 1
///   either side unavailable            -> unchanged
///   incompatible                       -> 0
inline AffinityState update_affinities(const Instance& inst,
                                       const AffinityState& state,
                                       const Availability& prev,
                                       const Assignment& prev_assignment) {
  const std::size_t m = inst.num_agents();
  const std::size_t n = inst.num_tasks();
  if (prev_assignment.agent_of.size() != n)
    throw InvalidAssignment("assignment size does not match task count");
  for (std::size_t j = 0; j < n; ++j) {
    const int a = prev_assignment.agent_of[j];
    if (a == kUnassigned) continue;
    if (a < 0 || static_cast<std::size_t>(a) >= m)
      throw InvalidAssignment("task '" + inst.tasks()[j].id +
                              "' assigned to out-of-range agent");
    const auto i = static_cast<std::size_t>(a);
    const std::string pair =
        "(" + inst.agents()[i].id + ", " + inst.tasks()[j].id + ")";
    if (!inst.compatible(i, j))
      throw InvalidAssignment("incompatible pair " + pair);
    if (!prev.agents[i] || !prev.tasks[j])
      throw InvalidAssignment("unavailable pair " + pair);
  }

  AffinityState next = state;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!inst.compatible(i, j)) {
        next.affinities(i, j) = 0;
      } else if (prev_assignment.agent_of[j] == static_cast<int>(i)) {
        next.affinities(i, j) = 1;
        ++next.assignment_counts(i, j);
      } else if (prev.agents[i] && prev.tasks[j]) {
        ++next.affinities(i, j);
      }
    }
  }
  ++next.cycle;
  return next;
}

/// Mean affinity over the given agents minus the ideal mean (|C|+1)/2.
/// Zero means the task's affinities form {1, ..., |C|}.
inline double affinity_pressure(const AffinityState& state, std::size_t task,
                                std::span<const std::size_t> agents) {
  if (agents.empty())
    throw DegenerateInput("affinity pressure needs at least one agent");
  std::int64_t sum = 0;
  for (std::size_t i : agents) sum += state.affinities(i, task);
  const double c = static_cast<double>(agents.size());
  return static_cast<double>(sum) / c - (c + 1.0) / 2.0;
}

/// Available agents compatible with `task`, in agent order.
inline std::vector<std::size_t> available_compatible_agents(
    const Instance& inst, const Availability& av, std::size_t task) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < inst.num_agents(); ++i)
    if (av.agents[i] && inst.compatible(i, task)) out.push_back(i);
  return out;
}

/// Affinity pressure of one task restricted to the available agents, or
/// nullopt if none of its compatible agents is available.
inline std::optional<double> task_pressure(const Instance& inst,
                                           const AffinityState& state,
                                           const Availability& av,
                                           std::size_t task) {
  auto agents = available_compatible_agents(inst, av, task);
  if (agents.empty()) return std::nullopt;
  return affinity_pressure(state, task, agents);
}

/// Max affinity pressure over the available tasks. Tasks without an available
/// compatible agent are skipped; nullopt when every task is skipped.
inline std::optional<double> max_affinity_pressure(const Instance& inst,
                                                   const AffinityState& state,
                                                   const Availability& av) {
  std::optional<double> best;
  for (std::size_t j = 0; j < inst.num_tasks(); ++j) {
    if (!av.tasks[j]) continue;
    auto ap = task_pressure(inst, state, av, j);
    if (ap && (!best || *ap > *best)) best = ap;
  }
  return best;
}

}  // namespace rotagap

#endif  // ROTAGAP_AFFINITY_HPP
