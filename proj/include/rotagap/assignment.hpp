#ifndef ROTAGAP_ASSIGNMENT_HPP
#define ROTAGAP_ASSIGNMENT_HPP

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace rotagap {

inline constexpr int kUnassigned = -1;

/// One cycle's solution. agent_of[j] is the agent index holding task j, or
/// kUnassigned; a task therefore appears in at most one pair.
struct Assignment {
  std::vector<int> agent_of;
  double objective = 0.0;
  bool proven_optimal = false;
  std::uint64_t nodes_explored = 0;
  bool budget_exhausted = false;

  static Assignment empty(std::size_t num_tasks) {
    Assignment a;
    a.agent_of.assign(num_tasks, kUnassigned);
    return a;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 0; j < agent_of.size(); ++j)
      if (agent_of[j] != kUnassigned)
        out.emplace_back(static_cast<std::size_t>(agent_of[j]), j);
    return out;
  }

  std::size_t assigned_count() const {
    std::size_t c = 0;
    for (int a : agent_of) c += a != kUnassigned;
    return c;
  }
};

}  // namespace rotagap

#endif  // ROTAGAP_ASSIGNMENT_HPP
