#ifndef ROTAGAP_SOLVER_HPP
#define ROTAGAP_SOLVER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "rotagap/assignment.hpp"
#include "rotagap/domain.hpp"
#include "rotagap/error.hpp"
#include "rotagap/matrix.hpp"

namespace rotagap {

/// One cycle's General Assignment Problem:
///   maximize   sum x_ij v_ij
///   subject to sum_j x_ij w_ij <= b_i   for every agent i
///              sum_i x_ij      <= 1     for every task j
///              x_ij = 0 unless feasible(i, j)
struct GapProblem {
  std::vector<std::int64_t> capacities;
  Matrix<std::int64_t> weights;
  Matrix<double> values;
  Matrix<std::uint8_t> feasible;

  std::size_t num_agents() const { return capacities.size(); }
  std::size_t num_tasks() const { return feasible.cols(); }

  /// A pair the solvers will consider: feasible, positive value, and light
  /// enough to fit the agent on its own. Other pairs can never raise the
  /// objective.
  bool usable(std::size_t i, std::size_t j) const {
    return feasible(i, j) && values(i, j) > 0 && weights(i, j) <= capacities[i];
  }
};

/// Restricts the instance to the cycle's available compatible pairs.
inline GapProblem make_gap_problem(const Instance& inst, const Matrix<double>& values,
                                   const Availability& av) {
  const std::size_t m = inst.num_agents(), n = inst.num_tasks();
  GapProblem p;
  p.capacities.resize(m);
  for (std::size_t i = 0; i < m; ++i) p.capacities[i] = inst.capacity(i);
  p.weights = inst.weights();
  p.values = values;
  p.feasible = Matrix<std::uint8_t>(m, n, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p.feasible(i, j) = av.agents[i] && av.tasks[j] && inst.compatible(i, j);
  return p;
}

/// Work limit for one solve. In node_limit mode a unit is one branch-and-bound
/// node or one full local-search neighbourhood pass; results are then
/// deterministic.
struct SolverBudget {
  enum class Mode { NodeLimit, WallClock };
  Mode mode = Mode::NodeLimit;
  std::uint64_t node_limit = 100000;
  double wall_clock_seconds = 60.0;

  static SolverBudget nodes(std::uint64_t n) { return {Mode::NodeLimit, n, 0.0}; }
  static SolverBudget seconds(double s) { return {Mode::WallClock, 0, s}; }

  void validate() const {
    if (mode == Mode::NodeLimit && node_limit == 0)
      throw ConfigError("node budget must be positive");
    if (mode == Mode::WallClock && !(wall_clock_seconds > 0))
      throw ConfigError("wall-clock budget must be positive");
  }

  bool operator==(const SolverBudget&) const = default;
};

/// Tracks consumption of a SolverBudget across solver phases.
class WorkMeter {
 public:
  explicit WorkMeter(const SolverBudget& b)
      : budget_(b),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(b.wall_clock_seconds))) {}

  /// Consumes one unit; false once the budget is spent.
  bool charge() {
    if (exhausted_) return false;
    if (budget_.mode == SolverBudget::Mode::NodeLimit) {
      if (used_ >= budget_.node_limit) return exhausted_ = true, false;
    } else if ((used_ & 255) == 0 &&
               std::chrono::steady_clock::now() >= deadline_) {
      return exhausted_ = true, false;
    }
    ++used_;
    return true;
  }

  std::uint64_t used() const { return used_; }
  bool exhausted() const { return exhausted_; }

 private:
  SolverBudget budget_;
  std::chrono::steady_clock::time_point deadline_;
  std::uint64_t used_ = 0;
  bool exhausted_ = false;
};

/// Sum of values over the assignment's pairs, in task order.
inline double objective_of(const GapProblem& p, const std::vector<int>& agent_of) {
  double s = 0;
  for (std::size_t j = 0; j < agent_of.size(); ++j)
    if (agent_of[j] != kUnassigned)
      s += p.values(static_cast<std::size_t>(agent_of[j]), j);
  return s;
}

/// Independent feasibility check; returns one line per violation.
inline std::vector<std::string> verify_assignment(const GapProblem& p,
                                                  const Assignment& a) {
  std::vector<std::string> out;
  const std::size_t m = p.num_agents(), n = p.num_tasks();
  if (a.agent_of.size() != n) {
    out.push_back("assignment covers " + std::to_string(a.agent_of.size()) +
                  " tasks, problem has " + std::to_string(n));
    return out;
  }
  std::vector<std::int64_t> load(m, 0);
  double obj = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const int ai = a.agent_of[j];
    if (ai == kUnassigned) continue;
    if (ai < 0 || static_cast<std::size_t>(ai) >= m) {
      out.push_back("task " + std::to_string(j) + ": agent index out of range");
      continue;
    }
    const auto i = static_cast<std::size_t>(ai);
    if (!p.feasible(i, j))
      out.push_back("pair (" + std::to_string(i) + "," + std::to_string(j) +
                    ") is not feasible");
    load[i] += p.weights(i, j);
    obj += p.values(i, j);
  }
  for (std::size_t i = 0; i < m; ++i)
    if (load[i] > p.capacities[i])
      out.push_back("agent " + std::to_string(i) + ": load " +
                    std::to_string(load[i]) + " exceeds capacity " +
                    std::to_string(p.capacities[i]));
  if (std::abs(obj - a.objective) > 1e-9 * std::max(1.0, std::abs(obj)))
    out.push_back("objective " + std::to_string(a.objective) +
                  " differs from recomputed " + std::to_string(obj));
  return out;
}

/// Enumerates every task -> (agent | none) map. Refuses when (m+1)^n > 1e7.
inline Assignment brute_force_oracle(const GapProblem& p) {
  const std::size_t m = p.num_agents(), n = p.num_tasks();
  double combos = std::pow(static_cast<double>(m + 1), static_cast<double>(n));
  if (combos > 1e7)
    throw DegenerateInput("brute force refused: (m+1)^n = " +
                          std::to_string(combos) + " exceeds 1e7");

  // choice[j] in [0, m]; m means unassigned.
  std::vector<std::size_t> choice(n, m);
  std::vector<int> current(n, kUnassigned);
  Assignment best = Assignment::empty(n);
  best.objective = 0;
  std::uint64_t visited = 0;
  for (;;) {
    ++visited;
    std::vector<std::int64_t> load(m, 0);
    bool ok = true;
    double obj = 0;
    for (std::size_t j = 0; j < n && ok; ++j) {
      if (choice[j] == m) continue;
      const std::size_t i = choice[j];
      if (!p.feasible(i, j)) { ok = false; break; }
      load[i] += p.weights(i, j);
      if (load[i] > p.capacities[i]) ok = false;
      obj += p.values(i, j);
    }
    if (ok && obj > best.objective) {
      for (std::size_t j = 0; j < n; ++j)
        current[j] = choice[j] == m ? kUnassigned : static_cast<int>(choice[j]);
      best.agent_of = current;
      best.objective = obj;
    }
    std::size_t pos = 0;
    while (pos < n) {
      choice[pos] = choice[pos] == m ? 0 : choice[pos] + 1;
      if (choice[pos] != m) break;
      ++pos;
    }
    // Carry past the last digit: back at the all-unassigned map.
    if (pos == n) break;
  }
  best.objective = objective_of(p, best.agent_of);
  best.proven_optimal = true;
  best.nodes_explored = visited;
  return best;
}

/// Pairs in non-increasing v/w order (ties: higher v, then task, then agent
/// index); each task goes to the first pair whose agent still has room.
inline Assignment greedy_construct(const GapProblem& p) {
  const std::size_t m = p.num_agents(), n = p.num_tasks();
  struct Pair {
    double ratio, value;
    std::size_t agent, task;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p.usable(i, j))
        pairs.push_back({p.values(i, j) / static_cast<double>(p.weights(i, j)),
                         p.values(i, j), i, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    if (a.value != b.value) return a.value > b.value;
    if (a.task != b.task) return a.task < b.task;
    return a.agent < b.agent;
  });
  Assignment out = Assignment::empty(n);
  std::vector<std::int64_t> remaining = p.capacities;
  for (const Pair& x : pairs) {
    if (out.agent_of[x.task] != kUnassigned) continue;
    const std::int64_t w = p.weights(x.agent, x.task);
    if (w > remaining[x.agent]) continue;
    remaining[x.agent] -= w;
    out.agent_of[x.task] = static_cast<int>(x.agent);
  }
  out.objective = objective_of(p, out.agent_of);
  return out;
}

namespace detail {

inline bool improves(double delta, double objective) {
  return delta > 1e-12 * std::max(1.0, std::abs(objective));
}

}  // namespace detail

/// Best-improvement descent over three move types:
///   insert  an unassigned task into an agent with room
///   shift   an assigned task to another agent
///   swap    two tasks held by different agents, where "unassigned" counts
///           as an agent of unlimited capacity (so a swap can also replace
///           an assigned task by an unassigned one)
/// One neighbourhood pass costs one budget unit.
inline Assignment local_search_improve(const GapProblem& p, const Assignment& start,
                                       WorkMeter& meter) {
  const std::size_t m = p.num_agents(), n = p.num_tasks();
  Assignment cur = start;
  cur.objective = objective_of(p, cur.agent_of);
  std::vector<std::int64_t> remaining = p.capacities;
  for (std::size_t j = 0; j < n; ++j)
    if (cur.agent_of[j] != kUnassigned)
      remaining[static_cast<std::size_t>(cur.agent_of[j])] -=
          p.weights(static_cast<std::size_t>(cur.agent_of[j]), j);

  // Candidate agents per task, so the scans skip unusable pairs.
  std::vector<std::vector<std::size_t>> options(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (p.usable(i, j)) options[j].push_back(i);
  std::vector<std::size_t> movable;
  for (std::size_t j = 0; j < n; ++j)
    if (!options[j].empty() || cur.agent_of[j] != kUnassigned) movable.push_back(j);

  auto can_hold = [&](std::size_t i, std::size_t j) {
    return p.feasible(i, j) && p.values(i, j) > 0;
  };

  for (;;) {
    if (!meter.charge()) {
      cur.budget_exhausted = true;
      break;
    }
    enum class Kind { None, Move, Swap } kind = Kind::None;
    double best = 0;
    std::size_t bj = 0, bk = 0;
    int b_target = kUnassigned;

    for (std::size_t j : movable) {
      const int a = cur.agent_of[j];
      const double vj = a == kUnassigned ? 0.0 : p.values(static_cast<std::size_t>(a), j);
      // insert / shift
      for (std::size_t i : options[j]) {
        if (static_cast<int>(i) == a) continue;
        if (p.weights(i, j) > remaining[i]) continue;
        const double d = p.values(i, j) - vj;
        if (d > best && detail::improves(d, cur.objective)) {
          best = d, kind = Kind::Move, bj = j, b_target = static_cast<int>(i);
        }
      }
      if (a == kUnassigned) continue;
      const auto ai = static_cast<std::size_t>(a);
      // swap j (on a) with k (on b != a, or unassigned)
      for (std::size_t k : movable) {
        const int b = cur.agent_of[k];
        if (b == a || k == j) continue;
        if (!can_hold(ai, k)) continue;
        const std::int64_t room_a = remaining[ai] + p.weights(ai, j) - p.weights(ai, k);
        if (room_a < 0) continue;
        double d;
        if (b == kUnassigned) {
          d = p.values(ai, k) - vj;
        } else {
          const auto bi = static_cast<std::size_t>(b);
          if (!can_hold(bi, j)) continue;
          if (remaining[bi] + p.weights(bi, k) - p.weights(bi, j) < 0) continue;
          d = p.values(ai, k) + p.values(bi, j) - vj - p.values(bi, k);
        }
        if (d > best && detail::improves(d, cur.objective)) {
          best = d, kind = Kind::Swap, bj = j, bk = k;
        }
      }
    }

    if (kind == Kind::None) break;
    if (kind == Kind::Move) {
      const int a = cur.agent_of[bj];
      if (a != kUnassigned)
        remaining[static_cast<std::size_t>(a)] += p.weights(static_cast<std::size_t>(a), bj);
      const auto t = static_cast<std::size_t>(b_target);
      remaining[t] -= p.weights(t, bj);
      cur.agent_of[bj] = b_target;
    } else {
      const int a = cur.agent_of[bj];
      const int b = cur.agent_of[bk];
      const auto ai = static_cast<std::size_t>(a);
      remaining[ai] += p.weights(ai, bj) - p.weights(ai, bk);
      if (b != kUnassigned) {
        const auto bi = static_cast<std::size_t>(b);
        remaining[bi] += p.weights(bi, bk) - p.weights(bi, bj);
      }
      cur.agent_of[bj] = b;
      cur.agent_of[bk] = a;
    }
    cur.objective += best;
  }
  cur.objective = objective_of(p, cur.agent_of);
  cur.proven_optimal = start.proven_optimal && !cur.budget_exhausted;
  cur.nodes_explored = start.nodes_explored + meter.used();
  return cur;
}

inline Assignment local_search_improve(const GapProblem& p, const Assignment& start,
                                       const SolverBudget& budget) {
  WorkMeter meter(budget);
  Assignment out = local_search_improve(p, start, meter);
  out.nodes_explored = meter.used();
  return out;
}

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const GapProblem& p, const Assignment& incumbent, WorkMeter& meter)
      : p_(p), meter_(meter), remaining_(p.capacities) {
    const std::size_t n = p.num_tasks(), m = p.num_agents();
    best_ = incumbent.agent_of;
    best_value_ = objective_of(p, best_);
    current_.assign(n, kUnassigned);

    std::vector<double> max_v(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> opts;
      for (std::size_t i = 0; i < m; ++i)
        if (p.usable(i, j)) {
          opts.push_back(i);
          max_v[j] = std::max(max_v[j], p.values(i, j));
        }
      std::stable_sort(opts.begin(), opts.end(), [&](std::size_t a, std::size_t b) {
        return p.values(a, j) > p.values(b, j);
      });
      if (!opts.empty()) {
        order_.push_back(j);
        options_.push_back(std::move(opts));
      }
    }
    // Branch on high-value tasks first.
    std::vector<std::size_t> perm(order_.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return max_v[order_[a]] > max_v[order_[b]];
    });
    std::vector<std::size_t> order;
    std::vector<std::vector<std::size_t>> options;
    for (std::size_t k : perm) {
      order.push_back(order_[k]);
      options.push_back(std::move(options_[k]));
    }
    order_ = std::move(order);
    options_ = std::move(options);

    suffix_.assign(order_.size() + 1, 0.0);
    for (std::size_t d = order_.size(); d-- > 0;)
      suffix_[d] = suffix_[d + 1] + max_v[order_[d]];
  }

  /// Capacity-relaxed bound at the root.
  double root_bound() const { return suffix_.empty() ? 0.0 : suffix_[0]; }

  Assignment run() {
    const bool complete = dfs(0, 0.0);
    Assignment out;
    out.agent_of = best_;
    out.objective = objective_of(p_, best_);
    out.proven_optimal = complete;
    out.budget_exhausted = !complete;
    out.nodes_explored = meter_.used();
    return out;
  }

 private:
  // Returns false once the budget ran out.
  bool dfs(std::size_t depth, double value) {
    if (!meter_.charge()) return false;
    if (value > best_value_ && improves(value - best_value_, best_value_)) {
      best_value_ = value;
      best_ = current_;
    }
    if (depth == order_.size()) return true;
    const double bound = value + suffix_[depth];
    if (!(bound > best_value_ && improves(bound - best_value_, best_value_)))
      return true;

    const std::size_t j = order_[depth];
    for (std::size_t i : options_[depth]) {
      const std::int64_t w = p_.weights(i, j);
      if (w > remaining_[i]) continue;
      remaining_[i] -= w;
      current_[j] = static_cast<int>(i);
      const bool ok = dfs(depth + 1, value + p_.values(i, j));
      current_[j] = kUnassigned;
      remaining_[i] += w;
      if (!ok) return false;
    }
    return dfs(depth + 1, value);
  }

  const GapProblem& p_;
  WorkMeter& meter_;
  std::vector<std::int64_t> remaining_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> options_;
  std::vector<double> suffix_;
  std::vector<int> current_;
  std::vector<int> best_;
  double best_value_ = 0;
};

}  // namespace detail

/// Root upper bound used by branch_and_bound: sum over tasks of the largest
/// usable value, ignoring capacity interaction between tasks.
inline double relaxed_upper_bound(const GapProblem& p) {
  Assignment empty = Assignment::empty(p.num_tasks());
  WorkMeter meter(SolverBudget::nodes(1));
  return detail::BranchAndBound(p, empty, meter).root_bound();
}

/// Depth-first search over tasks (highest value first), branching on each
/// usable agent by descending value and then on leaving the task unassigned.
/// Never returns worse than the incumbent.
inline Assignment branch_and_bound(const GapProblem& p, const Assignment& incumbent,
                                   WorkMeter& meter) {
  return detail::BranchAndBound(p, incumbent, meter).run();
}

inline Assignment branch_and_bound(const GapProblem& p, const Assignment& incumbent,
                                   const SolverBudget& budget) {
  WorkMeter meter(budget);
  return branch_and_bound(p, incumbent, meter);
}

/// Greedy start, local-search descent, then branch and bound seeded with the
/// local optimum, all sharing one budget.
inline Assignment solve(const GapProblem& p, const SolverBudget& budget) {
  WorkMeter meter(budget);
  Assignment greedy = greedy_construct(p);
  Assignment improved = local_search_improve(p, greedy, meter);
  if (improved.objective < greedy.objective) improved = greedy;
  Assignment out = branch_and_bound(p, improved, meter);
  if (out.objective < improved.objective) {
    improved.proven_optimal = false;
    out = improved;
  }
  out.nodes_explored = meter.used();
  out.budget_exhausted = meter.exhausted();
  return out;
}

/// LP-format listing for cross-checking with external MILP solvers.
/// Variables are x_<agent>_<task> (indices); only feasible pairs appear.
inline void write_lp(std::ostream& os, const GapProblem& p) {
  const std::size_t m = p.num_agents(), n = p.num_tasks();
  auto var = [](std::size_t i, std::size_t j) {
    return "x_" + std::to_string(i) + "_" + std::to_string(j);
  };
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  os << "\\ GAP " << m << " agents " << n << " tasks\n";
  os << "maximize\n obj:";
  bool any = false;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p.feasible(i, j)) {
        os << (any ? " + " : " ") << num(p.values(i, j)) << ' ' << var(i, j);
        any = true;
      }
  if (!any) os << " 0";
  os << "\nsubject to\n";
  for (std::size_t i = 0; i < m; ++i) {
    std::string row;
    for (std::size_t j = 0; j < n; ++j)
      if (p.feasible(i, j))
        row += (row.empty() ? " " : " + ") + std::to_string(p.weights(i, j)) + ' ' + var(i, j);
    if (!row.empty()) os << " cap_" << i << ':' << row << " <= " << p.capacities[i] << '\n';
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::string row;
    for (std::size_t i = 0; i < m; ++i)
      if (p.feasible(i, j)) row += (row.empty() ? " " : " + ") + var(i, j);
    if (!row.empty()) os << " one_" << j << ':' << row << " <= 1\n";
  }
  os << "binary\n";
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p.feasible(i, j)) os << ' ' << var(i, j) << '\n';
  os << "end\n";
}

}  // namespace rotagap

#endif  // ROTAGAP_SOLVER_HPP
