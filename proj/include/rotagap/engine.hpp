#ifndef ROTAGAP_ENGINE_HPP
#define ROTAGAP_ENGINE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rotagap/affinity.hpp"
#include "rotagap/assignment.hpp"
#include "rotagap/domain.hpp"
#include "rotagap/error.hpp"
#include "rotagap/matrix.hpp"
#include "rotagap/rng.hpp"
#include "rotagap/solver.hpp"
#include "rotagap/strategies.hpp"

namespace rotagap {

/// Profits in effect at a given (1-based) cycle.
using ProfitSchedule = std::function<Matrix<std::int64_t>(std::size_t cycle)>;

struct CycleReport {
  std::int64_t cycle = 0;
  std::int64_t profit = 0;             // raw profit of the chosen pairs
  double objective = 0;                // strategy-value objective
  std::optional<double> max_ap;        // before the assignment
  std::optional<double> max_ap_after;  // after the affinity update
  std::int64_t assigned_count = 0;
  bool budget_exhausted = false;
  bool proven_optimal = false;
  std::uint64_t nodes = 0;

  bool operator==(const CycleReport&) const = default;
};

/// Identifies the instance, trace and priority stream a run consumed.
struct Provenance {
  std::uint64_t instance_digest = 0;
  std::uint64_t trace_digest = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> priority_seed;

  bool operator==(const Provenance&) const = default;
};

struct RunReport {
  StrategyConfig strategy;
  std::int64_t total_profit = 0;
  std::int64_t full_rotations = 0;
  double avg_rotations_per_task = 0;
  std::vector<CycleReport> per_cycle;
  Matrix<std::int64_t> final_counts;
  Provenance provenance;
};

struct CycleResult {
  Assignment assignment;
  AffinityState state;
  CycleReport report;
};

namespace detail {

struct Digest {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  void add(std::uint64_t x) { h = mix64(h ^ x); }
  void add(const std::string& s) { add(fnv1a64(s)), add(s.size()); }
};

}  // namespace detail

inline std::uint64_t fingerprint(const Instance& inst) {
  detail::Digest d;
  d.add(inst.num_agents());
  for (const auto& a : inst.agents()) {
    d.add(a.id);
    d.add(static_cast<std::uint64_t>(a.capacity));
  }
  d.add(inst.num_tasks());
  for (const auto& t : inst.tasks()) {
    d.add(t.id);
    for (const auto& a : t.compatible) {
      d.add(a);
      auto p = t.profits.find(a);
      auto w = t.weights.find(a);
      d.add(static_cast<std::uint64_t>(p == t.profits.end() ? -1 : p->second));
      d.add(static_cast<std::uint64_t>(w == t.weights.end() ? -1 : w->second));
    }
  }
  return d.h;
}

inline std::uint64_t fingerprint(const ScenarioTrace& trace) {
  detail::Digest d;
  d.add(trace.seed);
  d.add(trace.cycles.size());
  for (const auto& c : trace.cycles) {
    d.add(c.agents.size());
    for (const auto& a : c.agents) d.add(a);
    d.add(c.tasks.size());
    for (const auto& t : c.tasks) d.add(t);
  }
  return d.h;
}

/// One cycle: max AP, strategy values, GAP solve, affinity update.
inline CycleResult run_cycle(const Instance& inst, const Matrix<std::int64_t>& profits,
                             const Availability& av, const AffinityState& state,
                             const StrategyConfig& strategy, const SolverBudget& budget) {
  if (std::none_of(av.agents.begin(), av.agents.end(), [](auto x) { return x != 0; }) ||
      std::none_of(av.tasks.begin(), av.tasks.end(), [](auto x) { return x != 0; }))
    throw ConfigError("cycle has no available agents or tasks");

  CycleResult r;
  r.report.cycle = state.cycle;
  r.report.max_ap = max_affinity_pressure(inst, state, av);

  const ValueMatrix values = compute_values(strategy, inst, profits, state, av);
  const GapProblem problem = make_gap_problem(inst, values, av);
  r.assignment = solve(problem, budget);

  for (auto [i, j] : r.assignment.pairs()) r.report.profit += profits(i, j);
  r.report.objective = r.assignment.objective;
  r.report.assigned_count = static_cast<std::int64_t>(r.assignment.assigned_count());
  r.report.budget_exhausted = r.assignment.budget_exhausted;
  r.report.proven_optimal = r.assignment.proven_optimal;
  r.report.nodes = r.assignment.nodes_explored;

  r.state = update_affinities(inst, state, av, r.assignment);
  r.report.max_ap_after = max_affinity_pressure(inst, r.state, av);
  return r;
}

inline CycleResult run_cycle(const Instance& inst, const CycleAvailability& entry,
                             const AffinityState& state, const StrategyConfig& strategy,
                             const SolverBudget& budget) {
  return run_cycle(inst, inst.profits(), resolve(inst, entry), state, strategy, budget);
}

struct RotationMetrics {
  std::int64_t full_rotations = 0;
  double avg_rotations_per_task = 0;
};

/// Per task, rotations = min assignment count over its compatible agents.
/// Full rotations is the min over tasks, the average their mean.
inline RotationMetrics rotation_metrics(const Matrix<std::int64_t>& counts,
                                        const Matrix<std::uint8_t>& compatibility) {
  RotationMetrics out;
  const std::size_t n = counts.cols();
  if (n == 0) return out;
  std::int64_t full = std::numeric_limits<std::int64_t>::max();
  double sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::int64_t r = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < counts.rows(); ++i)
      if (compatibility(i, j)) r = std::min(r, counts(i, j));
    if (r == std::numeric_limits<std::int64_t>::max()) r = 0;
    full = std::min(full, r);
    sum += static_cast<double>(r);
  }
  out.full_rotations = full;
  out.avg_rotations_per_task = sum / static_cast<double>(n);
  return out;
}

/// Runs every cycle of the trace with a fixed strategy, starting from fresh
/// affinities. `schedule` overrides the instance profits per cycle.
inline RunReport run_scenario(const Instance& inst, const ScenarioTrace& trace,
                              const StrategyConfig& strategy, const SolverBudget& budget,
                              const ProfitSchedule& schedule = {},
                              std::optional<std::uint64_t> priority_seed = std::nullopt,
                              const std::function<void(const CycleReport&)>& on_cycle = {}) {
  strategy.validate();
  budget.validate();
  if (auto v = validate_instance(inst); !v.empty())
    throw ConfigError("invalid instance: " + v.front());
  if (auto v = validate_trace(inst, trace); !v.empty())
    throw ConfigError("invalid trace: " + v.front());

  const StrategyConfig fixed = strategy;
  RunReport report;
  report.strategy = fixed;
  report.provenance = {fingerprint(inst), fingerprint(trace), trace.seed, priority_seed};

  AffinityState state = init_affinities(inst);
  for (std::size_t k = 0; k < trace.num_cycles(); ++k) {
    const Availability av = resolve(inst, trace.cycles[k]);
    CycleResult r = schedule ? run_cycle(inst, schedule(k + 1), av, state, fixed, budget)
                             : run_cycle(inst, inst.profits(), av, state, fixed, budget);
    report.total_profit += r.report.profit;
    if (on_cycle) on_cycle(r.report);
    report.per_cycle.push_back(r.report);
    state = std::move(r.state);
  }
  report.final_counts = state.assignment_counts;
  const RotationMetrics rm = rotation_metrics(report.final_counts, inst.compatibility());
  report.full_rotations = rm.full_rotations;
  report.avg_rotations_per_task = rm.avg_rotations_per_task;
  return report;
}

/// Profit of `run` as a percentage of the FOP baseline on the same data.
inline double compare_to_baseline(const RunReport& run, const RunReport& baseline) {
  if (!(run.provenance == baseline.provenance))
    throw ProvenanceMismatch("runs were not produced from the same instance and trace");
  if (baseline.total_profit == 0)
    throw DegenerateInput("baseline profit is zero");
  return 100.0 * static_cast<double>(run.total_profit) /
         static_cast<double>(baseline.total_profit);
}

}  // namespace rotagap

#endif  // ROTAGAP_ENGINE_HPP
