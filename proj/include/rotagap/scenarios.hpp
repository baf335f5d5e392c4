#ifndef ROTAGAP_SCENARIOS_HPP
#define ROTAGAP_SCENARIOS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rotagap/domain.hpp"
#include "rotagap/error.hpp"
#include "rotagap/matrix.hpp"
#include "rotagap/rng.hpp"

namespace rotagap {

enum class Correlation { Uncorrelated, WeaklyCorrelated };

inline std::string correlation_name(Correlation c) {
  return c == Correlation::Uncorrelated ? "uncorrelated" : "weakly_correlated";
}

inline Correlation parse_correlation(const std::string& s) {
  if (s == "uncorrelated" || s == "unc") return Correlation::Uncorrelated;
  if (s == "weakly_correlated" || s == "weak" || s == "wc")
    return Correlation::WeaklyCorrelated;
  throw ConfigError("unknown correlation '" + s + "'");
}

/// Multi-cycle multiple knapsack instances. The published grid uses
/// (agents, tasks) in {(30,75), (15,45), (12,48)}; any size is accepted.
struct McmkpParams {
  int agents = 12;
  int tasks = 48;
  Correlation correlation = Correlation::Uncorrelated;
  double agent_availability = 1.0;
  double task_availability = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (agents < 1 || tasks < 1) throw ConfigError("mcmkp needs >= 1 agent and task");
    auto in_unit = [](double p) { return p > 0 && p <= 1; };
    if (!in_unit(agent_availability) || !in_unit(task_availability))
      throw ConfigError("mcmkp availabilities must lie in (0, 1]");
  }
};

/// Test case selection and assignment scenarios (runtimes in minutes).
struct TcsaParams {
  int agents = 20;
  int tasks = 750;
  std::int64_t capacity_minutes = 600;
  double compat_fraction = 0.60;
  std::int64_t runtime_min = 1;
  std::int64_t runtime_max = 21;
  double agent_unavail_fraction = 0.40;
  double task_unavail_fraction = 0.10;
  int unavail_duration_min = 3;
  int unavail_duration_max = 7;
  int cycles = 365;
  std::uint64_t seed = 0;

  void validate() const {
    if (agents < 1 || tasks < 1) throw ConfigError("tcsa needs >= 1 agent and task");
    if (capacity_minutes < 0) throw ConfigError("tcsa capacity must be >= 0");
    if (compat_fraction < 0 || compat_fraction > 1)
      throw ConfigError("tcsa compat_fraction must lie in [0, 1]");
    if (runtime_min < 1 || runtime_max < runtime_min)
      throw ConfigError("tcsa runtime range must be non-empty and >= 1");
    // An unavailable fraction of 1 has no stationary chain.
    if (agent_unavail_fraction < 0 || agent_unavail_fraction >= 1 ||
        task_unavail_fraction < 0 || task_unavail_fraction >= 1)
      throw ConfigError("tcsa unavailable fractions must lie in [0, 1)");
    if (unavail_duration_min < 1 || unavail_duration_max < unavail_duration_min)
      throw ConfigError("tcsa unavailability duration range must be non-empty");
    if (cycles < 1) throw ConfigError("tcsa needs >= 1 cycle");
  }
};

namespace detail {

inline std::string padded_id(char prefix, std::size_t index, std::size_t count) {
  const std::size_t width = std::to_string(count).size();
  std::string num = std::to_string(index + 1);
  return std::string(1, prefix) + std::string(width - num.size(), '0') + num;
}

inline std::string fmt_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Multiple-knapsack benchmark generator extended with implicit compatibility:
///   w_j ~ U[10,1000]; profits uncorrelated U[10,1000] or w_j + U[-99,99]
///   (at least 1); b_i = floor(u_i * sum(w) / m) with u_i ~ U[0.4,0.6] for
///   i < m; the last agent takes floor(sum(w)/2) - sum(b_i).
///   Task j fits agent i iff w_j <= b_i.
/// A task that fits no agent gets a fresh weight drawn from U[10,1000]
/// conditioned on fitting the largest agent; capacities are then recomputed
/// and the check repeats.
inline Instance generate_mcmkp(const McmkpParams& params) {
  params.validate();
  const auto m = static_cast<std::size_t>(params.agents);
  const auto n = static_cast<std::size_t>(params.tasks);
  Rng rng(hash64(params.seed, "mcmkp"));

  std::vector<std::int64_t> w(n), p(n);
  auto draw_task = [&](std::size_t j, std::int64_t max_w) {
    do {
      w[j] = rng.uniform_int(10, 1000);
    } while (w[j] > max_w);
    if (params.correlation == Correlation::Uncorrelated)
      p[j] = rng.uniform_int(10, 1000);
    else
      p[j] = std::max<std::int64_t>(1, w[j] + rng.uniform_int(-99, 99));
  };
  for (std::size_t j = 0; j < n; ++j) draw_task(j, 1000);
  std::vector<double> share(m > 0 ? m - 1 : 0);
  for (double& u : share) u = rng.uniform_real(0.4, 0.6);

  std::vector<std::int64_t> b(m);
  auto set_capacities = [&] {
    const std::int64_t total_w = std::accumulate(w.begin(), w.end(), std::int64_t{0});
    const std::int64_t half = total_w / 2;
    const double mean = static_cast<double>(total_w) / static_cast<double>(m);
    std::int64_t used = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      b[i] = static_cast<std::int64_t>(std::floor(share[i] * mean));
      used += b[i];
    }
    b[m - 1] = half - used;
    if (b[m - 1] < 10 && m > 1) {
      // Shrink the first m-1 so the last agent keeps roughly an even share.
      const double target = static_cast<double>(half - half / static_cast<std::int64_t>(m));
      const double scale = target / static_cast<double>(used);
      used = 0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        b[i] = static_cast<std::int64_t>(std::floor(static_cast<double>(b[i]) * scale));
        used += b[i];
      }
      b[m - 1] = half - used;
    }
  };

  constexpr int kMaxRounds = 1000;
  for (int round = 0;; ++round) {
    set_capacities();
    const std::int64_t max_b = *std::max_element(b.begin(), b.end());
    const bool all_fit = std::all_of(w.begin(), w.end(), [&](std::int64_t x) { return x <= max_b; });
    if (all_fit) break;
    if (round == kMaxRounds || max_b < 10)
      throw ScenarioError("mcmkp: could not make every task fit some agent");
    for (std::size_t j = 0; j < n; ++j)
      if (w[j] > max_b) draw_task(j, max_b);
  }

  std::vector<AgentSpec> agents(m);
  for (std::size_t i = 0; i < m; ++i) agents[i] = {detail::padded_id('A', i, m), b[i]};
  std::vector<TaskSpec> tasks(n);
  for (std::size_t j = 0; j < n; ++j) {
    TaskSpec& t = tasks[j];
    t.id = detail::padded_id('T', j, n);
    for (std::size_t i = 0; i < m; ++i)
      if (w[j] <= b[i]) {
        t.compatible.insert(agents[i].id);
        t.profits[agents[i].id] = p[j];
        t.weights[agents[i].id] = w[j];
      }
  }
  Metadata meta{{"generator", "mcmkp"},
                {"agents", std::to_string(m)},
                {"tasks", std::to_string(n)},
                {"correlation", correlation_name(params.correlation)},
                {"agent_availability", detail::fmt_real(params.agent_availability)},
                {"task_availability", detail::fmt_real(params.task_availability)},
                {"seed", std::to_string(params.seed)}};
  return Instance(std::move(agents), std::move(tasks), std::move(meta));
}

/// Test agents share one capacity; every test has one runtime on all its
/// agents, a random compatible subset of round(fraction * m) agents (at
/// least 1), and an initial priority drawn from U[10,1000].
inline Instance generate_tcsa(const TcsaParams& params) {
  params.validate();
  const auto m = static_cast<std::size_t>(params.agents);
  const auto n = static_cast<std::size_t>(params.tasks);
  Rng rng(hash64(params.seed, "tcsa"));
  const auto subset = static_cast<std::size_t>(std::max<long long>(
      1, std::llround(params.compat_fraction * static_cast<double>(m))));

  std::vector<AgentSpec> agents(m);
  for (std::size_t i = 0; i < m; ++i)
    agents[i] = {detail::padded_id('A', i, m), params.capacity_minutes};

  std::vector<std::size_t> perm(m);
  std::vector<TaskSpec> tasks(n);
  for (std::size_t j = 0; j < n; ++j) {
    TaskSpec& t = tasks[j];
    t.id = detail::padded_id('T', j, n);
    const std::int64_t runtime = rng.uniform_int(params.runtime_min, params.runtime_max);
    const std::int64_t priority = rng.uniform_int(10, 1000);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = 0; k < subset; ++k) {
      const auto r = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(k), static_cast<std::int64_t>(m - 1)));
      std::swap(perm[k], perm[r]);
      const std::string& a = agents[perm[k]].id;
      t.compatible.insert(a);
      t.profits[a] = priority;
      t.weights[a] = runtime;
    }
  }
  Metadata meta{{"generator", "tcsa"},
                {"agents", std::to_string(m)},
                {"tasks", std::to_string(n)},
                {"capacity_minutes", std::to_string(params.capacity_minutes)},
                {"compat_fraction", detail::fmt_real(params.compat_fraction)},
                {"seed", std::to_string(params.seed)}};
  return Instance(std::move(agents), std::move(tasks), std::move(meta));
}

/// Per-cycle test priorities: every task gets a fresh U[10,1000] value on all
/// its compatible agents, from a child stream keyed by task id and cycle.
inline Matrix<std::int64_t> tcsa_cycle_profits(const Instance& inst, std::uint64_t seed,
                                               std::size_t cycle) {
  Matrix<std::int64_t> out(inst.num_agents(), inst.num_tasks(), 0);
  for (std::size_t j = 0; j < inst.num_tasks(); ++j) {
    Rng rng(hash64(seed, "priority:" + inst.tasks()[j].id, cycle));
    const std::int64_t p = rng.uniform_int(10, 1000);
    for (std::size_t i = 0; i < inst.num_agents(); ++i)
      if (inst.compatible(i, j)) out(i, j) = p;
  }
  return out;
}

inline std::size_t default_mcmkp_cycles(const Instance& inst) {
  return 3 * inst.num_tasks();
}

/// Every agent and task is independently available each cycle with its
/// probability. A side that comes out empty is redrawn.
inline ScenarioTrace generate_trace_bernoulli(const Instance& inst, std::size_t cycles,
                                              double agent_p, double task_p,
                                              std::uint64_t seed) {
  if (!(agent_p > 0 && agent_p <= 1 && task_p > 0 && task_p <= 1))
    throw ConfigError("availability probabilities must lie in (0, 1]");
  if (cycles == 0) throw ConfigError("trace needs >= 1 cycle");
  Rng rng(hash64(seed, "bernoulli"));
  ScenarioTrace trace;
  trace.seed = seed;
  trace.cycles.resize(cycles);
  auto draw = [&](const auto& entities, double p, std::vector<std::string>& out) {
    do {
      out.clear();
      for (const auto& e : entities)
        if (rng.bernoulli(p)) out.push_back(e.id);
    } while (out.empty());
  };
  for (auto& c : trace.cycles) {
    draw(inst.agents(), agent_p, c.agents);
    draw(inst.tasks(), task_p, c.tasks);
  }
  return trace;
}

/// Two-state availability chain for one entity. From the available state an
/// episode starts with probability q = f / (d (1 - f)), d the mean episode
/// length; an episode lasts U{lo..hi} cycles. The stationary unavailable
/// fraction is f.
class EpisodicChain {
 public:
  EpisodicChain(double fraction, int lo, int hi, std::uint64_t seed)
      : lo_(lo), hi_(hi), rng_(seed) {
    const double mean = (lo + hi) / 2.0;
    q_ = fraction <= 0 ? 0.0 : fraction / (mean * (1.0 - fraction));
  }

  bool available() const { return remaining_ == 0; }
  int remaining() const { return remaining_; }
  void force_available() { remaining_ = 0; }

  void step() {
    if (remaining_ > 0) {
      --remaining_;
    } else if (rng_.bernoulli(q_)) {
      remaining_ = static_cast<int>(rng_.uniform_int(lo_, hi_));
    }
  }

  double entry_probability() const { return q_; }

 private:
  int lo_, hi_;
  Rng rng_;
  double q_ = 0;
  int remaining_ = 0;
};

/// Cycles simulated before the first recorded cycle so the trace starts near
/// the stationary distribution.
inline constexpr int kEpisodicBurnIn = 50;

/// Episodic unavailability for agents and tasks. If every agent (or task) is
/// unavailable at once, the one closest to returning is brought back early.
inline ScenarioTrace generate_trace_episodic(const Instance& inst, const TcsaParams& params) {
  params.validate();
  ScenarioTrace trace;
  trace.seed = params.seed;
  auto make = [&](const auto& entities, double f, const char* kind) {
    std::vector<EpisodicChain> chains;
    chains.reserve(entities.size());
    for (const auto& e : entities)
      chains.emplace_back(f, params.unavail_duration_min, params.unavail_duration_max,
                          hash64(params.seed, std::string("episodic:") + kind + ":" + e.id));
    for (auto& c : chains)
      for (int k = 0; k < kEpisodicBurnIn; ++k) c.step();
    return chains;
  };
  auto agents = make(inst.agents(), params.agent_unavail_fraction, "agent");
  auto tasks = make(inst.tasks(), params.task_unavail_fraction, "task");

  auto collect = [](auto& chains, const auto& entities, std::vector<std::string>& out) {
    out.clear();
    for (std::size_t e = 0; e < chains.size(); ++e)
      if (chains[e].available()) out.push_back(entities[e].id);
    if (out.empty()) {
      std::size_t best = 0;
      for (std::size_t e = 1; e < chains.size(); ++e)
        if (chains[e].remaining() < chains[best].remaining()) best = e;
      chains[best].force_available();
      out.push_back(entities[best].id);
    }
  };

  trace.cycles.resize(static_cast<std::size_t>(params.cycles));
  for (auto& cycle : trace.cycles) {
    collect(agents, inst.agents(), cycle.agents);
    collect(tasks, inst.tasks(), cycle.tasks);
    for (auto& c : agents) c.step();
    for (auto& c : tasks) c.step();
  }
  return trace;
}

}  // namespace rotagap

#endif  // ROTAGAP_SCENARIOS_HPP
