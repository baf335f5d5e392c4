#ifndef ROTAGAP_IO_HPP
#define ROTAGAP_IO_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rotagap/domain.hpp"
#include "rotagap/engine.hpp"
#include "rotagap/error.hpp"
#include "rotagap/solver.hpp"
#include "rotagap/strategies.hpp"

namespace rotagap::io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------- instance

/// {agents:[{id,capacity}], tasks:[{id, compatible:[..], weight, profit}],
///  metadata:{..}}. weight/profit are a plain integer when identical on all
/// compatible agents, else an object keyed by agent id.
inline ordered_json to_json(const Instance& inst) {
  ordered_json j;
  j["agents"] = ordered_json::array();
  for (const auto& a : inst.agents())
    j["agents"].push_back({{"id", a.id}, {"capacity", a.capacity}});
  j["tasks"] = ordered_json::array();
  auto per_agent = [](const std::map<std::string, std::int64_t>& m) -> ordered_json {
    bool same = !m.empty();
    for (const auto& [k, v] : m) same &= v == m.begin()->second;
    if (same) return m.begin()->second;
    ordered_json o = ordered_json::object();
    for (const auto& [k, v] : m) o[k] = v;
    return o;
  };
  for (const auto& t : inst.tasks()) {
    ordered_json tj;
    tj["id"] = t.id;
    // Compatible agents in instance order.
    ordered_json compat = ordered_json::array();
    for (const auto& a : inst.agents())
      if (t.compatible.count(a.id)) compat.push_back(a.id);
    for (const auto& a : t.compatible)
      if (!inst.agent_index(a)) compat.push_back(a);
    tj["compatible"] = compat;
    tj["weight"] = per_agent(t.weights);
    tj["profit"] = per_agent(t.profits);
    j["tasks"].push_back(tj);
  }
  j["metadata"] = ordered_json::object();
  for (const auto& [k, v] : inst.metadata()) j["metadata"][k] = v;
  return j;
}

inline Instance instance_from_json(const json& j) {
  try {
    std::vector<AgentSpec> agents;
    for (const auto& a : j.at("agents"))
      agents.push_back({a.at("id").get<std::string>(), a.at("capacity").get<std::int64_t>()});
    std::vector<TaskSpec> tasks;
    for (const auto& tj : j.at("tasks")) {
      TaskSpec t;
      t.id = tj.at("id").get<std::string>();
      for (const auto& a : tj.at("compatible")) t.compatible.insert(a.get<std::string>());
      auto fill = [&](const json& v, std::map<std::string, std::int64_t>& out) {
        if (v.is_object()) {
          for (auto it = v.begin(); it != v.end(); ++it)
            out[it.key()] = it.value().get<std::int64_t>();
        } else {
          for (const auto& a : t.compatible) out[a] = v.get<std::int64_t>();
        }
      };
      fill(tj.at("weight"), t.weights);
      fill(tj.at("profit"), t.profits);
      tasks.push_back(std::move(t));
    }
    Metadata meta;
    if (j.contains("metadata"))
      for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
        meta[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                : it.value().dump();
    return Instance(std::move(agents), std::move(tasks), std::move(meta));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance file: ") + e.what());
  }
}

// ------------------------------------------------------------------- trace

/// {seed, cycles:[{cycle, agents:[..], tasks:[..]}]}
inline ordered_json to_json(const ScenarioTrace& trace) {
  ordered_json j;
  j["seed"] = trace.seed;
  j["cycles"] = ordered_json::array();
  for (std::size_t k = 0; k < trace.cycles.size(); ++k)
    j["cycles"].push_back({{"cycle", k + 1},
                           {"agents", trace.cycles[k].agents},
                           {"tasks", trace.cycles[k].tasks}});
  return j;
}

inline ScenarioTrace trace_from_json(const json& j) {
  try {
    ScenarioTrace t;
    t.seed = j.value("seed", std::uint64_t{0});
    std::size_t expect = 1;
    for (const auto& c : j.at("cycles")) {
      if (c.at("cycle").get<std::size_t>() != expect)
        throw ConfigError("trace cycles must be numbered 1..K in order");
      ++expect;
      t.cycles.push_back({c.at("agents").get<std::vector<std::string>>(),
                          c.at("tasks").get<std::vector<std::string>>()});
    }
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed trace file: ") + e.what());
  }
}

// --------------------------------------------------------- strategy/budget

inline ordered_json to_json(const StrategyConfig& s) {
  ordered_json j;
  j["kind"] = kind_name(s.kind);
  if (s.gamma) j["gamma"] = *s.gamma;
  if (s.kind == StrategyKind::PC) {
    j["alpha"] = s.alpha;
    j["beta"] = s.beta;
  }
  return j;
}

inline StrategyConfig strategy_from_json(const json& j) {
  if (j.is_string()) return parse_strategy(j.get<std::string>());
  try {
    StrategyConfig s;
    s.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("gamma")) s.gamma = j["gamma"].get<double>();
    s.alpha = j.value("alpha", 1.0);
    s.beta = j.value("beta", 1.0);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed strategy: ") + e.what());
  }
}

/// "nodes:<n>" or "seconds:<s>".
inline SolverBudget parse_budget(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("budget must be nodes:<n> or seconds:<s>");
  const std::string mode = s.substr(0, colon), val = s.substr(colon + 1);
  try {
    std::size_t used = 0;
    SolverBudget b;
    if (mode == "nodes") {
      if (!val.empty() && val[0] == '-') throw ConfigError("negative node budget");
      b = SolverBudget::nodes(std::stoull(val, &used));
    } else if (mode == "seconds") {
      b = SolverBudget::seconds(std::stod(val, &used));
    } else {
      throw ConfigError("unknown budget mode '" + mode + "'");
    }
    if (used != val.size()) throw ConfigError("invalid budget value '" + val + "'");
    b.validate();
    return b;
  } catch (const std::logic_error&) {
    throw ConfigError("invalid budget value '" + val + "'");
  }
}

inline std::string budget_label(const SolverBudget& b) {
  if (b.mode == SolverBudget::Mode::NodeLimit) return "nodes:" + std::to_string(b.node_limit);
  char buf[48];
  std::snprintf(buf, sizeof buf, "seconds:%g", b.wall_clock_seconds);
  return buf;
}

inline std::string budget_mode_name(const SolverBudget& b) {
  return b.mode == SolverBudget::Mode::NodeLimit ? "node_limit" : "wall_clock";
}

// ------------------------------------------------------------------ report

inline ordered_json to_json(const CycleReport& c) {
  ordered_json j;
  j["cycle"] = c.cycle;
  j["profit"] = c.profit;
  j["objective"] = c.objective;
  j["max_ap"] = c.max_ap ? ordered_json(*c.max_ap) : ordered_json(nullptr);
  j["max_ap_after"] = c.max_ap_after ? ordered_json(*c.max_ap_after) : ordered_json(nullptr);
  j["assigned_count"] = c.assigned_count;
  j["budget_exhausted"] = c.budget_exhausted;
  j["proven_optimal"] = c.proven_optimal;
  j["nodes"] = c.nodes;
  return j;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

inline ordered_json to_json(const Provenance& p) {
  ordered_json j;
  j["instance_digest"] = hex64(p.instance_digest);
  j["trace_digest"] = hex64(p.trace_digest);
  j["seed"] = p.seed;
  j["priority_seed"] = p.priority_seed ? ordered_json(*p.priority_seed) : ordered_json(nullptr);
  return j;
}

/// Full report; per-cycle wall-clock quantities are omitted so node-limited
/// runs serialize identically.
inline ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["strategy"] = to_json(r.strategy);
  j["label"] = strategy_label(r.strategy);
  j["provenance"] = to_json(r.provenance);
  j["total_profit"] = r.total_profit;
  j["full_rotations"] = r.full_rotations;
  j["avg_rotations_per_task"] = r.avg_rotations_per_task;
  j["cycles"] = r.per_cycle.size();
  j["per_cycle"] = ordered_json::array();
  for (const auto& c : r.per_cycle) j["per_cycle"].push_back(to_json(c));
  j["final_counts"] = ordered_json::array();
  for (std::size_t i = 0; i < r.final_counts.rows(); ++i) {
    auto row = r.final_counts.row(i);
    j["final_counts"].push_back(std::vector<std::int64_t>(row.begin(), row.end()));
  }
  return j;
}

// ------------------------------------------------------------------- files

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

/// Writes through a temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline void save_instance(const std::filesystem::path& p, const Instance& inst) {
  write_file_atomic(p, dump(to_json(inst)));
}
inline Instance load_instance(const std::filesystem::path& p) {
  return instance_from_json(read_json_file(p));
}
inline void save_trace(const std::filesystem::path& p, const ScenarioTrace& t) {
  write_file_atomic(p, dump(to_json(t)));
}
inline ScenarioTrace load_trace(const std::filesystem::path& p) {
  return trace_from_json(read_json_file(p));
}

}  // namespace rotagap::io

#endif  // ROTAGAP_IO_HPP
