#ifndef ROTAGAP_EXPERIMENT_HPP
#define ROTAGAP_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "rotagap/domain.hpp"
#include "rotagap/engine.hpp"
#include "rotagap/error.hpp"
#include "rotagap/io.hpp"
#include "rotagap/rng.hpp"
#include "rotagap/scenarios.hpp"
#include "rotagap/strategies.hpp"

namespace rotagap {

namespace fs = std::filesystem;
using io::json;
using io::ordered_json;

/// Everything a `run` needs. All fields except output_dir and jobs (which
/// only place and schedule the work) are embedded into every output file.
struct ExperimentConfig {
  std::string scenario = "mcmkp";  // mcmkp | tcsa | file
  McmkpParams mcmkp;
  TcsaParams tcsa;
  std::string instance_path;  // scenario "file"
  std::string trace_path;
  std::vector<StrategyConfig> strategies;
  SolverBudget budget = SolverBudget::nodes(100000);
  std::optional<int> cycles;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  int jobs = 1;
  bool static_priorities = false;

  /// Checks fields and appends the FOP baseline when missing.
  void resolve() {
    if (scenario != "mcmkp" && scenario != "tcsa" && scenario != "file")
      throw ConfigError("unknown scenario '" + scenario + "'");
    if (scenario == "mcmkp") mcmkp.validate();
    if (scenario == "tcsa") tcsa.validate();
    if (scenario == "file" && (instance_path.empty() || trace_path.empty()))
      throw ConfigError("scenario file needs an instance and a trace path");
    for (const auto& s : strategies) s.validate();
    budget.validate();
    if (cycles && *cycles < 1) throw ConfigError("cycles must be >= 1");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (std::none_of(strategies.begin(), strategies.end(),
                     [](const StrategyConfig& s) { return s.kind == StrategyKind::FOP; }))
      strategies.push_back(StrategyConfig::fop());
  }
};

inline ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["scenario"] = c.scenario;
  if (c.scenario == "mcmkp") {
    j["params"] = {{"agents", c.mcmkp.agents},
                   {"tasks", c.mcmkp.tasks},
                   {"correlation", correlation_name(c.mcmkp.correlation)},
                   {"agent_availability", c.mcmkp.agent_availability},
                   {"task_availability", c.mcmkp.task_availability}};
  } else if (c.scenario == "tcsa") {
    const TcsaParams& t = c.tcsa;
    j["params"] = {{"agents", t.agents},
                   {"tasks", t.tasks},
                   {"capacity_minutes", t.capacity_minutes},
                   {"compat_fraction", t.compat_fraction},
                   {"runtime_min", t.runtime_min},
                   {"runtime_max", t.runtime_max},
                   {"agent_unavail_fraction", t.agent_unavail_fraction},
                   {"task_unavail_fraction", t.task_unavail_fraction},
                   {"unavail_duration_min", t.unavail_duration_min},
                   {"unavail_duration_max", t.unavail_duration_max},
                   {"cycles", t.cycles},
                   {"static_priorities", c.static_priorities}};
  } else {
    j["params"] = {{"instance", c.instance_path}, {"trace", c.trace_path}};
  }
  j["strategies"] = ordered_json::array();
  for (const auto& s : c.strategies) j["strategies"].push_back(io::to_json(s));
  j["budget"] = io::budget_label(c.budget);
  j["cycles"] = c.cycles ? ordered_json(*c.cycles) : ordered_json(nullptr);
  j["seeds"] = c.seeds;
  return j;
}

inline ExperimentConfig experiment_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.scenario = j.value("scenario", std::string("mcmkp"));
    const json params = j.value("params", json::object());
    if (c.scenario == "mcmkp") {
      c.mcmkp.agents = params.value("agents", c.mcmkp.agents);
      c.mcmkp.tasks = params.value("tasks", c.mcmkp.tasks);
      c.mcmkp.correlation =
          parse_correlation(params.value("correlation", std::string("uncorrelated")));
      c.mcmkp.agent_availability = params.value("agent_availability", 1.0);
      c.mcmkp.task_availability = params.value("task_availability", 1.0);
    } else if (c.scenario == "tcsa") {
      TcsaParams& t = c.tcsa;
      t.agents = params.value("agents", t.agents);
      t.tasks = params.value("tasks", t.tasks);
      t.capacity_minutes = params.value("capacity_minutes", t.capacity_minutes);
      t.compat_fraction = params.value("compat_fraction", t.compat_fraction);
      t.runtime_min = params.value("runtime_min", t.runtime_min);
      t.runtime_max = params.value("runtime_max", t.runtime_max);
      t.agent_unavail_fraction = params.value("agent_unavail_fraction", t.agent_unavail_fraction);
      t.task_unavail_fraction = params.value("task_unavail_fraction", t.task_unavail_fraction);
      t.unavail_duration_min = params.value("unavail_duration_min", t.unavail_duration_min);
      t.unavail_duration_max = params.value("unavail_duration_max", t.unavail_duration_max);
      t.cycles = params.value("cycles", t.cycles);
      c.static_priorities = params.value("static_priorities", false);
    } else if (c.scenario == "file") {
      c.instance_path = params.value("instance", std::string());
      c.trace_path = params.value("trace", std::string());
    }
    if (j.contains("strategies"))
      for (const auto& s : j["strategies"]) c.strategies.push_back(io::strategy_from_json(s));
    if (j.contains("budget")) c.budget = io::parse_budget(j["budget"].get<std::string>());
    if (j.contains("cycles") && !j["cycles"].is_null()) c.cycles = j["cycles"].get<int>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", 1);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

inline std::string scenario_label(const ExperimentConfig& c) {
  auto pct = [](double p) { return std::to_string(static_cast<int>(std::lround(p * 100))); };
  if (c.scenario == "mcmkp")
    return "mcmkp-" + std::to_string(c.mcmkp.agents) + "x" + std::to_string(c.mcmkp.tasks) +
           (c.mcmkp.correlation == Correlation::Uncorrelated ? "-unc" : "-wc") + "-a" +
           pct(c.mcmkp.agent_availability) + "-t" + pct(c.mcmkp.task_availability);
  if (c.scenario == "tcsa")
    return "tcsa-" + std::to_string(c.tcsa.agents) + "x" + std::to_string(c.tcsa.tasks);
  return "file-" + fs::path(c.instance_path).stem().string();
}

/// Instance, trace and priority stream for one seed.
struct ScenarioData {
  Instance instance;
  ScenarioTrace trace;
  std::optional<std::uint64_t> priority_seed;
};

inline ScenarioData build_scenario(const ExperimentConfig& c, std::uint64_t seed) {
  ScenarioData d;
  if (c.scenario == "mcmkp") {
    McmkpParams p = c.mcmkp;
    p.seed = seed;
    d.instance = generate_mcmkp(p);
    const std::size_t cycles =
        c.cycles ? static_cast<std::size_t>(*c.cycles) : default_mcmkp_cycles(d.instance);
    d.trace = generate_trace_bernoulli(d.instance, cycles, p.agent_availability,
                                       p.task_availability, hash64(seed, "trace"));
  } else if (c.scenario == "tcsa") {
    TcsaParams p = c.tcsa;
    p.seed = seed;
    if (c.cycles) p.cycles = *c.cycles;
    d.instance = generate_tcsa(p);
    d.trace = generate_trace_episodic(d.instance, p);
    if (!c.static_priorities) d.priority_seed = hash64(seed, "priorities");
  } else {
    d.instance = io::load_instance(c.instance_path);
    d.trace = io::load_trace(c.trace_path);
    if (c.cycles && static_cast<std::size_t>(*c.cycles) < d.trace.cycles.size())
      d.trace.cycles.resize(static_cast<std::size_t>(*c.cycles));
  }
  if (auto v = validate_instance(d.instance); !v.empty())
    throw ConfigError("invalid instance: " + v.front());
  if (auto v = validate_trace(d.instance, d.trace); !v.empty())
    throw ConfigError("invalid trace: " + v.front());
  return d;
}

inline ProfitSchedule profit_schedule(const ScenarioData& d) {
  if (!d.priority_seed) return {};
  const Instance* inst = &d.instance;
  const std::uint64_t seed = *d.priority_seed;
  return [inst, seed](std::size_t cycle) { return tcsa_cycle_profits(*inst, seed, cycle); };
}

inline std::string content_checksum(const std::string& bytes) {
  return io::hex64(hash64(fnv1a64(bytes), "content", bytes.size()));
}

inline std::string file_safe(std::string s) {
  for (char& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_'))
      ch = '-';
  return s;
}

// ---------------------------------------------------------------- generate

struct GeneratedFiles {
  fs::path instance, trace;
  std::string instance_checksum, trace_checksum;
};

/// Writes instance.json and trace.json per seed (in seed-<s>/ when several).
inline std::vector<GeneratedFiles> cmd_generate(ExperimentConfig c, std::ostream& log) {
  c.resolve();
  std::vector<GeneratedFiles> out;
  for (std::uint64_t seed : c.seeds) {
    ScenarioData d = build_scenario(c, seed);
    fs::path dir = c.output_dir;
    if (c.seeds.size() > 1) dir /= "seed-" + std::to_string(seed);
    GeneratedFiles g{dir / "instance.json", dir / "trace.json", {}, {}};
    const std::string inst = io::dump(io::to_json(d.instance));
    const std::string trace = io::dump(io::to_json(d.trace));
    io::write_file_atomic(g.instance, inst);
    io::write_file_atomic(g.trace, trace);
    g.instance_checksum = content_checksum(inst);
    g.trace_checksum = content_checksum(trace);
    log << g.instance_checksum << "  " << g.instance.string() << "\n"
        << g.trace_checksum << "  " << g.trace.string() << "\n";
    out.push_back(std::move(g));
  }
  return out;
}

// --------------------------------------------------------------------- run

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "scenario",       "strategy",           "seed",
      "total_profit",   "profit_pct_of_fop",  "full_rotations",
      "avg_rotations_per_task", "cycles",     "budget_mode"};
  return cols;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\n";
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
        else quoted = false;
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field)), field.clear(), any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear(), field.clear(), any = false;
    } else {
      field += ch, any = true;
    }
  }
  if (quoted) throw SchemaError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace detail

struct RunOutcome {
  std::uint64_t seed = 0;
  StrategyConfig strategy;
  std::optional<RunReport> report;
  std::string error;
  fs::path report_path, events_path;
};

struct RunResult {
  std::vector<RunOutcome> runs;
  fs::path summary_path;
  bool ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.report.has_value(); });
  }
};

/// Runs every (seed, strategy) pair of the grid, writing one JSON report and
/// one JSON-lines event stream per run plus summary.csv. Failed runs are
/// recorded and the rest are still written.
inline RunResult cmd_run(ExperimentConfig c, std::ostream& log) {
  c.resolve();
  const fs::path out = c.output_dir;
  const ordered_json config_json = to_json(c);
  const std::string scenario = scenario_label(c);
  io::write_file_atomic(out / "experiment.json", io::dump(config_json));

  std::vector<ScenarioData> data;
  data.reserve(c.seeds.size());
  for (std::uint64_t seed : c.seeds) data.push_back(build_scenario(c, seed));

  RunResult result;
  for (std::size_t s = 0; s < c.seeds.size(); ++s)
    for (const auto& strat : c.strategies) {
      RunOutcome r;
      r.seed = c.seeds[s];
      r.strategy = strat;
      const std::string stem = file_safe(scenario + "__" + strategy_label(strat) + "__seed" +
                                         std::to_string(r.seed));
      r.report_path = out / "runs" / (stem + ".json");
      r.events_path = out / "runs" / (stem + ".jsonl");
      result.runs.push_back(std::move(r));
    }

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= result.runs.size()) return;
      RunOutcome& r = result.runs[idx];
      const ScenarioData& d =
          data[static_cast<std::size_t>(std::find(c.seeds.begin(), c.seeds.end(), r.seed) -
                                        c.seeds.begin())];
      std::string events;
      ordered_json head{{"event", "config"}, {"config", config_json},
                        {"scenario", scenario}, {"seed", r.seed},
                        {"strategy", strategy_label(r.strategy)}};
      events += head.dump() + "\n";
      try {
        RunReport rep = run_scenario(
            d.instance, d.trace, r.strategy, c.budget, profit_schedule(d), d.priority_seed,
            [&](const CycleReport& cr) {
              ordered_json e = io::to_json(cr);
              e["event"] = "cycle";
              events += e.dump() + "\n";
            });
        ordered_json tail{{"event", "summary"},
                          {"total_profit", rep.total_profit},
                          {"full_rotations", rep.full_rotations},
                          {"avg_rotations_per_task", rep.avg_rotations_per_task}};
        events += tail.dump() + "\n";
        ordered_json doc;
        doc["config"] = config_json;
        doc["scenario"] = scenario;
        doc["seed"] = r.seed;
        doc["report"] = io::to_json(rep);
        io::write_file_atomic(r.report_path, io::dump(doc));
        io::write_file_atomic(r.events_path, events);
        r.report = std::move(rep);
        std::lock_guard lock(log_mutex);
        log << scenario << " seed " << r.seed << " " << strategy_label(r.strategy)
            << ": profit " << r.report->total_profit << ", full rotations "
            << r.report->full_rotations << ", avg rotations "
            << detail::fixed6(r.report->avg_rotations_per_task) << "\n";
      } catch (const std::exception& e) {
        r.error = e.what();
        std::lock_guard lock(log_mutex);
        log << scenario << " seed " << r.seed << " " << strategy_label(r.strategy)
            << ": FAILED: " << e.what() << "\n";
      }
    }
  };
  const int threads = std::min<int>(c.jobs, static_cast<int>(result.runs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::string csv = detail::csv_row(summary_columns());
  for (const RunOutcome& r : result.runs) {
    if (!r.report) continue;
    std::string pct;
    for (const RunOutcome& b : result.runs)
      if (b.seed == r.seed && b.strategy.kind == StrategyKind::FOP && b.report &&
          b.report->total_profit != 0) {
        pct = detail::fixed6(compare_to_baseline(*r.report, *b.report));
        break;
      }
    csv += detail::csv_row({scenario, strategy_label(r.strategy), std::to_string(r.seed),
                            std::to_string(r.report->total_profit), pct,
                            std::to_string(r.report->full_rotations),
                            detail::fixed6(r.report->avg_rotations_per_task),
                            std::to_string(r.report->per_cycle.size()),
                            io::budget_mode_name(c.budget)});
  }
  result.summary_path = out / "summary.csv";
  io::write_file_atomic(result.summary_path, csv);
  return result;
}

// ------------------------------------------------------------------ report

struct SummaryRow {
  std::string scenario, strategy;
  std::uint64_t seed = 0;
  std::int64_t total_profit = 0;
  std::int64_t full_rotations = 0;
  double avg_rotations = 0;
};

inline std::vector<SummaryRow> read_summary(const std::string& text, const std::string& name) {
  auto rows = detail::parse_csv(text);
  if (rows.empty() || rows[0] != summary_columns())
    throw SchemaError(name + ": header does not match the summary schema");
  std::vector<SummaryRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != summary_columns().size())
      throw SchemaError(name + ": row " + std::to_string(r + 1) + " has " +
                        std::to_string(f.size()) + " fields");
    try {
      std::size_t used = 0;
      SummaryRow s;
      s.scenario = f[0];
      s.strategy = f[1];
      s.seed = std::stoull(f[2], &used);
      s.total_profit = std::stoll(f[3]);
      s.full_rotations = std::stoll(f[5]);
      s.avg_rotations = std::stod(f[6]);
      out.push_back(std::move(s));
    } catch (const std::logic_error&) {
      throw SchemaError(name + ": row " + std::to_string(r + 1) + " has a malformed number");
    }
  }
  return out;
}

struct ReportTables {
  std::string rotation_csv, profit_csv, long_csv, text;
};

/// Rotation table (strategy x scenario, "full (avg)" averaged over seeds),
/// profit table (% of FOP, mean plus one column per seed) and a long-format
/// CSV with one row per (scenario, strategy, seed|mean, metric).
inline ReportTables build_report(const std::vector<SummaryRow>& rows) {
  if (rows.empty()) throw SchemaError("no summary rows");
  std::vector<std::string> scenarios, strategies;
  std::vector<std::uint64_t> seeds;
  auto add = [](auto& v, const auto& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  std::map<std::tuple<std::string, std::string, std::uint64_t>, const SummaryRow*> index;
  for (const auto& r : rows) {
    add(scenarios, r.scenario);
    add(strategies, r.strategy);
    add(seeds, r.seed);
    if (!index.emplace(std::tuple{r.scenario, r.strategy, r.seed}, &r).second)
      throw SchemaError("duplicate row for " + r.scenario + "/" + r.strategy + "/seed " +
                        std::to_string(r.seed));
  }
  std::sort(seeds.begin(), seeds.end());
  // FOP last, like the published tables.
  std::stable_partition(strategies.begin(), strategies.end(),
                        [](const std::string& s) { return s != "fop"; });

  for (const auto& r : rows)
    if (!index.count({r.scenario, "fop", r.seed}))
      throw SchemaError("missing fop baseline for " + r.scenario + " seed " +
                        std::to_string(r.seed));

  auto pct_of = [&](const SummaryRow& r) {
    const SummaryRow* fop = index.at({r.scenario, "fop", r.seed});
    if (fop->total_profit == 0) throw SchemaError("fop baseline profit is zero");
    return 100.0 * static_cast<double>(r.total_profit) / static_cast<double>(fop->total_profit);
  };

  ReportTables t;
  std::vector<std::string> header{"strategy"};
  for (const auto& s : scenarios) header.push_back(s);
  t.rotation_csv = detail::csv_row(header);
  std::vector<std::string> pheader{"strategy", "scenario", "mean_pct_of_fop"};
  for (auto s : seeds) pheader.push_back("seed_" + std::to_string(s));
  t.profit_csv = detail::csv_row(pheader);
  t.long_csv = detail::csv_row({"scenario", "strategy", "seed", "metric", "value"});

  std::ostringstream text;
  text << "Rotations: full (avg per task)\n";
  for (const auto& s : scenarios) text << "  " << s;
  text << "\n";
  std::ostringstream ptext;
  ptext << "Profit (% of FOP)\n";

  for (const auto& strat : strategies) {
    std::vector<std::string> rot{strat};
    text << strat;
    for (const auto& sc : scenarios) {
      double full = 0, avg = 0, pct = 0;
      int count = 0;
      std::vector<std::string> prow{strat, sc, ""};
      for (auto seed : seeds) {
        auto it = index.find({sc, strat, seed});
        if (it == index.end()) {
          prow.push_back("");
          continue;
        }
        const SummaryRow& r = *it->second;
        const double p = pct_of(r);
        full += static_cast<double>(r.full_rotations);
        avg += r.avg_rotations;
        pct += p;
        ++count;
        prow.push_back(detail::fixed6(p));
        const std::string sd = std::to_string(seed);
        t.long_csv += detail::csv_row({sc, strat, sd, "full_rotations", std::to_string(r.full_rotations)});
        t.long_csv += detail::csv_row({sc, strat, sd, "avg_rotations_per_task", detail::fixed6(r.avg_rotations)});
        t.long_csv += detail::csv_row({sc, strat, sd, "profit_pct_of_fop", detail::fixed6(p)});
      }
      if (count == 0) {
        rot.push_back("");
        text << "  -";
        continue;
      }
      full /= count, avg /= count, pct /= count;
      char cell[64];
      std::snprintf(cell, sizeof cell, "%.1f (%.1f)", full, avg);
      rot.push_back(cell);
      text << "  " << cell;
      prow[2] = detail::fixed6(pct);
      t.profit_csv += detail::csv_row(prow);
      ptext << strat << "  " << sc << "  " << detail::fixed6(pct) << "\n";
      t.long_csv += detail::csv_row({sc, strat, "mean", "full_rotations", detail::fixed6(full)});
      t.long_csv += detail::csv_row({sc, strat, "mean", "avg_rotations_per_task", detail::fixed6(avg)});
      t.long_csv += detail::csv_row({sc, strat, "mean", "profit_pct_of_fop", detail::fixed6(pct)});
    }
    text << "\n";
    t.rotation_csv += detail::csv_row(rot);
  }
  t.text = text.str() + "\n" + ptext.str();
  return t;
}

inline ReportTables cmd_report(const std::vector<fs::path>& summaries, const fs::path& out_dir,
                               std::ostream& log) {
  if (summaries.empty()) throw SchemaError("report needs at least one summary file");
  std::vector<SummaryRow> rows;
  for (const auto& p : summaries) {
    std::string text;
    try {
      text = io::read_file(p);
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
    auto part = read_summary(text, p.string());
    rows.insert(rows.end(), part.begin(), part.end());
  }
  ReportTables t = build_report(rows);
  io::write_file_atomic(out_dir / "rotation_table.csv", t.rotation_csv);
  io::write_file_atomic(out_dir / "profit_table.csv", t.profit_csv);
  io::write_file_atomic(out_dir / "report_long.csv", t.long_csv);
  log << t.text;
  return t;
}

}  // namespace rotagap

#endif  // ROTAGAP_EXPERIMENT_HPP
