// rotagap: generate scenarios, run strategy grids, and tabulate results.
//
// Exit codes: 0 ok, 2 configuration error, 3 run failure, 4 report schema error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotagap/experiment.hpp"

namespace {

using namespace rotagap;

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitSchema = 4;

/// Splits "fop,foa,pc:alpha=2,beta=1,os:10..40" into strategies. Tokens of
/// the form key=value continue the preceding pc entry; os:<a>..<b>[:<step>]
/// expands to a gamma grid (default step 10).
std::vector<StrategyConfig> parse_strategy_list(const std::vector<std::string>& args) {
  std::vector<std::string> tokens;
  for (const auto& arg : args) {
    std::size_t start = 0;
    while (start <= arg.size()) {
      auto comma = arg.find(',', start);
      std::string tok = arg.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
      if (!tok.empty()) {
        const bool continues = tok.find('=') != std::string::npos &&
                               tok.find(':') == std::string::npos && !tokens.empty();
        if (continues) tokens.back() += "," + tok;
        else tokens.push_back(tok);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  std::vector<StrategyConfig> out;
  for (const auto& tok : tokens) {
    auto dots = tok.find("..");
    if (tok.rfind("os:", 0) == 0 && dots != std::string::npos) {
      const std::string range = tok.substr(3);
      const auto d = range.find("..");
      const std::string hi_part = range.substr(d + 2);
      const auto colon = hi_part.find(':');
      const double lo = detail::parse_number(range.substr(0, d), "gamma");
      const double hi = detail::parse_number(hi_part.substr(0, colon), "gamma");
      const double step = colon == std::string::npos
                              ? 10.0
                              : detail::parse_number(hi_part.substr(colon + 1), "step");
      if (!(step > 0) || hi < lo) throw ConfigError("invalid gamma range '" + tok + "'");
      for (double g = lo; g <= hi + 1e-9; g += step) out.push_back(StrategyConfig::os(g));
    } else {
      out.push_back(parse_strategy(tok));
    }
  }
  return out;
}

struct ScenarioFlags {
  std::string config_path;
  std::string scenario = "mcmkp";
  int agents = 0, tasks = 0;
  std::string correlation = "uncorrelated";
  double agent_availability = 1.0, task_availability = 1.0;
  std::int64_t capacity = 600;
  double compat_fraction = 0.60, agent_unavail = 0.40, task_unavail = 0.10;
  int cycles = 0;
  std::vector<std::uint64_t> seeds;
  std::string out = "out";
  std::string instance, trace;
  bool static_priorities = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config JSON; flags override it");
  cmd->add_option("--scenario", f.scenario, "mcmkp | tcsa | file");
  cmd->add_option("--agents", f.agents, "number of agents");
  cmd->add_option("--tasks", f.tasks, "number of tasks");
  cmd->add_option("--correlation", f.correlation, "mcmkp profits: uncorrelated | weakly_correlated");
  cmd->add_option("--agent-availability", f.agent_availability, "mcmkp per-cycle agent availability");
  cmd->add_option("--task-availability", f.task_availability, "mcmkp per-cycle task availability");
  cmd->add_option("--capacity", f.capacity, "tcsa agent capacity in minutes");
  cmd->add_option("--compat-fraction", f.compat_fraction, "tcsa fraction of compatible agents");
  cmd->add_option("--agent-unavail", f.agent_unavail, "tcsa unavailable agent fraction");
  cmd->add_option("--task-unavail", f.task_unavail, "tcsa unavailable task fraction");
  cmd->add_option("--cycles", f.cycles, "number of cycles (default: 3n for mcmkp, 365 for tcsa)");
  cmd->add_option("--seed,--seeds", f.seeds, "one or more seeds")->delimiter(',');
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--instance", f.instance, "instance file (scenario file)");
  cmd->add_option("--trace", f.trace, "trace file (scenario file)");
  cmd->add_flag("--static-priorities", f.static_priorities, "tcsa: keep priorities fixed");
}

ExperimentConfig to_config(CLI::App* cmd, const ScenarioFlags& f) {
  ExperimentConfig c;
  if (!f.config_path.empty()) c = experiment_from_json(io::read_json_file(f.config_path));
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--scenario")) c.scenario = f.scenario;
  if (given("--instance") || given("--trace")) {
    if (!given("--scenario")) c.scenario = "file";
    c.instance_path = f.instance;
    c.trace_path = f.trace;
  }
  if (given("--agents")) c.mcmkp.agents = c.tcsa.agents = f.agents;
  if (given("--tasks")) c.mcmkp.tasks = c.tcsa.tasks = f.tasks;
  if (given("--correlation")) c.mcmkp.correlation = parse_correlation(f.correlation);
  if (given("--agent-availability")) c.mcmkp.agent_availability = f.agent_availability;
  if (given("--task-availability")) c.mcmkp.task_availability = f.task_availability;
  if (given("--capacity")) c.tcsa.capacity_minutes = f.capacity;
  if (given("--compat-fraction")) c.tcsa.compat_fraction = f.compat_fraction;
  if (given("--agent-unavail")) c.tcsa.agent_unavail_fraction = f.agent_unavail;
  if (given("--task-unavail")) c.tcsa.task_unavail_fraction = f.task_unavail;
  if (given("--cycles")) c.cycles = f.cycles;
  if (given("--seed")) c.seeds = f.seeds;
  if (given("--out") || f.config_path.empty()) c.output_dir = f.out;
  if (given("--static-priorities")) c.static_priorities = f.static_priorities;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cycle assignment with rotational diversity"};
  app.require_subcommand(1);

  ScenarioFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "write instance and trace files");
  add_scenario_flags(gen, gen_flags);

  ScenarioFlags run_flags;
  std::vector<std::string> strategies;
  std::string budget = "nodes:100000";
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run strategies over generated scenarios");
  add_scenario_flags(run, run_flags);
  run->add_option("--strategies", strategies,
                  "comma list: fop, foa, wpp, pc[:alpha=a,beta=b], os:<gamma>, os:<lo>..<hi>");
  run->add_option("--budget", budget, "solver budget per cycle: nodes:<n> or seconds:<s>");
  run->add_option("--jobs", jobs, "parallel runs");

  std::vector<std::string> summaries;
  std::string report_out = ".";
  auto* report = app.add_subcommand("report", "tabulate summary CSV files");
  report->add_option("summaries", summaries, "summary.csv files")->required();
  report->add_option("--out", report_out, "output directory for tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      cmd_generate(to_config(gen, gen_flags), std::cout);
      return 0;
    }
    if (*run) {
      ExperimentConfig c = to_config(run, run_flags);
      if (run->count("--strategies")) c.strategies = parse_strategy_list(strategies);
      if (run->count("--budget") || run_flags.config_path.empty()) c.budget = io::parse_budget(budget);
      if (run->count("--jobs")) c.jobs = jobs;
      RunResult r = cmd_run(c, std::cout);
      std::cout << "summary: " << r.summary_path.string() << "\n";
      return r.ok() ? 0 : kExitRun;
    }
    if (*report) {
      std::vector<std::filesystem::path> paths(summaries.begin(), summaries.end());
      cmd_report(paths, report_out, std::cout);
      return 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRun;
  }
  return 0;
}
