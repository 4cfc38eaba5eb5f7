#include "gainflow/cli.hpp"

#include "gainflow/io.hpp"
#include "gainflow/scenario.hpp"
#include "gainflow/specs.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>

namespace gainflow {

namespace {

struct Unwritable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text)) throw Unwritable("cannot write '" + path + "'");
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  try {
    write_csv(traj, path);
  } catch (const std::runtime_error& e) {
    throw Unwritable(e.what());
  }
}

struct SimulateArgs {
  std::string scenario, out, json, plot, out_dir;
  std::vector<std::string> sweep;
};

int simulate_one(const Scenario& sc, const SimulateArgs& args, std::ostream& out) {
  auto traj = run_scenario(sc);
  const std::string csv = !args.out.empty() ? args.out : sc.csv_path;
  const std::string json = !args.json.empty() ? args.json : sc.json_path;
  const std::string plot = !args.plot.empty() ? args.plot : sc.plot_path;
  if (csv.empty())
    write_csv(traj, out);
  else
    write_trajectory_csv(traj, csv);
  if (!json.empty()) write_text(json, to_json(traj).dump(2) + "\n");
  if (!plot.empty()) write_text(plot, gnuplot_script(csv.empty() ? sc.name + ".csv" : csv, traj));
  return kExitOk;
}

int simulate_sweep(const SimulateArgs& args, std::ostream& out) {
  if (args.out_dir.empty()) throw ArgumentError("--sweep needs --out-dir");
  std::vector<Scenario> scenarios;
  for (const auto& path : args.sweep) scenarios.push_back(parse_scenario(path));
  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  std::vector<std::future<std::string>> jobs;
  for (const auto& sc : scenarios)
    jobs.push_back(std::async(std::launch::async, [&sc, &args] {
      auto path = (std::filesystem::path(args.out_dir) / (sc.name + ".csv")).string();
      write_trajectory_csv(run_scenario(sc), path);
      return path;
    }));
  for (auto& j : jobs) out << j.get() << "\n";
  return kExitOk;
}

int audit(const std::string& scenario_path, const std::string& report_path, std::ostream& out) {
  auto sc = parse_scenario(scenario_path);
  auto traj = run_scenario(sc);
  auto outcomes = run_audits(sc, traj);
  nlohmann::json j;
  j["scenario"] = sc.name;
  j["game"] = traj.game_name;
  j["dynamic"] = traj.dynamic_name;
  auto& arr = j["audits"] = nlohmann::json::array();
  bool all = true;
  for (const auto& o : outcomes) {
    arr.push_back(to_json(o));
    all = all && o.passed;
    out << (o.passed ? "PASS " : "FAIL ") << arr.back()["kind"].get<std::string>();
    if (o.monotonicity) out << " " << o.monotonicity->series << " " << to_string(o.monotonicity->verdict);
    if (o.convergence) out << " distance " << o.convergence->final_distance;
    out << "\n";
  }
  j["all_pass"] = all;
  if (report_path.empty())
    out << j.dump(2) << "\n";
  else
    write_text(report_path, j.dump(2) + "\n");
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gain-function audits for evolutionary dynamics", "gainflow"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate a scenario and write its trajectory");
  auto* scenario_opt = simulate_cmd->add_option("--scenario", sim.scenario, "Scenario file");
  simulate_cmd->add_option("--out", sim.out, "Trajectory CSV (stdout if omitted)");
  simulate_cmd->add_option("--json", sim.json, "Trajectory JSON");
  simulate_cmd->add_option("--plot", sim.plot, "Gnuplot script");
  auto* sweep_opt = simulate_cmd->add_option("--sweep", sim.sweep, "Several scenario files")->expected(1, -1);
  simulate_cmd->add_option("--out-dir", sim.out_dir, "Directory for sweep outputs");
  scenario_opt->excludes(sweep_opt);

  std::string audit_scenario, audit_out;
  auto* audit_cmd = app.add_subcommand("audit", "Run the audits declared in a scenario");
  audit_cmd->add_option("--scenario", audit_scenario, "Scenario file")->required();
  audit_cmd->add_option("--out", audit_out, "Report JSON");

  std::string spec;
  std::size_t actions = 0;
  auto* protocol_cmd = app.add_subcommand("check-protocol", "Validate a named protocol");
  protocol_cmd->add_option("--spec", spec, "Protocol name")->required();
  protocol_cmd->add_option("--actions", actions, "Number of actions");

  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  auto* game_cmd = app.add_subcommand("check-game", "Check whether a named game is stable");
  game_cmd->add_option("--spec", spec, "Game name")->required();
  game_cmd->add_option("--samples", samples, "Sample count");
  game_cmd->add_option("--seed", seed, "Sampling seed");

  std::size_t trials = 200;
  auto* props_cmd = app.add_subcommand("properties", "Run the gain property suite for a protocol");
  props_cmd->add_option("--spec", spec, "Protocol name")->required();
  props_cmd->add_option("--actions", actions, "Number of actions");
  props_cmd->add_option("--trials", trials, "Trial count");
  props_cmd->add_option("--seed", seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gainflow: " << e.what() << "\n" << "run 'gainflow --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (simulate_cmd->parsed()) {
      if (!sim.sweep.empty()) return simulate_sweep(sim, out);
      if (sim.scenario.empty()) {
        err << "gainflow simulate: --scenario or --sweep is required\n";
        return kExitUsage;
      }
      return simulate_one(parse_scenario(sim.scenario), sim, out);
    }
    if (audit_cmd->parsed()) return audit(audit_scenario, audit_out, out);
    if (protocol_cmd->parsed()) {
      auto proto = protocol_from_name(spec, actions);
      const auto& report = proto.validate();
      auto j = to_json(report);
      j["protocol"] = proto.name;
      j["actions"] = proto.action_count();
      out << j.dump(2) << "\n";
      return report.all_pass() ? kExitOk : kExitFailure;
    }
    if (game_cmd->parsed()) {
      auto game = game_from_name(spec);
      auto report = is_stable_game(game, samples, seed);
      auto j = to_json(report);
      j["game"] = game.name();
      out << j.dump(2) << "\n";
      return report.stable ? kExitOk : kExitFailure;
    }
    if (props_cmd->parsed()) {
      auto report = run_property_suite(protocol_from_name(spec, actions), seed, trials);
      out << to_json(report).dump(2) << "\n";
      return report.all_pass() ? kExitOk : kExitFailure;
    }
  } catch (const ScenarioError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "gainflow: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Unwritable& e) {
    err << "gainflow: " << e.what() << "\n";
    return kExitUnwritable;
  } catch (const std::exception& e) {
    err << "gainflow: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gainflow
