// Command-line runner for the shelf-sorting pipeline: synthesize noisy
// observations of a simulated shelf, fuse them into a world belief, plan a
// height-sorted rearrangement, and execute it.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "librarian/bookdb.hpp"
#include "librarian/pipeline.hpp"
#include "librarian/report.hpp"
#include "librarian/scenario.hpp"
#include "librarian/serialize.hpp"

namespace fs = std::filesystem;

namespace {

// Exit statuses: 0 ok, 2 bad input, 3 shelf overflow, 4 episode halted.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitOverflow = 3;
constexpr int kExitHalted = 4;

std::string iso_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_json_file(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw librarian::IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_text_file(const std::string& text, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw librarian::IoError("cannot write " + path.string());
  out << text;
}

struct Options {
  std::string db_path;
  std::string scenario_path;
  std::string out_dir = ".";
  std::string belief_path;
  std::string report_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> window;
  bool no_timestamp = false;
};

int cmd_perceive(const Options& opt) {
  const auto db = librarian::load_database(opt.db_path);
  const auto scenario = librarian::load_scenario(opt.scenario_path);
  const auto result = librarian::perceive(scenario, db, opt.seed, opt.window);

  fs::create_directories(opt.out_dir);
  librarian::write_observations(result.observations,
                                (fs::path(opt.out_dir) / "observations.jsonl").string());
  librarian::write_belief(result.belief,
                          (fs::path(opt.out_dir) / "belief.json").string());
  std::cout << librarian::render_belief_table(result.belief, db);
  return kExitOk;
}

int cmd_plan(const Options& opt) {
  const auto db = librarian::load_database(opt.db_path);
  const auto scenario = librarian::load_scenario(opt.scenario_path);
  const std::string belief_path =
      opt.belief_path.empty()
          ? (fs::path(opt.out_dir) / "belief.json").string()
          : opt.belief_path;
  const auto belief = librarian::read_belief(belief_path);
  const auto plan = librarian::plan_for(belief, scenario, db);

  fs::create_directories(opt.out_dir);
  librarian::write_plan(plan, (fs::path(opt.out_dir) / "plan.json").string());
  std::cout << plan.actions.size() << " actions planned\n";
  return kExitOk;
}

int cmd_run(const Options& opt) {
  const auto db = librarian::load_database(opt.db_path);
  const auto scenario = librarian::load_scenario(opt.scenario_path);
  const auto result = librarian::run_scenario(scenario, db, opt.seed, opt.window);

  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  librarian::write_observations(result.perception.observations,
                                (out / "observations.jsonl").string());
  librarian::write_belief(result.perception.belief,
                          (out / "belief.json").string());
  librarian::write_plan(result.plan, (out / "plan.json").string());

  nlohmann::json report_json = librarian::report_to_json(result.report);
  if (!opt.no_timestamp) report_json["generated_at"] = iso_timestamp();
  write_json_file(report_json, out / "report.json");

  const std::string text = librarian::render_report(result.report);
  write_text_file(text, out / "report.txt");
  std::cout << text;
  return result.episode.completed ? kExitOk : kExitHalted;
}

int cmd_report(const Options& opt) {
  const std::string report_path =
      opt.report_path.empty()
          ? (fs::path(opt.out_dir) / "report.json").string()
          : opt.report_path;
  std::ifstream in(report_path);
  if (!in) throw librarian::IoError("cannot open report file: " + report_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw librarian::ParseError(report_path + ": " + e.what());
  }
  std::cout << librarian::render_report(librarian::report_from_json(j));
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Book-shelf perception, planning, and simulation pipeline"};
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed_value = 0;
  int window_value = 0;

  const auto add_common = [&](CLI::App* cmd, bool needs_inputs) {
    if (needs_inputs) {
      cmd->add_option("--db", opt.db_path, "book database (books.json)")
          ->required();
      cmd->add_option("--scenario", opt.scenario_path, "scenario file")
          ->required();
      cmd->add_option("--seed", seed_value, "override the scenario seed")
          ->each([&](const std::string&) { opt.seed = seed_value; });
      cmd->add_option("--window", window_value,
                      "observations per belief (default from scenario, 10)")
          ->each([&](const std::string&) { opt.window = window_value; });
    }
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_flag("--no-timestamp", opt.no_timestamp,
                  "omit the timestamp from report.json");
  };

  auto* perceive = app.add_subcommand(
      "perceive", "synthesize observations and fuse them into a belief");
  add_common(perceive, true);

  auto* plan = app.add_subcommand("plan", "plan a sort from a saved belief");
  add_common(plan, true);
  plan->add_option("--belief", opt.belief_path,
                   "belief file (default: <out>/belief.json)");

  auto* run = app.add_subcommand("run", "full pipeline: perceive, plan, execute");
  add_common(run, true);

  auto* report = app.add_subcommand("report", "render a saved report");
  add_common(report, false);
  report->add_option("--report", opt.report_path,
                     "report file (default: <out>/report.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (perceive->parsed()) return cmd_perceive(opt);
    if (plan->parsed()) return cmd_plan(opt);
    if (run->parsed()) return cmd_run(opt);
    if (report->parsed()) return cmd_report(opt);
  } catch (const librarian::ShelfOverflowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOverflow;
  } catch (const librarian::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
