#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ssc/errors.hpp"
#include "ssc/pipeline.hpp"
#include "ssc/scenario_io.hpp"

namespace {

int run(const std::string& scenario_path, const std::string& out_dir, bool dump_corridor,
        double horizon, const std::string& config_path, const std::string& verify_path) {
  using namespace ssc;
  Scenario sc;
  try {
    sc = load_scenario(scenario_path);
    if (!config_path.empty()) {
      nlohmann::json overrides;
      try {
        overrides = nlohmann::json::parse(read_file(config_path));
      } catch (const nlohmann::json::parse_error&) {
        throw Error(ErrorCode::kParseError, config_path + ": malformed document");
      }
      apply_config_overrides(sc.config, overrides, config_path);
    }
    if (horizon > 0.0) sc.horizon = horizon;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(status_from_error(e.code()));
  }

  PlanResult result;
  if (!verify_path.empty()) {
    result = build_scene(sc);
    if (result.status == PlanStatus::kOk) {
      try {
        const auto doc = nlohmann::json::parse(read_file(verify_path));
        result.trajectory = trajectory_from_json(doc);
      } catch (const nlohmann::json::parse_error&) {
        std::cerr << "ParseError: " << verify_path << ": malformed document\n";
        return exit_code(PlanStatus::kParseError);
      } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code(status_from_error(e.code()));
      }
      VerificationConfig vcfg = sc.config.verification;
      vcfg.start = result.start;
      result.report = verify(*result.trajectory, result.corridor, *result.grid, vcfg);
      result.status = result.report->pass ? PlanStatus::kOk : PlanStatus::kVerificationFailure;
      if (!result.report->pass) result.message = "VerificationFailure";
    }
  } else {
    result = plan(sc);
  }

  if (!out_dir.empty()) {
    try {
      write_outputs(result, sc, out_dir, dump_corridor);
    } catch (const std::exception& e) {
      std::cerr << "cannot write outputs: " << e.what() << "\n";
      return 1;
    }
  }
  std::cout << to_string(result.status);
  if (!result.message.empty()) std::cout << " - " << result.message;
  std::cout << "\n";
  return exit_code(result.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal semantic corridor trajectory planner"};
  app.require_subcommand(1);

  std::string scenario, out_dir, config, verify_only;
  bool dump_corridor = false;
  double horizon = 0.0;
  auto* cmd = app.add_subcommand("run", "Plan a trajectory for a scenario file");
  cmd->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", out_dir, "Output directory");
  cmd->add_flag("--dump-corridor", dump_corridor, "Also write corridor.json");
  cmd->add_option("--horizon", horizon, "Override the planning horizon (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--config", config, "Config override file")->check(CLI::ExistingFile);
  cmd->add_option("--verify-only", verify_only, "Verify an existing trajectory file instead of planning")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return run(scenario, out_dir, dump_corridor, horizon, config, verify_only);
}
