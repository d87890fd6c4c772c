// Scenario runner: parses a manifold + suite configuration, executes the
// comparison battery through the tubecomp C API, writes CSV/JSON reports, and
// signals pass/fail through the exit code (0 pass, 1 check failure, 2 input
// or certification error).
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tubecomp.h"

namespace fs = std::filesystem;

namespace {

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tubecomp: comparison-geometry battery runner"};
  std::string scenario_path;
  std::string out_dir = ".";
  std::string format = "scenario";
  tc_run_options options;
  tc_run_options_init(&options);
  bool dump_distance = false;

  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  app.add_option("--out", out_dir, "Output directory for report files");
  app.add_option("--format", format, "Report format: csv, json, both")
      ->check(CLI::IsMember({"csv", "json", "both", "scenario"}));
  app.add_option("--threads", options.threads, "Worker threads");
  app.add_option("--tol-scale", options.tol_scale,
                 "Uniform tolerance multiplier for exploratory runs");
  app.add_option("--seed", options.seed, "Seed for trial-function sampling");
  app.add_flag("--dump-distance-field", dump_distance,
               "Also write the distance-field debug matrix (chart surfaces)");
  CLI11_PARSE(app, argc, argv);
  options.dump_distance_field = dump_distance ? 1 : 0;

  // TUBECOMP_THREADS overrides the thread count when --threads is not given.
  if (app.count("--threads") == 0) {
    if (const char* env = std::getenv("TUBECOMP_THREADS")) {
      const int value = std::atoi(env);
      if (value > 0) options.threads = value;
    }
  }

  char errbuf[1024];
  tc_scenario* scenario = tc_scenario_load(scenario_path.c_str(), errbuf,
                                           sizeof(errbuf));
  if (!scenario) {
    std::cerr << "error: " << errbuf << "\n";
    return 2;
  }
  const std::string name = tc_scenario_name(scenario);

  tc_result* result = tc_run(scenario, &options);
  const int exit_code = tc_result_exit_code(result);
  if (exit_code == 2) {
    std::cerr << "error: " << tc_result_error(result) << "\n";
    tc_result_free(result);
    tc_scenario_free(scenario);
    return 2;
  }

  const int count = tc_result_check_count(result);
  for (int i = 0; i < count; ++i) {
    const int status = tc_result_check_status(result, i);
    const char* label = status == 2 ? "skip" : (status == 1 ? "pass" : "FAIL");
    std::printf("[%s] %-42s margin=% .3e tol=%.1e\n", label,
                tc_result_check_name(result, i), tc_result_check_margin(result, i),
                tc_result_check_tolerance(result, i));
  }
  std::printf("rigidity verdict: %s\n", tc_result_rigidity(result));

  int effective_format = tc_scenario_format(scenario);
  if (format == "csv") effective_format = 0;
  if (format == "json") effective_format = 1;
  if (format == "both") effective_format = 2;

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  bool io_ok = true;
  if (effective_format == 0 || effective_format == 2)
    io_ok &= write_file(dir / (name + "_report.csv"), tc_result_report_csv(result));
  if (effective_format == 1 || effective_format == 2)
    io_ok &= write_file(dir / (name + "_report.json"), tc_result_report_json(result));
  const std::string dump = tc_result_distance_dump(result);
  if (!dump.empty()) io_ok &= write_file(dir / (name + "_distance.txt"), dump);

  tc_result_free(result);
  tc_scenario_free(scenario);
  if (!io_ok) return 2;
  return exit_code;
}
