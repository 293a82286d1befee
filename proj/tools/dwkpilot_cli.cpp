// Scenario runner CLI. Talks to the core exclusively through the C API.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "dwkpilot.h"

int main(int argc, char** argv) {
  CLI::App app{"dwkpilot: covariant pilot-wave scenario runner"};
  app.set_version_flag("--version", dwk_version());

  std::string kind, config_path, out_dir, report_path;
  unsigned threads = 1;
  app.add_option("kind", kind,
                 "scenario kind (classical|quantum|beable|equivariance|riesz|"
                 "limit-sweep|invariants)")
      ->required();
  app.add_option("--config", config_path, "path to the scenario JSON config")
      ->required();
  app.add_option("--out", out_dir, "output directory for CSV artifacts");
  app.add_option("--report", report_path, "write the run report JSON here");
  app.add_option("--threads", threads, "worker threads for sampling sweeps");

  CLI11_PARSE(app, argc, argv);

  char err[512] = {0};
  dwk_scenario* scenario = nullptr;
  dwk_status st = dwk_scenario_load(config_path.c_str(), &scenario, err, sizeof(err));
  if (st != DWK_OK) {
    std::fprintf(stderr, "error: %s\n", err);
    return static_cast<int>(st);
  }
  if (kind != dwk_scenario_kind(scenario)) {
    std::fprintf(stderr, "error: config kind '%s' does not match '%s'\n",
                 dwk_scenario_kind(scenario), kind.c_str());
    dwk_scenario_free(scenario);
    return static_cast<int>(DWK_E_CONFIG_PARSE);
  }

  dwk_report* report = nullptr;
  st = dwk_scenario_run(scenario, out_dir.empty() ? nullptr : out_dir.c_str(),
                        threads, &report, err, sizeof(err));
  if (!report) {
    std::fprintf(stderr, "error: %s\n", err);
    dwk_scenario_free(scenario);
    return static_cast<int>(st);
  }

  std::printf("scenario %s (%s): %zu checks, %.2fs\n", dwk_scenario_name(scenario),
              dwk_scenario_kind(scenario), dwk_report_check_count(report),
              dwk_report_wall_time(report));
  for (size_t i = 0; i < dwk_report_check_count(report); ++i)
    std::printf("  [%s] %s = %.6g (tol %.6g)\n",
                dwk_report_check_passed(report, i) ? "pass" : "FAIL",
                dwk_report_check_name(report, i), dwk_report_check_value(report, i),
                dwk_report_check_tolerance(report, i));
  for (size_t i = 0; i < dwk_report_artifact_count(report); ++i)
    std::printf("  wrote %s\n", dwk_report_artifact(report, i));

  if (!report_path.empty()) {
    dwk_status ws = dwk_report_write_json(report, report_path.c_str(), err, sizeof(err));
    if (ws != DWK_OK) std::fprintf(stderr, "warning: %s\n", err);
  }

  int exit_code = dwk_report_all_passed(report) ? 0 : 1;
  dwk_report_free(report);
  dwk_scenario_free(scenario);
  return exit_code;
}
