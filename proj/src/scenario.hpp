#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grids.hpp"
#include "minkowski.hpp"

namespace dwk::scenario {

struct GridSpec {
  double q_min{-8.0};
  double q_max{8.0};
  double dq{0.01};
  double sigma_max{2.0 * M_PI};
  double dsigma{1e-3};
};

// Flat scenario configuration; unknown keys are rejected at parse time.
struct ScenarioConfig {
  std::string name{"scenario"};
  std::string kind;
  double omega{1.0};
  double lambda{0.1};
  double q0{1.0};
  double B0{0.0};
  double sigma0{0.0};
  Vec4 n_vector{1.0, 0.0, 0.0, 0.0};
  GridSpec grid;
  std::size_t samples{100000};
  std::uint64_t seed{42};
  std::vector<double> lambda_list{0.4, 0.2, 0.1, 0.05};
  std::vector<double> sigma_checks{0.25 * M_PI, 0.5 * M_PI, M_PI, 2.0 * M_PI};
  std::string output_dir{"."};
};

ScenarioConfig parse_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);

struct CheckResult {
  std::string name;
  double value{0.0};
  double tolerance{0.0};
  bool pass{false};
};

struct RunReport {
  std::string scenario;
  std::string kind;
  double wall_time_s{0.0};
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;

  void add_check(const std::string& name, double value, double tolerance);
  bool all_passed() const;
  const CheckResult& check(const std::string& name) const;
};

// Runs one scenario, writing CSV artifacts into config.output_dir (created
// if missing) and returning the per-check report.
RunReport run_scenario(const ScenarioConfig& config, unsigned threads = 1);

void write_report_json(const RunReport& report, const std::string& path);

// Reads a plane-wave profile table with columns (sigma, q, f, g, ...) back
// into gridded fields; rows must cover a full uniform grid.
struct PlaneWaveProfileData {
  RealField2D f;
  RealField2D g;
};

PlaneWaveProfileData load_plane_wave_profile(const std::string& path);

}  // namespace dwk::scenario
