#pragma once

#include <optional>
#include <string>

#include "tubecomp/verifiers.hpp"

namespace tubecomp {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One batch run: a manifold, the comparison parameters, grid settings, the
/// suite selection, tolerances and output options, parsed from a JSON file.
struct Scenario {
  std::string name = "scenario";

  enum class ManifoldClass { warped_tube, chart_surface };
  ManifoldClass manifold_class = ManifoldClass::warped_tube;

  // warped_tube data
  Fiber fiber = Fiber::circle(2.0 * 3.14159265358979323846);
  Expression warp;
  double length = 1.0;
  TubeTopology topology = TubeTopology::cylinder;

  // chart_surface data
  Expression metric, beta_low, beta_high;
  double period = 2.0 * 3.14159265358979323846;

  ComparisonParams params;
  GeometryOptions geometry;
  SuiteConfig suite;
  double certification_tol = 1e-9;
  bool force_certify = false;

  enum class Format { csv, json, both };
  Format format = Format::both;
  bool dump_distance_field = false;
  unsigned seed = 0;

  Manifold build_manifold() const;
};

Scenario parse_scenario_json(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

struct RunOptions {
  int threads = 1;
  double tol_scale = 1.0;
  std::optional<unsigned> seed;
  bool dump_distance_field = false;
};

struct RunArtifacts {
  int exit_code = 2;  // 0 all pass, 1 check failure, 2 input/certification error
  std::string error;
  std::string report_json;
  std::string report_csv;
  std::string distance_dump;
  bool has_suite = false;
  SuiteResult suite;
};

/// Builds, certifies, runs the configured battery and renders the reports.
/// All input and certification failures are captured into exit code 2.
RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace tubecomp
