#include "tubecomp.h"

#include <cstring>
#include <string>

#include "tubecomp/kernels.hpp"
#include "tubecomp/scenario.hpp"

using namespace tubecomp;

struct tc_scenario {
  Scenario scenario;
};

struct tc_result {
  RunArtifacts artifacts;
  std::string rigidity;
};

namespace {

void write_error(char* errbuf, size_t errlen, const char* message) {
  if (!errbuf || errlen == 0) return;
  std::strncpy(errbuf, message, errlen - 1);
  errbuf[errlen - 1] = '\0';
}

template <typename Fn>
tc_status guarded(double* out, Fn&& fn) {
  if (!out) return TC_ERROR;
  try {
    *out = fn();
    return TC_OK;
  } catch (const std::exception&) {
    return TC_ERROR;
  }
}

}  // namespace

extern "C" {

void tc_run_options_init(tc_run_options* options) {
  if (!options) return;
  options->threads = 1;
  options->tol_scale = 1.0;
  options->dump_distance_field = 0;
  options->seed = 0;
}

tc_scenario* tc_scenario_load(const char* path, char* errbuf, size_t errlen) {
  if (!path) {
    write_error(errbuf, errlen, "null path");
    return nullptr;
  }
  try {
    auto* handle = new tc_scenario{parse_scenario_file(path)};
    return handle;
  } catch (const std::exception& e) {
    write_error(errbuf, errlen, e.what());
    return nullptr;
  }
}

tc_scenario* tc_scenario_parse(const char* json_text, char* errbuf, size_t errlen) {
  if (!json_text) {
    write_error(errbuf, errlen, "null scenario text");
    return nullptr;
  }
  try {
    auto* handle = new tc_scenario{parse_scenario_json(json_text)};
    return handle;
  } catch (const std::exception& e) {
    write_error(errbuf, errlen, e.what());
    return nullptr;
  }
}

const char* tc_scenario_name(const tc_scenario* scenario) {
  return scenario ? scenario->scenario.name.c_str() : "";
}

int tc_scenario_format(const tc_scenario* scenario) {
  if (!scenario) return 2;
  switch (scenario->scenario.format) {
    case Scenario::Format::csv: return 0;
    case Scenario::Format::json: return 1;
    case Scenario::Format::both: return 2;
  }
  return 2;
}

void tc_scenario_free(tc_scenario* scenario) { delete scenario; }

tc_result* tc_run(const tc_scenario* scenario, const tc_run_options* options) {
  if (!scenario) return nullptr;
  RunOptions run;
  if (options) {
    run.threads = options->threads;
    run.tol_scale = options->tol_scale;
    run.dump_distance_field = options->dump_distance_field != 0;
    run.seed = options->seed;
  }
  auto* result = new tc_result;
  try {
    result->artifacts = run_scenario(scenario->scenario, run);
  } catch (const std::exception& e) {
    result->artifacts.exit_code = 2;
    result->artifacts.error = e.what();
  }
  result->rigidity = rigidity_kind_name(result->artifacts.suite.verdict.kind);
  return result;
}

int tc_result_exit_code(const tc_result* result) {
  return result ? result->artifacts.exit_code : 2;
}

const char* tc_result_error(const tc_result* result) {
  return result ? result->artifacts.error.c_str() : "null result";
}

const char* tc_result_report_json(const tc_result* result) {
  return result ? result->artifacts.report_json.c_str() : "";
}

const char* tc_result_report_csv(const tc_result* result) {
  return result ? result->artifacts.report_csv.c_str() : "";
}

const char* tc_result_distance_dump(const tc_result* result) {
  return result ? result->artifacts.distance_dump.c_str() : "";
}

int tc_result_check_count(const tc_result* result) {
  return result ? static_cast<int>(result->artifacts.suite.reports.size()) : 0;
}

const char* tc_result_check_name(const tc_result* result, int index) {
  if (!result || index < 0 ||
      index >= static_cast<int>(result->artifacts.suite.reports.size()))
    return "";
  return result->artifacts.suite.reports[index].name.c_str();
}

double tc_result_check_margin(const tc_result* result, int index) {
  if (!result || index < 0 ||
      index >= static_cast<int>(result->artifacts.suite.reports.size()))
    return 0.0;
  return result->artifacts.suite.reports[index].worst_margin;
}

double tc_result_check_tolerance(const tc_result* result, int index) {
  if (!result || index < 0 ||
      index >= static_cast<int>(result->artifacts.suite.reports.size()))
    return 0.0;
  return result->artifacts.suite.reports[index].tolerance;
}

int tc_result_check_status(const tc_result* result, int index) {
  if (!result || index < 0 ||
      index >= static_cast<int>(result->artifacts.suite.reports.size()))
    return 0;
  const auto& rep = result->artifacts.suite.reports[index];
  if (rep.skipped) return 2;
  return rep.pass ? 1 : 0;
}

const char* tc_result_rigidity(const tc_result* result) {
  return result ? result->rigidity.c_str() : "none";
}

void tc_result_free(tc_result* result) { delete result; }

int tc_ball_condition(double kappa, double lambda) {
  return kernels::ball_condition(kappa, lambda) ? 1 : 0;
}

tc_status tc_cut_radius(double kappa, double lambda, double* out) {
  return guarded(out, [&] {
    return kernels::cut_radius(ComparisonParams(2, kappa, lambda)).raw();
  });
}

tc_status tc_s_boundary(double kappa, double lambda, double t, double* value,
                        double* deriv) {
  if (!value || !deriv) return TC_ERROR;
  try {
    const auto vd = kernels::s_boundary(ComparisonParams(2, kappa, lambda), t);
    *value = vd.value;
    *deriv = vd.deriv;
    return TC_OK;
  } catch (const std::exception&) {
    return TC_ERROR;
  }
}

tc_status tc_f_profile(int n, double kappa, double lambda, double r, double* out) {
  return guarded(out, [&] {
    return kernels::f_profile(ComparisonParams(n, kappa, lambda), r);
  });
}

tc_status tc_collar_offset(double kappa, double lambda, double* out) {
  return guarded(out, [&] { return kernels::collar_offset(kappa, lambda); });
}

tc_status tc_dirichlet_constant(int n, double kappa, double lambda, double d,
                                double* out) {
  return guarded(out, [&] {
    return kernels::dirichlet_constant(ComparisonParams(n, kappa, lambda),
                                       ExtendedReal(d));
  });
}

tc_status tc_segment_constant(int n, double kappa, double lambda, double d,
                              double* out) {
  return guarded(out, [&] {
    return kernels::segment_constant(ComparisonParams(n, kappa, lambda), d);
  });
}

tc_status tc_kasue_bar_mu(int n, double kappa, double lambda, double d, double* out) {
  return guarded(out, [&] {
    return kernels::kasue_bar_mu(ComparisonParams(n, kappa, lambda), d);
  });
}

tc_status tc_eigen_lower_bound(int n, double kappa, double lambda, double d,
                               double p, const char* variant, double* out) {
  if (!variant) return TC_ERROR;
  return guarded(out, [&] {
    const std::string v = variant;
    kernels::EigenBoundVariant kind;
    if (v == "dirichlet")
      kind = kernels::EigenBoundVariant::dirichlet;
    else if (v == "segment")
      kind = kernels::EigenBoundVariant::segment;
    else if (v == "rigid")
      kind = kernels::EigenBoundVariant::rigid;
    else
      throw std::invalid_argument("unknown eigen bound variant");
    return kernels::eigen_lower_bound(ComparisonParams(n, kappa, lambda),
                                      ExtendedReal(d), p, kind);
  });
}

tc_status tc_phi_profile(int n, double lambda, double t, double* out) {
  return guarded(out, [&] {
    return kernels::phi_profile(ComparisonParams(n, 0.0, lambda), t);
  });
}

tc_status tc_model_ratio(int n, double kappa, double lambda, double r, double big_r,
                         double* out) {
  return guarded(out, [&] {
    return kernels::model_ratio(ComparisonParams(n, kappa, lambda), r, big_r);
  });
}

const char* tc_version(void) { return "tubecomp 1.0.0"; }

}  // extern "C"
