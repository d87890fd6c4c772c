#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "tubecomp.h"

namespace {

const char* kAnnulus = R"({
  "name": "capi_annulus",
  "manifold": {
    "class": "warped_tube",
    "fiber": {"kind": "circle", "length": "2*pi"},
    "warp": "1+t",
    "length": 2,
    "topology": "cylinder"
  },
  "params": {"n": 2, "kappa": 0, "lambda": -1},
  "grid": {"boundary_samples": 64},
  "suite": {"t_values": [0.5]}
})";

}  // namespace

TEST_CASE("kernel evaluations through the C surface") {
  CHECK(tc_ball_condition(1.0, -5.0) == 1);
  CHECK(tc_ball_condition(0.0, 0.0) == 0);

  double value = 0.0, deriv = 0.0;
  REQUIRE(tc_s_boundary(-1.0, 1.0, 3.0, &value, &deriv) == TC_OK);
  CHECK(value == doctest::Approx(std::exp(-3.0)));

  double cut = 0.0;
  REQUIRE(tc_cut_radius(1.0, 0.0, &cut) == TC_OK);
  CHECK(cut == doctest::Approx(M_PI / 2));
  REQUIRE(tc_cut_radius(-1.0, 1.0, &cut) == TC_OK);
  CHECK(std::isinf(cut));

  double c = 0.0;
  REQUIRE(tc_dirichlet_constant(2, -1.0, 1.0, 1.0, &c) == TC_OK);
  CHECK(c == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
  REQUIRE(tc_dirichlet_constant(3, -1.0, 1.0, INFINITY, &c) == TC_OK);
  CHECK(c == doctest::Approx(0.5));
  CHECK(tc_dirichlet_constant(2, 0.0, 1.0, INFINITY, &c) == TC_ERROR);

  double mu = 0.0;
  REQUIRE(tc_kasue_bar_mu(2, -1.0, 1.0, 1.0, &mu) == TC_OK);
  const double expect = 0.25 / std::pow(1.0 - std::exp(-0.5), 2.0);
  CHECK(mu == doctest::Approx(expect).epsilon(1e-7));

  double bound = 0.0;
  REQUIRE(tc_eigen_lower_bound(3, -1.0, 1.0, INFINITY, 3.0, "rigid", &bound) == TC_OK);
  CHECK(bound == doctest::Approx(8.0 / 27.0));
  CHECK(tc_eigen_lower_bound(3, -1.0, 1.0, INFINITY, 3.0, "frob", &bound) == TC_ERROR);
  CHECK(tc_eigen_lower_bound(2, 0.0, 0.0, 1.0, 0.5, "dirichlet", &bound) == TC_ERROR);

  double ratio = 0.0;
  REQUIRE(tc_model_ratio(2, 0.0, 0.0, 1.0, 3.0, &ratio) == TC_OK);
  CHECK(ratio == doctest::Approx(3.0));
  CHECK(tc_model_ratio(2, 0.0, 0.0, 3.0, 1.0, &ratio) == TC_ERROR);

  double phi = 0.0;
  REQUIRE(tc_phi_profile(2, 1.0, 2.0, &phi) == TC_OK);
  CHECK(phi == doctest::Approx(2.0 * std::exp(1.0)));

  double offset = 0.0;
  REQUIRE(tc_collar_offset(-1.0, -0.5, &offset) == TC_OK);
  CHECK(offset == doctest::Approx(std::atanh(0.5)));
  CHECK(tc_collar_offset(1.0, 0.0, &offset) == TC_ERROR);

  double seg = 0.0;
  REQUIRE(tc_segment_constant(2, 0.0, 0.0, 2.0, &seg) == TC_OK);
  CHECK(seg == doctest::Approx(1.0));

  double f = 0.0;
  REQUIRE(tc_f_profile(2, 0.0, 1.0, 5.0, &f) == TC_OK);
  CHECK(f == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("scenario round trip through the C surface") {
  char errbuf[512] = {0};
  tc_scenario* scenario = tc_scenario_parse(kAnnulus, errbuf, sizeof(errbuf));
  REQUIRE(scenario != nullptr);
  CHECK(std::string(tc_scenario_name(scenario)) == "capi_annulus");
  CHECK(tc_scenario_format(scenario) == 2);

  tc_run_options options;
  tc_run_options_init(&options);
  tc_result* result = tc_run(scenario, &options);
  REQUIRE(result != nullptr);
  CHECK(tc_result_exit_code(result) == TC_OK);
  CHECK(tc_result_check_count(result) >= 10);
  bool found_log_jacobian = false;
  for (int i = 0; i < tc_result_check_count(result); ++i) {
    if (std::string(tc_result_check_name(result, i)) == "log_jacobian") {
      found_log_jacobian = true;
      CHECK(tc_result_check_status(result, i) == 1);
      CHECK(tc_result_check_margin(result, i) >=
            -tc_result_check_tolerance(result, i));
    }
  }
  CHECK(found_log_jacobian);
  CHECK(std::string(tc_result_report_csv(result)).find("check,name,margin") == 0);
  CHECK(std::string(tc_result_report_json(result)).find("capi_annulus") !=
        std::string::npos);
  CHECK(std::string(tc_result_rigidity(result)) == "none");
  tc_result_free(result);
  tc_scenario_free(scenario);
}

TEST_CASE("error paths through the C surface") {
  char errbuf[256] = {0};
  CHECK(tc_scenario_parse("{ not json", errbuf, sizeof(errbuf)) == nullptr);
  CHECK(std::strlen(errbuf) > 0);
  CHECK(tc_scenario_load("/nonexistent/file.json", errbuf, sizeof(errbuf)) ==
        nullptr);
  CHECK(tc_scenario_parse(nullptr, errbuf, sizeof(errbuf)) == nullptr);
  CHECK(tc_run(nullptr, nullptr) == nullptr);
  CHECK(tc_result_exit_code(nullptr) == 2);

  // Certification failure surfaces as exit code 2 with a message.
  const char* bad = R"({
    "manifold": {
      "class": "warped_tube",
      "fiber": {"kind": "circle", "length": "2*pi"},
      "warp": "1+t", "length": 2, "topology": "cylinder"
    },
    "params": {"n": 2, "kappa": 0, "lambda": 0}
  })";
  tc_scenario* scenario = tc_scenario_parse(bad, errbuf, sizeof(errbuf));
  REQUIRE(scenario != nullptr);
  tc_result* result = tc_run(scenario, nullptr);
  CHECK(tc_result_exit_code(result) == TC_ERROR);
  CHECK(std::string(tc_result_error(result)).find("mean curvature") !=
        std::string::npos);
  tc_result_free(result);
  tc_scenario_free(scenario);
}
