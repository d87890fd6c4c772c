#include "tubecomp/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tubecomp {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownChecks = {
    "all",           "log_jacobian",    "relative_jacobian", "volume_comparison",
    "heintze_karcher", "volume_growth", "inscribed_radius",  "measure_contraction",
    "annulus_chain", "segment",         "poincare",          "isoperimetric",
    "eigen_bounds"};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ScenarioError("scenario field '" + field + "': " + what);
}

double number_of(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_numeric(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(field, e.what());
    }
  }
  fail(field, "expected a number or numeric expression string");
}

Expression expr_of(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected an expression string");
  try {
    return Expression::parse(j.get<std::string>());
  } catch (const ExpressionError& e) {
    fail(field, e.what());
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  if constexpr (std::is_same_v<T, double>) {
    out = number_of(j.at(key), key);
  } else if constexpr (std::is_same_v<T, int>) {
    if (!j.at(key).is_number_integer()) fail(key, "expected an integer");
    out = j.at(key).get<int>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.at(key).is_boolean()) fail(key, "expected a boolean");
    out = j.at(key).get<bool>();
  } else {
    out = j.at(key).get<T>();
  }
}

void parse_manifold(const json& j, Scenario& sc) {
  if (!j.contains("class")) fail("manifold.class", "missing");
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "warped_tube") {
    sc.manifold_class = Scenario::ManifoldClass::warped_tube;
    if (!j.contains("fiber")) fail("manifold.fiber", "missing");
    const json& fj = j.at("fiber");
    const std::string kind = fj.value("kind", "circle");
    if (kind == "circle") {
      sc.fiber = Fiber::circle(number_of(fj.at("length"), "fiber.length"));
    } else if (kind == "round_sphere") {
      sc.fiber = Fiber::round_sphere(fj.value("dim", 1),
                                     number_of(fj.at("radius"), "fiber.radius"));
    } else if (kind == "flat_torus") {
      std::vector<double> sides;
      for (const auto& s : fj.at("sides")) sides.push_back(number_of(s, "fiber.sides"));
      sc.fiber = Fiber::flat_torus(sides);
    } else {
      fail("manifold.fiber.kind", "unknown kind '" + kind + "'");
    }
    if (!j.contains("warp")) fail("manifold.warp", "missing");
    sc.warp = expr_of(j.at("warp"), "manifold.warp");
    const std::string topo = j.value("topology", "cylinder");
    if (topo == "cylinder")
      sc.topology = TubeTopology::cylinder;
    else if (topo == "cap")
      sc.topology = TubeTopology::cap;
    else if (topo == "half_infinite")
      sc.topology = TubeTopology::half_infinite;
    else
      fail("manifold.topology", "unknown topology '" + topo + "'");
    if (sc.topology != TubeTopology::half_infinite) {
      if (!j.contains("length")) fail("manifold.length", "missing");
      sc.length = number_of(j.at("length"), "manifold.length");
    }
  } else if (cls == "chart_surface") {
    sc.manifold_class = Scenario::ManifoldClass::chart_surface;
    if (!j.contains("metric")) fail("manifold.metric", "missing");
    sc.metric = expr_of(j.at("metric"), "manifold.metric");
    sc.beta_low = expr_of(j.at("beta_low"), "manifold.beta_low");
    sc.beta_high = expr_of(j.at("beta_high"), "manifold.beta_high");
    sc.period = number_of(j.at("period"), "manifold.period");
  } else {
    fail("manifold.class", "unknown class '" + cls + "'");
  }
}

}  // namespace

Manifold Scenario::build_manifold() const {
  if (manifold_class == ManifoldClass::warped_tube) {
    const double len = topology == TubeTopology::half_infinite
                           ? geometry.t_truncation
                           : length;
    return Manifold(build_warped_tube(fiber, warp, len, topology));
  }
  return Manifold(build_chart_surface(metric, beta_low, beta_high, period));
}

Scenario parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario sc;
  sc.name = j.value("name", "scenario");
  if (!j.contains("manifold")) throw ScenarioError("scenario: missing 'manifold'");
  parse_manifold(j.at("manifold"), sc);
  if (!j.contains("params")) throw ScenarioError("scenario: missing 'params'");
  const json& pj = j.at("params");
  int n = 2;
  maybe(pj, "n", n);
  const double kappa = pj.contains("kappa") ? number_of(pj.at("kappa"), "kappa") : 0.0;
  const double lambda =
      pj.contains("lambda") ? number_of(pj.at("lambda"), "lambda") : 0.0;
  try {
    sc.params = ComparisonParams(n, kappa, lambda);
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("scenario params: ") + e.what());
  }

  if (j.contains("grid")) {
    const json& gj = j.at("grid");
    maybe(gj, "nt", sc.geometry.grid_nt);
    maybe(gj, "nx", sc.geometry.grid_nx);
    maybe(gj, "boundary_samples", sc.geometry.boundary_samples);
    maybe(gj, "ode_step", sc.geometry.ode_step);
    maybe(gj, "t_truncation", sc.geometry.t_truncation);
    maybe(gj, "cut_match_constant", sc.geometry.cut_match_constant);
    maybe(gj, "sl_gridpoints", sc.geometry.sl_gridpoints);
    maybe(gj, "chart_eigen_n", sc.geometry.chart_eigen_n);
  }
  if (j.contains("suite")) {
    const json& sj = j.at("suite");
    if (sj.contains("checks")) {
      sc.suite.checks.clear();
      for (const auto& c : sj.at("checks")) {
        const std::string name = c.get<std::string>();
        if (!kKnownChecks.count(name))
          throw ScenarioError("scenario suite: unknown check '" + name + "'");
        sc.suite.checks.push_back(name);
      }
    }
    if (sj.contains("t_values")) {
      sc.suite.t_values.clear();
      for (const auto& t : sj.at("t_values"))
        sc.suite.t_values.push_back(number_of(t, "t_values"));
    }
    if (sj.contains("bands")) {
      sc.suite.bands.clear();
      for (const auto& b : sj.at("bands")) {
        if (!b.is_array() || b.size() != 2)
          throw ScenarioError("scenario suite: bands entries must be [inner, outer]");
        sc.suite.bands.emplace_back(number_of(b[0], "bands"),
                                    number_of(b[1], "bands"));
      }
    }
    if (sj.contains("p_list")) {
      sc.suite.p_list.clear();
      for (const auto& p : sj.at("p_list"))
        sc.suite.p_list.push_back(number_of(p, "p_list"));
    }
    if (sj.contains("trial_functions")) {
      sc.suite.trials.clear();
      for (const auto& t : sj.at("trial_functions")) {
        const std::string kind = t.value("kind", "radial");
        Expression e = expr_of(t.at("expr"), "trial_functions.expr");
        if (kind == "radial")
          sc.suite.trials.push_back(TrialFunction::radial(std::move(e)));
        else if (kind == "symbolic")
          sc.suite.trials.push_back(TrialFunction::symbolic(std::move(e)));
        else
          throw ScenarioError("scenario suite: unknown trial kind '" + kind + "'");
      }
    }
    if (sj.contains("segment_functions")) {
      sc.suite.segment_functions.clear();
      for (const auto& f : sj.at("segment_functions"))
        sc.suite.segment_functions.push_back(expr_of(f, "segment_functions"));
    }
    maybe(sj, "rigidity_tol", sc.suite.rigidity_tol);
    maybe(sj, "chain_k_max", sc.suite.chain_k_max);
  }
  if (j.contains("tolerances")) {
    const json& tj = j.at("tolerances");
    maybe(tj, "certification", sc.certification_tol);
    maybe(tj, "tol_scale", sc.suite.tol_scale);
  }
  if (j.contains("certification")) maybe(j.at("certification"), "force", sc.force_certify);
  if (j.contains("output")) {
    const json& oj = j.at("output");
    const std::string fmt = oj.value("format", "both");
    if (fmt == "csv")
      sc.format = Scenario::Format::csv;
    else if (fmt == "json")
      sc.format = Scenario::Format::json;
    else if (fmt == "both")
      sc.format = Scenario::Format::both;
    else
      throw ScenarioError("scenario output: unknown format '" + fmt + "'");
    maybe(oj, "dump_distance_field", sc.dump_distance_field);
  }
  if (j.contains("seed")) {
    int seed = 0;
    maybe(j, "seed", seed);
    sc.seed = static_cast<unsigned>(seed);
  }
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunArtifacts artifacts;
  try {
    Manifold m = scenario.build_manifold();
    CertifiedManifold cm = [&] {
      try {
        return certify_bounds(m, scenario.params, scenario.certification_tol);
      } catch (const CertificationError&) {
        if (!scenario.force_certify) throw;
        CurvatureReport rep = curvature_report(m);
        const double margin =
            std::min(rep.ric_inf - (scenario.params.n - 1) * scenario.params.kappa,
                     rep.h_inf - scenario.params.lambda);
        return CertifiedManifold{m, scenario.params, rep.ric_inf, rep.h_inf, margin,
                                 rep};
      }
    }();

    GeometryOptions geo = scenario.geometry;
    geo.threads = std::max(1, options.threads);
    TubeGeometry geom(std::move(cm), geo);

    SuiteConfig config = scenario.suite;
    config.tol_scale *= options.tol_scale;
    artifacts.suite = run_suite(geom, config);
    artifacts.has_suite = true;

    if ((scenario.dump_distance_field || options.dump_distance_field) &&
        geom.field() != nullptr)
      artifacts.distance_dump = geom.field()->dump_matrix();

    artifacts.report_csv = reports_to_csv(artifacts.suite.reports);

    nlohmann::ordered_json j;
    j["scenario"] = scenario.name;
    j["params"] = {{"n", scenario.params.n},
                   {"kappa", scenario.params.kappa},
                   {"lambda", scenario.params.lambda}};
    j["certification"] = {{"ric_inf", geom.certified().ric_inf},
                          {"h_inf", geom.certified().h_inf},
                          {"margin", geom.certified().certification_margin},
                          {"forced", scenario.force_certify}};
    const auto [inscribed, truncated] = geom.inscribed_radius();
    j["inscribed_radius"] = {{"value", inscribed}, {"truncated", truncated}};
    j["boundary_volume"] = boundary_volume(geom.certified().manifold);
    j["seed"] = options.seed.value_or(scenario.seed);
    j["suite"] = nlohmann::ordered_json::parse(suite_to_json(artifacts.suite));
    artifacts.report_json = j.dump(2) + "\n";

    artifacts.exit_code = artifacts.suite.all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    artifacts.exit_code = 2;
    artifacts.error = e.what();
  }
  return artifacts;
}

}  // namespace tubecomp
