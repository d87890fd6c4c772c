#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "tubecomp/verifiers.hpp"

using namespace tubecomp;

namespace {

TubeGeometry annulus_geometry() {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("1+t"),
                                2.0, TubeTopology::cylinder);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, 0, -1)));
}

TubeGeometry flat_cylinder_geometry() {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("1"), 2.0,
                                TubeTopology::cylinder);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, 0, 0)));
}

TubeGeometry collar_geometry() {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("exp(-t)"),
                                40.0, TubeTopology::half_infinite);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, -1, 1)));
}

TubeGeometry hemisphere_geometry() {
  auto tube = build_warped_tube(Fiber::round_sphere(1, 1), Expression::parse("cos(t)"),
                                M_PI / 2, TubeTopology::cap);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, 1, 0)));
}

TubeGeometry wavy_geometry(double lambda_slack) {
  auto surf = build_chart_surface(Expression::parse("1"),
                                  Expression::parse("0.2*sin(x)"),
                                  Expression::parse("2"), 2 * M_PI);
  GeometryOptions opts;
  opts.boundary_samples = 128;
  opts.grid_nt = 129;
  opts.grid_nx = 128;
  opts.ode_step = 2e-3;
  return TubeGeometry(
      certify_bounds(Manifold(surf), ComparisonParams(2, 0, lambda_slack)), opts);
}

// Annulus claimed with lambda = 0: certification would fail, so assemble the
// certified wrapper by hand to exercise the battery's negative control.
TubeGeometry miscertified_annulus() {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("1+t"),
                                2.0, TubeTopology::cylinder);
  Manifold m(tube);
  CurvatureReport rep = curvature_report(m);
  CertifiedManifold cm{m, ComparisonParams(2, 0, 0), rep.ric_inf, rep.h_inf, -1.0,
                       rep};
  return TubeGeometry(std::move(cm));
}

}  // namespace

TEST_CASE("model equality: collar margins vanish") {
  auto collar = collar_geometry();
  CHECK(std::abs(check_log_jacobian(collar).worst_margin) <= 1e-6);
  CHECK(std::abs(check_relative_jacobian(collar).worst_margin) <= 1e-6);
  CHECK(std::abs(check_volume_comparison(collar).worst_margin) <= 1e-6);
  CHECK(std::abs(check_heintze_karcher(collar).worst_margin) <= 1e-6);
  for (double t : {0.25, 0.5, 0.75}) {
    auto rep = check_measure_contraction(collar, t, RadialBand(0, 1));
    CHECK(std::abs(rep.worst_margin) <= 1e-6);
  }
}

TEST_CASE("model equality: hemisphere margins vanish") {
  auto hemi = hemisphere_geometry();
  CHECK(std::abs(check_log_jacobian(hemi).worst_margin) <= 1e-6);
  CHECK(std::abs(check_relative_jacobian(hemi).worst_margin) <= 1e-6);
  CHECK(std::abs(check_volume_comparison(hemi).worst_margin) <= 1e-6);
  auto inscribed = check_inscribed_radius(hemi);
  CHECK_FALSE(inscribed.skipped);
  CHECK(std::abs(inscribed.worst_margin) <= inscribed.tolerance);
}

TEST_CASE("annulus: comparison checks pass with the expected structure") {
  auto annulus = annulus_geometry();
  auto log_j = check_log_jacobian(annulus);
  CHECK(log_j.pass);
  CHECK(std::abs(log_j.worst_margin) <= 1e-6);  // inner side is an equality case
  auto rel = check_relative_jacobian(annulus);
  CHECK(rel.pass);
  CHECK(std::abs(rel.worst_margin) <= 1e-6);
  CHECK(check_volume_comparison(annulus).pass);
  CHECK(check_heintze_karcher(annulus).pass);
  CHECK(check_volume_growth(annulus).pass);
  CHECK(check_inscribed_radius(annulus).skipped);  // ball condition fails
  auto mcp = check_measure_contraction(annulus, 0.5, RadialBand(0.25, 0.75));
  CHECK(mcp.pass);
}

TEST_CASE("measure contraction closed form on the flat cylinder") {
  auto flat = flat_cylinder_geometry();
  auto rep = check_measure_contraction(flat, 0.5, RadialBand(0.25, 0.75));
  CHECK(std::abs(rep.worst_margin) <= 1e-8);
  CHECK(flat.extension_preimage_volume(0.5, RadialBand(0.25, 0.75)) ==
        doctest::Approx(M_PI).epsilon(1e-10));
}

TEST_CASE("annulus chain: margins nonnegative, bound decreasing to the model ratio") {
  auto annulus = annulus_geometry();
  auto rep = check_annulus_chain(annulus, 0.5, 0.25, 0.75, 4);
  CHECK(rep.pass);
  CHECK(rep.worst_margin >= -rep.tolerance);

  const ComparisonParams p(2, 0, -1);
  const double actual = annulus.tube_volume(0.75) / annulus.tube_volume(0.25);
  const double model = kernels::model_ratio(p, 0.25, 0.75);
  double prev = 1e300;
  for (int n = 16; n <= 4096; n *= 2) {
    const double bound = chain_refinement_bound(p, 0.25, 0.75, n);
    CHECK(bound >= actual - 1e-9);
    CHECK(bound <= prev + 1e-12);
    prev = bound;
  }
  CHECK(std::abs(prev / model - 1.0) <= 0.01);
}

TEST_CASE("chain bounds on the collar and flat cylinder") {
  auto collar = collar_geometry();
  auto rep = check_annulus_chain(collar, 0.5, 0.25, 0.5, 3);
  CHECK(rep.pass);
  auto flat = flat_cylinder_geometry();
  auto repf = check_annulus_chain(flat, 0.5, 0.25, 0.5, 3);
  CHECK(repf.pass);
}

TEST_CASE("segment inequality") {
  auto flat = flat_cylinder_geometry();
  std::vector<Expression> fs = {Expression::parse("1"), Expression::parse("0"),
                                Expression::parse("t")};
  auto rep = check_segment(flat, fs);
  CHECK(rep.pass);
  // f = 1: int rho dvol = 2 pi vs C1 D vol = 4 pi.
  auto one_only = check_segment(flat, {Expression::parse("1")});
  CHECK(one_only.worst_margin == doctest::Approx(0.5).epsilon(1e-3));
  auto annulus = annulus_geometry();
  CHECK(check_segment(annulus, {Expression::parse("t")}).pass);
}

TEST_CASE("poincare inequality") {
  auto flat = flat_cylinder_geometry();
  std::vector<TrialFunction> psis = {
      TrialFunction::radial(Expression::parse("t")),
      TrialFunction::symbolic(Expression::parse("sin(pi*t/2)"))};
  auto rep = check_poincare(flat, psis);
  CHECK(rep.pass);
  CHECK_THROWS(check_poincare(flat, {TrialFunction::symbolic(Expression::parse("1+t"))}));
  // Identically zero trial: both sides vanish, margin is zero, still a pass.
  auto zero = check_poincare(flat, {TrialFunction::radial(Expression::parse("0*t"))});
  CHECK(zero.pass);
  CHECK(zero.worst_margin == 0.0);
}

TEST_CASE("isoperimetric bands") {
  auto annulus = annulus_geometry();
  auto rep = check_isoperimetric(annulus, {{0, 0.2, 0.8}, {1, 0.2, 0.8}});
  CHECK(rep.pass);
  auto degenerate = check_isoperimetric(annulus, {{0, 0.3, 0.3}});
  CHECK(degenerate.pass);
  CHECK(degenerate.worst_margin == 0.0);
  CHECK_THROWS(check_isoperimetric(annulus, {{0, 0.2, 1.5}}));
  auto collar = collar_geometry();
  CHECK(check_isoperimetric(collar, {{0, 0.0, 1.0}}).pass);
}

TEST_CASE("eigen bounds: annulus and flat strip") {
  auto annulus = annulus_geometry();
  std::vector<TrialFunction> trials = {TrialFunction::radial(Expression::parse("t"))};
  auto rep = check_eigen_bounds(annulus, {2.0, 3.0}, trials);
  CHECK(rep.pass);
  CHECK(rep.note.find("dirichlet=0.111") != std::string::npos);
  auto flat = flat_cylinder_geometry();
  auto repf = check_eigen_bounds(flat, {2.0}, trials);
  CHECK(repf.pass);
  CHECK(repf.note.find("mu=2.4674") != std::string::npos);
}

TEST_CASE("eigen bounds: truncated collar rigid case") {
  auto collar = collar_geometry();
  std::vector<TrialFunction> trials = {
      TrialFunction::radial(Expression::parse("t")),
      TrialFunction::radial(Expression::parse("t*exp(t/2)"))};
  auto rep = check_eigen_bounds(collar, {2.0, 3.0}, trials);
  CHECK(rep.pass);
  CHECK_FALSE(rep.skipped);
}

TEST_CASE("rigidity detection") {
  auto collar = collar_geometry();
  auto vc = detect_rigidity(collar, 1e-4);
  CHECK(vc.kind == RigidityVerdict::Kind::volume_growth_splitting);
  CHECK(vc.sup_deviation <= 1e-6);

  auto hemi = hemisphere_geometry();
  auto vh = detect_rigidity(hemi, 1e-4);
  CHECK(vh.kind == RigidityVerdict::Kind::ball_space_form);

  // The annulus matches the comparison Jacobian on the inner side only, so
  // no rigidity verdict may fire.
  auto annulus = annulus_geometry();
  auto va = detect_rigidity(annulus, 1e-4);
  CHECK(va.kind == RigidityVerdict::Kind::none);

  // The flat cylinder is the two-sided product [0,2] x S^1: theta matches
  // s_{0,0} everywhere and the volume growth saturates at equality.
  auto flat = flat_cylinder_geometry();
  auto vf = detect_rigidity(flat, 1e-4);
  CHECK(vf.kind == RigidityVerdict::Kind::volume_growth_splitting);
  CHECK(vf.sup_deviation <= 1e-9);

  // Strictness: wavy boundary with curvature slack >= 0.1 must not fire.
  auto wavy = wavy_geometry(-0.3);
  auto vw = detect_rigidity(wavy, 1e-4);
  CHECK(vw.kind == RigidityVerdict::Kind::none);
  CHECK(vw.sup_deviation > 0.01);
}

TEST_CASE("rigidity fires on the 3-D collar (theta carries the power n-1)") {
  auto tube = build_warped_tube(Fiber::round_sphere(2, 1), Expression::parse("exp(-t)"),
                                30.0, TubeTopology::half_infinite);
  GeometryOptions opts;
  opts.t_truncation = 30.0;
  TubeGeometry geom(certify_bounds(Manifold(tube), ComparisonParams(3, -1, 1)),
                    opts);
  auto verdict = detect_rigidity(geom, 1e-4);
  CHECK(verdict.kind == RigidityVerdict::Kind::volume_growth_splitting);
  CHECK(verdict.sup_deviation <= 1e-9);
}

TEST_CASE("complement rigidity: exterior of the unit disk") {
  // Half-infinite tube w = 1 + t over a unit circle: the flat plane minus the
  // open unit disk. Splitting fires and the boundary volume matches the
  // complementary model sphere, so the complement condition is recorded.
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("1+t"),
                                30.0, TubeTopology::half_infinite);
  GeometryOptions opts;
  opts.t_truncation = 30.0;
  TubeGeometry geom(certify_bounds(Manifold(tube), ComparisonParams(2, 0, -1)),
                    opts);
  auto verdict = detect_rigidity(geom, 1e-4);
  CHECK(verdict.kind == RigidityVerdict::Kind::volume_growth_splitting);
  bool complement = false;
  for (const auto& s : verdict.supporting)
    if (s == "complement_boundary_volume") complement = true;
  CHECK(complement);
}

TEST_CASE("full battery: annulus passes, collar passes and fires rigidity") {
  SuiteConfig config;
  auto annulus = annulus_geometry();
  auto result = run_suite(annulus, config);
  CHECK(result.all_pass);
  CHECK(result.reports.size() >= 10);

  SuiteConfig collar_config;
  collar_config.bands = {RadialBand(0, 1)};
  collar_config.trials = {TrialFunction::radial(Expression::parse("t")),
                          TrialFunction::radial(Expression::parse("t*exp(t/2)"))};
  auto collar = collar_geometry();
  auto cres = run_suite(collar, collar_config);
  CHECK(cres.all_pass);
  CHECK(cres.verdict.kind == RigidityVerdict::Kind::volume_growth_splitting);
  for (const auto& rep : cres.reports) {
    if (rep.check == "log_jacobian" || rep.check == "relative_jacobian" ||
        rep.check == "volume_comparison" || rep.check == "heintze_karcher" ||
        rep.check == "measure_contraction")
      CHECK(std::abs(rep.worst_margin) <= 1e-6);
  }
}

TEST_CASE("battery on the wavy chart passes with strict margins") {
  auto wavy = wavy_geometry(-0.25);
  SuiteConfig config;
  config.t_values = {0.5};
  auto result = run_suite(wavy, config);
  for (const auto& rep : result.reports) {
    INFO(rep.name, " margin=", rep.worst_margin, " tol=", rep.tolerance);
    CHECK(rep.pass);
  }
  CHECK(result.verdict.kind == RigidityVerdict::Kind::none);
}

TEST_CASE("negative control: mis-declared annulus fails at least one check") {
  auto bad = miscertified_annulus();
  SuiteConfig config;
  auto result = run_suite(bad, config);
  CHECK_FALSE(result.all_pass);
  bool log_jacobian_failed = false;
  for (const auto& rep : result.reports)
    if (rep.check == "log_jacobian" && !rep.pass) log_jacobian_failed = true;
  CHECK(log_jacobian_failed);
}

TEST_CASE("report serialization") {
  auto flat = flat_cylinder_geometry();
  SuiteConfig config;
  config.t_values = {0.5};
  auto result = run_suite(flat, config);
  const std::string csv = reports_to_csv(result.reports);
  CHECK(csv.find("check,name,margin,location_t,location_x,tolerance,status") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(result.reports.size()) + 1);
  const std::string json = suite_to_json(result);
  CHECK(json.find("\"rigidity\"") != std::string::npos);
  CHECK(json.find("\"all_pass\"") != std::string::npos);
}
