#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tubecomp/kernels.hpp"
#include "tubecomp/numerics.hpp"
#include "tubecomp/tube_geometry.hpp"

using namespace tubecomp;

namespace {

TubeGeometry annulus_geometry(GeometryOptions opts = {}) {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("1+t"),
                                2.0, TubeTopology::cylinder);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, 0, -1)),
                      opts);
}

TubeGeometry flat_cylinder_geometry(GeometryOptions opts = {}) {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("1"), 2.0,
                                TubeTopology::cylinder);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, 0, 0)),
                      opts);
}

TubeGeometry collar_geometry(double t_max = 40.0) {
  auto tube = build_warped_tube(Fiber::circle(2 * M_PI), Expression::parse("exp(-t)"),
                                t_max, TubeTopology::half_infinite);
  GeometryOptions opts;
  opts.t_truncation = t_max;
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, -1, 1)),
                      opts);
}

TubeGeometry hemisphere_geometry() {
  auto tube = build_warped_tube(Fiber::round_sphere(1, 1), Expression::parse("cos(t)"),
                                M_PI / 2, TubeTopology::cap);
  return TubeGeometry(certify_bounds(Manifold(tube), ComparisonParams(2, 1, 0)));
}

TubeGeometry chart_geometry(const char* g, GeometryOptions opts = {}) {
  auto surf = build_chart_surface(Expression::parse(g), Expression::parse("0"),
                                  Expression::parse("2"), 2 * M_PI);
  ComparisonParams params(2, 0, g[0] == '1' ? 0 : -1);
  return TubeGeometry(certify_bounds(Manifold(surf), params), opts);
}

}  // namespace

TEST_CASE("tube_volume: closed forms") {
  auto annulus = annulus_geometry();
  CHECK(annulus.tube_volume(0.5) == doctest::Approx(4 * M_PI).epsilon(1e-9));
  auto flat = flat_cylinder_geometry();
  CHECK(flat.tube_volume(1.5) == doctest::Approx(4 * M_PI).epsilon(1e-10));
  CHECK(flat.tube_volume(7.0) == doctest::Approx(4 * M_PI).epsilon(1e-10));
  auto collar = collar_geometry();
  CHECK(collar.tube_volume(1.0) ==
        doctest::Approx(2 * M_PI * (1 - std::exp(-1.0))).epsilon(1e-9));
}

TEST_CASE("annulus_volume") {
  auto annulus = annulus_geometry();
  CHECK(annulus.annulus_volume(RadialBand(0.25, 0.75)) ==
        doctest::Approx(4 * M_PI).epsilon(1e-9));
  CHECK(annulus.annulus_volume(RadialBand(0.25, 0.25 + 1e-9)) ==
        doctest::Approx(0.0).epsilon(1e-6));
  auto collar = collar_geometry();
  CHECK(collar.annulus_volume(RadialBand(1, 2)) ==
        doctest::Approx(2 * M_PI * (std::exp(-1.0) - std::exp(-2.0))).epsilon(1e-9));
  CHECK_THROWS(RadialBand(0.5, 0.5));
}

TEST_CASE("inscribed_radius") {
  auto annulus = annulus_geometry();
  CHECK(annulus.inscribed_radius().first == doctest::Approx(1.0));
  CHECK_FALSE(annulus.inscribed_radius().second);
  auto hemi = hemisphere_geometry();
  CHECK(hemi.inscribed_radius().first == doctest::Approx(M_PI / 2));
  auto collar = collar_geometry();
  CHECK(collar.inscribed_radius().first == doctest::Approx(40.0));
  CHECK(collar.inscribed_radius().second);
}

TEST_CASE("volume table is monotone and saturates at the inscribed radius") {
  auto annulus = annulus_geometry();
  auto table = annulus.volume_table(16, 2.0);
  for (size_t i = 1; i < table.volumes.size(); ++i)
    CHECK(table.volumes[i] >= table.volumes[i - 1] - 1e-12);
  CHECK(annulus.tube_volume(1.0) == doctest::Approx(annulus.tube_volume(5.0)));
  const std::string csv = table.to_csv();
  CHECK(csv.find("r,volume,method") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}

TEST_CASE("extension_preimage_volume: closed forms") {
  auto flat = flat_cylinder_geometry();
  CHECK(flat.extension_preimage_volume(0.5, RadialBand(0.25, 0.75)) ==
        doctest::Approx(M_PI).epsilon(1e-10));
  auto annulus = annulus_geometry();
  CHECK(annulus.extension_preimage_volume(0.5, RadialBand(0.25, 0.75)) ==
        doctest::Approx(2 * M_PI).epsilon(1e-9));
  CHECK(annulus.extension_preimage_volume(0.5, RadialBand(1.5, 1.8)) == 0.0);
  CHECK_THROWS(annulus.extension_preimage_volume(1.5, RadialBand(0.25, 0.75)));
}

TEST_CASE("preimage is contained in the scaled annulus") {
  auto annulus = annulus_geometry();
  auto flat = flat_cylinder_geometry();
  for (double t : {0.25, 0.5, 0.75}) {
    for (const auto& band : {RadialBand(0.25, 0.75), RadialBand(0.1, 0.9)}) {
      const RadialBand scaled(t * band.inner, t * band.outer);
      CHECK(annulus.extension_preimage_volume(t, band) <=
            annulus.annulus_volume(scaled) + 1e-9);
      CHECK(flat.extension_preimage_volume(t, band) <=
            flat.annulus_volume(scaled) + 1e-9);
    }
  }
}

TEST_CASE("segment_excursion") {
  auto flat = flat_cylinder_geometry();
  CHECK(flat.segment_excursion(Expression::parse("1"), 0.8, 1.0) ==
        doctest::Approx(0.8).epsilon(1e-9));
  CHECK(flat.segment_excursion(Expression::parse("0"), 0.8, 1.0) ==
        doctest::Approx(0.0));
  CHECK(flat.segment_excursion(Expression::parse("t"), 0.8, 1.0) ==
        doctest::Approx(0.32).epsilon(1e-9));
  // Positive homogeneity.
  const double e1 = flat.segment_excursion(Expression::parse("t"), 0.6, 2.0);
  const double e3 = flat.segment_excursion(Expression::parse("3*t"), 0.6, 2.0);
  CHECK(e3 == doctest::Approx(3.0 * e1).epsilon(1e-12));
  // Chart path with unique foot point.
  auto chart = chart_geometry("1");
  CHECK(chart.segment_excursion(Expression::parse("t"), 0.8, 1.0) ==
        doctest::Approx(0.32).epsilon(2e-2));
}

TEST_CASE("rayleigh_quotient: scaling invariance and flat strip") {
  auto flat = flat_cylinder_geometry();
  auto psi = TrialFunction::symbolic(Expression::parse("sin(pi*t/2)"));
  auto psi7 = TrialFunction::symbolic(Expression::parse("7*sin(pi*t/2)"));
  const double r = flat.rayleigh_quotient(psi, 2.0);
  CHECK(flat.rayleigh_quotient(psi7, 2.0) == doctest::Approx(r).epsilon(1e-10));
  CHECK(r == doctest::Approx(M_PI * M_PI / 4).epsilon(1e-6));
  CHECK_THROWS(flat.rayleigh_quotient(
      TrialFunction::symbolic(Expression::parse("1+t")), 2.0));
  // Identically zero trial: boundary vanishing holds, denominator does not.
  CHECK_THROWS(flat.rayleigh_quotient(
      TrialFunction::radial(Expression::parse("0*t")), 2.0));
}

TEST_CASE("rayleigh_quotient: truncated collar matches the analytic truncation") {
  // With psi = phi o rho on the collar truncated at T, both Rayleigh
  // integrals are polynomials in T and the quotient is
  // (T + T^2/2 + T^3/12)/(T^3/3) = 1/4 + 3/(2T) + 3/T^2.
  double prev = 1e300;
  for (double T : {10.0, 20.0, 40.0}) {
    auto collar = collar_geometry(T);
    auto phi = TrialFunction::radial(Expression::parse("t*exp(t/2)"));
    const double r = collar.rayleigh_quotient(phi, 2.0);
    const double analytic = 0.25 + 1.5 / T + 3.0 / (T * T);
    CHECK(r == doctest::Approx(analytic).epsilon(1e-6));
    CHECK(r >= 0.25);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("dirichlet_eigen: warped families") {
  auto flat = flat_cylinder_geometry();
  CHECK(flat.dirichlet_eigen() == doctest::Approx(M_PI * M_PI / 4).epsilon(1e-4));
  auto hemi = hemisphere_geometry();
  CHECK(hemi.dirichlet_eigen() == doctest::Approx(2.0).epsilon(0.01));
  auto annulus = annulus_geometry();
  const double mu = annulus.dirichlet_eigen();
  CHECK(mu >= 1.0 / 9.0);
  // Fine-grid oracle: 4x the default resolution, same discretization family.
  const double oracle =
      numerics::min_eigen_sturm_liouville([](double t) { return 1.0 + t; }, 0.0,
                                          2.0, 4096)
          .mu;
  CHECK(mu == doctest::Approx(oracle).epsilon(5e-3));
  CHECK_THROWS(collar_geometry().dirichlet_eigen());
}

TEST_CASE("dirichlet_eigen: chart grid path") {
  auto chart = chart_geometry("1");
  CHECK(chart.dirichlet_eigen() == doctest::Approx(M_PI * M_PI / 4).epsilon(0.01));
}

TEST_CASE("variational bound: Rayleigh quotients dominate the eigenvalue") {
  auto flat = flat_cylinder_geometry();
  const double mu = flat.dirichlet_eigen();
  for (const char* expr : {"sin(pi*t/2)", "t*(2-t)", "sin(pi*t/2)+0.1*sin(3*pi*t/2)"}) {
    const double r =
        flat.rayleigh_quotient(TrialFunction::symbolic(Expression::parse(expr)), 2.0);
    CHECK(r >= mu * (1.0 - 0.01));
  }
}

TEST_CASE("cross-validation: coarea volumes vs grid volumes on charts") {
  for (const char* g : {"1", "(1+t)^2"}) {
    GeometryOptions opts;
    opts.boundary_samples = 256;
    opts.grid_nt = 129;
    opts.grid_nx = 128;
    auto geom = chart_geometry(g, opts);
    for (int i = 1; i <= 10; ++i) {
      const double r = 0.1 * i * 1.3;
      const double coarea = geom.tube_volume(r);
      const double grid = geom.tube_volume_grid(r);
      CHECK(std::abs(coarea - grid) <= 0.01 * grid);
    }
  }
}

TEST_CASE("interior_integral matches closed forms on the annulus") {
  auto annulus = annulus_geometry();
  // Total area: 2 pi * integral of (1+t) over [0,2] = 8 pi.
  CHECK(annulus.interior_integral([](double, double) { return 1.0; }) ==
        doctest::Approx(8 * M_PI).epsilon(1e-9));
  // x-dependent integrand: mean of sin^2 over the circle is 1/2.
  CHECK(annulus.interior_integral(
            [](double, double x) { return std::sin(x) * std::sin(x); }) ==
        doctest::Approx(4 * M_PI).epsilon(1e-6));
}
