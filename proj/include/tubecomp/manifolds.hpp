#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "tubecomp/expression.hpp"
#include "tubecomp/extended_real.hpp"
#include "tubecomp/params.hpp"

namespace tubecomp {

/// Closed fiber of a warped tube; curvature and volume are closed forms.
struct Fiber {
  enum class Kind { round_sphere, circle, flat_torus };
  Kind kind = Kind::circle;
  int dim = 1;
  double radius = 1.0;                // round_sphere
  double length = 2.0 * 3.14159265358979323846;  // circle
  std::vector<double> side_lengths;   // flat_torus

  static Fiber round_sphere(int dim, double radius);
  static Fiber circle(double length);
  static Fiber flat_torus(std::vector<double> sides);

  double volume() const;
  double sectional_curvature() const;
  /// Period of the single boundary parameter used for sampling; for the
  /// circle this is the circumference of the unweighted fiber, otherwise a
  /// formal period (fiber-symmetric integrands only).
  double parameter_period() const;
};

enum class TubeTopology { cylinder, cap, half_infinite };

/// Warped product [0, L] x_w F with metric dt^2 + w(t)^2 h_F. The boundary
/// sits at t = 0 (component 0) and, for cylinders, at t = L (component 1).
class WarpedTube {
 public:
  WarpedTube(Fiber fiber, Expression warp, double length, TubeTopology topology);

  const Fiber& fiber() const { return fiber_; }
  const Expression& warp_expr() const { return warp_; }
  double length() const { return length_; }
  TubeTopology topology() const { return topology_; }
  int dimension() const { return n_; }

  double warp(double t) const { return warp_.eval(t); }
  Jet warp_jet(double t) const { return warp_.jet_t(t); }

  int boundary_components() const {
    return topology_ == TubeTopology::cylinder ? 2 : 1;
  }
  /// Warp value at a boundary component.
  double boundary_warp(int component) const;
  /// Inward-pointing warp derivative at a boundary component (d/ds of the
  /// warp along the inward Fermi coordinate of that side).
  double boundary_warp_inward_deriv(int component) const;
  /// Mean curvature of a boundary component with respect to the inner normal.
  double boundary_mean_curvature(int component) const;

 private:
  Fiber fiber_;
  Expression warp_;
  double length_;
  TubeTopology topology_;
  int n_;
};

/// 2-D Fermi-type chart dt^2 + G(t,x) dx^2 on {beta_low(x) <= t <= beta_high(x)},
/// periodic in x with the given period. Gauss curvature is -(d^2_t sqrt G)/sqrt G.
class ChartSurface2D {
 public:
  ChartSurface2D(Expression metric_coefficient, Expression beta_low,
                 Expression beta_high, double period);

  const Expression& metric_expr() const { return metric_; }
  double period() const { return period_; }
  double metric(double t, double x) const { return metric_.eval(t, x); }
  Jet metric_jet_t(double t, double x) const { return metric_.jet_t(t, x); }
  Jet metric_jet_x(double t, double x) const { return metric_.jet_x(t, x); }

  double beta(int component, double x) const;
  Jet beta_jet(int component, double x) const;

  double gauss_curvature(double t, double x) const;
  /// Geodesic curvature of a boundary graph with respect to the inner normal
  /// (equals the boundary mean curvature, n = 2).
  double boundary_mean_curvature(int component, double x) const;
  /// Inner unit normal (u_t, u_x) at a boundary-graph point.
  std::array<double, 2> inner_normal(int component, double x) const;

  bool inside(double t, double x, double slack = 0.0) const;
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

 private:
  Expression metric_, beta_low_, beta_high_;
  double period_;
  double t_min_, t_max_;
};

using Manifold = std::variant<WarpedTube, ChartSurface2D>;

int boundary_components(const Manifold& m);
int manifold_dimension(const Manifold& m);

/// One normal ray: theta(t, x) samples, first conjugate value, and (for
/// charts) the geodesic path in chart coordinates.
struct RayProfile {
  int component = 0;
  double base_x = 0.0;
  std::vector<double> times;
  std::vector<double> theta;
  ExtendedReal tau1 = ExtendedReal::infinity();
  std::vector<std::array<double, 2>> geodesic_points;  // chart class only
  bool exited = false;   // chart geodesic left the region before t_max
  double exit_time = 0.0;

  double end_time() const { return times.back(); }
  double theta_at(double t) const;
  std::array<double, 2> point_at(double t) const;  // chart class only
};

struct BoundaryCurvatureRange {
  double h_min;
  double h_max;
  double h_argmin_x;
};

struct CurvatureReport {
  double ric_inf;
  double h_inf;
  double ric_worst_t;
  double ric_worst_x;
  std::vector<BoundaryCurvatureRange> components;
  double sample_tolerance;  // grid-sampling slack the certification carries
};

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Certified pairing of a manifold with comparison bounds it satisfies.
struct CertifiedManifold {
  Manifold manifold;
  ComparisonParams params;
  double ric_inf;
  double h_inf;
  double certification_margin;
  CurvatureReport report;
};

WarpedTube build_warped_tube(Fiber fiber, Expression warp, double length,
                             TubeTopology topology);
ChartSurface2D build_chart_surface(Expression metric_coefficient, Expression beta_low,
                                   Expression beta_high, double period);

CurvatureReport curvature_report(const Manifold& m, int samples = 512);

/// Checks ric_inf >= (n-1) kappa - tol and h_inf >= lambda - tol; throws
/// CertificationError naming the violated bound and worst sample otherwise.
CertifiedManifold certify_bounds(const Manifold& m, const ComparisonParams& params,
                                 double tol = 1e-9);

RayProfile normal_ray_profile(const Manifold& m, int component, double x,
                              double t_max, double step);

double boundary_volume(const Manifold& m);

struct GaussRicciSides {
  double lhs;
  double rhs;
};

/// Both sides of the Gauss-formula Ricci identity for the boundary of a
/// warped tube, assembled term by term. They must agree identically.
GaussRicciSides gauss_boundary_ricci_sides(const WarpedTube& tube, int component = 0);

}  // namespace tubecomp
