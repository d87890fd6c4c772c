#include "tubecomp/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tubecomp/numerics.hpp"

namespace tubecomp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double pow_int(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fiber

Fiber Fiber::round_sphere(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("Fiber: sphere dimension must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("Fiber: sphere radius must be > 0");
  Fiber f;
  f.kind = Kind::round_sphere;
  f.dim = dim;
  f.radius = radius;
  return f;
}

Fiber Fiber::circle(double length) {
  if (!(length > 0.0)) throw std::invalid_argument("Fiber: circle length must be > 0");
  Fiber f;
  f.kind = Kind::circle;
  f.dim = 1;
  f.length = length;
  return f;
}

Fiber Fiber::flat_torus(std::vector<double> sides) {
  if (sides.empty()) throw std::invalid_argument("Fiber: torus needs side lengths");
  for (double s : sides)
    if (!(s > 0.0)) throw std::invalid_argument("Fiber: torus sides must be > 0");
  Fiber f;
  f.kind = Kind::flat_torus;
  f.dim = static_cast<int>(sides.size());
  f.side_lengths = std::move(sides);
  return f;
}

double Fiber::volume() const {
  switch (kind) {
    case Kind::round_sphere: {
      // vol(S^d, radius rho) = rho^d * 2 pi^{(d+1)/2} / Gamma((d+1)/2)
      const double unit = 2.0 * std::pow(kPi, 0.5 * (dim + 1)) /
                          std::tgamma(0.5 * (dim + 1));
      return std::pow(radius, dim) * unit;
    }
    case Kind::circle:
      return length;
    case Kind::flat_torus: {
      double v = 1.0;
      for (double s : side_lengths) v *= s;
      return v;
    }
  }
  return 0.0;
}

double Fiber::sectional_curvature() const {
  return kind == Kind::round_sphere ? 1.0 / (radius * radius) : 0.0;
}

double Fiber::parameter_period() const {
  return kind == Kind::circle ? length : 2.0 * kPi;
}

// ---------------------------------------------------------------------------
// WarpedTube

WarpedTube::WarpedTube(Fiber fiber, Expression warp, double length,
                       TubeTopology topology)
    : fiber_(std::move(fiber)),
      warp_(std::move(warp)),
      length_(length),
      topology_(topology),
      n_(fiber_.dim + 1) {
  if (warp_.uses_x())
    throw std::invalid_argument("WarpedTube: warp must be a function of t only");
  if (!(length_ > 0.0) || !std::isfinite(length_))
    throw std::invalid_argument("WarpedTube: length must be positive and finite");

  const int samples = 2048;
  for (int i = 0; i <= samples; ++i) {
    const double t = length_ * i / samples;
    const Jet j = warp_.jet_t(t);
    if (!std::isfinite(j.v) || !std::isfinite(j.d1) || !std::isfinite(j.d2))
      throw std::invalid_argument("WarpedTube: warp or derivative non-finite");
    const bool at_end = (i == samples);
    const bool zero_allowed = at_end && topology_ == TubeTopology::cap;
    if (!zero_allowed && !(j.v > 0.0)) {
      std::ostringstream msg;
      msg << "WarpedTube: warp must be positive, found " << j.v << " at t = " << t;
      throw std::invalid_argument(msg.str());
    }
  }

  if (topology_ == TubeTopology::cap) {
    if (fiber_.kind != Fiber::Kind::round_sphere)
      throw std::invalid_argument("WarpedTube: cap closure needs a round sphere fiber");
    const Jet end = warp_.jet_t(length_);
    if (std::abs(end.v) > 1e-9)
      throw std::invalid_argument("WarpedTube: cap requires warp(L) = 0");
    // Smooth closure of the cone point: |w'(L)| must equal 1/radius so the
    // metric caps off without a cone angle.
    if (std::abs(end.d1 + 1.0 / fiber_.radius) > 1e-9) {
      std::ostringstream msg;
      msg << "WarpedTube: cap closure needs warp'(L) = -1/radius, got " << end.d1;
      throw std::invalid_argument(msg.str());
    }
  }
}

double WarpedTube::boundary_warp(int component) const {
  if (component == 0) return warp(0.0);
  if (component == 1 && topology_ == TubeTopology::cylinder) return warp(length_);
  throw std::invalid_argument("WarpedTube: no such boundary component");
}

double WarpedTube::boundary_warp_inward_deriv(int component) const {
  if (component == 0) return warp_jet(0.0).d1;
  if (component == 1 && topology_ == TubeTopology::cylinder)
    return -warp_jet(length_).d1;
  throw std::invalid_argument("WarpedTube: no such boundary component");
}

double WarpedTube::boundary_mean_curvature(int component) const {
  return -boundary_warp_inward_deriv(component) / boundary_warp(component);
}

WarpedTube build_warped_tube(Fiber fiber, Expression warp, double length,
                             TubeTopology topology) {
  return WarpedTube(std::move(fiber), std::move(warp), length, topology);
}

// ---------------------------------------------------------------------------
// ChartSurface2D

ChartSurface2D::ChartSurface2D(Expression metric_coefficient, Expression beta_low,
                               Expression beta_high, double period)
    : metric_(std::move(metric_coefficient)),
      beta_low_(std::move(beta_low)),
      beta_high_(std::move(beta_high)),
      period_(period) {
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw std::invalid_argument("ChartSurface2D: period must be positive");
  if (beta_low_.uses_t() || beta_high_.uses_t())
    throw std::invalid_argument("ChartSurface2D: boundary graphs depend on x only");

  const int nx = 512;
  t_min_ = 1e300;
  t_max_ = -1e300;
  for (int j = 0; j <= nx; ++j) {
    const double x = period_ * j / nx;
    const double lo = beta_low_.eval(0.0, x), hi = beta_high_.eval(0.0, x);
    if (!(lo < hi)) {
      std::ostringstream msg;
      msg << "ChartSurface2D: boundary graphs cross at x = " << x;
      throw std::invalid_argument(msg.str());
    }
    t_min_ = std::min(t_min_, lo);
    t_max_ = std::max(t_max_, hi);
    for (int i = 0; i <= 32; ++i) {
      const double t = lo + (hi - lo) * i / 32;
      if (!(metric_.eval(t, x) > 0.0)) {
        std::ostringstream msg;
        msg << "ChartSurface2D: metric coefficient not positive at (t, x) = (" << t
            << ", " << x << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  // Periodicity of the data in x.
  for (const Expression* e : {&beta_low_, &beta_high_}) {
    if (std::abs(e->eval(0.0, 0.0) - e->eval(0.0, period_)) > 1e-9)
      throw std::invalid_argument("ChartSurface2D: boundary graph not periodic");
  }
  for (double t : {t_min_, 0.5 * (t_min_ + t_max_), t_max_}) {
    if (std::abs(metric_.eval(t, 0.0) - metric_.eval(t, period_)) > 1e-9)
      throw std::invalid_argument("ChartSurface2D: metric coefficient not periodic");
  }
}

double ChartSurface2D::beta(int component, double x) const {
  if (component == 0) return beta_low_.eval(0.0, x);
  if (component == 1) return beta_high_.eval(0.0, x);
  throw std::invalid_argument("ChartSurface2D: no such boundary component");
}

Jet ChartSurface2D::beta_jet(int component, double x) const {
  if (component == 0) return beta_low_.jet_x(0.0, x);
  if (component == 1) return beta_high_.jet_x(0.0, x);
  throw std::invalid_argument("ChartSurface2D: no such boundary component");
}

double ChartSurface2D::gauss_curvature(double t, double x) const {
  const Jet g = metric_.jet_t(t, x);
  const double root = std::sqrt(g.v);
  const double f_tt = g.d2 / (2.0 * root) - g.d1 * g.d1 / (4.0 * g.v * root);
  return -f_tt / root;
}

std::array<double, 2> ChartSurface2D::inner_normal(int component, double x) const {
  const Jet b = beta_jet(component, x);
  const double g = metric(b.v, x);
  const double norm = std::sqrt(g * (g + b.d1 * b.d1));
  if (component == 0) return {g / norm, -b.d1 / norm};
  return {-g / norm, b.d1 / norm};
}

double ChartSurface2D::boundary_mean_curvature(int component, double x) const {
  const Jet b = beta_jet(component, x);
  const Jet gt = metric_.jet_t(b.v, x);
  const Jet gx = metric_.jet_x(b.v, x);
  const double g = gt.v;
  // Covariant acceleration of the graph curve c(x) = (beta(x), x).
  const double acc_t = b.d2 - 0.5 * gt.d1;
  const double acc_x = (gt.d1 / g) * b.d1 + gx.d1 / (2.0 * g);
  const std::array<double, 2> u = inner_normal(component, x);
  const double speed2 = b.d1 * b.d1 + g;
  return (acc_t * u[0] + acc_x * u[1] * g) / speed2;
}

bool ChartSurface2D::inside(double t, double x, double slack) const {
  return t >= beta(0, x) - slack && t <= beta(1, x) + slack;
}

ChartSurface2D build_chart_surface(Expression metric_coefficient, Expression beta_low,
                                   Expression beta_high, double period) {
  return ChartSurface2D(std::move(metric_coefficient), std::move(beta_low),
                        std::move(beta_high), period);
}

// ---------------------------------------------------------------------------
// Shared manifold helpers

int boundary_components(const Manifold& m) {
  if (const auto* tube = std::get_if<WarpedTube>(&m)) return tube->boundary_components();
  return 2;
}

int manifold_dimension(const Manifold& m) {
  if (const auto* tube = std::get_if<WarpedTube>(&m)) return tube->dimension();
  return 2;
}

double RayProfile::theta_at(double t) const {
  if (times.empty()) throw std::logic_error("RayProfile: empty profile");
  if (t <= times.front()) return theta.front();
  if (t >= times.back()) return theta.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const size_t i = static_cast<size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return theta[i - 1] + w * (theta[i] - theta[i - 1]);
}

std::array<double, 2> RayProfile::point_at(double t) const {
  if (geodesic_points.empty())
    throw std::logic_error("RayProfile: no geodesic points recorded");
  if (t <= times.front()) return geodesic_points.front();
  if (t >= times.back()) return geodesic_points.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const size_t i = static_cast<size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return {geodesic_points[i - 1][0] +
              w * (geodesic_points[i][0] - geodesic_points[i - 1][0]),
          geodesic_points[i - 1][1] +
              w * (geodesic_points[i][1] - geodesic_points[i - 1][1])};
}

// ---------------------------------------------------------------------------
// Curvature report and certification

namespace {

CurvatureReport warped_curvature_report(const WarpedTube& tube, int samples) {
  const int n = tube.dimension();
  const double c_f = tube.fiber().sectional_curvature();
  CurvatureReport rep;
  rep.ric_inf = 1e300;
  rep.ric_worst_t = 0.0;
  rep.ric_worst_x = 0.0;
  const double L = tube.length();
  double w_max = 0.0;
  for (int i = 0; i <= samples; ++i) w_max = std::max(w_max, tube.warp(L * i / samples));
  for (int i = 0; i <= samples; ++i) {
    const double t = L * i / samples;
    const Jet w = tube.warp_jet(t);
    if (n > 2 && w.v < 1e-6 * w_max) continue;  // cone point of a cap
    // The Ricci form is diagonal in the frame {d_t, fiber directions}, so the
    // infimum over unit directions is the smaller of the two eigenvalues.
    const double radial = -(n - 1) * w.d2 / w.v;
    const double tangential =
        -w.d2 / w.v + (n - 2) * (c_f - w.d1 * w.d1) / (w.v * w.v);
    const double lo = std::min(radial, tangential);
    if (lo < rep.ric_inf) {
      rep.ric_inf = lo;
      rep.ric_worst_t = t;
    }
  }
  rep.h_inf = 1e300;
  for (int c = 0; c < tube.boundary_components(); ++c) {
    const double h = tube.boundary_mean_curvature(c);
    rep.components.push_back({h, h, 0.0});
    rep.h_inf = std::min(rep.h_inf, h);
  }
  rep.sample_tolerance = 0.0;
  return rep;
}

CurvatureReport chart_curvature_report(const ChartSurface2D& surf, int samples) {
  CurvatureReport rep;
  rep.ric_inf = 1e300;
  rep.ric_worst_t = 0.0;
  rep.ric_worst_x = 0.0;
  double max_step = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double x = surf.period() * j / samples;
    const double lo = surf.beta(0, x), hi = surf.beta(1, x);
    max_step = std::max(max_step, (hi - lo) / samples);
    for (int i = 0; i <= samples; ++i) {
      const double t = lo + (hi - lo) * i / samples;
      const double k = surf.gauss_curvature(t, x);
      if (!std::isfinite(k))
        throw std::runtime_error("curvature_report: non-finite curvature sample");
      if (k < rep.ric_inf) {
        rep.ric_inf = k;
        rep.ric_worst_t = t;
        rep.ric_worst_x = x;
      }
    }
  }
  rep.h_inf = 1e300;
  for (int c = 0; c < 2; ++c) {
    BoundaryCurvatureRange range{1e300, -1e300, 0.0};
    for (int j = 0; j < samples; ++j) {
      const double x = surf.period() * j / samples;
      const double h = surf.boundary_mean_curvature(c, x);
      if (h < range.h_min) {
        range.h_min = h;
        range.h_argmin_x = x;
      }
      range.h_max = std::max(range.h_max, h);
    }
    rep.components.push_back(range);
    rep.h_inf = std::min(rep.h_inf, range.h_min);
  }
  rep.sample_tolerance = max_step;  // grid density the sampled minima carry
  return rep;
}

}  // namespace

CurvatureReport curvature_report(const Manifold& m, int samples) {
  if (const auto* tube = std::get_if<WarpedTube>(&m))
    return warped_curvature_report(*tube, samples);
  return chart_curvature_report(std::get<ChartSurface2D>(m), samples);
}

CertifiedManifold certify_bounds(const Manifold& m, const ComparisonParams& params,
                                 double tol) {
  params.validate();
  if (manifold_dimension(m) != params.n)
    throw CertificationError("certify_bounds: dimension mismatch with parameters");
  CurvatureReport rep = curvature_report(m);
  const double ric_required = (params.n - 1) * params.kappa;
  const double ric_margin = rep.ric_inf - ric_required;
  const double h_margin = rep.h_inf - params.lambda;
  if (ric_margin < -tol) {
    std::ostringstream msg;
    msg << "Ricci bound violated: inf Ric = " << rep.ric_inf << " at t = "
        << rep.ric_worst_t << ", x = " << rep.ric_worst_x << ", required "
        << ric_required;
    throw CertificationError(msg.str());
  }
  if (h_margin < -tol) {
    std::ostringstream msg;
    msg << "mean curvature bound violated: inf H = " << rep.h_inf;
    for (size_t c = 0; c < rep.components.size(); ++c)
      if (rep.components[c].h_min == rep.h_inf)
        msg << " at boundary component " << c << ", x = "
            << rep.components[c].h_argmin_x;
    msg << ", required " << params.lambda;
    throw CertificationError(msg.str());
  }
  return CertifiedManifold{m, params, rep.ric_inf, rep.h_inf,
                           std::min(ric_margin, h_margin), rep};
}

// ---------------------------------------------------------------------------
// Normal ray profiles

namespace {

RayProfile warped_ray_profile(const WarpedTube& tube, int component, double x,
                              double t_max, double step) {
  const int n = tube.dimension();
  const double L = tube.length();
  if (component >= tube.boundary_components())
    throw std::invalid_argument("normal_ray_profile: no such boundary component");
  auto side_warp = [&](double s) {
    return component == 0 ? tube.warp(s) : tube.warp(L - s);
  };
  const double end = std::min(t_max, L);
  RayProfile ray;
  ray.component = component;
  ray.base_x = x;
  const double w0 = side_warp(0.0);
  const long nsteps = static_cast<long>(std::ceil(end / step - 1e-12));
  for (long i = 0; i <= nsteps; ++i) {
    const double s = std::min(end, i * step);
    ray.times.push_back(s);
    ray.theta.push_back(pow_int(side_warp(s) / w0, n - 1));
  }
  ray.exited = end < t_max;
  ray.exit_time = end;
  // First zero of the side warp beyond 0; exact at the cone point of a cap.
  ray.tau1 = ExtendedReal::infinity();
  for (size_t i = 1; i < ray.times.size(); ++i) {
    if (ray.theta[i] <= 0.0) {
      if (ray.theta[i] == 0.0) {
        ray.tau1 = ExtendedReal(ray.times[i]);
      } else {
        const double f0 = ray.theta[i - 1], f1 = ray.theta[i];
        ray.tau1 = ExtendedReal(ray.times[i - 1] +
                                (ray.times[i] - ray.times[i - 1]) * f0 / (f0 - f1));
      }
      break;
    }
  }
  if (!ray.tau1.is_finite() && tube.topology() == TubeTopology::cap &&
      component == 0 && end >= L - 1e-12)
    ray.tau1 = ExtendedReal(L);
  return ray;
}

RayProfile chart_ray_profile(const ChartSurface2D& surf, int component, double x0,
                             double t_max, double step) {
  RayProfile ray;
  ray.component = component;
  ray.base_x = x0;
  const std::array<double, 2> u = surf.inner_normal(component, x0);
  const double kg = surf.boundary_mean_curvature(component, x0);

  // State: (t, x, vt, vx, y, y') with the scalar Jacobi equation riding along.
  double s = 0.0;
  std::array<double, 6> y = {surf.beta(component, x0), x0, u[0], u[1], 1.0, -kg};
  auto deriv = [&](const std::array<double, 6>& st) {
    const Jet gt = surf.metric_jet_t(st[0], st[1]);
    const Jet gx = surf.metric_jet_x(st[0], st[1]);
    const double g = gt.v;
    const double K = surf.gauss_curvature(st[0], st[1]);
    return std::array<double, 6>{
        st[2],
        st[3],
        0.5 * gt.d1 * st[3] * st[3],
        -(gt.d1 / g) * st[2] * st[3] - gx.d1 / (2.0 * g) * st[3] * st[3],
        st[5],
        -K * st[4]};
  };

  ray.times.push_back(0.0);
  ray.theta.push_back(1.0);
  ray.geodesic_points.push_back({y[0], y[1]});
  const long nsteps = static_cast<long>(std::ceil(t_max / step - 1e-12));
  for (long i = 0; i < nsteps; ++i) {
    const double h = std::min(step, t_max - s);
    const auto k1 = deriv(y);
    std::array<double, 6> tmp;
    for (int j = 0; j < 6; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    const auto k2 = deriv(tmp);
    for (int j = 0; j < 6; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    const auto k3 = deriv(tmp);
    for (int j = 0; j < 6; ++j) tmp[j] = y[j] + h * k3[j];
    const auto k4 = deriv(tmp);
    for (int j = 0; j < 6; ++j) {
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!std::isfinite(y[j]))
        throw std::runtime_error("normal_ray_profile: non-finite geodesic state");
    }
    s += h;
    if (!surf.inside(y[0], y[1], 1e-9)) {
      ray.exited = true;
      ray.exit_time = s;
      break;
    }
    ray.times.push_back(s);
    ray.theta.push_back(y[4]);
    ray.geodesic_points.push_back({y[0], y[1]});
  }
  if (!ray.exited) ray.exit_time = s;

  ray.tau1 = ExtendedReal::infinity();
  for (size_t i = 1; i < ray.times.size(); ++i) {
    if (ray.theta[i] <= 0.0) {
      const double f0 = ray.theta[i - 1], f1 = ray.theta[i];
      const double root =
          f1 == 0.0 ? ray.times[i]
                    : ray.times[i - 1] +
                          (ray.times[i] - ray.times[i - 1]) * f0 / (f0 - f1);
      ray.tau1 = ExtendedReal(root);
      break;
    }
  }
  return ray;
}

}  // namespace

RayProfile normal_ray_profile(const Manifold& m, int component, double x,
                              double t_max, double step) {
  if (!(t_max > 0.0) || !(step > 0.0))
    throw std::invalid_argument("normal_ray_profile: t_max, step must be positive");
  if (const auto* tube = std::get_if<WarpedTube>(&m))
    return warped_ray_profile(*tube, component, x, t_max, step);
  return chart_ray_profile(std::get<ChartSurface2D>(m), component, x, t_max, step);
}

// ---------------------------------------------------------------------------
// Boundary volume and the Gauss identity

double boundary_volume(const Manifold& m) {
  if (const auto* tube = std::get_if<WarpedTube>(&m)) {
    double total = 0.0;
    for (int c = 0; c < tube->boundary_components(); ++c)
      total += pow_int(tube->boundary_warp(c), tube->dimension() - 1) *
               tube->fiber().volume();
    return total;
  }
  const auto& surf = std::get<ChartSurface2D>(m);
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    total += numerics::integrate(
        [&](double x) {
          const Jet b = surf.beta_jet(c, x);
          return std::sqrt(b.d1 * b.d1 + surf.metric(b.v, x));
        },
        0.0, surf.period());
  }
  return total;
}

GaussRicciSides gauss_boundary_ricci_sides(const WarpedTube& tube, int component) {
  const int n = tube.dimension();
  const double c_f = tube.fiber().sectional_curvature();
  const double w0 = tube.boundary_warp(component);
  const double wp = tube.boundary_warp_inward_deriv(component);
  const double wpp = component == 0 ? tube.warp_jet(0.0).d2
                                    : tube.warp_jet(tube.length()).d2;
  const double lhs = (n - 2) * c_f / (w0 * w0);
  // Right-hand side assembled term by term from the ambient data.
  const double ric_u = -wpp / w0 + (n - 2) * (c_f - wp * wp) / (w0 * w0);
  const double sec_nu = -wpp / w0;
  const double shape_eig = -wp / w0;  // A = shape_eig * Id
  const double trace_a_s = (n - 1) * shape_eig * shape_eig;
  const double sum_s = shape_eig * shape_eig;
  return {lhs, ric_u - sec_nu + trace_a_s - sum_s};
}

}  // namespace tubecomp
