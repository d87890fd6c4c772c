#include "tubecomp/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "tubecomp/numerics.hpp"

namespace tubecomp {

namespace {

namespace kn = tubecomp::kernels;

double pow_int(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

double sn(const ComparisonParams& p, double t) {
  return pow_int(kn::s_boundary(p, t).value, p.n - 1);
}

double sn_deriv(const ComparisonParams& p, double t) {
  const auto s = kn::s_boundary(p, t);
  return (p.n - 1) * pow_int(s.value, p.n - 2) * s.deriv;
}

// Rays are identical across samples on warped tubes; iterate one per side.
int effective_samples(const TubeGeometry& g) {
  return g.tube() ? 1 : g.sample_count();
}

double total_side_weight(const TubeGeometry& g, int component) {
  double w = 0.0;
  for (int k = 0; k < g.sample_count(); ++k) w += g.sample_weight(component, k);
  return w;
}

CheckReport make_report(std::string check, std::string name, double tol) {
  CheckReport r;
  r.check = std::move(check);
  r.name = std::move(name);
  r.tolerance = tol;
  r.worst_margin = 1e300;
  return r;
}

void finish(CheckReport& r) {
  if (r.worst_margin == 1e300) r.worst_margin = 0.0;
  r.pass = r.skipped || r.worst_margin >= -r.tolerance;
}

void track(CheckReport& r, double margin, double t, double x) {
  ++r.samples;
  if (margin < r.worst_margin) {
    r.worst_margin = margin;
    r.loc_t = t;
    r.loc_x = x;
  }
}

double radius_grid_max(const TubeGeometry& g) {
  const ExtendedReal cut = kn::cut_radius(g.params());
  if (g.truncated()) return g.depth_limit();
  double r = 2.0 * g.inscribed_radius().first;
  if (cut.is_finite()) r = std::min(std::max(r, cut.value()), 2.0 * cut.value());
  return r;
}

}  // namespace

const char* rigidity_kind_name(RigidityVerdict::Kind kind) {
  switch (kind) {
    case RigidityVerdict::Kind::none: return "none";
    case RigidityVerdict::Kind::warped_product_on_ball: return "warped_product_on_ball";
    case RigidityVerdict::Kind::ball_space_form: return "ball_space_form";
    case RigidityVerdict::Kind::volume_growth_splitting: return "volume_growth_splitting";
  }
  return "none";
}

CheckReport check_log_jacobian(const TubeGeometry& g) {
  const ComparisonParams& p = g.params();
  const double step = g.options().ode_step;
  CheckReport rep = make_report("log_jacobian", "log_jacobian",
                                4.0 * step * step + 1e-9);
  const ExtendedReal cut = kn::cut_radius(p);
  for (int c = 0; c < g.components(); ++c) {
    for (int k = 0; k < effective_samples(g); ++k) {
      const RayProfile& ray = g.ray(c, k);
      double hi = ray.end_time();
      if (ray.tau1.is_finite()) hi = std::min(hi, ray.tau1.value());
      if (cut.is_finite()) hi = std::min(hi, cut.value());
      hi -= step;
      // Normalizer: the largest s^{n-1} theta over the admissible range keeps
      // the cross-multiplied margin scale-free.
      double scale = 0.0;
      for (size_t i = 1; i + 1 < ray.times.size() && ray.times[i] <= hi; ++i)
        scale = std::max(scale, sn(p, ray.times[i]) * std::abs(ray.theta[i]));
      if (scale <= 0.0) continue;
      for (size_t i = 1; i + 1 < ray.times.size(); ++i) {
        const double t = ray.times[i];
        if (t < step || t > hi) continue;
        const double h = 0.5 * (ray.times[i + 1] - ray.times[i - 1]);
        const double theta_d = (ray.theta[i + 1] - ray.theta[i - 1]) / (2.0 * h);
        const double margin =
            (sn_deriv(p, t) * ray.theta[i] - sn(p, t) * theta_d) / scale;
        track(rep, margin, t, ray.base_x);
      }
    }
  }
  finish(rep);
  return rep;
}

CheckReport check_relative_jacobian(const TubeGeometry& g) {
  const ComparisonParams& p = g.params();
  const double step = g.options().ode_step;
  CheckReport rep = make_report("relative_jacobian", "relative_jacobian",
                                8.0 * step * step + 1e-9);
  const ExtendedReal cut = kn::cut_radius(p);
  for (int c = 0; c < g.components(); ++c) {
    for (int k = 0; k < effective_samples(g); ++k) {
      const RayProfile& ray = g.ray(c, k);
      double hi = ray.end_time();
      if (ray.tau1.is_finite()) hi = std::min(hi, ray.tau1.value());
      if (cut.is_finite()) hi = std::min(hi, cut.value());
      // Decimated sample grid for the pairwise ratio comparison.
      std::vector<double> ts;
      for (int m = 0; m <= 48; ++m) ts.push_back(hi * m / 48.0);
      double scale = 0.0;
      for (double t : ts) scale = std::max(scale, sn(p, t) * ray.theta_at(t));
      if (scale <= 0.0) continue;
      // Strict pairs s < t; the coincident pairs are identities and would
      // pin the reported margin at zero on every manifold.
      for (size_t a = 0; a < ts.size(); ++a) {
        for (size_t b = a + 1; b < ts.size(); ++b) {
          const double s = ts[a], t = ts[b];
          const double margin =
              (ray.theta_at(s) * sn(p, t) - ray.theta_at(t) * sn(p, s)) / scale;
          track(rep, margin, t, ray.base_x);
        }
        if (a == 0) continue;  // theta(0) = s^{n-1}(0) = 1 identically
        // Absolute form theta(t) <= s^{n-1}(t).
        const double margin =
            (sn(p, ts[a]) - ray.theta_at(ts[a])) / std::max(scale, 1e-300);
        track(rep, margin, ts[a], ray.base_x);
      }
      if (cut.is_finite() && ray.tau1.is_finite())
        track(rep, (cut.value() + step - ray.tau1.value()) / cut.value(),
              ray.tau1.value(), ray.base_x);
    }
  }
  finish(rep);
  return rep;
}

CheckReport check_volume_comparison(const TubeGeometry& g) {
  const ComparisonParams& p = g.params();
  const bool chart = g.chart() != nullptr;
  CheckReport rep = make_report("volume_comparison", "volume_comparison",
                                chart ? 10.0 * (g.field() ? g.field()->h_metric : 0.01)
                                      : 1e-6);
  auto table = g.volume_table(16, radius_grid_max(g));
  for (size_t a = 0; a < table.radii.size(); ++a) {
    for (size_t b = a + 1; b < table.radii.size(); ++b) {
      const double model =
          kn::model_ratio(p, table.radii[a], table.radii[b]);
      const double actual = table.volumes[b] / table.volumes[a];
      track(rep, (model - actual) / model, table.radii[b], table.radii[a]);
    }
  }
  finish(rep);
  return rep;
}

CheckReport check_heintze_karcher(const TubeGeometry& g) {
  const ComparisonParams& p = g.params();
  const bool chart = g.chart() != nullptr;
  CheckReport rep = make_report("heintze_karcher", "heintze_karcher",
                                chart ? 10.0 * g.field()->h_metric : 1e-6);
  const double boundary = boundary_volume(g.certified().manifold);
  auto table = g.volume_table(16, radius_grid_max(g));
  for (size_t i = 0; i < table.radii.size(); ++i) {
    const double rhs = boundary * kn::f_profile(p, table.radii[i]);
    track(rep, (rhs - table.volumes[i]) / rhs, table.radii[i], 0.0);
  }
  finish(rep);
  return rep;
}

CheckReport check_volume_growth(const TubeGeometry& g) {
  const ComparisonParams& p = g.params();
  const bool chart = g.chart() != nullptr;
  CheckReport rep = make_report("volume_growth", "volume_growth",
                                chart ? 10.0 * g.field()->h_metric : 1e-6);
  const double boundary = boundary_volume(g.certified().manifold);
  auto table = g.volume_table(16, radius_grid_max(g));
  for (size_t i = 0; i < table.radii.size(); ++i) {
    const double ratio = table.volumes[i] / kn::f_profile(p, table.radii[i]);
    track(rep, (boundary - ratio) / boundary, table.radii[i], 0.0);
  }
  finish(rep);
  return rep;
}

CheckReport check_inscribed_radius(const TubeGeometry& g) {
  const ComparisonParams& p = g.params();
  const double slack =
      2.0 * g.options().ode_step +
      (g.field() ? g.options().cut_match_constant * g.field()->h_metric : 0.0);
  CheckReport rep = make_report("inscribed_radius", "inscribed_radius", slack);
  if (!kn::ball_condition(p.kappa, p.lambda)) {
    rep.skipped = true;
    rep.note = "ball condition fails; no finite comparison radius";
    finish(rep);
    return rep;
  }
  const double cut = kn::cut_radius(p).value();
  const auto [inscribed, truncated] = g.inscribed_radius();
  track(rep, cut - inscribed, inscribed, 0.0);
  if (truncated) rep.note = "inscribed radius truncated";
  finish(rep);
  return rep;
}

CheckReport check_measure_contraction(const TubeGeometry& g, double t,
                                      const RadialBand& band) {
  const ComparisonParams& p = g.params();
  std::ostringstream name;
  name << "measure_contraction[t=" << t << ",band=" << band.inner << "-"
       << band.outer << "]";
  const bool chart = g.chart() != nullptr;
  CheckReport rep = make_report("measure_contraction", name.str(),
                                chart ? 10.0 * g.field()->h_metric : 1e-6);
  const double lhs = g.extension_preimage_volume(t, band);
  double rhs = 0.0;
  for (int c = 0; c < g.components(); ++c)
    for (int k = 0; k < g.integration_samples(); ++k) {
      const double hi = std::min(band.outer, g.cut(c, k));
      if (hi <= band.inner) continue;
      rhs += g.integration_weight(c, k) *
             g.theta_integral(c, k, band.inner, hi, [&](double u) {
               return sn(p, t * u) / sn(p, u);
             });
    }
  rhs *= t;
  const double scale = std::max({lhs, rhs, 1e-12});
  track(rep, (lhs - rhs) / scale, t, band.inner);
  finish(rep);
  return rep;
}

double chain_refinement_bound(const ComparisonParams& params, double r, double R,
                              int N) {
  if (!(r > 0.0) || !(r < R) || N < 1)
    throw std::invalid_argument("chain_refinement_bound: need 0 < r < R, N >= 1");
  const double t = std::pow(r / R, 1.0 / N);
  // Numerator: sum_{j>=1} sup on (t^j R, t^{j-1} R); denominator starts at
  // j = N + 1, i.e. below r. Terms decay geometrically; stop at 1e-14.
  auto series = [&](int start, bool use_sup) {
    double acc = 0.0;
    double hi = R * std::pow(t, start - 1);
    for (int j = start; j < start + 100000; ++j) {
      const double lo = hi * t;
      const double value = use_sup ? kn::interval_sup_sn(params, lo, hi)
                                   : kn::interval_inf_sn(params, lo, hi);
      const double term = value * (hi - lo);
      acc += term;
      if (term <= 1e-14 * acc) break;
      hi = lo;
    }
    return acc;
  };
  const double num = series(1, true);
  const double den = series(N + 1, false);
  if (!(den > 0.0))
    throw std::runtime_error("chain_refinement_bound: vanishing denominator");
  return num / den;
}

CheckReport check_annulus_chain(const TubeGeometry& g, double t, double r1,
                                double r2, int k_max,
                                const std::vector<int>& refinements) {
  const ComparisonParams& p = g.params();
  std::ostringstream name;
  name << "annulus_chain[r1=" << r1 << ",r2=" << r2 << "]";
  const bool chart = g.chart() != nullptr;
  CheckReport rep = make_report("annulus_chain", name.str(),
                                chart ? 10.0 * g.field()->h_metric : 1e-6);

  // Band-ratio bound at the given contraction factor.
  {
    const double lhs = g.annulus_volume(RadialBand(r1, r2)) /
                       g.annulus_volume(RadialBand(t * r1, t * r2));
    auto ratio = [&](double s) { return -sn(p, t * s) / sn(p, s); };
    const double inf_ratio = -numerics::sup_scan(ratio, r1, r2, 2048).value;
    const double rhs = 1.0 / (t * inf_ratio);
    track(rep, (rhs - lhs) / rhs, t, r1);
  }

  // Geometric-series bound for annulus over ball.
  {
    const double tb = r1 / r2;
    const double band_vol = g.annulus_volume(RadialBand(r1, r2));
    for (int k = 1; k <= k_max; ++k) {
      const double r = std::pow(tb, k) * r2;
      double series = 0.0;
      for (int i = k; i < k + 100000; ++i) {
        const double ti = std::pow(tb, i);
        auto ratio = [&](double s) { return -sn(p, ti * s) / sn(p, s); };
        const double inf_ratio = -numerics::sup_scan(ratio, r1, r2, 512).value;
        const double term = ti * inf_ratio;
        series += term;
        if (term <= 1e-14 * series) break;
      }
      const double lhs = band_vol / g.tube_volume(r);
      const double rhs = 1.0 / series;
      track(rep, (rhs - lhs) / rhs, tb, r);
    }
  }

  // Refinement bounds must dominate the true ratio at every N.
  {
    const double actual = g.tube_volume(r2) / g.tube_volume(r1);
    for (int n_ref : refinements) {
      const double bound = chain_refinement_bound(p, r1, r2, n_ref);
      track(rep, (bound - actual) / bound, static_cast<double>(n_ref), 0.0);
    }
    const double finest = chain_refinement_bound(p, r1, r2, refinements.back());
    const double model = kn::model_ratio(p, r1, r2);
    std::ostringstream note;
    note << "refinement bound at N=" << refinements.back() << ": " << finest
         << ", model ratio: " << model;
    rep.note = note.str();
  }
  finish(rep);
  return rep;
}

namespace {

// Cumulative integral of f along a ray's sample grid (trapezoid).
std::vector<double> cumulative_on_ray(const RayProfile& ray,
                                      const std::function<double(double, double)>& f) {
  std::vector<double> cum(ray.times.size(), 0.0);
  auto point = [&](size_t i) {
    if (!ray.geodesic_points.empty()) return ray.geodesic_points[i];
    return std::array<double, 2>{ray.times[i], ray.base_x};
  };
  for (size_t i = 1; i < ray.times.size(); ++i) {
    const auto a = point(i - 1), b = point(i);
    const double fa = f(a[0], a[1]), fb = f(b[0], b[1]);
    cum[i] = cum[i - 1] + 0.5 * (fa + fb) * (ray.times[i] - ray.times[i - 1]);
  }
  return cum;
}

}  // namespace

CheckReport check_segment(const TubeGeometry& g, const std::vector<Expression>& fs) {
  const ComparisonParams& p = g.params();
  // Chart integrals carry grid-sum error; tubes are quadrature-exact.
  CheckReport rep = make_report("segment", "segment", g.chart() ? 2e-3 : 1e-6);
  if (g.truncated()) {
    rep.skipped = true;
    rep.note = "inscribed radius is infinite (truncated tube)";
    finish(rep);
    return rep;
  }
  const double d_max = g.inscribed_radius().first;
  const double c1 = kn::segment_constant(p, d_max);
  const double tube_len = g.tube() ? g.tube()->length() : 0.0;
  for (size_t fi = 0; fi < fs.size(); ++fi) {
    const Expression& f = fs[fi];
    // Warped tubes need explicit fiber samples only when f depends on x.
    const bool tube_x = g.tube() && f.uses_x();
    const int ks = tube_x ? g.sample_count() : g.integration_samples();
    double lhs = 0.0;
    for (int c = 0; c < g.components(); ++c) {
      for (int k = 0; k < ks; ++k) {
        const double x = g.tube() ? g.sample_x(k) : g.ray(c, k).base_x;
        const RayProfile& ray = g.ray(c, g.tube() ? 0 : k);
        auto in_coords = [&](double t, double ray_x) {
          if (g.tube())
            return f.eval(c == 1 ? tube_len - t : t, x);
          return f.eval(t, ray_x);
        };
        const auto cum = cumulative_on_ray(ray, in_coords);
        const double tau = g.cut(c, g.tube() ? 0 : k);
        // integral over the ray of E_f(gamma(u)) theta(u) du where
        // E_f(gamma(u)) is the running integral of f along the ray.
        double acc = 0.0;
        for (size_t i = 1; i < ray.times.size() && ray.times[i - 1] < tau; ++i) {
          const double hi = std::min(ray.times[i], tau);
          const double span = ray.times[i] - ray.times[i - 1];
          const double w = span <= 0.0 ? 0.0 : (hi - ray.times[i - 1]) / span;
          const double cum_hi = cum[i - 1] + w * (cum[i] - cum[i - 1]);
          const double th_lo = ray.theta[i - 1], th_hi = ray.theta_at(hi);
          acc += 0.5 * (cum[i - 1] * th_lo + cum_hi * th_hi) * (hi - ray.times[i - 1]);
        }
        const double weight = g.tube() ? total_side_weight(g, c) / ks
                                       : g.sample_weight(c, k);
        lhs += weight * acc;
      }
    }
    const double rhs =
        c1 * d_max * g.interior_integral([&](double t, double x) {
          const double v = f.eval(t, x);
          if (v < -1e-12)
            throw std::invalid_argument("check_segment: f must be nonnegative");
          return v;
        });
    const double scale = std::max({lhs, rhs, 1e-12});
    track(rep, (rhs - lhs) / scale, 0.0, static_cast<double>(fi));
  }
  finish(rep);
  return rep;
}

CheckReport check_poincare(const TubeGeometry& g,
                           const std::vector<TrialFunction>& psis) {
  const ComparisonParams& p = g.params();
  CheckReport rep = make_report("poincare", "poincare", g.chart() ? 2e-3 : 1e-6);
  if (g.truncated()) {
    rep.skipped = true;
    rep.note = "inscribed radius is infinite (truncated tube)";
    finish(rep);
    return rep;
  }
  const double d_max = g.inscribed_radius().first;
  const double c1 = kn::segment_constant(p, d_max);
  for (size_t pi = 0; pi < psis.size(); ++pi) {
    const TrialFunction& psi = psis[pi];
    const bool radial = psi.kind == TrialFunction::Kind::radial_of_distance;
    if (radial) {
      if (std::abs(psi.expr.eval(0.0, 0.0)) > 1e-9)
        throw std::invalid_argument("check_poincare: psi must vanish on the boundary");
    } else {
      for (int c = 0; c < g.components(); ++c)
        for (int k = 0; k < g.sample_count(); k += 7) {
          double bt, bx = g.sample_x(k);
          if (const auto* tb = g.tube())
            bt = c == 0 ? 0.0 : tb->length();
          else
            bt = g.chart()->beta(c, bx);
          if (std::abs(psi.expr.eval(bt, bx)) > 1e-9)
            throw std::invalid_argument(
                "check_poincare: psi must vanish on the boundary");
        }
    }
    auto value = [&](double t, double x) {
      if (radial) return psi.expr.eval(g.distance_at(t, x), 0.0);
      return psi.expr.eval(t, x);
    };
    auto grad = [&](double t, double x) {
      if (radial) return std::abs(psi.expr.jet_t(g.distance_at(t, x), 0.0).d1);
      const Jet jt = psi.expr.jet_t(t, x);
      const Jet jx = psi.expr.jet_x(t, x);
      const double gm = g.tube() ? g.tube()->warp(t) * g.tube()->warp(t)
                                 : g.chart()->metric(t, x);
      return std::sqrt(jt.d1 * jt.d1 + jx.d1 * jx.d1 / gm);
    };
    const double lhs =
        g.interior_integral([&](double t, double x) { return std::abs(value(t, x)); });
    const double rhs =
        c1 * d_max * g.interior_integral([&](double t, double x) { return grad(t, x); });
    const double scale = std::max({lhs, rhs, 1e-12});
    track(rep, (rhs - lhs) / scale, 0.0, static_cast<double>(pi));
  }
  finish(rep);
  return rep;
}

CheckReport check_isoperimetric(const TubeGeometry& g,
                                const std::vector<SideBand>& bands) {
  const ComparisonParams& p = g.params();
  CheckReport rep =
      make_report("isoperimetric", "isoperimetric", g.chart() ? 2e-3 : 1e-6);
  for (const SideBand& band : bands) {
    if (band.t1 == band.t2) {
      track(rep, 0.0, band.t1, band.component);
      continue;
    }
    if (!(band.t1 < band.t2))
      throw std::invalid_argument("check_isoperimetric: need t1 <= t2");
    double min_cut = 1e300;
    for (int k = 0; k < g.sample_count(); ++k)
      min_cut = std::min(min_cut, g.cut(band.component, k));
    if (band.t2 > min_cut)
      throw std::invalid_argument("check_isoperimetric: band crosses the cut time");
    double vol = 0.0, area = 0.0;
    for (int k = 0; k < g.integration_samples(); ++k) {
      vol += g.integration_weight(band.component, k) *
             g.theta_integral(band.component, k, band.t1, band.t2);
      const RayProfile& ray = g.ray(band.component, k);
      area += g.integration_weight(band.component, k) *
              (ray.theta_at(band.t1) + ray.theta_at(band.t2));
    }
    // sup over (t1, t2) of the comparison tail ratio.
    numerics::Tolerance tol;
    tol.rel = 1e-10;
    auto tail_ratio = [&](double s) {
      return numerics::integrate([&](double u) { return sn(p, u); }, s, band.t2,
                                 tol) /
             sn(p, s);
    };
    const double factor =
        numerics::sup_scan(tail_ratio, band.t1, band.t2 * (1.0 - 1e-9), 1024).value;
    const double rhs = area * factor;
    const double scale = std::max({vol, rhs, 1e-12});
    track(rep, (rhs - vol) / scale, band.t1, band.component);
  }
  finish(rep);
  return rep;
}

CheckReport check_eigen_bounds(const TubeGeometry& g,
                               const std::vector<double>& p_list,
                               const std::vector<TrialFunction>& trials) {
  const ComparisonParams& pr = g.params();
  // Margins involve the discretized eigenvalue (Richardson residual ~1e-4).
  CheckReport rep = make_report("eigen_bounds", "eigen_bounds", 1e-4);
  std::ostringstream note;
  const bool rigid_case =
      pr.kappa < 0.0 && std::abs(pr.lambda - std::sqrt(-pr.kappa)) <= 1e-12;

  if (g.truncated()) {
    if (!rigid_case) {
      rep.skipped = true;
      rep.note = "non-compact and not the rigid parameter case";
      finish(rep);
      return rep;
    }
    // Rigid lower bound against Rayleigh upper bounds on the truncation.
    for (double p : p_list) {
      const double bound = kn::eigen_lower_bound(pr, ExtendedReal::infinity(), p,
                                                 kn::EigenBoundVariant::rigid);
      for (const TrialFunction& trial : trials) {
        const double upper = g.rayleigh_quotient(trial, p);
        track(rep, (upper - bound) / std::max(bound, 1e-12), p, 0.0);
      }
      if (p == 2.0) {
        const double via_c = kn::eigen_lower_bound(
            pr, ExtendedReal::infinity(), 2.0, kn::EigenBoundVariant::dirichlet);
        note << "rigid=" << bound << " dirichlet(inf)=" << via_c << "; ";
        track(rep, 1.0 - std::abs(via_c - bound) / bound, 2.0, 1.0);
      }
    }
    rep.note = note.str();
    finish(rep);
    return rep;
  }

  const double d_max = g.inscribed_radius().first;
  const ExtendedReal D(d_max);
  const double mu = g.dirichlet_eigen();
  const double dirichlet =
      kn::eigen_lower_bound(pr, D, 2.0, kn::EigenBoundVariant::dirichlet);
  const double segment =
      kn::eigen_lower_bound(pr, D, 2.0, kn::EigenBoundVariant::segment);
  const double kasue = kn::kasue_bar_mu(pr, d_max);
  note << "mu=" << mu << " dirichlet=" << dirichlet << " segment=" << segment
       << " kasue=" << kasue << ";";
  track(rep, (mu - dirichlet) / std::max(dirichlet, 1e-12), 2.0, 0.0);
  track(rep, (mu - segment) / std::max(segment, 1e-12), 2.0, 1.0);
  track(rep, (mu - kasue) / std::max(kasue, 1e-12), 2.0, 2.0);
  // Ordering of the lower bounds themselves.
  track(rep, (dirichlet - segment) / std::max(dirichlet, 1e-12), 2.0, 3.0);
  track(rep, (kasue - dirichlet) / std::max(kasue, 1e-12), 2.0, 4.0);
  for (double p : p_list) {
    if (p == 2.0) continue;
    const double bound =
        kn::eigen_lower_bound(pr, D, p, kn::EigenBoundVariant::dirichlet);
    for (const TrialFunction& trial : trials) {
      const double upper = g.rayleigh_quotient(trial, p);
      track(rep, (upper - bound) / std::max(bound, 1e-12), p, 0.0);
    }
  }
  rep.note = note.str();
  finish(rep);
  return rep;
}

RigidityVerdict detect_rigidity(const TubeGeometry& g, double tol) {
  const ComparisonParams& p = g.params();
  RigidityVerdict verdict;

  double min_cut = 1e300;
  for (int c = 0; c < g.components(); ++c)
    for (int k = 0; k < g.sample_count(); ++k)
      min_cut = std::min(min_cut, g.cut(c, k));
  const ExtendedReal cut_r = kn::cut_radius(p);
  double radius = min_cut;
  if (cut_r.is_finite()) radius = std::min(radius, cut_r.value());

  double sup_dev = 0.0;
  for (int c = 0; c < g.components(); ++c)
    for (int k = 0; k < effective_samples(g); ++k) {
      const RayProfile& ray = g.ray(c, k);
      for (size_t i = 0; i < ray.times.size(); ++i) {
        if (ray.times[i] > radius) break;
        sup_dev = std::max(
            sup_dev, std::abs(ray.theta[i] -
                              pow_int(kn::s_bar(p, ray.times[i]), p.n - 1)));
      }
    }
  const bool warped_match = sup_dev <= tol;

  const auto [inscribed, truncated] = g.inscribed_radius();
  const double r_big = truncated ? g.depth_limit() : inscribed;
  const double boundary = boundary_volume(g.certified().manifold);
  const double growth_ratio =
      g.tube_volume(r_big) / kn::f_profile(p, r_big);
  const bool growth_match = growth_ratio >= boundary * (1.0 - tol);

  if (warped_match && kn::ball_condition(p.kappa, p.lambda) &&
      inscribed >= cut_r.value() - tol) {
    verdict.kind = RigidityVerdict::Kind::ball_space_form;
    verdict.radius = cut_r.value();
    verdict.sup_deviation = sup_dev;
    verdict.supporting = {"relative_jacobian", "inscribed_radius"};
  } else if (growth_match && warped_match) {
    verdict.kind = RigidityVerdict::Kind::volume_growth_splitting;
    verdict.radius = r_big;
    verdict.sup_deviation = sup_dev;
    verdict.supporting = {"volume_growth", "heintze_karcher"};
  } else if (warped_match) {
    verdict.kind = RigidityVerdict::Kind::warped_product_on_ball;
    verdict.radius = radius;
    verdict.sup_deviation = sup_dev;
    verdict.supporting = {"relative_jacobian"};
  } else {
    verdict.sup_deviation = sup_dev;
  }

  // Supporting boundary Ricci condition for warped model tubes (records the
  // rigidity consequence Ric_boundary >= (n-2)(kappa + lambda^2)).
  if (verdict.kind != RigidityVerdict::Kind::none) {
    if (const auto* tube = g.tube()) {
      const double w0 = tube->boundary_warp(0);
      const double fib_ric = (p.n - 2) * tube->fiber().sectional_curvature();
      if (fib_ric / (w0 * w0) >=
          (p.n - 2) * (p.kappa + p.lambda * p.lambda) - 1e-9)
        verdict.supporting.push_back("boundary_ricci_bound");
    }
  }
  // Complement rigidity condition: under a splitting verdict with (kappa,
  // -lambda) satisfying the ball condition, record whether the boundary
  // volume dominates the model sphere of the complementary ball.
  if (verdict.kind == RigidityVerdict::Kind::volume_growth_splitting &&
      kn::ball_condition(p.kappa, -p.lambda)) {
    const double radius =
        kn::cut_radius(ComparisonParams(p.n, p.kappa, -p.lambda)).value();
    const double sphere_warp = kn::s_point(p.kappa, radius).value;
    const double unit_sphere =
        2.0 * std::pow(M_PI, 0.5 * p.n) / std::tgamma(0.5 * p.n);
    double model_boundary = unit_sphere;
    for (int i = 0; i < p.n - 1; ++i) model_boundary *= sphere_warp;
    if (boundary >= model_boundary - 1e-9)
      verdict.supporting.push_back("complement_boundary_volume");
  }
  return verdict;
}

SuiteResult run_suite(const TubeGeometry& g, const SuiteConfig& config) {
  SuiteResult result;
  auto enabled = [&](const std::string& name) {
    for (const auto& c : config.checks)
      if (c == "all" || c == name) return true;
    return false;
  };
  auto add = [&](CheckReport rep) {
    rep.tolerance *= config.tol_scale;
    rep.pass = rep.skipped || rep.worst_margin >= -rep.tolerance;
    result.reports.push_back(std::move(rep));
  };

  const double inscribed = g.inscribed_radius().first;
  std::vector<RadialBand> bands = config.bands;
  if (bands.empty()) bands.push_back(RadialBand(0.25 * inscribed, 0.75 * inscribed));
  std::vector<TrialFunction> trials = config.trials;
  if (trials.empty()) trials.push_back(TrialFunction::radial(Expression::parse("t")));
  std::vector<Expression> segment_fs = config.segment_functions;
  if (segment_fs.empty()) {
    segment_fs.push_back(Expression::parse("1"));
    // Shift the linear default so it stays nonnegative when the lower
    // boundary graph dips below t = 0.
    double shift = 0.0;
    if (g.chart()) shift = std::max(0.0, -g.chart()->t_min());
    std::ostringstream linear;
    linear.precision(17);
    linear << "t + " << shift;
    segment_fs.push_back(Expression::parse(linear.str()));
  }

  if (enabled("log_jacobian")) add(check_log_jacobian(g));
  if (enabled("relative_jacobian")) add(check_relative_jacobian(g));
  if (enabled("volume_comparison")) add(check_volume_comparison(g));
  if (enabled("heintze_karcher")) add(check_heintze_karcher(g));
  if (enabled("volume_growth")) add(check_volume_growth(g));
  if (enabled("inscribed_radius")) add(check_inscribed_radius(g));
  if (enabled("measure_contraction"))
    for (const auto& band : bands)
      for (double t : config.t_values) add(check_measure_contraction(g, t, band));
  if (enabled("annulus_chain"))
    for (const auto& band : bands) {
      const double r2 = std::min(band.outer, inscribed);
      if (band.inner > 0.0 && band.inner < r2)
        add(check_annulus_chain(g, config.t_values.empty() ? 0.5
                                                           : config.t_values[0],
                                band.inner, r2, config.chain_k_max));
    }
  if (enabled("segment")) add(check_segment(g, segment_fs));
  if (enabled("poincare")) add(check_poincare(g, trials));
  if (enabled("isoperimetric")) {
    std::vector<SideBand> side_bands;
    for (int c = 0; c < g.components(); ++c) {
      double min_cut = 1e300;
      for (int k = 0; k < g.sample_count(); ++k)
        min_cut = std::min(min_cut, g.cut(c, k));
      side_bands.push_back({c, 0.2 * min_cut, 0.8 * min_cut});
    }
    add(check_isoperimetric(g, side_bands));
  }
  if (enabled("eigen_bounds")) add(check_eigen_bounds(g, config.p_list, trials));

  result.verdict = detect_rigidity(g, config.rigidity_tol);
  result.all_pass = true;
  for (const auto& rep : result.reports)
    if (!rep.pass) result.all_pass = false;
  return result;
}

std::string reports_to_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  out.precision(12);
  out << "check,name,margin,location_t,location_x,tolerance,status\n";
  for (const auto& r : reports) {
    out << r.check << ',' << r.name << ',' << r.worst_margin << ',' << r.loc_t
        << ',' << r.loc_x << ',' << r.tolerance << ','
        << (r.skipped ? "skipped" : (r.pass ? "pass" : "fail")) << '\n';
  }
  return out.str();
}

std::string suite_to_json(const SuiteResult& result) {
  nlohmann::ordered_json j;
  j["all_pass"] = result.all_pass;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : result.reports) {
    nlohmann::ordered_json c;
    c["check"] = r.check;
    c["name"] = r.name;
    c["margin"] = r.worst_margin;
    c["location"] = {{"t", r.loc_t}, {"x", r.loc_x}};
    c["tolerance"] = r.tolerance;
    c["status"] = r.skipped ? "skipped" : (r.pass ? "pass" : "fail");
    c["samples"] = r.samples;
    if (!r.note.empty()) c["note"] = r.note;
    j["checks"].push_back(c);
  }
  j["rigidity"] = {{"kind", rigidity_kind_name(result.verdict.kind)},
                   {"radius", result.verdict.radius},
                   {"sup_deviation", result.verdict.sup_deviation},
                   {"supporting", result.verdict.supporting}};
  return j.dump(2) + "\n";
}

}  // namespace tubecomp
