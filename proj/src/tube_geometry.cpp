#include "tubecomp/tube_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "tubecomp/numerics.hpp"

namespace tubecomp {

namespace {

double pow_int(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

double pow_real(double x, double p) { return std::pow(x, p); }

}  // namespace

std::string TubeVolumeTable::to_csv() const {
  std::ostringstream out;
  out.precision(15);
  out << "r,volume,method\n";
  const char* name = method == Method::coarea ? "coarea" : "grid";
  for (size_t i = 0; i < radii.size(); ++i)
    out << radii[i] << ',' << volumes[i] << ',' << name << '\n';
  return out.str();
}

TubeGeometry::TubeGeometry(CertifiedManifold cm, GeometryOptions options)
    : cm_(std::move(cm)), options_(options) {
  const int samples = options_.boundary_samples;
  if (samples < 4) throw std::invalid_argument("TubeGeometry: too few samples");

  if (const auto* t = tube()) {
    const double depth = depth_limit();
    for (int c = 0; c < t->boundary_components(); ++c) {
      shared_rays_.push_back(
          normal_ray_profile(cm_.manifold, c, 0.0, depth, options_.ode_step));
      double cut_value;
      switch (t->topology()) {
        case TubeTopology::cylinder: cut_value = 0.5 * t->length(); break;
        case TubeTopology::cap: cut_value = t->length(); break;
        case TubeTopology::half_infinite: cut_value = depth; break;
        default: cut_value = depth;
      }
      cuts_.emplace_back(samples, cut_value);
      const double total =
          pow_int(t->boundary_warp(c), t->dimension() - 1) * t->fiber().volume();
      weights_.emplace_back(samples, total / samples);
    }
    return;
  }

  const auto& surf = *chart();
  grid_ = Grid2D::for_surface(surf, options_.grid_nt, options_.grid_nx);
  field_ = solve_eikonal(surf, *grid_);
  const double ray_span = 2.0 * (surf.t_max() - surf.t_min());
  for (int c = 0; c < 2; ++c) {
    rays_.emplace_back(samples);
    cuts_.emplace_back(samples, 0.0);
    weights_.emplace_back(samples, 0.0);
    auto compute_range = [&, c](int lo, int hi) {
      for (int k = lo; k < hi; ++k) {
        const double x = surf.period() * k / samples;
        rays_[c][k] =
            normal_ray_profile(cm_.manifold, c, x, ray_span, options_.ode_step);
      }
    };
    const int threads = std::max(1, options_.threads);
    if (threads == 1) {
      compute_range(0, samples);
    } else {
      std::vector<std::thread> workers;
      const int chunk = (samples + threads - 1) / threads;
      for (int w = 0; w < threads; ++w)
        workers.emplace_back(compute_range, w * chunk,
                             std::min(samples, (w + 1) * chunk));
      for (auto& worker : workers) worker.join();
    }
    for (int k = 0; k < samples; ++k) {
      const double x = surf.period() * k / samples;
      cuts_[c][k] =
          cut_time(*field_, surf, rays_[c][k], options_.cut_match_constant);
      const Jet b = surf.beta_jet(c, x);
      weights_[c][k] = std::sqrt(b.d1 * b.d1 + surf.metric(b.v, x)) *
                       surf.period() / samples;
    }
  }
}

int TubeGeometry::components() const { return boundary_components(cm_.manifold); }

double TubeGeometry::sample_x(int k) const {
  if (const auto* t = tube())
    return t->fiber().parameter_period() * k / options_.boundary_samples;
  return chart()->period() * k / options_.boundary_samples;
}

double TubeGeometry::sample_weight(int component, int k) const {
  return weights_[component][k];
}

double TubeGeometry::integration_weight(int component, int k) const {
  if (tube()) {
    double total = 0.0;
    for (double w : weights_[component]) total += w;
    return total;
  }
  return weights_[component][k];
}

const RayProfile& TubeGeometry::ray(int component, int k) const {
  if (tube()) return shared_rays_[component];
  return rays_[component][k];
}

double TubeGeometry::cut(int component, int k) const { return cuts_[component][k]; }

double TubeGeometry::depth_limit() const {
  const auto* t = tube();
  if (t && t->topology() == TubeTopology::half_infinite)
    return options_.t_truncation;
  if (t) return t->length();
  return 2.0 * (chart()->t_max() - chart()->t_min());
}

bool TubeGeometry::truncated() const {
  const auto* t = tube();
  return t && t->topology() == TubeTopology::half_infinite;
}

std::pair<double, bool> TubeGeometry::inscribed_radius() const {
  double best = 0.0;
  for (int c = 0; c < components(); ++c)
    for (int k = 0; k < sample_count(); ++k) best = std::max(best, cut(c, k));
  return {best, truncated()};
}

double TubeGeometry::theta_integral(int component, int k, double lo, double hi,
                                    const std::function<double(double)>& factor) const {
  const RayProfile& r = ray(component, k);
  lo = std::max(lo, 0.0);
  hi = std::min(hi, r.end_time());
  if (!(hi > lo)) return 0.0;
  if (const auto* t = tube()) {
    const int n = t->dimension();
    const double L = t->length();
    const double w0 = t->boundary_warp(component);
    auto integrand = [&](double s) {
      const double w = component == 0 ? t->warp(s) : t->warp(L - s);
      const double theta = pow_int(w / w0, n - 1);
      return factor ? theta * factor(s) : theta;
    };
    numerics::Tolerance tol;
    tol.rel = 1e-10;
    return numerics::integrate(integrand, lo, hi, tol);
  }
  // Chart profiles: composite trapezoid on the sample grid with clipped ends.
  auto value = [&](double s) {
    const double theta = r.theta_at(s);
    return factor ? theta * factor(s) : theta;
  };
  const auto& ts = r.times;
  const auto first = std::upper_bound(ts.begin(), ts.end(), lo);
  const auto last = std::lower_bound(ts.begin(), ts.end(), hi);
  double acc = 0.0;
  double prev_t = lo, prev_v = value(lo);
  for (auto it = first; it != last; ++it) {
    const double v = value(*it);
    acc += 0.5 * (prev_v + v) * (*it - prev_t);
    prev_t = *it;
    prev_v = v;
  }
  acc += 0.5 * (prev_v + value(hi)) * (hi - prev_t);
  return acc;
}

double TubeGeometry::tube_volume(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("tube_volume: r must be >= 0");
  if (r == 0.0) return 0.0;
  double total = 0.0;
  for (int c = 0; c < components(); ++c)
    for (int k = 0; k < integration_samples(); ++k)
      total += integration_weight(c, k) *
               theta_integral(c, k, 0.0, std::min(r, cut(c, k)));
  return total;
}

double TubeGeometry::annulus_volume(const RadialBand& band) const {
  return tube_volume(band.outer) - tube_volume(band.inner);
}

TubeVolumeTable TubeGeometry::volume_table(int points, double r_max) const {
  TubeVolumeTable table;
  table.method = TubeVolumeTable::Method::coarea;
  const double r_min = r_max / 100.0;
  for (int i = 0; i < points; ++i) {
    const double r =
        r_min * std::pow(r_max / r_min, points == 1 ? 1.0 : double(i) / (points - 1));
    table.radii.push_back(r);
    table.volumes.push_back(tube_volume(r));
  }
  return table;
}

double TubeGeometry::tube_volume_grid(double r) const {
  const auto* surf = chart();
  if (!surf)
    throw std::logic_error("tube_volume_grid: only available for chart surfaces");
  return region_volume(*surf, *grid_, [&](double t, double x) {
    return field_->interpolate(t, x) <= r;
  });
}

double TubeGeometry::extension_preimage_volume(double t,
                                               const RadialBand& band) const {
  if (!(t > 0.0) || !(t < 1.0))
    throw std::invalid_argument("extension_preimage_volume: t must be in (0,1)");
  double total = 0.0;
  for (int c = 0; c < components(); ++c)
    for (int k = 0; k < integration_samples(); ++k) {
      const double tau = cut(c, k);
      const double hi = t * std::min(band.outer, tau);
      const double lo = t * band.inner;
      if (hi > lo) total += integration_weight(c, k) * theta_integral(c, k, lo, hi);
    }
  return total;
}

double TubeGeometry::distance_at(double t, double x) const {
  if (const auto* tb = tube()) {
    if (tb->topology() == TubeTopology::cylinder)
      return std::min(t, tb->length() - t);
    return t;
  }
  return field_->interpolate(t, x);
}

double TubeGeometry::segment_excursion(const Expression& f, double t, double x) const {
  numerics::Tolerance tol;
  tol.rel = 1e-9;
  tol.abs = 1e-12;
  if (const auto* tb = tube()) {
    const double L = tb->length();
    const double rho = distance_at(t, x);
    double best = 1e300;
    // Candidate foot points: the near side, and the far side at ties.
    if (std::abs(rho - t) < 1e-9) {
      best = std::min(best, rho == 0.0 ? 0.0 : numerics::integrate(
          [&](double s) { return f.eval(s, x); }, 0.0, rho, tol));
    }
    if (tb->topology() == TubeTopology::cylinder &&
        std::abs(rho - (L - t)) < 1e-9) {
      best = std::min(best, rho == 0.0 ? 0.0 : numerics::integrate(
          [&](double s) { return f.eval(L - s, x); }, 0.0, rho, tol));
    }
    return best;
  }
  const auto& surf = *chart();
  const double rho = field_->interpolate(t, x);
  if (rho <= 0.0) return 0.0;
  const FootPointResult foot = foot_point(*field_, surf, t, x);
  std::vector<FootPointResult> candidates = {foot};
  if (foot.tie) {
    // Second candidate on the other component: nearest curve point there.
    const int other = 1 - foot.component;
    double best_d = 1e300, best_x = x;
    const int m = 8 * options_.grid_nx;
    for (int s = 0; s < m; ++s) {
      const double xs = surf.period() * s / m;
      double dx = std::fmod(std::abs(xs - x), surf.period());
      dx = std::min(dx, surf.period() - dx);
      const double ts = surf.beta(other, xs);
      const double d = std::hypot(t - ts, std::sqrt(surf.metric(ts, xs)) * dx);
      if (d < best_d) {
        best_d = d;
        best_x = xs;
      }
    }
    candidates.push_back({best_x, other, true});
  }
  double best = 1e300;
  for (const auto& cand : candidates) {
    const RayProfile ray = normal_ray_profile(cm_.manifold, cand.component, cand.x,
                                              rho * 1.02 + 2 * options_.ode_step,
                                              options_.ode_step);
    // Composite trapezoid of f along the geodesic up to rho.
    double acc = 0.0;
    double prev = f.eval(ray.geodesic_points[0][0], ray.geodesic_points[0][1]);
    for (size_t i = 1; i < ray.times.size() && ray.times[i - 1] < rho; ++i) {
      const double hi_t = std::min(ray.times[i], rho);
      const auto p = ray.point_at(hi_t);
      const double cur = f.eval(p[0], p[1]);
      acc += 0.5 * (prev + cur) * (hi_t - ray.times[i - 1]);
      prev = cur;
    }
    best = std::min(best, acc);
  }
  return best;
}

double TubeGeometry::interior_integral(
    const std::function<double(double, double)>& f) const {
  if (const auto* tb = tube()) {
    const int n = tb->dimension();
    const double depth = depth_limit();
    const double period = tb->fiber().parameter_period();
    const int m = sample_count();
    numerics::Tolerance tol;
    tol.rel = 1e-9;
    double mean = 0.0;
    for (int k = 0; k < m; ++k) {
      const double x = period * k / m;
      mean += numerics::integrate(
          [&](double u) { return f(u, x) * pow_int(tb->warp(u), n - 1); }, 0.0,
          depth, tol);
    }
    return tb->fiber().volume() * mean / m;
  }
  const auto& surf = *chart();
  const Grid2D& g = *grid_;
  const int sub = 4;
  double total = 0.0;
  const double cw = g.ht * g.hx / (sub * sub);
  for (int i = 0; i + 1 < g.nt; ++i)
    for (int j = 0; j < g.nx; ++j)
      for (int p = 0; p < sub; ++p)
        for (int q = 0; q < sub; ++q) {
          const double t = g.t_samples[i] + (p + 0.5) * g.ht / sub;
          const double x = g.x_samples[j] + (q + 0.5) * g.hx / sub;
          if (!surf.inside(t, x)) continue;
          total += f(t, x) * std::sqrt(surf.metric(t, x)) * cw;
        }
  return total;
}

double TubeGeometry::rayleigh_quotient(const TrialFunction& psi, double p) const {
  if (!(p > 1.0)) throw std::invalid_argument("rayleigh_quotient: p must be > 1");
  const bool radial = psi.kind == TrialFunction::Kind::radial_of_distance;

  // Boundary vanishing check.
  if (radial) {
    if (std::abs(psi.expr.eval(0.0, 0.0)) > 1e-9)
      throw std::invalid_argument("rayleigh_quotient: radial profile must vanish at 0");
  } else {
    for (int c = 0; c < components(); ++c)
      for (int k = 0; k < sample_count(); k += 7) {
        double bt, bx = sample_x(k);
        if (const auto* tb = tube())
          bt = c == 0 ? 0.0 : tb->length();
        else
          bt = chart()->beta(c, bx);
        if (std::abs(psi.expr.eval(bt, bx)) > 1e-9)
          throw std::invalid_argument(
              "rayleigh_quotient: trial function must vanish on the boundary");
      }
  }

  auto grad_norm = [&](double t, double x) {
    if (radial) {
      const double rho = distance_at(t, x);
      return std::abs(psi.expr.jet_t(rho, 0.0).d1);
    }
    const Jet jt = psi.expr.jet_t(t, x);
    const Jet jx = psi.expr.jet_x(t, x);
    double g;
    if (const auto* tb = tube())
      g = tb->warp(t) * tb->warp(t);
    else
      g = chart()->metric(t, x);
    return std::sqrt(jt.d1 * jt.d1 + jx.d1 * jx.d1 / g);
  };
  auto value = [&](double t, double x) {
    if (radial) return psi.expr.eval(distance_at(t, x), 0.0);
    return psi.expr.eval(t, x);
  };

  const double num = interior_integral(
      [&](double t, double x) { return pow_real(grad_norm(t, x), p); });
  const double den = interior_integral(
      [&](double t, double x) { return pow_real(std::abs(value(t, x)), p); });
  if (!(den > 0.0)) throw std::runtime_error("rayleigh_quotient: zero denominator");
  return num / den;
}

double TubeGeometry::dirichlet_eigen() const {
  if (const auto* tb = tube()) {
    if (tb->topology() == TubeTopology::half_infinite && !options_.allow_truncated_eigen)
      throw std::runtime_error(
          "dirichlet_eigen: manifold is non-compact (enable truncated eigenvalues "
          "to approximate on the truncated tube)");
    const int n = tb->dimension();
    const bool natural_right = tb->topology() != TubeTopology::cylinder;
    const double top = depth_limit();
    auto weight = [&](double t) { return pow_int(tb->warp(t), n - 1); };
    return numerics::min_eigen_sturm_liouville(weight, 0.0, top,
                                               options_.sl_gridpoints, natural_right)
        .mu;
  }
  // Chart surface: five-point Laplace-Beltrami stencil, Dirichlet rows
  // eliminated, Richardson extrapolation over two grid levels.
  const auto& surf = *chart();
  auto solve = [&](int nt, int nx) {
    const double t0 = surf.t_min(), t1 = surf.t_max();
    const double ht = (t1 - t0) / (nt - 1);
    const double hx = surf.period() / nx;
    std::vector<int> id(static_cast<size_t>(nt) * nx, -1);
    std::vector<double> ts, xs;
    std::vector<int> ii, jj;
    int count = 0;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < nx; ++j) {
        const double t = t0 + i * ht, x = j * hx;
        if (t > surf.beta(0, x) + 1e-9 && t < surf.beta(1, x) - 1e-9) {
          id[i * nx + j] = count++;
          ts.push_back(t);
          xs.push_back(x);
          ii.push_back(i);
          jj.push_back(j);
        }
      }
    if (count == 0) throw std::runtime_error("dirichlet_eigen: empty interior");
    auto sq = [&](double t, double x) { return std::sqrt(surf.metric(t, x)); };
    std::vector<double> mass(count), diag(count);
    for (int a = 0; a < count; ++a) {
      mass[a] = sq(ts[a], xs[a]);
      const double up = sq(ts[a] + 0.5 * ht, xs[a]);
      const double dn = sq(ts[a] - 0.5 * ht, xs[a]);
      const double rt = 1.0 / sq(ts[a], xs[a] + 0.5 * hx);
      const double lf = 1.0 / sq(ts[a], xs[a] - 0.5 * hx);
      diag[a] = (up + dn) / (ht * ht) + (rt + lf) / (hx * hx);
    }
    auto neighbor = [&](int a, int di, int dj) {
      const int i = ii[a] + di;
      if (i < 0 || i >= nt) return -1;
      const int j = ((jj[a] + dj) % nx + nx) % nx;
      return id[i * nx + j];
    };
    auto apply = [&](std::span<const double> u, std::span<double> out) {
      for (int a = 0; a < count; ++a) {
        const double up = sq(ts[a] + 0.5 * ht, xs[a]);
        const double dn = sq(ts[a] - 0.5 * ht, xs[a]);
        const double rt = 1.0 / sq(ts[a], xs[a] + 0.5 * hx);
        const double lf = 1.0 / sq(ts[a], xs[a] - 0.5 * hx);
        double v = diag[a] * u[a];
        int b;
        if ((b = neighbor(a, 1, 0)) >= 0) v -= up / (ht * ht) * u[b];
        if ((b = neighbor(a, -1, 0)) >= 0) v -= dn / (ht * ht) * u[b];
        if ((b = neighbor(a, 0, 1)) >= 0) v -= rt / (hx * hx) * u[b];
        if ((b = neighbor(a, 0, -1)) >= 0) v -= lf / (hx * hx) * u[b];
        out[a] = v;
      }
    };
    return numerics::min_eigen_generalized(apply, diag, mass);
  };
  const int base = options_.chart_eigen_n;
  const double coarse = solve(base + 1, base);
  const double fine = solve(2 * base + 1, 2 * base);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace tubecomp
