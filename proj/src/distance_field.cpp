#include "tubecomp/distance_field.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace tubecomp {

namespace {

constexpr double kInf = 1e300;

double wrap_delta(double dx, double period) {
  dx = std::fmod(dx, period);
  if (dx > 0.5 * period) dx -= period;
  if (dx < -0.5 * period) dx += period;
  return dx;
}

}  // namespace

Grid2D Grid2D::for_surface(const ChartSurface2D& surface, int nt, int nx) {
  if (nt < 8 || nx < 8) throw std::invalid_argument("Grid2D: need nt, nx >= 8");
  Grid2D g;
  g.nt = nt;
  g.nx = nx;
  g.t0 = surface.t_min();
  g.t1 = surface.t_max();
  g.period = surface.period();
  g.ht = (g.t1 - g.t0) / (nt - 1);
  g.hx = g.period / nx;
  g.t_samples.resize(nt);
  g.x_samples.resize(nx);
  for (int i = 0; i < nt; ++i) g.t_samples[i] = g.t0 + i * g.ht;
  for (int j = 0; j < nx; ++j) g.x_samples[j] = j * g.hx;
  g.inside.assign(static_cast<size_t>(nt) * nx, 0);
  for (int j = 0; j < nx; ++j) {
    const double lo = surface.beta(0, g.x_samples[j]);
    const double hi = surface.beta(1, g.x_samples[j]);
    for (int i = 0; i < nt; ++i) {
      const double t = g.t_samples[i];
      if (t >= lo - 1e-12 && t <= hi + 1e-12) g.inside[g.index(i, j)] = 1;
    }
  }
  return g;
}

double DistanceField::interpolate(double t, double x) const {
  const Grid2D& g = grid;
  double ti = (t - g.t0) / g.ht;
  double xj = x / g.hx;
  int i = std::clamp(static_cast<int>(std::floor(ti)), 0, g.nt - 2);
  const double wt = std::clamp(ti - i, 0.0, 1.0);
  const int j = static_cast<int>(std::floor(xj));
  const double wx = xj - j;
  const int corners[4] = {g.index(i, j), g.index(i, j + 1), g.index(i + 1, j),
                          g.index(i + 1, j + 1)};
  const double weights[4] = {(1 - wt) * (1 - wx), (1 - wt) * wx, wt * (1 - wx),
                             wt * wx};
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (rho[corners[k]] >= kInf) continue;
    num += weights[k] * rho[corners[k]];
    den += weights[k];
  }
  if (den <= 0.0)
    throw std::runtime_error("DistanceField: interpolation outside the region");
  return num / den;
}

int DistanceField::component_at(double t, double x) const {
  const Grid2D& g = grid;
  const int i = std::clamp(static_cast<int>(std::round((t - g.t0) / g.ht)), 0, g.nt - 1);
  const int j = static_cast<int>(std::round(x / g.hx));
  return source_component[g.index(i, j)];
}

std::string DistanceField::dump_matrix() const {
  std::ostringstream out;
  out.precision(12);
  for (int i = 0; i < grid.nt; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      if (j) out << ',';
      const double v = rho[grid.index(i, j)];
      out << (v >= kInf ? -1.0 : v);
    }
    out << '\n';
  }
  return out.str();
}

DistanceField solve_eikonal(const ChartSurface2D& surface, const Grid2D& grid) {
  const int nt = grid.nt, nx = grid.nx;
  const size_t n = static_cast<size_t>(nt) * nx;
  DistanceField field;
  field.grid = grid;
  field.rho.assign(n, kInf);
  field.source_component.assign(n, -1);

  double g_max = 1.0;
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nt; ++i)
      if (grid.inside[grid.index(i, j)])
        g_max = std::max(g_max, surface.metric(grid.t_samples[i], grid.x_samples[j]));
  field.h_metric = std::max(grid.ht, grid.hx * std::sqrt(g_max));

  // Sub-grid initialization: distance to densely sampled boundary curves in
  // the frozen local metric.
  const int curve_samples = 8 * nx;
  for (int comp = 0; comp < 2; ++comp) {
    for (int s = 0; s < curve_samples; ++s) {
      const double xs = grid.period * s / curve_samples;
      const double ts = surface.beta(comp, xs);
      const int j0 = static_cast<int>(std::floor(xs / grid.hx));
      const int i0 = static_cast<int>(std::round((ts - grid.t0) / grid.ht));
      for (int dj = -3; dj <= 4; ++dj) {
        for (int di = -4; di <= 4; ++di) {
          const int i = i0 + di;
          if (i < 0 || i >= nt) continue;
          const int idx = grid.index(i, j0 + dj);
          if (!grid.inside[idx]) continue;
          const int jw = ((j0 + dj) % nx + nx) % nx;
          const double dt = grid.t_samples[i] - ts;
          const double dx = wrap_delta(grid.x_samples[jw] - xs, grid.period);
          const double g_mid =
              surface.metric(0.5 * (grid.t_samples[i] + ts), grid.x_samples[jw]);
          const double d = std::sqrt(dt * dt + g_mid * dx * dx);
          if (d < field.rho[idx]) {
            field.rho[idx] = d;
            field.source_component[idx] = static_cast<int8_t>(comp);
          }
        }
      }
    }
  }

  // Fast marching with deterministic tie order (value, then node index).
  using QueueEntry = std::pair<double, int>;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> heap;
  std::vector<uint8_t> accepted(n, 0);
  for (size_t idx = 0; idx < n; ++idx)
    if (field.rho[idx] < kInf) heap.push({field.rho[idx], static_cast<int>(idx)});

  auto update_node = [&](int i, int j) {
    const int idx = grid.index(i, j);
    if (!grid.inside[idx] || accepted[idx]) return;
    double a = kInf;  // best t-direction neighbor
    int a_src = -1;
    if (i > 0 && accepted[grid.index(i - 1, j)] &&
        field.rho[grid.index(i - 1, j)] < a) {
      a = field.rho[grid.index(i - 1, j)];
      a_src = field.source_component[grid.index(i - 1, j)];
    }
    if (i + 1 < nt && accepted[grid.index(i + 1, j)] &&
        field.rho[grid.index(i + 1, j)] < a) {
      a = field.rho[grid.index(i + 1, j)];
      a_src = field.source_component[grid.index(i + 1, j)];
    }
    double b = kInf;  // best x-direction neighbor
    int b_src = -1;
    for (int dj : {-1, 1}) {
      const int jdx = grid.index(i, j + dj);
      if (accepted[jdx] && field.rho[jdx] < b) {
        b = field.rho[jdx];
        b_src = field.source_component[jdx];
      }
    }
    if (a >= kInf && b >= kInf) return;
    const double g = surface.metric(grid.t_samples[i], grid.x_samples[j]);
    const double inv_a = 1.0 / (grid.ht * grid.ht);
    const double inv_b = 1.0 / (g * grid.hx * grid.hx);
    double value = kInf;
    if (a < kInf && b < kInf) {
      const double s1 = inv_a * a + inv_b * b;
      const double s2 = inv_a + inv_b;
      const double disc = s1 * s1 - s2 * (inv_a * a * a + inv_b * b * b - 1.0);
      if (disc >= 0.0) {
        const double candidate = (s1 + std::sqrt(disc)) / s2;
        if (candidate >= std::max(a, b)) value = candidate;
      }
    }
    if (value >= kInf)
      value = std::min(a + grid.ht, b + std::sqrt(g) * grid.hx);
    if (value < field.rho[idx]) {
      field.rho[idx] = value;
      field.source_component[idx] =
          static_cast<int8_t>(a <= b ? (a_src >= 0 ? a_src : b_src)
                                     : (b_src >= 0 ? b_src : a_src));
      heap.push({value, idx});
    }
  };

  while (!heap.empty()) {
    const auto [value, idx] = heap.top();
    heap.pop();
    if (accepted[idx] || value > field.rho[idx]) continue;
    accepted[idx] = 1;
    const int i = idx / nx, j = idx % nx;
    if (i > 0) update_node(i - 1, j);
    if (i + 1 < nt) update_node(i + 1, j);
    update_node(i, j - 1);
    update_node(i, j + 1);
  }

  size_t unreachable = 0;
  for (size_t idx = 0; idx < n; ++idx)
    if (grid.inside[idx] && field.rho[idx] >= kInf) ++unreachable;
  if (unreachable > 0) {
    std::ostringstream msg;
    msg << "solve_eikonal: " << unreachable << " interior nodes unreachable";
    throw std::runtime_error(msg.str());
  }
  return field;
}

double cut_time(const DistanceField& field, const ChartSurface2D& surface,
                const RayProfile& ray, double match_constant) {
  (void)surface;
  // g(t) = t - rho(gamma(t)) vanishes while the ray minimizes and rises with
  // slope up to 2 past the cut. The matching threshold c*h detects the rise;
  // extrapolating the rising branch back to zero removes the O(c*h) bias the
  // raw threshold would put on the cut time.
  const double slack = match_constant * field.h_metric;
  std::vector<double> gap(ray.times.size());
  size_t k_hi = ray.times.size();
  for (size_t k = 0; k < ray.times.size(); ++k) {
    const auto p = ray.geodesic_points[k];
    gap[k] = ray.times[k] - field.interpolate(p[0], p[1]);
    if (gap[k] > slack) {
      k_hi = k;
      break;
    }
  }
  double best;
  if (k_hi == ray.times.size()) {
    best = ray.times.back();  // never violated: the ray ended first
  } else {
    size_t k_lo = k_hi;
    while (k_lo > 0 && gap[k_lo - 1] > 0.25 * slack) --k_lo;
    if (k_lo == k_hi && k_lo > 0) --k_lo;
    const double dg = gap[k_hi] - gap[k_lo];
    if (k_lo < k_hi && dg > 0.0) {
      best = ray.times[k_lo] - gap[k_lo] * (ray.times[k_hi] - ray.times[k_lo]) / dg;
      best = std::clamp(best, 0.0, ray.times[k_hi]);
    } else {
      best = ray.times[k_hi];
    }
  }
  if (ray.tau1.is_finite()) best = std::min(best, ray.tau1.value());
  return best;
}

double region_volume(const ChartSurface2D& surface, const Grid2D& grid,
                     const std::function<bool(double, double)>& predicate) {
  const int sub = 4;
  double total = 0.0;
  const double cell_weight = grid.ht * grid.hx / (sub * sub);
  for (int i = 0; i + 1 < grid.nt; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      for (int p = 0; p < sub; ++p) {
        for (int q = 0; q < sub; ++q) {
          const double t = grid.t_samples[i] + (p + 0.5) * grid.ht / sub;
          const double x = grid.x_samples[j] + (q + 0.5) * grid.hx / sub;
          if (!surface.inside(t, x)) continue;
          if (!predicate(t, x)) continue;
          total += std::sqrt(surface.metric(t, x)) * cell_weight;
        }
      }
    }
  }
  return total;
}

FootPointResult foot_point(const DistanceField& field, const ChartSurface2D& surface,
                           double t, double x) {
  const Grid2D& g = field.grid;
  if (!surface.inside(t, x))
    throw std::invalid_argument("foot_point: point not interior");
  int i = std::clamp(static_cast<int>(std::round((t - g.t0) / g.ht)), 0, g.nt - 1);
  int j = (static_cast<int>(std::round(x / g.hx)) % g.nx + g.nx) % g.nx;
  if (!g.inside[g.index(i, j)])
    throw std::invalid_argument("foot_point: point not interior");

  // Near-cut tie detection: mixed source labels around the start node.
  bool tie = false;
  const int base_label = field.source_component[g.index(i, j)];
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      const int ii = std::clamp(i + di, 0, g.nt - 1);
      const int idx = g.index(ii, j + dj);
      if (g.inside[idx] && field.source_component[idx] >= 0 &&
          field.source_component[idx] != base_label)
        tie = true;
    }

  const double stop_level = 1.5 * field.h_metric;
  // Straight moves first so ties do not drift the descent sideways.
  const int moves[8][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                           {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  for (int step = 0; step < g.nt * 4; ++step) {
    if (field.rho[g.index(i, j)] <= stop_level) break;
    int best_i = i, best_j = j;
    double best = field.rho[g.index(i, j)];
    for (const auto& mv : moves) {
      const int ii = i + mv[0];
      if (ii < 0 || ii >= g.nt) continue;
      const int idx = g.index(ii, j + mv[1]);
      if (!g.inside[idx]) continue;
      if (field.rho[idx] < best) {
        best = field.rho[idx];
        best_i = ii;
        best_j = ((j + mv[1]) % g.nx + g.nx) % g.nx;
      }
    }
    if (best_i == i && best_j == j)
      throw std::runtime_error(
          "foot_point: descent stagnated (flat distance region near the cut locus)");
    i = best_i;
    j = best_j;
  }

  const int comp = field.source_component[g.index(i, j)];
  // Project to the boundary graph: nearest curve sample in the local metric.
  const double xn = g.x_samples[j], tn = g.t_samples[i];
  double best_d = kInf, best_x = xn;
  const int m = 16 * g.nx;
  for (int s = 0; s < m; ++s) {
    const double xs = g.period * s / m;
    const double dxw = wrap_delta(xs - xn, g.period);
    if (std::abs(dxw) > 4 * g.hx) continue;
    const double ts = surface.beta(comp, xs);
    const double gm = surface.metric(0.5 * (tn + ts), xn);
    const double d = std::sqrt((tn - ts) * (tn - ts) + gm * dxw * dxw);
    if (d < best_d) {
      best_d = d;
      best_x = xs;
    }
  }
  return FootPointResult{best_x, comp, tie};
}

}  // namespace tubecomp
