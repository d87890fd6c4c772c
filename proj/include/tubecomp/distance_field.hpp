#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tubecomp/manifolds.hpp"

namespace tubecomp {

/// Uniform tensor grid over a chart surface; x is periodic, t spans the
/// bounding range of the boundary graphs. inside marks nodes between them.
struct Grid2D {
  int nt = 0;
  int nx = 0;
  double t0 = 0.0, t1 = 0.0;
  double period = 0.0;
  double ht = 0.0, hx = 0.0;
  std::vector<double> t_samples, x_samples;
  std::vector<uint8_t> inside;  // row-major, index i*nx + j

  static Grid2D for_surface(const ChartSurface2D& surface, int nt, int nx);
  int index(int i, int j) const { return i * nx + ((j % nx) + nx) % nx; }
};

/// Distance to the boundary on a chart grid, with the label of the boundary
/// component each node was reached from.
struct DistanceField {
  Grid2D grid;
  std::vector<double> rho;
  std::vector<int8_t> source_component;
  double h_metric = 0.0;  // effective mesh width in metric units

  /// Bilinear interpolation; corners outside the region are dropped with
  /// renormalized weights.
  double interpolate(double t, double x) const;
  int component_at(double t, double x) const;
  /// Dense text matrix (one row per t sample, comma separated).
  std::string dump_matrix() const;
};

/// First-order upwind fast marching for ||grad rho||_g = 1 with rho = 0 on
/// both boundary graphs; sub-grid initialization by distance to the sampled
/// curves in the local metric. Throws if interior nodes are unreachable.
DistanceField solve_eikonal(const ChartSurface2D& surface, const Grid2D& grid);

/// Largest ray sample time t with rho(gamma(t)) >= t - match_constant * h,
/// capped at the ray's first conjugate value and exit time.
double cut_time(const DistanceField& field, const ChartSurface2D& surface,
                const RayProfile& ray, double match_constant = 4.0);

/// Volume of {predicate} via cell sums of sqrt(G) with 4x4 supersampling of
/// fractional cells.
double region_volume(const ChartSurface2D& surface, const Grid2D& grid,
                     const std::function<bool(double t, double x)>& predicate);

struct FootPointResult {
  double x = 0.0;
  int component = 0;
  bool tie = false;  // a second boundary component is equally close (near cut)
};

/// Discrete steepest descent of rho from an interior point to the boundary,
/// then projection to the boundary graph parameter.
FootPointResult foot_point(const DistanceField& field, const ChartSurface2D& surface,
                           double t, double x);

}  // namespace tubecomp
