#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tubecomp/distance_field.hpp"
#include "tubecomp/manifolds.hpp"

namespace tubecomp {

struct TubeVolumeTable {
  std::vector<double> radii;
  std::vector<double> volumes;
  enum class Method { coarea, grid } method = Method::coarea;
  std::string to_csv() const;
};

/// Radial band {inner < rho <= outer} around the boundary.
struct RadialBand {
  double inner = 0.0;
  double outer = 0.0;
  RadialBand() = default;
  RadialBand(double r, double R) : inner(r), outer(R) {
    if (!(r >= 0.0) || !(r < R))
      throw std::invalid_argument("RadialBand: requires 0 <= inner < outer");
  }
};

/// Trial function for Rayleigh quotients: a symbolic psi(t, x) on chart/tube
/// coordinates, or a radial profile composed with the boundary distance.
struct TrialFunction {
  enum class Kind { symbolic, radial_of_distance } kind = Kind::radial_of_distance;
  Expression expr;
  static TrialFunction symbolic(Expression e) {
    return {Kind::symbolic, std::move(e)};
  }
  static TrialFunction radial(Expression e) {
    return {Kind::radial_of_distance, std::move(e)};
  }
};

struct GeometryOptions {
  int boundary_samples = 512;
  double ode_step = 1e-3;
  int grid_nt = 256;
  int grid_nx = 256;
  double t_truncation = 40.0;  // half-infinite tubes run to this Fermi depth
  double cut_match_constant = 4.0;
  int sl_gridpoints = 1024;    // radial eigensolver base grid
  int chart_eigen_n = 64;      // chart eigensolver base grid (per axis)
  bool allow_truncated_eigen = false;
  // Worker threads for per-sample ray profiles. Each worker writes its own
  // index slots and reductions stay sequential, so the thread count never
  // changes any reported number.
  int threads = 1;
};

/// Per-manifold computation context: boundary sampling, ray profiles, cut
/// times, and (for charts) the eikonal distance field, all built once and
/// shared by the integral quantities and the verification checks.
class TubeGeometry {
 public:
  explicit TubeGeometry(CertifiedManifold cm, GeometryOptions options = {});

  const CertifiedManifold& certified() const { return cm_; }
  const ComparisonParams& params() const { return cm_.params; }
  const GeometryOptions& options() const { return options_; }

  int components() const;
  int sample_count() const { return options_.boundary_samples; }
  double sample_x(int k) const;
  /// dvol_h weight carried by boundary sample k of a component.
  double sample_weight(int component, int k) const;
  const RayProfile& ray(int component, int k) const;
  double cut(int component, int k) const;

  /// Warped tubes are fiber-symmetric: one ray represents the whole side.
  /// These collapse boundary loops accordingly (count 1 and the full side
  /// measure for tubes; per-sample values for charts).
  int integration_samples() const { return tube() ? 1 : sample_count(); }
  double integration_weight(int component, int k) const;

  /// Truncated Fermi depth: tube length, or t_truncation for half-infinite.
  double depth_limit() const;
  bool truncated() const;

  std::pair<double, bool> inscribed_radius() const;

  /// Integral of theta(s) * factor(s) over [lo, hi] along one ray.
  double theta_integral(int component, int k, double lo, double hi,
                        const std::function<double(double)>& factor = {}) const;

  double tube_volume(double r) const;
  double annulus_volume(const RadialBand& band) const;
  TubeVolumeTable volume_table(int points, double r_max) const;
  /// Grid cross-check of tube_volume for chart surfaces.
  double tube_volume_grid(double r) const;

  double extension_preimage_volume(double t, const RadialBand& band) const;

  double segment_excursion(const Expression& f, double t, double x) const;

  double rayleigh_quotient(const TrialFunction& psi, double p) const;
  double dirichlet_eigen() const;

  /// Integral of F(t, x) over the manifold (tube or chart coordinates).
  double interior_integral(const std::function<double(double, double)>& f) const;
  /// Distance to the boundary at a point (exact Fermi form for tubes,
  /// interpolated eikonal field for charts).
  double distance_at(double t, double x) const;

  const DistanceField* field() const { return field_ ? &*field_ : nullptr; }
  const WarpedTube* tube() const { return std::get_if<WarpedTube>(&cm_.manifold); }
  const ChartSurface2D* chart() const {
    return std::get_if<ChartSurface2D>(&cm_.manifold);
  }

 private:
  CertifiedManifold cm_;
  GeometryOptions options_;
  std::vector<std::vector<RayProfile>> rays_;   // [component][sample] (charts)
  std::vector<RayProfile> shared_rays_;         // [component] (warped tubes)
  std::vector<std::vector<double>> cuts_;       // [component][sample]
  std::vector<std::vector<double>> weights_;    // [component][sample]
  std::optional<Grid2D> grid_;
  std::optional<DistanceField> field_;
};

}  // namespace tubecomp
