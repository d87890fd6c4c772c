#pragma once

#include <string>
#include <vector>

#include "tubecomp/kernels.hpp"
#include "tubecomp/tube_geometry.hpp"

namespace tubecomp {

/// Outcome of one inequality check. Margins are oriented so that nonnegative
/// means the inequality is satisfied; pass means worst_margin >= -tolerance.
struct CheckReport {
  std::string check;
  std::string name;
  double worst_margin = 0.0;
  double loc_t = 0.0;
  double loc_x = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;
  long samples = 0;
  std::string note;
};

struct RigidityVerdict {
  enum class Kind {
    none,
    warped_product_on_ball,
    ball_space_form,
    volume_growth_splitting
  };
  Kind kind = Kind::none;
  double radius = 0.0;
  double sup_deviation = 0.0;
  std::vector<std::string> supporting;
};

const char* rigidity_kind_name(RigidityVerdict::Kind kind);

// --- individual checks -----------------------------------------------------

/// theta'/theta <= (n-1) s'/s on (0, min(tau1, cut radius)), in the
/// cross-multiplied form (s^{n-1})' theta - s^{n-1} theta' >= 0. Since the
/// distance Laplacian along a minimizing normal ray equals -theta'/theta,
/// this doubles as the boundary-distance Laplacian comparison.
CheckReport check_log_jacobian(const TubeGeometry& g);

/// theta(t)/theta(s) <= s^{n-1}(t)/s^{n-1}(s) for s <= t, theta <= s^{n-1},
/// and tau1 <= cut radius.
CheckReport check_relative_jacobian(const TubeGeometry& g);

/// vol B_R / vol B_r <= model ratio over a log-spaced radius grid.
CheckReport check_volume_comparison(const TubeGeometry& g);

/// vol B_r <= vol_h(boundary) * f(r).
CheckReport check_heintze_karcher(const TubeGeometry& g);

/// vol B_r / f(r) <= vol_h(boundary), pointwise in r.
CheckReport check_volume_growth(const TubeGeometry& g);

/// Inscribed radius <= cut radius (skipped unless the ball condition holds).
CheckReport check_inscribed_radius(const TubeGeometry& g);

/// Measure contraction: preimage volume of the band under the t-extension map
/// dominates t * int_band s^{n-1}(t rho)/s^{n-1}(rho).
CheckReport check_measure_contraction(const TubeGeometry& g, double t,
                                      const RadialBand& band);

/// The discrete chain: band-ratio bound, geometric-series bound, and the
/// Riemann-sum refinement bound, which must dominate the true volume ratio.
CheckReport check_annulus_chain(const TubeGeometry& g, double t, double r1,
                                double r2, int k_max,
                                const std::vector<int>& refinements = {16, 256,
                                                                       4096});

/// Riemann-sum refinement bound (the discrete route to the volume comparison)
/// for vol B_R / vol B_r at refinement N; pure function of the parameters.
double chain_refinement_bound(const ComparisonParams& params, double r, double R,
                              int N);

/// Segment inequality: int E_f <= C1 * D * int f for nonnegative f.
CheckReport check_segment(const TubeGeometry& g, const std::vector<Expression>& fs);

/// Poincare inequality: int |psi| <= C1 * D * int ||grad psi|| for
/// boundary-vanishing psi.
CheckReport check_poincare(const TubeGeometry& g,
                           const std::vector<TrialFunction>& psis);

/// Radial-band isoperimetric estimate per boundary side.
struct SideBand {
  int component = 0;
  double t1 = 0.0;
  double t2 = 0.0;
};
CheckReport check_isoperimetric(const TubeGeometry& g,
                                const std::vector<SideBand>& bands);

/// Eigenvalue bounds: numeric mu_{1,2} against the kernel lower bounds, trial
/// Rayleigh quotients against bounds for p != 2, and the ordering
/// segment <= dirichlet <= kasue.
CheckReport check_eigen_bounds(const TubeGeometry& g,
                               const std::vector<double>& p_list,
                               const std::vector<TrialFunction>& trials);

RigidityVerdict detect_rigidity(const TubeGeometry& g, double tol);

// --- suite -------------------------------------------------------------------

struct SuiteConfig {
  std::vector<std::string> checks = {"all"};
  std::vector<double> t_values = {0.25, 0.5, 0.75};
  std::vector<RadialBand> bands;  // defaults to (0.25, 0.75) * inscribed radius
  std::vector<double> p_list = {2.0, 3.0};
  std::vector<TrialFunction> trials;  // defaults to the radial profile t
  std::vector<Expression> segment_functions;  // defaults to {1, t}
  double tol_scale = 1.0;
  double rigidity_tol = 1e-4;
  int chain_k_max = 4;
};

struct SuiteResult {
  std::vector<CheckReport> reports;
  RigidityVerdict verdict;
  bool all_pass = false;
};

SuiteResult run_suite(const TubeGeometry& g, const SuiteConfig& config);

std::string reports_to_csv(const std::vector<CheckReport>& reports);
std::string suite_to_json(const SuiteResult& result);

}  // namespace tubecomp
