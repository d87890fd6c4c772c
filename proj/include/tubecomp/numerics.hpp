#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tubecomp::numerics {

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-13;
  int max_subdivisions = 4000;
};

/// Adaptive Gauss-Kronrod quadrature of f over [a, b]. Panels are processed
/// depth-first, leftmost first, so the accumulation order is fixed and the
/// result is reproducible regardless of thread count.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Tolerance& tol = {});

/// Bracketed root of f on [lo, hi] (requires f(lo)*f(hi) <= 0). Bisection with
/// secant acceleration; stops when |f| <= tol.abs or the bracket width does.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Classical fourth-order one-step integration with fixed step size, dense
/// output at every multiple of `step` up to t_end (last step shortened).
Trajectory solve_ivp(
    const std::function<void(double, std::span<const double>, std::span<double>)>& field,
    std::span<const double> y0, double t_end, double step);

struct SturmLiouvilleResult {
  double mu = 0.0;
  std::vector<double> mode;  // on the finer grid, interior nodes
};

/// Smallest eigenvalue of -(w u')' = mu w u on (a,b), w = weight > 0, with a
/// Dirichlet condition at a and either a Dirichlet (default) or natural
/// condition at b. Single uniform grid, three-point flux form, inverse power
/// iteration on the tridiagonal system.
SturmLiouvilleResult sturm_liouville_single_grid(
    const std::function<double(double)>& weight, double a, double b,
    int gridpoints, bool natural_right = false);

/// As above but Richardson-extrapolated over gridpoints and 2*gridpoints.
SturmLiouvilleResult min_eigen_sturm_liouville(
    const std::function<double(double)>& weight, double a, double b,
    int gridpoints, bool natural_right = false);

/// Smallest generalized eigenvalue of A u = mu B u where apply_a is the
/// (symmetric positive definite) stiffness action, diag_a its diagonal, and
/// mass the diagonal of B. Inverse power iteration from the all-ones vector,
/// inner solves by Jacobi-preconditioned conjugate gradients; stops when the
/// Rayleigh quotient stagnates below 1e-10 relative.
double min_eigen_generalized(
    const std::function<void(std::span<const double>, std::span<double>)>& apply_a,
    std::span<const double> diag_a, std::span<const double> mass,
    int max_iterations = 10000);

/// Scan f over [lo, hi] on a uniform grid (grid_points samples, endpoints
/// included), then refine around the best three local maxima with
/// golden-section search. Returns the supremum estimate and its location.
struct SupResult {
  double value;
  double arg;
};
SupResult sup_scan(const std::function<double(double)>& f, double lo, double hi,
                   int grid_points = 4096);

}  // namespace tubecomp::numerics
