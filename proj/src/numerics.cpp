#include "tubecomp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tubecomp::numerics {

namespace {

// 7-point Gauss / 15-point Kronrod pair (positive abscissae).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  for (int k = 0; k < 7; ++k) {
    fv[k] = f(c - half * kXgk[k]);
    fv[14 - k] = f(c + half * kXgk[k]);
  }
  fv[7] = f(c);
  double kronrod = 0.0, gauss = 0.0;
  for (int k = 0; k < 7; ++k) kronrod += kWgk[k] * (fv[k] + fv[14 - k]);
  kronrod += kWgk[7] * fv[7];
  for (int k = 0; k < 3; ++k) gauss += kWg[k] * (fv[2 * k + 1] + fv[13 - 2 * k]);
  gauss += kWg[3] * fv[7];
  return {kronrod * half, std::abs(kronrod - gauss) * half};
}

void integrate_recursive(const std::function<double(double)>& f, double a, double b,
                         double tol_per_length, int depth, int& panels_left,
                         double& acc) {
  PanelResult p = gauss_kronrod(f, a, b);
  if (!std::isfinite(p.integral))
    throw std::runtime_error("integrate: non-finite integrand value");
  if (p.error <= tol_per_length * (b - a) || depth >= 48) {
    if (depth >= 48 && p.error > 1e6 * tol_per_length * (b - a))
      throw std::runtime_error("integrate: failed to converge (depth limit)");
    acc += p.integral;
    return;
  }
  if (--panels_left <= 0)
    throw std::runtime_error("integrate: failed to converge (max subdivisions)");
  const double c = 0.5 * (a + b);
  integrate_recursive(f, a, c, tol_per_length, depth + 1, panels_left, acc);
  integrate_recursive(f, c, b, tol_per_length, depth + 1, panels_left, acc);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Tolerance& tol) {
  if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
  if (a == b) return 0.0;
  PanelResult whole = gauss_kronrod(f, a, b);
  const double scale = std::max(std::abs(whole.integral), 1.0e-300);
  const double tol_per_length =
      std::max(tol.abs, tol.rel * scale) / (b - a);
  double acc = 0.0;
  int panels_left = tol.max_subdivisions;
  integrate_recursive(f, a, b, tol_per_length, 0, panels_left, acc);
  return acc;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw std::invalid_argument("find_root: no sign change on bracket");
  for (int it = 0; it < 200; ++it) {
    // Secant proposal, clipped into the open bracket; otherwise bisect.
    double mid = 0.5 * (lo + hi);
    double x = mid;
    const double denom = fhi - flo;
    if (denom != 0.0) {
      const double sec = lo - flo * (hi - lo) / denom;
      const double margin = 0.01 * (hi - lo);
      if (sec > lo + margin && sec < hi - margin) x = sec;
    }
    const double fx = f(x);
    if (std::abs(fx) <= tol.abs || (hi - lo) <= tol.abs + 4.0 * 2.2e-16 * std::abs(x))
      return x;
    if (flo * fx <= 0.0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
  }
  return 0.5 * (lo + hi);
}

Trajectory solve_ivp(
    const std::function<void(double, std::span<const double>, std::span<double>)>& field,
    std::span<const double> y0, double t_end, double step) {
  if (step <= 0.0) throw std::invalid_argument("solve_ivp: step must be positive");
  if (t_end < 0.0) throw std::invalid_argument("solve_ivp: t_end must be >= 0");
  const size_t dim = y0.size();
  Trajectory traj;
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  double t = 0.0;
  traj.times.push_back(0.0);
  traj.states.push_back(y);
  const long nsteps = static_cast<long>(std::ceil(t_end / step - 1e-12));
  for (long i = 0; i < nsteps; ++i) {
    const double h = std::min(step, t_end - t);
    field(t, y, k1);
    for (size_t j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    field(t + 0.5 * h, tmp, k2);
    for (size_t j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    field(t + 0.5 * h, tmp, k3);
    for (size_t j = 0; j < dim; ++j) tmp[j] = y[j] + h * k3[j];
    field(t + h, tmp, k4);
    for (size_t j = 0; j < dim; ++j) {
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!std::isfinite(y[j]))
        throw std::runtime_error("solve_ivp: non-finite state encountered");
    }
    t += h;
    traj.times.push_back(t);
    traj.states.push_back(y);
  }
  return traj;
}

namespace {

// Solves the symmetric tridiagonal system given by diag/off (off[i] couples
// i and i+1) in place; rhs is overwritten with the solution.
void solve_tridiagonal(std::vector<double> diag, std::vector<double> off,
                       std::vector<double>& rhs) {
  const size_t n = diag.size();
  for (size_t i = 1; i < n; ++i) {
    const double m = off[i - 1] / diag[i - 1];
    diag[i] -= m * off[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

SturmLiouvilleResult sturm_liouville_single_grid(
    const std::function<double(double)>& weight, double a, double b,
    int gridpoints, bool natural_right) {
  if (gridpoints < 16)
    throw std::invalid_argument("sturm_liouville: gridpoints must be >= 16");
  const int n_cells = gridpoints;
  const double h = (b - a) / n_cells;
  const int n_unknowns = natural_right ? n_cells : n_cells - 1;

  std::vector<double> w_half(n_cells + 1);  // weight at half points i+1/2
  for (int i = 0; i <= n_cells; ++i) w_half[i] = weight(a + (i + 0.5) * h);
  std::vector<double> diag(n_unknowns), off(std::max(0, n_unknowns - 1)), mass(n_unknowns);
  for (int i = 1; i <= n_unknowns; ++i) {
    const double x = a + i * h;
    const double wl = w_half[i - 1];
    const double wr = (i == n_cells) ? 0.0 : w_half[i];
    diag[i - 1] = (wl + wr) / (h * h);
    if (i - 1 < n_unknowns - 1) off[i - 1] = -wr / (h * h);
    mass[i - 1] = (i == n_cells) ? 0.5 * weight(x) : weight(x);
  }

  std::vector<double> u(n_unknowns, 1.0), bu(n_unknowns);
  double mu_prev = 0.0;
  for (int it = 0; it < 10000; ++it) {
    for (int i = 0; i < n_unknowns; ++i) bu[i] = mass[i] * u[i];
    std::vector<double> rhs = bu;
    solve_tridiagonal(diag, off, rhs);
    u = rhs;
    double norm = 0.0;
    for (double v : u) norm = std::max(norm, std::abs(v));
    for (double& v : u) v /= norm;
    // Rayleigh quotient u'Au / u'Bu via the tridiagonal action.
    double uau = 0.0, ubu = 0.0;
    for (int i = 0; i < n_unknowns; ++i) {
      double av = diag[i] * u[i];
      if (i > 0) av += off[i - 1] * u[i - 1];
      if (i + 1 < n_unknowns) av += off[i] * u[i + 1];
      uau += u[i] * av;
      ubu += u[i] * mass[i] * u[i];
    }
    const double mu = uau / ubu;
    if (it > 3 && std::abs(mu - mu_prev) <= 1e-12 * std::abs(mu) + 1e-14)
      return {mu, u};
    mu_prev = mu;
  }
  throw std::runtime_error("sturm_liouville: inverse iteration did not converge");
}

SturmLiouvilleResult min_eigen_sturm_liouville(
    const std::function<double(double)>& weight, double a, double b,
    int gridpoints, bool natural_right) {
  SturmLiouvilleResult coarse =
      sturm_liouville_single_grid(weight, a, b, gridpoints, natural_right);
  SturmLiouvilleResult fine =
      sturm_liouville_single_grid(weight, a, b, 2 * gridpoints, natural_right);
  fine.mu = (4.0 * fine.mu - coarse.mu) / 3.0;
  return fine;
}

double min_eigen_generalized(
    const std::function<void(std::span<const double>, std::span<double>)>& apply_a,
    std::span<const double> diag_a, std::span<const double> mass,
    int max_iterations) {
  const int n = static_cast<int>(mass.size());
  if (n == 0) throw std::invalid_argument("min_eigen_generalized: empty system");
  std::vector<double> jacobi(n), v(n, 1.0), u(n, 0.0), r(n), z(n), p(n), ap(n), tmp(n);
  for (int i = 0; i < n; ++i) jacobi[i] = std::max(diag_a[i], 1e-300);

  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  };

  double mu_prev = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    // Solve A u = B v by preconditioned CG.
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = mass[i] * v[i];
    std::fill(u.begin(), u.end(), 0.0);
    r = rhs;
    for (int i = 0; i < n; ++i) z[i] = r[i] / jacobi[i];
    p = z;
    double rz = dot(r, z);
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    for (int k = 0; k < 20 * n + 200; ++k) {
      apply_a(p, ap);
      const double alpha = rz / dot(p, ap);
      for (int i = 0; i < n; ++i) {
        u[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      if (std::sqrt(dot(r, r)) <= 1e-12 * rhs_norm) break;
      for (int i = 0; i < n; ++i) z[i] = r[i] / jacobi[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm = std::max(norm, std::abs(u[i]));
    for (int i = 0; i < n; ++i) v[i] = u[i] / norm;
    apply_a(v, tmp);
    double vav = dot(v, tmp), vbv = 0.0;
    for (int i = 0; i < n; ++i) vbv += v[i] * mass[i] * v[i];
    const double mu = vav / vbv;
    if (it > 2 && std::abs(mu - mu_prev) <= 1e-10 * std::abs(mu)) return mu;
    mu_prev = mu;
  }
  throw std::runtime_error("min_eigen_generalized: iteration did not converge");
}

SupResult sup_scan(const std::function<double(double)>& f, double lo, double hi,
                   int grid_points) {
  if (!(hi > lo)) return {f(lo), lo};
  if (grid_points < 8) grid_points = 8;
  std::vector<double> xs(grid_points), fs(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid_points - 1);
    fs[i] = f(xs[i]);
  }
  // Collect local maxima (including endpoints), keep the best three.
  std::vector<int> candidates;
  for (int i = 0; i < grid_points; ++i) {
    const bool left_ok = (i == 0) || fs[i] >= fs[i - 1];
    const bool right_ok = (i == grid_points - 1) || fs[i] >= fs[i + 1];
    if (left_ok && right_ok) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](int a, int b) { return fs[a] > fs[b]; });
  if (candidates.size() > 3) candidates.resize(3);

  double best_val = fs[0], best_arg = xs[0];
  for (int i = 0; i < grid_points; ++i)
    if (fs[i] > best_val) best_val = fs[i], best_arg = xs[i];

  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int idx : candidates) {
    double a = xs[std::max(0, idx - 1)];
    double b = xs[std::min(grid_points - 1, idx + 1)];
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 90 && (b - a) > 1e-14 * (hi - lo); ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = f(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = f(x1);
      }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    if (fm > best_val) best_val = fm, best_arg = xm;
  }
  return {best_val, best_arg};
}

}  // namespace tubecomp::numerics
