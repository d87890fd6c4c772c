#include "tubecomp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tubecomp/numerics.hpp"

namespace tubecomp {

ModelSpaceDescriptor classify_model(const ComparisonParams& params) {
  params.validate();
  const double k = params.kappa, l = params.lambda;
  const double root = std::sqrt(std::abs(k));
  ModelSpaceDescriptor d;
  d.params = params;
  if (k > 0.0 || l > root) {
    d.kind = ModelCase::ball_cap;
    d.has_radius = true;
    d.radius_parameter = kernels::cut_radius(params).value();
  } else if (l < -root) {
    d.kind = ModelCase::ball_complement;
    d.has_radius = true;
    d.radius_parameter =
        kernels::cut_radius(ComparisonParams(params.n, k, -l)).value();
  } else if (k == 0.0) {
    d.kind = ModelCase::euclidean_half;  // kappa = 0, lambda = 0
  } else if (std::abs(l) == root) {
    d.kind = ModelCase::exponential_cusp;
  } else {
    d.kind = ModelCase::hyperbolic_collar;
    d.has_radius = true;
    d.radius_parameter = kernels::collar_offset(k, l);
  }
  return d;
}

namespace kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

double artanh(double x) { return 0.5 * std::log((1.0 + x) / (1.0 - x)); }

double pow_int(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

double sn(const ComparisonParams& p, double t) {
  return pow_int(s_boundary(p, t).value, p.n - 1);
}

double sbar_n(const ComparisonParams& p, double t) {
  return pow_int(s_bar(p, t), p.n - 1);
}

// Location of the single zero of s' in (0, cut radius), if any.
std::optional<double> warp_critical_point(const ComparisonParams& p) {
  const double k = p.kappa, l = p.lambda;
  if (k > 0.0) {
    const double sq = std::sqrt(k);
    double t = std::atan2(-l, sq) / sq;  // tan(sq t) = -l/sq
    if (t <= 0.0) t += kPi / sq;
    return t;
  }
  if (k < 0.0) {
    const double a = std::sqrt(-k);
    if (std::abs(l) < a) return artanh(l / a) / a;
    return std::nullopt;  // s' never vanishes
  }
  return std::nullopt;  // kappa = 0: s' constant
}

// Fixed 8-point Gauss-Legendre panel.
double gl8(const std::function<double(double)>& f, double a, double b) {
  static const double x[4] = {0.1834346424956498, 0.5255324099163290,
                              0.7966664774136267, 0.9602898564975363};
  static const double w[4] = {0.3626837833783620, 0.3137066458778873,
                              0.2223810344533745, 0.1012285362903763};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return s * h;
}

// Cumulative integral of f on [lo, hi] over a uniform panel grid, queryable
// at arbitrary interior points. Keeps both forward and backward partial sums:
// the remainder int_t^hi must be accumulated from the right, otherwise
// total - cum(t) cancels catastrophically when the tail is tiny (exponential
// warps at large D).
class CumulativeIntegral {
 public:
  CumulativeIntegral(std::function<double(double)> f, double lo, double hi,
                     int panels)
      : f_(std::move(f)),
        lo_(lo),
        hi_(hi),
        panels_(panels),
        cum_(panels + 1),
        rem_(panels + 1) {
    const double h = (hi - lo) / panels;
    std::vector<double> panel(panels);
    for (int i = 0; i < panels; ++i)
      panel[i] = gl8(f_, lo + i * h, lo + (i + 1) * h);
    cum_[0] = 0.0;
    for (int i = 0; i < panels; ++i) cum_[i + 1] = cum_[i] + panel[i];
    rem_[panels] = 0.0;
    for (int i = panels; i-- > 0;) rem_[i] = rem_[i + 1] + panel[i];
  }

  double total() const { return cum_.back(); }

  double eval(double t) const {
    if (t <= lo_) return 0.0;
    if (t >= hi_) return total();
    const int i = panel_index(t);
    const double h = (hi_ - lo_) / panels_;
    return cum_[i] + gl8(f_, lo_ + i * h, t);
  }

  /// int_t^hi, accumulated from the right.
  double remainder(double t) const {
    if (t <= lo_) return total();
    if (t >= hi_) return 0.0;
    const int i = panel_index(t);
    const double h = (hi_ - lo_) / panels_;
    return gl8(f_, t, lo_ + (i + 1) * h) + rem_[i + 1];
  }

 private:
  int panel_index(double t) const {
    const double h = (hi_ - lo_) / panels_;
    return std::clamp(static_cast<int>((t - lo_) / h), 0, panels_ - 1);
  }

  std::function<double(double)> f_;
  double lo_, hi_;
  int panels_;
  std::vector<double> cum_, rem_;
};

bool is_cusp_case(const ComparisonParams& p) {
  return p.kappa < 0.0 &&
         std::abs(p.lambda - std::sqrt(-p.kappa)) <= 1e-12 * std::max(1.0, p.lambda);
}

void check_d_in_range(const ComparisonParams& p, double D) {
  if (!(D > 0.0)) throw std::domain_error("D must be positive");
  const ExtendedReal c = cut_radius(p);
  if (c.is_finite() && D > c.value() * (1.0 + 1e-12))
    throw std::domain_error("D exceeds the cut radius of the comparison warp");
}

}  // namespace

ValueDeriv s_point(double kappa, double t) {
  if (kappa > 0.0) {
    const double sq = std::sqrt(kappa);
    return {std::sin(sq * t) / sq, std::cos(sq * t)};
  }
  if (kappa < 0.0) {
    const double a = std::sqrt(-kappa);
    return {std::sinh(a * t) / a, std::cosh(a * t)};
  }
  return {t, 1.0};
}

ValueDeriv s_boundary(const ComparisonParams& params, double t) {
  const double k = params.kappa, l = params.lambda;
  if (k > 0.0) {
    const double sq = std::sqrt(k);
    const double c = std::cos(sq * t), s = std::sin(sq * t);
    return {c - (l / sq) * s, -sq * s - l * c};
  }
  if (k < 0.0) {
    // Exponential form avoids the cosh-sinh cancellation for large t.
    const double a = std::sqrt(-k);
    const double cp = 0.5 * (1.0 - l / a), cm = 0.5 * (1.0 + l / a);
    const double ep = std::exp(a * t), em = std::exp(-a * t);
    return {cp * ep + cm * em, a * (cp * ep - cm * em)};
  }
  return {1.0 - l * t, -l};
}

bool ball_condition(double kappa, double lambda) {
  if (kappa > 0.0) return true;
  if (kappa == 0.0) return lambda > 0.0;
  return lambda > std::sqrt(-kappa);
}

ExtendedReal cut_radius(const ComparisonParams& params) {
  const double k = params.kappa, l = params.lambda;
  if (!ball_condition(k, l)) return ExtendedReal::infinity();
  if (k > 0.0) {
    const double sq = std::sqrt(k);
    // First positive solution of cot(sq t) = l/sq; arccot ranges over (0, pi),
    // which for l < 0 lands the root in (pi/(2 sq), pi/sq).
    return ExtendedReal(std::atan2(1.0, l / sq) / sq);
  }
  if (k == 0.0) return ExtendedReal(1.0 / l);
  const double a = std::sqrt(-k);
  return ExtendedReal(artanh(a / l) / a);
}

double s_bar(const ComparisonParams& params, double t) {
  if (t < 0.0) throw std::domain_error("s_bar: t must be >= 0");
  const ExtendedReal c = cut_radius(params);
  if (c.is_finite() && t >= c.value()) return 0.0;
  return s_boundary(params, t).value;
}

double f_profile(const ComparisonParams& params, double r) {
  if (r < 0.0) throw std::domain_error("f_profile: r must be >= 0");
  if (r == 0.0) return 0.0;
  const ExtendedReal c = cut_radius(params);
  const double top = c.is_finite() ? std::min(r, c.value()) : r;
  numerics::Tolerance tol;
  tol.rel = 1e-10;
  return numerics::integrate([&](double t) { return sn(params, t); }, 0.0, top, tol);
}

double collar_offset(double kappa, double lambda) {
  if (!(kappa < 0.0))
    throw std::domain_error("collar_offset: requires kappa < 0");
  const double a = std::sqrt(-kappa);
  if (!(std::abs(lambda) < a))
    throw std::domain_error("collar_offset: requires |lambda| < sqrt|kappa|");
  return artanh(-lambda / a) / a;
}

double dirichlet_constant(const ComparisonParams& params, ExtendedReal D) {
  params.validate();
  if (is_cusp_case(params)) {
    const double al = (params.n - 1) * params.lambda;
    if (!D.is_finite()) return 1.0 / al;
    if (!(D.value() > 0.0)) throw std::domain_error("D must be positive");
    return (1.0 - std::exp(-al * D.value())) / al;
  }
  if (!D.is_finite())
    throw std::domain_error(
        "dirichlet_constant: D = infinity requires kappa < 0, lambda = sqrt|kappa|");
  check_d_in_range(params, D.value());
  return dirichlet_constant_scan(params, D.value());
}

double dirichlet_constant_scan(const ComparisonParams& params, double D) {
  check_d_in_range(params, D);
  CumulativeIntegral cum([&](double t) { return sn(params, t); }, 0.0, D, 4096);
  const double hi = D * (1.0 - 1e-9);
  auto ratio = [&](double t) { return cum.remainder(t) / sn(params, t); };
  return numerics::sup_scan(ratio, 0.0, hi, 4096).value;
}

double segment_constant(const ComparisonParams& params, double D) {
  params.validate();
  if (!std::isfinite(D)) throw std::domain_error("segment_constant: D must be finite");
  check_d_in_range(params, D);
  const std::optional<double> crit = warp_critical_point(params);

  // Nonincreasing warp on [0, D]: every ratio is <= 1 and the sup is 1.
  const bool increasing_somewhere =
      (params.lambda < 0.0) ||
      (crit && *crit < D && params.kappa < 0.0);  // interior minimum, rises after
  if (!increasing_somewhere) return 1.0;

  // s has at most one critical point, so the nested sup is attained on the
  // candidate set {interior max, D} against the prefix minimum.
  std::vector<double> l_candidates = {D};
  if (crit && *crit > 0.0 && *crit < D && params.kappa > 0.0)
    l_candidates.push_back(*crit);
  double best = 1.0;
  for (double l : l_candidates) {
    double prefmin = std::min(sn(params, 0.0), sn(params, l));
    if (crit && *crit > 0.0 && *crit < l && params.kappa < 0.0)
      prefmin = std::min(prefmin, sn(params, *crit));
    best = std::max(best, sn(params, l) / prefmin);
  }
  return best;
}

double kasue_bar_mu(const ComparisonParams& params, double D) {
  params.validate();
  if (!std::isfinite(D)) throw std::domain_error("kasue_bar_mu: D must be finite");
  check_d_in_range(params, D);
  const double hi = D * (1.0 - 1e-9);
  for (double t : {0.25 * D, 0.5 * D, 0.75 * D})
    if (!(s_boundary(params, t).value > 0.0))
      throw std::domain_error("kasue_bar_mu: warp vanishes inside (0, D)");
  CumulativeIntegral cum_forward([&](double t) { return sn(params, t); }, 0.0, D, 4096);
  CumulativeIntegral cum_inverse(
      [&](double t) { return 1.0 / sn(params, t); }, 0.0, hi, 4096);
  auto product = [&](double t) {
    return cum_forward.remainder(t) * cum_inverse.eval(t);
  };
  const double sup = numerics::sup_scan(product, 0.0, hi, 4096).value;
  if (!(sup > 0.0)) throw std::runtime_error("kasue_bar_mu: degenerate supremum");
  return 1.0 / (4.0 * sup);
}

double eigen_lower_bound(const ComparisonParams& params, ExtendedReal D, double p,
                         EigenBoundVariant variant) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::domain_error("eigen_lower_bound: requires p in (1, infinity)");
  switch (variant) {
    case EigenBoundVariant::dirichlet: {
      const double c = dirichlet_constant(params, D);
      return std::pow(p * c, -p);
    }
    case EigenBoundVariant::segment: {
      if (!D.is_finite())
        throw std::domain_error("eigen_lower_bound(segment): D must be finite");
      const double c1 = segment_constant(params, D.value());
      return std::pow(p * c1 * D.value(), -p);
    }
    case EigenBoundVariant::rigid: {
      if (!is_cusp_case(params))
        throw std::domain_error(
            "eigen_lower_bound(rigid): requires kappa < 0, lambda = sqrt|kappa|");
      return std::pow((params.n - 1) * params.lambda / p, p);
    }
  }
  throw std::logic_error("eigen_lower_bound: unknown variant");
}

double phi_profile(const ComparisonParams& params, double t) {
  if (t < 0.0) throw std::domain_error("phi_profile: t must be >= 0");
  return t * std::exp(0.5 * (params.n - 1) * params.lambda * t);
}

double model_ratio(const ComparisonParams& params, double r, double R) {
  if (!(r > 0.0) || !(r <= R))
    throw std::domain_error("model_ratio: requires 0 < r <= R");
  return f_profile(params, R) / f_profile(params, r);
}

double interval_sup_sn(const ComparisonParams& params, double a, double b) {
  double best = std::max(sbar_n(params, a), sbar_n(params, b));
  const std::optional<double> crit = warp_critical_point(params);
  if (crit && *crit > a && *crit < b)
    best = std::max(best, sbar_n(params, *crit));
  return best;
}

double interval_inf_sn(const ComparisonParams& params, double a, double b) {
  double best = std::min(sbar_n(params, a), sbar_n(params, b));
  const std::optional<double> crit = warp_critical_point(params);
  if (crit && *crit > a && *crit < b)
    best = std::min(best, sbar_n(params, *crit));
  const ExtendedReal c = cut_radius(params);
  if (c.is_finite() && c.value() > a && c.value() < b) best = 0.0;
  return best;
}

}  // namespace kernels
}  // namespace tubecomp
