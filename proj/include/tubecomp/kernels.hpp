#pragma once

#include "tubecomp/extended_real.hpp"
#include "tubecomp/params.hpp"

namespace tubecomp::kernels {

struct ValueDeriv {
  double value;
  double deriv;
};

/// Solution of f'' + kappa f = 0 with f(0) = 0, f'(0) = 1, and its derivative.
ValueDeriv s_point(double kappa, double t);

/// Solution of f'' + kappa f = 0 with f(0) = 1, f'(0) = -lambda, and its
/// derivative. This is the comparison warp for a boundary of mean curvature
/// lambda in curvature kappa.
ValueDeriv s_boundary(const ComparisonParams& params, double t);

/// True iff the comparison warp has a positive zero, i.e. the model space is
/// a closed geodesic ball: kappa > 0, or kappa = 0 and lambda > 0, or
/// kappa < 0 and lambda > sqrt|kappa|.
bool ball_condition(double kappa, double lambda);

/// First positive zero of the comparison warp when the ball condition holds
/// (closed form in every case), infinity otherwise.
ExtendedReal cut_radius(const ComparisonParams& params);

/// Comparison warp extended by zero past the cut radius. Requires t >= 0.
double s_bar(const ComparisonParams& params, double t);

/// Model tube volume profile: integral of s_bar^{n-1} over [0, r].
double f_profile(const ComparisonParams& params, double r);

/// Offset t with s'_{kappa,0}(t)/s_{kappa,0}(t) = -lambda, i.e.
/// artanh(-lambda/sqrt|kappa|)/sqrt|kappa|. Requires kappa < 0 and
/// |lambda| < sqrt|kappa| (the collar model case); may be negative.
double collar_offset(double kappa, double lambda);

/// The eigenvalue constant sup_{t in [0,D)} int_t^D s^{n-1} / s^{n-1}(t).
/// D = infinity is permitted only for kappa < 0, lambda = sqrt|kappa|, where
/// the closed form ((n-1)lambda)^{-1} (1 - e^{-(n-1)lambda D}) applies.
double dirichlet_constant(const ComparisonParams& params, ExtendedReal D);

/// Numeric scan path for dirichlet_constant (finite D only); exposed so the
/// closed form can be cross-checked against it.
double dirichlet_constant_scan(const ComparisonParams& params, double D);

/// The segment constant sup_{0 < t <= l < D} s^{n-1}(l)/s^{n-1}(t); exactly 1
/// when the warp is nonincreasing on [0, D].
double segment_constant(const ComparisonParams& params, double D);

/// Kasue-style eigenvalue constant
///   (4 sup_{t in (0,D)} int_t^D s^{n-1} * int_0^t s^{1-n})^{-1},
/// computed by cumulative quadrature plus a sup scan.
double kasue_bar_mu(const ComparisonParams& params, double D);

enum class EigenBoundVariant { dirichlet, segment, rigid };

/// Lower bound for the smallest Dirichlet p-eigenvalue:
///   dirichlet: (p C(n,kappa,lambda,D))^{-p}
///   segment:   (p C1(n,kappa,lambda,D) D)^{-p}
///   rigid:     ((n-1)lambda/p)^p, requires kappa < 0, lambda = sqrt|kappa|
double eigen_lower_bound(const ComparisonParams& params, ExtendedReal D,
                         double p, EigenBoundVariant variant);

/// Trial profile t e^{(n-1) lambda t / 2}.
double phi_profile(const ComparisonParams& params, double t);

/// Model tube volume ratio f(R)/f(r) for 0 < r <= R.
double model_ratio(const ComparisonParams& params, double r, double R);

/// Supremum / infimum of s_bar^{n-1} on [a, b] (0 <= a <= b), evaluated from
/// the endpoints and the single interior critical point of the warp.
double interval_sup_sn(const ComparisonParams& params, double a, double b);
double interval_inf_sn(const ComparisonParams& params, double a, double b);

}  // namespace tubecomp::kernels
