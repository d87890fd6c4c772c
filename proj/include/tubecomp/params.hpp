#pragma once

#include <cmath>
#include <stdexcept>

#include "tubecomp/extended_real.hpp"

namespace tubecomp {

/// Bounds (n, kappa, lambda): dimension, lower Ricci bound Ric >= (n-1)*kappa,
/// lower boundary mean curvature bound H >= lambda. Every comparison kernel is
/// a function of these three numbers.
struct ComparisonParams {
  int n = 2;
  double kappa = 0.0;
  double lambda = 0.0;

  ComparisonParams() = default;
  ComparisonParams(int n_, double kappa_, double lambda_)
      : n(n_), kappa(kappa_), lambda(lambda_) {
    validate();
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("ComparisonParams: n must be >= 2");
    if (!std::isfinite(kappa) || !std::isfinite(lambda))
      throw std::invalid_argument("ComparisonParams: kappa, lambda must be finite");
  }
};

/// The five shapes a constant-curvature model with constant-mean-curvature
/// boundary can take, keyed by the sign pattern of (kappa, lambda).
enum class ModelCase {
  ball_cap,          // geodesic ball: kappa > 0, or kappa <= 0 with lambda > sqrt|kappa|
  ball_complement,   // space form minus an open ball: kappa <= 0, lambda < -sqrt|kappa|
  exponential_cusp,  // kappa < 0, |lambda| = sqrt|kappa|
  euclidean_half,    // kappa = 0, lambda = 0
  hyperbolic_collar  // kappa < 0, |lambda| < sqrt|kappa|
};

struct ModelSpaceDescriptor {
  ComparisonParams params;
  ModelCase kind = ModelCase::euclidean_half;
  bool has_radius = false;
  double radius_parameter = 0.0;  // cut radius (ball cases) or collar offset
};

ModelSpaceDescriptor classify_model(const ComparisonParams& params);

}  // namespace tubecomp
