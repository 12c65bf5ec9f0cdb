#pragma once

#include <complex>

#include <Eigen/Core>

#include "coastopt/mesh.hpp"

namespace coastopt {

using Complex = std::complex<double>;

/// One incident-wave configuration. The absorption coefficient is stored per
/// boundary: alpha_coast on G1, alpha_obstacle on G5.
struct WaveSpec {
  double k = 1.0;
  double amplitude = 1.0;
  double phi = 0.0;  // direction angle (rad)
  Complex alpha_coast = 0.0;
  Complex alpha_obstacle = 0.0;
  double weight = 1.0;

  [[nodiscard]] Vec2 direction() const;
  /// Throws std::invalid_argument when k <= 0, A < 0 or w < 0.
  void validate() const;
};

/// A exp(i k x.d).
Complex incident_field(const WaveSpec& spec, const Vec2& x);
/// i k d A exp(i k x.d).
Eigen::Vector2cd incident_gradient(const WaveSpec& spec, const Vec2& x);

/// Absorption coefficient from reflection coefficient K, reflection phase beta
/// and incidence angle gamma.
Complex berkhoff_alpha(double K, double beta, double gamma);

/// Normal-incidence special case (beta = gamma = 0): alpha = i (1 - K)/(1 + K).
Complex isaacson_alpha(double K);

/// Robin coefficient c in dn u + c u = 0 realizing absorption coefficient
/// alpha at wavenumber k. c = k conj(alpha): with the outgoing convention of
/// the open-sea condition this gives reflection coefficient K at normal
/// incidence for alpha = isaacson_alpha(K).
Complex robin_coefficient(double k, Complex alpha);

}  // namespace coastopt
