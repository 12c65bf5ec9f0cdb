#include "coastopt/wave.hpp"

#include <cmath>
#include <stdexcept>

namespace coastopt {

Vec2 WaveSpec::direction() const { return {std::cos(phi), std::sin(phi)}; }

void WaveSpec::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("wavenumber must be positive");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("amplitude must be non-negative");
  if (!(weight >= 0.0)) throw std::invalid_argument("wave weight must be non-negative");
  if (!std::isfinite(phi)) throw std::invalid_argument("wave direction must be finite");
}

Complex incident_field(const WaveSpec& spec, const Vec2& x) {
  return spec.amplitude * std::exp(Complex(0.0, spec.k * x.dot(spec.direction())));
}

Eigen::Vector2cd incident_gradient(const WaveSpec& spec, const Vec2& x) {
  const Complex factor = Complex(0.0, spec.k) * incident_field(spec, x);
  const Vec2 d = spec.direction();
  return {factor * d.x(), factor * d.y()};
}

Complex berkhoff_alpha(double K, double beta, double gamma) {
  const double denom = 1.0 + K * K + 2.0 * K * std::cos(beta);
  if (std::abs(denom) < 1e-14) {
    throw std::invalid_argument("Berkhoff coefficient undefined (1 + K^2 + 2K cos(beta) = 0)");
  }
  const double a0 = 2.0 * K * std::sin(beta) * std::cos(gamma) / denom;
  const double a1 = (1.0 - K * K) * std::cos(gamma) / denom;
  return {a0, a1};
}

Complex isaacson_alpha(double K) {
  if (K <= -1.0) throw std::invalid_argument("reflection coefficient must exceed -1");
  return {0.0, (1.0 - K) / (1.0 + K)};
}

Complex robin_coefficient(double k, Complex alpha) { return k * std::conj(alpha); }

}  // namespace coastopt
