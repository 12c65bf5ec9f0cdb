#include <cmath>
#include <numbers>

#include "doctest.h"
#include "coastopt/wave.hpp"

using namespace coastopt;

TEST_CASE("incident plane wave and its gradient") {
  WaveSpec w;
  w.k = 12.0;
  w.amplitude = 0.7;
  w.phi = 1.5 * std::numbers::pi;
  CHECK(std::abs(incident_field(w, Vec2::Zero()) - 0.7) < 1e-15);
  const Vec2 x(0.3, -1.1);
  // Direction (0, -1): A exp(-i k y).
  CHECK(std::abs(incident_field(w, x) - 0.7 * std::exp(Complex(0.0, 12.0 * 1.1))) < 1e-13);
  const Eigen::Vector2cd g = incident_gradient(w, x);
  CHECK(std::abs(g.x()) < 1e-12);
  CHECK(std::abs(g.y() - Complex(0.0, -12.0) * incident_field(w, x)) < 1e-12);
  CHECK(std::abs(incident_field(w, x)) == doctest::Approx(0.7));
}

TEST_CASE("wave validation") {
  WaveSpec w;
  CHECK_NOTHROW(w.validate());
  w.k = 0.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = {};
  w.amplitude = -1.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = {};
  w.weight = -0.1;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = {};
  w.phi = std::nan("");
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w = {};
  w.amplitude = 0.0;
  CHECK_NOTHROW(w.validate());
}

TEST_CASE("absorption coefficients") {
  // Full reflection absorbs nothing.
  CHECK(std::abs(isaacson_alpha(1.0)) == 0.0);
  // K = 2/3 gives alpha_1 = 0.2.
  CHECK(isaacson_alpha(2.0 / 3.0).imag() == doctest::Approx(0.2));
  CHECK(isaacson_alpha(2.0 / 3.0).real() == 0.0);
  CHECK(isaacson_alpha(0.0).imag() == doctest::Approx(1.0));
  for (double K : {0.0, 0.3, 2.0 / 3.0, 1.0}) {
    CHECK(std::abs(berkhoff_alpha(K, 0.0, 0.0) - isaacson_alpha(K)) < 1e-15);
  }
  // General formula against a hand evaluation: K = 0.5, beta = pi/2, gamma = pi/3.
  const Complex a = berkhoff_alpha(0.5, std::numbers::pi / 2, std::numbers::pi / 3);
  CHECK(a.real() == doctest::Approx(2 * 0.5 * 1.0 * 0.5 / 1.25));
  CHECK(a.imag() == doctest::Approx(0.75 * 0.5 / 1.25));
  CHECK_THROWS_AS(berkhoff_alpha(1.0, std::numbers::pi, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(isaacson_alpha(-1.0), std::invalid_argument);
}

TEST_CASE("Robin coefficient reflects with modulus K at normal incidence") {
  // 1D: u = exp(-i k y) + R exp(i k y) on y > 0 with -u' + c u = 0 at y = 0
  // gives R = (i k + c) / (i k - c).
  const double k = 7.0;
  for (double K : {0.0, 0.25, 2.0 / 3.0, 1.0}) {
    const Complex c = robin_coefficient(k, isaacson_alpha(K));
    const Complex R = (Complex(0.0, k) + c) / (Complex(0.0, k) - c);
    CHECK(std::abs(R - K) < 1e-14);
  }
}
