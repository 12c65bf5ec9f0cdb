#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "coastopt/objective.hpp"
#include "support.hpp"

using namespace coastopt;
using coastopt::testing::fixture;

namespace {

WaveSpec downward(double k) {
  WaveSpec w;
  w.k = k;
  w.phi = 1.5 * std::numbers::pi;
  return w;
}

// A solved state whose field is then replaced by f evaluated at the DOFs.
StateSolution with_field(StateSolution s, const std::function<Complex(const Vec2&)>& f) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.space().num_dofs()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(s.space().dof_point(static_cast<int>(i)));
  s.u = ComplexNodalField(s.space(), v);
  return s;
}

}  // namespace

TEST_CASE("tracking term closed forms on a rectangle coast of length 2") {
  const TriMesh m = make_rectangle(8, 4, 0.0, 2.0, -1.0, 0.0);
  const auto base = solve_state(m, downward(2.0), {});
  ObjectiveSpec spec;
  spec.target = 0.3;
  spec.xi = 0.7;
  SUBCASE("perfect tracking") {
    CHECK(eval_j1(with_field(base, [](const Vec2&) { return Complex(0.3); }), spec) == doctest::Approx(0.0));
  }
  SUBCASE("constant offset, xi = 0") {
    spec.xi = 0.0;
    const auto s = with_field(base, [](const Vec2&) { return Complex(0.3 + 0.5, -0.2); });
    CHECK(eval_j1(s, spec) == doctest::Approx((0.25 + 0.04) * 2.0));
  }
  SUBCASE("variance of a linear coast profile") {
    // u = x on y = -1: mean 1, int (x-1)^2 = 2/3; int (x - 0.3)^2 over [0,2].
    const auto s = with_field(base, [](const Vec2& x) { return Complex(x.x()); });
    const double track = (std::pow(1.7, 3) + std::pow(0.3, 3)) / 3.0;
    CHECK(eval_j1(s, spec) == doctest::Approx(track + 0.7 * 2.0 / 3.0));
    CHECK(std::abs(mean_elevation(s) - 1.0) < 1e-12);
  }
}

TEST_CASE("property: the variance weight strictly increases J1 for non-constant fields") {
  const auto base = solve_state(load_msh(fixture("basin_circle.msh")), downward(12.0), {});
  ObjectiveSpec a, b;
  b.xi = 0.4;
  CHECK(eval_j1(base, b) > eval_j1(base, a));
}

TEST_CASE("weighted multi-wave sum and regularizers") {
  const TriMesh m = load_msh(fixture("basin_circle.msh"));
  std::vector<StateSolution> sols;
  for (double w : {0.5, 0.4, 0.1}) {
    WaveSpec wave = downward(11.0);
    wave.weight = w;
    wave.phi = (1.25 + w) * std::numbers::pi;
    sols.push_back(solve_state(m, wave, {}));
  }
  ObjectiveSpec spec;
  double expect = 0.0;
  for (const auto& s : sols) expect += s.wave.weight * eval_j1(s, spec);
  CHECK(eval_j2(sols, spec) == doctest::Approx(expect));
  spec.nu1 = 0.2;
  spec.nu2 = 0.1;
  const auto v = evaluate_objective(m, sols, spec);
  CHECK(v.volume == doctest::Approx(0.2 * domain_area(m, Region::omega)));
  // 128-gon inscribed in r = 0.5.
  CHECK(v.perimeter == doctest::Approx(0.1 * 128 * 2 * 0.5 * std::sin(std::numbers::pi / 128)));
  CHECK(v.total() == doctest::Approx(expect + v.volume + v.perimeter));
  spec.nu2 = -1.0;
  CHECK_THROWS_AS(evaluate_objective(m, sols, spec), std::invalid_argument);
  CHECK(eval_j4(make_rectangle(2, 2, 0, 1, 0, 1), 0.0) == 0.0);
  CHECK_THROWS_AS(eval_j4(make_rectangle(2, 2, 0, 1, 0, 1), 1.0), MeshError);
}

TEST_CASE("spatial target overrides the constant") {
  const TriMesh m = make_rectangle(8, 4, 0.0, 2.0, -1.0, 0.0);
  const auto base = with_field(solve_state(m, downward(2.0), {}), [](const Vec2& x) { return Complex(x.x()); });
  ObjectiveSpec spec;
  spec.target = 100.0;
  spec.target_field = [](const Vec2& x) { return x.x(); };
  CHECK(eval_j1(base, spec) == doctest::Approx(0.0));
}
