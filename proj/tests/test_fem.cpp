#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "coastopt/fem.hpp"
#include "coastopt/state.hpp"
#include "support.hpp"

using namespace coastopt;

namespace {

// Single reference triangle (0,0), (1,0), (0,1) with all edges on G1.
TriMesh reference_triangle() {
  return TriMesh({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}},
                 {{{0, 1}, BoundaryTag::g1}, {{1, 2}, BoundaryTag::g1}, {{2, 0}, BoundaryTag::g1}});
}

Eigen::MatrixXcd dense(const SesquilinearSystem& sys) { return Eigen::MatrixXcd(sys.matrix()); }

// Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!.
double monomial_integral(int a, int b) {
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

}  // namespace

TEST_CASE("P1 element matrices on the reference triangle") {
  FeSpace space(reference_triangle(), 1);
  SesquilinearSystem k(space.num_dofs());
  assemble_stiffness(k, space, {});
  Eigen::Matrix3d k_ref;
  k_ref << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  CHECK((dense(k).real() - k_ref).norm() < 1e-14);
  CHECK(dense(k).imag().norm() == 0.0);

  SesquilinearSystem m(space.num_dofs());
  assemble_mass(m, space, {}, Complex(0.0, 2.0));
  Eigen::Matrix3d m_ref;
  m_ref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  m_ref /= 24.0;
  CHECK((dense(m).imag() - 2.0 * m_ref).norm() < 1e-14);
}

TEST_CASE("P2 matrices reproduce exact integrals of quadratics") {
  FeSpace space(reference_triangle(), 2);
  REQUIRE(space.num_dofs() == 6);
  SesquilinearSystem k(6), m(6);
  assemble_stiffness(k, space, {});
  assemble_mass(m, space, {});
  const Eigen::MatrixXd K = dense(k).real();
  const Eigen::MatrixXd M = dense(m).real();
  // Nodal interpolants (exact for quadratics).
  auto interp = [&](auto f) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v[i] = f(space.dof_point(i));
    return v;
  };
  const Eigen::VectorXd x2 = interp([](const Vec2& p) { return p.x() * p.x(); });
  const Eigen::VectorXd xy = interp([](const Vec2& p) { return p.x() * p.y(); });
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(6);
  CHECK(one.dot(M * one) == doctest::Approx(0.5));
  CHECK(x2.dot(M * x2) == doctest::Approx(monomial_integral(4, 0)));
  CHECK(x2.dot(M * xy) == doctest::Approx(monomial_integral(3, 1)));
  // grad(x^2) . grad(xy) = 2x * y.
  CHECK(x2.dot(K * xy) == doctest::Approx(2.0 * monomial_integral(1, 1)));
  // grad(xy) . grad(xy) = x^2 + y^2.
  CHECK(xy.dot(K * xy) == doctest::Approx(2.0 * monomial_integral(2, 0)));
  CHECK((K * one).norm() < 1e-13);
}

TEST_CASE("triangle rules integrate polynomials of their degree exactly") {
  for (int order : {1, 2}) {
    const auto& rule = element::triangle_rule(order);
    const int degree = order == 1 ? 2 : 4;
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          const double x = rule.points[q][1];
          const double y = rule.points[q][2];
          sum += 0.5 * rule.weights[q] * std::pow(x, a) * std::pow(y, b);
        }
        CHECK(sum == doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("Gauss line rules") {
  for (int n : {1, 2, 3}) {
    const auto& r = element::gauss_line(n);
    for (int p = 0; p < 2 * n; ++p) {
      double sum = 0.0;
      for (std::size_t q = 0; q < r.points.size(); ++q) sum += r.weights[q] * std::pow(r.points[q], p);
      CHECK(sum == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    }
  }
  CHECK_THROWS(element::gauss_line(7));
}

TEST_CASE("shape functions form a partition of unity with vanishing gradient sum") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto g = element::barycentric_gradients({0.1, 0.2}, {1.3, -0.1}, {0.4, 0.9});
  for (int t = 0; t < 50; ++t) {
    double l1 = u(rng), l2 = u(rng);
    if (l1 + l2 > 1.0) {
      l1 = 1.0 - l1;
      l2 = 1.0 - l2;
    }
    const std::array<double, 3> lam{1.0 - l1 - l2, l1, l2};
    for (int order : {1, 2}) {
      const auto s = element::shape_values(order, lam);
      const auto d = element::shape_gradients(order, lam, g);
      double sum = 0.0;
      Vec2 dsum = Vec2::Zero();
      for (int i = 0; i < (order == 1 ? 3 : 6); ++i) {
        sum += s[static_cast<std::size_t>(i)];
        dsum += d[static_cast<std::size_t>(i)];
      }
      CHECK(sum == doctest::Approx(1.0));
      CHECK(dsum.norm() < 1e-12);
    }
  }
}

TEST_CASE("evaluation reproduces linear functions and their gradients") {
  const TriMesh m = make_rectangle(3, 2, 0.0, 1.5, -1.0, 0.0);
  for (int order : {1, 2}) {
    FeSpace space(m, order);
    Eigen::VectorXcd f(static_cast<Eigen::Index>(space.num_dofs()));
    for (std::size_t i = 0; i < space.num_dofs(); ++i) {
      const Vec2 p = space.dof_point(static_cast<int>(i));
      f[static_cast<Eigen::Index>(i)] = Complex(2.0 * p.x() - p.y(), 0.5 * p.y());
    }
    const std::array<double, 3> lam{0.2, 0.3, 0.5};
    for (int c = 0; c < static_cast<int>(m.num_cells()); ++c) {
      const auto& v = m.cell(c).v;
      const Vec2 x = 0.2 * m.vertex(v[0]) + 0.3 * m.vertex(v[1]) + 0.5 * m.vertex(v[2]);
      CHECK(std::abs(evaluate(space, f, c, lam) - Complex(2.0 * x.x() - x.y(), 0.5 * x.y())) < 1e-13);
      const Eigen::Vector2cd g = evaluate_gradient(space, f, c, lam);
      CHECK(std::abs(g.x() - 2.0) < 1e-12);
      CHECK(std::abs(g.y() - Complex(-1.0, 0.5)) < 1e-12);
    }
    CHECK(l2_error(space, f, [](const Vec2& p) { return Complex(2.0 * p.x() - p.y(), 0.5 * p.y()); }) < 1e-13);
  }
}

TEST_CASE("boundary integrals against closed forms") {
  const TriMesh m = make_rectangle(4, 4, 0.0, 1.0, 0.0, 1.0);
  for (int order : {1, 2}) {
    FeSpace space(m, order);
    Eigen::VectorXcd f(static_cast<Eigen::Index>(space.num_dofs()));
    for (std::size_t i = 0; i < space.num_dofs(); ++i) {
      f[static_cast<Eigen::Index>(i)] = Complex(space.dof_point(static_cast<int>(i)).x(), 1.0);
    }
    // On G1 (y = 0): |x + i|^2 = x^2 + 1 integrates to 4/3.
    CHECK(boundary_l2_squared(space, f, BoundaryTag::g1) == doctest::Approx(4.0 / 3.0));
    const Complex mean = boundary_integral(space, f, BoundaryTag::g1);
    CHECK(mean.real() == doctest::Approx(0.5));
    CHECK(mean.imag() == doctest::Approx(1.0));
    const auto bm = boundary_mass(space, BoundaryTag::g2);
    CHECK(dense(bm).real().sum() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(boundary_mass(FeSpace(m, 1), BoundaryTag::g5), MeshError);
}

TEST_CASE("P2 DOF layout") {
  const TriMesh m = make_rectangle(2, 2, 0, 1, 0, 1);
  FeSpace space(m, 2);
  CHECK(space.num_dofs() == m.num_vertices() + m.num_edges());
  for (int c = 0; c < static_cast<int>(m.num_cells()); ++c) {
    const auto d = space.cell_dofs(c);
    const auto& v = m.cell(c).v;
    for (int l = 0; l < 3; ++l) {
      const Vec2 mid = 0.5 * (m.vertex(v[static_cast<std::size_t>(l)]) + m.vertex(v[static_cast<std::size_t>((l + 1) % 3)]));
      CHECK((space.dof_point(d[static_cast<std::size_t>(3 + l)]) - mid).norm() < 1e-15);
    }
  }
  const auto g1 = space.boundary_dofs(BoundaryTag::g1);
  CHECK(g1.size() == 5);
  CHECK_THROWS(FeSpace(m, 3));
}

TEST_CASE("constraint map: periodic identification and Dirichlet elimination") {
  const TriMesh m = make_rectangle(3, 2, 0, 1, 0, 1);
  FeSpace space(m, 2);
  ConstraintMap cm(space.num_dofs());
  cm.add_periodic(space, build_periodic_pairing(m, 1e-9));
  const auto idx = cm.reduced_index();
  // Every G3 DOF shares its unknown with the G2 DOF at the translated point.
  for (int d3 : space.boundary_dofs(BoundaryTag::g3)) {
    bool found = false;
    for (int d2 : space.boundary_dofs(BoundaryTag::g2)) {
      if ((space.dof_point(d3) - space.dof_point(d2) - Vec2(1, 0)).norm() < 1e-12) {
        CHECK(idx[static_cast<std::size_t>(d3)] == idx[static_cast<std::size_t>(d2)]);
        found = true;
      }
    }
    CHECK(found);
  }
  CHECK(cm.num_reduced() == space.num_dofs() - space.boundary_dofs(BoundaryTag::g3).size());
  cm.add_dirichlet_zero(space.boundary_dofs(BoundaryTag::g2));
  const auto idx2 = cm.reduced_index();
  for (int d : space.boundary_dofs(BoundaryTag::g3)) CHECK(idx2[static_cast<std::size_t>(d)] == -1);
}

TEST_CASE("constrained solve matches a dense complex oracle, plain and conjugate") {
  const TriMesh m = make_rectangle(4, 3, 0, 1, 0, 1);
  FeSpace space(m, 1);
  const double k = 3.0;
  SesquilinearSystem sys(space.num_dofs());
  assemble_stiffness(sys, space, {});
  assemble_mass(sys, space, {}, -k * k);
  assemble_robin_boundary(sys, space, BoundaryTag::g4, Complex(0.0, -k));
  assemble_robin_boundary(sys, space, BoundaryTag::g1, Complex(0.5, 0.2));
  std::mt19937 rng(5);
  std::normal_distribution<double> n01;
  Eigen::VectorXcd b(static_cast<Eigen::Index>(space.num_dofs()));
  for (auto& x : b) x = Complex(n01(rng), n01(rng));
  for (std::size_t i = 0; i < space.num_dofs(); ++i) sys.add_rhs(static_cast<int>(i), b[static_cast<Eigen::Index>(i)]);

  ConstraintMap cm(space.num_dofs());
  cm.add_periodic(space, build_periodic_pairing(m, 1e-9));
  LinearSolver solver(sys, cm);

  // Oracle: P^T A P y = P^T b with the explicit 0/1 prolongation P.
  const auto idx = cm.reduced_index();
  const int nr = static_cast<int>(cm.num_reduced());
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(space.num_dofs()), nr);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= 0) P(static_cast<Eigen::Index>(i), idx[i]) = 1.0;
  }
  const Eigen::MatrixXcd A = dense(sys);
  const Eigen::MatrixXcd Ar = P.transpose() * A * P;
  const Eigen::VectorXcd expect = P * Ar.partialPivLu().solve(P.transpose() * b);
  CHECK((solver.solve(b) - expect).norm() < 1e-10 * expect.norm());
  const Eigen::VectorXcd expect_c = P * Ar.conjugate().partialPivLu().solve(P.transpose() * b);
  CHECK((solver.solve_conjugate(b) - expect_c).norm() < 1e-10 * expect_c.norm());
  CHECK(solver.solve(Eigen::VectorXcd::Zero(b.size())).norm() == 0.0);
}

TEST_CASE("singular system is reported") {
  const TriMesh m = make_rectangle(2, 2, 0, 1, 0, 1);
  FeSpace space(m, 1);
  SesquilinearSystem sys(space.num_dofs());
  assemble_stiffness(sys, space, {});  // pure Neumann Laplacian: constants in the kernel
  // A load with nonzero mean has no solution; either the factorization or
  // the residual check must refuse it.
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.num_dofs()));
  b[0] = 1.0;
  CHECK_THROWS_AS(LinearSolver(sys, ConstraintMap(space.num_dofs())).solve(b), SolveError);
}

TEST_CASE("matched Robin data: P2 plane-wave error drops at third order") {
  // u = exp(i k d.x) solves -lap u - k^2 u = 0; Robin dn u - i k u = g on all sides.
  const double k = 5.0;
  const Vec2 d(std::cos(0.4), std::sin(0.4));
  auto exact = [&](const Vec2& x) { return std::exp(Complex(0.0, k * d.dot(x))); };
  std::vector<double> errors;
  for (int n : {4, 8, 16}) {
    const TriMesh m = make_rectangle(n, n, 0, 1, 0, 1);
    auto space = std::make_shared<const FeSpace>(m, 2);
    HelmholtzProblem p;
    p.k = k;
    for (BoundaryTag t : kOuterBoundaryTags) {
      p.robin.push_back({t, Complex(0.0, -k), [&](const Vec2& x, const Vec2& nrm) {
                           return Complex(0.0, k) * (d.dot(nrm) - 1.0) * exact(x);
                         }});
    }
    HelmholtzOperator op(space, p);
    errors.push_back(l2_error(*space, op.solve(), exact));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double rate = std::log2(errors[i - 1] / errors[i]);
    CHECK(rate > 2.7);
    CHECK(rate < 3.3);
  }
}
