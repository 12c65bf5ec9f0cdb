#include "coastopt/state.hpp"

#include <cmath>

namespace coastopt {

std::string to_string(Regime regime) {
  return regime == Regime::scatterer ? "scatterer" : "transmissive";
}

double default_periodic_tolerance(const TriMesh& mesh) {
  if (mesh.num_vertices() == 0) return 0.0;
  Vec2 lo = mesh.vertex(0);
  Vec2 hi = lo;
  for (const auto& p : mesh.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return 1e-6 * (hi - lo).norm();
}

namespace {

SesquilinearSystem build_system(const FeSpace& space, const HelmholtzProblem& p) {
  SesquilinearSystem sys(space.num_dofs());
  assemble_stiffness(sys, space, p.phi, 1.0);
  assemble_mass(sys, space, p.phi, -p.k * p.k);
  // Robin data are conditions on dn u from the water side; the natural
  // boundary term carries the water coefficient.
  const double phi = p.phi.omega;
  for (const auto& r : p.robin) {
    assemble_robin_boundary(sys, space, r.tag, phi * r.c);
    if (r.g) {
      assemble_boundary_load(sys, space, r.tag,
                             [&](const Vec2& x, const Vec2& n) { return phi * r.g(x, n); });
    }
  }
  return sys;
}

}  // namespace

ConstraintMap HelmholtzOperator::make_constraints(const FeSpace& space,
                                                  const HelmholtzProblem& problem) {
  ConstraintMap cm(space.num_dofs());
  if (problem.periodic) {
    const double tol = problem.periodic_tolerance > 0.0 ? problem.periodic_tolerance
                                                        : default_periodic_tolerance(space.mesh());
    cm.add_periodic(space, build_periodic_pairing(space.mesh(), tol));
  }
  return cm;
}

HelmholtzOperator::HelmholtzOperator(std::shared_ptr<const FeSpace> space,
                                     const HelmholtzProblem& problem)
    : space_(std::move(space)),
      problem_(problem),
      system_(build_system(*space_, problem_)),
      constraints_(make_constraints(*space_, problem_)),
      solver_(system_, constraints_) {}

HelmholtzProblem state_problem(const TriMesh& mesh, const WaveSpec& wave, const StateOptions& opts) {
  wave.validate();
  for (auto tag : {BoundaryTag::g1, BoundaryTag::g4}) {
    if (!mesh.has_tag(tag)) throw MeshError("state problem needs boundary " + to_string(tag));
  }
  HelmholtzProblem p;
  p.k = wave.k;
  if (opts.regime == Regime::scatterer) {
    if (mesh.has_region(Region::obstacle)) {
      throw MeshError("scatterer regime expects a mesh without D cells");
    }
  } else {
    if (!mesh.has_region(Region::obstacle)) {
      throw MeshError("transmissive regime needs D cells");
    }
    if (!(opts.transmission.phi1 > 0.0) || !(opts.transmission.phi2 > 0.0)) {
      throw std::invalid_argument("transmission coefficients must be positive");
    }
    p.phi = {opts.transmission.phi1, opts.transmission.phi2};
  }
  p.robin.push_back({BoundaryTag::g1, robin_coefficient(wave.k, wave.alpha_coast), {}});
  if (opts.regime == Regime::scatterer && mesh.has_tag(BoundaryTag::g5)) {
    p.robin.push_back({BoundaryTag::g5, robin_coefficient(wave.k, wave.alpha_obstacle), {}});
  }
  const Complex ik(0.0, wave.k);
  p.robin.push_back({BoundaryTag::g4, -ik, [wave, ik](const Vec2& x, const Vec2& n) {
                       const Eigen::Vector2cd g = incident_gradient(wave, x);
                       return g.x() * n.x() + g.y() * n.y() - ik * incident_field(wave, x);
                     }});
  p.periodic = mesh.has_tag(BoundaryTag::g2) || mesh.has_tag(BoundaryTag::g3);
  p.periodic_tolerance = opts.periodic_tolerance;
  return p;
}

StateSolution solve_state(std::shared_ptr<const FeSpace> space, const WaveSpec& wave,
                          const StateOptions& opts) {
  if (space->order() != opts.order) throw std::invalid_argument("FE order mismatch");
  auto op = std::make_shared<const HelmholtzOperator>(space, state_problem(space->mesh(), wave, opts));
  StateSolution sol;
  sol.u = ComplexNodalField(*space, op->solve());
  sol.wave = wave;
  sol.regime = opts.regime;
  sol.transmission = opts.transmission;
  sol.op = std::move(op);
  return sol;
}

StateSolution solve_state(const TriMesh& mesh, const WaveSpec& wave, const StateOptions& opts) {
  return solve_state(std::make_shared<const FeSpace>(mesh, opts.order), wave, opts);
}

TriMesh prepare_mesh(const TriMesh& mesh, Regime regime) {
  if (regime == Regime::transmissive) {
    if (!mesh.has_region(Region::obstacle)) throw MeshError("transmissive regime needs D cells");
    return mesh;
  }
  return mesh.has_region(Region::obstacle) ? mesh.restricted_to(Region::omega) : mesh;
}

namespace {

// Barycentric coordinates of point x in cell c.
std::array<double, 3> barycentric(const TriMesh& mesh, int c, const Vec2& x) {
  const auto& v = mesh.cell(c).v;
  const auto g = element::barycentric_gradients(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]));
  const double l1 = g[1].dot(x - mesh.vertex(v[0]));
  const double l2 = g[2].dot(x - mesh.vertex(v[0]));
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace

double flux_jump_check(const StateSolution& sol) {
  if (sol.regime != Regime::transmissive) {
    throw std::invalid_argument("flux_jump_check needs a transmissive solution");
  }
  const auto& space = sol.space();
  const auto& mesh = space.mesh();
  const Eigen::VectorXcd u = sol.u.values();
  const auto& rule = element::gauss_line(3);
  double s = 0.0;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != BoundaryTag::g5 || e.other_cell < 0) continue;
    const Vec2& a = mesh.vertex(e.v[0]);
    const Vec2& b = mesh.vertex(e.v[1]);
    const double len = (b - a).norm();
    const Vec2 n = mesh.edge_normal(e);
    const double phi_in = sol.phi(mesh.cell(e.cell).region);
    const double phi_out = sol.phi(mesh.cell(e.other_cell).region);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = a + rule.points[q] * (b - a);
      const Eigen::Vector2cd g1 = evaluate_gradient(space, u, e.cell, barycentric(mesh, e.cell, x));
      const Eigen::Vector2cd g2 =
          evaluate_gradient(space, u, e.other_cell, barycentric(mesh, e.other_cell, x));
      const Complex jump = phi_in * (g1.x() * n.x() + g1.y() * n.y()) -
                           phi_out * (g2.x() * n.x() + g2.y() * n.y());
      s += rule.weights[q] * len * std::norm(jump);
    }
  }
  return std::sqrt(s);
}

}  // namespace coastopt
