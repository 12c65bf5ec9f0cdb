#include "coastopt/objective.hpp"

#include <stdexcept>

namespace coastopt {

void ObjectiveSpec::validate() const {
  if (!(xi >= 0.0) || !(nu1 >= 0.0) || !(nu2 >= 0.0)) {
    throw std::invalid_argument("objective weights must be non-negative");
  }
}

Eigen::VectorXcd target_vector(const FeSpace& space, const ObjectiveSpec& spec) {
  const auto n = static_cast<Eigen::Index>(space.num_dofs());
  if (!spec.target_field) return Eigen::VectorXcd::Constant(n, Complex(spec.target, 0.0));
  Eigen::VectorXcd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t[i] = spec.target_field(space.dof_point(static_cast<int>(i)));
  return t;
}

Complex mean_elevation(const StateSolution& sol) {
  const double len = boundary_length(sol.mesh(), BoundaryTag::g1);
  if (!(len > 0.0)) throw MeshError("G1 has zero length");
  return boundary_integral(sol.space(), sol.u.values(), BoundaryTag::g1) / len;
}

double eval_j1(const StateSolution& sol, const ObjectiveSpec& spec) {
  const auto& space = sol.space();
  const Eigen::VectorXcd u = sol.u.values();
  double j = boundary_l2_squared(space, u - target_vector(space, spec), BoundaryTag::g1);
  if (spec.xi > 0.0) {
    const Complex mean = mean_elevation(sol);
    const Eigen::VectorXcd centered = u - Eigen::VectorXcd::Constant(u.size(), mean);
    j += spec.xi * boundary_l2_squared(space, centered, BoundaryTag::g1);
  }
  return j;
}

double eval_j2(std::span<const StateSolution> sols, const ObjectiveSpec& spec) {
  double j = 0.0;
  for (const auto& s : sols) {
    if (s.wave.weight != 0.0) j += s.wave.weight * eval_j1(s, spec);
  }
  return j;
}

double eval_j3(const TriMesh& mesh, double nu1) {
  return nu1 == 0.0 ? 0.0 : nu1 * domain_area(mesh, Region::omega);
}

double eval_j4(const TriMesh& mesh, double nu2) {
  return nu2 == 0.0 ? 0.0 : nu2 * boundary_length(mesh, BoundaryTag::g5);
}

ObjectiveValue evaluate_objective(const TriMesh& mesh, std::span<const StateSolution> sols,
                                  const ObjectiveSpec& spec) {
  spec.validate();
  ObjectiveValue v;
  v.tracking = eval_j2(sols, spec);
  v.volume = eval_j3(mesh, spec.nu1);
  v.perimeter = eval_j4(mesh, spec.nu2);
  return v;
}

}  // namespace coastopt
