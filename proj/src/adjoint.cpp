#include "coastopt/adjoint.hpp"

namespace coastopt {

Eigen::VectorXcd adjoint_load(const StateSolution& state, const ObjectiveSpec& spec, double weight) {
  const auto& space = state.space();
  const Eigen::VectorXcd u = state.u.values();
  if (weight == 0.0) return Eigen::VectorXcd::Zero(u.size());
  const Eigen::SparseMatrix<Complex> m = boundary_mass(space, BoundaryTag::g1).matrix();
  Eigen::VectorXcd g = 2.0 * (m * (u - target_vector(space, spec)));
  if (spec.xi > 0.0) {
    const Complex mean = mean_elevation(state);
    g += 2.0 * spec.xi * (m * (u - Eigen::VectorXcd::Constant(u.size(), mean)));
  }
  return -weight * g;
}

AdjointSolution solve_adjoint(const StateSolution& state, const ObjectiveSpec& spec,
                              const AdjointOptions& opts, double weight) {
  if (!state.op || !state.u.matches(state.space())) {
    throw std::invalid_argument("state solution does not belong to its operator's mesh");
  }
  const auto& space = state.space();
  const Eigen::VectorXcd load = adjoint_load(state, spec, weight);
  Eigen::VectorXcd v;
  if (opts.lateral == AdjointLateral::periodic) {
    v = state.op->solver().solve_conjugate(load);
  } else {
    ConstraintMap cm(space.num_dofs());
    for (auto tag : {BoundaryTag::g2, BoundaryTag::g3}) {
      if (space.mesh().has_tag(tag)) cm.add_dirichlet_zero(space.boundary_dofs(tag));
    }
    const LinearSolver solver(state.op->system(), cm);
    v = solver.solve_conjugate(load);
  }
  return {ComplexNodalField(space, v), state.wave};
}

std::vector<AdjointSolution> solve_adjoint_multiwave(std::span<const StateSolution> states,
                                                     const ObjectiveSpec& spec,
                                                     const AdjointOptions& opts) {
  std::vector<AdjointSolution> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(solve_adjoint(s, spec, opts, s.wave.weight));
  return out;
}

}  // namespace coastopt
