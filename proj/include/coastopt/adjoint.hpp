#pragma once

#include <span>
#include <vector>

#include "coastopt/objective.hpp"
#include "coastopt/state.hpp"

namespace coastopt {

/// Treatment of the adjoint on G2/G3. `periodic` keeps the state's
/// periodic coupling and is the discrete adjoint of the state problem;
/// `dirichlet` imposes v = 0 there by elimination.
enum class AdjointLateral { periodic, dirichlet };

struct AdjointOptions {
  AdjointLateral lateral = AdjointLateral::periodic;
};

struct AdjointSolution {
  ComplexNodalField v;
  WaveSpec wave;
};

/// Load of the adjoint problem over the state's DOFs:
/// -weight * (2 M (u - target) + 2 xi M (u - mean)), M the G1 edge mass.
Eigen::VectorXcd adjoint_load(const StateSolution& state, const ObjectiveSpec& spec, double weight);

/// Solves conj(A) v = load, A the state operator, so that the derivative of
/// the tracking functional is Re[a'(u, v)].
AdjointSolution solve_adjoint(const StateSolution& state, const ObjectiveSpec& spec,
                              const AdjointOptions& opts = {}, double weight = 1.0);

/// One adjoint per state, each load scaled by the wave weight.
std::vector<AdjointSolution> solve_adjoint_multiwave(std::span<const StateSolution> states,
                                                     const ObjectiveSpec& spec,
                                                     const AdjointOptions& opts = {});

}  // namespace coastopt
