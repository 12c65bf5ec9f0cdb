#pragma once

#include <functional>
#include <span>
#include <vector>

#include "coastopt/state.hpp"

namespace coastopt {

struct ObjectiveSpec {
  double target = 0.0;  // target elevation on G1
  double xi = 0.0;      // variance weight
  double nu1 = 0.0;     // volume weight
  double nu2 = 0.0;     // perimeter weight
  /// Optional spatially varying target; overrides `target` when set.
  std::function<double(const Vec2&)> target_field;

  void validate() const;
};

/// Tracking, volume and perimeter parts of the total objective.
struct ObjectiveValue {
  double tracking = 0.0;
  double volume = 0.0;
  double perimeter = 0.0;
  [[nodiscard]] double total() const { return tracking + volume + perimeter; }
};

/// Target interpolated at the DOFs of the solution's space.
Eigen::VectorXcd target_vector(const FeSpace& space, const ObjectiveSpec& spec);

/// (1/l) integral of u over G1.
Complex mean_elevation(const StateSolution& sol);

/// ||u - target||^2 + xi ||u - mean||^2 on G1.
double eval_j1(const StateSolution& sol, const ObjectiveSpec& spec);

/// sum_j w_j J1(u_j) with the weights stored in each solution's wave.
double eval_j2(std::span<const StateSolution> sols, const ObjectiveSpec& spec);

/// nu1 |Omega| and nu2 |G5|.
double eval_j3(const TriMesh& mesh, double nu1);
double eval_j4(const TriMesh& mesh, double nu2);

ObjectiveValue evaluate_objective(const TriMesh& mesh, std::span<const StateSolution> sols,
                                  const ObjectiveSpec& spec);

}  // namespace coastopt
