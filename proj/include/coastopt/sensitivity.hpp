#pragma once

#include <span>
#include <vector>

#include "coastopt/adjoint.hpp"
#include "coastopt/objective.hpp"
#include "coastopt/state.hpp"

namespace coastopt {

/// Which vector-valued P1 basis fields enter the shape derivative.
/// near_obstacle: vertices within two cell layers of G5; all_free: every
/// vertex. Vertices on G1..G4 are always excluded.
enum class SupportMode { near_obstacle, all_free };

std::vector<char> shape_support(const TriMesh& mesh, SupportMode mode);

/// Shape derivative as a linear functional on nodal vector fields:
/// DJ[V] = sum_i rhs[2i] V_i.x + rhs[2i+1] V_i.y, split by source.
struct ShapeGradientAssembly {
  Eigen::VectorXd tracking;   // J1/J2 volume form
  Eigen::VectorXd volume;     // J3
  Eigen::VectorXd perimeter;  // J4
  std::vector<char> support;

  [[nodiscard]] Eigen::VectorXd total() const { return tracking + volume + perimeter; }
};

/// rhs . V for a nodal vector field.
double apply_functional(const Eigen::VectorXd& rhs, const NodalVectorField& v);
Eigen::VectorXd flatten(const NodalVectorField& v);
NodalVectorField unflatten(const Eigen::VectorXd& x);

/// Volume form of the tracking derivative summed over state/adjoint pairs:
/// Re sum_cells phi [(grad u . grad conj v - k^2 u conj v) div V
///                   - grad conj v . (grad V + grad V^T) grad u],
/// plus the G5 Robin term Re[c int u conj v div_G V] when c != 0.
Eigen::VectorXd volume_shape_derivative(std::span<const StateSolution> states,
                                        std::span<const AdjointSolution> adjoints,
                                        const std::vector<char>& support);

/// nu1 int_Omega div V.
Eigen::VectorXd dj3(const TriMesh& mesh, double nu1, const std::vector<char>& support);
/// nu2 int_G5 div_G V, edge by edge (exact derivative of the polygon length).
Eigen::VectorXd dj4(const TriMesh& mesh, double nu2, const std::vector<char>& support);

ShapeGradientAssembly assemble_shape_gradient(std::span<const StateSolution> states,
                                              std::span<const AdjointSolution> adjoints,
                                              const ObjectiveSpec& spec,
                                              const std::vector<char>& support);

/// Boundary (Hadamard) form on G5: density Re[grad u . grad conj v - k^2 u conj v]
/// per G5 edge, evaluated at the edge midpoint from the adjacent Omega cell.
/// Only valid for sound-hard obstacles.
struct BoundaryDensity {
  std::vector<int> edges;  // boundary-edge indices
  std::vector<double> density;
};
BoundaryDensity boundary_shape_density(std::span<const StateSolution> states,
                                       std::span<const AdjointSolution> adjoints);
/// sum over G5 edges of density * int_e <V, n> ds.
double boundary_form_value(const TriMesh& mesh, const BoundaryDensity& density,
                           const NodalVectorField& v);

/// Topological derivative -Re[grad u . grad conj v - k^2 u conj v] per cell
/// barycenter, summed over pairs and averaged to vertices with area weights.
/// The sign is that of the Lagrange multiplier -v, so negative values mark
/// places where a small sound-hard hole lowers the objective.
std::vector<double> topological_derivative(std::span<const StateSolution> states,
                                           std::span<const AdjointSolution> adjoints);

}  // namespace coastopt
