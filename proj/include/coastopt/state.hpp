#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "coastopt/fem.hpp"
#include "coastopt/mesh.hpp"
#include "coastopt/wave.hpp"

namespace coastopt {

enum class Regime { scatterer, transmissive };

std::string to_string(Regime regime);

/// Contrast coefficients of the transmissive model (phi on Omega and on D).
struct Transmission {
  double phi1 = 1.0;
  double phi2 = 1.0;
};

struct StateOptions {
  Regime regime = Regime::scatterer;
  Transmission transmission;
  int order = 1;
  /// Matching tolerance for the G2/G3 pairing; <= 0 means 1e-6 times the
  /// mesh bounding-box diagonal.
  double periodic_tolerance = 0.0;
};

/// Robin datum dn u + c u = g on one tag (a condition on the water side;
/// assembled with the water coefficient phi.omega).
struct RobinDatum {
  BoundaryTag tag;
  Complex c;
  BoundaryFunction g;  // empty means g = 0
};

/// -div(phi grad u) - k^2 phi u = 0 with Robin data per tag and optional
/// G2/G3 periodicity. solve_state builds one of these; manufactured-solution
/// studies build their own.
struct HelmholtzProblem {
  double k = 1.0;
  RegionCoefficient phi;
  std::vector<RobinDatum> robin;
  bool periodic = false;
  double periodic_tolerance = 0.0;
};

/// Assembled, constrained and factorized Helmholtz operator on one space.
class HelmholtzOperator {
 public:
  HelmholtzOperator(std::shared_ptr<const FeSpace> space, const HelmholtzProblem& problem);

  [[nodiscard]] const FeSpace& space() const { return *space_; }
  [[nodiscard]] const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  [[nodiscard]] const SesquilinearSystem& system() const { return system_; }
  [[nodiscard]] const ConstraintMap& constraints() const { return constraints_; }
  [[nodiscard]] const LinearSolver& solver() const { return solver_; }
  [[nodiscard]] const HelmholtzProblem& problem() const { return problem_; }

  /// Solution of the assembled system with its own load.
  [[nodiscard]] Eigen::VectorXcd solve() const { return solver_.solve(system_.rhs()); }

 private:
  static ConstraintMap make_constraints(const FeSpace& space, const HelmholtzProblem& problem);

  std::shared_ptr<const FeSpace> space_;
  HelmholtzProblem problem_;
  SesquilinearSystem system_;
  ConstraintMap constraints_;
  LinearSolver solver_;
};

struct StateSolution {
  ComplexNodalField u;
  WaveSpec wave;
  Regime regime = Regime::scatterer;
  Transmission transmission;
  std::shared_ptr<const HelmholtzOperator> op;

  [[nodiscard]] const FeSpace& space() const { return op->space(); }
  [[nodiscard]] const TriMesh& mesh() const { return op->space().mesh(); }
  /// phi of the cell's region (1 everywhere in the scatterer regime).
  [[nodiscard]] double phi(Region r) const {
    return regime == Regime::transmissive ? (r == Region::omega ? transmission.phi1 : transmission.phi2)
                                          : 1.0;
  }
};

/// Helmholtz problem for one incident wave: Robin k conj(alpha) on G1 (and
/// G5 for the scatterer), first-order radiation condition with incident
/// data on G4, G2/G3 periodicity. In the scatterer regime the mesh must not
/// contain D cells (see prepare_mesh).
HelmholtzProblem state_problem(const TriMesh& mesh, const WaveSpec& wave, const StateOptions& opts);

StateSolution solve_state(std::shared_ptr<const FeSpace> space, const WaveSpec& wave,
                          const StateOptions& opts);
StateSolution solve_state(const TriMesh& mesh, const WaveSpec& wave, const StateOptions& opts);

/// Computational mesh for a regime: the scatterer regime drops D cells, the
/// transmissive regime keeps the whole mesh and requires D.
TriMesh prepare_mesh(const TriMesh& mesh, Regime regime);

/// L2(G5) norm of the jump of the phi-weighted normal flux recovered from
/// the two cells adjacent to each interface edge.
double flux_jump_check(const StateSolution& sol);

/// Default pairing tolerance for a mesh.
double default_periodic_tolerance(const TriMesh& mesh);

}  // namespace coastopt
