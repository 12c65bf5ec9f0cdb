#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "coastopt/mesh.hpp"

namespace coastopt {

/// Harmonic P1 field with mu_max on G5 and mu_min on G1..G4, clamped to
/// [mu_min, mu_max].
Eigen::VectorXd solve_lame_mu(const TriMesh& mesh, double mu_min, double mu_max);

/// P1 vector elasticity a(W, V) = int 2 mu eps(W):eps(V) (lambda = 0) with
/// cellwise mean mu and W = 0 on G1..G4.
class ElasticityOperator {
 public:
  ElasticityOperator(const TriMesh& mesh, const Eigen::VectorXd& mu);

  /// Riesz representative of a functional given by its nodal coefficients
  /// (2 per vertex); coefficients on fixed vertices are ignored.
  [[nodiscard]] NodalVectorField solve(const Eigen::VectorXd& rhs) const;
  /// a(W, V_l) for every vector basis field V_l.
  [[nodiscard]] Eigen::VectorXd apply(const NodalVectorField& w) const;
  [[nodiscard]] const std::vector<char>& fixed() const { return fixed_; }

 private:
  Eigen::SparseMatrix<double> full_;
  Eigen::SparseMatrix<double> reduced_;
  std::vector<int> index_;  // flat DOF -> reduced index or -1
  std::vector<char> fixed_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

struct ShapeGradient {
  NodalVectorField w;
  double norm = 0.0;            // sqrt(DJ[W]) = elasticity norm of W
  double riesz_residual = 0.0;  // max_l |a(W, V_l) - rhs_l| / ||rhs||
};

/// Solves the elasticity problem for the gradient representative and
/// re-verifies the Riesz identity (throws SolveError above 1e-9 relative).
ShapeGradient solve_shape_gradient(const TriMesh& mesh, const Eigen::VectorXd& rhs,
                                   const Eigen::VectorXd& mu);

struct LineSearchParams {
  double rho = 0.04;
  double shrink = 0.5;
  int max_trials = 25;

  void validate() const;
};

enum class TrialOutcome { accepted, invalid_shape, not_decreasing, solve_failed };

struct LineSearchResult {
  bool accepted = false;
  std::optional<TriMesh> mesh;
  double step = 0.0;       // accepted scale rho * shrink^t
  double rho = 0.0;        // step size for the next iteration
  double objective = 0.0;  // objective of the accepted mesh
  std::vector<TrialOutcome> trials;

  [[nodiscard]] bool saw_invalid_shape() const;
};

/// Objective of a trial mesh; may throw SolveError/MeshError, which rejects
/// the trial.
using ObjectiveEvaluator = std::function<double(const TriMesh&)>;

/// Backtracking along -W: trial t uses mesh - rho shrink^t W and is accepted
/// when it passes check_shape_validity(area_floor) and strictly decreases
/// the objective. The accepted scale becomes the next rho. Trials that move
/// no vertex by more than kMinRelativeMove mean edge lengths are not
/// attempted: at that scale objective differences are round-off.
inline constexpr double kMinRelativeMove = 1e-10;
LineSearchResult line_search(const TriMesh& mesh, const NodalVectorField& w, double current,
                             const ObjectiveEvaluator& evaluate, const LineSearchParams& params,
                             double area_floor);

}  // namespace coastopt
