#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coastopt/adjoint.hpp"
#include "coastopt/deform.hpp"
#include "coastopt/objective.hpp"
#include "coastopt/sensitivity.hpp"
#include "coastopt/state.hpp"
#include "coastopt/topo_init.hpp"

namespace coastopt {

struct OptimizationConfig {
  StateOptions state;
  std::vector<WaveSpec> waves;
  ObjectiveSpec objective;
  AdjointOptions adjoint;
  SupportMode support = SupportMode::near_obstacle;
  double mu_min = 10.0;
  double mu_max = 100.0;
  LineSearchParams line_search;
  double eps_stop = 1e-6;      // absolute bound on the gradient norm
  double rel_eps_stop = 0.0;   // bound relative to the initial gradient norm (0: off)
  int max_iterations = 500;
  double area_floor = 0.0;     // <= 0: 1e-3 times the initial smallest cell area

  void validate() const;
};

/// States and objective on one mesh.
struct Evaluation {
  std::vector<StateSolution> states;
  ObjectiveValue value;
};

Evaluation evaluate(const TriMesh& mesh, const OptimizationConfig& config);

/// Adjoints and the assembled shape derivative for an evaluation.
ShapeGradientAssembly shape_derivative(const Evaluation& eval, const OptimizationConfig& config);

enum class Termination { converged, stagnated, invalid_shape, max_iterations };

std::string to_string(Termination t);
/// Process exit code: 0 converged, 2 stagnated, 3 invalid-shape, 4 max-iters.
int exit_code(Termination t);

struct IterationRecord {
  int iteration = 0;
  ObjectiveValue value;
  double gradient_norm = 0.0;
  double step = 0.0;  // scale of the step that produced this iterate
  int trials = 0;     // line-search trials spent on that step
  int invalid_trials = 0;  // of those, rejected by the validity check
  bool valid = true;
  double wall_time = 0.0;  // seconds since the start of the run
};

struct RunHistory {
  std::vector<IterationRecord> records;  // row 0 is the initial mesh
  Termination reason = Termination::max_iterations;
};

struct OptimizationResult {
  TriMesh mesh;
  RunHistory history;
};

/// Called after each record is appended, with the iterate's mesh.
using IterationCallback = std::function<void(const RunHistory&, const TriMesh&)>;

/// Descent loop: state, adjoint, shape derivative, elasticity gradient,
/// backtracking step along -W, until the gradient norm falls below the
/// stopping bounds, the line search fails, or the iteration cap is hit.
/// A failed line search ends the run as invalid-shape when it saw an invalid
/// trial or when the step it started from was last reduced by invalid
/// trials (the shape creeping towards self-contact); otherwise stagnated.
OptimizationResult run_optimization(const TriMesh& mesh, const OptimizationConfig& config,
                                    const IterationCallback& on_iteration = {});

struct TopologyOptions {
  double quantile = 0.05;
  double eps = 0.0;    // DBSCAN radius; <= 0: 5 mean edge lengths
  int min_points = 10;
  double pad = 0.0;    // hull dilation; <= 0: 2 mean edge lengths
  double margin = 0.0; // distance kept from the boundary; <= 0: 4 mean edge lengths
};

struct TopologyResult {
  std::vector<double> field;
  CandidateSelection selection;
  ClusterResult clusters;
  std::vector<std::vector<Vec2>> hulls;
  std::string geometry;  // empty when no obstacle was found
  std::string message;
};

/// Topological derivative on the obstacle-free mesh, candidate selection,
/// DBSCAN and obstacle outline emission.
TopologyResult run_topology_phase(const TriMesh& mesh, const OptimizationConfig& config,
                                  const TopologyOptions& options);

}  // namespace coastopt
