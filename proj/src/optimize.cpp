#include "coastopt/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace coastopt {

void OptimizationConfig::validate() const {
  if (waves.empty()) throw std::invalid_argument("at least one wave is required");
  double wsum = 0.0;
  for (const auto& w : waves) {
    w.validate();
    wsum += w.weight;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("wave weights must not all be zero");
  objective.validate();
  line_search.validate();
  if (!(mu_min > 0.0) || !(mu_max >= mu_min)) throw std::invalid_argument("need 0 < mu_min <= mu_max");
  if (state.order != 1 && state.order != 2) throw std::invalid_argument("FE order must be 1 or 2");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
}

Evaluation evaluate(const TriMesh& mesh, const OptimizationConfig& config) {
  auto space = std::make_shared<const FeSpace>(mesh, config.state.order);
  Evaluation e;
  e.states.reserve(config.waves.size());
  for (const auto& w : config.waves) e.states.push_back(solve_state(space, w, config.state));
  e.value = evaluate_objective(mesh, e.states, config.objective);
  return e;
}

ShapeGradientAssembly shape_derivative(const Evaluation& eval, const OptimizationConfig& config) {
  const auto adjoints = solve_adjoint_multiwave(eval.states, config.objective, config.adjoint);
  const auto& mesh = eval.states.front().mesh();
  return assemble_shape_gradient(eval.states, adjoints, config.objective,
                                 shape_support(mesh, config.support));
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::stagnated: return "stagnated";
    case Termination::invalid_shape: return "invalid-shape";
    case Termination::max_iterations: return "max-iters";
  }
  return "unknown";
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::converged: return 0;
    case Termination::stagnated: return 2;
    case Termination::invalid_shape: return 3;
    case Termination::max_iterations: return 4;
  }
  return 1;
}

OptimizationResult run_optimization(const TriMesh& initial, const OptimizationConfig& config,
                                    const IterationCallback& on_iteration) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double area_floor = config.area_floor > 0.0 ? config.area_floor : default_area_floor(initial);
  if (!check_shape_validity(initial, area_floor).valid()) {
    throw MeshError("initial mesh fails the shape validity check");
  }

  OptimizationResult result{initial, {}};
  Evaluation current = evaluate(initial, config);
  LineSearchParams ls = config.line_search;
  double step = 0.0;
  int trials = 0;
  int invalid_trials = 0;
  bool shrunk_by_invalid = false;
  double initial_norm = 0.0;

  for (int k = 0;; ++k) {
    const TriMesh& mesh = result.mesh;
    const auto dj = shape_derivative(current, config);
    const Eigen::VectorXd mu = solve_lame_mu(mesh, config.mu_min, config.mu_max);
    const ShapeGradient grad = solve_shape_gradient(mesh, dj.total(), mu);
    if (k == 0) initial_norm = grad.norm;

    IterationRecord rec;
    rec.iteration = k;
    rec.value = current.value;
    rec.gradient_norm = grad.norm;
    rec.step = step;
    rec.trials = trials;
    rec.invalid_trials = invalid_trials;
    rec.valid = true;
    rec.wall_time = elapsed();
    result.history.records.push_back(rec);
    if (on_iteration) on_iteration(result.history, mesh);

    if (grad.norm <= config.eps_stop ||
        (config.rel_eps_stop > 0.0 && grad.norm <= config.rel_eps_stop * initial_norm)) {
      result.history.reason = Termination::converged;
      break;
    }
    if (k >= config.max_iterations) {
      result.history.reason = Termination::max_iterations;
      break;
    }

    std::optional<Evaluation> trial_eval;
    const ObjectiveEvaluator objective = [&](const TriMesh& trial) {
      trial_eval = evaluate(trial, config);
      return trial_eval->value.total();
    };
    auto ls_result = line_search(mesh, grad.w, current.value.total(), objective, ls, area_floor);
    if (!ls_result.accepted) {
      result.history.reason = ls_result.saw_invalid_shape() || shrunk_by_invalid
                                  ? Termination::invalid_shape
                                  : Termination::stagnated;
      break;
    }
    if (ls_result.rho < ls.rho) shrunk_by_invalid = ls_result.saw_invalid_shape();
    ls.rho = ls_result.rho;
    step = ls_result.step;
    trials = static_cast<int>(ls_result.trials.size());
    invalid_trials = static_cast<int>(
        std::count(ls_result.trials.begin(), ls_result.trials.end(), TrialOutcome::invalid_shape));
    result.mesh = std::move(*ls_result.mesh);
    current = std::move(*trial_eval);
  }
  return result;
}

TopologyResult run_topology_phase(const TriMesh& mesh, const OptimizationConfig& config,
                                  const TopologyOptions& options) {
  config.validate();
  if (mesh.has_region(Region::obstacle) || mesh.has_tag(BoundaryTag::g5)) {
    throw MeshError("topology phase expects an obstacle-free mesh");
  }
  OptimizationConfig cfg = config;
  cfg.state.regime = Regime::scatterer;
  // Volume and perimeter terms need an obstacle; the derivative is of the tracking part.
  cfg.objective.nu1 = 0.0;
  cfg.objective.nu2 = 0.0;
  const Evaluation eval = evaluate(mesh, cfg);
  const auto adjoints = solve_adjoint_multiwave(eval.states, cfg.objective, cfg.adjoint);

  TopologyResult out;
  out.field = topological_derivative(eval.states, adjoints);
  const double h = mesh.mean_edge_length();
  const double margin = options.margin > 0.0 ? options.margin : 4.0 * h;
  const double eps = options.eps > 0.0 ? options.eps : 5.0 * h;
  const double pad = options.pad > 0.0 ? options.pad : 2.0 * h;
  out.selection = select_candidates(mesh, out.field, options.quantile, margin);
  out.clusters.eps = eps;
  out.clusters.min_points = options.min_points;
  if (out.selection.degenerate || out.selection.threshold >= 0.0) {
    out.clusters.labels.assign(out.selection.points.size(), -1);
    out.message = "no beneficial obstacle found at this threshold";
    return out;
  }
  out.clusters = dbscan(out.selection.points, eps, options.min_points);
  if (out.clusters.num_clusters == 0) {
    out.message = "no beneficial obstacle found at this threshold";
    return out;
  }
  out.hulls = cluster_hulls(out.selection.points, out.clusters, pad);
  out.geometry = obstacle_geometry(mesh, out.hulls, 0.5 * h);
  out.message = std::to_string(out.clusters.num_clusters) +
                " obstacle outline(s) written; mesh the geometry and run optimize on it";
  return out;
}

}  // namespace coastopt
