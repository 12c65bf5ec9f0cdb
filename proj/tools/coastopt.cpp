// coastopt: command-line driver.
//
//   coastopt solve    -c run.json   state fields and coastline traces
//   coastopt topo     -c run.json   topological derivative, clusters, obstacle .geo
//   coastopt optimize -c run.json   shape optimization loop
//   coastopt check    mesh.msh      mesh validation only
//
// Exit codes: 0 success/converged, 1 error, 2 stagnated, 3 invalid-shape,
// 4 max-iters. COASTOPT_OUTPUT_DIR and COASTOPT_THREADS override the output
// directory and the solver thread count; command-line flags override both.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "coastopt/config.hpp"
#include "coastopt/io.hpp"
#include "coastopt/optimize.hpp"

namespace fs = std::filesystem;
using namespace coastopt;

namespace {

struct Overrides {
  std::optional<std::string> mesh;
  std::optional<std::string> output;
  std::optional<int> order;
  std::optional<int> max_iterations;
  std::optional<double> eps_stop;
  std::optional<double> rho;
  std::optional<int> snapshot_stride;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const std::string& path, const Overrides& o) {
  RunConfig c = load_config(path);
  if (const char* env = std::getenv("COASTOPT_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    c.output_dir = env;
  }
  if (o.mesh) c.mesh = *o.mesh;
  if (o.output) c.output_dir = *o.output;
  if (o.order) c.order = *o.order;
  if (o.max_iterations) c.max_iterations = *o.max_iterations;
  if (o.eps_stop) c.eps_stop = *o.eps_stop;
  if (o.rho) c.rho = *o.rho;
  if (o.snapshot_stride) c.snapshot_stride = *o.snapshot_stride;
  if (o.seed) c.seed = *o.seed;
  c.validate();
  if (!fs::exists(c.mesh)) throw ConfigError("mesh: file not found: " + c.mesh);
  return c;
}

void apply_threads() {
  if (const char* env = std::getenv("COASTOPT_THREADS"); env != nullptr && *env != '\0') {
    const int n = std::atoi(env);
    if (n < 1) throw ConfigError("COASTOPT_THREADS must be a positive integer");
    Eigen::setNbThreads(n);
  }
}

std::string out_path(const RunConfig& c, const std::string& name) {
  return (fs::path(c.output_dir) / name).string();
}

TriMesh load_run_mesh(const RunConfig& c) { return load_msh(c.mesh, c.name_table()); }

int cmd_solve(const RunConfig& c) {
  const OptimizationConfig oc = c.optimization();
  const Evaluation ev = evaluate(load_run_mesh(c), oc);
  for (std::size_t j = 0; j < ev.states.size(); ++j) {
    const auto& s = ev.states[j];
    write_file_atomic(out_path(c, "state_" + std::to_string(j) + ".vtk"),
                      vtk_string(s.mesh(), complex_point_data(s.mesh(), s.u)));
    write_file_atomic(out_path(c, "coast_trace_" + std::to_string(j) + ".csv"),
                      coast_trace_csv(s.mesh(), s.u));
  }
  std::printf("objective %.10g (tracking %.10g, volume %.10g, perimeter %.10g)\n", ev.value.total(),
              ev.value.tracking, ev.value.volume, ev.value.perimeter);
  return 0;
}

int cmd_topo(const RunConfig& c) {
  const OptimizationConfig oc = c.optimization();
  const TriMesh mesh = load_run_mesh(c);
  const TopologyResult r = run_topology_phase(mesh, oc, c.topology);
  VtkPointData data;
  data.scalars["topological_derivative"] = r.field;
  write_file_atomic(out_path(c, "topological_derivative.vtk"), vtk_string(mesh, data));
  write_file_atomic(out_path(c, "clusters.csv"), clusters_csv(r.selection.points, r.clusters));
  const std::string geo = out_path(c, "obstacle.geo");
  if (!r.geometry.empty()) {
    write_file_atomic(geo, r.geometry);
  } else if (fs::exists(geo)) {
    fs::remove(geo);
  }
  std::printf("%zu candidates, %d clusters, %zu obstacle outlines\n", r.selection.vertices.size(),
              r.clusters.num_clusters, r.hulls.size());
  if (!r.message.empty()) std::printf("%s\n", r.message.c_str());
  return 0;
}

int cmd_optimize(const RunConfig& c) {
  const OptimizationConfig oc = c.optimization();
  const TriMesh mesh = load_run_mesh(c);
  const std::string history_path = out_path(c, "history.csv");
  auto on_iteration = [&](const RunHistory& h, const TriMesh& m) {
    write_file_atomic(history_path, history_csv(h));
    const auto& rec = h.records.back();
    std::printf("iter %4d  J %.10g  |DJ| %.4e  step %.3e  trials %d\n", rec.iteration, rec.value.total(),
                rec.gradient_norm, rec.step, rec.trials);
    std::fflush(stdout);
    if (c.snapshot_stride > 0 && rec.iteration % c.snapshot_stride == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/iter_%04d.vtk", rec.iteration);
      write_file_atomic(out_path(c, name), vtk_string(m, {}));
    }
  };
  const OptimizationResult res = run_optimization(mesh, oc, on_iteration);
  write_file_atomic(history_path, history_csv(res.history));
  write_file_atomic(out_path(c, "final.msh"), msh_string(res.mesh));
  write_file_atomic(out_path(c, "objective.svg"), objective_svg(res.history));
  std::printf("terminated: %s\n", to_string(res.history.reason).c_str());
  return exit_code(res.history.reason);
}

int cmd_check(const std::string& mesh_path, const std::optional<std::string>& config_path) {
  PhysicalNameTable names = default_physical_names();
  if (config_path) names = load_config(*config_path).name_table();
  const TriMesh mesh = load_msh(mesh_path, names);
  std::printf("vertices %zu, cells %zu, boundary edges %zu\n", mesh.num_vertices(), mesh.num_cells(),
              mesh.boundary_edges().size());
  for (BoundaryTag t : kAllBoundaryTags) {
    if (mesh.has_tag(t)) {
      std::printf("%s: length %.10g\n", to_string(t).c_str(), boundary_length(mesh, t));
    }
  }
  std::printf("omega area %.10g", domain_area(mesh, Region::omega));
  if (mesh.has_region(Region::obstacle)) {
    std::printf(", obstacle area %.10g", domain_area(mesh, Region::obstacle));
  }
  std::printf("\n");
  if (mesh.has_tag(BoundaryTag::g2) || mesh.has_tag(BoundaryTag::g3)) {
    const auto p = build_periodic_pairing(mesh, default_periodic_tolerance(mesh));
    std::printf("periodic pairs %zu, shift (%.10g, %.10g)\n", p.pairs.size(), p.shift.x(), p.shift.y());
  }
  const auto report = check_shape_validity(mesh, 0.0);
  if (!report.valid()) {
    std::printf("invalid: %zu crossing G5 edge pairs, %zu inverted cells\n", report.crossing_edges.size(),
                report.inverted_cells.size());
    return 1;
  }
  std::printf("valid\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coastal obstacle shape optimization"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--mesh", o.mesh, "mesh file (overrides the config)");
    sub->add_option("-o,--output", o.output, "output directory");
    sub->add_option("--order", o.order, "finite element order (1 or 2)");
    sub->add_option("--seed", o.seed, "random seed");
  };
  auto* solve = app.add_subcommand("solve", "solve the state for every configured wave");
  add_run_options(solve);
  auto* topo = app.add_subcommand("topo", "topological derivative and obstacle initialization");
  add_run_options(topo);
  auto* optimize = app.add_subcommand("optimize", "run the shape optimization loop");
  add_run_options(optimize);
  optimize->add_option("--max-iterations", o.max_iterations, "iteration cap");
  optimize->add_option("--eps-stop", o.eps_stop, "gradient norm stopping bound");
  optimize->add_option("--rho", o.rho, "initial line-search step");
  optimize->add_option("--snapshot-stride", o.snapshot_stride, "VTK snapshot every n iterations (0: off)");
  auto* check = app.add_subcommand("check", "validate a mesh");
  std::string check_mesh;
  std::optional<std::string> check_config;
  check->add_option("mesh", check_mesh, "GMSH 2.2 mesh")->required()->check(CLI::ExistingFile);
  check->add_option("-c,--config", check_config, "config providing the physical-name table")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    apply_threads();
    if (check->parsed()) return cmd_check(check_mesh, check_config);
    const RunConfig c = resolve_config(config_path, o);
    if (solve->parsed()) return cmd_solve(c);
    if (topo->parsed()) return cmd_topo(c);
    return cmd_optimize(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
