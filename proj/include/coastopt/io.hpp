#pragma once

#include <map>
#include <string>
#include <vector>

#include "coastopt/mesh.hpp"
#include "coastopt/optimize.hpp"
#include "coastopt/topo_init.hpp"

namespace coastopt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `content` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

struct VtkPointData {
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, NodalVectorField> vectors;
};

/// Legacy ASCII unstructured-grid VTK (triangles, point data, cell region).
std::string vtk_string(const TriMesh& mesh, const VtkPointData& data);

/// Point data for a complex field: re, im, abs at the vertices.
VtkPointData complex_point_data(const TriMesh& mesh, const ComplexNodalField& field,
                                const std::string& prefix = "u");

/// G1 trace: arc length, x, y, Re u, Im u, |u| at the G1 vertices, one
/// chain of edges after another.
std::string coast_trace_csv(const TriMesh& mesh, const ComplexNodalField& field);

std::string history_csv(const RunHistory& history);
std::string clusters_csv(const std::vector<Vec2>& points, const ClusterResult& clusters);

/// Objective against iteration as a standalone SVG line plot.
std::string objective_svg(const RunHistory& history);

std::string msh_string(const TriMesh& mesh);

}  // namespace coastopt
