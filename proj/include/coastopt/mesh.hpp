#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace coastopt {

using Vec2 = Eigen::Vector2d;

/// Real 2-vector per vertex (shape gradients, mesh displacements).
using NodalVectorField = std::vector<Vec2>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cell region: the water domain or the (transmissive) obstacle interior.
enum class Region : std::uint8_t { omega, obstacle };

/// Boundary tags. G1 coastline, G2/G3 lateral (periodic) sea, G4 open sea,
/// G5 obstacle boundary.
enum class BoundaryTag : std::uint8_t { g1 = 1, g2 = 2, g3 = 3, g4 = 4, g5 = 5 };

inline constexpr std::array<BoundaryTag, 5> kAllBoundaryTags = {
    BoundaryTag::g1, BoundaryTag::g2, BoundaryTag::g3, BoundaryTag::g4, BoundaryTag::g5};
inline constexpr std::array<BoundaryTag, 4> kOuterBoundaryTags = {
    BoundaryTag::g1, BoundaryTag::g2, BoundaryTag::g3, BoundaryTag::g4};

std::string to_string(BoundaryTag tag);
std::string to_string(Region region);

struct Cell {
  std::array<int, 3> v;
  Region region = Region::omega;
};

/// A tagged boundary edge. Vertices are ordered so that the adjacent Omega
/// cell lies on the left, hence the outward normal (out of Omega, into the
/// obstacle on G5) is the tangent rotated clockwise.
struct BoundaryEdge {
  std::array<int, 2> v;
  BoundaryTag tag;
  int cell = -1;       // adjacent Omega cell (or the only adjacent cell)
  int other_cell = -1; // second cell across an interface edge, else -1
};

/// Physical group mapping for GMSH ingestion: name (or numeric id as text)
/// to a region or boundary tag.
using PhysicalTarget = std::variant<Region, BoundaryTag>;
using PhysicalNameTable = std::map<std::string, PhysicalTarget>;

PhysicalNameTable default_physical_names();

/// Tagged triangular mesh. Topology is shared between a mesh and its
/// displaced copies; vertex coordinates are owned per instance. Immutable
/// after construction.
class TriMesh {
 public:
  TriMesh(std::vector<Vec2> vertices, std::vector<Cell> cells,
          std::vector<BoundaryEdge> boundary_edges);

  [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
  [[nodiscard]] std::size_t num_cells() const { return topo_->cells.size(); }
  [[nodiscard]] std::size_t num_edges() const { return topo_->edges.size(); }

  [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
  [[nodiscard]] const Vec2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const std::vector<Cell>& cells() const { return topo_->cells; }
  [[nodiscard]] const Cell& cell(int c) const { return topo_->cells[static_cast<std::size_t>(c)]; }
  [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const {
    return topo_->boundary_edges;
  }

  /// Unique undirected edges (a < b) and the edge index of each local cell
  /// edge (0: v0-v1, 1: v1-v2, 2: v2-v0).
  [[nodiscard]] const std::vector<std::array<int, 2>>& edges() const { return topo_->edges; }
  [[nodiscard]] const std::array<int, 3>& cell_edges(int c) const {
    return topo_->cell_edges[static_cast<std::size_t>(c)];
  }
  [[nodiscard]] int boundary_edge_index(int b) const {
    return topo_->boundary_edge_ids[static_cast<std::size_t>(b)];
  }

  /// Cells incident to vertex i.
  [[nodiscard]] std::span<const int> vertex_cells(int i) const;

  [[nodiscard]] double signed_area(int c) const;
  [[nodiscard]] double edge_length(const BoundaryEdge& e) const;
  [[nodiscard]] Vec2 edge_normal(const BoundaryEdge& e) const;

  [[nodiscard]] bool has_tag(BoundaryTag tag) const;
  [[nodiscard]] bool has_region(Region region) const;

  /// Sorted, unique vertices of all edges carrying the tag.
  [[nodiscard]] std::vector<int> boundary_vertices(BoundaryTag tag) const;
  /// Per-vertex flag: vertex lies on any of the given tags.
  [[nodiscard]] std::vector<char> vertex_on_tags(std::span<const BoundaryTag> tags) const;

  [[nodiscard]] double min_cell_area() const;
  [[nodiscard]] double mean_edge_length() const;

  /// Same topology, new coordinates.
  [[nodiscard]] TriMesh with_vertices(std::vector<Vec2> vertices) const;
  /// Submesh of the cells in `region`; unreferenced vertices dropped, G5
  /// interface edges become boundary edges.
  [[nodiscard]] TriMesh restricted_to(Region region) const;

  /// Identity of this coordinate set; fields remember it to detect use on a
  /// different (e.g. displaced) mesh.
  [[nodiscard]] std::uint64_t generation() const { return generation_; }

 private:
  struct Topology {
    std::vector<Cell> cells;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> cell_edges;
    std::vector<int> boundary_edge_ids;
    std::vector<int> vertex_cell_offsets;
    std::vector<int> vertex_cell_list;
  };

  TriMesh(std::shared_ptr<const Topology> topo, std::vector<Vec2> vertices);
  static std::shared_ptr<const Topology> build_topology(std::size_t num_vertices,
                                                        std::vector<Cell> cells,
                                                        std::vector<BoundaryEdge> edges);

  std::shared_ptr<const Topology> topo_;
  std::vector<Vec2> vertices_;
  std::uint64_t generation_;
};

/// Bijection between G2 and G3 vertices (translational periodicity).
struct PeriodicPairing {
  std::vector<std::pair<int, int>> pairs;  // (G2 vertex, G3 vertex)
  double tolerance = 0.0;
  Vec2 shift = Vec2::Zero();               // G3 position minus G2 position
};

TriMesh read_msh(std::istream& in, const PhysicalNameTable& names = default_physical_names());
TriMesh load_msh(const std::string& path, const PhysicalNameTable& names = default_physical_names());
void write_msh(std::ostream& out, const TriMesh& mesh,
               const PhysicalNameTable& names = default_physical_names());

PeriodicPairing build_periodic_pairing(const TriMesh& mesh, double tol);

TriMesh apply_displacement(const TriMesh& mesh, const NodalVectorField& disp, double scale);

struct ValidityReport {
  std::vector<std::pair<int, int>> crossing_edges;  // boundary-edge indices on G5
  std::vector<int> inverted_cells;                  // signed area <= floor
  [[nodiscard]] bool valid() const { return crossing_edges.empty() && inverted_cells.empty(); }
};

/// Self-intersection of G5 and element inversion check.
ValidityReport check_shape_validity(const TriMesh& mesh, double area_floor);

/// area_floor used when none is supplied: 1e-3 times the reference mesh's
/// smallest cell area.
double default_area_floor(const TriMesh& reference);

double boundary_length(const TriMesh& mesh, BoundaryTag tag);
double domain_area(const TriMesh& mesh, Region region);

/// Structured rectangle [x0,x1]x[y0,y1] split into 2*nx*ny triangles, tagged
/// G1 bottom, G2 left, G3 right, G4 top. Used by tests and manufactured
/// solution studies.
TriMesh make_rectangle(int nx, int ny, double x0, double x1, double y0, double y1);

/// Whether two closed segments intersect (touching counts).
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace coastopt
