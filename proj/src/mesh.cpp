#include "coastopt/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace coastopt {

namespace {

std::uint64_t next_generation() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Orientation of c relative to the directed line a->b, with a relative
// tolerance so that nearly collinear triples count as collinear.
int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  const double eps = 1e-14 * scale;
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::string to_string(BoundaryTag tag) { return "G" + std::to_string(static_cast<int>(tag)); }

std::string to_string(Region region) { return region == Region::omega ? "OMEGA" : "D"; }

PhysicalNameTable default_physical_names() {
  PhysicalNameTable t;
  for (auto tag : kAllBoundaryTags) t.emplace(to_string(tag), tag);
  t.emplace("OMEGA", Region::omega);
  t.emplace("D", Region::obstacle);
  return t;
}

// ---------------------------------------------------------------------------
// TriMesh

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<Cell> cells,
                 std::vector<BoundaryEdge> boundary_edges)
    : topo_(build_topology(vertices.size(), std::move(cells), std::move(boundary_edges))),
      vertices_(std::move(vertices)),
      generation_(next_generation()) {
  for (std::size_t c = 0; c < topo_->cells.size(); ++c) {
    if (!(signed_area(static_cast<int>(c)) > 0.0)) {
      throw MeshError("cell " + std::to_string(c) + " has non-positive area");
    }
  }
}

TriMesh::TriMesh(std::shared_ptr<const Topology> topo, std::vector<Vec2> vertices)
    : topo_(std::move(topo)), vertices_(std::move(vertices)), generation_(next_generation()) {}

std::shared_ptr<const TriMesh::Topology> TriMesh::build_topology(std::size_t num_vertices,
                                                                 std::vector<Cell> cells,
                                                                 std::vector<BoundaryEdge> edges) {
  auto topo = std::make_shared<Topology>();
  const int nv = static_cast<int>(num_vertices);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int v : cells[c].v) {
      if (v < 0 || v >= nv) {
        throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) +
                        " out of range");
      }
    }
    const auto& v = cells[c].v;
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) {
      throw MeshError("cell " + std::to_string(c) + " has repeated vertices");
    }
  }

  // Unique edges in order of first appearance.
  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(cells.size() * 2);
  std::vector<std::array<int, 2>> edge_cells;
  topo->cell_edges.resize(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = cells[c].v;
    for (int l = 0; l < 3; ++l) {
      const int a = v[static_cast<std::size_t>(l)];
      const int b = v[static_cast<std::size_t>((l + 1) % 3)];
      auto [it, inserted] = edge_ids.try_emplace(edge_key(a, b), static_cast<int>(topo->edges.size()));
      if (inserted) {
        topo->edges.push_back({std::min(a, b), std::max(a, b)});
        edge_cells.push_back({static_cast<int>(c), -1});
      } else {
        auto& ec = edge_cells[static_cast<std::size_t>(it->second)];
        if (ec[1] != -1) {
          throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") shared by more than two cells");
        }
        ec[1] = static_cast<int>(c);
      }
      topo->cell_edges[c][static_cast<std::size_t>(l)] = it->second;
    }
  }

  // Tagged edges: match to mesh edges, orient w.r.t. the Omega cell.
  std::vector<int> edge_tagged(topo->edges.size(), -1);
  std::vector<BoundaryEdge> kept;
  kept.reserve(edges.size());
  for (auto& e : edges) {
    auto it = edge_ids.find(edge_key(e.v[0], e.v[1]));
    if (it == edge_ids.end()) {
      throw MeshError("tagged edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                      ") is not an edge of any cell");
    }
    const int id = it->second;
    const auto& ec = edge_cells[static_cast<std::size_t>(id)];
    if (ec[1] != -1 && cells[static_cast<std::size_t>(ec[0])].region ==
                           cells[static_cast<std::size_t>(ec[1])].region) {
      throw MeshError("tagged edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                      ") is interior to one region");
    }
    if (edge_tagged[static_cast<std::size_t>(id)] >= 0) {
      const auto& prev = kept[static_cast<std::size_t>(edge_tagged[static_cast<std::size_t>(id)])];
      if (prev.tag != e.tag) {
        throw MeshError("edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                        ") carries two different tags");
      }
      continue;
    }
    int primary = ec[0];
    int secondary = ec[1];
    if (secondary != -1 && cells[static_cast<std::size_t>(secondary)].region == Region::omega) {
      std::swap(primary, secondary);
    }
    const auto& cv = cells[static_cast<std::size_t>(primary)].v;
    BoundaryEdge out = e;
    for (int l = 0; l < 3; ++l) {
      const int a = cv[static_cast<std::size_t>(l)];
      const int b = cv[static_cast<std::size_t>((l + 1) % 3)];
      if (edge_key(a, b) == it->first) {
        out.v = {a, b};
        break;
      }
    }
    out.cell = primary;
    out.other_cell = secondary;
    edge_tagged[static_cast<std::size_t>(id)] = static_cast<int>(kept.size());
    kept.push_back(out);
  }
  for (std::size_t id = 0; id < topo->edges.size(); ++id) {
    const auto& ec = edge_cells[id];
    const bool is_boundary = ec[1] == -1;
    const bool is_interface =
        !is_boundary && cells[static_cast<std::size_t>(ec[0])].region !=
                            cells[static_cast<std::size_t>(ec[1])].region;
    if ((is_boundary || is_interface) && edge_tagged[id] < 0) {
      throw MeshError("boundary edge (" + std::to_string(topo->edges[id][0]) + "," +
                      std::to_string(topo->edges[id][1]) + ") has no tag");
    }
  }
  topo->boundary_edge_ids.resize(kept.size());
  for (std::size_t b = 0; b < kept.size(); ++b) {
    topo->boundary_edge_ids[b] =
        edge_ids.at(edge_key(kept[b].v[0], kept[b].v[1]));
  }

  // Vertex -> cell adjacency (CSR).
  topo->vertex_cell_offsets.assign(num_vertices + 1, 0);
  for (const auto& c : cells) {
    for (int v : c.v) ++topo->vertex_cell_offsets[static_cast<std::size_t>(v) + 1];
  }
  std::partial_sum(topo->vertex_cell_offsets.begin(), topo->vertex_cell_offsets.end(),
                   topo->vertex_cell_offsets.begin());
  topo->vertex_cell_list.resize(cells.size() * 3);
  std::vector<int> fill(topo->vertex_cell_offsets.begin(), topo->vertex_cell_offsets.end() - 1);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int v : cells[c].v) {
      topo->vertex_cell_list[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] =
          static_cast<int>(c);
    }
  }

  topo->cells = std::move(cells);
  topo->boundary_edges = std::move(kept);
  return topo;
}

std::span<const int> TriMesh::vertex_cells(int i) const {
  const auto b = static_cast<std::size_t>(topo_->vertex_cell_offsets[static_cast<std::size_t>(i)]);
  const auto e =
      static_cast<std::size_t>(topo_->vertex_cell_offsets[static_cast<std::size_t>(i) + 1]);
  return {topo_->vertex_cell_list.data() + b, e - b};
}

double TriMesh::signed_area(int c) const {
  const auto& v = cell(c).v;
  return 0.5 * cross(vertex(v[1]) - vertex(v[0]), vertex(v[2]) - vertex(v[0]));
}

double TriMesh::edge_length(const BoundaryEdge& e) const {
  return (vertex(e.v[1]) - vertex(e.v[0])).norm();
}

Vec2 TriMesh::edge_normal(const BoundaryEdge& e) const {
  const Vec2 t = vertex(e.v[1]) - vertex(e.v[0]);
  return Vec2(t.y(), -t.x()).normalized();
}

bool TriMesh::has_tag(BoundaryTag tag) const {
  return std::any_of(boundary_edges().begin(), boundary_edges().end(),
                     [tag](const BoundaryEdge& e) { return e.tag == tag; });
}

bool TriMesh::has_region(Region region) const {
  return std::any_of(cells().begin(), cells().end(),
                     [region](const Cell& c) { return c.region == region; });
}

std::vector<int> TriMesh::boundary_vertices(BoundaryTag tag) const {
  std::vector<int> out;
  for (const auto& e : boundary_edges()) {
    if (e.tag == tag) {
      out.push_back(e.v[0]);
      out.push_back(e.v[1]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<char> TriMesh::vertex_on_tags(std::span<const BoundaryTag> tags) const {
  std::vector<char> on(num_vertices(), 0);
  for (const auto& e : boundary_edges()) {
    if (std::find(tags.begin(), tags.end(), e.tag) != tags.end()) {
      on[static_cast<std::size_t>(e.v[0])] = 1;
      on[static_cast<std::size_t>(e.v[1])] = 1;
    }
  }
  return on;
}

double TriMesh::min_cell_area() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < num_cells(); ++c) m = std::min(m, signed_area(static_cast<int>(c)));
  return m;
}

double TriMesh::mean_edge_length() const {
  if (edges().empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : edges()) s += (vertex(e[1]) - vertex(e[0])).norm();
  return s / static_cast<double>(edges().size());
}

TriMesh TriMesh::with_vertices(std::vector<Vec2> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw MeshError("vertex count mismatch in with_vertices");
  }
  return TriMesh(topo_, std::move(vertices));
}

TriMesh TriMesh::restricted_to(Region region) const {
  std::vector<int> remap(num_vertices(), -1);
  std::vector<int> cell_kept(num_cells(), 0);
  std::vector<Vec2> verts;
  std::vector<Cell> cells_out;
  for (std::size_t c = 0; c < num_cells(); ++c) {
    const auto& cc = cells()[c];
    if (cc.region != region) continue;
    cell_kept[c] = 1;
    Cell nc = cc;
    for (std::size_t l = 0; l < 3; ++l) {
      auto& r = remap[static_cast<std::size_t>(cc.v[l])];
      if (r < 0) {
        r = static_cast<int>(verts.size());
        verts.push_back(vertex(cc.v[l]));
      }
      nc.v[l] = r;
    }
    cells_out.push_back(nc);
  }
  std::vector<BoundaryEdge> edges_out;
  for (const auto& e : boundary_edges()) {
    const bool keep = (e.cell >= 0 && cell_kept[static_cast<std::size_t>(e.cell)]) ||
                      (e.other_cell >= 0 && cell_kept[static_cast<std::size_t>(e.other_cell)]);
    if (!keep) continue;
    BoundaryEdge ne{{remap[static_cast<std::size_t>(e.v[0])], remap[static_cast<std::size_t>(e.v[1])]},
                    e.tag};
    edges_out.push_back(ne);
  }
  return TriMesh(std::move(verts), std::move(cells_out), std::move(edges_out));
}

// ---------------------------------------------------------------------------
// GMSH v2.2 ASCII

namespace {

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw MeshError(std::string("unexpected end of file while reading ") + what);
  return tok;
}

template <typename T>
T next_number(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw MeshError(std::string("malformed number in ") + what);
  return value;
}

void expect_token(std::istream& in, const std::string& expected) {
  const std::string tok = next_token(in, expected.c_str());
  if (tok != expected) throw MeshError("expected " + expected + ", found " + tok);
}

}  // namespace

TriMesh read_msh(std::istream& in, const PhysicalNameTable& names) {
  std::map<int, std::string> physical_names;
  std::unordered_map<long, int> node_index;
  std::vector<Vec2> nodes;
  struct RawTri { std::array<long, 3> n; int phys; };
  struct RawLine { std::array<long, 2> n; int phys; };
  std::vector<RawTri> tris;
  std::vector<RawLine> lines;
  bool have_format = false;
  bool have_nodes = false;
  bool have_elements = false;

  std::string section;
  while (in >> section) {
    if (section == "$MeshFormat") {
      const auto version = next_number<double>(in, "$MeshFormat");
      const auto file_type = next_number<int>(in, "$MeshFormat");
      next_number<int>(in, "$MeshFormat");
      if (version < 2.0 || version >= 3.0) {
        throw MeshError("unsupported MSH version " + std::to_string(version) + " (need 2.2)");
      }
      if (file_type != 0) throw MeshError("binary MSH files are not supported");
      expect_token(in, "$EndMeshFormat");
      have_format = true;
    } else if (section == "$PhysicalNames") {
      const auto n = next_number<int>(in, "$PhysicalNames");
      for (int i = 0; i < n; ++i) {
        next_number<int>(in, "$PhysicalNames");
        const auto id = next_number<int>(in, "$PhysicalNames");
        std::string name;
        in >> std::ws;
        if (!std::getline(in, name)) throw MeshError("malformed $PhysicalNames");
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
          name = name.substr(1, name.size() - 2);
        }
        physical_names[id] = name;
      }
      expect_token(in, "$EndPhysicalNames");
    } else if (section == "$Nodes") {
      const auto n = next_number<long>(in, "$Nodes");
      if (n < 0) throw MeshError("negative node count");
      nodes.reserve(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) {
        const auto id = next_number<long>(in, "$Nodes");
        const auto x = next_number<double>(in, "$Nodes");
        const auto y = next_number<double>(in, "$Nodes");
        next_number<double>(in, "$Nodes");
        if (!std::isfinite(x) || !std::isfinite(y)) throw MeshError("non-finite node coordinate");
        if (!node_index.emplace(id, static_cast<int>(nodes.size())).second) {
          throw MeshError("duplicate node id " + std::to_string(id));
        }
        nodes.emplace_back(x, y);
      }
      expect_token(in, "$EndNodes");
      have_nodes = true;
    } else if (section == "$Elements") {
      const auto n = next_number<long>(in, "$Elements");
      for (long i = 0; i < n; ++i) {
        next_number<long>(in, "$Elements");
        const auto type = next_number<int>(in, "$Elements");
        const auto ntags = next_number<int>(in, "$Elements");
        if (ntags < 0) throw MeshError("negative tag count");
        int phys = 0;
        for (int t = 0; t < ntags; ++t) {
          const auto tag = next_number<int>(in, "$Elements");
          if (t == 0) phys = tag;
        }
        if (type == 15) {
          next_number<long>(in, "$Elements");
        } else if (type == 1) {
          RawLine l{};
          l.n[0] = next_number<long>(in, "$Elements");
          l.n[1] = next_number<long>(in, "$Elements");
          l.phys = phys;
          lines.push_back(l);
        } else if (type == 2) {
          RawTri t{};
          for (auto& v : t.n) v = next_number<long>(in, "$Elements");
          t.phys = phys;
          tris.push_back(t);
        } else {
          throw MeshError("unsupported element type " + std::to_string(type));
        }
      }
      expect_token(in, "$EndElements");
      have_elements = true;
    } else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0) {
      // Unknown section: skip to its end marker.
      const std::string end = "$End" + section.substr(1);
      std::string tok;
      while (in >> tok && tok != end) {
      }
    } else {
      throw MeshError("malformed MSH file near '" + section + "'");
    }
  }
  if (!have_format || !have_nodes || !have_elements) {
    throw MeshError("MSH file lacks $MeshFormat, $Nodes or $Elements");
  }

  auto resolve = [&](int phys) -> PhysicalTarget {
    auto pn = physical_names.find(phys);
    if (pn != physical_names.end()) {
      auto it = names.find(pn->second);
      if (it != names.end()) return it->second;
    }
    auto it = names.find(std::to_string(phys));
    if (it != names.end()) return it->second;
    const std::string label = pn != physical_names.end() ? "\"" + pn->second + "\"" : std::to_string(phys);
    throw MeshError("unknown physical group " + label);
  };

  // Keep only nodes referenced by triangles.
  std::vector<int> remap(nodes.size(), -1);
  std::vector<Vec2> verts;
  auto vertex_of = [&](long id, bool create) -> int {
    auto it = node_index.find(id);
    if (it == node_index.end()) {
      throw MeshError("element references vertex " + std::to_string(id) + " out of range");
    }
    auto& r = remap[static_cast<std::size_t>(it->second)];
    if (r < 0) {
      if (!create) {
        throw MeshError("line element uses vertex " + std::to_string(id) + " not in any cell");
      }
      r = static_cast<int>(verts.size());
      verts.push_back(nodes[static_cast<std::size_t>(it->second)]);
    }
    return r;
  };

  std::vector<Cell> cells;
  cells.reserve(tris.size());
  for (const auto& t : tris) {
    const auto target = resolve(t.phys);
    if (!std::holds_alternative<Region>(target)) {
      throw MeshError("triangle physical group maps to a boundary tag");
    }
    Cell c;
    c.region = std::get<Region>(target);
    for (std::size_t l = 0; l < 3; ++l) c.v[l] = vertex_of(t.n[l], true);
    // Surfaces meshed with a -z normal come out clockwise.
    const Vec2& a = verts[static_cast<std::size_t>(c.v[0])];
    const Vec2& b = verts[static_cast<std::size_t>(c.v[1])];
    const Vec2& d = verts[static_cast<std::size_t>(c.v[2])];
    if ((b - a).x() * (d - a).y() - (b - a).y() * (d - a).x() < 0.0) std::swap(c.v[1], c.v[2]);
    cells.push_back(c);
  }
  std::vector<BoundaryEdge> edges;
  edges.reserve(lines.size());
  for (const auto& l : lines) {
    const auto target = resolve(l.phys);
    if (!std::holds_alternative<BoundaryTag>(target)) {
      throw MeshError("line physical group maps to a region");
    }
    edges.push_back({{vertex_of(l.n[0], false), vertex_of(l.n[1], false)},
                     std::get<BoundaryTag>(target)});
  }
  return TriMesh(std::move(verts), std::move(cells), std::move(edges));
}

TriMesh load_msh(const std::string& path, const PhysicalNameTable& names) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  try {
    return read_msh(in, names);
  } catch (const MeshError& e) {
    throw MeshError(path + ": " + e.what());
  }
}

void write_msh(std::ostream& out, const TriMesh& mesh, const PhysicalNameTable& names) {
  auto name_of = [&](const PhysicalTarget& target, const std::string& fallback) {
    for (const auto& [name, t] : names) {
      if (t == target) return name;
    }
    return fallback;
  };
  auto phys_id = [](const PhysicalTarget& t) {
    if (std::holds_alternative<BoundaryTag>(t)) return static_cast<int>(std::get<BoundaryTag>(t));
    return std::get<Region>(t) == Region::omega ? 6 : 7;
  };

  std::vector<PhysicalTarget> used;
  for (auto tag : kAllBoundaryTags) {
    if (mesh.has_tag(tag)) used.emplace_back(tag);
  }
  if (mesh.has_region(Region::omega)) used.emplace_back(Region::omega);
  if (mesh.has_region(Region::obstacle)) used.emplace_back(Region::obstacle);

  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n" << used.size() << "\n";
  for (const auto& t : used) {
    const int dim = std::holds_alternative<BoundaryTag>(t) ? 1 : 2;
    const std::string fallback = std::holds_alternative<BoundaryTag>(t)
                                     ? to_string(std::get<BoundaryTag>(t))
                                     : to_string(std::get<Region>(t));
    out << dim << " " << phys_id(t) << " \"" << name_of(t, fallback) << "\"\n";
  }
  out << "$EndPhysicalNames\n";
  out << "$Nodes\n" << mesh.num_vertices() << "\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const auto& p = mesh.vertices()[i];
    out << i + 1 << " " << p.x() << " " << p.y() << " 0\n";
  }
  out << "$EndNodes\n";
  out << "$Elements\n" << mesh.boundary_edges().size() + mesh.num_cells() << "\n";
  std::size_t id = 1;
  for (const auto& e : mesh.boundary_edges()) {
    const int p = phys_id(e.tag);
    out << id++ << " 1 2 " << p << " " << p << " " << e.v[0] + 1 << " " << e.v[1] + 1 << "\n";
  }
  for (const auto& c : mesh.cells()) {
    const int p = phys_id(c.region);
    out << id++ << " 2 2 " << p << " " << p << " " << c.v[0] + 1 << " " << c.v[1] + 1 << " "
        << c.v[2] + 1 << "\n";
  }
  out << "$EndElements\n";
}

// ---------------------------------------------------------------------------
// Periodic pairing

PeriodicPairing build_periodic_pairing(const TriMesh& mesh, double tol) {
  const auto left = mesh.boundary_vertices(BoundaryTag::g2);
  const auto right = mesh.boundary_vertices(BoundaryTag::g3);
  PeriodicPairing pairing;
  pairing.tolerance = tol;
  if (left.empty() && right.empty()) return pairing;
  if (left.size() != right.size()) {
    throw MeshError("periodic boundaries have " + std::to_string(left.size()) + " and " +
                    std::to_string(right.size()) + " vertices");
  }
  Vec2 cl = Vec2::Zero();
  Vec2 cr = Vec2::Zero();
  for (int v : left) cl += mesh.vertex(v);
  for (int v : right) cr += mesh.vertex(v);
  pairing.shift = (cr - cl) / static_cast<double>(left.size());

  // Sort along the dominant extent of G2.
  Vec2 lo = mesh.vertex(left.front());
  Vec2 hi = lo;
  for (int v : left) {
    lo = lo.cwiseMin(mesh.vertex(v));
    hi = hi.cwiseMax(mesh.vertex(v));
  }
  const int axis = (hi - lo).y() >= (hi - lo).x() ? 1 : 0;
  auto sorted = left;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](int a, int b) { return mesh.vertex(a)[axis] < mesh.vertex(b)[axis]; });

  std::vector<char> used(mesh.num_vertices(), 0);
  for (int a : sorted) {
    const Vec2 target = mesh.vertex(a) + pairing.shift;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int b : right) {
      const double d = (mesh.vertex(b) - target).norm();
      if (d < best_d) {
        best_d = d;
        best = b;
      }
    }
    if (best < 0 || best_d > tol) {
      throw MeshError("no periodic partner within tolerance for vertex " + std::to_string(a));
    }
    if (used[static_cast<std::size_t>(best)]) {
      throw MeshError("periodic pairing is not a bijection at vertex " + std::to_string(best));
    }
    used[static_cast<std::size_t>(best)] = 1;
    pairing.pairs.emplace_back(a, best);
  }
  return pairing;
}

TriMesh apply_displacement(const TriMesh& mesh, const NodalVectorField& disp, double scale) {
  if (disp.size() != mesh.num_vertices()) {
    throw MeshError("displacement field size does not match vertex count");
  }
  std::vector<Vec2> moved(mesh.num_vertices());
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = mesh.vertices()[i] + scale * disp[i];
  return mesh.with_vertices(std::move(moved));
}

// ---------------------------------------------------------------------------
// Validity

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

ValidityReport check_shape_validity(const TriMesh& mesh, double area_floor) {
  ValidityReport report;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.signed_area(static_cast<int>(c)) <= area_floor) {
      report.inverted_cells.push_back(static_cast<int>(c));
    }
  }

  // Sweep over x-intervals of the G5 segments.
  struct Seg { int id; double xmin, xmax, ymin, ymax; };
  std::vector<Seg> segs;
  const auto& edges = mesh.boundary_edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].tag != BoundaryTag::g5) continue;
    const Vec2& a = mesh.vertex(edges[i].v[0]);
    const Vec2& b = mesh.vertex(edges[i].v[1]);
    segs.push_back({static_cast<int>(i), std::min(a.x(), b.x()), std::max(a.x(), b.x()),
                    std::min(a.y(), b.y()), std::max(a.y(), b.y())});
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& s, const Seg& t) {
    return s.xmin < t.xmin || (s.xmin == t.xmin && s.id < t.id);
  });
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size() && segs[j].xmin <= segs[i].xmax; ++j) {
      if (segs[j].ymin > segs[i].ymax || segs[j].ymax < segs[i].ymin) continue;
      const auto& e = edges[static_cast<std::size_t>(segs[i].id)];
      const auto& f = edges[static_cast<std::size_t>(segs[j].id)];
      int shared = -1;
      int p = -1;
      int q = -1;
      for (int u : e.v) {
        for (int w : f.v) {
          if (u == w) shared = u;
        }
      }
      bool hit = false;
      if (shared >= 0) {
        p = e.v[0] == shared ? e.v[1] : e.v[0];
        q = f.v[0] == shared ? f.v[1] : f.v[0];
        if (p == q) continue;
        const Vec2& s = mesh.vertex(shared);
        const Vec2& vp = mesh.vertex(p);
        const Vec2& vq = mesh.vertex(q);
        // Adjacent segments only overlap when folded back onto each other.
        hit = orientation(s, vp, vq) == 0 && (vp - s).dot(vq - s) > 0.0;
      } else {
        hit = segments_intersect(mesh.vertex(e.v[0]), mesh.vertex(e.v[1]), mesh.vertex(f.v[0]),
                                 mesh.vertex(f.v[1]));
      }
      if (hit) {
        report.crossing_edges.emplace_back(std::min(segs[i].id, segs[j].id),
                                           std::max(segs[i].id, segs[j].id));
      }
    }
  }
  std::sort(report.crossing_edges.begin(), report.crossing_edges.end());
  return report;
}

double default_area_floor(const TriMesh& reference) { return 1e-3 * reference.min_cell_area(); }

double boundary_length(const TriMesh& mesh, BoundaryTag tag) {
  if (!mesh.has_tag(tag)) throw MeshError("mesh has no boundary tagged " + to_string(tag));
  double len = 0.0;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag == tag) len += mesh.edge_length(e);
  }
  return len;
}

double domain_area(const TriMesh& mesh, Region region) {
  if (!mesh.has_region(region)) throw MeshError("mesh has no region " + to_string(region));
  double area = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cells()[c].region == region) area += mesh.signed_area(static_cast<int>(c));
  }
  return area;
}

TriMesh make_rectangle(int nx, int ny, double x0, double x1, double y0, double y1) {
  if (nx < 1 || ny < 1) throw MeshError("rectangle needs at least one cell per direction");
  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      verts.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Cell> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      cells.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, Region::omega});
      cells.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, Region::omega});
    }
  }
  std::vector<BoundaryEdge> edges;
  for (int i = 0; i < nx; ++i) {
    edges.push_back({{id(i, 0), id(i + 1, 0)}, BoundaryTag::g1});
    edges.push_back({{id(i + 1, ny), id(i, ny)}, BoundaryTag::g4});
  }
  for (int j = 0; j < ny; ++j) {
    edges.push_back({{id(0, j + 1), id(0, j)}, BoundaryTag::g2});
    edges.push_back({{id(nx, j), id(nx, j + 1)}, BoundaryTag::g3});
  }
  return TriMesh(std::move(verts), std::move(cells), std::move(edges));
}

}  // namespace coastopt
