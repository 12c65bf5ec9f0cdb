#include "coastopt/topo_init.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "coastopt/state.hpp"

namespace coastopt {

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

CandidateSelection select_candidates(const TriMesh& mesh, const std::vector<double>& field,
                                     double q, double margin) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile must lie in (0, 1)");
  if (field.size() != mesh.num_vertices()) throw std::invalid_argument("field size mismatch");
  std::vector<int> eligible;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const Vec2& p = mesh.vertex(static_cast<int>(i));
    bool ok = true;
    if (margin > 0.0) {
      for (const auto& e : mesh.boundary_edges()) {
        if (point_segment_distance(p, mesh.vertex(e.v[0]), mesh.vertex(e.v[1])) <= margin) {
          ok = false;
          break;
        }
      }
    }
    if (ok) eligible.push_back(static_cast<int>(i));
  }
  if (eligible.empty()) throw GeometryError("no vertex lies farther than the margin from the boundary");

  std::stable_sort(eligible.begin(), eligible.end(), [&](int a, int b) {
    return field[static_cast<std::size_t>(a)] < field[static_cast<std::size_t>(b)];
  });
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(q * static_cast<double>(eligible.size()))));
  CandidateSelection out;
  out.vertices.assign(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(n));
  out.threshold = field[static_cast<std::size_t>(out.vertices.back())];
  out.degenerate = field[static_cast<std::size_t>(eligible.front())] ==
                   field[static_cast<std::size_t>(eligible.back())];
  for (int v : out.vertices) out.points.push_back(mesh.vertex(v));
  return out;
}

ClusterResult dbscan(const std::vector<Vec2>& points, double eps, int min_points) {
  if (!(eps > 0.0)) throw std::invalid_argument("DBSCAN radius must be positive");
  if (min_points < 1) throw std::invalid_argument("DBSCAN min_points must be at least 1");
  ClusterResult out;
  out.eps = eps;
  out.min_points = min_points;
  const std::size_t n = points.size();
  out.labels.assign(n, -1);
  if (n == 0) return out;

  // Uniform grid with cell size eps.
  auto cell_of = [eps](const Vec2& p) {
    return std::pair<std::int64_t, std::int64_t>(static_cast<std::int64_t>(std::floor(p.x() / eps)),
                                                 static_cast<std::int64_t>(std::floor(p.y() / eps)));
  };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> grid;
  for (std::size_t i = 0; i < n; ++i) grid[cell_of(points[i])].push_back(static_cast<int>(i));
  const double eps2 = eps * eps;
  auto neighbors = [&](int i) {
    std::vector<int> out_n;
    const auto [cx, cy] = cell_of(points[static_cast<std::size_t>(i)]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (int j : it->second) {
          if ((points[static_cast<std::size_t>(j)] - points[static_cast<std::size_t>(i)]).squaredNorm() <= eps2) {
            out_n.push_back(j);
          }
        }
      }
    }
    std::sort(out_n.begin(), out_n.end());
    return out_n;
  };

  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    const auto nb = neighbors(static_cast<int>(i));
    if (static_cast<int>(nb.size()) < min_points) {
      label[i] = -1;
      continue;
    }
    label[i] = cluster;
    std::vector<int> queue(nb.begin(), nb.end());
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const auto j = static_cast<std::size_t>(queue[h]);
      if (label[j] == -1) label[j] = cluster;  // noise becomes border
      if (label[j] != kUnvisited) continue;
      label[j] = cluster;
      const auto nj = neighbors(static_cast<int>(j));
      if (static_cast<int>(nj.size()) >= min_points) queue.insert(queue.end(), nj.begin(), nj.end());
    }
    ++cluster;
  }
  out.labels = std::move(label);
  out.num_clusters = cluster;
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw GeometryError("cluster has fewer than 3 distinct points");
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw GeometryError("cluster points are collinear");
  return hull;
}

std::vector<Vec2> offset_polygon(const std::vector<Vec2>& poly, double pad) {
  if (pad == 0.0) return poly;
  const std::size_t n = poly.size();
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 t_prev = (poly[i] - poly[(i + n - 1) % n]).normalized();
    const Vec2 t_next = (poly[(i + 1) % n] - poly[i]).normalized();
    const Vec2 n_prev(t_prev.y(), -t_prev.x());
    const Vec2 n_next(t_next.y(), -t_next.x());
    out[i] = poly[i] + pad * (n_prev + n_next) / (1.0 + n_prev.dot(n_next));
  }
  return out;
}

std::vector<std::vector<Vec2>> cluster_hulls(const std::vector<Vec2>& points,
                                             const ClusterResult& clusters, double pad) {
  std::vector<std::vector<Vec2>> members(static_cast<std::size_t>(clusters.num_clusters));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int l = clusters.labels[i];
    if (l >= 0) members[static_cast<std::size_t>(l)].push_back(points[i]);
  }
  std::vector<std::vector<Vec2>> out;
  for (auto& m : members) out.push_back(offset_polygon(convex_hull(m), pad));
  return out;
}

std::string obstacle_geometry(const TriMesh& mesh, const std::vector<std::vector<Vec2>>& holes,
                              double obstacle_size) {
  if (holes.empty()) throw GeometryError("no obstacle outline to emit");
  std::ostringstream out;
  const auto& edges = mesh.boundary_edges();

  // Points: boundary vertices with a size from their adjacent edges.
  std::map<int, int> point_id;
  std::map<int, std::pair<double, int>> size_acc;
  for (const auto& e : edges) {
    const double len = mesh.edge_length(e);
    for (int v : e.v) {
      auto& acc = size_acc[v];
      acc.first += len;
      acc.second += 1;
    }
  }
  int next_point = 1;
  out << "// Obstacle initialization geometry. Mesh with: gmsh -2 -format msh22\n";
  for (const auto& [v, acc] : size_acc) {
    point_id[v] = next_point;
    const Vec2& p = mesh.vertex(v);
    out << "Point(" << next_point++ << ") = {" << fmt(p.x()) << ", " << fmt(p.y()) << ", 0, "
        << fmt(acc.first / acc.second) << "};\n";
  }

  // Line orientation: G2 lines follow their G3 partners so the periodic
  // translation maps start to start.
  std::vector<std::array<int, 2>> line_def(edges.size());
  for (std::size_t b = 0; b < edges.size(); ++b) line_def[b] = edges[b].v;
  std::vector<std::pair<int, int>> periodic_lines;  // (G3 edge, G2 edge)
  Vec2 shift = Vec2::Zero();
  if (mesh.has_tag(BoundaryTag::g2) && mesh.has_tag(BoundaryTag::g3)) {
    const auto pairing = build_periodic_pairing(mesh, default_periodic_tolerance(mesh) * 10.0);
    shift = pairing.shift;
    std::unordered_map<int, int> to_g2;
    for (const auto& [a, b] : pairing.pairs) to_g2[b] = a;
    std::map<std::pair<int, int>, int> g2_edges;
    for (std::size_t b = 0; b < edges.size(); ++b) {
      if (edges[b].tag == BoundaryTag::g2) {
        g2_edges[{std::min(edges[b].v[0], edges[b].v[1]), std::max(edges[b].v[0], edges[b].v[1])}] =
            static_cast<int>(b);
      }
    }
    for (std::size_t b = 0; b < edges.size(); ++b) {
      if (edges[b].tag != BoundaryTag::g3) continue;
      const int a2 = to_g2.at(edges[b].v[0]);
      const int b2 = to_g2.at(edges[b].v[1]);
      const int partner = g2_edges.at({std::min(a2, b2), std::max(a2, b2)});
      line_def[static_cast<std::size_t>(partner)] = {a2, b2};
      periodic_lines.emplace_back(static_cast<int>(b), partner);
    }
  }
  std::map<BoundaryTag, std::vector<int>> physical;
  for (std::size_t b = 0; b < edges.size(); ++b) {
    out << "Line(" << b + 1 << ") = {" << point_id.at(line_def[b][0]) << ", "
        << point_id.at(line_def[b][1]) << "};\n";
    physical[edges[b].tag].push_back(static_cast<int>(b) + 1);
  }

  // Chain boundary edges into loops; the loop of largest area is the outer one.
  std::unordered_map<int, int> outgoing;
  for (std::size_t b = 0; b < edges.size(); ++b) outgoing[edges[b].v[0]] = static_cast<int>(b);
  std::vector<char> used(edges.size(), 0);
  std::vector<std::vector<int>> loops;
  std::vector<double> loop_area;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> loop;
    double area = 0.0;
    int b = static_cast<int>(start);
    while (!used[static_cast<std::size_t>(b)]) {
      used[static_cast<std::size_t>(b)] = 1;
      const auto& e = edges[static_cast<std::size_t>(b)];
      const bool forward = line_def[static_cast<std::size_t>(b)] == e.v;
      loop.push_back(forward ? b + 1 : -(b + 1));
      const Vec2& p = mesh.vertex(e.v[0]);
      const Vec2& q = mesh.vertex(e.v[1]);
      area += 0.5 * (p.x() * q.y() - q.x() * p.y());
      auto it = outgoing.find(e.v[1]);
      if (it == outgoing.end()) throw GeometryError("mesh boundary is not closed");
      b = it->second;
    }
    loops.push_back(std::move(loop));
    loop_area.push_back(area);
  }
  const auto outer = static_cast<std::size_t>(
      std::max_element(loop_area.begin(), loop_area.end()) - loop_area.begin());
  std::vector<std::size_t> order{outer};
  for (std::size_t i = 0; i < loops.size(); ++i) {
    if (i != outer) order.push_back(i);
  }
  int next_loop = 1;
  std::vector<int> surface_loops;
  for (std::size_t i : order) {
    out << "Curve Loop(" << next_loop << ") = {";
    for (std::size_t j = 0; j < loops[i].size(); ++j) out << (j ? ", " : "") << loops[i][j];
    out << "};\n";
    surface_loops.push_back(next_loop++);
  }

  // Obstacle holes.
  int next_line = static_cast<int>(edges.size()) + 1;
  std::vector<int> g5;
  for (const auto& poly : holes) {
    const int first_point = next_point;
    for (const auto& p : poly) {
      out << "Point(" << next_point++ << ") = {" << fmt(p.x()) << ", " << fmt(p.y()) << ", 0, "
          << fmt(obstacle_size) << "};\n";
    }
    std::vector<int> lines;
    const int np = static_cast<int>(poly.size());
    for (int i = 0; i < np; ++i) {
      out << "Line(" << next_line << ") = {" << first_point + i << ", "
          << first_point + (i + 1) % np << "};\n";
      lines.push_back(next_line);
      g5.push_back(next_line++);
    }
    out << "Curve Loop(" << next_loop << ") = {";
    for (std::size_t j = 0; j < lines.size(); ++j) out << (j ? ", " : "") << lines[j];
    out << "};\n";
    surface_loops.push_back(next_loop++);
  }
  out << "Plane Surface(1) = {";
  for (std::size_t j = 0; j < surface_loops.size(); ++j) out << (j ? ", " : "") << surface_loops[j];
  out << "};\n";
  for (const auto& [g3, g2] : periodic_lines) {
    out << "Periodic Curve {" << g3 + 1 << "} = {" << g2 + 1 << "} Translate {" << fmt(shift.x())
        << ", " << fmt(shift.y()) << ", 0};\n";
  }
  physical[BoundaryTag::g5] = g5;
  for (const auto& [tag, lines] : physical) {
    out << "Physical Curve(\"" << to_string(tag) << "\") = {";
    for (std::size_t j = 0; j < lines.size(); ++j) out << (j ? ", " : "") << lines[j];
    out << "};\n";
  }
  out << "Physical Surface(\"OMEGA\") = {1};\n";
  return out.str();
}

}  // namespace coastopt
