#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "coastopt/mesh.hpp"
#include "support.hpp"

using namespace coastopt;
using coastopt::testing::fixture;

namespace {

// Unit square split along the diagonal, all four sides tagged.
const char* kTwoTriangles = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
5
1 1 "coast"
1 2 "left"
1 3 "right"
1 4 "sea"
2 5 "water"
$EndPhysicalNames
$Nodes
5
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
9 7 7 0
$EndNodes
$Elements
7
1 1 2 1 1 1 2
2 1 2 3 3 2 3
3 1 2 4 4 3 4
4 1 2 2 2 4 1
5 2 2 5 5 1 2 3
6 2 2 5 5 1 4 3
7 15 2 1 1 1
$EndElements
)";

PhysicalNameTable square_names() {
  return {{"coast", BoundaryTag::g1}, {"left", BoundaryTag::g2}, {"right", BoundaryTag::g3},
          {"sea", BoundaryTag::g4}, {"water", Region::omega}};
}

// Outward test: a point just across the edge from its cell lies outside it.
bool normal_points_away_from_cell(const TriMesh& m, const BoundaryEdge& e) {
  const auto& c = m.cell(e.cell).v;
  const Vec2 centroid = (m.vertex(c[0]) + m.vertex(c[1]) + m.vertex(c[2])) / 3.0;
  const Vec2 mid = 0.5 * (m.vertex(e.v[0]) + m.vertex(e.v[1]));
  return m.edge_normal(e).dot(mid - centroid) > 0.0;
}

}  // namespace

TEST_CASE("structured rectangle has the expected counts and measures") {
  const TriMesh m = make_rectangle(4, 3, 0.0, 2.0, -1.0, 0.5);
  CHECK(m.num_vertices() == 20);
  CHECK(m.num_cells() == 24);
  CHECK(m.boundary_edges().size() == 14);
  CHECK(m.num_edges() == 20 + 24 - 1);  // Euler: V - E + F = 1
  CHECK(domain_area(m, Region::omega) == doctest::Approx(3.0));
  CHECK(boundary_length(m, BoundaryTag::g1) == doctest::Approx(2.0));
  CHECK(boundary_length(m, BoundaryTag::g2) == doctest::Approx(1.5));
  CHECK(boundary_length(m, BoundaryTag::g4) == doctest::Approx(2.0));
  CHECK_FALSE(m.has_tag(BoundaryTag::g5));
  CHECK(m.min_cell_area() == doctest::Approx(0.125));
  CHECK_THROWS_AS(make_rectangle(0, 2, 0, 1, 0, 1), MeshError);
  CHECK_THROWS_AS(domain_area(m, Region::obstacle), MeshError);
}

TEST_CASE("boundary normals are unit and point out of the adjacent cell") {
  const TriMesh m = load_msh(fixture("basin_circle.msh"));
  for (const auto& e : m.boundary_edges()) {
    CHECK(m.edge_normal(e).norm() == doctest::Approx(1.0));
    CHECK(normal_points_away_from_cell(m, e));
  }
  // On the obstacle circle the normal points toward the center.
  const Vec2 center(2.5, -4.0);
  for (const auto& e : m.boundary_edges()) {
    if (e.tag != BoundaryTag::g5) continue;
    const Vec2 mid = 0.5 * (m.vertex(e.v[0]) + m.vertex(e.v[1]));
    CHECK(m.edge_normal(e).dot(center - mid) > 0.0);
  }
}

TEST_CASE("msh reader maps physical names, drops orphan nodes and skips points") {
  std::istringstream in(kTwoTriangles);
  const TriMesh m = read_msh(in, square_names());
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_cells() == 2);
  CHECK(m.boundary_edges().size() == 4);
  for (int c = 0; c < 2; ++c) CHECK(m.signed_area(c) == doctest::Approx(0.5));  // clockwise input reoriented
  CHECK(boundary_length(m, BoundaryTag::g3) == doctest::Approx(1.0));
}

TEST_CASE("msh reader accepts numeric physical ids through the name table") {
  std::string text = kTwoTriangles;
  PhysicalNameTable names{{"1", BoundaryTag::g1}, {"2", BoundaryTag::g2}, {"3", BoundaryTag::g3},
                          {"4", BoundaryTag::g4}, {"5", Region::omega}};
  // Strip the names block so only numeric ids remain.
  const auto a = text.find("$PhysicalNames");
  const auto b = text.find("$Nodes");
  text.erase(a, b - a);
  std::istringstream in(text);
  CHECK(read_msh(in, names).num_cells() == 2);
}

TEST_CASE("msh reader errors") {
  SUBCASE("unknown physical group") {
    std::istringstream in(kTwoTriangles);
    CHECK_THROWS_AS(read_msh(in), MeshError);
  }
  SUBCASE("untagged boundary edge") {
    std::string text = kTwoTriangles;
    text.replace(text.find("4 1 2 2 2 4 1"), 13, "4 15 2 1 1 1");
    std::istringstream in(text);
    CHECK_THROWS_AS(read_msh(in, square_names()), MeshError);
  }
  SUBCASE("wrong version") {
    std::string text = kTwoTriangles;
    text.replace(text.find("2.2 0 8"), 7, "4.1 0 8");
    std::istringstream in(text);
    CHECK_THROWS_AS(read_msh(in, square_names()), MeshError);
  }
  SUBCASE("truncated file") {
    std::string text = kTwoTriangles;
    text.resize(text.find("$Elements") + 12);
    std::istringstream in(text);
    CHECK_THROWS_AS(read_msh(in, square_names()), MeshError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_msh("/nonexistent/mesh.msh"), MeshError); }
}

TEST_CASE("topology errors") {
  const std::vector<Vec2> v{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}};
  SUBCASE("edge shared by three cells") {
    std::vector<Cell> cells{{{0, 1, 2}}, {{1, 3, 2}}, {{0, 4, 1}}};
    // A fourth triangle on edge 0-1 makes it non-manifold.
    cells.push_back({{1, 0, 3}});
    CHECK_THROWS_AS(TriMesh(v, cells, {}), MeshError);
  }
  SUBCASE("inverted cell") {
    CHECK_THROWS_AS(TriMesh(v, {{{0, 2, 1}}}, {}), MeshError);
  }
  SUBCASE("tag on an interior edge") {
    std::vector<Cell> cells{{{0, 1, 2}}, {{1, 3, 2}}};
    std::vector<BoundaryEdge> edges{{{0, 1}, BoundaryTag::g1}, {{1, 3}, BoundaryTag::g1},
                                    {{3, 2}, BoundaryTag::g1}, {{2, 0}, BoundaryTag::g1},
                                    {{1, 2}, BoundaryTag::g4}};
    CHECK_THROWS_AS(TriMesh(v, cells, edges), MeshError);
  }
  SUBCASE("conflicting tags") {
    std::vector<BoundaryEdge> edges{{{0, 1}, BoundaryTag::g1}, {{1, 2}, BoundaryTag::g1},
                                    {{2, 0}, BoundaryTag::g1}, {{1, 0}, BoundaryTag::g4}};
    CHECK_THROWS_AS(TriMesh(v, {{{0, 1, 2}}}, edges), MeshError);
  }
}

TEST_CASE("write then read preserves geometry and tags") {
  const TriMesh m = load_msh(fixture("basin_trans_1.msh"));
  std::stringstream ss;
  write_msh(ss, m);
  const TriMesh r = read_msh(ss);
  REQUIRE(r.num_vertices() == m.num_vertices());
  REQUIRE(r.num_cells() == m.num_cells());
  for (std::size_t i = 0; i < m.num_vertices(); ++i) CHECK(r.vertices()[i] == m.vertices()[i]);
  for (BoundaryTag t : kAllBoundaryTags) {
    CHECK(boundary_length(r, t) == doctest::Approx(boundary_length(m, t)).epsilon(1e-14));
  }
  CHECK(domain_area(r, Region::obstacle) == doctest::Approx(domain_area(m, Region::obstacle)));
}

TEST_CASE("periodic pairing on the basin fixture") {
  const TriMesh m = load_msh(fixture("basin_circle.msh"));
  const auto p = build_periodic_pairing(m, 1e-8);
  CHECK(p.pairs.size() == m.boundary_vertices(BoundaryTag::g2).size());
  CHECK(p.shift.x() == doctest::Approx(5.0));
  for (const auto& [a, b] : p.pairs) {
    CHECK((m.vertex(b) - m.vertex(a) - Vec2(5.0, 0.0)).norm() < 1e-8);
  }
  // Ordered along G2.
  for (std::size_t i = 1; i < p.pairs.size(); ++i) {
    CHECK(m.vertex(p.pairs[i].first).y() > m.vertex(p.pairs[i - 1].first).y());
  }
}

TEST_CASE("periodic pairing rejects mismatched sides") {
  TriMesh m = make_rectangle(3, 3, 0, 1, 0, 1);
  auto verts = m.vertices();
  // Move an interior G3 vertex off its partner's translate.
  for (int v : m.boundary_vertices(BoundaryTag::g3)) {
    if (verts[static_cast<std::size_t>(v)].y() > 0.1 && verts[static_cast<std::size_t>(v)].y() < 0.9) {
      verts[static_cast<std::size_t>(v)].y() += 0.05;
      break;
    }
  }
  CHECK_THROWS_AS(build_periodic_pairing(m.with_vertices(verts), 1e-6), MeshError);
  CHECK_NOTHROW(build_periodic_pairing(m.with_vertices(verts), 0.2));
}

TEST_CASE("displacement shares topology and bumps the generation") {
  const TriMesh m = make_rectangle(2, 2, 0, 1, 0, 1);
  NodalVectorField d(m.num_vertices(), Vec2(0.1, -0.2));
  const TriMesh moved = apply_displacement(m, d, 0.5);
  CHECK(moved.generation() != m.generation());
  CHECK(&moved.cells() == &m.cells());
  CHECK((moved.vertex(3) - m.vertex(3) - Vec2(0.05, -0.1)).norm() < 1e-15);
  CHECK_THROWS_AS(apply_displacement(m, NodalVectorField(3), 1.0), MeshError);
}

TEST_CASE("restricting to a region turns the interface into boundary") {
  const TriMesh m = load_msh(fixture("basin_trans_1.msh"));
  const TriMesh omega = m.restricted_to(Region::omega);
  CHECK_FALSE(omega.has_region(Region::obstacle));
  CHECK(boundary_length(omega, BoundaryTag::g5) == doctest::Approx(boundary_length(m, BoundaryTag::g5)));
  CHECK(domain_area(omega, Region::omega) == doctest::Approx(domain_area(m, Region::omega)));
  const TriMesh d = m.restricted_to(Region::obstacle);
  CHECK(d.has_tag(BoundaryTag::g5));
  CHECK_FALSE(d.has_tag(BoundaryTag::g1));
}

namespace {

// O(n^2) oracle via orientation predicates.
double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}
bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x(), r.x()) <= q.x() && q.x() <= std::max(p.x(), r.x()) &&
         std::min(p.y(), r.y()) <= q.y() && q.y() <= std::max(p.y(), r.y());
}
bool reference_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  return (d1 == 0 && on_segment(c, a, d)) || (d2 == 0 && on_segment(c, b, d)) ||
         (d3 == 0 && on_segment(a, c, b)) || (d4 == 0 && on_segment(a, d, b));
}

}  // namespace

TEST_CASE("segment intersection agrees with the orientation oracle") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> grid(0, 4);  // small integer grid hits degenerate cases
  for (int t = 0; t < 5000; ++t) {
    Vec2 p[4];
    for (auto& q : p) q = Vec2(grid(rng), grid(rng));
    CHECK(segments_intersect(p[0], p[1], p[2], p[3]) == reference_intersect(p[0], p[1], p[2], p[3]));
  }
}

TEST_CASE("validity check finds crossings and inverted cells") {
  const TriMesh m = load_msh(fixture("basin_circle.msh"));
  CHECK(check_shape_validity(m, 0.0).valid());
  CHECK(default_area_floor(m) == doctest::Approx(1e-3 * m.min_cell_area()));

  // Pull one G5 vertex through the obstacle to just outside the far side:
  // its edges now cut the opposite segments and its cells flip.
  auto verts = m.vertices();
  const int v = m.boundary_vertices(BoundaryTag::g5).front();
  const Vec2 center(2.5, -4.0);
  verts[static_cast<std::size_t>(v)] = center - 1.04 * (verts[static_cast<std::size_t>(v)] - center);
  const auto report = check_shape_validity(m.with_vertices(verts), 0.0);
  CHECK_FALSE(report.valid());
  CHECK_FALSE(report.crossing_edges.empty());

  // Pushing it far into the water flips the cells it passes over.
  verts = m.vertices();
  verts[static_cast<std::size_t>(v)] = center + 3.0 * (verts[static_cast<std::size_t>(v)] - center);
  const auto flipped = check_shape_validity(m.with_vertices(verts), 0.0);
  CHECK_FALSE(flipped.inverted_cells.empty());
  CHECK(flipped.crossing_edges.empty());
}

TEST_CASE("property: G5 crossings match an O(n^2) scan after random vertex jitter") {
  const TriMesh m = load_msh(fixture("basin_circle.msh"));
  std::vector<int> g5;
  for (std::size_t b = 0; b < m.boundary_edges().size(); ++b) {
    if (m.boundary_edges()[b].tag == BoundaryTag::g5) g5.push_back(static_cast<int>(b));
  }
  std::mt19937 rng(11);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto verts = m.vertices();
    for (int v : m.boundary_vertices(BoundaryTag::g5)) {
      verts[static_cast<std::size_t>(v)] += 0.03 * Vec2(n01(rng), n01(rng));
    }
    const TriMesh j = m.with_vertices(verts);
    std::size_t expected = 0;
    for (std::size_t x = 0; x < g5.size(); ++x) {
      for (std::size_t y = x + 1; y < g5.size(); ++y) {
        const auto& e = j.boundary_edges()[static_cast<std::size_t>(g5[x])];
        const auto& f = j.boundary_edges()[static_cast<std::size_t>(g5[y])];
        const bool share = e.v[0] == f.v[0] || e.v[0] == f.v[1] || e.v[1] == f.v[0] || e.v[1] == f.v[1];
        if (share) {
          // Adjacent edges only conflict when they fold back onto each other.
          const int s = e.v[0] == f.v[0] || e.v[0] == f.v[1] ? e.v[0] : e.v[1];
          const int p = e.v[0] == s ? e.v[1] : e.v[0];
          const int q = f.v[0] == s ? f.v[1] : f.v[0];
          const Vec2 a = j.vertex(p) - j.vertex(s), b = j.vertex(q) - j.vertex(s);
          if (std::abs(a.x() * b.y() - a.y() * b.x()) == 0.0 && a.dot(b) > 0.0) ++expected;
        } else if (reference_intersect(j.vertex(e.v[0]), j.vertex(e.v[1]), j.vertex(f.v[0]), j.vertex(f.v[1]))) {
          ++expected;
        }
      }
    }
    CHECK(check_shape_validity(j, -1e300).crossing_edges.size() == expected);
  }
}
