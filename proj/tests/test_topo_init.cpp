#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "coastopt/topo_init.hpp"
#include "support.hpp"

using namespace coastopt;
using coastopt::testing::fixture;

namespace {

// Order-independent characterization of the clustering: core points from
// brute-force neighbor counts, clusters as connected components of the core
// graph numbered by their smallest core index, border points joining the
// lowest-numbered adjacent cluster.
std::vector<int> dbscan_oracle(const std::vector<Vec2>& p, double eps, int m) {
  const std::size_t n = p.size();
  auto near = [&](std::size_t i, std::size_t j) { return (p[i] - p[j]).squaredNorm() <= eps * eps; };
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int c = 0;
    for (std::size_t j = 0; j < n; ++j) c += near(i, j);
    core[i] = c >= m;
  }
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || comp[i] >= 0) continue;
    std::vector<std::size_t> stack{i};
    comp[i] = next;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n; ++b) {
        if (core[b] && comp[b] < 0 && near(a, b)) {
          comp[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<int> label(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      label[i] = comp[i];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && near(i, j) && (label[i] < 0 || comp[j] < label[i])) label[i] = comp[j];
    }
  }
  return label;
}

std::vector<Vec2> random_blobs(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 0.04);
  std::vector<Vec2> centers(1 + rng() % 4);
  for (auto& c : centers) c = Vec2(u(rng), u(rng));
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    if (u(rng) < 0.2) {
      pts.emplace_back(u(rng), u(rng));
    } else {
      const Vec2& c = centers[rng() % centers.size()];
      pts.emplace_back(c.x() + g(rng), c.y() + g(rng));
    }
  }
  return pts;
}

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

}  // namespace

TEST_CASE("DBSCAN matches a brute-force characterization") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 300);
    const auto pts = random_blobs(rng, n);
    const double eps = 0.01 + 0.05 * (rng() % 100) / 100.0;
    const int m = 1 + static_cast<int>(rng() % 12);
    const auto r = dbscan(pts, eps, m);
    const auto expect = dbscan_oracle(pts, eps, m);
    REQUIRE(r.labels == expect);
    CHECK(r.num_clusters == (expect.empty() ? 0 : *std::max_element(expect.begin(), expect.end()) + 1));
  }
}

TEST_CASE("DBSCAN edge cases") {
  CHECK(dbscan({}, 1.0, 3).num_clusters == 0);
  // Distance exactly eps is a neighbor.
  const std::vector<Vec2> line{{0, 0}, {1, 0}, {2, 0}};
  CHECK(dbscan(line, 1.0, 3).labels == std::vector<int>{0, 0, 0});
  CHECK(dbscan(line, 0.99, 2).labels == std::vector<int>{-1, -1, -1});
  // m = 1: every point is core; isolated points form singleton clusters.
  CHECK(dbscan(line, 0.5, 1).num_clusters == 3);
  // Duplicates count separately.
  CHECK(dbscan({{0, 0}, {0, 0}, {0, 0}}, 1e-9, 3).num_clusters == 1);
  // Negative coordinates land in the right grid cells.
  const std::vector<Vec2> neg{{-0.05, -0.05}, {0.04, 0.04}, {-0.05, 0.04}};
  CHECK(dbscan(neg, 0.15, 3).labels == std::vector<int>{0, 0, 0});
  CHECK_THROWS_AS(dbscan(line, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(dbscan(line, 1.0, 0), std::invalid_argument);
}

TEST_CASE("convex hull and offset") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<Vec2> pts(3 + rng() % 50);
    for (auto& p : pts) p = Vec2(u(rng), u(rng));
    const auto hull = convex_hull(pts);
    const std::size_t h = hull.size();
    for (std::size_t i = 0; i < h; ++i) {
      CHECK(cross(hull[i], hull[(i + 1) % h], hull[(i + 2) % h]) > 0.0);
      CHECK(std::find(pts.begin(), pts.end(), hull[i]) != pts.end());
      for (const auto& p : pts) CHECK(cross(hull[i], hull[(i + 1) % h], p) >= -1e-12);
    }
    const double pad = 0.07;
    const auto off = offset_polygon(hull, pad);
    REQUIRE(off.size() == h);
    for (std::size_t i = 0; i < h; ++i) {
      const Vec2 d = (hull[(i + 1) % h] - hull[i]).normalized();
      const Vec2 out(d.y(), -d.x());
      // Both ends of each offset edge sit pad outside the original edge line.
      CHECK((off[i] - hull[i]).dot(out) == doctest::Approx(pad));
      CHECK((off[(i + 1) % h] - hull[i]).dot(out) == doctest::Approx(pad));
    }
  }
  // Collinear points are dropped from the hull.
  const auto sq = convex_hull({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  CHECK(sq.size() == 4);
  CHECK(offset_polygon(sq, 0.0) == sq);
  CHECK_THROWS_AS(convex_hull({{0, 0}, {1, 1}}), GeometryError);
  CHECK_THROWS_AS(convex_hull({{0, 0}, {1, 1}, {2, 2}, {0, 0}}), GeometryError);
}

TEST_CASE("candidate selection") {
  const TriMesh m = make_rectangle(10, 10, 0.0, 1.0, 0.0, 1.0);
  std::vector<double> field(m.num_vertices());
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = m.vertices()[i].x() + 0.1 * m.vertices()[i].y();
  SUBCASE("quantile of eligible vertices") {
    const auto s = select_candidates(m, field, 0.1, 0.15);
    // Interior 7x7 block of vertices lies farther than 0.15 from the boundary.
    CHECK(s.vertices.size() == 5);
    for (int v : s.vertices) {
      CHECK(m.vertex(v).x() == doctest::Approx(0.2));
      CHECK(m.vertex(v).y() > 0.15);
    }
    CHECK(std::is_sorted(s.vertices.begin(), s.vertices.end(),
                         [&](int a, int b) { return field[static_cast<std::size_t>(a)] < field[static_cast<std::size_t>(b)]; }));
    CHECK(s.threshold == field[static_cast<std::size_t>(s.vertices.back())]);
    CHECK_FALSE(s.degenerate);
  }
  SUBCASE("constant field is flagged and ties go by index") {
    std::fill(field.begin(), field.end(), 1.0);
    const auto s = select_candidates(m, field, 0.5, 0.0);
    CHECK(s.degenerate);
    CHECK(std::is_sorted(s.vertices.begin(), s.vertices.end()));
    CHECK(s.vertices.size() == 61);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(select_candidates(m, field, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(select_candidates(m, field, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(select_candidates(m, std::vector<double>(3), 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(select_candidates(m, field, 0.1, 0.6), GeometryError);
  }
}

TEST_CASE("obstacle geometry is a closed, consistently numbered outline") {
  const TriMesh m = load_msh(fixture("basin_free.msh"));
  const std::vector<std::vector<Vec2>> holes{{{2.0, -4.0}, {3.0, -4.0}, {3.0, -3.5}, {2.0, -3.5}},
                                             {{1.0, -2.0}, {1.4, -2.0}, {1.2, -1.7}}};
  const std::string geo = obstacle_geometry(m, holes, 0.02);

  std::map<int, std::array<int, 2>> lines;
  std::map<int, int> line_use;
  std::vector<std::vector<int>> loops;
  const std::regex line_re(R"(^Line\((\d+)\) = \{(\d+), (\d+)\};)");
  const std::regex loop_re(R"(^Curve Loop\((\d+)\) = \{([^}]*)\};)");
  std::istringstream in(geo);
  std::string row;
  int periodic = 0;
  while (std::getline(in, row)) {
    std::smatch sm;
    if (std::regex_search(row, sm, line_re)) {
      lines[std::stoi(sm[1])] = {std::stoi(sm[2]), std::stoi(sm[3])};
    } else if (std::regex_search(row, sm, loop_re)) {
      std::vector<int> ids;
      std::istringstream items(sm[2].str());
      std::string tok;
      while (std::getline(items, tok, ',')) ids.push_back(std::stoi(tok));
      loops.push_back(ids);
    } else if (row.rfind("Periodic Curve", 0) == 0) {
      ++periodic;
    }
  }
  REQUIRE(loops.size() == 3);  // outer boundary and two holes
  CHECK(loops[1].size() == 4);
  CHECK(loops[2].size() == 3);
  for (const auto& loop : loops) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      auto ends = [&](int id) {
        const auto& l = lines.at(std::abs(id));
        return id > 0 ? l : std::array<int, 2>{l[1], l[0]};
      };
      CHECK(ends(loop[i])[1] == ends(loop[(i + 1) % loop.size()])[0]);
      ++line_use[std::abs(loop[i])];
    }
  }
  CHECK(line_use.size() == lines.size());
  for (const auto& [id, n] : line_use) CHECK(n == 1);
  CHECK(periodic == static_cast<int>(m.boundary_vertices(BoundaryTag::g2).size()) - 1);
  CHECK(geo.find("Physical Curve(\"G5\")") != std::string::npos);
  CHECK(geo.find("Physical Surface(\"OMEGA\") = {1};") != std::string::npos);
  CHECK_THROWS_AS(obstacle_geometry(m, {}, 0.02), GeometryError);
}
