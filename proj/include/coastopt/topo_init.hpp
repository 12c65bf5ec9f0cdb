#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "coastopt/mesh.hpp"

namespace coastopt {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CandidateSelection {
  std::vector<int> vertices;  // selected vertex indices, in order of increasing value
  std::vector<Vec2> points;
  double threshold = 0.0;     // largest selected value
  bool degenerate = false;    // field constant over the eligible vertices
};

/// The ceil(q n) eligible vertices with the most negative field values
/// (ties broken by vertex index). Eligible: farther than `margin` from every
/// boundary edge.
CandidateSelection select_candidates(const TriMesh& mesh, const std::vector<double>& field,
                                     double q, double margin);

struct ClusterResult {
  std::vector<int> labels;  // -1 noise, else cluster id
  int num_clusters = 0;
  double eps = 0.0;
  int min_points = 1;
};

/// DBSCAN over `points` in the given order. Neighborhoods are closed balls
/// (distance <= eps) and include the point itself. Cluster ids follow the
/// index of each cluster's first core point; a border point reachable from
/// several clusters joins the first one that reaches it.
ClusterResult dbscan(const std::vector<Vec2>& points, double eps, int min_points);

/// Counter-clockwise convex hull without collinear vertices. Throws
/// GeometryError for fewer than 3 non-collinear points.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// Outward mitered offset of a counter-clockwise convex polygon.
std::vector<Vec2> offset_polygon(const std::vector<Vec2>& polygon, double pad);

/// Hull of each cluster, dilated by pad.
std::vector<std::vector<Vec2>> cluster_hulls(const std::vector<Vec2>& points,
                                             const ClusterResult& clusters, double pad);

/// GMSH .geo text: the mesh's outer boundary (G1..G4 curves, periodic G2/G3
/// pairs) with one hole per polygon tagged G5, plane surface OMEGA.
std::string obstacle_geometry(const TriMesh& mesh, const std::vector<std::vector<Vec2>>& holes,
                              double obstacle_size);

}  // namespace coastopt
