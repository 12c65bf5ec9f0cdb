#include "coastopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

namespace coastopt {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

std::string vtk_string(const TriMesh& mesh, const VtkPointData& data) {
  std::ostringstream out;
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nc = mesh.num_cells();
  out << "# vtk DataFile Version 3.0\ncoastopt\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices()) out << num(p.x()) << " " << num(p.y()) << " 0\n";
  out << "CELLS " << nc << " " << 4 * nc << "\n";
  for (const auto& c : mesh.cells()) out << "3 " << c.v[0] << " " << c.v[1] << " " << c.v[2] << "\n";
  out << "CELL_TYPES " << nc << "\n";
  for (std::size_t c = 0; c < nc; ++c) out << "5\n";
  out << "CELL_DATA " << nc << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : mesh.cells()) out << (c.region == Region::omega ? 0 : 1) << "\n";
  if (!data.scalars.empty() || !data.vectors.empty()) out << "POINT_DATA " << nv << "\n";
  for (const auto& [name, values] : data.scalars) {
    if (values.size() < nv) throw IoError("point field " + name + " is too short");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < nv; ++i) out << num(values[i]) << "\n";
  }
  for (const auto& [name, values] : data.vectors) {
    if (values.size() < nv) throw IoError("vector field " + name + " is too short");
    out << "VECTORS " << name << " double\n";
    for (std::size_t i = 0; i < nv; ++i) out << num(values[i].x()) << " " << num(values[i].y()) << " 0\n";
  }
  return out.str();
}

VtkPointData complex_point_data(const TriMesh& mesh, const ComplexNodalField& field,
                                const std::string& prefix) {
  const std::size_t nv = mesh.num_vertices();
  if (field.size() < nv) throw IoError("field is shorter than the vertex count");
  VtkPointData d;
  auto& re = d.scalars[prefix + "_re"];
  auto& im = d.scalars[prefix + "_im"];
  auto& ab = d.scalars[prefix + "_abs"];
  for (std::size_t i = 0; i < nv; ++i) {
    re.push_back(field.re[static_cast<Eigen::Index>(i)]);
    im.push_back(field.im[static_cast<Eigen::Index>(i)]);
    ab.push_back(std::abs(field[i]));
  }
  return d;
}

std::string coast_trace_csv(const TriMesh& mesh, const ComplexNodalField& field) {
  std::ostringstream out;
  out << "s,x,y,re,im,abs\n";
  const auto& edges = mesh.boundary_edges();
  std::unordered_map<int, int> outgoing;
  std::unordered_map<int, int> incoming;
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != BoundaryTag::g1) continue;
    outgoing[edges[b].v[0]] = static_cast<int>(b);
    incoming[edges[b].v[1]] = static_cast<int>(b);
  }
  std::vector<char> used(edges.size(), 0);
  double s = 0.0;
  auto row = [&](int v) {
    const Vec2& p = mesh.vertex(v);
    const auto val = field[static_cast<std::size_t>(v)];
    out << num(s) << "," << num(p.x()) << "," << num(p.y()) << "," << num(val.real()) << ","
        << num(val.imag()) << "," << num(std::abs(val)) << "\n";
  };
  for (std::size_t b0 = 0; b0 < edges.size(); ++b0) {
    if (edges[b0].tag != BoundaryTag::g1 || used[b0]) continue;
    // Walk back to the start of an open chain (closed chains start anywhere).
    int b = static_cast<int>(b0);
    for (std::size_t guard = 0; guard < edges.size(); ++guard) {
      auto it = incoming.find(edges[static_cast<std::size_t>(b)].v[0]);
      if (it == incoming.end() || it->second == static_cast<int>(b0)) break;
      b = it->second;
    }
    row(edges[static_cast<std::size_t>(b)].v[0]);
    while (b >= 0 && !used[static_cast<std::size_t>(b)]) {
      used[static_cast<std::size_t>(b)] = 1;
      const auto& e = edges[static_cast<std::size_t>(b)];
      s += mesh.edge_length(e);
      row(e.v[1]);
      auto it = outgoing.find(e.v[1]);
      b = it == outgoing.end() ? -1 : it->second;
    }
  }
  return out.str();
}

std::string history_csv(const RunHistory& history) {
  std::ostringstream out;
  out << "iteration,objective,tracking,volume,perimeter,gradient_norm,step,trials,invalid_trials,valid,wall_time\n";
  for (const auto& r : history.records) {
    out << r.iteration << "," << num(r.value.total()) << "," << num(r.value.tracking) << ","
        << num(r.value.volume) << "," << num(r.value.perimeter) << "," << num(r.gradient_norm) << ","
        << num(r.step) << "," << r.trials << "," << r.invalid_trials << "," << (r.valid ? 1 : 0) << "," << short_num(r.wall_time)
        << "\n";
  }
  return out.str();
}

std::string clusters_csv(const std::vector<Vec2>& points, const ClusterResult& clusters) {
  std::ostringstream out;
  out << "x,y,label\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << num(points[i].x()) << "," << num(points[i].y()) << "," << clusters.labels.at(i) << "\n";
  }
  return out.str();
}

std::string objective_svg(const RunHistory& history) {
  const double w = 640, h = 400, ml = 80, mr = 20, mt = 30, mb = 50;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">Objective</text>\n";
  const auto& rec = history.records;
  if (!rec.empty()) {
    double lo = rec.front().value.total();
    double hi = lo;
    for (const auto& r : rec) {
      lo = std::min(lo, r.value.total());
      hi = std::max(hi, r.value.total());
    }
    if (hi == lo) {
      hi += 0.5 * std::max(1e-12, std::abs(hi));
      lo -= 0.5 * std::max(1e-12, std::abs(lo));
    }
    const double n = std::max<double>(1.0, static_cast<double>(rec.back().iteration));
    auto px = [&](double it) { return ml + (w - ml - mr) * it / n; };
    auto py = [&](double v) { return mt + (h - mt - mb) * (hi - v) / (hi - lo); };
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rec) out << short_num(px(r.iteration)) << "," << short_num(py(r.value.total())) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << ml - 5 << "\" y=\"" << mt + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << short_num(hi) << "</text>\n";
    out << "<text x=\"" << ml - 5 << "\" y=\"" << h - mb << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << short_num(lo) << "</text>\n";
    out << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 18 << "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"11\">" << rec.back().iteration << "</text>\n";
    out << "<text x=\"" << (w + ml) / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"12\">iteration</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string msh_string(const TriMesh& mesh) {
  std::ostringstream out;
  write_msh(out, mesh);
  return out.str();
}

}  // namespace coastopt
