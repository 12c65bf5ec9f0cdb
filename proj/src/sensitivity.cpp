#include "coastopt/sensitivity.hpp"

#include <stdexcept>

namespace coastopt {

namespace {

void check_pairs(std::span<const StateSolution> states, std::span<const AdjointSolution> adjoints) {
  if (states.size() != adjoints.size()) {
    throw std::invalid_argument("state/adjoint count mismatch");
  }
  if (states.empty()) throw std::invalid_argument("no state/adjoint pairs");
  const std::uint64_t gen = states.front().mesh().generation();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].mesh().generation() != gen || states[i].u.mesh_generation != gen ||
        adjoints[i].v.mesh_generation != gen || adjoints[i].v.size() != states[i].u.size()) {
      throw std::invalid_argument("state/adjoint fields belong to different meshes");
    }
  }
}

std::array<Vec2, 3> cell_gradients(const TriMesh& mesh, int c) {
  const auto& v = mesh.cell(c).v;
  return element::barycentric_gradients(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]));
}

}  // namespace

std::vector<char> shape_support(const TriMesh& mesh, SupportMode mode) {
  std::vector<char> mask(mesh.num_vertices(), 0);
  if (mode == SupportMode::all_free) {
    std::fill(mask.begin(), mask.end(), 1);
  } else {
    for (int v : mesh.boundary_vertices(BoundaryTag::g5)) mask[static_cast<std::size_t>(v)] = 1;
    for (int layer = 0; layer < 2; ++layer) {
      std::vector<char> next = mask;
      for (const auto& c : mesh.cells()) {
        if (mask[static_cast<std::size_t>(c.v[0])] || mask[static_cast<std::size_t>(c.v[1])] ||
            mask[static_cast<std::size_t>(c.v[2])]) {
          for (int v : c.v) next[static_cast<std::size_t>(v)] = 1;
        }
      }
      mask.swap(next);
    }
  }
  const auto fixed = mesh.vertex_on_tags(kOuterBoundaryTags);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (fixed[i]) mask[i] = 0;
  }
  return mask;
}

double apply_functional(const Eigen::VectorXd& rhs, const NodalVectorField& v) {
  if (static_cast<std::size_t>(rhs.size()) != 2 * v.size()) {
    throw std::invalid_argument("vector field size does not match the functional");
  }
  return rhs.dot(flatten(v));
}

Eigen::VectorXd flatten(const NodalVectorField& v) {
  Eigen::VectorXd x(2 * static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[2 * static_cast<Eigen::Index>(i)] = v[i].x();
    x[2 * static_cast<Eigen::Index>(i) + 1] = v[i].y();
  }
  return x;
}

NodalVectorField unflatten(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("flat vector field needs an even length");
  NodalVectorField v(static_cast<std::size_t>(x.size() / 2));
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = Vec2(x[2 * static_cast<Eigen::Index>(i)], x[2 * static_cast<Eigen::Index>(i) + 1]);
  }
  return v;
}

Eigen::VectorXd volume_shape_derivative(std::span<const StateSolution> states,
                                        std::span<const AdjointSolution> adjoints,
                                        const std::vector<char>& support) {
  check_pairs(states, adjoints);
  const auto& space = states.front().space();
  const auto& mesh = space.mesh();
  if (support.size() != mesh.num_vertices()) throw std::invalid_argument("support mask size mismatch");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(mesh.num_vertices()));
  const auto& rule = element::triangle_rule(space.order());
  const int nd = space.dofs_per_cell();

  std::vector<Eigen::VectorXcd> us;
  std::vector<Eigen::VectorXcd> vs;
  for (std::size_t p = 0; p < states.size(); ++p) {
    us.push_back(states[p].u.values());
    vs.push_back(adjoints[p].v.values());
  }

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells()[c];
    if (!support[static_cast<std::size_t>(cell.v[0])] && !support[static_cast<std::size_t>(cell.v[1])] &&
        !support[static_cast<std::size_t>(cell.v[2])]) {
      continue;
    }
    const double area = mesh.signed_area(static_cast<int>(c));
    const auto g = cell_gradients(mesh, static_cast<int>(c));
    const auto dofs = space.cell_dofs(static_cast<int>(c));
    Complex s = 0.0;
    Eigen::Matrix2cd q = Eigen::Matrix2cd::Zero();  // q(i,j) = int d_i u conj(d_j v)
    for (std::size_t p = 0; p < states.size(); ++p) {
      const double phi = states[p].phi(cell.region);
      const double k2 = states[p].wave.k * states[p].wave.k;
      for (std::size_t r = 0; r < rule.weights.size(); ++r) {
        const auto val = element::shape_values(space.order(), rule.points[r]);
        const auto grad = element::shape_gradients(space.order(), rule.points[r], g);
        Complex u = 0.0;
        Complex v = 0.0;
        Eigen::Vector2cd du = Eigen::Vector2cd::Zero();
        Eigen::Vector2cd dv = Eigen::Vector2cd::Zero();
        for (int i = 0; i < nd; ++i) {
          const auto d = static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)]);
          u += val[static_cast<std::size_t>(i)] * us[p][d];
          v += val[static_cast<std::size_t>(i)] * vs[p][d];
          du += us[p][d] * grad[static_cast<std::size_t>(i)].cast<Complex>();
          dv += vs[p][d] * grad[static_cast<std::size_t>(i)].cast<Complex>();
        }
        const double w = rule.weights[r] * area * phi;
        const Eigen::Vector2cd dvc = dv.conjugate();
        s += w * (dv.dot(du) - k2 * u * std::conj(v));  // dv.dot(du) = du . conj(dv)
        q += w * du * dvc.transpose();
      }
    }
    for (int a = 0; a < 3; ++a) {
      const int vert = cell.v[static_cast<std::size_t>(a)];
      if (!support[static_cast<std::size_t>(vert)]) continue;
      const Eigen::Vector2cd ga = g[static_cast<std::size_t>(a)].cast<Complex>();
      const Eigen::Vector2cd qt = q.transpose() * ga;
      const Eigen::Vector2cd qg = q * ga;
      for (int comp = 0; comp < 2; ++comp) {
        const Complex val = s * ga[comp] - qt[comp] - qg[comp];
        rhs[2 * vert + comp] += val.real();
      }
    }
  }

  // Robin term on a moving G5 (partially reflecting scatterer).
  const auto& edges = mesh.boundary_edges();
  const auto& line = element::gauss_line(3);
  const int nloc = space.order() == 1 ? 2 : 3;
  for (std::size_t p = 0; p < states.size(); ++p) {
    if (states[p].regime != Regime::scatterer) continue;
    const Complex cr = robin_coefficient(states[p].wave.k, states[p].wave.alpha_obstacle);
    if (cr == Complex(0.0)) continue;
    for (std::size_t b = 0; b < edges.size(); ++b) {
      if (edges[b].tag != BoundaryTag::g5) continue;
      const int va = edges[b].v[0];
      const int vb = edges[b].v[1];
      if (!support[static_cast<std::size_t>(va)] && !support[static_cast<std::size_t>(vb)]) continue;
      const Vec2 t = mesh.vertex(vb) - mesh.vertex(va);
      const double len = t.norm();
      const auto dofs = space.boundary_edge_dofs(static_cast<int>(b));
      Complex integral = 0.0;
      for (std::size_t r = 0; r < line.points.size(); ++r) {
        const auto phi = element::edge_shape_values(space.order(), line.points[r]);
        Complex u = 0.0;
        Complex v = 0.0;
        for (int i = 0; i < nloc; ++i) {
          const auto d = static_cast<Eigen::Index>(dofs[static_cast<std::size_t>(i)]);
          u += phi[static_cast<std::size_t>(i)] * us[p][d];
          v += phi[static_cast<std::size_t>(i)] * vs[p][d];
        }
        integral += line.weights[r] * len * u * std::conj(v);
      }
      // d|e| = t/|e| . (V_b - V_a)
      const double f = (cr * integral).real() / (len * len);
      for (int comp = 0; comp < 2; ++comp) {
        if (support[static_cast<std::size_t>(vb)]) rhs[2 * vb + comp] += f * t[comp];
        if (support[static_cast<std::size_t>(va)]) rhs[2 * va + comp] -= f * t[comp];
      }
    }
  }
  return rhs;
}

Eigen::VectorXd dj3(const TriMesh& mesh, double nu1, const std::vector<char>& support) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(mesh.num_vertices()));
  if (nu1 == 0.0) return rhs;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells()[c];
    if (cell.region != Region::omega) continue;
    const double area = mesh.signed_area(static_cast<int>(c));
    const auto g = cell_gradients(mesh, static_cast<int>(c));
    for (std::size_t a = 0; a < 3; ++a) {
      const int v = cell.v[a];
      if (!support[static_cast<std::size_t>(v)]) continue;
      rhs[2 * v] += nu1 * area * g[a].x();
      rhs[2 * v + 1] += nu1 * area * g[a].y();
    }
  }
  return rhs;
}

Eigen::VectorXd dj4(const TriMesh& mesh, double nu2, const std::vector<char>& support) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(mesh.num_vertices()));
  if (nu2 == 0.0) return rhs;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != BoundaryTag::g5) continue;
    const Vec2 t = (mesh.vertex(e.v[1]) - mesh.vertex(e.v[0])).normalized();
    for (int comp = 0; comp < 2; ++comp) {
      if (support[static_cast<std::size_t>(e.v[1])]) rhs[2 * e.v[1] + comp] += nu2 * t[comp];
      if (support[static_cast<std::size_t>(e.v[0])]) rhs[2 * e.v[0] + comp] -= nu2 * t[comp];
    }
  }
  return rhs;
}

ShapeGradientAssembly assemble_shape_gradient(std::span<const StateSolution> states,
                                              std::span<const AdjointSolution> adjoints,
                                              const ObjectiveSpec& spec,
                                              const std::vector<char>& support) {
  ShapeGradientAssembly out;
  const auto& mesh = states.front().mesh();
  out.tracking = volume_shape_derivative(states, adjoints, support);
  out.volume = dj3(mesh, spec.nu1, support);
  out.perimeter = dj4(mesh, spec.nu2, support);
  out.support = support;
  return out;
}

BoundaryDensity boundary_shape_density(std::span<const StateSolution> states,
                                       std::span<const AdjointSolution> adjoints) {
  check_pairs(states, adjoints);
  for (const auto& s : states) {
    if (s.regime != Regime::scatterer || s.wave.alpha_obstacle != Complex(0.0)) {
      throw std::invalid_argument("boundary form requires a sound-hard obstacle (alpha = 0)");
    }
  }
  const auto& space = states.front().space();
  const auto& mesh = space.mesh();
  BoundaryDensity out;
  const auto& edges = mesh.boundary_edges();
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != BoundaryTag::g5) continue;
    const int c = edges[b].cell;
    const auto& cv = mesh.cell(c).v;
    std::array<double, 3> lam{0.0, 0.0, 0.0};
    for (std::size_t l = 0; l < 3; ++l) {
      if (cv[l] == edges[b].v[0] || cv[l] == edges[b].v[1]) lam[l] = 0.5;
    }
    double g = 0.0;
    for (std::size_t p = 0; p < states.size(); ++p) {
      const Eigen::VectorXcd u = states[p].u.values();
      const Eigen::VectorXcd v = adjoints[p].v.values();
      const Complex uu = evaluate(space, u, c, lam);
      const Complex vv = evaluate(space, v, c, lam);
      const Eigen::Vector2cd du = evaluate_gradient(space, u, c, lam);
      const Eigen::Vector2cd dv = evaluate_gradient(space, v, c, lam);
      const double k2 = states[p].wave.k * states[p].wave.k;
      g += (du.x() * std::conj(dv.x()) + du.y() * std::conj(dv.y()) - k2 * uu * std::conj(vv)).real();
    }
    out.edges.push_back(static_cast<int>(b));
    out.density.push_back(g);
  }
  return out;
}

double boundary_form_value(const TriMesh& mesh, const BoundaryDensity& density,
                           const NodalVectorField& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < density.edges.size(); ++i) {
    const auto& e = mesh.boundary_edges()[static_cast<std::size_t>(density.edges[i])];
    const Vec2 n = mesh.edge_normal(e);
    const Vec2 vm = 0.5 * (v[static_cast<std::size_t>(e.v[0])] + v[static_cast<std::size_t>(e.v[1])]);
    s += density.density[i] * vm.dot(n) * mesh.edge_length(e);
  }
  return s;
}

std::vector<double> topological_derivative(std::span<const StateSolution> states,
                                           std::span<const AdjointSolution> adjoints) {
  check_pairs(states, adjoints);
  const auto& space = states.front().space();
  const auto& mesh = space.mesh();
  std::vector<double> cell_value(mesh.num_cells(), 0.0);
  const std::array<double, 3> bary{1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (std::size_t p = 0; p < states.size(); ++p) {
    const Eigen::VectorXcd u = states[p].u.values();
    const Eigen::VectorXcd v = adjoints[p].v.values();
    const double k2 = states[p].wave.k * states[p].wave.k;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const int ci = static_cast<int>(c);
      const Eigen::Vector2cd du = evaluate_gradient(space, u, ci, bary);
      const Eigen::Vector2cd dv = evaluate_gradient(space, v, ci, bary);
      const Complex uu = evaluate(space, u, ci, bary);
      const Complex vv = evaluate(space, v, ci, bary);
      cell_value[c] -=
          (du.x() * std::conj(dv.x()) + du.y() * std::conj(dv.y()) - k2 * uu * std::conj(vv)).real();
    }
  }
  std::vector<double> out(mesh.num_vertices(), 0.0);
  std::vector<double> weight(mesh.num_vertices(), 0.0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double a = mesh.signed_area(static_cast<int>(c));
    for (int v : mesh.cells()[c].v) {
      out[static_cast<std::size_t>(v)] += a * cell_value[c];
      weight[static_cast<std::size_t>(v)] += a;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (weight[i] > 0.0) out[i] /= weight[i];
  }
  return out;
}

}  // namespace coastopt
