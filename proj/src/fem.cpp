#include "coastopt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace coastopt {

// ---------------------------------------------------------------------------
// FeSpace

FeSpace::FeSpace(TriMesh mesh, int order) : mesh_(std::move(mesh)), order_(order) {
  if (order != 1 && order != 2) throw std::invalid_argument("FE order must be 1 or 2");
  num_dofs_ = mesh_.num_vertices() + (order == 2 ? mesh_.num_edges() : 0);
}

std::array<int, 6> FeSpace::cell_dofs(int c) const {
  const auto& v = mesh_.cell(c).v;
  std::array<int, 6> d{v[0], v[1], v[2], -1, -1, -1};
  if (order_ == 2) {
    const int nv = static_cast<int>(mesh_.num_vertices());
    const auto& e = mesh_.cell_edges(c);
    for (std::size_t l = 0; l < 3; ++l) d[3 + l] = nv + e[l];
  }
  return d;
}

std::array<int, 3> FeSpace::boundary_edge_dofs(int b) const {
  const auto& e = mesh_.boundary_edges()[static_cast<std::size_t>(b)];
  const int mid =
      order_ == 2 ? static_cast<int>(mesh_.num_vertices()) + mesh_.boundary_edge_index(b) : -1;
  return {e.v[0], e.v[1], mid};
}

Vec2 FeSpace::dof_point(int dof) const {
  const int nv = static_cast<int>(mesh_.num_vertices());
  if (dof < nv) return mesh_.vertex(dof);
  const auto& e = mesh_.edges()[static_cast<std::size_t>(dof - nv)];
  return 0.5 * (mesh_.vertex(e[0]) + mesh_.vertex(e[1]));
}

std::vector<int> FeSpace::boundary_dofs(BoundaryTag tag) const {
  std::vector<int> out;
  const auto& edges = mesh_.boundary_edges();
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != tag) continue;
    const auto d = boundary_edge_dofs(static_cast<int>(b));
    for (int x : d) {
      if (x >= 0) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ComplexNodalField::ComplexNodalField(const FeSpace& space, const Eigen::VectorXcd& values)
    : re(values.real()),
      im(values.imag()),
      order(space.order()),
      mesh_generation(space.mesh().generation()) {
  if (static_cast<std::size_t>(values.size()) != space.num_dofs()) {
    throw std::invalid_argument("field length does not match the DOF count");
  }
  if (!re.allFinite() || !im.allFinite()) throw SolveError("non-finite field coefficients");
}

Eigen::VectorXcd ComplexNodalField::values() const {
  Eigen::VectorXcd v(re.size());
  v.real() = re;
  v.imag() = im;
  return v;
}

bool ComplexNodalField::matches(const FeSpace& space) const {
  return order == space.order() && mesh_generation == space.mesh().generation() &&
         size() == space.num_dofs();
}

// ---------------------------------------------------------------------------
// Element helpers

namespace element {

std::array<Vec2, 3> barycentric_gradients(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  if (!(std::abs(det) > 0.0)) throw MeshError("degenerate cell in assembly");
  const double inv = 1.0 / det;
  return {Vec2((b.y() - c.y()) * inv, (c.x() - b.x()) * inv),
          Vec2((c.y() - a.y()) * inv, (a.x() - c.x()) * inv),
          Vec2((a.y() - b.y()) * inv, (b.x() - a.x()) * inv)};
}

std::array<double, 6> shape_values(int order, const std::array<double, 3>& lam) {
  if (order == 1) return {lam[0], lam[1], lam[2], 0.0, 0.0, 0.0};
  return {lam[0] * (2 * lam[0] - 1), lam[1] * (2 * lam[1] - 1), lam[2] * (2 * lam[2] - 1),
          4 * lam[0] * lam[1],       4 * lam[1] * lam[2],       4 * lam[2] * lam[0]};
}

std::array<Vec2, 6> shape_gradients(int order, const std::array<double, 3>& lam,
                                    const std::array<Vec2, 3>& g) {
  if (order == 1) return {g[0], g[1], g[2], Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  return {(4 * lam[0] - 1) * g[0],
          (4 * lam[1] - 1) * g[1],
          (4 * lam[2] - 1) * g[2],
          4 * (lam[0] * g[1] + lam[1] * g[0]),
          4 * (lam[1] * g[2] + lam[2] * g[1]),
          4 * (lam[2] * g[0] + lam[0] * g[2])};
}

const TriangleRule& triangle_rule(int order) {
  static const TriangleRule p1{{{2.0 / 3, 1.0 / 6, 1.0 / 6},
                                {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                {1.0 / 6, 1.0 / 6, 2.0 / 3}},
                               {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  // Dunavant degree 4.
  static const TriangleRule p2 = [] {
    const double a1 = 0.445948490915965, b1 = 1 - 2 * a1, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, b2 = 1 - 2 * a2, w2 = 0.109951743655322;
    return TriangleRule{{{b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
                         {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}},
                        {w1, w1, w1, w2, w2, w2}};
  }();
  return order == 1 ? p1 : p2;
}

const LineRule& gauss_line(int npoints) {
  static const LineRule g1{{0.5}, {1.0}};
  static const LineRule g2{{0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)}, {0.5, 0.5}};
  static const LineRule g3{
      {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)},
      {5.0 / 18, 8.0 / 18, 5.0 / 18}};
  switch (npoints) {
    case 1: return g1;
    case 2: return g2;
    case 3: return g3;
    default: throw std::invalid_argument("gauss_line supports 1 to 3 points");
  }
}

std::array<double, 3> edge_shape_values(int order, double t) {
  if (order == 1) return {1 - t, t, 0.0};
  return {(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)};
}

}  // namespace element

// ---------------------------------------------------------------------------
// SesquilinearSystem

SesquilinearSystem::SesquilinearSystem(std::size_t num_dofs)
    : n_(num_dofs), rhs_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(num_dofs))) {}

void SesquilinearSystem::add(int i, int j, Complex value) {
  entries_.emplace_back(i, j, value);
}

void SesquilinearSystem::add_system(const SesquilinearSystem& other, Complex scale) {
  if (other.n_ != n_) throw std::invalid_argument("system size mismatch");
  entries_.reserve(entries_.size() + other.entries_.size());
  for (const auto& t : other.entries_) entries_.emplace_back(t.row(), t.col(), scale * t.value());
  rhs_ += scale * other.rhs_;
}

Eigen::SparseMatrix<Complex> SesquilinearSystem::matrix() const {
  Eigen::SparseMatrix<Complex> m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  m.setFromTriplets(entries_.begin(), entries_.end());
  return m;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

void assemble_cells(SesquilinearSystem& sys, const FeSpace& space, const RegionCoefficient& coeff,
                    Complex scale, bool skip_obstacle, bool stiffness) {
  const auto& mesh = space.mesh();
  const int nd = space.dofs_per_cell();
  const auto& rule = element::triangle_rule(space.order());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells()[c];
    if (skip_obstacle && cell.region == Region::obstacle) continue;
    const double area = mesh.signed_area(static_cast<int>(c));
    if (!(area > 0.0)) {
      throw MeshError("cell " + std::to_string(c) + " is degenerate or inverted");
    }
    const Complex s = scale * coeff(cell.region);
    const auto dofs = space.cell_dofs(static_cast<int>(c));
    const auto g = element::barycentric_gradients(mesh.vertex(cell.v[0]), mesh.vertex(cell.v[1]),
                                                  mesh.vertex(cell.v[2]));
    double local[6][6] = {};
    if (space.order() == 1) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          local[i][j] = stiffness ? area * g[static_cast<std::size_t>(i)].dot(g[static_cast<std::size_t>(j)])
                                  : area / 12.0 * (i == j ? 2.0 : 1.0);
        }
      }
    } else {
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const double w = rule.weights[q] * area;
        if (stiffness) {
          const auto dphi = element::shape_gradients(2, rule.points[q], g);
          for (int i = 0; i < nd; ++i) {
            for (int j = 0; j < nd; ++j) {
              local[i][j] += w * dphi[static_cast<std::size_t>(i)].dot(dphi[static_cast<std::size_t>(j)]);
            }
          }
        } else {
          const auto phi = element::shape_values(2, rule.points[q]);
          for (int i = 0; i < nd; ++i) {
            for (int j = 0; j < nd; ++j) {
              local[i][j] += w * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
            }
          }
        }
      }
    }
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j) {
        sys.add(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], s * local[i][j]);
      }
    }
  }
}

void require_tag(const TriMesh& mesh, BoundaryTag tag) {
  if (!mesh.has_tag(tag)) throw MeshError("mesh has no boundary tagged " + to_string(tag));
}

}  // namespace

void assemble_stiffness(SesquilinearSystem& sys, const FeSpace& space,
                        const RegionCoefficient& coeff, Complex scale, bool skip_obstacle) {
  assemble_cells(sys, space, coeff, scale, skip_obstacle, true);
}

void assemble_mass(SesquilinearSystem& sys, const FeSpace& space, const RegionCoefficient& coeff,
                   Complex scale, bool skip_obstacle) {
  assemble_cells(sys, space, coeff, scale, skip_obstacle, false);
}

void assemble_robin_boundary(SesquilinearSystem& sys, const FeSpace& space, BoundaryTag tag,
                             Complex c) {
  const auto& mesh = space.mesh();
  require_tag(mesh, tag);
  if (c == Complex(0.0)) return;
  const auto& edges = mesh.boundary_edges();
  const auto& rule = element::gauss_line(3);
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != tag) continue;
    const double len = mesh.edge_length(edges[b]);
    const auto dofs = space.boundary_edge_dofs(static_cast<int>(b));
    if (space.order() == 1) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          sys.add(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                  c * (len / 6.0 * (i == j ? 2.0 : 1.0)));
        }
      }
      continue;
    }
    double local[3][3] = {};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = element::edge_shape_values(2, rule.points[q]);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          local[i][j] += rule.weights[q] * len * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        sys.add(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], c * local[i][j]);
      }
    }
  }
}

void assemble_boundary_load(SesquilinearSystem& sys, const FeSpace& space, BoundaryTag tag,
                            const BoundaryFunction& g) {
  const auto& mesh = space.mesh();
  require_tag(mesh, tag);
  const auto& edges = mesh.boundary_edges();
  const auto& rule = element::gauss_line(2);
  const int nloc = space.order() == 1 ? 2 : 3;
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != tag) continue;
    const Vec2& a = mesh.vertex(edges[b].v[0]);
    const Vec2& e = mesh.vertex(edges[b].v[1]);
    const double len = (e - a).norm();
    const Vec2 n = mesh.edge_normal(edges[b]);
    const auto dofs = space.boundary_edge_dofs(static_cast<int>(b));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const Complex gv = g(a + t * (e - a), n);
      const auto phi = element::edge_shape_values(space.order(), t);
      for (int i = 0; i < nloc; ++i) {
        sys.add_rhs(dofs[static_cast<std::size_t>(i)],
                    rule.weights[q] * len * phi[static_cast<std::size_t>(i)] * gv);
      }
    }
  }
}

SesquilinearSystem boundary_mass(const FeSpace& space, BoundaryTag tag) {
  SesquilinearSystem m(space.num_dofs());
  assemble_robin_boundary(m, space, tag, 1.0);
  return m;
}

// ---------------------------------------------------------------------------
// Constraints

ConstraintMap::ConstraintMap(std::size_t num_dofs) : master_(num_dofs) {
  std::iota(master_.begin(), master_.end(), 0);
}

void ConstraintMap::add_periodic(const FeSpace& space, const PeriodicPairing& pairing) {
  if (space.num_dofs() != master_.size()) throw std::invalid_argument("constraint size mismatch");
  const auto& mesh = space.mesh();
  std::unordered_map<int, int> partner;  // G3 vertex -> G2 vertex
  for (const auto& [a, b] : pairing.pairs) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= mesh.num_vertices() ||
        static_cast<std::size_t>(b) >= mesh.num_vertices()) {
      throw MeshError("periodic pairing references a vertex outside the mesh");
    }
    master_[static_cast<std::size_t>(b)] = a;
    partner[b] = a;
  }
  if (space.order() != 2 || pairing.pairs.empty()) return;

  std::map<std::pair<int, int>, int> g2_edges;
  const auto& edges = mesh.boundary_edges();
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != BoundaryTag::g2) continue;
    g2_edges[{std::min(edges[b].v[0], edges[b].v[1]), std::max(edges[b].v[0], edges[b].v[1])}] =
        static_cast<int>(b);
  }
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != BoundaryTag::g3) continue;
    auto pa = partner.find(edges[b].v[0]);
    auto pb = partner.find(edges[b].v[1]);
    if (pa == partner.end() || pb == partner.end()) {
      throw MeshError("periodic pairing misses an endpoint of a G3 edge");
    }
    auto it = g2_edges.find({std::min(pa->second, pb->second), std::max(pa->second, pb->second)});
    if (it == g2_edges.end()) throw MeshError("G3 edge has no periodic partner edge on G2");
    const int slave = space.boundary_edge_dofs(static_cast<int>(b))[2];
    const int master = space.boundary_edge_dofs(it->second)[2];
    master_[static_cast<std::size_t>(slave)] = master;
  }
}

void ConstraintMap::add_dirichlet_zero(const std::vector<int>& dofs) {
  for (int d : dofs) {
    if (d < 0 || static_cast<std::size_t>(d) >= master_.size()) {
      throw std::invalid_argument("Dirichlet DOF out of range");
    }
    master_[static_cast<std::size_t>(d)] = -1;
  }
}

std::vector<int> ConstraintMap::reduced_index() const {
  const std::size_t n = master_.size();
  std::vector<int> idx(n, -2);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (master_[i] == static_cast<int>(i)) idx[i] = next++;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (idx[i] != -2) continue;
    int m = master_[i];
    std::size_t hops = 0;
    while (m >= 0 && master_[static_cast<std::size_t>(m)] != m) {
      m = master_[static_cast<std::size_t>(m)];
      if (++hops > n) throw std::logic_error("cyclic constraint map");
    }
    idx[i] = m < 0 ? -1 : idx[static_cast<std::size_t>(m)];
  }
  return idx;
}

std::size_t ConstraintMap::num_reduced() const {
  return static_cast<std::size_t>(std::count_if(
      master_.begin(), master_.end(), [i = 0](int m) mutable { return m == i++; }));
}

// ---------------------------------------------------------------------------
// Solver

RealSparse complex_to_block(const Eigen::SparseMatrix<Complex>& a) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) * 4);
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(a, k); it; ++it) {
      const auto i = it.row();
      const auto j = it.col();
      const double re = it.value().real();
      const double im = it.value().imag();
      t.emplace_back(i, j, re);
      t.emplace_back(i + n, j + n, re);
      if (im != 0.0) {
        t.emplace_back(i, j + n, -im);
        t.emplace_back(i + n, j, im);
      }
    }
  }
  RealSparse b(2 * n, 2 * n);
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

LinearSolver::LinearSolver(const SesquilinearSystem& sys, const ConstraintMap& constraints)
    : index_(constraints.reduced_index()) {
  if (constraints.num_full() != sys.num_dofs()) {
    throw std::invalid_argument("constraint map does not match the system size");
  }
  const auto nr = static_cast<Eigen::Index>(constraints.num_reduced());
  std::vector<ComplexTriplet> reduced;
  reduced.reserve(sys.entries().size());
  for (const auto& t : sys.entries()) {
    const int r = index_[static_cast<std::size_t>(t.row())];
    const int c = index_[static_cast<std::size_t>(t.col())];
    if (r < 0 || c < 0) continue;
    reduced.emplace_back(r, c, t.value());
  }
  Eigen::SparseMatrix<Complex> a(nr, nr);
  a.setFromTriplets(reduced.begin(), reduced.end());
  block_ = complex_to_block(a);
  block_.makeCompressed();
  lu_.compute(block_);
  if (lu_.info() != Eigen::Success) {
    throw SolveError("singular system: " + lu_.lastErrorMessage());
  }
}

Eigen::VectorXd LinearSolver::restrict(const Eigen::VectorXcd& rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != index_.size()) {
    throw std::invalid_argument("rhs length does not match the system size");
  }
  const Eigen::Index nr = block_.rows() / 2;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * nr);
  for (std::size_t i = 0; i < index_.size(); ++i) {
    const int r = index_[i];
    if (r < 0) continue;
    b[r] += rhs[static_cast<Eigen::Index>(i)].real();
    b[r + nr] += rhs[static_cast<Eigen::Index>(i)].imag();
  }
  return b;
}

Eigen::VectorXcd LinearSolver::expand(const Eigen::VectorXd& x) const {
  const Eigen::Index nr = block_.rows() / 2;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(index_.size()));
  for (std::size_t i = 0; i < index_.size(); ++i) {
    const int r = index_[i];
    if (r < 0) continue;
    out[static_cast<Eigen::Index>(i)] = Complex(x[r], x[r + nr]);
  }
  return out;
}

namespace {

void check_residual(const Eigen::VectorXd& r, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  if (!x.allFinite()) throw SolveError("solve produced non-finite values");
  const double bn = b.norm();
  if (r.norm() > LinearSolver::kResidualTolerance * bn) {
    throw SolveError("direct solve residual " + std::to_string(r.norm() / bn) +
                     " exceeds tolerance");
  }
}

}  // namespace

Eigen::VectorXcd LinearSolver::solve(const Eigen::VectorXcd& rhs) const {
  const Eigen::VectorXd b = restrict(rhs);
  if (b.norm() == 0.0) return Eigen::VectorXcd::Zero(rhs.size());
  const Eigen::VectorXd x = lu_.solve(b);
  check_residual(block_ * x - b, b, x);
  return expand(x);
}

Eigen::VectorXcd LinearSolver::solve_conjugate(const Eigen::VectorXcd& rhs) const {
  const Eigen::VectorXd b = restrict(rhs);
  if (b.norm() == 0.0) return Eigen::VectorXcd::Zero(rhs.size());
  // The block of conj(A) is the transpose of the block of A for symmetric A.
  const Eigen::VectorXd x = lu_.transpose().solve(b);
  check_residual(block_.transpose() * x - b, b, x);
  return expand(x);
}

Eigen::VectorXcd solve(const SesquilinearSystem& sys, const ConstraintMap& constraints) {
  LinearSolver solver(sys, constraints);
  return solver.solve(sys.rhs());
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <typename F>
void for_each_boundary_point(const FeSpace& space, const Eigen::VectorXcd& f, BoundaryTag tag,
                             F&& visit) {
  const auto& mesh = space.mesh();
  require_tag(mesh, tag);
  if (static_cast<std::size_t>(f.size()) != space.num_dofs()) {
    throw std::invalid_argument("field length does not match the DOF count");
  }
  const auto& rule = element::gauss_line(3);
  const auto& edges = mesh.boundary_edges();
  const int nloc = space.order() == 1 ? 2 : 3;
  for (std::size_t b = 0; b < edges.size(); ++b) {
    if (edges[b].tag != tag) continue;
    const double len = mesh.edge_length(edges[b]);
    const auto dofs = space.boundary_edge_dofs(static_cast<int>(b));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = element::edge_shape_values(space.order(), rule.points[q]);
      Complex v = 0.0;
      for (int i = 0; i < nloc; ++i) {
        v += phi[static_cast<std::size_t>(i)] * f[dofs[static_cast<std::size_t>(i)]];
      }
      visit(v, rule.weights[q] * len);
    }
  }
}

}  // namespace

double boundary_l2_squared(const FeSpace& space, const Eigen::VectorXcd& f, BoundaryTag tag) {
  double s = 0.0;
  for_each_boundary_point(space, f, tag, [&](Complex v, double w) { s += w * std::norm(v); });
  return s;
}

Complex boundary_integral(const FeSpace& space, const Eigen::VectorXcd& f, BoundaryTag tag) {
  Complex s = 0.0;
  for_each_boundary_point(space, f, tag, [&](Complex v, double w) { s += w * v; });
  return s;
}

Complex evaluate(const FeSpace& space, const Eigen::VectorXcd& f, int c,
                 const std::array<double, 3>& lam) {
  const auto dofs = space.cell_dofs(c);
  const auto phi = element::shape_values(space.order(), lam);
  Complex v = 0.0;
  for (int i = 0; i < space.dofs_per_cell(); ++i) {
    v += phi[static_cast<std::size_t>(i)] * f[dofs[static_cast<std::size_t>(i)]];
  }
  return v;
}

Eigen::Vector2cd evaluate_gradient(const FeSpace& space, const Eigen::VectorXcd& f, int c,
                                   const std::array<double, 3>& lam) {
  const auto& mesh = space.mesh();
  const auto& cell = mesh.cell(c);
  const auto g = element::barycentric_gradients(mesh.vertex(cell.v[0]), mesh.vertex(cell.v[1]),
                                                mesh.vertex(cell.v[2]));
  const auto dphi = element::shape_gradients(space.order(), lam, g);
  const auto dofs = space.cell_dofs(c);
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
  for (int i = 0; i < space.dofs_per_cell(); ++i) {
    v += f[dofs[static_cast<std::size_t>(i)]] * dphi[static_cast<std::size_t>(i)].cast<Complex>();
  }
  return v;
}

double l2_error(const FeSpace& space, const Eigen::VectorXcd& f,
                const std::function<Complex(const Vec2&)>& exact) {
  const auto& mesh = space.mesh();
  const auto& rule = element::triangle_rule(2);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells()[c].v;
    const double area = mesh.signed_area(static_cast<int>(c));
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 x = l[0] * mesh.vertex(v[0]) + l[1] * mesh.vertex(v[1]) + l[2] * mesh.vertex(v[2]);
      s += rule.weights[q] * area * std::norm(evaluate(space, f, static_cast<int>(c), l) - exact(x));
    }
  }
  return std::sqrt(s);
}

double h1_seminorm_error(const FeSpace& space, const Eigen::VectorXcd& f,
                         const std::function<Eigen::Vector2cd(const Vec2&)>& exact_grad) {
  const auto& mesh = space.mesh();
  const auto& rule = element::triangle_rule(2);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells()[c].v;
    const double area = mesh.signed_area(static_cast<int>(c));
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 x = l[0] * mesh.vertex(v[0]) + l[1] * mesh.vertex(v[1]) + l[2] * mesh.vertex(v[2]);
      s += rule.weights[q] * area *
           (evaluate_gradient(space, f, static_cast<int>(c), l) - exact_grad(x)).squaredNorm();
    }
  }
  return std::sqrt(s);
}

}  // namespace coastopt
