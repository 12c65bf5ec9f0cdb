#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "coastopt/mesh.hpp"

namespace coastopt {

using Complex = std::complex<double>;
using ComplexTriplet = Eigen::Triplet<Complex>;
using RealSparse = Eigen::SparseMatrix<double>;

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Continuous Lagrange space of degree 1 or 2 on a TriMesh. P2 numbering:
/// vertex DOFs first (same index as the vertex), then one DOF per mesh edge.
class FeSpace {
 public:
  FeSpace(TriMesh mesh, int order);

  [[nodiscard]] const TriMesh& mesh() const { return mesh_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] std::size_t num_dofs() const { return num_dofs_; }
  [[nodiscard]] int dofs_per_cell() const { return order_ == 1 ? 3 : 6; }

  /// Local DOFs of a cell: vertices, then edge midpoints of local edges
  /// (v0-v1, v1-v2, v2-v0).
  [[nodiscard]] std::array<int, 6> cell_dofs(int c) const;
  /// DOFs on a boundary edge in its stored orientation: start, end, midpoint
  /// (midpoint is -1 for P1).
  [[nodiscard]] std::array<int, 3> boundary_edge_dofs(int b) const;
  [[nodiscard]] Vec2 dof_point(int dof) const;
  /// Sorted DOFs lying on edges with the given tag.
  [[nodiscard]] std::vector<int> boundary_dofs(BoundaryTag tag) const;

 private:
  TriMesh mesh_;
  int order_;
  std::size_t num_dofs_;
};

/// Complex scalar FE function as paired real/imaginary coefficient vectors.
struct ComplexNodalField {
  Eigen::VectorXd re;
  Eigen::VectorXd im;
  int order = 1;
  std::uint64_t mesh_generation = 0;

  ComplexNodalField() = default;
  ComplexNodalField(const FeSpace& space, const Eigen::VectorXcd& values);

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(re.size()); }
  [[nodiscard]] Complex operator[](std::size_t i) const {
    return {re[static_cast<Eigen::Index>(i)], im[static_cast<Eigen::Index>(i)]};
  }
  [[nodiscard]] Eigen::VectorXcd values() const;
  [[nodiscard]] bool matches(const FeSpace& space) const;
};

/// Reference-element helpers shared by assembly and post-processing.
namespace element {

/// Barycentric-coordinate gradients of a cell (constant on affine triangles).
std::array<Vec2, 3> barycentric_gradients(const Vec2& a, const Vec2& b, const Vec2& c);

/// Shape function values at barycentric point `lam` (3 or 6 entries used).
std::array<double, 6> shape_values(int order, const std::array<double, 3>& lam);
std::array<Vec2, 6> shape_gradients(int order, const std::array<double, 3>& lam,
                                    const std::array<Vec2, 3>& grad_lam);

struct TriangleRule {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;                // sum to 1 (multiply by area)
};
/// Degree-2 rule for P1 products, degree-4 (6-point) rule for P2.
const TriangleRule& triangle_rule(int order);

struct LineRule {
  std::vector<double> points;   // in [0,1]
  std::vector<double> weights;  // sum to 1 (multiply by length)
};
const LineRule& gauss_line(int npoints);

/// Edge shape functions (start, end, midpoint) at parameter t in [0,1].
std::array<double, 3> edge_shape_values(int order, double t);

}  // namespace element

/// Per-region real coefficient (phi in the weak form).
struct RegionCoefficient {
  double omega = 1.0;
  double obstacle = 1.0;
  [[nodiscard]] double operator()(Region r) const { return r == Region::omega ? omega : obstacle; }
};

/// Complex sesquilinear system a(u, w) = sum_ij A_ij u_j conj(w_i) = l(w).
/// Assembled in complex triplet form; the real 2x2 block realization is built
/// at solve time.
class SesquilinearSystem {
 public:
  explicit SesquilinearSystem(std::size_t num_dofs);

  [[nodiscard]] std::size_t num_dofs() const { return n_; }
  [[nodiscard]] const std::vector<ComplexTriplet>& entries() const { return entries_; }
  [[nodiscard]] const Eigen::VectorXcd& rhs() const { return rhs_; }

  void add(int i, int j, Complex value);
  void add_rhs(int i, Complex value) { rhs_[i] += value; }
  void add_system(const SesquilinearSystem& other, Complex scale = 1.0);

  /// Assembled complex matrix (duplicates summed).
  [[nodiscard]] Eigen::SparseMatrix<Complex> matrix() const;

 private:
  std::size_t n_;
  std::vector<ComplexTriplet> entries_;
  Eigen::VectorXcd rhs_;
};

/// scale * sum over cells of coeff(region) * integral grad(u).grad(conj w).
void assemble_stiffness(SesquilinearSystem& sys, const FeSpace& space,
                        const RegionCoefficient& coeff, Complex scale = 1.0,
                        bool skip_obstacle = false);
/// scale * sum over cells of coeff(region) * integral u conj(w).
void assemble_mass(SesquilinearSystem& sys, const FeSpace& space, const RegionCoefficient& coeff,
                   Complex scale = 1.0, bool skip_obstacle = false);
/// c * integral over tagged edges of u conj(w).
void assemble_robin_boundary(SesquilinearSystem& sys, const FeSpace& space, BoundaryTag tag,
                             Complex c);

/// Boundary datum g(x, n) with n the stored outward normal of the edge.
using BoundaryFunction = std::function<Complex(const Vec2& x, const Vec2& normal)>;
/// integral over tagged edges of g conj(w), 2-point Gauss per edge.
void assemble_boundary_load(SesquilinearSystem& sys, const FeSpace& space, BoundaryTag tag,
                            const BoundaryFunction& g);

/// Elimination map from full DOFs to reduced unknowns: periodic slaves share
/// their master's unknown, Dirichlet-zero DOFs map to -1.
class ConstraintMap {
 public:
  explicit ConstraintMap(std::size_t num_dofs);

  /// Identify G3 DOFs with their G2 partners (P2 edge midpoints included).
  void add_periodic(const FeSpace& space, const PeriodicPairing& pairing);
  void add_dirichlet_zero(const std::vector<int>& dofs);

  [[nodiscard]] std::size_t num_full() const { return master_.size(); }
  [[nodiscard]] std::size_t num_reduced() const;
  /// Reduced index of each full DOF, or -1.
  [[nodiscard]] std::vector<int> reduced_index() const;

  [[nodiscard]] const std::vector<int>& master() const { return master_; }

 private:
  std::vector<int> master_;  // self, master DOF, or -1 (Dirichlet zero)
};

/// Real 2x2 block realization [[Re A, -Im A], [Im A, Re A]] of a complex
/// matrix over the reduced unknowns.
RealSparse complex_to_block(const Eigen::SparseMatrix<Complex>& a);

/// Factorized, constrained sesquilinear system. Solves A x = b and, reusing
/// the factorization, conj(A) x = b (valid because the assembled forms are
/// complex symmetric).
class LinearSolver {
 public:
  LinearSolver(const SesquilinearSystem& sys, const ConstraintMap& constraints);

  /// Full-length solution of A x = rhs (rhs over full DOFs).
  [[nodiscard]] Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
  /// Full-length solution of conj(A) x = rhs.
  [[nodiscard]] Eigen::VectorXcd solve_conjugate(const Eigen::VectorXcd& rhs) const;

  [[nodiscard]] std::size_t num_reduced() const { return static_cast<std::size_t>(block_.rows() / 2); }
  [[nodiscard]] const RealSparse& block_matrix() const { return block_; }
  [[nodiscard]] const std::vector<int>& reduced_index() const { return index_; }

  /// Residual tolerance relative to the rhs norm for the direct path.
  static constexpr double kResidualTolerance = 1e-10;

 private:
  [[nodiscard]] Eigen::VectorXd restrict(const Eigen::VectorXcd& rhs) const;
  [[nodiscard]] Eigen::VectorXcd expand(const Eigen::VectorXd& x) const;

  std::vector<int> index_;
  RealSparse block_;
  mutable Eigen::SparseLU<RealSparse, Eigen::COLAMDOrdering<int>> lu_;  // transpose() is non-const
};

/// One-shot: solve the constrained system and return the full solution.
Eigen::VectorXcd solve(const SesquilinearSystem& sys, const ConstraintMap& constraints);

/// Integral over the given tagged edges of |f|^2 and of f, for an FE function.
double boundary_l2_squared(const FeSpace& space, const Eigen::VectorXcd& f, BoundaryTag tag);
Complex boundary_integral(const FeSpace& space, const Eigen::VectorXcd& f, BoundaryTag tag);

/// Edge mass matrix on the tagged boundary (complex-valued container, real entries).
SesquilinearSystem boundary_mass(const FeSpace& space, BoundaryTag tag);

/// FE function value and gradient on cell c at barycentric point lam.
Complex evaluate(const FeSpace& space, const Eigen::VectorXcd& f, int c,
                 const std::array<double, 3>& lam);
Eigen::Vector2cd evaluate_gradient(const FeSpace& space, const Eigen::VectorXcd& f, int c,
                                   const std::array<double, 3>& lam);

/// L2 error against an exact solution, degree-4 interior quadrature.
double l2_error(const FeSpace& space, const Eigen::VectorXcd& f,
                const std::function<Complex(const Vec2&)>& exact);
/// H1 seminorm error against an exact gradient.
double h1_seminorm_error(const FeSpace& space, const Eigen::VectorXcd& f,
                         const std::function<Eigen::Vector2cd(const Vec2&)>& exact_grad);

}  // namespace coastopt
