#include "coastopt/deform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coastopt/fem.hpp"

namespace coastopt {

namespace {

std::array<Vec2, 3> cell_gradients(const TriMesh& mesh, int c) {
  const auto& v = mesh.cell(c).v;
  return element::barycentric_gradients(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]));
}

}  // namespace

Eigen::VectorXd solve_lame_mu(const TriMesh& mesh, double mu_min, double mu_max) {
  if (!(mu_min > 0.0) || !(mu_max >= mu_min)) {
    throw std::invalid_argument("need 0 < mu_min <= mu_max");
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, mu_min);
  if (mu_min == mu_max || !mesh.has_tag(BoundaryTag::g5)) return mu;

  std::vector<char> fixed(mesh.num_vertices(), 0);
  for (int v : mesh.boundary_vertices(BoundaryTag::g5)) {
    fixed[static_cast<std::size_t>(v)] = 1;
    mu[v] = mu_max;
  }
  const auto outer = mesh.vertex_on_tags(kOuterBoundaryTags);
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (outer[i]) {
      fixed[i] = 1;
      mu[static_cast<Eigen::Index>(i)] = mu_min;
    }
  }
  std::vector<int> index(mesh.num_vertices(), -1);
  int nf = 0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (!fixed[i]) index[i] = nf++;
  }
  if (nf == 0) return mu;

  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nf);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells()[c].v;
    const double area = mesh.signed_area(static_cast<int>(c));
    const auto g = cell_gradients(mesh, static_cast<int>(c));
    for (std::size_t i = 0; i < 3; ++i) {
      const int ri = index[static_cast<std::size_t>(v[i])];
      if (ri < 0) continue;
      for (std::size_t j = 0; j < 3; ++j) {
        const double kij = area * g[i].dot(g[j]);
        const int rj = index[static_cast<std::size_t>(v[j])];
        if (rj >= 0) {
          t.emplace_back(ri, rj, kij);
        } else {
          b[ri] -= kij * mu[v[j]];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> k(nf, nf);
  k.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
  if (ldlt.info() != Eigen::Success) throw SolveError("Lame parameter system is singular");
  const Eigen::VectorXd x = ldlt.solve(b);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= 0) mu[static_cast<Eigen::Index>(i)] = std::clamp(x[index[i]], mu_min, mu_max);
  }
  return mu;
}

ElasticityOperator::ElasticityOperator(const TriMesh& mesh, const Eigen::VectorXd& mu)
    : fixed_(mesh.vertex_on_tags(kOuterBoundaryTags)) {
  const auto nv = static_cast<Eigen::Index>(mesh.num_vertices());
  if (mu.size() != nv) throw std::invalid_argument("mu field size mismatch");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(mesh.num_cells() * 36);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells()[c].v;
    const double area = mesh.signed_area(static_cast<int>(c));
    const auto g = cell_gradients(mesh, static_cast<int>(c));
    const double mc = (mu[v[0]] + mu[v[1]] + mu[v[2]]) / 3.0;
    // a(e_c phi_a, e_d phi_b) = mu area [delta_cd g_a.g_b + g_a[d] g_b[c]]
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        for (int cc = 0; cc < 2; ++cc) {
          for (int dd = 0; dd < 2; ++dd) {
            const double val =
                mc * area * ((cc == dd ? g[a].dot(g[b]) : 0.0) + g[a][dd] * g[b][cc]);
            t.emplace_back(2 * v[a] + cc, 2 * v[b] + dd, val);
          }
        }
      }
    }
  }
  full_.resize(2 * nv, 2 * nv);
  full_.setFromTriplets(t.begin(), t.end());

  index_.assign(static_cast<std::size_t>(2 * nv), -1);
  int nf = 0;
  for (Eigen::Index i = 0; i < nv; ++i) {
    if (fixed_[static_cast<std::size_t>(i)]) continue;
    index_[static_cast<std::size_t>(2 * i)] = nf++;
    index_[static_cast<std::size_t>(2 * i + 1)] = nf++;
  }
  std::vector<Eigen::Triplet<double>> r;
  r.reserve(t.size());
  for (Eigen::Index k = 0; k < full_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(full_, k); it; ++it) {
      const int ri = index_[static_cast<std::size_t>(it.row())];
      const int rj = index_[static_cast<std::size_t>(it.col())];
      if (ri >= 0 && rj >= 0) r.emplace_back(ri, rj, it.value());
    }
  }
  reduced_.resize(nf, nf);
  reduced_.setFromTriplets(r.begin(), r.end());
  if (nf > 0) {
    ldlt_.compute(reduced_);
    if (ldlt_.info() != Eigen::Success) throw SolveError("elasticity system is singular");
  }
}

NodalVectorField ElasticityOperator::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != full_.rows()) throw std::invalid_argument("rhs size mismatch");
  const auto nf = reduced_.rows();
  Eigen::VectorXd b(nf);
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (index_[i] >= 0) b[index_[i]] = rhs[static_cast<Eigen::Index>(i)];
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nf);
  if (nf > 0 && b.norm() > 0.0) x = ldlt_.solve(b);
  NodalVectorField w(static_cast<std::size_t>(full_.rows() / 2), Vec2::Zero());
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (index_[i] >= 0) w[i / 2][static_cast<Eigen::Index>(i % 2)] = x[index_[i]];
  }
  return w;
}

Eigen::VectorXd ElasticityOperator::apply(const NodalVectorField& w) const {
  Eigen::VectorXd x(full_.cols());
  for (std::size_t i = 0; i < w.size(); ++i) {
    x[2 * static_cast<Eigen::Index>(i)] = w[i].x();
    x[2 * static_cast<Eigen::Index>(i) + 1] = w[i].y();
  }
  return full_ * x;
}

ShapeGradient solve_shape_gradient(const TriMesh& mesh, const Eigen::VectorXd& rhs,
                                   const Eigen::VectorXd& mu) {
  const ElasticityOperator op(mesh, mu);
  ShapeGradient out;
  out.w = op.solve(rhs);
  const Eigen::VectorXd aw = op.apply(out.w);
  double rhs_norm = 0.0;
  double res = 0.0;
  double dj_w = 0.0;
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    if (op.fixed()[static_cast<std::size_t>(i / 2)]) continue;
    rhs_norm = std::max(rhs_norm, std::abs(rhs[i]));
    res = std::max(res, std::abs(aw[i] - rhs[i]));
    dj_w += rhs[i] * out.w[static_cast<std::size_t>(i / 2)][i % 2];
  }
  out.riesz_residual = rhs_norm > 0.0 ? res / rhs_norm : res;
  if (out.riesz_residual > 1e-9) {
    throw SolveError("elasticity solve failed the Riesz check (residual " +
                     std::to_string(out.riesz_residual) + ")");
  }
  out.norm = std::sqrt(std::max(0.0, dj_w));
  return out;
}

void LineSearchParams::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("step size rho must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink factor must be in (0,1)");
  if (max_trials < 1) throw std::invalid_argument("max_trials must be at least 1");
}

bool LineSearchResult::saw_invalid_shape() const {
  return std::find(trials.begin(), trials.end(), TrialOutcome::invalid_shape) != trials.end();
}

LineSearchResult line_search(const TriMesh& mesh, const NodalVectorField& w, double current,
                             const ObjectiveEvaluator& evaluate, const LineSearchParams& params,
                             double area_floor) {
  params.validate();
  LineSearchResult out;
  out.rho = params.rho;
  double w_max = 0.0;
  for (const auto& x : w) w_max = std::max(w_max, x.norm());
  if (w_max == 0.0) return out;
  const double min_move = kMinRelativeMove * mesh.mean_edge_length();
  double scale = params.rho;
  for (int t = 0; t < params.max_trials; ++t, scale *= params.shrink) {
    if (scale * w_max < min_move) break;
    TriMesh trial = apply_displacement(mesh, w, -scale);
    if (!check_shape_validity(trial, area_floor).valid()) {
      out.trials.push_back(TrialOutcome::invalid_shape);
      continue;
    }
    double value = 0.0;
    try {
      value = evaluate(trial);
    } catch (const SolveError&) {
      out.trials.push_back(TrialOutcome::solve_failed);
      continue;
    } catch (const MeshError&) {
      out.trials.push_back(TrialOutcome::solve_failed);
      continue;
    }
    if (!(value < current)) {
      out.trials.push_back(TrialOutcome::not_decreasing);
      continue;
    }
    out.trials.push_back(TrialOutcome::accepted);
    out.accepted = true;
    out.mesh = std::move(trial);
    out.step = scale;
    out.rho = scale;
    out.objective = value;
    return out;
  }
  return out;
}

}  // namespace coastopt
