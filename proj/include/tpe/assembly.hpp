#pragma once

// Continuous P1 finite elements on tagged simplicial meshes and the
// energy functionals of the transmission problem:
//
//   K(u) = sum_i int_{Omega_i} G_i(F(grad u))
//   k(u) = sum_i (1/zeta_i) int rho_i |u|^zeta_i + (1/eta_i) int_{Gamma_i} gamma_i |u|^eta_i
//   H(u) = sum_{i in I_ab} (1/q_i) (int alpha_i |u|^q_i + int_{Gamma_i} beta_i |u|^q_i)
//   J = K + k,   J_lambda = J - lambda H
//
// Continuity across the interface is structural: both subdomains share
// the interface nodes.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "tpe/errors.hpp"
#include "tpe/geometry.hpp"
#include "tpe/operators.hpp"
#include "tpe/problem.hpp"

namespace tpe {

/// Nodal values of a continuous piecewise-linear field.
struct FeFunction {
  Eigen::VectorXd values;

  [[nodiscard]] Eigen::Index size() const { return values.size(); }
  [[nodiscard]] bool is_zero() const { return values.size() == 0 || values.cwiseAbs().maxCoeff() == 0.0; }
  FeFunction operator-() const { return {-values}; }
  friend FeFunction operator*(double t, const FeFunction& u) { return {t * u.values}; }
};

/// A linear functional on the FE space, stored by its action on the nodal basis.
struct DualVector {
  Eigen::VectorXd values;

  [[nodiscard]] double operator()(const FeFunction& h) const { return values.dot(h.values); }
};

/// Quadrature point in barycentric coordinates; weights sum to one.
struct QuadPoint {
  std::array<double, 3> bary{};
  double weight = 0.0;
};

namespace detail {

/// Neumaier-compensated accumulator; keeps sums independent of magnitude ordering effects.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + carry; }
};

/// 5-point Gauss-Legendre on [0, 1] in barycentric form.
inline std::vector<QuadPoint> gauss5_segment() {
  static constexpr double x[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                 0.9061798459386640};
  static constexpr double w[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                 0.2369268850561891, 0.2369268850561891};
  std::vector<QuadPoint> rule;
  for (int k = 0; k < 5; ++k) {
    const double t = 0.5 * (1.0 + x[k]);
    rule.push_back({{1.0 - t, t, 0.0}, 0.5 * w[k]});
  }
  return rule;
}

/// Symmetric 6-point rule on triangles, exact for degree 4.
inline std::vector<QuadPoint> dunavant4_triangle() {
  constexpr double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1, w1 = 0.223381589678011;
  constexpr double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2, w2 = 0.109951743655322;
  return {{{b1, a1, a1}, w1}, {{a1, b1, a1}, w1}, {{a1, a1, b1}, w1},
          {{b2, a2, a2}, w2}, {{a2, b2, a2}, w2}, {{a2, a2, b2}, w2}};
}

inline double signed_pow(double u, double e) { return u == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(u), e), u); }

}  // namespace detail

/// P1 space over a validated mesh, with quadrature data and the fixed
/// preconditioner P = stiffness + mass of the linear Laplacian.
class FeSpace {
 public:
  struct Cell {
    std::vector<int> nodes;
    int sub = 1;
    double measure = 0.0;
    std::vector<GradVec> grads;  ///< constant basis gradients
  };
  struct Facet {
    std::vector<int> nodes;
    int part = 1;  ///< boundary part index (1 or 2)
    double measure = 0.0;
  };

  explicit FeSpace(Mesh mesh) : mesh_(std::make_shared<const Mesh>(std::move(mesh))) {
    measures_ = validate_mesh(*mesh_);
    const Mesh& m = *mesh_;
    cell_rule_ = m.dim == 1 ? detail::gauss5_segment() : detail::dunavant4_triangle();
    facet_rule_ = m.dim == 1 ? std::vector<QuadPoint>{{{1.0, 0.0, 0.0}, 1.0}} : detail::gauss5_segment();
    for (const auto& e : m.elements) cells_.push_back(make_cell(m, e));
    for (const auto& b : m.boundary) facets_.push_back({b.nodes, boundary_index(b.tag), facet_measure(m, b.nodes)});
    build_preconditioner();
  }

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const TagMeasures& measures() const { return measures_; }
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(mesh_->nodes.size()); }
  [[nodiscard]] int dim() const { return mesh_->dim; }
  [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<Facet>& facets() const { return facets_; }
  [[nodiscard]] const std::vector<QuadPoint>& cell_rule() const { return cell_rule_; }
  [[nodiscard]] const std::vector<QuadPoint>& facet_rule() const { return facet_rule_; }
  [[nodiscard]] const Eigen::SparseMatrix<double>& preconditioner() const { return *P_; }

  /// P^{-1} r: maps a dual vector to its Riesz representative (Sobolev gradient).
  [[nodiscard]] FeFunction riesz(const DualVector& r) const { return {solver_->solve(r.values)}; }
  [[nodiscard]] Eigen::VectorXd apply_Pinv(const Eigen::VectorXd& r) const { return solver_->solve(r); }

  /// sqrt(r^T P^{-1} r)
  [[nodiscard]] double dual_norm(const DualVector& r) const {
    return std::sqrt(std::max(0.0, r.values.dot(solver_->solve(r.values))));
  }
  /// sqrt(v^T P v)
  [[nodiscard]] double primal_norm(const FeFunction& v) const {
    return std::sqrt(std::max(0.0, v.values.dot(*P_ * v.values)));
  }

  [[nodiscard]] FeFunction constant(double c) const { return {Eigen::VectorXd::Constant(size(), c)}; }
  [[nodiscard]] FeFunction interpolate(const std::function<double(const Point&)>& f) const {
    FeFunction u{Eigen::VectorXd(size())};
    for (Eigen::Index k = 0; k < size(); ++k) u.values[k] = f(mesh_->nodes[static_cast<std::size_t>(k)]);
    return u;
  }

  [[nodiscard]] GradVec gradient(const Cell& c, const FeFunction& u) const {
    GradVec g = GradVec::Zero(dim());
    for (std::size_t a = 0; a < c.nodes.size(); ++a) g += u.values[c.nodes[a]] * c.grads[a];
    return g;
  }

 private:
  static Cell make_cell(const Mesh& m, const Element& e) {
    Cell c{e.nodes, e.sub, element_measure(m, e), {}};
    if (m.dim == 1) {
      const double h = m.nodes[e.nodes[1]][0] - m.nodes[e.nodes[0]][0];
      c.grads = {GradVec::Constant(1, -1.0 / h), GradVec::Constant(1, 1.0 / h)};
    } else {
      const Point& a = m.nodes[e.nodes[0]];
      const Point& b = m.nodes[e.nodes[1]];
      const Point& d = m.nodes[e.nodes[2]];
      const double twice = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
      auto grad = [twice](const Point& p, const Point& q) {
        GradVec g(2);
        g << (p[1] - q[1]) / twice, (q[0] - p[0]) / twice;
        return g;
      };
      c.grads = {grad(b, d), grad(d, a), grad(a, b)};
    }
    return c;
  }

  void build_preconditioner() {
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& c : cells_) {
      const std::size_t nloc = c.nodes.size();
      for (std::size_t a = 0; a < nloc; ++a) {
        for (std::size_t b = 0; b < nloc; ++b) {
          const double stiff = c.measure * c.grads[a].dot(c.grads[b]);
          // Exact P1 mass: |e| (1 + delta_ab) / ((d + 1)(d + 2))
          const double mass = c.measure * (a == b ? 2.0 : 1.0) / static_cast<double>((nloc) * (nloc + 1));
          triplets.emplace_back(c.nodes[a], c.nodes[b], stiff + mass);
        }
      }
    }
    auto P = std::make_shared<Eigen::SparseMatrix<double>>(size(), size());
    P->setFromTriplets(triplets.begin(), triplets.end());
    auto solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    solver->compute(*P);
    if (solver->info() != Eigen::Success) throw Error("preconditioner factorization failed");
    P_ = std::move(P);
    solver_ = std::move(solver);
  }

  std::shared_ptr<const Mesh> mesh_;
  TagMeasures measures_;
  std::vector<QuadPoint> cell_rule_;
  std::vector<QuadPoint> facet_rule_;
  std::vector<Cell> cells_;
  std::vector<Facet> facets_;
  std::shared_ptr<const Eigen::SparseMatrix<double>> P_;
  std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

/// Throws InadmissibleSpec when the problem cannot be posed on this mesh.
inline void check_compatible(const FeSpace& space, const ProblemSpec& spec) {
  if (spec.dim != space.dim()) throw InadmissibleSpec("problem dimension does not match the mesh");
  validate_norm(spec.norm, spec.dim);
  const TagMeasures& m = space.measures();
  if (spec.mode == Mode::TwoDomain && !(m.omega2 > 0.0)) {
    throw InadmissibleSpec("two-domain problem requires a mesh with subdomain 2");
  }
  if (spec.mode == Mode::Inner && (!(m.omega2 > 0.0) || m.gamma2 > 0.0)) {
    throw InadmissibleSpec("inner configuration requires subdomain 2 and an empty gamma2");
  }
}

// ---------------------------------------------------------------------------
// Power-type terms:  sum (c/e) int |u|^e   and their derivatives.

namespace detail {

/// (coefficient, exponent) of a power term on subdomain / boundary part i.
using PowerTerm = std::function<std::pair<double, double>(int)>;

inline double power_value(const FeSpace& space, const FeFunction& u, const PowerTerm& bulk, const PowerTerm& bnd) {
  CompensatedSum acc;
  for (const auto& c : space.cells()) {
    const auto [coef, e] = bulk(c.sub);
    if (coef == 0.0) continue;
    double local = 0.0;
    for (const auto& q : space.cell_rule()) {
      double uq = 0.0;
      for (std::size_t a = 0; a < c.nodes.size(); ++a) uq += q.bary[a] * u.values[c.nodes[a]];
      local += q.weight * std::pow(std::abs(uq), e);
    }
    acc.add(coef / e * c.measure * local);
  }
  for (const auto& f : space.facets()) {
    const auto [coef, e] = bnd(f.part);
    if (coef == 0.0) continue;
    double local = 0.0;
    for (const auto& q : space.facet_rule()) {
      double uq = 0.0;
      for (std::size_t a = 0; a < f.nodes.size(); ++a) uq += q.bary[a] * u.values[f.nodes[a]];
      local += q.weight * std::pow(std::abs(uq), e);
    }
    acc.add(coef / e * f.measure * local);
  }
  return acc.value();
}

inline void power_gradient(const FeSpace& space, const FeFunction& u, const PowerTerm& bulk, const PowerTerm& bnd,
                           Eigen::VectorXd& out) {
  for (const auto& c : space.cells()) {
    const auto [coef, e] = bulk(c.sub);
    if (coef == 0.0) continue;
    for (const auto& q : space.cell_rule()) {
      double uq = 0.0;
      for (std::size_t a = 0; a < c.nodes.size(); ++a) uq += q.bary[a] * u.values[c.nodes[a]];
      const double s = coef * c.measure * q.weight * signed_pow(uq, e - 1.0);
      for (std::size_t a = 0; a < c.nodes.size(); ++a) out[c.nodes[a]] += s * q.bary[a];
    }
  }
  for (const auto& f : space.facets()) {
    const auto [coef, e] = bnd(f.part);
    if (coef == 0.0) continue;
    for (const auto& q : space.facet_rule()) {
      double uq = 0.0;
      for (std::size_t a = 0; a < f.nodes.size(); ++a) uq += q.bary[a] * u.values[f.nodes[a]];
      const double s = coef * f.measure * q.weight * signed_pow(uq, e - 1.0);
      for (std::size_t a = 0; a < f.nodes.size(); ++a) out[f.nodes[a]] += s * q.bary[a];
    }
  }
}

inline PowerTerm potential_bulk(const ProblemSpec& spec) {
  return [&spec](int i) { return std::pair{spec[i].rho, spec[i].zeta}; };
}
inline PowerTerm potential_boundary(const ProblemSpec& spec) {
  return [&spec](int i) { return std::pair{spec.has_boundary(i) ? spec[i].gamma : 0.0, spec[i].eta}; };
}

inline std::array<bool, 2> active_mask(const ProblemSpec& spec) {
  const auto I = active_ab(spec);
  if (I.empty()) throw InadmissibleSpec("I_ab is empty: the weight functional vanishes identically");
  std::array<bool, 2> on{false, false};
  for (int i : I) on[static_cast<std::size_t>(i - 1)] = true;
  return on;
}

inline PowerTerm weight_bulk(const ProblemSpec& spec, std::array<bool, 2> on) {
  return [&spec, on](int i) { return std::pair{on[static_cast<std::size_t>(i - 1)] ? spec[i].alpha : 0.0, spec[i].q}; };
}
inline PowerTerm weight_boundary(const ProblemSpec& spec, std::array<bool, 2> on) {
  return [&spec, on](int i) {
    const bool use = on[static_cast<std::size_t>(i - 1)] && spec.has_boundary(i);
    return std::pair{use ? spec[i].beta : 0.0, spec[i].q};
  };
}

}  // namespace detail

inline double eval_K(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  detail::CompensatedSum acc;
  for (const auto& c : space.cells()) {
    const double y = eval_F(spec.norm, space.gradient(c, u));
    if (y != 0.0) acc.add(c.measure * eval_G(spec[c.sub].g, y));
  }
  return acc.value();
}

inline double eval_k(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  return detail::power_value(space, u, detail::potential_bulk(spec), detail::potential_boundary(spec));
}

/// Weight functional; the sum runs over I_ab only. Throws InadmissibleSpec when I_ab is empty.
inline double eval_H(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  const auto on = detail::active_mask(spec);
  return detail::power_value(space, u, detail::weight_bulk(spec, on), detail::weight_boundary(spec, on));
}

/// Contributions of each index i in {1, 2} to H(u); H(t u) = sum_i t^{q_i} parts[i].
inline std::array<double, 2> eval_H_parts(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  const auto on = detail::active_mask(spec);
  std::array<double, 2> parts{0.0, 0.0};
  for (int i = 1; i <= 2; ++i) {
    if (!on[static_cast<std::size_t>(i - 1)]) continue;
    std::array<bool, 2> only{i == 1, i == 2};
    parts[static_cast<std::size_t>(i - 1)] =
        detail::power_value(space, u, detail::weight_bulk(spec, only), detail::weight_boundary(spec, only));
  }
  return parts;
}

inline double eval_J(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  return eval_K(space, spec, u) + eval_k(space, spec, u);
}

inline double eval_J_lambda(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u, double lambda) {
  return eval_K(space, spec, u) + eval_k(space, spec, u) - lambda * eval_H(space, spec, u);
}

/// Derivative of J. Where grad u = 0 the flux integrand is 0.
inline DualVector grad_J(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size());
  for (const auto& c : space.cells()) {
    const GradVec A = flux(spec[c.sub].g, spec.norm, space.gradient(c, u));
    if (A.isZero(0.0)) continue;
    for (std::size_t a = 0; a < c.nodes.size(); ++a) out[c.nodes[a]] += c.measure * A.dot(c.grads[a]);
  }
  detail::power_gradient(space, u, detail::potential_bulk(spec), detail::potential_boundary(spec), out);
  return {std::move(out)};
}

inline DualVector grad_H(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  const auto on = detail::active_mask(spec);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size());
  detail::power_gradient(space, u, detail::weight_bulk(spec, on), detail::weight_boundary(spec, on), out);
  return {std::move(out)};
}

inline DualVector grad_J_lambda(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u, double lambda) {
  return {grad_J(space, spec, u).values - lambda * grad_H(space, spec, u).values};
}

struct Residual {
  DualVector r;
  double dual_norm = 0.0;       ///< sqrt(r^T P^{-1} r)
  double euclidean_norm = 0.0;  ///< plain l2 norm of the nodal residual
  bool nonzero_state = false;   ///< eigenfunctions must be nonzero

  [[nodiscard]] bool is_eigenpair(double tol) const { return nonzero_state && dual_norm <= tol; }
};

/// R = J'(u) - lambda H'(u).
inline Residual residual(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u, double lambda) {
  Residual res;
  res.r = grad_J_lambda(space, spec, u, lambda);
  res.dual_norm = space.dual_norm(res.r);
  res.euclidean_norm = res.r.values.norm();
  res.nonzero_state = !u.is_zero();
  return res;
}

// ---------------------------------------------------------------------------
// Norms

namespace detail {
/// int_{Omega_i} |grad u|^p and int_{Omega_i} |u|^p
inline std::pair<double, double> lebesgue_parts(const FeSpace& space, const FeFunction& u, int i, double p) {
  CompensatedSum grad_acc;
  for (const auto& c : space.cells()) {
    if (c.sub != i) continue;
    grad_acc.add(c.measure * std::pow(space.gradient(c, u).norm(), p));
  }
  const double val = power_value(
      space, u, [i, p](int s) { return std::pair{s == i ? p : 0.0, p}; }, [p](int) { return std::pair{0.0, p}; });
  return {grad_acc.value(), val};
}
}  // namespace detail

/// ||u|| = sum_i ||grad u_i||_{L^{p_i}} + ||u_i||_{L^{p_i}}
inline double norm_W(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  double total = 0.0;
  for (int i = 1; i <= 2; ++i) {
    const double p = spec.p(i);
    const auto [g, v] = detail::lebesgue_parts(space, u, i, p);
    total += std::pow(g, 1.0 / p) + std::pow(v, 1.0 / p);
  }
  return total;
}

namespace detail {
inline void require_active(const ProblemSpec& spec, int j) {
  const auto I = active_ab(spec);
  if (std::find(I.begin(), I.end(), j) == I.end()) {
    throw InadmissibleIndex("index " + std::to_string(j) + " is not in I_ab");
  }
}
}  // namespace detail

/// s_j(u) = (int alpha_j |u|^q_j + int_{Gamma_j} beta_j |u|^q_j)^(1/q_j), j in I_ab.
inline double seminorm_s(const FeSpace& space, const ProblemSpec& spec, int j, const FeFunction& u) {
  detail::require_active(spec, j);
  const double q = spec[j].q;
  std::array<bool, 2> only{j == 1, j == 2};
  // power_value divides by the exponent; undo it.
  const double integral = q * detail::power_value(space, u, detail::weight_bulk(spec, only),
                                                  detail::weight_boundary(spec, only));
  return std::pow(std::max(0.0, integral), 1.0 / q);
}

/// sum_i ||grad u_i||_{L^{p_i}} + s_j(u_j), j in I_ab.
inline double norm_jab(const FeSpace& space, const ProblemSpec& spec, int j, const FeFunction& u) {
  detail::require_active(spec, j);
  double total = seminorm_s(space, spec, j, u);
  for (int i = 1; i <= 2; ++i) {
    const double p = spec.p(i);
    total += std::pow(detail::lebesgue_parts(space, u, i, p).first, 1.0 / p);
  }
  return total;
}

}  // namespace tpe
