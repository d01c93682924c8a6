#pragma once

// Independent reference computations used to validate the FE machinery:
// central finite differences, a dense generalized eigensolver for the
// linear (p = q = zeta = 2) case assembled from closed-form P1 matrices,
// and a shooting method for 1D Steklov-type problems.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "tpe/assembly.hpp"
#include "tpe/errors.hpp"
#include "tpe/geometry.hpp"

namespace tpe {

enum class Functional { J, H, JLambda };

inline const char* functional_name(Functional f) {
  switch (f) {
    case Functional::J: return "J";
    case Functional::H: return "H";
    case Functional::JLambda: return "J_lambda";
  }
  return "?";
}

/// Central differences of J, H or J_lambda along every nodal direction.
inline DualVector fd_gradient(const FeSpace& space, const ProblemSpec& spec, Functional f, const FeFunction& u,
                              double h, double lambda = 0.0) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  auto phi = [&](const FeFunction& v) {
    switch (f) {
      case Functional::J: return eval_J(space, spec, v);
      case Functional::H: return eval_H(space, spec, v);
      case Functional::JLambda: return eval_J_lambda(space, spec, v, lambda);
    }
    return 0.0;
  };
  DualVector g{Eigen::VectorXd::Zero(u.size())};
  FeFunction w = u;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double orig = w.values[k];
    w.values[k] = orig + h;
    const double plus = phi(w);
    w.values[k] = orig - h;
    const double minus = phi(w);
    w.values[k] = orig;
    g.values[k] = (plus - minus) / (2.0 * h);
  }
  return g;
}

/// Per-subdomain coefficients of the linear pencil
///   (S_kappa + M_rho + M_gamma) v = lambda (M_alpha + M_beta) v.
/// beta and gamma act on the boundary part Gamma_i.
struct LinearPencil {
  std::array<double, 2> kappa{1.0, 1.0};
  std::array<double, 2> rho{1.0, 1.0};
  std::array<double, 2> alpha{1.0, 1.0};
  std::array<double, 2> beta{0.0, 0.0};
  std::array<double, 2> gamma{0.0, 0.0};
};

struct LinearEig {
  double lambda = 0.0;
  Eigen::VectorXd vector;  ///< normalized to v^T B v = 1
};

/// Closed-form P1 stiffness/mass blocks, assembled straight from the mesh.
inline void assemble_pencil(const Mesh& mesh, const LinearPencil& c, Eigen::MatrixXd& A, Eigen::MatrixXd& B) {
  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  A = Eigen::MatrixXd::Zero(n, n);
  B = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : mesh.elements) {
    const auto s = static_cast<std::size_t>(e.sub - 1);
    const int m = static_cast<int>(e.nodes.size());
    Eigen::MatrixXd K(m, m), M(m, m);
    if (mesh.dim == 1) {
      const double L = std::abs(mesh.nodes[e.nodes[1]][0] - mesh.nodes[e.nodes[0]][0]);
      K << 1.0 / L, -1.0 / L, -1.0 / L, 1.0 / L;
      M << L / 3.0, L / 6.0, L / 6.0, L / 3.0;
    } else {
      const auto& a = mesh.nodes[e.nodes[0]];
      const auto& b = mesh.nodes[e.nodes[1]];
      const auto& d = mesh.nodes[e.nodes[2]];
      // Edge vectors opposite each vertex; K_ij = (e_i . e_j) / (4 area).
      const std::array<Eigen::Vector2d, 3> edge{Eigen::Vector2d(d[0] - b[0], d[1] - b[1]),
                                                Eigen::Vector2d(a[0] - d[0], a[1] - d[1]),
                                                Eigen::Vector2d(b[0] - a[0], b[1] - a[1])};
      const double area = 0.5 * std::abs(edge[2].x() * (-edge[1].y()) - edge[2].y() * (-edge[1].x()));
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          K(i, j) = edge[i].dot(edge[j]) / (4.0 * area);
          M(i, j) = area * (i == j ? 2.0 : 1.0) / 12.0;
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        A(e.nodes[i], e.nodes[j]) += c.kappa[s] * K(i, j) + c.rho[s] * M(i, j);
        B(e.nodes[i], e.nodes[j]) += c.alpha[s] * M(i, j);
      }
    }
  }
  for (const auto& f : mesh.boundary) {
    const auto s = static_cast<std::size_t>(boundary_index(f.tag) - 1);
    if (mesh.dim == 1) {
      A(f.nodes[0], f.nodes[0]) += c.gamma[s];
      B(f.nodes[0], f.nodes[0]) += c.beta[s];
      continue;
    }
    const auto& p = mesh.nodes[f.nodes[0]];
    const auto& q = mesh.nodes[f.nodes[1]];
    const double L = std::hypot(q[0] - p[0], q[1] - p[1]);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double mij = L * (i == j ? 2.0 : 1.0) / 6.0;
        A(f.nodes[i], f.nodes[j]) += c.gamma[s] * mij;
        B(f.nodes[i], f.nodes[j]) += c.beta[s] * mij;
      }
    }
  }
}

/// The k smallest eigenvalues of A v = lambda B v with A SPD, B PSD.
/// Solved as B v = mu A v, lambda = 1/mu, so a singular B (Steklov case) is fine.
inline std::vector<LinearEig> dense_linear_eigs(const FeSpace& space, const LinearPencil& coeffs, int k) {
  const Eigen::Index n = space.size();
  if (k < 0) throw DomainError("eigenpair count must be nonnegative");
  if (k > n) throw OracleDegenerate("requested more eigenpairs than unknowns");
  Eigen::MatrixXd A, B;
  assemble_pencil(space.mesh(), coeffs, A, B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw OracleDegenerate("stiffness + mass block is not positive definite");
  const Eigen::VectorXd& mu = es.eigenvalues();  // ascending
  const double mu_max = mu.cwiseAbs().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) rank += mu[i] > 1e-12 * mu_max ? 1 : 0;
  if (k > rank) throw OracleDegenerate("weight matrix rank is below the requested count");
  std::vector<LinearEig> out;
  for (int i = 0; i < k; ++i) {
    const Eigen::Index idx = n - 1 - i;
    out.push_back({1.0 / mu[idx], es.eigenvectors().col(idx) / std::sqrt(mu[idx])});
  }
  return out;
}

enum class ShootingMode { Single, Transmission };

/// Smallest lambda for -(kappa u')' + u = 0 on (0,1), kappa = kappa1 on (0,c)
/// and kappa2 on (c,1) (kappa1 throughout in Single mode), with
/// kappa u' . nu = lambda u at x = 0 and x = 1.
///
/// With w = kappa u' the system is u' = w / kappa, w' = u. The outward normal
/// at x = 0 is -1, so the start is u(0) = 1, w(0) = -lambda, and the defect
/// is D(lambda) = w(1) - lambda u(1).
inline double steklov_shooting(double kappa1, double kappa2, double c, ShootingMode mode) {
  if (!(kappa1 > 0.0 && kappa2 > 0.0)) throw DomainError("shooting coefficients must be positive");
  if (!(c > 0.0 && c < 1.0)) throw DomainError("interface position must lie in (0, 1)");
  if (mode == ShootingMode::Single) kappa2 = kappa1;
  constexpr int steps = 10000;
  const int n1 = std::clamp(static_cast<int>(std::lround(c * steps)), 1, steps - 1);
  const int n2 = steps - n1;

  auto defect = [&](double lambda) {
    double u = 1.0, w = -lambda;
    auto run = [&](double kappa, double h, int count) {
      for (int s = 0; s < count; ++s) {
        const double k1u = w / kappa, k1w = u;
        const double k2u = (w + 0.5 * h * k1w) / kappa, k2w = u + 0.5 * h * k1u;
        const double k3u = (w + 0.5 * h * k2w) / kappa, k3w = u + 0.5 * h * k2u;
        const double k4u = (w + h * k3w) / kappa, k4w = u + h * k3u;
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      }
    };
    run(kappa1, c / n1, n1);
    run(kappa2, (1.0 - c) / n2, n2);
    return w - lambda * u;
  };

  constexpr double scan_step = 1e-2;
  double lo = 1e-9;
  double d_lo = defect(lo);
  for (double hi = scan_step; hi <= 10.0 + 1e-12; hi += scan_step) {
    const double d_hi = defect(hi);
    if (d_lo == 0.0) return lo;
    if ((d_lo < 0.0) != (d_hi < 0.0)) {
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double d_mid = defect(mid);
        if ((d_mid < 0.0) == (d_lo < 0.0)) {
          lo = mid;
          d_lo = d_mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    lo = hi;
    d_lo = d_hi;
  }
  throw OracleFailure("no sign change of the shooting defect in (0, 10]");
}

struct OracleReport {
  std::string oracle;
  double reference = 0.0;  ///< oracle value
  double target = 0.0;     ///< value under test
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;  ///< applied to rel_error
  bool pass = false;
};

inline OracleReport make_report(std::string name, double reference, double target, double tolerance) {
  OracleReport r{std::move(name), reference, target, std::abs(target - reference), 0.0, tolerance, false};
  r.rel_error = r.abs_error / std::max(std::abs(reference), std::numeric_limits<double>::min());
  r.pass = r.rel_error <= tolerance;
  return r;
}

/// Worst relative error of a gradient against its finite-difference reference.
inline OracleReport compare_gradients(std::string name, const DualVector& reference, const DualVector& target,
                                      double tolerance) {
  const double scale = std::max(reference.values.cwiseAbs().maxCoeff(), 1e-300);
  const double err = (reference.values - target.values).cwiseAbs().maxCoeff();
  OracleReport r{std::move(name), reference.values.norm(), target.values.norm(), err, err / scale, tolerance, false};
  r.pass = r.rel_error <= tolerance;
  return r;
}

inline nlohmann::json report_to_json(const OracleReport& r) {
  return {{"oracle", r.oracle},       {"reference", r.reference}, {"target", r.target},
          {"abs_error", r.abs_error}, {"rel_error", r.rel_error}, {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

}  // namespace tpe
