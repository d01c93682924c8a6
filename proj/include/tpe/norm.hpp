#pragma once

// Norms F on R^N (N <= 2) used to build anisotropic operators.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <variant>

#include "tpe/errors.hpp"

namespace tpe {

/// Small gradient vector; size equals the spatial dimension (1 or 2).
using GradVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

struct EuclideanNorm {};

/// F(x) = (sum |x_k|^r)^(1/r), r > 1.
struct LrNorm {
  double r = 2.0;
};

/// F(x) = sqrt(<M x, x>) with M symmetric positive definite.
/// In 1D only the top-left entry is used.
struct MatrixNorm {
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
};

using NormSpec = std::variant<EuclideanNorm, LrNorm, MatrixNorm>;

/// Closed-form constants with m |x| <= F(x) <= M |x|.
struct NormBounds {
  double m = 1.0;
  double M = 1.0;
};

namespace detail {
inline Eigen::MatrixXd active_block(const MatrixNorm& n, Eigen::Index dim) {
  return n.M.topLeftCorner(dim, dim);
}
}  // namespace detail

/// Throws InadmissibleSpec when the parameters do not define a strictly convex C^1 norm.
inline void validate_norm(const NormSpec& norm, int dim) {
  if (const auto* lr = std::get_if<LrNorm>(&norm)) {
    if (!(lr->r > 1.0) || !std::isfinite(lr->r)) throw InadmissibleSpec("lr norm requires 1 < r < inf");
  } else if (const auto* mat = std::get_if<MatrixNorm>(&norm)) {
    if (!mat->M.isApprox(mat->M.transpose(), 1e-14)) throw InadmissibleSpec("norm matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::active_block(*mat, dim));
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw InadmissibleSpec("norm matrix is not positive definite");
  }
}

inline double eval_F(const NormSpec& norm, const GradVec& xi) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EuclideanNorm>) {
          return xi.norm();
        } else if constexpr (std::is_same_v<T, LrNorm>) {
          const double s = xi.cwiseAbs().maxCoeff();
          if (s == 0.0) return 0.0;
          double sum = 0.0;
          for (Eigen::Index k = 0; k < xi.size(); ++k) sum += std::pow(std::abs(xi[k]) / s, n.r);
          return s * std::pow(sum, 1.0 / n.r);
        } else {
          const auto M = detail::active_block(n, xi.size());
          return std::sqrt(std::max(0.0, xi.dot(M * xi)));
        }
      },
      norm);
}

/// Gradient of F at xi != 0. Throws SingularPointError at the origin.
inline GradVec grad_F(const NormSpec& norm, const GradVec& xi) {
  const double f = eval_F(norm, xi);
  if (!(f > 0.0)) throw SingularPointError("grad_F is undefined at xi = 0");
  return std::visit(
      [&](const auto& n) -> GradVec {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EuclideanNorm>) {
          return xi / f;
        } else if constexpr (std::is_same_v<T, LrNorm>) {
          GradVec g(xi.size());
          for (Eigen::Index k = 0; k < xi.size(); ++k) {
            const double t = std::abs(xi[k]) / f;
            g[k] = t == 0.0 ? 0.0 : std::copysign(std::pow(t, n.r - 1.0), xi[k]);
          }
          return g;
        } else {
          const auto M = detail::active_block(n, xi.size());
          return GradVec(M * xi / f);
        }
      },
      norm);
}

inline NormBounds norm_bounds(const NormSpec& norm, int dim) {
  return std::visit(
      [&](const auto& n) -> NormBounds {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EuclideanNorm>) {
          return {1.0, 1.0};
        } else if constexpr (std::is_same_v<T, LrNorm>) {
          const double c = std::pow(static_cast<double>(dim), 1.0 / n.r - 0.5);
          return {std::min(1.0, c), std::max(1.0, c)};
        } else {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::active_block(n, dim));
          return {std::sqrt(es.eigenvalues().minCoeff()), std::sqrt(es.eigenvalues().maxCoeff())};
        }
      },
      norm);
}

}  // namespace tpe
