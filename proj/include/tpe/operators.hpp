#pragma once

// Catalogue of energy densities G(y), y = F(grad u) >= 0, with p-growth.
//
// Every family provides G, its derivative G_y, the growth excess
// y G_y - p G in a cancellation-free closed form, and a set of
// certificate constants (GMeta) for the structural assumptions:
//   coercivity   G(y) >= d y^p            for y >= y0
//   growth       G_y(y) <= a (1 + y^(p-1))
//   excess       y G_y - p G <= c y^delta  (delta in [0, p))

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tpe/errors.hpp"
#include "tpe/norm.hpp"

namespace tpe {

/// kappa y^p / p
struct PowerG {
  double kappa = 1.0;
  double p = 2.0;
};
/// kappa y^p / p + mu y^r / r, 1 < r < p
struct DoublePowerG {
  double kappa = 1.0;
  double p = 2.0;
  double mu = 0.0;
  double r = 1.5;
};
/// ((k^2 + y^2)^(p/2) - k^p) / p
struct RegularizedG {
  double k = 1.0;
  double p = 2.0;
};
/// (sqrt(k^2 + y^(2p)) - k) / p
struct CapillarityG {
  double k = 1.0;
  double p = 2.0;
};
/// (sqrt(k^2 + y^2) - k)^p / p
struct ElasticityG {
  double k = 1.0;
  double p = 2.0;
};
/// (sqrt(k^2 + y^2) - k)^p / p + y^p / p
struct ElasticityPerturbedG {
  double k = 1.0;
  double p = 2.0;
};
/// y^p / p + ln(1 + y^r) / r, p >= 2, 1 < r <= p
struct LogPerturbedG {
  double p = 2.0;
  double r = 2.0;
};
/// (y^p / p) (2 - (1 + y)^(-eps)), 0 < eps < p - 1
struct EpsFamilyG {
  double p = 2.0;
  double eps = 0.5;
};
/// (y^p / p) (1 + L / (1 + L)), L = ln(1 + y), p >= 2.
/// Satisfies coercivity and growth but no excess bound with delta < p.
struct LogCounterexampleG {
  double p = 2.0;
};

using GFamily = std::variant<PowerG, DoublePowerG, RegularizedG, CapillarityG, ElasticityG,
                             ElasticityPerturbedG, LogPerturbedG, EpsFamilyG, LogCounterexampleG>;

inline const char* family_name(const GFamily& g) {
  static constexpr const char* names[] = {"power",  "double_power",         "regularized",
                                          "capillarity", "elasticity", "elasticity_perturbed",
                                          "log_perturbed", "eps_family", "log_counterexample"};
  return names[g.index()];
}

inline double growth_exponent(const GFamily& g) {
  return std::visit([](const auto& f) { return f.p; }, g);
}

/// Parameter violations of the family's admissibility range (empty when admissible).
inline std::vector<std::string> family_issues(const GFamily& g) {
  std::vector<std::string> out;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) out.push_back(std::string(family_name(g)) + ": " + what);
  };
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        need(f.p > 1.0 && std::isfinite(f.p), "requires p > 1");
        if constexpr (std::is_same_v<T, PowerG>) {
          need(f.kappa > 0.0, "requires kappa > 0");
        } else if constexpr (std::is_same_v<T, DoublePowerG>) {
          need(f.kappa > 0.0, "requires kappa > 0");
          need(f.mu >= 0.0, "requires mu >= 0");
          need(f.r > 1.0 && f.r < f.p, "requires 1 < r < p");
        } else if constexpr (std::is_same_v<T, LogPerturbedG>) {
          need(f.p >= 2.0, "requires p >= 2");
          need(f.r > 1.0 && f.r <= f.p, "requires 1 < r <= p");
        } else if constexpr (std::is_same_v<T, EpsFamilyG>) {
          need(f.eps > 0.0 && f.eps < f.p - 1.0, "requires 0 < eps < p - 1");
        } else if constexpr (std::is_same_v<T, LogCounterexampleG>) {
          need(f.p >= 2.0, "requires p >= 2");
        } else {
          need(f.k > 0.0, "requires k > 0");
        }
      },
      g);
  return out;
}

namespace detail {
inline void require_nonnegative(double y) {
  if (!(y >= 0.0)) throw DomainError("G is defined for y >= 0 only");
}
}  // namespace detail

inline double eval_G(const GFamily& g, double y) {
  detail::require_nonnegative(y);
  return std::visit(
      [y](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        const double p = f.p;
        if constexpr (std::is_same_v<T, PowerG>) {
          return f.kappa * std::pow(y, p) / p;
        } else if constexpr (std::is_same_v<T, DoublePowerG>) {
          return f.kappa * std::pow(y, p) / p + f.mu * std::pow(y, f.r) / f.r;
        } else if constexpr (std::is_same_v<T, RegularizedG>) {
          const double t = y / f.k;
          return std::pow(f.k, p) * std::expm1(0.5 * p * std::log1p(t * t)) / p;
        } else if constexpr (std::is_same_v<T, CapillarityG>) {
          const double y2p = std::pow(y, 2.0 * p);
          return y2p / (p * (std::sqrt(f.k * f.k + y2p) + f.k));
        } else if constexpr (std::is_same_v<T, ElasticityG> || std::is_same_v<T, ElasticityPerturbedG>) {
          const double excess = y * y / (std::hypot(f.k, y) + f.k);  // sqrt(k^2 + y^2) - k
          double G = std::pow(excess, p) / p;
          if constexpr (std::is_same_v<T, ElasticityPerturbedG>) G += std::pow(y, p) / p;
          return G;
        } else if constexpr (std::is_same_v<T, LogPerturbedG>) {
          return std::pow(y, p) / p + std::log1p(std::pow(y, f.r)) / f.r;
        } else if constexpr (std::is_same_v<T, EpsFamilyG>) {
          return std::pow(y, p) / p * (2.0 - std::exp(-f.eps * std::log1p(y)));
        } else {
          const double L = std::log1p(y);
          return std::pow(y, p) / p * (1.0 + L / (1.0 + L));
        }
      },
      g);
}

inline double eval_Gy(const GFamily& g, double y) {
  detail::require_nonnegative(y);
  return std::visit(
      [y](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        const double p = f.p;
        if constexpr (std::is_same_v<T, PowerG>) {
          return f.kappa * std::pow(y, p - 1.0);
        } else if constexpr (std::is_same_v<T, DoublePowerG>) {
          return f.kappa * std::pow(y, p - 1.0) + f.mu * std::pow(y, f.r - 1.0);
        } else if constexpr (std::is_same_v<T, RegularizedG>) {
          return y * std::pow(f.k * f.k + y * y, 0.5 * p - 1.0);
        } else if constexpr (std::is_same_v<T, CapillarityG>) {
          const double y2p = std::pow(y, 2.0 * p);
          return y == 0.0 ? 0.0 : std::pow(y, 2.0 * p - 1.0) / std::sqrt(f.k * f.k + y2p);
        } else if constexpr (std::is_same_v<T, ElasticityG> || std::is_same_v<T, ElasticityPerturbedG>) {
          const double R = std::hypot(f.k, y);
          const double excess = y * y / (R + f.k);
          double Gy = std::pow(excess, p - 1.0) * y / R;
          if constexpr (std::is_same_v<T, ElasticityPerturbedG>) Gy += std::pow(y, p - 1.0);
          return Gy;
        } else if constexpr (std::is_same_v<T, LogPerturbedG>) {
          const double yr = std::pow(y, f.r);
          return std::pow(y, p - 1.0) + std::pow(y, f.r - 1.0) / (1.0 + yr);
        } else if constexpr (std::is_same_v<T, EpsFamilyG>) {
          const double decay = std::exp(-f.eps * std::log1p(y));  // (1+y)^-eps
          return std::pow(y, p - 1.0) * (2.0 - decay) + f.eps / p * std::pow(y, p) * decay / (1.0 + y);
        } else {
          const double L = std::log1p(y);
          const double phi = 1.0 + L / (1.0 + L);
          const double dphi = 1.0 / ((1.0 + y) * (1.0 + L) * (1.0 + L));
          return std::pow(y, p - 1.0) * phi + std::pow(y, p) / p * dphi;
        }
      },
      g);
}

/// y G_y(y) - p G(y), evaluated in closed form.
inline double growth_excess(const GFamily& g, double y) {
  detail::require_nonnegative(y);
  return std::visit(
      [y](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        const double p = f.p;
        if constexpr (std::is_same_v<T, PowerG>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, DoublePowerG>) {
          return f.mu * (1.0 - p / f.r) * std::pow(y, f.r);
        } else if constexpr (std::is_same_v<T, RegularizedG>) {
          const double t = y / f.k;
          return -std::pow(f.k, p) * std::expm1(0.5 * (p - 2.0) * std::log1p(t * t));
        } else if constexpr (std::is_same_v<T, CapillarityG>) {
          const double y2p = std::pow(y, 2.0 * p);
          const double S = std::sqrt(f.k * f.k + y2p);
          return f.k * y2p / ((S + f.k) * S);
        } else if constexpr (std::is_same_v<T, ElasticityG> || std::is_same_v<T, ElasticityPerturbedG>) {
          const double R = std::hypot(f.k, y);
          return f.k * std::pow(y * y / (R + f.k), p) / R;
        } else if constexpr (std::is_same_v<T, LogPerturbedG>) {
          const double yr = std::pow(y, f.r);
          return yr / (1.0 + yr) - p / f.r * std::log1p(yr);
        } else if constexpr (std::is_same_v<T, EpsFamilyG>) {
          return f.eps / p * std::pow(y, p + 1.0) * std::exp(-(f.eps + 1.0) * std::log1p(y));
        } else {
          const double L = std::log1p(y);
          return std::pow(y, p + 1.0) / (p * (1.0 + y) * (1.0 + L) * (1.0 + L));
        }
      },
      g);
}

/// Certificate constants for the structural assumptions of a family.
struct GMeta {
  double p = 2.0;
  double d = 0.0;   ///< coercivity: G(y) >= d y^p for y >= y0
  double y0 = 0.0;
  double a = 0.0;   ///< growth: G_y(y) <= a (1 + y^(p-1))
  std::optional<double> delta;  ///< excess bound exponent, present iff hg4
  std::optional<double> c;
  bool hg2_zero_y0 = false;
  bool hg4 = false;
};

inline GMeta g_meta(const GFamily& g) {
  return std::visit(
      [](const auto& f) -> GMeta {
        using T = std::decay_t<decltype(f)>;
        const double p = f.p;
        GMeta m;
        m.p = p;
        auto excess_bound = [&m](double delta, double c) {
          m.delta = delta;
          m.c = c;
          m.hg4 = true;
        };
        if constexpr (std::is_same_v<T, PowerG>) {
          m.d = f.kappa / p;
          m.a = f.kappa;
          excess_bound(0.0, 1.0);
        } else if constexpr (std::is_same_v<T, DoublePowerG>) {
          m.d = f.kappa / p;
          m.a = f.kappa + f.mu;
          excess_bound(f.r, 1.0);
        } else if constexpr (std::is_same_v<T, RegularizedG>) {
          if (p >= 2.0) {
            // (k^2 + y^2)^(p/2) >= k^p + y^p by superadditivity of t^(p/2).
            m.d = 1.0 / p;
            m.a = std::max(1.0, std::pow(2.0, 0.5 * (p - 4.0))) * (std::pow(f.k, p - 2.0) + 1.0);
          } else {
            // Near 0, G ~ k^(p-2) y^2 / 2 which is o(y^p): coercivity only away from 0.
            m.d = 0.5 / p;
            m.y0 = std::pow(2.0, 1.0 / p) * f.k;
            m.a = 1.0;
          }
          excess_bound(0.0, std::pow(f.k, p));
        } else if constexpr (std::is_same_v<T, CapillarityG>) {
          // G ~ y^(2p) / (2kp) near 0.
          m.d = 0.5 / p;
          m.y0 = std::pow(2.0 * f.k, 1.0 / p);
          m.a = 1.0;
          excess_bound(0.0, f.k);
        } else if constexpr (std::is_same_v<T, ElasticityG>) {
          m.d = std::pow(2.0, -p) / p;
          m.y0 = 2.0 * f.k;
          m.a = 1.0;
          excess_bound(p - 1.0, f.k);
        } else if constexpr (std::is_same_v<T, ElasticityPerturbedG>) {
          m.d = 1.0 / p;
          m.a = 2.0;
          excess_bound(p - 1.0, f.k);
        } else if constexpr (std::is_same_v<T, LogPerturbedG>) {
          m.d = 1.0 / p;
          m.a = 1.0;
          excess_bound(0.0, 1.0);
        } else if constexpr (std::is_same_v<T, EpsFamilyG>) {
          m.d = 1.0 / p;
          m.a = 2.0 + f.eps / p;
          excess_bound(p - f.eps, f.eps / p);
        } else {
          m.d = 1.0 / p;
          m.a = 2.0 + 1.0 / p;
        }
        m.hg2_zero_y0 = m.y0 == 0.0;
        return m;
      },
      g);
}

/// max over the grid of y G_y - p G - c y^delta; a value <= 0 means no violation was found.
inline double hg4_scan(const GFamily& g, double delta, double c, const std::vector<double>& y_grid) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double y : y_grid) worst = std::max(worst, growth_excess(g, y) - c * std::pow(y, delta));
  return worst;
}

/// `count` log-spaced points in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) {
    grid[static_cast<std::size_t>(k)] = k + 1 == count ? hi : std::exp(a + (b - a) * k / (count - 1));
  }
  return grid;
}

/// Flux density A(xi) = G_y(F(xi)) grad F(xi), with A(0) = 0.
inline GradVec flux(const GFamily& g, const NormSpec& norm, const GradVec& xi) {
  const double f = eval_F(norm, xi);
  if (f == 0.0) return GradVec::Zero(xi.size());
  return eval_Gy(g, f) * grad_F(norm, xi);
}

}  // namespace tpe
