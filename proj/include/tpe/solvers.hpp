#pragma once

// Eigenpair solvers:
//  * minimize_on_Mr     constrained minimization of J on the level set H = r
//                       (the Lagrange multiplier is the eigenvalue)
//  * minimize_J_lambda  global descent on J_lambda for fixed lambda (q_max < p_min)
//  * mountain_pass      path deformation for J_lambda (p_max < q_min)
//  * sweep_lambda       dispatch over a list of lambda values
//
// All descent directions are Sobolev gradients P^{-1} R with the fixed
// preconditioner of the FE space. Line searches are Armijo backtracking
// seeded by Barzilai-Borwein step lengths. Each solver finishes with a
// Newton-Krylov polish on the residual equation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tpe/assembly.hpp"
#include "tpe/errors.hpp"
#include "tpe/krylov.hpp"
#include "tpe/problem.hpp"

namespace tpe {

struct SolverOptions {
  int max_iters = 5000;
  double tol = 1e-8;          ///< dual-norm residual tolerance
  double c_armijo = 1e-4;     ///< sufficient-decrease constant, in (0, 0.5]
  double backtrack = 0.5;     ///< step reduction factor, in (0, 1)
  int path_points = 20;       ///< mountain-pass path resolution (segments)
  std::uint64_t seed = 1;
  double noise = 0.1;         ///< amplitude of the seeded perturbation of the default start
  int stagnation_sweeps = 10;
  double stagnation_tol = 1e-12;
  double polish_switch = 1e-2;     ///< mountain pass: path residual at which Newton takes over
  double newton_handover = 1e-5;   ///< minimizers: descent residual at which Newton takes over
  bool parallel_sweep = false;

  void validate() const {
    if (max_iters <= 0 || !(tol > 0.0) || !(backtrack > 0.0 && backtrack < 1.0) || path_points < 2 ||
        stagnation_sweeps <= 0 || !(stagnation_tol > 0.0) || !(polish_switch > 0.0) || !(newton_handover > 0.0) || !(noise >= 0.0)) {
      throw InadmissibleCall("solver options must be positive");
    }
    if (!(c_armijo > 0.0 && c_armijo <= 0.5)) throw InadmissibleCall("c_armijo must lie in (0, 0.5]");
  }
};

struct HistoryRow {
  int iter = 0;
  double level = 0.0;
  double residual = 0.0;
  double lambda = 0.0;
  double step = 0.0;
  double h_value = 0.0;    ///< H(u) at the accepted iterate
  double h_pairing = 0.0;  ///< <H'(u), u> at the accepted iterate
  const char* phase = "descent";
};

struct EigenPair {
  double lambda = 0.0;
  FeFunction u;
  double residual_dual_norm = std::numeric_limits<double>::infinity();
  double residual_euclidean = std::numeric_limits<double>::infinity();
  double level = 0.0;
  std::string method;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<HistoryRow> history;
};

struct RetractionResult {
  double t = 0.0;
  FeFunction u_scaled;
  double achieved_H = 0.0;
};

/// Constant 1 plus seeded uniform noise of amplitude opts.noise.
inline FeFunction default_initial_state(const FeSpace& space, const SolverOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FeFunction u = space.constant(1.0);
  for (Eigen::Index k = 0; k < u.size(); ++k) u.values[k] += opts.noise * unit(rng);
  return u;
}

/// Scales u onto {H = r}: finds t > 0 with H(t u) = r. H(t u) = sum_i t^{q_i} H_i(u)
/// is strictly increasing in t, so the root is unique.
inline RetractionResult retract(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u, double r) {
  if (!(r > 0.0)) throw DomainError("retraction level r must be positive");
  const auto parts = eval_H_parts(space, spec, u);
  const double total = parts[0] + parts[1];
  if (!(total > 0.0)) throw NotRetractable("H(u) = 0: u vanishes on the support of alpha and beta");
  const std::array<double, 2> q{spec[1].q, spec[2].q};
  auto phi = [&](double t) { return parts[0] * std::pow(t, q[0]) + parts[1] * std::pow(t, q[1]); };
  auto dphi = [&](double t) {
    return parts[0] * q[0] * std::pow(t, q[0] - 1.0) + parts[1] * q[1] * std::pow(t, q[1] - 1.0);
  };

  double t;
  if (parts[0] == 0.0 || parts[1] == 0.0 || q[0] == q[1]) {
    const double qq = parts[0] != 0.0 ? q[0] : q[1];
    t = std::pow(r / total, 1.0 / qq);
  } else {
    double lo = 0.0, hi = 1.0;
    while (phi(hi) < r) lo = hi, hi *= 2.0;
    while (hi > 1e-300 && phi(0.5 * hi) >= r) hi *= 0.5;
    t = std::max(0.5 * (lo + hi), 0.5 * hi);
    for (int it = 0; it < 200; ++it) {
      const double f = phi(t) - r;
      if (f == 0.0) break;
      (f < 0.0 ? lo : hi) = t;
      double next = t - f / dphi(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * t) {
        t = next;
        break;
      }
      t = next;
    }
  }
  RetractionResult out{t, t * u, 0.0};
  out.achieved_H = eval_H(space, spec, out.u_scaled);
  return out;
}

/// <J'(u), u> / <H'(u), u>
inline double lambda_of(const FeSpace& space, const ProblemSpec& spec, const FeFunction& u) {
  const double den = grad_H(space, spec, u)(u);
  if (den == 0.0) throw DegenerateDirection("<H'(u), u> = 0");
  return grad_J(space, spec, u)(u) / den;
}

namespace detail {

inline double energy_slack(double level) { return 1e-14 * std::max(std::abs(level), 1e-300); }

/// Barzilai-Borwein length in the P metric, clamped; falls back to growth of the last step.
inline double bb_step(const FeSpace& space, const Eigen::VectorXd& dx, const Eigen::VectorXd& dg, double last) {
  const double num = dx.dot(space.preconditioner() * dx);
  const double den = dx.dot(dg);
  double s = (den > 0.0 && num > 0.0) ? num / den : 2.0 * last;
  return std::clamp(s, 1e-12, 1e12);
}

inline void finish(EigenPair& pair, const FeSpace& space, const ProblemSpec& spec, double tol) {
  const Residual res = residual(space, spec, pair.u, pair.lambda);
  pair.residual_dual_norm = res.dual_norm;
  pair.residual_euclidean = res.euclidean_norm;
  pair.converged = res.is_eigenpair(tol);
  if (!res.nonzero_state) pair.message = "zero state is not an eigenfunction";
}

/// Newton-Krylov on F(u) = J_lambda'(u) = 0 with FD Jacobian-vector products.
/// Accepts a step only if the dual residual norm decreases (and, when
/// `monotone`, J_lambda does not increase beyond roundoff).
inline void newton_polish_free(const FeSpace& space, const ProblemSpec& spec, double lambda, EigenPair& pair,
                               const SolverOptions& opts, bool monotone) {
  auto F = [&](const FeFunction& v) { return grad_J_lambda(space, spec, v, lambda).values; };
  Eigen::VectorXd Fu = F(pair.u);
  double res = space.dual_norm({Fu});
  double level = eval_J_lambda(space, spec, pair.u, lambda);
  const int n = static_cast<int>(space.size());
  while (res > opts.tol && pair.iterations < opts.max_iters) {
    const double scale = std::max(1.0, pair.u.values.cwiseAbs().maxCoeff());
    auto apply_J = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      const double vmax = v.cwiseAbs().maxCoeff();
      if (vmax == 0.0) return Eigen::VectorXd::Zero(v.size());
      const double eps = 1e-6 * scale / vmax;
      return (F({pair.u.values + eps * v}) - F({pair.u.values - eps * v})) / (2.0 * eps);
    };
    const auto sol = minres(apply_J, [&](const Eigen::VectorXd& v) { return space.apply_Pinv(v); }, -Fu, 1e-10,
                            4 * n + 20);
    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, s *= 0.5) {
      FeFunction cand{pair.u.values + s * sol.x};
      const Eigen::VectorXd Fc = F(cand);
      const double rc = space.dual_norm({Fc});
      const double lc = eval_J_lambda(space, spec, cand, lambda);
      if (rc < (1.0 - 1e-4 * s) * res && (!monotone || lc <= level + energy_slack(level))) {
        pair.u = std::move(cand);
        Fu = Fc;
        res = rc;
        level = lc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++pair.iterations;
    pair.history.push_back({pair.iterations, level, res, lambda, s, 0.0, 0.0, "newton"});
  }
  pair.level = level;
}

/// Unconstrained Armijo descent on J_lambda along -P^{-1} J_lambda'(u).
/// Stops at `stop_at` residual or on line-search failure.
inline void descend_free(const FeSpace& space, const ProblemSpec& spec, double lambda, EigenPair& pair,
                         const SolverOptions& opts, double stop_at) {
  FeFunction& u = pair.u;
  double level = eval_J_lambda(space, spec, u, lambda);
  DualVector R = grad_J_lambda(space, spec, u, lambda);
  FeFunction d = space.riesz(R);
  double slope = R(d);
  double step = 1.0;
  while (pair.iterations < opts.max_iters) {
    const double res = std::sqrt(std::max(0.0, slope));
    if (res <= stop_at) break;
    bool accepted = false;
    FeFunction cand;
    double cand_level = 0.0;
    for (int ls = 0; ls < 80; ++ls) {
      cand = FeFunction{u.values - step * d.values};
      cand_level = eval_J_lambda(space, spec, cand, lambda);
      if (cand_level <= level - opts.c_armijo * step * slope + energy_slack(level)) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      pair.message = "line search failed";
      break;
    }
    const DualVector Rn = grad_J_lambda(space, spec, cand, lambda);
    const double used = step;
    step = bb_step(space, cand.values - u.values, Rn.values - R.values, step);
    u = std::move(cand);
    level = cand_level;
    R = Rn;
    d = space.riesz(R);
    slope = R(d);
    ++pair.iterations;
    pair.history.push_back({pair.iterations, level, std::sqrt(std::max(0.0, slope)), lambda, used, 0.0, 0.0});
  }
  pair.level = level;
}

}  // namespace detail

/// Lowest constrained critical point of J on {H = r}. The returned lambda
/// is the Lagrange multiplier <J'(u),u>/<H'(u),u> at the final iterate.
inline EigenPair minimize_on_Mr(const FeSpace& space, const ProblemSpec& spec, double r, const FeFunction& u0,
                                const SolverOptions& opts) {
  opts.validate();
  check_compatible(space, spec);
  const HypothesisReport rep = check_hypotheses(spec);
  if (rep.regime == Regime::Inadmissible) throw InadmissibleCall("hypotheses for constrained minimization fail");

  EigenPair pair;
  pair.method = "min-mr";
  pair.u = retract(space, spec, u0, r).u_scaled;

  struct State {
    double level, lambda, h_value, h_pairing, slope;
    DualVector R;
    FeFunction d;
  };
  auto evaluate = [&](const FeFunction& u) {
    const DualVector gJ = grad_J(space, spec, u);
    const DualVector gH = grad_H(space, spec, u);
    const double pairing = gH(u);
    if (pairing == 0.0) throw DegenerateDirection("<H'(u), u> = 0");
    const double lam = gJ(u) / pairing;
    DualVector R{gJ.values - lam * gH.values};
    FeFunction d = space.riesz(R);
    const double slope = R(d);
    return State{eval_J(space, spec, u), lam, eval_H(space, spec, u), pairing, slope, std::move(R), std::move(d)};
  };

  State s = evaluate(pair.u);
  pair.history.push_back({0, s.level, std::sqrt(std::max(0.0, s.slope)), s.lambda, 0.0, s.h_value, s.h_pairing});
  double step = 1.0;
  auto accept = [&](FeFunction next, State ns, double used, const char* phase) {
    pair.u = std::move(next);
    s = std::move(ns);
    ++pair.iterations;
    pair.history.push_back(
        {pair.iterations, s.level, std::sqrt(std::max(0.0, s.slope)), s.lambda, used, s.h_value, s.h_pairing, phase});
  };

  // Descent phase.
  while (pair.iterations < opts.max_iters) {
    const double res = std::sqrt(std::max(0.0, s.slope));
    if (res <= opts.tol) break;
    bool accepted = false;
    FeFunction cand;
    double cand_level = 0.0;
    for (int ls = 0; ls < 80; ++ls) {
      cand = retract(space, spec, FeFunction{pair.u.values - step * s.d.values}, r).u_scaled;
      cand_level = eval_J(space, spec, cand);
      if (cand_level <= s.level - opts.c_armijo * step * s.slope + detail::energy_slack(s.level)) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) break;
    State ns = evaluate(cand);
    const double used = step;
    step = detail::bb_step(space, cand.values - pair.u.values, ns.R.values - s.R.values, step);
    accept(std::move(cand), std::move(ns), used, "descent");
    if (std::sqrt(std::max(0.0, s.slope)) <= opts.newton_handover) break;
  }

  // Newton polish on the bordered system [A  -g; -g^T 0] for (du, dlambda),
  // A = J'' - lambda H'' (FD products), g = H'(u); the result is retracted.
  const int n = static_cast<int>(space.size());
  while (std::sqrt(std::max(0.0, s.slope)) > opts.tol && pair.iterations < opts.max_iters) {
    const FeFunction& u = pair.u;
    const double lam = s.lambda;
    const Eigen::VectorXd g = grad_H(space, spec, u).values;
    const Eigen::VectorXd Pinv_g = space.apply_Pinv(g);
    const double schur = std::max(g.dot(Pinv_g), std::numeric_limits<double>::min());
    const double scale = std::max(1.0, u.values.cwiseAbs().maxCoeff());
    auto Ft = [&](const Eigen::VectorXd& v) {
      const FeFunction w{v};
      return Eigen::VectorXd(grad_J(space, spec, w).values - lam * grad_H(space, spec, w).values);
    };
    auto apply_A = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      const Eigen::VectorXd v = x.head(n);
      Eigen::VectorXd out(n + 1);
      const double vmax = v.cwiseAbs().maxCoeff();
      if (vmax == 0.0) {
        out.head(n).setZero();
      } else {
        const double eps = 1e-6 * scale / vmax;
        out.head(n) = (Ft(u.values + eps * v) - Ft(u.values - eps * v)) / (2.0 * eps);
      }
      out.head(n) -= x[n] * g;
      out[n] = -g.dot(v);
      return out;
    };
    auto apply_M = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd out(n + 1);
      out.head(n) = space.apply_Pinv(x.head(n));
      out[n] = x[n] / schur;
      return out;
    };
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -s.R.values;
    rhs[n] = s.h_value - r;
    const auto sol = minres(apply_A, apply_M, rhs, 1e-10, 4 * n + 20);
    const double res = std::sqrt(std::max(0.0, s.slope));
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      FeFunction cand = retract(space, spec, FeFunction{u.values + t * sol.x.head(n)}, r).u_scaled;
      State ns = evaluate(cand);
      if (std::sqrt(std::max(0.0, ns.slope)) < (1.0 - 1e-4 * t) * res &&
          ns.level <= s.level + detail::energy_slack(s.level)) {
        accept(std::move(cand), std::move(ns), t, "newton");
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  pair.lambda = s.lambda;
  pair.level = s.level;
  detail::finish(pair, space, spec, opts.tol);
  if (!pair.converged && pair.message.empty()) {
    pair.message = pair.iterations >= opts.max_iters ? "max_iters exceeded" : "stalled above tolerance";
  }
  return pair;
}

inline EigenPair minimize_on_Mr(const FeSpace& space, const ProblemSpec& spec, double r, const SolverOptions& opts) {
  return minimize_on_Mr(space, spec, r, default_initial_state(space, opts), opts);
}

namespace detail {
inline void require_regime(const ProblemSpec& spec, Regime wanted, double lambda) {
  if (!(lambda > 0.0)) throw InadmissibleCall("lambda must be positive");
  const HypothesisReport rep = check_hypotheses(spec);
  if (rep.regime != wanted) {
    throw InadmissibleCall(std::string("regime mismatch: solver requires ") + regime_name(wanted) + ", problem is " +
                           regime_name(rep.regime));
  }
}

inline EigenPair run_free_minimization(const FeSpace& space, const ProblemSpec& spec, double lambda, FeFunction start,
                                       const SolverOptions& opts) {
  EigenPair pair;
  pair.method = "jlambda-min";
  pair.lambda = lambda;
  pair.u = std::move(start);
  pair.history.push_back({0, eval_J_lambda(space, spec, pair.u, lambda),
                          residual(space, spec, pair.u, lambda).dual_norm, lambda, 0.0, 0.0, 0.0});
  descend_free(space, spec, lambda, pair, opts, opts.newton_handover);
  newton_polish_free(space, spec, lambda, pair, opts, true);
  finish(pair, space, spec, opts.tol);
  return pair;
}
}  // namespace detail

/// Minimizer of J_lambda (regime q_max < p_min). Runs from u0 and from a
/// small constant with negative energy; returns the lower-energy result.
inline EigenPair minimize_J_lambda(const FeSpace& space, const ProblemSpec& spec, double lambda, const FeFunction& u0,
                                   const SolverOptions& opts) {
  opts.validate();
  check_compatible(space, spec);
  detail::require_regime(spec, Regime::Thm2b, lambda);

  double t = 1.0;
  for (int k = 0; k < 200 && eval_J_lambda(space, spec, space.constant(t), lambda) >= 0.0; ++k) t *= 0.5;

  EigenPair a = detail::run_free_minimization(space, spec, lambda, u0, opts);
  EigenPair b = detail::run_free_minimization(space, spec, lambda, space.constant(t), opts);
  auto better = [](const EigenPair& x, const EigenPair& y) {
    if (x.converged != y.converged) return x.converged;
    return x.level <= y.level;
  };
  EigenPair out = better(a, b) ? std::move(a) : std::move(b);
  if (out.converged && !(out.level < 0.0)) {
    out.converged = false;
    out.message = "minimizer has nonnegative energy";
  }
  if (!out.converged && out.message.empty()) {
    out.message = out.iterations >= opts.max_iters ? "max_iters exceeded" : "stalled above tolerance";
  }
  return out;
}

inline EigenPair minimize_J_lambda(const FeSpace& space, const ProblemSpec& spec, double lambda,
                                   const SolverOptions& opts) {
  return minimize_J_lambda(space, spec, lambda, default_initial_state(space, opts), opts);
}

/// Mountain-pass critical point of J_lambda (regime p_max < q_min).
///
/// A polygonal path from 0 to a constant e with J_lambda(e) < 0 is
/// deformed by moving its highest interior point along the Sobolev
/// gradient, re-equidistributing the points in the P norm after each
/// move. Once the path maximum stagnates or its residual falls below
/// polish_switch, the maximal point is refined by Newton-Krylov.
inline EigenPair mountain_pass(const FeSpace& space, const ProblemSpec& spec, double lambda,
                               const SolverOptions& opts) {
  opts.validate();
  check_compatible(space, spec);
  detail::require_regime(spec, Regime::Thm2a, lambda);

  EigenPair pair;
  pair.method = "jlambda-mp";
  pair.lambda = lambda;

  double t = 1.0;
  for (int k = 0; k < 200 && eval_J_lambda(space, spec, space.constant(t), lambda) >= 0.0; ++k) t *= 2.0;
  const FeFunction e = space.constant(t);
  if (!(eval_J_lambda(space, spec, e, lambda) < 0.0)) {
    pair.message = "no endpoint with negative energy found";
    return pair;
  }

  const int P = opts.path_points;
  std::vector<FeFunction> path;
  for (int j = 0; j <= P; ++j) path.push_back((static_cast<double>(j) / P) * e);
  std::vector<double> values(path.size());
  for (std::size_t j = 0; j < path.size(); ++j) values[j] = eval_J_lambda(space, spec, path[j], lambda);

  double spacing = 0.0;  // mean P-norm distance between neighbouring points
  auto reparametrize = [&]() {
    std::vector<double> arc(path.size(), 0.0);
    for (std::size_t j = 1; j < path.size(); ++j) {
      arc[j] = arc[j - 1] + space.primal_norm(FeFunction{path[j].values - path[j - 1].values});
    }
    const double total = arc.back();
    std::vector<FeFunction> fresh{path.front()};
    std::size_t seg = 1;
    for (int j = 1; j < P; ++j) {
      const double target = total * j / P;
      while (seg + 1 < path.size() && arc[seg] < target) ++seg;
      const double len = arc[seg] - arc[seg - 1];
      const double w = len > 0.0 ? (target - arc[seg - 1]) / len : 0.0;
      fresh.push_back(FeFunction{(1.0 - w) * path[seg - 1].values + w * path[seg].values});
    }
    fresh.push_back(path.back());
    path = std::move(fresh);
    for (std::size_t j = 0; j < path.size(); ++j) values[j] = eval_J_lambda(space, spec, path[j], lambda);
    spacing = total / P;
  };
  auto argmax = [&] {
    return static_cast<std::size_t>(std::max_element(values.begin() + 1, values.end() - 1) - values.begin());
  };
  reparametrize();

  double step = 1.0;
  double best_max = values[argmax()];
  int since_improvement = 0;
  while (pair.iterations < opts.max_iters) {
    const std::size_t k = argmax();
    const DualVector R = grad_J_lambda(space, spec, path[k], lambda);
    const FeFunction d = space.riesz(R);
    const double slope = R(d);
    const double res = std::sqrt(std::max(0.0, slope));
    if (res <= opts.polish_switch) break;
    // A move longer than the point spacing would tear the path apart.
    step = std::min(2.0 * step, 0.5 * spacing / res);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      FeFunction cand{path[k].values - step * d.values};
      const double lc = eval_J_lambda(space, spec, cand, lambda);
      if (lc <= values[k] - opts.c_armijo * step * slope) {
        path[k] = std::move(cand);
        moved = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!moved) break;
    reparametrize();
    const double path_max = values[argmax()];
    ++pair.iterations;
    pair.history.push_back({pair.iterations, path_max, res, lambda, step, 0.0, 0.0, "path"});
    if (path_max < best_max - opts.stagnation_tol * std::max(1.0, std::abs(best_max))) {
      best_max = path_max;
      since_improvement = 0;
    } else if (++since_improvement >= opts.stagnation_sweeps) {
      break;
    }
  }

  pair.u = path[argmax()];
  detail::newton_polish_free(space, spec, lambda, pair, opts, false);
  detail::finish(pair, space, spec, opts.tol);
  if (pair.converged && !(pair.level > 0.0)) {
    pair.converged = false;
    pair.message = "critical point has nonpositive energy";
  }
  if (!pair.converged && pair.message.empty()) {
    pair.message = pair.iterations >= opts.max_iters ? "max_iters exceeded" : "stagnated above tolerance";
  }
  return pair;
}

struct SweepRow {
  double lambda = 0.0;
  double level = 0.0;
  double residual = 0.0;
  int iters = 0;
  bool success = false;
  std::string message;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool success = true;
};

/// Solves at each lambda, dispatching on the regime; rows keep the input order.
inline SweepReport sweep_lambda(const FeSpace& space, const ProblemSpec& spec, const std::vector<double>& lambdas,
                                const SolverOptions& opts) {
  opts.validate();
  check_compatible(space, spec);
  const Regime regime = check_hypotheses(spec).regime;
  if (regime != Regime::Thm2a && regime != Regime::Thm2b) {
    throw InadmissibleCall(std::string("regime mismatch: sweep requires thm2a or thm2b, problem is ") +
                           regime_name(regime));
  }
  auto solve_row = [&](double lambda) {
    SweepRow row;
    row.lambda = lambda;
    try {
      const EigenPair pair = regime == Regime::Thm2a ? mountain_pass(space, spec, lambda, opts)
                                                     : minimize_J_lambda(space, spec, lambda, opts);
      row = {lambda, pair.level, pair.residual_dual_norm, pair.iterations, pair.converged, pair.message};
    } catch (const Error& err) {
      row.message = err.what();
      row.residual = std::numeric_limits<double>::infinity();
    }
    return row;
  };
  SweepReport report;
  if (opts.parallel_sweep) {
    std::vector<std::future<SweepRow>> jobs;
    for (double lambda : lambdas) jobs.push_back(std::async(std::launch::async, solve_row, lambda));
    for (auto& job : jobs) report.rows.push_back(job.get());
  } else {
    for (double lambda : lambdas) report.rows.push_back(solve_row(lambda));
  }
  for (const auto& row : report.rows) report.success = report.success && row.success;
  return report;
}

}  // namespace tpe
