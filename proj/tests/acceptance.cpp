// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "tpe/config.hpp"
#include "tpe/io.hpp"

using namespace tpe;
using namespace tpe::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) o.require(false, "runtime " + std::to_string(secs) + " s over limit");
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-28s %7.3f s (limit %g s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name, secs, limit_s,
              o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

RunConfig shipped(const std::string& name) { return load_config(std::string(TPE_CONFIG_DIR) + "/" + name); }

// Every minimize_on_Mr run with the problem it solved, for the constraint check.
struct MrRun {
  ProblemSpec spec;
  double r;
  EigenPair pair;
};
std::vector<MrRun> mr_runs;

/// (level, iterations) of every solver run in criteria 5-9, in order.
using Fingerprint = std::vector<std::pair<double, int>>;

EigenPair solve_mr(const FeSpace& s, const ProblemSpec& spec, double r, const FeFunction& u0, Fingerprint& fp) {
  EigenPair p = minimize_on_Mr(s, spec, r, u0, SolverOptions{});
  fp.emplace_back(p.level, p.iterations);
  mr_runs.push_back({spec, r, p});
  return p;
}

Outcome linear_oracle(Fingerprint& fp) {
  Outcome o;
  const FeSpace s = interval(64);
  const auto spec = two_domain(1, bulk(PowerG{1.0, 2.0}, 2.0), bulk(PowerG{4.0, 2.0}, 2.0));
  LinearPencil c;
  c.kappa = {1.0, 4.0};
  const EigenPair a = solve_mr(s, spec, 1.0, default_initial_state(s, SolverOptions{}), fp);
  const double da = std::abs(a.lambda - dense_linear_eigs(s, c, 1)[0].lambda);
  o.require(a.converged && da <= 1e-8, "alpha pencil mismatch " + std::to_string(da));

  const auto stek = two_domain(1, steklov(1.0), steklov(4.0));
  c.alpha = {0.0, 0.0};
  c.beta = {1.0, 1.0};
  const EigenPair b = solve_mr(s, stek, 1.0, s.constant(1.0), fp);
  const double db = std::abs(b.lambda - dense_linear_eigs(s, c, 1)[0].lambda);
  o.require(b.converged && db <= 1e-8, "steklov pencil mismatch " + std::to_string(db));
  char buf[96];
  std::snprintf(buf, sizeof buf, "|dlambda| = %.1e, %.1e", da, db);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome steklov_convergence(Fingerprint& fp) {
  Outcome o;
  const double ref_single = std::tanh(0.5);
  const double ref_trans = steklov_shooting(1.0, 4.0, 0.5, ShootingMode::Transmission);
  const auto single = single_domain(1, steklov(1.0), EuclideanNorm{});
  const auto trans = two_domain(1, steklov(1.0), steklov(4.0));
  std::string orders;
  for (const auto* variant : {&single, &trans}) {
    const double ref = variant == &single ? ref_single : ref_trans;
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
      const FeSpace s = interval(n);
      const EigenPair p = solve_mr(s, *variant, 1.0, s.constant(1.0), fp);
      o.require(p.converged, "n=" + std::to_string(n) + " did not converge");
      err.push_back(std::abs(p.lambda - ref));
    }
    for (std::size_t k = 1; k < err.size(); ++k) {
      const double order = std::log2(err[k - 1] / err[k]);
      o.require(order >= 1.8, "observed order " + std::to_string(order));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%.2f", orders.empty() ? "" : " ", order);
      orders += buf;
    }
    o.require(err.back() <= 1e-3, "error at n=64 " + std::to_string(err.back()));
  }
  if (o.pass) o.detail = "orders " + orders;
  return o;
}

Outcome sweep_thm2b(Fingerprint& fp) {
  Outcome o;
  const RunConfig cfg = shipped("thm2b_transmission_1d.json");
  const FeSpace s(build_mesh(cfg.mesh));
  o.require(s.cells().size() == 128, "mesh is not n=128");
  const SweepReport rep = sweep_lambda(s, cfg.problem, {0.5, 1.0, 2.0, 5.0}, cfg.solver);
  double worst = 0.0;
  for (const auto& row : rep.rows) {
    fp.emplace_back(row.level, row.iters);
    o.require(row.success, "lambda " + std::to_string(row.lambda) + ": " + row.message);
    o.require(row.level < 0.0, "nonnegative level at lambda " + std::to_string(row.lambda));
    o.require(row.residual <= 1e-6, "residual at lambda " + std::to_string(row.lambda));
    worst = std::max(worst, row.residual);
  }
  o.require(rep.rows.size() == 4, "row count");
  if (o.pass) o.detail = "max residual " + format_double(worst);
  return o;
}

Outcome mountain_pass_runs(Fingerprint& fp) {
  Outcome o;
  double worst = 0.0, lowest = INFINITY;
  for (const char* name : {"thm2a_single_1d.json", "thm2a_transmission_1d.json"}) {
    const RunConfig cfg = shipped(name);
    const FeSpace s(build_mesh(cfg.mesh));
    for (double lambda : {1.0, 2.0}) {
      const EigenPair p = mountain_pass(s, cfg.problem, lambda, cfg.solver);
      fp.emplace_back(p.level, p.iterations);
      const std::string tag = std::string(name) + " lambda " + format_double(lambda);
      o.require(p.converged, tag + ": " + p.message);
      o.require(p.level > 0.0, tag + ": level not positive");
      o.require(p.residual_dual_norm <= 1e-5, tag + ": residual");
      worst = std::max(worst, p.residual_dual_norm);
      lowest = std::min(lowest, p.level);
    }
  }
  if (o.pass) o.detail = "min level " + format_double(lowest) + ", max residual " + format_double(worst);
  return o;
}

}  // namespace

int main() {
  criterion(1, "F-properties", 1.0, [] {
    Outcome o;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    for (int dim : {1, 2}) {
      for (const auto& n : all_norms()) {
        const NormBounds b = norm_bounds(n, dim);
        for (int k = 0; k < 10000; ++k) {
          GradVec xi(dim);
          for (int d = 0; d < dim; ++d) xi[d] = normal(rng) * log_uniform(rng, 1e-3, 1e3);
          const double f = eval_F(n, xi), e = xi.norm();
          o.require(std::abs(grad_F(n, xi).dot(xi) - f) <= 1e-12 * f, "Euler identity");
          o.require(f >= b.m * e * (1 - 1e-12) && f <= b.M * e * (1 + 1e-12), "equivalence bounds");
        }
      }
    }
    return o;
  });

  criterion(2, "G-hypotheses", 5.0, [] {
    Outcome o;
    std::mt19937_64 rng(2);
    for (const auto& g : certified_families()) {
      const GMeta m = g_meta(g);
      const std::string name = family_name(g);
      for (int k = 0; k < 10000; ++k) {
        const double y1 = log_uniform(rng, 1e-4, 1e4), y2 = log_uniform(rng, 1e-4, 1e4);
        if (std::abs(y1 - y2) > 1e-6 * std::max(y1, y2)) {
          o.require((eval_Gy(g, y1) - eval_Gy(g, y2)) * (y1 - y2) > 0.0, name + ": G_y not increasing");
        }
        const double G = eval_G(g, y1), Gy = eval_Gy(g, y1);
        o.require(y1 * Gy >= G * (1 - 1e-12), name + ": y G_y < G");
        o.require(Gy <= m.a * (1 + std::pow(y1, m.p - 1)) * (1 + 1e-12), name + ": growth bound");
      }
      o.require(m.hg4 && hg4_scan(g, *m.delta, *m.c, hypothesis_grid()) <= 1e-12, name + ": certificate");
    }
    const GFamily bad = LogCounterexampleG{2.0};
    ProblemSpec spec = mixed_power(1, 4.0);
    spec[1].g = bad;
    o.require(!g_meta(bad).hg4 && !check_hypotheses(spec).hg4.pass, "counterexample not flagged");
    o.require(hg4_scan(bad, 1.5, 1.0, log_grid(1e1, 1e6, 6)) > 0.0, "counterexample shows no violation");
    return o;
  });

  criterion(3, "gradient consistency", 30.0, [] {
    Outcome o;
    double worst = 0.0;
    for (const auto& c : gradient_consistency_cases()) {
      o.require(c.J.pass, c.label + ": grad_J");
      o.require(c.H.pass, c.label + ": grad_H");
      worst = std::max({worst, c.J.rel_error, c.H.rel_error});
    }
    if (o.pass) o.detail = "worst relative error " + format_double(worst);
    return o;
  });

  criterion(4, "flux monotonicity", 10.0, [] {
    Outcome o;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    double worst = INFINITY;
    for (const auto& g : all_families()) {
      for (const auto& n : all_norms()) {
        for (int k = 0; k < 10000; ++k) {
          GradVec x(2), y(2);
          const double sx = std::pow(10.0, (k % 5) - 2.0), sy = std::pow(10.0, ((k / 5) % 5) - 2.0);
          for (int d = 0; d < 2; ++d) {
            x[d] = sx * normal(rng);
            y[d] = sy * normal(rng);
          }
          const double v = (flux(g, n, x) - flux(g, n, y)).dot(x - y);
          worst = std::min(worst, v);
          o.require(v >= -1e-12, std::string(family_name(g)) + ": negative pairing");
        }
      }
    }
    if (o.pass) o.detail = "min pairing " + format_double(worst);
    return o;
  });

  Fingerprint first;
  criterion(5, "linear oracle equivalence", 5.0, [&] { return linear_oracle(first); });
  criterion(6, "Steklov convergence", 10.0, [&] { return steklov_convergence(first); });

  criterion(7, "constant eigenpairs", 1.0, [] {
    Outcome o;
    const struct {
      double p, q, lambda;
    } cases[] = {{2, 4, 1}, {2, 4, 2}, {2, 1.5, 1}, {2, 1.5, 4}, {3, 1.5, 1}};
    double worst = 0.0;
    for (int dim : {1, 2}) {
      const FeSpace s = dim == 1 ? interval(32) : FeSpace(generate_split_square(8, 8, 0.5));
      for (const auto& c : cases) {
        auto a = bulk(PowerG{1.0, c.p}, c.q);
        a.rho = a.alpha = 0.6;
        const double res =
            residual(s, two_domain(dim, a, a), s.constant(std::pow(c.lambda, 1.0 / (c.p - c.q))), c.lambda).dual_norm;
        worst = std::max(worst, res);
        o.require(res <= 1e-12, "residual " + format_double(res));
      }
    }
    if (o.pass) o.detail = "max residual " + format_double(worst);
    return o;
  });

  criterion(8, "negative-level sweep", 60.0, [&] { return sweep_thm2b(first); });
  criterion(9, "mountain pass", 120.0, [&] { return mountain_pass_runs(first); });

  criterion(10, "constraint integrity", 1.0, [] {
    Outcome o;
    std::size_t rows = 0;
    for (const auto& run : mr_runs) {
      const auto rep = check_hypotheses(run.spec);
      for (const auto& h : run.pair.history) {
        ++rows;
        o.require(std::abs(h.h_value - run.r) <= 1e-12 * run.r, "H(u) off the constraint");
        o.require(h.h_pairing >= rep.q_min * run.r * (1 - 1e-12) && h.h_pairing <= rep.q_max * run.r * (1 + 1e-12),
                  "<H'(u),u> outside [q_min r, q_max r]");
      }
    }
    o.require(!mr_runs.empty(), "no constrained runs recorded");
    if (o.pass) o.detail = std::to_string(mr_runs.size()) + " runs, " + std::to_string(rows) + " iterates";
    return o;
  });

  criterion(11, "determinism", 200.0, [&] {
    Outcome o;
    Fingerprint second;
    linear_oracle(second);
    steklov_convergence(second);
    sweep_thm2b(second);
    mountain_pass_runs(second);
    o.require(first.size() == second.size(), "run count differs");
    for (std::size_t k = 0; k < std::min(first.size(), second.size()); ++k) {
      o.require(first[k].first == second[k].first, "level differs in run " + std::to_string(k));
      o.require(first[k].second == second[k].second, "iteration count differs in run " + std::to_string(k));
    }
    if (o.pass) o.detail = std::to_string(first.size()) + " runs bit-identical";
    return o;
  });

  std::printf("%s: %d of 11 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
