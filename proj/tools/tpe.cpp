// Command-line front end: check | solve | sweep | gradcheck | oracle | mesh.
//
// Exit codes: 0 success, 2 inadmissible problem or regime mismatch,
// 3 nonconvergence or failed check, 64 usage or parse error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "tpe/config.hpp"
#include "tpe/io.hpp"
#include "tpe/oracles.hpp"
#include "tpe/tpe.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInadmissible = 2;
constexpr int kNotConverged = 3;
constexpr int kUsage = 64;

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<std::string> lambdas;
  std::optional<double> r;
  std::optional<double> tol;
  std::optional<std::string> method;
  std::string oracle_action = "compare";
};

struct Context {
  tpe::RunConfig cfg;
  tpe::Mesh mesh;
  std::string hash;
  fs::path out;
};

Context prepare(const Flags& f) {
  Context ctx;
  ctx.cfg = tpe::load_config(f.config);
  if (f.seed) ctx.cfg.solver.seed = *f.seed;
  if (f.lambda) ctx.cfg.lambda = *f.lambda;
  if (f.lambdas) ctx.cfg.lambdas = tpe::parse_lambda_list(*f.lambdas);
  if (f.r) ctx.cfg.r = *f.r;
  if (f.tol) ctx.cfg.solver.tol = *f.tol;
  if (f.method) {
    const auto& names = tpe::method_names();
    if (std::find(names.begin(), names.end(), *f.method) == names.end()) {
      throw tpe::ParseError("unknown method '" + *f.method + "'");
    }
    ctx.cfg.method = *f.method;
  }
  ctx.cfg.solver.validate();
  ctx.mesh = tpe::build_mesh(ctx.cfg.mesh);
  ctx.hash = tpe::mesh_hash(ctx.mesh);
  ctx.out = f.out;
  fs::create_directories(ctx.out);
  return ctx;
}

void write_json(const fs::path& path, const json& j) { tpe::write_text(path.string(), j.dump(2) + "\n"); }

json run_metadata(const Context& ctx) {
  return {{"mesh_hash", ctx.hash},
          {"problem", tpe::problem_to_json(ctx.cfg.problem)},
          {"solver", tpe::solver_options_to_json(ctx.cfg.solver)},
          {"seed", ctx.cfg.solver.seed}};
}

int cmd_check(const Context& ctx) {
  const auto rep = tpe::check_hypotheses(ctx.cfg.problem);
  json j = tpe::report_to_json(rep);
  write_json(ctx.out / "report.json", j);
  std::cout << j.dump(2) << "\n";
  return rep.regime == tpe::Regime::Inadmissible ? kInadmissible : kOk;
}

int cmd_solve(const Context& ctx) {
  const tpe::FeSpace space(ctx.mesh);
  const auto& cfg = ctx.cfg;
  tpe::EigenPair pair;
  if (cfg.method == "min-mr") {
    pair = tpe::minimize_on_Mr(space, cfg.problem, cfg.r, cfg.solver);
  } else {
    if (!cfg.lambda) throw tpe::ParseError("method " + cfg.method + " needs lambda");
    pair = cfg.method == "jlambda-min" ? tpe::minimize_J_lambda(space, cfg.problem, *cfg.lambda, cfg.solver)
                                       : tpe::mountain_pass(space, cfg.problem, *cfg.lambda, cfg.solver);
  }
  json ej = tpe::eigenpair_to_json(pair, ctx.hash);
  ej["seed"] = cfg.solver.seed;
  if (cfg.method == "min-mr") {
    ej["r"] = cfg.r;
    ej["H"] = tpe::eval_H(space, cfg.problem, pair.u);
  }
  write_json(ctx.out / "eigenpair.json", ej);
  std::ostringstream csv, hist;
  tpe::write_eigenfunction_csv(csv, ctx.mesh, pair.u);
  tpe::write_history_csv(hist, pair.history);
  tpe::write_text((ctx.out / "eigenfunction.csv").string(), csv.str());
  tpe::write_text((ctx.out / "history.csv").string(), hist.str());
  json rep = run_metadata(ctx);
  rep["command"] = "solve";
  rep["method"] = cfg.method;
  rep["success"] = pair.converged;
  rep["hypotheses"] = tpe::report_to_json(tpe::check_hypotheses(cfg.problem));
  write_json(ctx.out / "report.json", rep);
  std::printf("%s: lambda=%s level=%s residual=%s iterations=%d %s\n", cfg.method.c_str(),
              tpe::format_double(pair.lambda).c_str(), tpe::format_double(pair.level).c_str(),
              tpe::format_double(pair.residual_dual_norm).c_str(), pair.iterations,
              pair.converged ? "converged" : ("FAILED: " + pair.message).c_str());
  return pair.converged ? kOk : kNotConverged;
}

int cmd_sweep(const Context& ctx) {
  const tpe::FeSpace space(ctx.mesh);
  const auto report = tpe::sweep_lambda(space, ctx.cfg.problem, ctx.cfg.lambdas, ctx.cfg.solver);
  std::ostringstream csv;
  tpe::write_sweep_csv(csv, report);
  tpe::write_text((ctx.out / "sweep.csv").string(), csv.str());
  json rep = run_metadata(ctx);
  rep["command"] = "sweep";
  rep["sweep"] = tpe::sweep_to_json(report);
  write_json(ctx.out / "report.json", rep);
  std::cout << csv.str();
  return report.success ? kOk : kNotConverged;
}

void print_table(const std::vector<tpe::OracleReport>& reports) {
  std::printf("%-28s %14s %14s %11s %9s  %s\n", "oracle", "reference", "target", "rel_error", "tol", "result");
  for (const auto& r : reports) {
    std::printf("%-28s %14.8g %14.8g %11.3e %9.1e  %s\n", r.oracle.c_str(), r.reference, r.target, r.rel_error,
                r.tolerance, r.pass ? "PASS" : "FAIL");
  }
}

/// Gradient checks at 5 seeded random states with entries of modulus in [0.2, 1.2].
std::vector<tpe::OracleReport> gradient_reports(const tpe::FeSpace& space, const Context& ctx) {
  std::mt19937_64 rng(ctx.cfg.solver.seed);
  std::uniform_real_distribution<double> mag(0.2, 1.2);
  std::bernoulli_distribution sign(0.5);
  std::vector<tpe::OracleReport> out;
  const auto& spec = ctx.cfg.problem;
  const double lambda = ctx.cfg.lambda.value_or(1.0);
  for (int s = 0; s < 5; ++s) {
    tpe::FeFunction u{Eigen::VectorXd(space.size())};
    for (Eigen::Index k = 0; k < u.size(); ++k) u.values[k] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    const std::string tag = "state " + std::to_string(s) + " ";
    out.push_back(tpe::compare_gradients(tag + "grad J", tpe::fd_gradient(space, spec, tpe::Functional::J, u, 1e-6),
                                         tpe::grad_J(space, spec, u), 1e-5));
    out.push_back(tpe::compare_gradients(tag + "grad H", tpe::fd_gradient(space, spec, tpe::Functional::H, u, 1e-6),
                                         tpe::grad_H(space, spec, u), 1e-5));
    out.push_back(tpe::compare_gradients(tag + "grad J_lambda",
                                         tpe::fd_gradient(space, spec, tpe::Functional::JLambda, u, 1e-6, lambda),
                                         tpe::grad_J_lambda(space, spec, u, lambda), 1e-5));
  }
  return out;
}

int finish_reports(const Context& ctx, const std::string& command, const std::vector<tpe::OracleReport>& reports) {
  print_table(reports);
  json rep = run_metadata(ctx);
  rep["command"] = command;
  json rows = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    rows.push_back(tpe::report_to_json(r));
    pass = pass && r.pass;
  }
  rep["oracles"] = rows;
  rep["success"] = pass;
  write_json(ctx.out / "report.json", rep);
  return pass ? kOk : kNotConverged;
}

int cmd_gradcheck(const Context& ctx) {
  const tpe::FeSpace space(ctx.mesh);
  tpe::check_compatible(space, ctx.cfg.problem);
  return finish_reports(ctx, "gradcheck", gradient_reports(space, ctx));
}

bool is_linear(const tpe::ProblemSpec& spec) {
  if (!std::holds_alternative<tpe::EuclideanNorm>(spec.norm)) return false;
  for (int i = 1; i <= 2; ++i) {
    const auto* g = std::get_if<tpe::PowerG>(&spec[i].g);
    if (!g || g->p != 2.0 || spec[i].q != 2.0) return false;
    if (spec[i].rho != 0.0 && spec[i].zeta != 2.0) return false;
    if (spec[i].gamma != 0.0 && spec[i].eta != 2.0) return false;
  }
  return true;
}

tpe::LinearPencil pencil_of(const tpe::ProblemSpec& spec) {
  tpe::LinearPencil c;
  for (int i = 1; i <= 2; ++i) {
    const auto s = static_cast<std::size_t>(i - 1);
    c.kappa[s] = std::get<tpe::PowerG>(spec[i].g).kappa;
    c.rho[s] = spec[i].rho;
    c.alpha[s] = spec[i].alpha;
    c.beta[s] = spec[i].beta;
    c.gamma[s] = spec[i].gamma;
  }
  return c;
}

/// Unit-interval Steklov setting: rho = beta = 1, alpha = gamma = 0.
std::optional<std::pair<double, tpe::ShootingMode>> shooting_setting(const Context& ctx) {
  const auto& spec = ctx.cfg.problem;
  const auto& mesh = ctx.mesh;
  if (spec.dim != 1 || spec.mode == tpe::Mode::Inner || !is_linear(spec)) return std::nullopt;
  for (int i = 1; i <= 2; ++i) {
    if (spec[i].rho != 1.0 || spec[i].beta != 1.0 || spec[i].alpha != 0.0 || spec[i].gamma != 0.0) {
      return std::nullopt;
    }
  }
  double lo = mesh.nodes.front()[0], hi = lo;
  for (const auto& p : mesh.nodes) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
  if (lo != 0.0 || hi != 1.0) return std::nullopt;
  if (mesh.interface.empty()) return std::make_pair(0.5, tpe::ShootingMode::Single);
  return std::make_pair(mesh.nodes[mesh.interface.front().nodes.front()][0], tpe::ShootingMode::Transmission);
}

int cmd_oracle(const Context& ctx, const std::string& action) {
  if (action != "compare") throw tpe::ParseError("unknown oracle action '" + action + "'");
  const tpe::FeSpace space(ctx.mesh);
  const auto& spec = ctx.cfg.problem;
  tpe::check_compatible(space, spec);
  auto reports = gradient_reports(space, ctx);
  if (is_linear(spec) && space.size() <= 2000) {
    const auto pair = tpe::minimize_on_Mr(space, spec, ctx.cfg.r, ctx.cfg.solver);
    const auto eigs = tpe::dense_linear_eigs(space, pencil_of(spec), 1);
    reports.push_back(tpe::make_report("dense_linear_eigs lambda_1", eigs[0].lambda, pair.lambda, 1e-8));
    if (const auto setting = shooting_setting(ctx)) {
      const auto kappa = pencil_of(spec).kappa;
      const double ref = tpe::steklov_shooting(kappa[0], kappa[1], setting->first, setting->second);
      reports.push_back(tpe::make_report("steklov_shooting lambda_1", ref, pair.lambda, 1e-3));
    }
  }
  return finish_reports(ctx, "oracle", reports);
}

int cmd_mesh(const Context& ctx) {
  const auto measures = tpe::validate_mesh(ctx.mesh);
  write_json(ctx.out / "mesh.json", tpe::mesh_to_json(ctx.mesh));
  json summary = {{"mesh_hash", ctx.hash},
                  {"nodes", ctx.mesh.nodes.size()},
                  {"elements", ctx.mesh.elements.size()},
                  {"omega1", measures.omega1},
                  {"omega2", measures.omega2},
                  {"gamma1", measures.gamma1},
                  {"gamma2", measures.gamma2},
                  {"sigma", measures.sigma}};
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

template <class... Kinds>
bool is_any(const tpe::Error& e) {
  return ((dynamic_cast<const Kinds*>(&e) != nullptr) || ...);
}

int exit_code_for(const tpe::Error& e) {
  if (is_any<tpe::InadmissibleSpec, tpe::InadmissibleCall, tpe::InadmissibleIndex, tpe::NotRetractable>(e)) {
    return kInadmissible;
  }
  if (is_any<tpe::DegenerateDirection, tpe::OracleFailure, tpe::OracleDegenerate>(e)) return kNotConverged;
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for nonlinear transmission eigenvalue problems"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "run configuration (JSON)")->required();
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--lambda", flags.lambda, "eigenvalue parameter for the J_lambda solvers");
    sub->add_option("--lambdas", flags.lambdas, "comma separated lambda list for sweep");
    sub->add_option("--r", flags.r, "constraint level H(u) = r");
    sub->add_option("--tol", flags.tol, "dual-norm residual tolerance");
    sub->add_option("--method", flags.method, "min-mr | jlambda-min | jlambda-mp");
  };
  auto* check = app.add_subcommand("check", "report hypotheses and regime");
  auto* solve = app.add_subcommand("solve", "compute one eigenpair");
  auto* sweep = app.add_subcommand("sweep", "solve over a list of lambda values");
  auto* grad = app.add_subcommand("gradcheck", "compare gradients with finite differences");
  auto* oracle = app.add_subcommand("oracle", "compare solvers with independent oracles");
  auto* mesh = app.add_subcommand("mesh", "generate and validate the configured mesh");
  for (auto* sub : {check, solve, sweep, grad, oracle, mesh}) add_common(sub);
  oracle->add_option("action", flags.oracle_action, "compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const Context ctx = prepare(flags);
    if (check->parsed()) return cmd_check(ctx);
    if (solve->parsed()) return cmd_solve(ctx);
    if (sweep->parsed()) return cmd_sweep(ctx);
    if (grad->parsed()) return cmd_gradcheck(ctx);
    if (oracle->parsed()) return cmd_oracle(ctx, flags.oracle_action);
    return cmd_mesh(ctx);
  } catch (const tpe::Error& e) {
    const int code = exit_code_for(e);
    std::cerr << (code == kInadmissible ? "inadmissible: " : "error: ") << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
