#pragma once

// Run configuration: one JSON document naming the mesh, the problem, the
// solver options and the command parameters.
//
//   {
//     "mesh":    {"generator": "split_interval", "a": 0, "c": 0.5, "b": 1, "n1": 32, "n2": 32}
//                | {"file": "mesh.json"},
//     "problem": {...},                 // see problem_from_json
//     "solver":  {"tol": 1e-8, "seed": 1, ...},
//     "r": 1.0, "lambda": 1.0, "lambdas": [0.5, 1, 2], "method": "min-mr"
//   }

#include <charconv>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tpe/errors.hpp"
#include "tpe/geometry.hpp"
#include "tpe/problem.hpp"
#include "tpe/solvers.hpp"

namespace tpe {

struct MeshSource {
  std::optional<std::string> generator;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::filesystem::path> file;
};

struct RunConfig {
  MeshSource mesh;
  ProblemSpec problem;
  SolverOptions solver;
  double r = 1.0;
  std::optional<double> lambda;
  std::vector<double> lambdas;
  std::string method = "min-mr";
};

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"min-mr", "jlambda-min", "jlambda-mp"};
  return names;
}

inline SolverOptions solver_options_from_json(const nlohmann::json& j, int dim) {
  detail::reject_unknown(j,
                         {"max_iters", "tol", "c_armijo", "backtrack", "path_points", "seed", "noise",
                          "stagnation_sweeps", "stagnation_tol", "polish_switch", "newton_handover", "parallel"},
                         "solver");
  SolverOptions o;
  o.tol = dim == 1 ? 1e-8 : 1e-6;
  o.max_iters = j.value("max_iters", o.max_iters);
  o.tol = j.value("tol", o.tol);
  o.c_armijo = j.value("c_armijo", o.c_armijo);
  o.backtrack = j.value("backtrack", o.backtrack);
  o.path_points = j.value("path_points", o.path_points);
  o.seed = j.value("seed", o.seed);
  o.noise = j.value("noise", o.noise);
  o.stagnation_sweeps = j.value("stagnation_sweeps", o.stagnation_sweeps);
  o.stagnation_tol = j.value("stagnation_tol", o.stagnation_tol);
  o.polish_switch = j.value("polish_switch", o.polish_switch);
  o.newton_handover = j.value("newton_handover", o.newton_handover);
  o.parallel_sweep = j.value("parallel", o.parallel_sweep);
  return o;
}

inline nlohmann::json solver_options_to_json(const SolverOptions& o) {
  return {{"max_iters", o.max_iters},
          {"tol", o.tol},
          {"c_armijo", o.c_armijo},
          {"backtrack", o.backtrack},
          {"path_points", o.path_points},
          {"seed", o.seed},
          {"noise", o.noise},
          {"stagnation_sweeps", o.stagnation_sweeps},
          {"stagnation_tol", o.stagnation_tol},
          {"polish_switch", o.polish_switch},
          {"newton_handover", o.newton_handover},
          {"parallel", o.parallel_sweep}};
}

/// Relative mesh file paths are resolved against `base_dir`.
inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  try {
    detail::reject_unknown(j, {"mesh", "problem", "solver", "r", "lambda", "lambdas", "method"}, "config");
    RunConfig c;
    const auto& m = j.at("mesh");
    if (!m.is_object()) throw ParseError("mesh: expected an object");
    const bool has_gen = m.contains("generator");
    const bool has_file = m.contains("file");
    if (has_gen == has_file) throw ParseError("mesh: give exactly one of 'generator' or 'file'");
    if (has_gen) {
      c.mesh.generator = m.at("generator").get<std::string>();
      c.mesh.params = m;
      c.mesh.params.erase("generator");
    } else {
      if (m.size() != 1) throw ParseError("mesh: 'file' takes no other keys");
      std::filesystem::path p = m.at("file").get<std::string>();
      c.mesh.file = p.is_relative() ? base_dir / p : p;
    }
    c.problem = problem_from_json(j.at("problem"));
    c.solver = solver_options_from_json(j.value("solver", nlohmann::json::object()), c.problem.dim);
    c.r = j.value("r", c.r);
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.method = j.value("method", c.method);
    if (std::find(method_names().begin(), method_names().end(), c.method) == method_names().end()) {
      throw ParseError("unknown method '" + c.method + "'");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

inline Mesh build_mesh(const MeshSource& src) {
  if (src.file) return mesh_from_json(read_json_file(*src.file));
  const auto& p = src.params;
  try {
    const std::string& g = *src.generator;
    if (g == "split_interval") {
      detail::reject_unknown(p, {"a", "c", "b", "n1", "n2"}, "mesh");
      return generate_split_interval(p.value("a", 0.0), p.value("c", 0.5), p.value("b", 1.0), p.at("n1").get<int>(),
                                     p.at("n2").get<int>());
    }
    if (g == "split_square") {
      detail::reject_unknown(p, {"nx", "ny", "xc"}, "mesh");
      return generate_split_square(p.at("nx").get<int>(), p.at("ny").get<int>(), p.value("xc", 0.5));
    }
    if (g == "inner_square") {
      detail::reject_unknown(p, {"n_outer", "n_inner"}, "mesh");
      return generate_inner_square(p.at("n_outer").get<int>(), p.at("n_inner").get<int>());
    }
    throw ParseError("unknown mesh generator '" + g + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mesh: ") + e.what());
  }
}

/// Parses "0.5,1,2"; the empty string gives an empty list.
inline std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    double v = 0.0;
    const char* first = item.data() + item.find_first_not_of(" \t");
    const char* last = item.data() + item.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) throw ParseError("bad lambda list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace tpe
