#pragma once

// Artifact serialization. Numbers go through std::to_chars (shortest
// round-trip form), so files are locale independent and byte-stable.

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "tpe/assembly.hpp"
#include "tpe/errors.hpp"
#include "tpe/geometry.hpp"
#include "tpe/solvers.hpp"

namespace tpe {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

/// Nodal values tied to the mesh they live on.
inline nlohmann::json fe_function_to_json(const FeFunction& u, const std::string& mesh_hash) {
  return {{"mesh_hash", mesh_hash}, {"values", std::vector<double>(u.values.begin(), u.values.end())}};
}

inline FeFunction fe_function_from_json(const nlohmann::json& j, const Mesh& mesh) {
  try {
    if (j.at("mesh_hash").get<std::string>() != mesh_hash(mesh)) throw ParseError("mesh hash mismatch");
    const auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != mesh.nodes.size()) throw ParseError("value count does not match node count");
    return {Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()))};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

inline nlohmann::json eigenpair_to_json(const EigenPair& pair, const std::string& mesh_hash) {
  nlohmann::json j = fe_function_to_json(pair.u, mesh_hash);
  j["lambda"] = pair.lambda;
  j["level"] = pair.level;
  j["residual_dual_norm"] = pair.residual_dual_norm;
  j["residual_euclidean"] = pair.residual_euclidean;
  j["method"] = pair.method;
  j["iterations"] = pair.iterations;
  j["success"] = pair.converged;
  j["message"] = pair.message;
  return j;
}

inline void write_eigenfunction_csv(std::ostream& os, const Mesh& mesh, const FeFunction& u) {
  os << (mesh.dim == 1 ? "node_index,x,value\n" : "node_index,x,y,value\n");
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    os << k << ',' << format_double(mesh.nodes[k][0]) << ',';
    if (mesh.dim == 2) os << format_double(mesh.nodes[k][1]) << ',';
    os << format_double(u.values[static_cast<Eigen::Index>(k)]) << '\n';
  }
}

inline void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
  os << "iter,phase,level,residual,lambda,step,h_value,h_pairing\n";
  for (const auto& r : rows) {
    os << r.iter << ',' << r.phase << ',' << format_double(r.level) << ',' << format_double(r.residual) << ','
       << format_double(r.lambda) << ',' << format_double(r.step) << ',' << format_double(r.h_value) << ','
       << format_double(r.h_pairing) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "lambda,level,residual,iters,success\n";
  for (const auto& r : report.rows) {
    os << format_double(r.lambda) << ',' << format_double(r.level) << ',' << format_double(r.residual) << ','
       << r.iters << ',' << (r.success ? "true" : "false") << '\n';
  }
}

inline nlohmann::json sweep_to_json(const SweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"level", r.level},
                    {"residual", r.residual},
                    {"iters", r.iters},
                    {"success", r.success},
                    {"message", r.message}});
  }
  return {{"success", report.success}, {"rows", rows}};
}

/// Writes `text` to `path`, throwing on I/O failure.
inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace tpe
