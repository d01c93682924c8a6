#pragma once

// Problem description and the hypothesis checker / regime classifier.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpe/errors.hpp"
#include "tpe/norm.hpp"
#include "tpe/operators.hpp"

namespace tpe {

enum class Mode {
  TwoDomain,     ///< two subdomains, both boundary parts present
  SingleDomain,  ///< identical data on both subdomains
  Inner,         ///< subdomain 2 enclosed by subdomain 1, Gamma2 empty
};

/// Per-subdomain data. Coefficients are constant on the subdomain (bulk:
/// alpha, rho) and on its boundary part (beta, gamma).
struct SubdomainData {
  GFamily g = PowerG{};
  double q = 2.0;
  double zeta = 2.0;
  double eta = 2.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
};

struct ProblemSpec {
  int dim = 1;
  Mode mode = Mode::TwoDomain;
  NormSpec norm = EuclideanNorm{};
  std::array<SubdomainData, 2> sub{};

  /// Subdomain data by 1-based index.
  [[nodiscard]] const SubdomainData& operator[](int i) const { return sub[static_cast<std::size_t>(i - 1)]; }
  [[nodiscard]] SubdomainData& operator[](int i) { return sub[static_cast<std::size_t>(i - 1)]; }
  [[nodiscard]] double p(int i) const { return growth_exponent((*this)[i].g); }
  /// Gamma_i carries data (false for Gamma2 in the inner configuration).
  [[nodiscard]] bool has_boundary(int i) const { return !(mode == Mode::Inner && i == 2); }
};

/// Copies subdomain 1 onto subdomain 2.
inline ProblemSpec single_domain(int dim, const SubdomainData& data, NormSpec norm = EuclideanNorm{}) {
  ProblemSpec spec;
  spec.dim = dim;
  spec.mode = Mode::SingleDomain;
  spec.norm = std::move(norm);
  spec.sub = {data, data};
  return spec;
}

/// Indices i with alpha_i |Omega_i| + beta_i |Gamma_i| > 0.
inline std::vector<int> active_ab(const ProblemSpec& spec) {
  std::vector<int> out;
  for (int i = 1; i <= 2; ++i) {
    if (spec[i].alpha > 0.0 || (spec.has_boundary(i) && spec[i].beta > 0.0)) out.push_back(i);
  }
  return out;
}

/// Critical Sobolev and trace exponents (p*, p_*); infinite when p >= N.
struct CriticalExponents {
  double sobolev = std::numeric_limits<double>::infinity();
  double trace = std::numeric_limits<double>::infinity();
};

inline CriticalExponents critical_exponents(double p, int N) {
  if (p >= N) return {};
  return {p * N / (N - p), p * (N - 1) / (N - p)};
}

enum class Regime { Thm2a, Thm2b, Thm1Only, Inadmissible };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Thm2a: return "thm2a";
    case Regime::Thm2b: return "thm2b";
    case Regime::Thm1Only: return "thm1_only";
    case Regime::Inadmissible: return "inadmissible";
  }
  return "?";
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void fail(std::string why) {
    pass = false;
    details.push_back(std::move(why));
  }
};

struct HypothesisReport {
  Verdict hg1, hg2, hg3, hg4, hpq, hzetaeta, halphabeta, hrhogamma, hrhogamma_strict;
  bool hg2_zero_y0 = false;
  std::vector<int> I_ab, I_rho, I_gamma;
  double q_min = 0.0, q_max = 0.0, p_min = 0.0, p_max = 0.0;
  std::optional<double> ze_min, ze_max;  ///< extrema of active potential exponents
  std::array<CriticalExponents, 2> critical{};
  Regime regime = Regime::Inadmissible;
  std::vector<std::string> reasons;
  std::vector<std::string> warnings;
};

/// Sample grid used for the sampled hypotheses.
inline const std::vector<double>& hypothesis_grid() {
  static const std::vector<double> grid = log_grid(1e-6, 1e6, 10000);
  return grid;
}

/// Checks each structural assumption and classifies which existence regime applies.
/// Deterministic: sampling uses a fixed grid.
inline HypothesisReport check_hypotheses(const ProblemSpec& spec) {
  HypothesisReport rep;
  const auto& grid = hypothesis_grid();
  const int N = spec.dim;
  rep.hg2_zero_y0 = true;

  for (int i = 1; i <= 2; ++i) {
    const SubdomainData& s = spec[i];
    const std::string tag = "subdomain " + std::to_string(i) + ": ";
    for (auto& issue : family_issues(s.g)) rep.hg1.fail(tag + issue);
    if (!rep.hg1.pass) {
      rep.hg2.fail(tag + "family inadmissible");
      rep.hg3.fail(tag + "family inadmissible");
      rep.hg4.fail(tag + "family inadmissible");
      rep.hg2_zero_y0 = false;
      continue;
    }
    const GMeta meta = g_meta(s.g);
    const double p = meta.p;
    if (eval_G(s.g, 0.0) != 0.0 || eval_Gy(s.g, 0.0) != 0.0) rep.hg1.fail(tag + "G(0) or G_y(0) nonzero");
    double prev = eval_Gy(s.g, 0.0);
    for (double y : grid) {
      const double G = eval_G(s.g, y);
      const double Gy = eval_Gy(s.g, y);
      if (!(Gy > prev)) {
        rep.hg1.fail(tag + "G_y not strictly increasing near y=" + std::to_string(y));
        break;
      }
      prev = Gy;
      if (y >= meta.y0 && G < meta.d * std::pow(y, p) * (1.0 - 1e-12)) {
        rep.hg2.fail(tag + "G(y) < d y^p near y=" + std::to_string(y));
        break;
      }
      if (Gy > meta.a * (1.0 + std::pow(y, p - 1.0)) * (1.0 + 1e-12)) {
        rep.hg3.fail(tag + "G_y exceeds a (1 + y^(p-1)) near y=" + std::to_string(y));
        break;
      }
    }
    rep.hg2_zero_y0 = rep.hg2_zero_y0 && meta.hg2_zero_y0;
    if (!meta.hg4) {
      rep.hg4.fail(tag + std::string(family_name(s.g)) + " admits no bound y G_y - p G <= c y^delta with delta < p");
    } else {
      double worst = -std::numeric_limits<double>::infinity();
      for (double y : grid) {
        const double bound = *meta.c * std::pow(y, *meta.delta);
        worst = std::max(worst, (growth_excess(s.g, y) - bound) / bound);
      }
      if (worst > 1e-12) rep.hg4.fail(tag + "excess certificate violated on the sample grid");
    }
    rep.critical[static_cast<std::size_t>(i - 1)] = critical_exponents(p, N);
  }

  rep.p_min = std::min(spec.p(1), spec.p(2));
  rep.p_max = std::max(spec.p(1), spec.p(2));
  rep.I_ab = active_ab(spec);

  for (int i = 1; i <= 2; ++i) {
    const SubdomainData& s = spec[i];
    const std::string tag = "subdomain " + std::to_string(i) + ": ";
    const bool bnd = spec.has_boundary(i);
    if (s.alpha < 0.0) rep.halphabeta.fail(tag + "alpha < 0");
    if (bnd && s.beta < 0.0) rep.halphabeta.fail(tag + "beta < 0");
    if (s.rho != 0.0) rep.I_rho.push_back(i);
    if (bnd && s.gamma != 0.0) rep.I_gamma.push_back(i);

    const auto crit = rep.critical[static_cast<std::size_t>(i - 1)];
    if (std::find(rep.I_ab.begin(), rep.I_ab.end(), i) != rep.I_ab.end()) {
      if (bnd && s.beta != 0.0) {
        if (!(s.q > 1.0 && s.q < crit.trace)) rep.hpq.fail(tag + "requires 1 < q < p_* (trace critical)");
      } else {
        if (!(s.q > 1.0 && s.q <= crit.sobolev)) rep.hpq.fail(tag + "requires 1 < q <= p^*");
        if (s.q == crit.sobolev) rep.warnings.push_back(tag + "q equals the critical Sobolev exponent");
      }
    }
    if (s.rho != 0.0 && !(s.zeta > 1.0 && s.zeta < crit.sobolev)) rep.hzetaeta.fail(tag + "requires 1 < zeta < p^*");
    if (bnd && s.gamma != 0.0 && !(s.eta > 1.0 && s.eta < crit.trace)) {
      rep.hzetaeta.fail(tag + "requires 1 < eta < p_*");
    }
    if (s.zeta >= rep.p_min && s.rho < 0.0) rep.hrhogamma.fail(tag + "rho < 0 with zeta >= p_min");
    if (bnd && s.eta >= rep.p_min && s.gamma < 0.0) rep.hrhogamma.fail(tag + "gamma < 0 with eta >= p_min");
    if (s.rho < 0.0) rep.hrhogamma_strict.fail(tag + "rho < 0");
    if (bnd && s.gamma < 0.0) rep.hrhogamma_strict.fail(tag + "gamma < 0");
  }
  if (rep.I_ab.empty()) {
    rep.halphabeta.fail("I_ab empty: alpha and beta vanish on both subdomains");
  } else {
    rep.q_min = std::numeric_limits<double>::infinity();
    rep.q_max = -std::numeric_limits<double>::infinity();
    for (int i : rep.I_ab) {
      rep.q_min = std::min(rep.q_min, spec[i].q);
      rep.q_max = std::max(rep.q_max, spec[i].q);
    }
  }
  if (rep.I_rho.empty() && rep.I_gamma.empty()) {
    rep.hrhogamma_strict.fail("rho and gamma vanish on both subdomains");
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i : rep.I_rho) lo = std::min(lo, spec[i].zeta), hi = std::max(hi, spec[i].zeta);
    for (int i : rep.I_gamma) lo = std::min(lo, spec[i].eta), hi = std::max(hi, spec[i].eta);
    rep.ze_min = lo;
    rep.ze_max = hi;
  }

  auto collect = [&rep](const char* name, const Verdict& v) {
    for (const auto& d : v.details) rep.reasons.push_back(std::string(name) + ": " + d);
  };
  const bool base = rep.hg1.pass && rep.hg3.pass && rep.hpq.pass && rep.halphabeta.pass;
  const bool thm1 = base && rep.hg2.pass && rep.hzetaeta.pass && rep.hrhogamma.pass;
  const bool thm2 = base && rep.hzetaeta.pass && rep.hrhogamma_strict.pass;
  const bool thm2a = thm2 && rep.hg2.pass && rep.hg2_zero_y0 && rep.hg4.pass && rep.p_max < rep.q_min &&
                     rep.ze_max && *rep.ze_max < rep.q_min;
  const bool thm2b = thm2 && rep.q_max < rep.p_min && rep.ze_min && *rep.ze_min > rep.q_max;
  rep.regime = thm2a ? Regime::Thm2a : thm2b ? Regime::Thm2b : thm1 ? Regime::Thm1Only : Regime::Inadmissible;
  if (rep.regime == Regime::Inadmissible) {
    collect("H_G1", rep.hg1);
    collect("H_G2", rep.hg2);
    collect("H_G3", rep.hg3);
    collect("H_pq", rep.hpq);
    collect("H_zeta_eta", rep.hzetaeta);
    collect("H_alpha_beta", rep.halphabeta);
    collect("H_rho_gamma", rep.hrhogamma);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

inline double num(const nlohmann::json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

inline double num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace detail

inline GFamily family_from_json(const nlohmann::json& j) {
  using detail::num;
  using detail::reject_unknown;
  const std::string type = j.at("type").get<std::string>();
  const std::string where = "G(" + type + ")";
  if (type == "power") {
    reject_unknown(j, {"type", "kappa", "p"}, where);
    return PowerG{num(j, "kappa", 1.0), num(j, "p")};
  }
  if (type == "double_power") {
    reject_unknown(j, {"type", "kappa", "p", "mu", "r"}, where);
    return DoublePowerG{num(j, "kappa", 1.0), num(j, "p"), num(j, "mu"), num(j, "r")};
  }
  if (type == "regularized") {
    reject_unknown(j, {"type", "k", "p"}, where);
    return RegularizedG{num(j, "k"), num(j, "p")};
  }
  if (type == "capillarity") {
    reject_unknown(j, {"type", "k", "p"}, where);
    return CapillarityG{num(j, "k"), num(j, "p")};
  }
  if (type == "elasticity") {
    reject_unknown(j, {"type", "k", "p"}, where);
    return ElasticityG{num(j, "k"), num(j, "p")};
  }
  if (type == "elasticity_perturbed") {
    reject_unknown(j, {"type", "k", "p"}, where);
    return ElasticityPerturbedG{num(j, "k"), num(j, "p")};
  }
  if (type == "log_perturbed") {
    reject_unknown(j, {"type", "p", "r"}, where);
    return LogPerturbedG{num(j, "p"), num(j, "r")};
  }
  if (type == "eps_family") {
    reject_unknown(j, {"type", "p", "eps"}, where);
    return EpsFamilyG{num(j, "p"), num(j, "eps")};
  }
  if (type == "log_counterexample") {
    reject_unknown(j, {"type", "p"}, where);
    return LogCounterexampleG{num(j, "p")};
  }
  throw ParseError("unknown G family '" + type + "'");
}

inline nlohmann::json family_to_json(const GFamily& g) {
  nlohmann::json j;
  j["type"] = family_name(g);
  std::visit(
      [&j](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        j["p"] = f.p;
        if constexpr (std::is_same_v<T, PowerG>) {
          j["kappa"] = f.kappa;
        } else if constexpr (std::is_same_v<T, DoublePowerG>) {
          j["kappa"] = f.kappa;
          j["mu"] = f.mu;
          j["r"] = f.r;
        } else if constexpr (std::is_same_v<T, LogPerturbedG>) {
          j["r"] = f.r;
        } else if constexpr (std::is_same_v<T, EpsFamilyG>) {
          j["eps"] = f.eps;
        } else if constexpr (!std::is_same_v<T, LogCounterexampleG>) {
          j["k"] = f.k;
        }
      },
      g);
  return j;
}

inline NormSpec norm_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "euclidean") {
    detail::reject_unknown(j, {"type"}, "norm");
    return EuclideanNorm{};
  }
  if (type == "lr") {
    detail::reject_unknown(j, {"type", "r"}, "norm");
    return LrNorm{detail::num(j, "r")};
  }
  if (type == "matrix") {
    detail::reject_unknown(j, {"type", "M"}, "norm");
    const auto rows = j.at("M").get<std::vector<std::vector<double>>>();
    MatrixNorm m;
    if (rows.empty() || rows.size() > 2) throw ParseError("norm: M must be 1x1 or 2x2");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw ParseError("norm: M must be square");
      for (std::size_t c = 0; c < rows.size(); ++c) {
        m.M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    return m;
  }
  throw ParseError("unknown norm type '" + type + "'");
}

inline nlohmann::json norm_to_json(const NormSpec& norm) {
  if (const auto* lr = std::get_if<LrNorm>(&norm)) return {{"type", "lr"}, {"r", lr->r}};
  if (const auto* m = std::get_if<MatrixNorm>(&norm)) {
    return {{"type", "matrix"}, {"M", {{m->M(0, 0), m->M(0, 1)}, {m->M(1, 0), m->M(1, 1)}}}};
  }
  return {{"type", "euclidean"}};
}

inline SubdomainData subdomain_from_json(const nlohmann::json& j, const std::string& where) {
  detail::reject_unknown(j, {"G", "q", "zeta", "eta", "alpha", "beta", "rho", "gamma"}, where);
  SubdomainData s;
  s.g = family_from_json(j.at("G"));
  s.q = detail::num(j, "q");
  s.zeta = detail::num(j, "zeta", growth_exponent(s.g));
  s.eta = detail::num(j, "eta", growth_exponent(s.g));
  s.alpha = detail::num(j, "alpha", 0.0);
  s.beta = detail::num(j, "beta", 0.0);
  s.rho = detail::num(j, "rho", 0.0);
  s.gamma = detail::num(j, "gamma", 0.0);
  return s;
}

inline nlohmann::json subdomain_to_json(const SubdomainData& s) {
  return {{"G", family_to_json(s.g)}, {"q", s.q},       {"zeta", s.zeta}, {"eta", s.eta},
          {"alpha", s.alpha},         {"beta", s.beta}, {"rho", s.rho},   {"gamma", s.gamma}};
}

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::TwoDomain: return "two-domain";
    case Mode::SingleDomain: return "single-domain";
    case Mode::Inner: return "inner";
  }
  return "?";
}

/// Parses a problem description; unknown keys are rejected with ParseError.
inline ProblemSpec problem_from_json(const nlohmann::json& j) {
  try {
    detail::reject_unknown(j, {"dim", "mode", "norm", "subdomains"}, "problem");
    ProblemSpec spec;
    spec.dim = j.at("dim").get<int>();
    if (spec.dim != 1 && spec.dim != 2) throw ParseError("problem: dim must be 1 or 2");
    const std::string mode = j.value("mode", std::string("two-domain"));
    if (mode == "two-domain") spec.mode = Mode::TwoDomain;
    else if (mode == "single-domain") spec.mode = Mode::SingleDomain;
    else if (mode == "inner") spec.mode = Mode::Inner;
    else throw ParseError("problem: unknown mode '" + mode + "'");
    if (j.contains("norm")) spec.norm = norm_from_json(j.at("norm"));
    const auto& subs = j.at("subdomains");
    const std::size_t expected = spec.mode == Mode::SingleDomain ? 1 : 2;
    if (!subs.is_array() || subs.size() != expected) {
      throw ParseError("problem: expected " + std::to_string(expected) + " subdomain entries");
    }
    spec.sub[0] = subdomain_from_json(subs[0], "subdomain 1");
    spec.sub[1] = expected == 2 ? subdomain_from_json(subs[1], "subdomain 2") : spec.sub[0];
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
}

inline nlohmann::json problem_to_json(const ProblemSpec& spec) {
  nlohmann::json subs = nlohmann::json::array();
  subs.push_back(subdomain_to_json(spec.sub[0]));
  if (spec.mode != Mode::SingleDomain) subs.push_back(subdomain_to_json(spec.sub[1]));
  return {{"dim", spec.dim}, {"mode", mode_name(spec.mode)}, {"norm", norm_to_json(spec.norm)}, {"subdomains", subs}};
}

namespace detail {
inline nlohmann::json verdict_json(const Verdict& v) { return {{"pass", v.pass}, {"details", v.details}}; }
inline nlohmann::json finite_or_inf(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("inf");
}
}  // namespace detail

inline nlohmann::json report_to_json(const HypothesisReport& r) {
  using detail::finite_or_inf;
  using detail::verdict_json;
  nlohmann::json j;
  j["regime"] = regime_name(r.regime);
  j["hypotheses"] = {{"H_G1", verdict_json(r.hg1)},
                     {"H_G2", verdict_json(r.hg2)},
                     {"H_G2_y0_zero", r.hg2_zero_y0},
                     {"H_G3", verdict_json(r.hg3)},
                     {"h_G4", verdict_json(r.hg4)},
                     {"H_pq", verdict_json(r.hpq)},
                     {"H_zeta_eta", verdict_json(r.hzetaeta)},
                     {"H_alpha_beta", verdict_json(r.halphabeta)},
                     {"H_rho_gamma", verdict_json(r.hrhogamma)},
                     {"h_rho_gamma", verdict_json(r.hrhogamma_strict)}};
  j["I_alpha_beta"] = r.I_ab;
  j["I_rho"] = r.I_rho;
  j["I_gamma"] = r.I_gamma;
  j["q_min"] = r.q_min;
  j["q_max"] = r.q_max;
  j["p_min"] = r.p_min;
  j["p_max"] = r.p_max;
  j["zeta_eta_min"] = r.ze_min ? nlohmann::json(*r.ze_min) : nlohmann::json(nullptr);
  j["zeta_eta_max"] = r.ze_max ? nlohmann::json(*r.ze_max) : nlohmann::json(nullptr);
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& c : r.critical) crit.push_back({{"sobolev", finite_or_inf(c.sobolev)}, {"trace", finite_or_inf(c.trace)}});
  j["critical_exponents"] = crit;
  j["reasons"] = r.reasons;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace tpe
