#pragma once

#include <random>

#include "tpe/oracles.hpp"
#include "tpe/tpe.hpp"

namespace tpe::testing {

/// rho = alpha = 1 on both subdomains, zeta = p.
inline SubdomainData bulk(GFamily g, double q) {
  SubdomainData s;
  s.g = g;
  s.q = q;
  s.zeta = s.eta = growth_exponent(g);
  s.alpha = 1.0;
  s.rho = 1.0;
  return s;
}

/// Steklov data: rho = beta = 1, alpha = 0, quadratic.
inline SubdomainData steklov(double kappa) {
  SubdomainData s;
  s.g = PowerG{kappa, 2.0};
  s.q = s.zeta = s.eta = 2.0;
  s.rho = 1.0;
  s.beta = 1.0;
  return s;
}

inline ProblemSpec two_domain(int dim, SubdomainData a, SubdomainData b, NormSpec norm = EuclideanNorm{}) {
  ProblemSpec spec;
  spec.dim = dim;
  spec.mode = Mode::TwoDomain;
  spec.norm = std::move(norm);
  spec.sub = {a, b};
  return spec;
}

/// p = (2,3), zeta = (2,3), rho = alpha = 1, common q.
inline ProblemSpec mixed_power(int dim, double q) {
  return two_domain(dim, bulk(PowerG{1.0, 2.0}, q), bulk(PowerG{1.0, 3.0}, q));
}

inline FeSpace interval(int n) { return FeSpace(generate_split_interval(0.0, 0.5, 1.0, n / 2, n - n / 2)); }

inline std::vector<NormSpec> all_norms() {
  Eigen::Matrix2d M;
  M << 2.0, 0.5, 0.5, 1.0;
  return {EuclideanNorm{}, LrNorm{1.5}, LrNorm{4.0}, MatrixNorm{M}};
}

/// One representative per family carrying a growth-excess certificate.
inline std::vector<GFamily> certified_families() {
  return {PowerG{2.0, 1.5},          DoublePowerG{1.0, 3.0, 0.5, 1.5}, RegularizedG{1.0, 3.0},
          RegularizedG{0.5, 1.5},    CapillarityG{1.0, 2.0},          ElasticityG{1.0, 2.0},
          ElasticityPerturbedG{1.0, 2.5}, LogPerturbedG{2.0, 1.5},    EpsFamilyG{3.0, 0.5}};
}

inline std::vector<GFamily> all_families() {
  auto f = certified_families();
  f.push_back(LogCounterexampleG{2.0});
  return f;
}

/// Family `k mod 9` with growth exponent p.
inline GFamily family_with_p(int k, double p) {
  switch (k % 9) {
    case 0: return PowerG{1.5, p};
    case 1: return DoublePowerG{1.0, p, 0.5, 0.5 * (1.0 + p)};
    case 2: return RegularizedG{0.7, p};
    case 3: return CapillarityG{1.0, p};
    case 4: return ElasticityG{1.0, p};
    case 5: return ElasticityPerturbedG{1.0, p};
    case 6: return LogPerturbedG{std::max(p, 2.0), 1.5};  // needs p >= 2
    case 7: return EpsFamilyG{p, 0.5 * (p - 1.0)};
    default: return LogCounterexampleG{std::max(p, 2.0)};
  }
}

/// Nodal values with modulus in [0.2, 1.2] and random sign, away from the u = 0 kink.
inline FeFunction random_state(const FeSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 1.2);
  std::bernoulli_distribution sign;
  FeFunction u{Eigen::VectorXd(space.size())};
  for (Eigen::Index k = 0; k < u.size(); ++k) u.values[k] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  return u;
}

struct GradientCase {
  std::string label;
  OracleReport J, H;
};

/// 20 (spec, u) combinations over all families, both dimensions, p in {1.5, 2, 3};
/// each compares grad_J and grad_H with central differences.
inline std::vector<GradientCase> gradient_consistency_cases(unsigned seed = 2024) {
  std::mt19937_64 rng(seed);
  const FeSpace line = interval(8);
  const FeSpace square(generate_split_square(4, 4, 0.5));
  const std::vector<NormSpec> norms = all_norms();
  const double ps[3] = {1.5, 2.0, 3.0};
  std::vector<GradientCase> out;
  for (int k = 0; k < 20; ++k) {
    const int dim = k % 2 == 0 ? 1 : 2;
    const double p1 = ps[k % 3], p2 = ps[(k + 1) % 3];
    SubdomainData a = bulk(family_with_p(k, p1), 1.5 + 0.25 * (k % 4));
    SubdomainData b = bulk(family_with_p(k + 4, p2), 2.5);
    a.beta = 0.5;
    b.gamma = 0.75;
    b.alpha = 0.0;
    const NormSpec norm = dim == 1 ? NormSpec{EuclideanNorm{}} : norms[static_cast<std::size_t>(k / 2) % norms.size()];
    const ProblemSpec spec = two_domain(dim, a, b, norm);
    const FeSpace& space = dim == 1 ? line : square;
    const FeFunction u = random_state(space, rng);
    const double h = 1e-6;
    GradientCase c;
    c.label = std::string(family_name(spec[1].g)) + "/" + family_name(spec[2].g) + " dim " + std::to_string(dim);
    c.J = compare_gradients("grad_J", fd_gradient(space, spec, Functional::J, u, h), grad_J(space, spec, u), 1e-5);
    c.H = compare_gradients("grad_H", fd_gradient(space, spec, Functional::H, u, h), grad_H(space, spec, u), 1e-5);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tpe::testing
