#pragma once

// Simplicial meshes for two-subdomain transmission problems.
//
// A mesh carries three kinds of tags: the subdomain of every element
// (1 or 2), the boundary part of every exterior facet (gamma1 or gamma2)
// and the interface facets separating the two subdomains. In 1D facets
// are single nodes and their measure is the counting measure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpe/errors.hpp"

namespace tpe {

using Point = std::array<double, 2>;

enum class BoundaryTag { Gamma1, Gamma2 };

struct Element {
  std::vector<int> nodes;
  int sub = 1;
  bool operator==(const Element&) const = default;
};

struct BoundaryFacet {
  std::vector<int> nodes;
  BoundaryTag tag = BoundaryTag::Gamma1;
  bool operator==(const BoundaryFacet&) const = default;
};

struct InterfaceFacet {
  std::vector<int> nodes;
  bool operator==(const InterfaceFacet&) const = default;
};

struct Mesh {
  int dim = 1;
  std::vector<Point> nodes;
  std::vector<Element> elements;
  std::vector<BoundaryFacet> boundary;
  std::vector<InterfaceFacet> interface;

  [[nodiscard]] std::size_t node_count() const { return nodes.size(); }
  bool operator==(const Mesh&) const = default;
};

struct TagMeasures {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double sigma = 0.0;

  [[nodiscard]] double omega() const { return omega1 + omega2; }
  [[nodiscard]] double gamma(int i) const { return i == 1 ? gamma1 : gamma2; }
  [[nodiscard]] double subdomain(int i) const { return i == 1 ? omega1 : omega2; }
};

inline int boundary_index(BoundaryTag t) { return t == BoundaryTag::Gamma1 ? 1 : 2; }

/// Length (1D) or area (2D) of an element.
inline double element_measure(const Mesh& mesh, const Element& e) {
  if (mesh.dim == 1) {
    return std::abs(mesh.nodes[e.nodes[1]][0] - mesh.nodes[e.nodes[0]][0]);
  }
  const Point& a = mesh.nodes[e.nodes[0]];
  const Point& b = mesh.nodes[e.nodes[1]];
  const Point& c = mesh.nodes[e.nodes[2]];
  return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

/// Counting measure in 1D, edge length in 2D.
inline double facet_measure(const Mesh& mesh, const std::vector<int>& facet) {
  if (mesh.dim == 1) return 1.0;
  const Point& a = mesh.nodes[facet[0]];
  const Point& b = mesh.nodes[facet[1]];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

namespace detail {

inline std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<std::vector<int>> element_facets(const Mesh& mesh, const Element& e) {
  if (mesh.dim == 1) return {{e.nodes[0]}, {e.nodes[1]}};
  return {sorted({e.nodes[0], e.nodes[1]}), sorted({e.nodes[1], e.nodes[2]}),
          sorted({e.nodes[2], e.nodes[0]})};
}

/// Triangulates a structured (nx x ny) grid on [0,1]^2; `sub_of(i, j)` tags cell (i, j).
template <class SubOf>
Mesh structured_square(int nx, int ny, SubOf&& sub_of) {
  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int s = sub_of(i, j);
      mesh.elements.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, s});
      mesh.elements.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, s});
    }
  }
  auto tag_of = [&](int i, int j) {
    return sub_of(i, j) == 1 ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2;
  };
  for (int i = 0; i < nx; ++i) {
    mesh.boundary.push_back({{id(i, 0), id(i + 1, 0)}, tag_of(i, 0)});
    mesh.boundary.push_back({{id(i, ny), id(i + 1, ny)}, tag_of(i, ny - 1)});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary.push_back({{id(0, j), id(0, j + 1)}, tag_of(0, j)});
    mesh.boundary.push_back({{id(nx, j), id(nx, j + 1)}, tag_of(nx - 1, j)});
  }
  // Interface edges: cell edges whose two neighbouring cells carry different tags.
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      if (sub_of(i - 1, j) != sub_of(i, j)) mesh.interface.push_back({{id(i, j), id(i, j + 1)}});
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (sub_of(i, j - 1) != sub_of(i, j)) mesh.interface.push_back({{id(i, j), id(i + 1, j)}});
    }
  }
  return mesh;
}

}  // namespace detail

/// Uniform 1D mesh of (a, b) split at c: n1 elements on (a, c) in subdomain 1,
/// n2 elements on (c, b) in subdomain 2. Gamma1 = {a}, Gamma2 = {b}, Sigma = {c}.
inline Mesh generate_split_interval(double a, double c, double b, int n1, int n2) {
  if (!(a < c && c < b)) throw InvalidGeometry("split interval requires a < c < b");
  if (n1 < 1 || n2 < 1) throw InvalidGeometry("split interval requires n1, n2 >= 1");
  Mesh mesh;
  mesh.dim = 1;
  for (int i = 0; i <= n1; ++i) {
    mesh.nodes.push_back({i == n1 ? c : a + (c - a) * i / n1, 0.0});
  }
  for (int j = 1; j <= n2; ++j) {
    mesh.nodes.push_back({j == n2 ? b : c + (b - c) * j / n2, 0.0});
  }
  for (int i = 0; i < n1 + n2; ++i) {
    mesh.elements.push_back({{i, i + 1}, i < n1 ? 1 : 2});
  }
  mesh.boundary.push_back({{0}, BoundaryTag::Gamma1});
  mesh.boundary.push_back({{n1 + n2}, BoundaryTag::Gamma2});
  mesh.interface.push_back({{n1}});
  return mesh;
}

/// Unit square cut by the vertical interface x = xc; xc must lie on the grid.
inline Mesh generate_split_square(int nx, int ny, double xc) {
  if (nx < 2 || ny < 2) throw InvalidGeometry("split square requires nx, ny >= 2");
  if (!(xc > 0.0 && xc < 1.0)) throw InvalidGeometry("split square requires 0 < xc < 1");
  const double scaled = xc * nx;
  const int ic = static_cast<int>(std::lround(scaled));
  if (std::abs(scaled - ic) > 1e-9 || ic < 1 || ic > nx - 1) {
    throw InvalidGeometry("interface position xc is not a grid line");
  }
  return detail::structured_square(nx, ny, [ic](int i, int) { return i < ic ? 1 : 2; });
}

/// Unit square with the inner square [1/4, 3/4]^2 as subdomain 2 (Gamma2 empty).
/// `n_outer` cells per side of the unit square, `n_inner` per side of the inner one.
inline Mesh generate_inner_square(int n_outer, int n_inner) {
  if (n_outer < 4 || n_outer % 4 != 0 || n_inner < 1 || 2 * n_inner != n_outer) {
    throw InvalidGeometry("inner square grids are incompatible (need n_outer = 2 n_inner, 4 | n_outer)");
  }
  const int lo = n_outer / 4;
  const int hi = 3 * n_outer / 4;
  return detail::structured_square(n_outer, n_outer, [lo, hi](int i, int j) {
    return (i >= lo && i < hi && j >= lo && j < hi) ? 2 : 1;
  });
}

/// Checks every structural invariant and returns the tag measures.
/// Throws MeshValidationError naming the first failing invariant.
inline TagMeasures validate_mesh(const Mesh& mesh) {
  auto fail = [](const std::string& what) { throw MeshValidationError(what); };
  if (mesh.dim != 1 && mesh.dim != 2) fail("unsupported dimension");
  if (mesh.elements.empty()) fail("mesh has no elements");
  const int n = static_cast<int>(mesh.nodes.size());
  const std::size_t facet_size = static_cast<std::size_t>(mesh.dim);
  auto check_nodes = [&](const std::vector<int>& ids, std::size_t expected, const char* what) {
    if (ids.size() != expected) fail(std::string(what) + " has wrong node count");
    for (int id : ids) {
      if (id < 0 || id >= n) fail(std::string(what) + " node index out of range");
    }
    if (std::set<int>(ids.begin(), ids.end()).size() != ids.size()) {
      fail(std::string(what) + " repeats a node");
    }
  };

  TagMeasures m;
  std::map<std::vector<int>, std::vector<int>> facet_owners;
  std::vector<bool> used(mesh.nodes.size(), false);
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& e = mesh.elements[k];
    check_nodes(e.nodes, facet_size + 1, "element");
    if (e.sub != 1 && e.sub != 2) fail("unknown subdomain tag");
    const double vol = element_measure(mesh, e);
    if (!(vol > 0.0)) fail("degenerate element");
    (e.sub == 1 ? m.omega1 : m.omega2) += vol;
    for (int id : e.nodes) used[static_cast<std::size_t>(id)] = true;
    for (auto& f : detail::element_facets(mesh, e)) facet_owners[f].push_back(static_cast<int>(k));
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) fail("orphan node not attached to any element");
  for (const auto& [facet, owners] : facet_owners) {
    if (owners.size() > 2) fail("nonconforming facet shared by more than two elements");
  }

  std::set<std::vector<int>> tagged_boundary;
  for (const auto& b : mesh.boundary) {
    check_nodes(b.nodes, facet_size, "boundary facet");
    auto key = detail::sorted(b.nodes);
    auto it = facet_owners.find(key);
    if (it == facet_owners.end() || it->second.size() != 1) fail("boundary facet is not on the domain boundary");
    if (!tagged_boundary.insert(key).second) fail("boundary facet tagged twice");
    const int owner_sub = mesh.elements[static_cast<std::size_t>(it->second.front())].sub;
    if (owner_sub != boundary_index(b.tag)) fail("boundary tag does not match adjacent subdomain");
    (b.tag == BoundaryTag::Gamma1 ? m.gamma1 : m.gamma2) += facet_measure(mesh, b.nodes);
  }
  std::set<std::vector<int>> tagged_interface;
  for (const auto& s : mesh.interface) {
    check_nodes(s.nodes, facet_size, "interface facet");
    auto key = detail::sorted(s.nodes);
    auto it = facet_owners.find(key);
    if (it == facet_owners.end() || it->second.size() != 2) fail("interface facet is not interior");
    const int s0 = mesh.elements[static_cast<std::size_t>(it->second[0])].sub;
    const int s1 = mesh.elements[static_cast<std::size_t>(it->second[1])].sub;
    if (s0 == s1) fail("interface facet is not between the two subdomains");
    if (!tagged_interface.insert(key).second) fail("interface facet tagged twice");
    m.sigma += facet_measure(mesh, s.nodes);
  }
  if (m.omega2 > 0.0 && !(m.sigma > 0.0)) fail("empty interface");
  for (const auto& [facet, owners] : facet_owners) {
    if (owners.size() == 1 && !tagged_boundary.contains(facet)) {
      fail("boundary facets do not partition the domain boundary");
    }
    if (owners.size() == 2) {
      const int s0 = mesh.elements[static_cast<std::size_t>(owners[0])].sub;
      const int s1 = mesh.elements[static_cast<std::size_t>(owners[1])].sub;
      if (s0 != s1 && !tagged_interface.contains(facet)) fail("untagged interface facet");
    }
  }

  if (!(m.omega1 > 0.0)) fail("empty subdomain 1");
  if (!(m.gamma1 > 0.0)) fail("empty gamma1");
  return m;
}

// ---------------------------------------------------------------------------
// JSON exchange format

inline nlohmann::json mesh_to_json(const Mesh& mesh) {
  using nlohmann::json;
  json j;
  j["dim"] = mesh.dim;
  json nodes = json::array();
  for (const Point& p : mesh.nodes) {
    nodes.push_back(mesh.dim == 1 ? json::array({p[0]}) : json::array({p[0], p[1]}));
  }
  j["nodes"] = std::move(nodes);
  json elements = json::array();
  for (const auto& e : mesh.elements) elements.push_back({{"nodes", e.nodes}, {"sub", e.sub}});
  j["elements"] = std::move(elements);
  json boundary = json::array();
  for (const auto& b : mesh.boundary) {
    boundary.push_back({{"nodes", b.nodes}, {"tag", b.tag == BoundaryTag::Gamma1 ? "gamma1" : "gamma2"}});
  }
  j["boundary"] = std::move(boundary);
  json interface = json::array();
  for (const auto& s : mesh.interface) interface.push_back({{"nodes", s.nodes}});
  j["interface"] = std::move(interface);
  return j;
}

inline Mesh mesh_from_json(const nlohmann::json& j) {
  try {
    Mesh mesh;
    mesh.dim = j.at("dim").get<int>();
    if (mesh.dim != 1 && mesh.dim != 2) throw ParseError("mesh: dim must be 1 or 2");
    for (const auto& p : j.at("nodes")) {
      if (p.size() != static_cast<std::size_t>(mesh.dim)) throw ParseError("mesh: node has wrong arity");
      mesh.nodes.push_back({p[0].get<double>(), mesh.dim == 2 ? p[1].get<double>() : 0.0});
    }
    for (const auto& e : j.at("elements")) {
      mesh.elements.push_back({e.at("nodes").get<std::vector<int>>(), e.at("sub").get<int>()});
    }
    for (const auto& b : j.at("boundary")) {
      const auto tag = b.at("tag").get<std::string>();
      if (tag != "gamma1" && tag != "gamma2") throw ParseError("mesh: unknown boundary tag '" + tag + "'");
      mesh.boundary.push_back({b.at("nodes").get<std::vector<int>>(),
                               tag == "gamma1" ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2});
    }
    for (const auto& s : j.at("interface")) {
      mesh.interface.push_back({s.at("nodes").get<std::vector<int>>()});
    }
    return mesh;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mesh: ") + e.what());
  }
}

/// 64-bit FNV-1a hash of the canonical JSON dump; identifies the mesh in
/// persisted FE functions.
inline std::string mesh_hash(const Mesh& mesh) {
  const std::string text = mesh_to_json(mesh).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = digits[h & 0xf];
  return out;
}

}  // namespace tpe
