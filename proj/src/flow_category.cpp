#include "floer/flow_category.hpp"

#include "floer/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace floer {

const CriticalManifold& FlowCategory::critical(const std::string& id) const {
  return criticals.at(critical_index(id));
}

std::size_t FlowCategory::critical_index(const std::string& id) const {
  for (std::size_t i = 0; i < criticals.size(); ++i)
    if (criticals[i].id == id) return i;
  throw std::out_of_range("unknown critical manifold '" + id + "'");
}

const ModuliSpace* FlowCategory::moduli_between(const std::string& alpha,
                                                const std::string& beta) const {
  for (const auto& m : moduli)
    if (m.source == alpha && m.target == beta) return &m;
  return nullptr;
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.ok) return c.name + ": " + c.detail;
  return {};
}

FiberProductResult stratum_fiber_product(const FlowCategory& fc, const ModuliSpace& left,
                                         const ModuliSpace& right) {
  const CriticalManifold& g = fc.critical(left.target);
  return fiber_product(MapInto{&left.complex, left.pi_plus}, MapInto{&right.complex, right.pi_minus},
                       g.complex);
}

int stratum_sign(const FlowCategory& fc, const ModuliSpace& m) {
  const CriticalManifold& a = fc.critical(m.source);
  return ((a.mu + a.dim) % 2 == 0) ? 1 : -1;
}

namespace {

std::string label(const ModuliSpace& m) { return "M(" + m.source + "," + m.target + ")"; }

// Connected component id per vertex (-1 for non-vertices).
std::vector<int> components(const SimplicialComplex& k) {
  std::vector<int> parent(k.vertex_bound());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  for (const auto& e : k.simplices(std::min(1, k.dim())))
    for (std::size_t i = 1; i < e.size(); ++i) parent[find(e[i])] = find(e[0]);
  std::vector<int> out(k.vertex_bound(), -1);
  for (int v : k.vertices()) out[v] = find(v);
  return out;
}

std::string check_ids(const FlowCategory& fc) {
  std::set<std::string> ids;
  for (const auto& c : fc.criticals)
    if (!ids.insert(c.id).second) return "duplicate critical id '" + c.id + "'";
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& m : fc.moduli) {
    if (!ids.count(m.source) || !ids.count(m.target))
      return label(m) + " references an unknown critical manifold";
    if (!pairs.insert({m.source, m.target}).second) return "two moduli spaces for " + label(m);
    const int ma = fc.critical(m.source).mu, mb = fc.critical(m.target).mu;
    if (ma <= mb)
      return label(m) + ": mu must decrease (" + std::to_string(ma) + " -> " +
             std::to_string(mb) + ")";
    std::set<std::string> gammas;
    for (const auto& s : m.strata) {
      if (!ids.count(s.gamma)) return label(m) + ": stratum through unknown '" + s.gamma + "'";
      if (!gammas.insert(s.gamma).second)
        return label(m) + ": two strata through '" + s.gamma + "'";
      const int mg = fc.critical(s.gamma).mu;
      if (!(ma > mg && mg > mb))
        return label(m) + ": stratum through '" + s.gamma + "' violates mu ordering";
      if (!fc.moduli_between(m.source, s.gamma) || !fc.moduli_between(s.gamma, m.target))
        return label(m) + ": stratum through '" + s.gamma + "' names a missing moduli space";
    }
  }
  return {};
}

std::string check_dimensions(const FlowCategory& fc) {
  for (const auto& c : fc.criticals)
    if (c.complex.dim() != c.dim)
      return "S_" + c.id + " has dimension " + std::to_string(c.complex.dim()) + ", declared " +
             std::to_string(c.dim);
  for (const auto& m : fc.moduli) {
    if (m.complex.empty()) continue;
    const auto& a = fc.critical(m.source);
    const auto& b = fc.critical(m.target);
    const int expected = a.dim + a.mu - b.mu - 1;
    if (m.complex.dim() != expected)
      return label(m) + " has dimension " + std::to_string(m.complex.dim()) + ", expected " +
             std::to_string(expected);
  }
  return {};
}

std::string check_criticals(const FlowCategory& fc) {
  for (const auto& c : fc.criticals) {
    if (c.complex.empty()) return "S_" + c.id + " is empty";
    if (auto r = check_pseudo_manifold(c.complex, true); !r)
      return "S_" + c.id + ": " + r.message;
  }
  return {};
}

std::string check_endpoint_map(const ModuliSpace& m, const SimplicialComplex& target,
                               const VertexMap& map, const char* which) {
  std::string defect = simplicial_map_defect(m.complex, target, map);
  if (!defect.empty()) return label(m) + " " + which + ": " + defect;
  std::vector<int> comp = components(target);
  std::set<int> touched;
  std::set<Simplex> images;
  for (int d = 0; d <= m.complex.dim(); ++d)
    for (const auto& s : m.complex.simplices(d)) {
      Simplex img = map_tuple(map, s);
      std::sort(img.begin(), img.end());
      img.erase(std::unique(img.begin(), img.end()), img.end());
      touched.insert(comp[img[0]]);
      images.insert(img);
    }
  for (const auto& t : target.simplices(target.dim())) {
    if (!touched.count(comp[t[0]])) continue;
    Simplex key = t;
    std::sort(key.begin(), key.end());
    if (!images.count(key)) return label(m) + " " + which + " is not surjective onto a component";
  }
  return {};
}

std::string check_endpoints(const FlowCategory& fc) {
  for (const auto& m : fc.moduli) {
    if (m.complex.empty()) continue;
    auto r = check_endpoint_map(m, fc.critical(m.source).complex, m.pi_minus, "pi_minus");
    if (r.empty()) r = check_endpoint_map(m, fc.critical(m.target).complex, m.pi_plus, "pi_plus");
    if (!r.empty()) return r;
  }
  return {};
}

std::string check_corners(const FlowCategory& fc) {
  for (const auto& m : fc.moduli)
    if (auto r = check_pseudo_manifold(m.complex, false); !r) return label(m) + ": " + r.message;
  return {};
}

std::string check_strata(const FlowCategory& fc) {
  for (const auto& m : fc.moduli) {
    if (m.complex.empty()) continue;
    const int ma = fc.critical(m.source).mu, mb = fc.critical(m.target).mu;
    const int sign = stratum_sign(fc, m);
    std::vector<BoundaryFace> faces;
    for (const auto& g : fc.criticals) {
      if (!(ma > g.mu && g.mu > mb)) continue;
      const ModuliSpace* left = fc.moduli_between(m.source, g.id);
      const ModuliSpace* right = fc.moduli_between(g.id, m.target);
      if (!left || !right) continue;
      FiberProductResult fp;
      try {
        fp = stratum_fiber_product(fc, *left, *right);
      } catch (const NonTransverse& e) {
        return label(m) + ": stratum through '" + g.id + "': " + e.what();
      }
      const Stratum* st = nullptr;
      for (const auto& s : m.strata)
        if (s.gamma == g.id) st = &s;
      if (fp.complex.empty()) {
        if (st && !st->identification.empty())
          return label(m) + ": stratum through '" + g.id + "' but the fiber product is empty";
        continue;
      }
      if (!st) return label(m) + ": undeclared nonempty stratum through '" + g.id + "'";
      faces.push_back({"'" + g.id + "'", std::move(fp), &st->identification, sign});
    }
    if (auto r = compare_boundary(m.complex, faces); !r.empty()) return label(m) + ": " + r;
  }
  return {};
}

std::string check_strata_endpoints(const FlowCategory& fc) {
  for (const auto& m : fc.moduli)
    for (const auto& s : m.strata) {
      const ModuliSpace* left = fc.moduli_between(m.source, s.gamma);
      const ModuliSpace* right = fc.moduli_between(s.gamma, m.target);
      for (const auto& [x1, x2, v] : s.identification) {
        if (x1 < 0 || static_cast<std::size_t>(x1) >= left->pi_minus.size() || x2 < 0 ||
            static_cast<std::size_t>(x2) >= right->pi_plus.size())
          return label(m) + ": stratum through '" + s.gamma + "' has an out-of-range vertex";
        if (v < 0 || static_cast<std::size_t>(v) >= m.pi_minus.size())
          return label(m) + ": stratum through '" + s.gamma + "' maps to a non-vertex";
        if (m.pi_minus[v] != left->pi_minus[x1])
          return label(m) + ": pi_minus does not factor through stratum '" + s.gamma + "'";
        if (m.pi_plus[v] != right->pi_plus[x2])
          return label(m) + ": pi_plus does not factor through stratum '" + s.gamma + "'";
        if (left->pi_plus[x1] != right->pi_minus[x2])
          return label(m) + ": stratum through '" + s.gamma + "' pairs vertices over different points";
      }
    }
  return {};
}

}  // namespace

std::string compare_boundary(const SimplicialComplex& m, const std::vector<BoundaryFace>& faces) {
  const std::size_t nm = m.vertex_bound();
  auto coords = [nm](int v) {
    std::vector<double> p(nm, 0.0);
    p[static_cast<std::size_t>(v)] = 1;
    return p;
  };
  GeometricChain lhs = embed_chain(m, boundary_chain(m, fundamental_chain(m)), coords);
  GeometricChain rhs;
  rhs.degree = lhs.degree;
  for (const auto& f : faces) {
    const int n2 = static_cast<int>(f.product.right_bound);
    std::map<int, int> ident;
    for (const auto& [x1, x2, v] : *f.identification) {
      if (v < 0 || static_cast<std::size_t>(v) >= nm)
        return "stratum through " + f.name + " maps to a non-vertex";
      ident[x1 * n2 + x2] = v;
    }
    for (int v : f.product.complex.vertices())
      if (!ident.count(v))
        return "stratum through " + f.name + " does not identify vertex (" +
               std::to_string(v / n2) + "," + std::to_string(v % n2) + ")";
    rhs = rhs + scaled(embed_chain(f.product.complex, fundamental_chain(f.product.complex),
                                   [&](int v) { return coords(ident.at(v)); }),
                       f.sign);
  }
  auto cmp = compare_geometric(lhs, rhs);
  if (!cmp) return "boundary does not match the signed strata (" + cmp.detail + ")";
  return {};
}

ValidationReport validate(const FlowCategory& fc) {
  using Check = std::string (*)(const FlowCategory&);
  const std::pair<const char*, Check> checks[] = {
      {"ids", check_ids},
      {"dimension", check_dimensions},
      {"critical-manifolds", check_criticals},
      {"endpoint-maps", check_endpoints},
      {"moduli-corners", check_corners},
      {"boundary-strata", check_strata},
      {"strata-endpoints", check_strata_endpoints},
  };
  ValidationReport report;
  for (const auto& [name, fn] : checks) {
    if (!report.ok) {
      report.checks.push_back({name, false, "skipped"});
      continue;
    }
    std::string failure;
    try {
      failure = fn(fc);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    report.checks.push_back({name, failure.empty(), failure});
    if (!failure.empty()) report.ok = false;
  }
  return report;
}

}  // namespace floer
