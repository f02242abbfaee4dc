#include "floer/equivariant.hpp"

#include "floer/errors.hpp"

#include <numeric>

namespace floer {

namespace {

VertexMap identity_of(std::size_t n) {
  VertexMap v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

VertexMap power(const VertexMap& g, int e) {
  VertexMap out = identity_of(g.size());
  for (int i = 0; i < e; ++i) out = compose_maps(g, out);
  return out;
}

const VertexMap& on_critical(const FlowCategory& fc, const CyclicAction& g, std::size_t c,
                             std::vector<VertexMap>& scratch) {
  auto it = g.critical.find(fc.criticals[c].id);
  if (it != g.critical.end()) return it->second;
  scratch.push_back(identity_of(fc.criticals[c].complex.vertex_bound()));
  return scratch.back();
}

void check_automorphism(const SimplicialComplex& k, const VertexMap& g, int order,
                        const std::string& where) {
  if (g.size() != k.vertex_bound())
    throw ActionNotCommuting(where + ": permutation has the wrong size");
  if (auto defect = simplicial_map_defect(k, k, g); !defect.empty())
    throw ActionNotCommuting(where + ": " + defect);
  for (int d = 0; d <= k.dim(); ++d) {
    std::vector<char> hit(k.count(d), 0);
    for (const auto& s : k.simplices(d)) {
      auto o = k.orient(map_tuple(g, s));
      if (!o || o->sign == 0 || hit[o->index])
        throw ActionNotCommuting(where + ": not a simplicial automorphism");
      hit[o->index] = 1;
    }
  }
  const VertexMap g_order = power(g, order);
  for (int v : k.vertices())
    if (g_order[v] != v)
      throw ActionNotCommuting(where + ": generator does not have order " + std::to_string(order));
}

}  // namespace

CyclicAction trivial_action() { return {}; }

CyclicAction circle_rotation(const FlowCategory& base, int n, int step,
                             const CyclicAction* base_action) {
  CyclicAction out;
  const int shift = ((step % n) + n) % n;
  const int rot = shift == 0 ? 1 : n / std::gcd(n, shift);
  const int base_order = base_action ? base_action->order : 1;
  out.order = std::lcm(rot, base_order);
  auto lift = [&](std::size_t nx, const VertexMap* g) {
    VertexMap m(n * nx);
    for (int t = 0; t < n; ++t)
      for (std::size_t x = 0; x < nx; ++x) {
        const int gx = g ? (*g)[x] : static_cast<int>(x);
        m[t * nx + x] = static_cast<int>((((t - step) % n + n) % n) * nx + gx);
      }
    return m;
  };
  for (const auto& c : base.criticals) {
    const VertexMap* g = nullptr;
    if (base_action) {
      auto it = base_action->critical.find(c.id);
      if (it != base_action->critical.end()) g = &it->second;
    }
    out.critical[c.id] = lift(c.complex.vertex_bound(), g);
  }
  for (std::size_t i = 0; i < base.moduli.size(); ++i) {
    const VertexMap* g = nullptr;
    if (base_action && i < base_action->moduli.size() && !base_action->moduli[i].empty())
      g = &base_action->moduli[i];
    out.moduli.push_back(lift(base.moduli[i].complex.vertex_bound(), g));
  }
  return out;
}

IntMatrix action_matrix(const FloerComplexBundle& b, const CyclicAction& g, int k) {
  const FlowCategory& fc = *b.flow_category;
  const auto it = b.generators.find(k);
  if (it == b.generators.end()) return {};
  const auto& gens = it->second;
  IntMatrix p(gens.size(), gens.size());
  std::vector<VertexMap> scratch;
  scratch.reserve(fc.criticals.size());
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const Generator& x = gens[j];
    const auto& cx = fc.criticals[x.critical].complex;
    const VertexMap& perm = on_critical(fc, g, x.critical, scratch);
    auto o = cx.orient(map_tuple(perm, cx.simplex(x.dim, x.simplex)));
    if (!o || o->sign == 0) throw ActionNotCommuting(b.label(x) + ": image is not a simplex");
    p(b.position(Generator{x.critical, x.dim, o->index}), j) = o->sign;
  }
  return p;
}

void check_action(const FloerComplexBundle& b, const CyclicAction& g) {
  const FlowCategory& fc = *b.flow_category;
  if (g.order < 1) throw ActionNotCommuting("order must be positive");
  std::vector<VertexMap> scratch;
  scratch.reserve(fc.criticals.size() + 2);
  for (std::size_t c = 0; c < fc.criticals.size(); ++c)
    check_automorphism(fc.criticals[c].complex, on_critical(fc, g, c, scratch), g.order,
                       "S_" + fc.criticals[c].id);
  for (std::size_t i = 0; i < fc.moduli.size(); ++i) {
    const auto& m = fc.moduli[i];
    if (m.complex.empty()) continue;
    const std::string where = "M(" + m.source + "," + m.target + ")";
    const VertexMap gm = i < g.moduli.size() && !g.moduli[i].empty()
                             ? g.moduli[i]
                             : identity_of(m.complex.vertex_bound());
    check_automorphism(m.complex, gm, g.order, where);
    for (std::size_t t = 0; t < m.complex.orientation().size(); ++t) {
      auto o = m.complex.orient(map_tuple(gm, m.complex.simplex(m.complex.dim(), t)));
      if (o->sign * m.complex.orientation()[o->index] != m.complex.orientation()[t])
        throw ActionNotCommuting(where + ": action reverses the orientation");
    }
    const VertexMap& ga = on_critical(fc, g, fc.critical_index(m.source), scratch);
    const VertexMap& gb = on_critical(fc, g, fc.critical_index(m.target), scratch);
    for (int v : m.complex.vertices()) {
      if (m.pi_minus[gm[v]] != ga[m.pi_minus[v]])
        throw ActionNotCommuting(where + ": pi_minus is not equivariant at vertex " + std::to_string(v));
      if (m.pi_plus[gm[v]] != gb[m.pi_plus[v]])
        throw ActionNotCommuting(where + ": pi_plus is not equivariant at vertex " + std::to_string(v));
    }
  }
  for (const auto& [k, gens] : b.generators) {
    if (!b.generators.count(k - 1)) continue;
    const IntMatrix d = b.complex->boundary(k);
    if (!(d * action_matrix(b, g, k) == action_matrix(b, g, k - 1) * d))
      throw ActionNotCommuting("boundary is not equivariant in degree " + std::to_string(k));
  }
}

EquivariantCochains equivariant_cochains(const FloerComplexBundle& b, const CyclicAction& g) {
  check_action(b, g);
  EquivariantCochains out;
  std::map<int, std::vector<std::size_t>> reps;
  for (const auto& [k, gens] : b.generators) {
    const IntMatrix p = action_matrix(b, g, k);
    const std::size_t n = gens.size();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<Integer>> columns;
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      // omega(P sigma) = omega(sigma) along the orbit of sigma
      std::vector<Integer> col(n, 0);
      std::size_t cur = s;
      Integer value = 1;
      bool consistent = true;
      while (true) {
        seen[cur] = 1;
        col[cur] = value;
        std::size_t next = 0;
        Integer sign = 0;
        for (std::size_t r = 0; r < n; ++r)
          if (p(r, cur) != 0) next = r, sign = p(r, cur);
        value *= sign;
        if (next == s) {
          consistent = (value == 1);
          break;
        }
        cur = next;
      }
      if (!consistent) continue;
      columns.push_back(std::move(col));
      reps[k].push_back(s);
    }
    IntMatrix basis(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) basis(i, j) = columns[j][i];
    out.basis[k] = std::move(basis);
  }

  std::map<int, std::size_t> ranks;
  std::map<int, IntMatrix> bounds;
  for (const auto& [k, basis] : out.basis) ranks[-k] = basis.cols();
  for (const auto& [k, basis] : out.basis) {
    auto next = out.basis.find(k + 1);
    if (next == out.basis.end() || basis.cols() == 0 || next->second.cols() == 0) continue;
    const IntMatrix delta = b.complex->boundary(k + 1).transpose() * basis;
    const IntMatrix& nb = next->second;
    IntMatrix coords(nb.cols(), basis.cols());
    const auto& r = reps[k + 1];
    for (std::size_t i = 0; i < nb.cols(); ++i)
      for (std::size_t j = 0; j < basis.cols(); ++j) coords(i, j) = delta(r[i], j) * nb(r[i], i);
    if (!(nb * coords == delta))
      throw ActionNotCommuting("coboundary leaves the invariant cochains in degree " +
                               std::to_string(k + 1));
    bounds[-k] = std::move(coords);
  }
  out.complex = build_complex(ranks, bounds);
  return out;
}

HomologyResult equivariant_cohomology(const FloerComplexBundle& b, const CyclicAction& g) {
  return reindex_dual(homology(equivariant_cochains(b, g).complex));
}

}  // namespace floer
