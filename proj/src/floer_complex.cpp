#include "floer/floer_complex.hpp"

#include "floer/parallel.hpp"

#include <numeric>
#include <sstream>

namespace floer {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::bott: return "bott";
    case Variant::morse: return "morse";
    case Variant::stable: return "stable";
    case Variant::equivariant: return "equivariant";
  }
  return "?";
}

bool operator<(const Generator& a, const Generator& b) {
  return std::tie(a.critical, a.dim, a.simplex) < std::tie(b.critical, b.dim, b.simplex);
}

std::size_t FloerComplexBundle::position(const Generator& g) const {
  const int k = g.dim + flow_category->criticals[g.critical].mu;
  const auto& list = generators.at(k);
  auto it = std::find(list.begin(), list.end(), g);
  if (it == list.end()) throw std::out_of_range("unknown generator");
  return static_cast<std::size_t>(it - list.begin());
}

namespace {

std::string simplex_label(const FlowCategory& fc, const Generator& g) {
  const auto& c = fc.criticals[g.critical];
  std::string out = c.id + "[";
  const Simplex& s = c.complex.simplex(g.dim, g.simplex);
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

std::map<int, std::vector<Generator>> index_generators(const FlowCategory& fc) {
  std::map<int, std::vector<Generator>> gens;
  for (std::size_t c = 0; c < fc.criticals.size(); ++c) {
    const auto& cm = fc.criticals[c];
    for (int d = 0; d <= cm.complex.dim(); ++d)
      for (std::size_t i = 0; i < cm.complex.count(d); ++i) gens[d + cm.mu].push_back({c, d, i});
  }
  return gens;
}

VertexMap identity_map_of(std::size_t n) {
  VertexMap v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Columns of d, assembled generator by generator.
FloerComplexBundle build(const FlowCategory& fc, Variant variant,
                         const std::function<std::map<Generator, Integer>(const Generator&)>& d) {
  FloerComplexBundle b;
  b.flow_category = std::make_shared<const FlowCategory>(fc);
  b.variant = variant;
  b.generators = index_generators(fc);
  std::vector<Generator> all;
  for (const auto& [k, list] : b.generators) all.insert(all.end(), list.begin(), list.end());
  std::vector<std::map<Generator, Integer>> columns(all.size());
  parallel_for(all.size(), [&](std::size_t i) { columns[i] = d(all[i]); });

  std::map<int, std::size_t> ranks;
  std::map<int, IntMatrix> bounds;
  for (const auto& [k, list] : b.generators) ranks[k] = list.size();
  std::map<Generator, std::size_t> pos;
  for (const auto& [k, list] : b.generators)
    for (std::size_t i = 0; i < list.size(); ++i) pos[list[i]] = i;
  std::size_t col = 0;
  for (const auto& [k, list] : b.generators) {
    const std::size_t rows = ranks.count(k - 1) ? ranks[k - 1] : 0;
    IntMatrix m(rows, list.size());
    for (std::size_t j = 0; j < list.size(); ++j, ++col)
      for (const auto& [g, c] : columns[col]) {
        const int gk = g.dim + fc.criticals[g.critical].mu;
        if (gk != k - 1) throw Error("boundary of " + simplex_label(fc, list[j]) + " leaves degree " + std::to_string(k - 1));
        m(pos.at(g), j) = c;
      }
    if (rows > 0) bounds[k] = std::move(m);
  }
  // fill gaps so degrees stay contiguous
  b.complex = std::make_shared<const IntegerChainComplex>(build_complex(ranks, bounds));
  return b;
}

std::optional<DSquaredFailure> d_squared_failure(const FloerComplexBundle& b) {
  auto check = verify_d_squared(*b.complex);
  if (check) return std::nullopt;
  const int k = *check.failing_degree;
  IntMatrix dd = b.complex->boundary(k - 1) * b.complex->boundary(k);
  for (std::size_t j = 0; j < dd.cols(); ++j) {
    std::ostringstream os;
    bool any = false;
    for (std::size_t i = 0; i < dd.rows(); ++i)
      if (dd(i, j) != 0) {
        os << (any ? " + " : "") << dd(i, j) << "*" << b.label(b.generators.at(k - 2)[i]);
        any = true;
      }
    if (any) return DSquaredFailure(b.label(b.generators.at(k)[j]), os.str());
  }
  return DSquaredFailure("degree " + std::to_string(k), "nonzero composite");
}

}  // namespace

std::string FloerComplexBundle::label(const Generator& g) const {
  return simplex_label(*flow_category, g);
}

SimplicialChain transport_simplex(const SimplicialComplex& s_alpha, int dim, std::size_t simplex,
                                  const SimplicialComplex& m, const VertexMap& pi_minus,
                                  const VertexMap& pi_plus, const SimplicialComplex& target) {
  const SimplicialComplex delta = SimplicialComplex::from_maximal(
      s_alpha.vertex_bound(), {s_alpha.simplex(dim, simplex)}, {1});
  FiberProductResult fp = fiber_product(MapInto{&delta, identity_map_of(s_alpha.vertex_bound())},
                                        MapInto{&m, pi_minus}, s_alpha);
  if (fp.complex.empty()) return {};
  VertexMap push(fp.complex.vertex_bound(), -1);
  for (int v : fp.complex.vertices()) push[v] = pi_plus[static_cast<std::size_t>(v) % fp.right_bound];
  return pushforward(fp.complex, target, push, fundamental_chain(fp.complex));
}

std::map<Generator, Integer> boundary_of(const FlowCategory& fc, const Generator& g) {
  std::map<Generator, Integer> out;
  const auto& a = fc.criticals[g.critical];
  const int k = g.dim + a.mu;
  auto add = [&](std::size_t crit, const SimplicialChain& c, int sign) {
    for (const auto& [idx, coef] : c.coefficients) {
      Integer& slot = out[Generator{crit, c.degree, idx}];
      slot += coef * sign;
      if (slot == 0) out.erase(Generator{crit, c.degree, idx});
    }
  };
  if (g.dim > 0)
    add(g.critical, boundary_chain(a.complex, SimplicialChain{g.dim, {{g.simplex, 1}}}),
        (k % 2 == 0) ? 1 : -1);
  for (const auto& m : fc.moduli) {
    if (m.source != a.id || m.complex.empty()) continue;
    const std::size_t bi = fc.critical_index(m.target);
    add(bi, transport_simplex(a.complex, g.dim, g.simplex, m.complex, m.pi_minus, m.pi_plus,
                              fc.criticals[bi].complex),
        1);
  }
  return out;
}

FloerComplexBundle assemble(const FlowCategory& fc, const AssembleOptions& options) {
  auto d = [](const FlowCategory& cat) {
    return [&cat](const Generator& g) { return boundary_of(cat, g); };
  };
  FloerComplexBundle b = build(fc, Variant::bott, d(fc));
  auto failure = d_squared_failure(b);
  if (!failure) return b;
  if (options.allow_refinement) {
    FlowCategory fine = refine(fc);
    FloerComplexBundle r = build(fine, Variant::bott, d(fine));
    if (!d_squared_failure(r)) {
      r.path = "refined";
      return r;
    }
  }
  throw *failure;
}

FloerComplexBundle morse_assemble(const FlowCategory& fc) {
  for (const auto& c : fc.criticals)
    if (c.complex.dim() != 0 || c.complex.count(0) != 1)
      throw Error("morse_assemble: S_" + c.id + " is not a point");
  for (const auto& m : fc.moduli) {
    const int drop = fc.critical(m.source).mu - fc.critical(m.target).mu;
    if (drop == 1 && !m.complex.empty() && m.complex.dim() != 0)
      throw Error("morse_assemble: M(" + m.source + "," + m.target + ") is not a finite point set");
  }
  auto d = [&fc](const Generator& g) {
    std::map<Generator, Integer> out;
    const auto& a = fc.criticals[g.critical];
    for (const auto& m : fc.moduli) {
      if (m.source != a.id || m.complex.empty()) continue;
      const std::size_t bi = fc.critical_index(m.target);
      if (a.mu - fc.criticals[bi].mu != 1) continue;
      Integer count = 0;
      for (int o : m.complex.orientation()) count += o;
      if (count != 0) out[Generator{bi, 0, 0}] += count;
    }
    return out;
  };
  FloerComplexBundle b = build(fc, Variant::morse, d);
  if (auto failure = d_squared_failure(b)) throw *failure;
  return b;
}

// The circle is the first factor: with it on the left the product of a valid
// category is valid again without any orientation twist.
FlowCategory stabilize(const FlowCategory& fc, int n) {
  const SimplicialComplex circle = polygon(n);
  const VertexMap id = identity_map_of(static_cast<std::size_t>(n));
  FlowCategory out;
  out.name = fc.name + "-stable" + std::to_string(n);
  for (const auto& c : fc.criticals)
    out.criticals.push_back({c.id, c.mu, c.dim + 1, shuffle_product(circle, c.complex)});
  for (const auto& m : fc.moduli) {
    const auto& a = fc.critical(m.source);
    const auto& b = fc.critical(m.target);
    ModuliSpace s;
    s.source = m.source;
    s.target = m.target;
    if (!m.complex.empty()) {
      if (!is_order_preserving(m.complex, a.complex, m.pi_minus) ||
          !is_order_preserving(m.complex, b.complex, m.pi_plus))
        throw Error("stabilize: endpoint maps of M(" + m.source + "," + m.target +
                    ") do not preserve local vertex orders");
      s.complex = shuffle_product(circle, m.complex);
      s.pi_minus = product_map(circle, m.complex, circle, a.complex, id, m.pi_minus);
      s.pi_plus = product_map(circle, m.complex, circle, b.complex, id, m.pi_plus);
    } else {
      s.complex = m.complex;
    }
    const int nm = static_cast<int>(m.complex.vertex_bound());
    for (const auto& st : m.strata) {
      const auto* left = fc.moduli_between(m.source, st.gamma);
      const auto* right = fc.moduli_between(st.gamma, m.target);
      if (!left || !right) throw Error("stabilize: stratum through unknown " + st.gamma);
      const int n1 = static_cast<int>(left->complex.vertex_bound());
      const int n2 = static_cast<int>(right->complex.vertex_bound());
      Stratum t{st.gamma, {}};
      for (int c = 0; c < n; ++c)
        for (const auto& [x1, x2, v] : st.identification)
          t.identification.push_back({c * n1 + x1, c * n2 + x2, c * nm + v});
      s.strata.push_back(std::move(t));
    }
    out.moduli.push_back(std::move(s));
  }
  return out;
}

FlowCategory refine(const FlowCategory& fc) {
  FlowCategory out;
  out.name = fc.name + "-refined";
  std::vector<Subdivision> sds;
  for (const auto& c : fc.criticals) {
    sds.push_back(barycentric_subdivide(c.complex));
    out.criticals.push_back({c.id, c.mu, c.dim, sds.back().complex});
  }
  for (const auto& m : fc.moduli) {
    ModuliSpace s;
    s.source = m.source;
    s.target = m.target;
    if (!m.complex.empty()) {
      Subdivision sd = barycentric_subdivide(m.complex);
      const std::size_t a = fc.critical_index(m.source), b = fc.critical_index(m.target);
      s.pi_minus = subdivide_map(m.complex, sd, fc.criticals[a].complex, sds[a], m.pi_minus);
      s.pi_plus = subdivide_map(m.complex, sd, fc.criticals[b].complex, sds[b], m.pi_plus);
      s.complex = sd.complex;
    }
    out.moduli.push_back(std::move(s));
  }
  return out;
}

HomologyResult floer_homology(const FloerComplexBundle& b) { return homology(*b.complex); }
HomologyResult floer_cohomology(const FloerComplexBundle& b) { return cohomology(*b.complex); }

}  // namespace floer
