#include "floer/continuation.hpp"

#include "floer/errors.hpp"
#include "floer/json_util.hpp"
#include "floer/parallel.hpp"

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace floer {

namespace {

std::string label(const TransitionModuli& m) { return "T(" + m.source + "," + m.target + ")"; }

const TransitionModuli* find(const std::vector<TransitionModuli>& list, const std::string& a,
                             const std::string& b) {
  for (const auto& m : list)
    if (m.source == a && m.target == b) return &m;
  return nullptr;
}

bool has_critical(const FlowCategory& fc, const std::string& id) {
  for (const auto& c : fc.criticals)
    if (c.id == id) return true;
  return false;
}

std::string check_ids(const TransitionData& t) {
  if (!t.source || !t.target) return "transition without categories";
  const FlowCategory& a = *t.source;
  const FlowCategory& b = *t.target;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& m : t.moduli) {
    if (!has_critical(a, m.source) || !has_critical(b, m.target))
      return label(m) + " references an unknown critical manifold";
    if (!pairs.insert({m.source, m.target}).second) return "two transition spaces " + label(m);
    std::set<std::pair<int, std::string>> seen;
    for (const auto& s : m.strata) {
      const bool src = s.side == MixedStratum::Side::source;
      if (!seen.insert({src ? 0 : 1, s.gamma}).second)
        return label(m) + ": two strata through '" + s.gamma + "'";
      const FlowCategory& side = src ? a : b;
      if (!has_critical(side, s.gamma))
        return label(m) + ": stratum through unknown '" + s.gamma + "'";
      const bool ok = src ? a.moduli_between(m.source, s.gamma) && find(t.moduli, s.gamma, m.target)
                          : find(t.moduli, m.source, s.gamma) && b.moduli_between(s.gamma, m.target);
      if (!ok) return label(m) + ": stratum through '" + s.gamma + "' names a missing space";
    }
  }
  return {};
}

std::string check_dimensions(const TransitionData& t) {
  for (const auto& m : t.moduli) {
    if (m.complex.empty()) continue;
    const auto& a = t.source->critical(m.source);
    const int expected = a.dim + a.mu - t.target->critical(m.target).mu + t.shift;
    if (m.complex.dim() != expected)
      return label(m) + " has dimension " + std::to_string(m.complex.dim()) + ", expected " +
             std::to_string(expected);
  }
  return {};
}

std::string check_endpoints(const TransitionData& t) {
  for (const auto& m : t.moduli) {
    if (m.complex.empty()) continue;
    if (auto d = simplicial_map_defect(m.complex, t.source->critical(m.source).complex, m.pi_minus);
        !d.empty())
      return label(m) + " pi_minus: " + d;
    if (auto d = simplicial_map_defect(m.complex, t.target->critical(m.target).complex, m.pi_plus);
        !d.empty())
      return label(m) + " pi_plus: " + d;
  }
  return {};
}

std::string check_corners(const TransitionData& t) {
  for (const auto& m : t.moduli)
    if (auto r = check_pseudo_manifold(m.complex, false); !r) return label(m) + ": " + r.message;
  return {};
}

// Fiber product of a face through gamma, or nullopt when a factor is missing.
std::optional<FiberProductResult> face_product(const TransitionData& t, const TransitionModuli& m,
                                               MixedStratum::Side side, const std::string& gamma) {
  if (side == MixedStratum::Side::source) {
    const ModuliSpace* left = t.source->moduli_between(m.source, gamma);
    const TransitionModuli* right = find(t.moduli, gamma, m.target);
    if (!left || !right || left->complex.empty() || right->complex.empty()) return std::nullopt;
    return fiber_product(MapInto{&left->complex, left->pi_plus},
                         MapInto{&right->complex, right->pi_minus},
                         t.source->critical(gamma).complex);
  }
  const TransitionModuli* left = find(t.moduli, m.source, gamma);
  const ModuliSpace* right = t.target->moduli_between(gamma, m.target);
  if (!left || !right || left->complex.empty() || right->complex.empty()) return std::nullopt;
  return fiber_product(MapInto{&left->complex, left->pi_plus}, MapInto{&right->complex, right->pi_minus},
                       t.target->critical(gamma).complex);
}

std::string check_strata(const TransitionData& t) {
  for (const auto& m : t.moduli) {
    if (m.complex.empty()) continue;
    const int sign = transition_stratum_sign(t, m);
    std::vector<BoundaryFace> faces;
    for (auto side : {MixedStratum::Side::source, MixedStratum::Side::target}) {
      const FlowCategory& cat = side == MixedStratum::Side::source ? *t.source : *t.target;
      const char* tag = side == MixedStratum::Side::source ? "source" : "target";
      for (const auto& g : cat.criticals) {
        std::optional<FiberProductResult> fp;
        try {
          fp = face_product(t, m, side, g.id);
        } catch (const NonTransverse& e) {
          return label(m) + ": " + tag + " stratum through '" + g.id + "': " + e.what();
        }
        const MixedStratum* st = nullptr;
        for (const auto& s : m.strata)
          if (s.side == side && s.gamma == g.id) st = &s;
        if (!fp || fp->complex.empty()) {
          if (st && !st->identification.empty())
            return label(m) + ": " + tag + " stratum through '" + g.id +
                   "' but the fiber product is empty";
          continue;
        }
        if (!st)
          return label(m) + ": undeclared nonempty " + tag + " stratum through '" + g.id + "'";
        const int face_sign =
            side == MixedStratum::Side::source ? sign : (t.shift % 2 == 0 ? -sign : sign);
        faces.push_back({std::string(tag) + " '" + g.id + "'", std::move(*fp), &st->identification,
                         face_sign});
      }
    }
    if (auto r = compare_boundary(m.complex, faces); !r.empty()) return label(m) + ": " + r;
  }
  return {};
}

std::string check_strata_endpoints(const TransitionData& t) {
  for (const auto& m : t.moduli)
    for (const auto& s : m.strata) {
      const bool src = s.side == MixedStratum::Side::source;
      const VertexMap *l_minus, *l_plus, *r_minus, *r_plus;
      if (src) {
        const auto* l = t.source->moduli_between(m.source, s.gamma);
        const auto* r = find(t.moduli, s.gamma, m.target);
        l_minus = &l->pi_minus, l_plus = &l->pi_plus, r_minus = &r->pi_minus, r_plus = &r->pi_plus;
      } else {
        const auto* l = find(t.moduli, m.source, s.gamma);
        const auto* r = t.target->moduli_between(s.gamma, m.target);
        l_minus = &l->pi_minus, l_plus = &l->pi_plus, r_minus = &r->pi_minus, r_plus = &r->pi_plus;
      }
      for (const auto& [x1, x2, v] : s.identification) {
        if (x1 < 0 || static_cast<std::size_t>(x1) >= l_minus->size() || x2 < 0 ||
            static_cast<std::size_t>(x2) >= r_plus->size() || v < 0 ||
            static_cast<std::size_t>(v) >= m.pi_minus.size())
          return label(m) + ": stratum through '" + s.gamma + "' has an out-of-range vertex";
        if (m.pi_minus[v] != (*l_minus)[x1] || m.pi_plus[v] != (*r_plus)[x2] ||
            (*l_plus)[x1] != (*r_minus)[x2])
          return label(m) + ": endpoint maps do not factor through stratum '" + s.gamma + "'";
      }
    }
  return {};
}

// Operator sigma -> (-1)^(k twist) sum_T transport(sigma, T) of the given shift.
ChainMapData assemble_operator(const std::vector<TransitionModuli>& moduli,
                               const FloerComplexBundle& a, const FloerComplexBundle& b, int shift,
                               int twist) {
  const FlowCategory& ca = *a.flow_category;
  const FlowCategory& cb = *b.flow_category;
  std::vector<Generator> all;
  for (const auto& [k, list] : a.generators) all.insert(all.end(), list.begin(), list.end());
  std::vector<std::vector<std::pair<Generator, Integer>>> columns(all.size());
  parallel_for(all.size(), [&](std::size_t i) {
    const Generator& g = all[i];
    const auto& alpha = ca.criticals[g.critical];
    const int k = g.dim + alpha.mu;
    const int sign = ((k * twist) % 2 == 0) ? 1 : -1;
    std::map<Generator, Integer> acc;
    for (const auto& m : moduli) {
      if (m.source != alpha.id || m.complex.empty()) continue;
      const std::size_t bi = cb.critical_index(m.target);
      auto chain = transport_simplex(alpha.complex, g.dim, g.simplex, m.complex, m.pi_minus,
                                     m.pi_plus, cb.criticals[bi].complex);
      for (const auto& [idx, c] : chain.coefficients) {
        Generator h{bi, chain.degree, idx};
        if (chain.degree + cb.criticals[bi].mu != k + shift)
          throw Error(a.label(g) + ": " + "T(" + m.source + "," + m.target +
                      ") lands in the wrong degree");
        acc[h] += c * sign;
      }
    }
    for (auto& [h, c] : acc)
      if (c != 0) columns[i].push_back({h, c});
  });
  ChainMapData f;
  f.source = a.complex;
  f.target = b.complex;
  f.degree_shift = shift;
  std::size_t col = 0;
  for (const auto& [k, list] : a.generators) {
    IntMatrix m(b.complex->rank(k + shift), list.size());
    bool any = false;
    for (std::size_t j = 0; j < list.size(); ++j, ++col)
      for (const auto& [h, c] : columns[col]) {
        m(b.position(h), j) = c;
        any = true;
      }
    if (any) f.matrices[k] = std::move(m);
  }
  return f;
}

FloerComplexBundle exact_bundle(const FlowCategory& fc) {
  return assemble(fc, AssembleOptions{false});
}

// "label: composite" of the first generator where d F != F d.
std::string chain_map_defect(const ChainMapData& f, const FloerComplexBundle& a,
                             const FloerComplexBundle& b) {
  for (const auto& [k, list] : a.generators) {
    IntMatrix lhs = b.complex->boundary(k + f.degree_shift) * f.matrix(k);
    IntMatrix rhs = f.matrix(k - 1) * a.complex->boundary(k);
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) continue;
    IntMatrix diff = lhs - rhs;
    for (std::size_t j = 0; j < diff.cols(); ++j) {
      std::ostringstream os;
      bool any = false;
      for (std::size_t i = 0; i < diff.rows(); ++i)
        if (diff(i, j) != 0) {
          os << (any ? " + " : "") << diff(i, j) << "*"
             << b.label(b.generators.at(k + f.degree_shift - 1)[i]);
          any = true;
        }
      if (any) return a.label(list[j]) + ": dF - Fd = " + os.str();
    }
  }
  return {};
}

bool is_identity_on_homology(const InducedMap& m) {
  for (const auto& [k, d] : m.degrees) {
    if (d.matrix.rows() != d.matrix.cols()) return false;
    for (std::size_t i = 0; i < d.matrix.rows(); ++i)
      for (std::size_t j = 0; j < d.matrix.cols(); ++j) {
        Integer e = d.matrix(i, j) - (i == j ? 1 : 0);
        const Integer& order = d.target_orders[i];
        if (order != 0) e %= order;
        if (e != 0) return false;
      }
  }
  return true;
}

}  // namespace

TransitionData identity_transition(std::shared_ptr<const FlowCategory> fc) {
  TransitionData t;
  t.name = "identity";
  t.source = fc;
  t.target = fc;
  for (const auto& c : fc->criticals) {
    VertexMap id(c.complex.vertex_bound());
    std::iota(id.begin(), id.end(), 0);
    t.moduli.push_back({c.id, c.id, c.complex, id, id, {}});
  }
  return t;
}

int transition_stratum_sign(const TransitionData& t, const TransitionModuli& m) {
  const auto& a = t.source->critical(m.source);
  return ((a.mu + a.dim) % 2 == 0) ? 1 : -1;
}

ValidationReport validate_transition(const TransitionData& t) {
  using Check = std::string (*)(const TransitionData&);
  const std::pair<const char*, Check> checks[] = {
      {"ids", check_ids},
      {"dimension", check_dimensions},
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
      failure = fn(t);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    report.checks.push_back({name, failure.empty(), failure});
    if (!failure.empty()) report.ok = false;
  }
  return report;
}

ChainMapData assemble_chain_map(const TransitionData& t, const FloerComplexBundle& a,
                                const FloerComplexBundle& b) {
  ChainMapData f = assemble_operator(t.moduli, a, b, t.shift, t.shift);
  if (auto defect = chain_map_defect(f, a, b); !defect.empty())
    throw ChainMapFailure(t.name + ": " + defect);
  return f;
}

ChainMapData assemble_chain_map(const TransitionData& t) {
  return assemble_chain_map(t, exact_bundle(*t.source), exact_bundle(*t.target));
}

ChainMapData assemble_homotopy(const HomotopyData& h, int map_shift, const FloerComplexBundle& a,
                               const FloerComplexBundle& b) {
  const FlowCategory& ca = *a.flow_category;
  const FlowCategory& cb = *b.flow_category;
  for (const auto& m : h.moduli) {
    if (m.complex.empty()) continue;
    const auto& s = ca.critical(m.source);
    const int expected = s.dim + s.mu - cb.critical(m.target).mu + map_shift + 1;
    if (m.complex.dim() != expected)
      throw Error(h.name + ": H(" + m.source + "," + m.target + ") has dimension " +
                  std::to_string(m.complex.dim()) + ", expected " + std::to_string(expected));
  }
  return assemble_operator(h.moduli, a, b, map_shift + 1, map_shift);
}

ProtocolVerdict verify_invariance_protocol(const TransitionData& fwd, const TransitionData& bwd,
                                           const HomotopyData& glue_fwd_bwd,
                                           const HomotopyData& glue_to_identity,
                                           const HomotopyData* glue_bwd_fwd,
                                           const HomotopyData* glue_to_identity_b) {
  ProtocolVerdict v;
  auto step = [&v](const std::string& name, const std::function<std::string()>& body) {
    if (!v.steps.empty() && !v.steps.back().ok) {
      v.steps.push_back({name, false, "skipped"});
      return;
    }
    std::string failure;
    try {
      failure = body();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    v.steps.push_back({name, failure.empty(), failure});
  };

  std::optional<FloerComplexBundle> a, b;
  std::optional<ChainMapData> f_fwd, f_bwd, f_glued, f_glued_b;
  step("transitions", [&]() -> std::string {
    if (bwd.shift != -fwd.shift) return "backward shift must be the negative of the forward shift";
    if (!fwd.source || !fwd.target || !bwd.source || !bwd.target)
      return "transition without categories";
    if (!(*bwd.source == *fwd.target) || !(*bwd.target == *fwd.source))
      return "backward transition does not run from B to A";
    for (const TransitionData* t : {&fwd, &bwd, &glue_fwd_bwd.glued, &glue_to_identity.glued}) {
      auto r = validate_transition(*t);
      if (!r) return t->name + ": " + r.first_failure();
    }
    a = exact_bundle(*fwd.source);
    b = exact_bundle(*fwd.target);
    f_fwd = assemble_chain_map(fwd, *a, *b);
    f_bwd = assemble_chain_map(bwd, *b, *a);
    f_glued = assemble_chain_map(glue_fwd_bwd.glued, *a, *a);
    return {};
  });
  step("step1-homotopy", [&]() -> std::string {
    ChainMapData composite = compose(*f_bwd, *f_fwd);
    ChainMapData theta = assemble_homotopy(glue_fwd_bwd, 0, *a, *a);
    auto r = verify_chain_homotopy(composite, *f_glued, theta);
    if (!r) return "F_bwd F_fwd - F_glued != d Theta + Theta d in degree " +
                   std::to_string(*r.failing_degree);
    return {};
  });
  step("step2-identity", [&]() -> std::string {
    ChainMapData target = assemble_chain_map(glue_to_identity.glued, *a, *a);
    ChainMapData id = identity_map(a->complex);
    for (const auto& [k, r] : a->complex->ranks())
      if (!(target.matrix(k) == id.matrix(k)))
        return glue_to_identity.glued.name + " does not induce the identity in degree " +
               std::to_string(k);
    ChainMapData theta = assemble_homotopy(glue_to_identity, 0, *a, *a);
    auto r = verify_chain_homotopy(*f_glued, target, theta);
    if (!r) return "F_glued - id != d Theta + Theta d in degree " + std::to_string(*r.failing_degree);
    return {};
  });
  if (glue_bwd_fwd || glue_to_identity_b) {
    step("step1-symmetric", [&]() -> std::string {
      if (!glue_bwd_fwd || !glue_to_identity_b) return "symmetric data needs both homotopies";
      for (const TransitionData* t : {&glue_bwd_fwd->glued, &glue_to_identity_b->glued}) {
        auto r = validate_transition(*t);
        if (!r) return t->name + ": " + r.first_failure();
      }
      f_glued_b = assemble_chain_map(glue_bwd_fwd->glued, *b, *b);
      ChainMapData theta = assemble_homotopy(*glue_bwd_fwd, 0, *b, *b);
      auto r = verify_chain_homotopy(compose(*f_fwd, *f_bwd), *f_glued_b, theta);
      if (!r) return "F_fwd F_bwd - F_glued != d Theta + Theta d in degree " +
                     std::to_string(*r.failing_degree);
      return {};
    });
    step("step2-symmetric", [&]() -> std::string {
      ChainMapData target = assemble_chain_map(glue_to_identity_b->glued, *b, *b);
      ChainMapData id = identity_map(b->complex);
      for (const auto& [k, r] : b->complex->ranks())
        if (!(target.matrix(k) == id.matrix(k)))
          return glue_to_identity_b->glued.name + " does not induce the identity in degree " +
                 std::to_string(k);
      ChainMapData theta = assemble_homotopy(*glue_to_identity_b, 0, *b, *b);
      auto r = verify_chain_homotopy(*f_glued_b, target, theta);
      if (!r) return "F_glued - id != d Theta + Theta d in degree " + std::to_string(*r.failing_degree);
      return {};
    });
  }
  step("step3-homology", [&]() -> std::string {
    v.forward = induced_map_on_homology(*f_fwd);
    v.backward = induced_map_on_homology(*f_bwd);
    v.forward_backward_identity = is_identity_on_homology(induced_map_on_homology(compose(*f_bwd, *f_fwd)));
    v.backward_forward_identity = is_identity_on_homology(induced_map_on_homology(compose(*f_fwd, *f_bwd)));
    if (!v.forward->is_isomorphism) return "F_fwd is not an isomorphism on homology";
    if (!v.backward->is_isomorphism) return "F_bwd is not an isomorphism on homology";
    if (!v.forward_backward_identity) return "(F_bwd F_fwd)_* is not the identity";
    if (!v.backward_forward_identity) return "(F_fwd F_bwd)_* is not the identity";
    const HomologyResult ha = homology(*a->complex), hb = homology(*b->complex);
    for (const auto& [k, g] : ha.groups) {
      auto it = hb.groups.find(k + fwd.shift);
      const bool same = it == hb.groups.end() ? g.is_zero() : g == it->second;
      if (!same)
        return "H_" + std::to_string(k) + "(A) differs from H_" + std::to_string(k + fwd.shift) + "(B)";
    }
    return {};
  });
  v.verified = std::all_of(v.steps.begin(), v.steps.end(), [](const ProtocolStep& s) { return s.ok; });
  return v;
}

// ---- files --------------------------------------------------------------

namespace {

using json_util::json;

json encode_transition_moduli(const TransitionModuli& m) {
  ModuliSpace plain{m.source, m.target, m.complex, m.pi_minus, m.pi_plus, {}};
  json out = json_util::encode_moduli(plain, "source", "target");
  json strata = json::array();
  for (const auto& s : m.strata) {
    json st = json::object();
    st["side"] = s.side == MixedStratum::Side::source ? "source" : "target";
    st["gamma"] = s.gamma;
    json ident = json::array();
    for (const auto& e : s.identification) ident.push_back({e[0], e[1], e[2]});
    st["identification"] = ident;
    strata.push_back(st);
  }
  out["strata"] = strata;
  return out;
}

TransitionModuli decode_transition_moduli(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  json plain = j;
  plain.erase("strata");
  ModuliSpace m = json_util::decode_moduli(plain, where, "source", "target", false);
  json_util::expect_fields(j, where, {"source", "target", "complex", "pi_minus", "pi_plus", "strata"});
  TransitionModuli t{m.source, m.target, m.complex, m.pi_minus, m.pi_plus, {}};
  const json& strata = json_util::get_array(j, "strata", where);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string at = where + ".strata[" + std::to_string(i) + "]";
    json_util::expect_fields(strata[i], at, {"side", "gamma", "identification"});
    MixedStratum s;
    const std::string side = json_util::get_string(strata[i], "side", at);
    if (side != "source" && side != "target") throw ParseError(at + ".side", "must be source or target");
    s.side = side == "source" ? MixedStratum::Side::source : MixedStratum::Side::target;
    s.gamma = json_util::get_string(strata[i], "gamma", at);
    for (const auto& e : json_util::get_array(strata[i], "identification", at)) {
      if (!e.is_array() || e.size() != 3 ||
          !std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_number_integer(); }))
        throw ParseError(at + ".identification", "entries must be [x1, x2, m] integer triples");
      s.identification.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    }
    t.strata.push_back(std::move(s));
  }
  return t;
}

std::string key_of(const std::shared_ptr<const FlowCategory>& p, const FlowCategory& a,
                   const FlowCategory& b) {
  if (p.get() == &a) return "a";
  if (p.get() == &b) return "b";
  if (*p == a) return "a";
  if (*p == b) return "b";
  throw Error("transition refers to a category that is neither a nor b");
}

json encode_transition(const TransitionData& t, const FlowCategory& a, const FlowCategory& b) {
  json out = json::object();
  out["name"] = t.name;
  out["from"] = key_of(t.source, a, b);
  out["to"] = key_of(t.target, a, b);
  out["shift"] = t.shift;
  json mods = json::array();
  for (const auto& m : t.moduli) mods.push_back(encode_transition_moduli(m));
  out["moduli"] = mods;
  return out;
}

TransitionData decode_transition(const json& j, const std::string& where,
                                 const std::shared_ptr<const FlowCategory>& a,
                                 const std::shared_ptr<const FlowCategory>& b) {
  json_util::expect_fields(j, where, {"name", "from", "to", "shift", "moduli"});
  TransitionData t;
  t.name = json_util::get_string(j, "name", where);
  auto pick = [&](const char* key) {
    const std::string v = json_util::get_string(j, key, where);
    if (v == "a") return a;
    if (v == "b") return b;
    throw ParseError(where + "." + key, "must be \"a\" or \"b\"");
  };
  t.source = pick("from");
  t.target = pick("to");
  t.shift = json_util::get_int(j, "shift", where);
  const json& mods = json_util::get_array(j, "moduli", where);
  for (std::size_t i = 0; i < mods.size(); ++i)
    t.moduli.push_back(decode_transition_moduli(mods[i], where + ".moduli[" + std::to_string(i) + "]"));
  return t;
}

}  // namespace

std::string to_transition_json(const TransitionFile& f, const FlowCategory& a,
                               const FlowCategory& b) {
  json out = json::object();
  out["version"] = 1;
  json ts = json::array();
  for (const auto& t : f.transitions) ts.push_back(encode_transition(t, a, b));
  out["transitions"] = ts;
  json hs = json::array();
  for (const auto& h : f.homotopies) {
    json e = json::object();
    e["name"] = h.name;
    e["glued"] = h.glued.name;
    json mods = json::array();
    for (const auto& m : h.moduli) mods.push_back(encode_transition_moduli(m));
    e["moduli"] = mods;
    hs.push_back(e);
  }
  out["homotopies"] = hs;
  json p = json::object();
  for (const auto& [role, name] : f.protocol) p[role] = name;
  out["protocol"] = p;
  return json_util::pretty(out);
}

TransitionFile from_transition_json(const std::string& text, std::shared_ptr<const FlowCategory> a,
                                    std::shared_ptr<const FlowCategory> b) {
  const json j = json_util::parse(text, "transitions");
  if (!j.is_object()) throw ParseError("transitions", "expected an object");
  if (j.contains("version") && j.at("version").is_number_integer() && j.at("version").get<int>() != 1)
    throw VersionMismatch("unsupported transition file version " +
                          std::to_string(j.at("version").get<int>()));
  json_util::expect_fields(j, "transitions", {"version", "transitions", "homotopies", "protocol"});
  TransitionFile f;
  const json& ts = json_util::get_array(j, "transitions", "transitions");
  for (std::size_t i = 0; i < ts.size(); ++i)
    f.transitions.push_back(decode_transition(ts[i], "transitions[" + std::to_string(i) + "]", a, b));
  const json& hs = json_util::get_array(j, "homotopies", "transitions");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const std::string at = "homotopies[" + std::to_string(i) + "]";
    json_util::expect_fields(hs[i], at, {"name", "glued", "moduli"});
    HomotopyData h;
    h.name = json_util::get_string(hs[i], "name", at);
    const std::string glued = json_util::get_string(hs[i], "glued", at);
    bool found = false;
    for (const auto& t : f.transitions)
      if (t.name == glued) h.glued = t, found = true;
    if (!found) throw ParseError(at + ".glued", "unknown transition '" + glued + "'");
    const json& mods = json_util::get_array(hs[i], "moduli", at);
    for (std::size_t k = 0; k < mods.size(); ++k)
      h.moduli.push_back(decode_transition_moduli(mods[k], at + ".moduli[" + std::to_string(k) + "]"));
    f.homotopies.push_back(std::move(h));
  }
  const json& p = j.at("protocol");
  if (!p.is_object()) throw ParseError("protocol", "expected an object");
  for (const auto& [role, name] : p.items()) {
    if (!name.is_string()) throw ParseError("protocol." + role, "expected a string");
    f.protocol[role] = name.get<std::string>();
  }
  return f;
}

TransitionFile load_transitions(const std::string& path, std::shared_ptr<const FlowCategory> a,
                                std::shared_ptr<const FlowCategory> b) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_transition_json(ss.str(), std::move(a), std::move(b));
}

void store_transitions(const TransitionFile& f, const FlowCategory& a, const FlowCategory& b,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_transition_json(f, a, b);
}

Comparison resolve_protocol(const TransitionFile& f) {
  static const std::set<std::string> roles = {"forward", "backward", "glue_fwd_bwd",
                                              "glue_to_identity", "glue_bwd_fwd",
                                              "glue_to_identity_b"};
  for (const auto& [role, name] : f.protocol)
    if (!roles.count(role)) throw ParseError("protocol." + role, "unknown role");
  auto transition = [&](const char* role) {
    auto it = f.protocol.find(role);
    if (it == f.protocol.end()) throw ParseError(std::string("protocol.") + role, "missing");
    for (const auto& t : f.transitions)
      if (t.name == it->second) return t;
    throw ParseError(std::string("protocol.") + role, "unknown transition '" + it->second + "'");
  };
  auto homotopy = [&](const char* role, bool required) -> std::optional<HomotopyData> {
    auto it = f.protocol.find(role);
    if (it == f.protocol.end()) {
      if (required) throw ParseError(std::string("protocol.") + role, "missing");
      return std::nullopt;
    }
    for (const auto& h : f.homotopies)
      if (h.name == it->second) return h;
    throw ParseError(std::string("protocol.") + role, "unknown homotopy '" + it->second + "'");
  };
  Comparison c{transition("forward"), transition("backward"), *homotopy("glue_fwd_bwd", true),
               *homotopy("glue_to_identity", true), homotopy("glue_bwd_fwd", false),
               homotopy("glue_to_identity_b", false)};
  return c;
}

}  // namespace floer
