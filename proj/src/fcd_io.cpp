#include "floer/errors.hpp"
#include "floer/flow_category.hpp"
#include "floer/json_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace floer {

namespace json_util {

json encode_complex(const SimplicialComplex& k) {
  json out = json::object();
  out["vertices"] = k.vertex_bound();
  json simplices = json::array(), orders = json::array(), orientation = json::array();
  bool any_order = false;
  const auto maximal = k.maximal_simplices();
  for (const auto& s : maximal) {
    Simplex key = s;
    std::sort(key.begin(), key.end());
    simplices.push_back(key);
    orders.push_back(s);
    any_order = any_order || key != s;
    if (static_cast<int>(s.size()) - 1 == k.dim()) orientation.push_back(k.orientation()[*k.find(s)]);
  }
  out["simplices"] = simplices;
  out["orientation"] = orientation;
  if (any_order) out["orders"] = orders;
  return out;
}

SimplicialComplex decode_complex(const json& j, const std::string& where) {
  const int n = get_int(j, "vertices", where);
  if (n < 0) throw ParseError(where + ".vertices", "must be nonnegative");
  const json& simplices = get_array(j, "simplices", where);
  const json& orientation = get_array(j, "orientation", where);
  const json* orders = j.contains("orders") ? &get_array(j, "orders", where) : nullptr;
  if (orders && orders->size() != simplices.size())
    throw ParseError(where + ".orders", "must align with simplices");
  std::vector<Simplex> maximal;
  for (std::size_t i = 0; i < simplices.size(); ++i) {
    const std::string at = where + ".simplices[" + std::to_string(i) + "]";
    if (!simplices[i].is_array() || simplices[i].empty()) throw ParseError(at, "expected a nonempty array");
    Simplex s;
    for (const auto& v : simplices[i]) {
      if (!v.is_number_integer()) throw ParseError(at, "expected integers");
      s.push_back(v.get<int>());
    }
    for (std::size_t a = 1; a < s.size(); ++a)
      if (s[a - 1] >= s[a]) throw ParseError(at, "vertices must be strictly increasing");
    if (orders) {
      const std::string oat = where + ".orders[" + std::to_string(i) + "]";
      Simplex o;
      for (const auto& v : (*orders)[i]) {
        if (!v.is_number_integer()) throw ParseError(oat, "expected integers");
        o.push_back(v.get<int>());
      }
      Simplex key = o;
      std::sort(key.begin(), key.end());
      if (key != s) throw ParseError(oat, "must reorder the matching simplex");
      s = o;
    }
    maximal.push_back(s);
  }
  std::vector<int> signs;
  for (const auto& v : orientation) {
    if (!v.is_number_integer()) throw ParseError(where + ".orientation", "expected integers");
    signs.push_back(v.get<int>());
  }
  try {
    return SimplicialComplex::from_maximal(static_cast<std::size_t>(n), maximal, signs);
  } catch (const ShapeMismatch& e) {
    throw ParseError(where, e.what());
  }
}

json encode_vertex_map(const std::vector<int>& map) { return json(map); }

std::vector<int> decode_vertex_map(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ParseError(where, "expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

json encode_moduli(const ModuliSpace& m, const char* source_key, const char* target_key) {
  json out = json::object();
  out[source_key] = m.source;
  out[target_key] = m.target;
  out["complex"] = encode_complex(m.complex);
  out["pi_minus"] = encode_vertex_map(m.pi_minus);
  out["pi_plus"] = encode_vertex_map(m.pi_plus);
  json strata = json::array();
  for (const auto& s : m.strata) {
    json st = json::object();
    st["gamma"] = s.gamma;
    json ident = json::array();
    for (const auto& e : s.identification) ident.push_back({e[0], e[1], e[2]});
    st["identification"] = ident;
    strata.push_back(st);
  }
  out["strata"] = strata;
  return out;
}

ModuliSpace decode_moduli(const json& j, const std::string& where, const char* source_key,
                          const char* target_key, bool with_strata) {
  if (with_strata)
    expect_fields(j, where, {source_key, target_key, "complex", "pi_minus", "pi_plus", "strata"});
  else
    expect_fields(j, where, {source_key, target_key, "complex", "pi_minus", "pi_plus"}, {"strata"});
  ModuliSpace m;
  m.source = get_string(j, source_key, where);
  m.target = get_string(j, target_key, where);
  const json& c = j.at("complex");
  expect_fields(c, where + ".complex", {"vertices", "simplices", "orientation"}, {"orders"});
  m.complex = decode_complex(c, where + ".complex");
  m.pi_minus = decode_vertex_map(j.at("pi_minus"), where + ".pi_minus");
  m.pi_plus = decode_vertex_map(j.at("pi_plus"), where + ".pi_plus");
  for (const auto* p : {&m.pi_minus, &m.pi_plus})
    if (p->size() != m.complex.vertex_bound())
      throw ParseError(where + (p == &m.pi_minus ? ".pi_minus" : ".pi_plus"),
                       "length must equal the vertex count");
  if (j.contains("strata")) {
    const json& strata = get_array(j, "strata", where);
    for (std::size_t i = 0; i < strata.size(); ++i) {
      const std::string at = where + ".strata[" + std::to_string(i) + "]";
      expect_fields(strata[i], at, {"gamma", "identification"});
      Stratum s;
      s.gamma = get_string(strata[i], "gamma", at);
      for (const auto& e : get_array(strata[i], "identification", at)) {
        if (!e.is_array() || e.size() != 3 ||
            !std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_number_integer(); }))
          throw ParseError(at + ".identification", "entries must be [x1, x2, m] integer triples");
        s.identification.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
      }
      m.strata.push_back(std::move(s));
    }
  }
  return m;
}

json encode_category(const FlowCategory& fc) {
  json out = json::object();
  out["version"] = 1;
  out["name"] = fc.name;
  json crit = json::array();
  for (const auto& c : fc.criticals) {
    json e = json::object();
    e["id"] = c.id;
    e["mu"] = c.mu;
    e["dim"] = c.dim;
    const json cx = encode_complex(c.complex);
    for (auto& [k, v] : cx.items()) e[k] = v;
    crit.push_back(e);
  }
  out["criticals"] = crit;
  json mod = json::array();
  for (const auto& m : fc.moduli) mod.push_back(encode_moduli(m, "source", "target"));
  out["moduli"] = mod;
  return out;
}

FlowCategory decode_category(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  if (j.contains("version")) {
    const json& v = j.at("version");
    if (!v.is_number_integer()) throw ParseError(where + ".version", "expected an integer");
    if (v.get<int>() != 1)
      throw VersionMismatch("unsupported FCD version " + std::to_string(v.get<int>()));
  }
  expect_fields(j, where, {"version", "name", "criticals", "moduli"});
  FlowCategory fc;
  fc.name = get_string(j, "name", where);
  const json& crit = get_array(j, "criticals", where);
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const std::string at = where + ".criticals[" + std::to_string(i) + "]";
    expect_fields(crit[i], at, {"id", "mu", "dim", "vertices", "simplices", "orientation"},
                  {"orders"});
    CriticalManifold c;
    c.id = get_string(crit[i], "id", at);
    c.mu = get_int(crit[i], "mu", at);
    c.dim = get_int(crit[i], "dim", at);
    c.complex = decode_complex(crit[i], at);
    fc.criticals.push_back(std::move(c));
  }
  const json& mod = get_array(j, "moduli", where);
  for (std::size_t i = 0; i < mod.size(); ++i)
    fc.moduli.push_back(
        decode_moduli(mod[i], where + ".moduli[" + std::to_string(i) + "]", "source", "target", true));
  return fc;
}

}  // namespace json_util

std::string to_fcd_json(const FlowCategory& fc) {
  return json_util::pretty(json_util::encode_category(fc));
}

FlowCategory from_fcd_json(const std::string& text) {
  return json_util::decode_category(json_util::parse(text, "fcd"), "fcd");
}

FlowCategory load_fcd(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_fcd_json(ss.str());
}

void store_fcd(const FlowCategory& fc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_fcd_json(fc);
}

}  // namespace floer
