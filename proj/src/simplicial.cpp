#include "floer/simplicial.hpp"

#include "floer/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace floer {

namespace {

Simplex sorted(Simplex s) {
  std::sort(s.begin(), s.end());
  return s;
}

bool has_repeat(const Simplex& s) {
  Simplex t = sorted(s);
  return std::adjacent_find(t.begin(), t.end()) != t.end();
}

std::string show(const Simplex& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

}  // namespace

int permutation_sign(const Simplex& from, const Simplex& to) {
  std::vector<std::size_t> pos(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    auto it = std::find(from.begin(), from.end(), to[i]);
    pos[i] = static_cast<std::size_t>(it - from.begin());
  }
  int sign = 1;
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j)
      if (pos[i] > pos[j]) sign = -sign;
  return sign;
}

// ---- complex --------------------------------------------------------------

SimplicialComplex SimplicialComplex::from_maximal(std::size_t vertex_bound,
                                                  std::vector<Simplex> maximal,
                                                  std::vector<int> orientation) {
  SimplicialComplex k;
  k.vertex_bound_ = vertex_bound;
  int top = -1;
  for (const auto& s : maximal) {
    if (s.empty()) throw ShapeMismatch("empty simplex");
    if (has_repeat(s)) throw ShapeMismatch("simplex " + show(s) + " repeats a vertex");
    for (int v : s)
      if (v < 0 || static_cast<std::size_t>(v) >= vertex_bound)
        throw ShapeMismatch("vertex " + std::to_string(v) + " out of range");
    top = std::max(top, static_cast<int>(s.size()) - 1);
  }
  if (top < 0) {
    if (!orientation.empty()) throw ShapeMismatch("orientation given for empty complex");
    return k;
  }
  std::vector<std::map<Simplex, Simplex>> faces(top + 1);  // sorted -> ordered
  for (const auto& s : maximal) {
    const std::size_t n = s.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      Simplex f;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) f.push_back(s[i]);
      auto [it, fresh] = faces[f.size() - 1].emplace(sorted(f), f);
      if (!fresh && it->second != f)
        throw ShapeMismatch("face " + show(it->first) + " gets orders " + show(it->second) +
                            " and " + show(f));
    }
  }
  k.cells_.resize(top + 1);
  k.index_.resize(top + 1);
  for (int d = 0; d <= top; ++d)
    for (auto& [key, ordered] : faces[d]) {
      k.index_[d].emplace(key, k.cells_[d].size());
      k.cells_[d].push_back(ordered);
    }
  std::vector<int> signs(k.cells_[top].size(), 1);
  std::size_t next = 0;
  std::set<Simplex> seen;
  for (const auto& s : maximal) {
    if (static_cast<int>(s.size()) - 1 != top) continue;
    if (!seen.insert(sorted(s)).second) throw ShapeMismatch("duplicate simplex " + show(s));
    if (orientation.empty()) {
      ++next;
      continue;
    }
    if (next >= orientation.size()) throw ShapeMismatch("orientation list too short");
    int o = orientation[next++];
    if (o != 1 && o != -1) throw ShapeMismatch("orientation entries must be +1 or -1");
    signs[k.index_[top].at(sorted(s))] = o;
  }
  if (!orientation.empty() && next != orientation.size())
    throw ShapeMismatch("orientation list has " + std::to_string(orientation.size()) +
                        " entries for " + std::to_string(next) + " top simplices");
  k.orientation_ = std::move(signs);
  return k;
}

std::size_t SimplicialComplex::count(int d) const {
  return d < 0 || d > dim() ? 0 : cells_[d].size();
}

std::vector<int> SimplicialComplex::vertices() const {
  std::vector<int> out;
  if (!empty())
    for (const auto& s : cells_[0]) out.push_back(s[0]);
  return out;
}

bool SimplicialComplex::has_vertex(int v) const {
  return !empty() && index_[0].count(Simplex{v}) > 0;
}

std::optional<std::size_t> SimplicialComplex::find(const Simplex& vertices) const {
  int d = static_cast<int>(vertices.size()) - 1;
  if (d < 0 || d > dim()) return std::nullopt;
  auto it = index_[d].find(sorted(vertices));
  if (it == index_[d].end()) return std::nullopt;
  return it->second;
}

std::optional<SimplicialComplex::Oriented> SimplicialComplex::orient(const Simplex& tuple) const {
  if (has_repeat(tuple)) return Oriented{0, 0};
  auto idx = find(tuple);
  if (!idx) return std::nullopt;
  return Oriented{*idx, permutation_sign(cells_[tuple.size() - 1][*idx], tuple)};
}

std::vector<Simplex> SimplicialComplex::maximal_simplices() const {
  std::vector<Simplex> out;
  std::set<Simplex> covered;
  for (int d = dim(); d >= 0; --d)
    for (const auto& s : cells_[d]) {
      Simplex key = sorted(s);
      if (!covered.count(key)) out.push_back(s);
      for (std::size_t i = 0; i < key.size() && key.size() > 1; ++i) {
        Simplex f = key;
        f.erase(f.begin() + static_cast<long>(i));
        covered.insert(f);
      }
    }
  return out;
}

bool SimplicialComplex::canonical_order() const {
  for (const auto& level : cells_)
    for (const auto& s : level)
      if (!std::is_sorted(s.begin(), s.end())) return false;
  return true;
}

SimplicialComplex SimplicialComplex::with_orientation(std::vector<int> signs) const {
  if (signs.size() != orientation_.size()) throw ShapeMismatch("orientation size mismatch");
  SimplicialComplex k = *this;
  k.orientation_ = std::move(signs);
  return k;
}

bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
  return a.vertex_bound_ == b.vertex_bound_ && a.cells_ == b.cells_ &&
         a.orientation_ == b.orientation_;
}

// ---- chains ---------------------------------------------------------------

void SimplicialChain::add(std::size_t index, const Integer& c) {
  if (c == 0) return;
  auto [it, fresh] = coefficients.emplace(index, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) coefficients.erase(it);
  }
}

SimplicialChain& SimplicialChain::operator+=(const SimplicialChain& o) {
  for (const auto& [i, c] : o.coefficients) add(i, c);
  return *this;
}

SimplicialChain SimplicialChain::scaled(const Integer& c) const {
  SimplicialChain out{degree, {}};
  for (const auto& [i, v] : coefficients) out.add(i, v * c);
  return out;
}

SimplicialChain tuple_chain(const SimplicialComplex& k, const Simplex& tuple) {
  SimplicialChain out{static_cast<int>(tuple.size()) - 1, {}};
  auto o = k.orient(tuple);
  if (!o) throw ShapeMismatch("tuple " + show(tuple) + " is not a simplex");
  if (o->sign != 0) out.add(o->index, o->sign);
  return out;
}

SimplicialChain fundamental_chain(const SimplicialComplex& k) {
  SimplicialChain out{k.dim(), {}};
  for (std::size_t i = 0; i < k.orientation().size(); ++i) out.add(i, k.orientation()[i]);
  return out;
}

SimplicialChain boundary_chain(const SimplicialComplex& k, const SimplicialChain& c) {
  SimplicialChain out{c.degree - 1, {}};
  if (c.degree <= 0) return out;
  for (const auto& [idx, coef] : c.coefficients) {
    const Simplex& s = k.simplex(c.degree, idx);
    for (std::size_t i = 0; i < s.size(); ++i) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(i));
      // faces inherit the local order, so the face sign is +1
      out.add(*k.find(f), (i % 2 == 0) ? coef : Integer(-coef));
    }
  }
  return out;
}

IntMatrix boundary_matrix(const SimplicialComplex& k, int d) {
  IntMatrix m(k.count(d - 1), k.count(d));
  if (d <= 0) return m;
  for (std::size_t j = 0; j < k.count(d); ++j) {
    SimplicialChain b = boundary_chain(k, SimplicialChain{d, {{j, 1}}});
    for (const auto& [i, c] : b.coefficients) m(i, j) = c;
  }
  return m;
}

IntegerChainComplex simplicial_chain_complex(const SimplicialComplex& k) {
  std::map<int, std::size_t> ranks;
  std::map<int, IntMatrix> bounds;
  for (int d = 0; d <= k.dim(); ++d) {
    ranks[d] = k.count(d);
    if (d > 0) bounds[d] = boundary_matrix(k, d);
  }
  return build_complex(ranks, bounds);
}

SimplicialComplex boundary_complex(const SimplicialComplex& k) {
  if (k.dim() <= 0) return {};
  SimplicialChain b = boundary_chain(k, fundamental_chain(k));
  std::vector<Simplex> faces;
  std::vector<int> signs;
  for (const auto& [i, c] : b.coefficients) {
    if (c != 1 && c != -1) throw ShapeMismatch("boundary coefficient is not +-1");
    faces.push_back(k.simplex(k.dim() - 1, i));
    signs.push_back(c == 1 ? 1 : -1);
  }
  return SimplicialComplex::from_maximal(k.vertex_bound(), faces, signs);
}

ManifoldCheck check_pseudo_manifold(const SimplicialComplex& k, bool closed) {
  if (k.empty()) return {};
  const int n = k.dim();
  for (const auto& s : k.maximal_simplices())
    if (static_cast<int>(s.size()) - 1 != n)
      return {false, "not pure: maximal simplex " + show(s)};
  if (n == 0) return {};
  std::vector<int> cofaces(k.count(n - 1), 0);
  for (const auto& s : k.simplices(n))
    for (std::size_t i = 0; i < s.size(); ++i) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(i));
      ++cofaces[*k.find(f)];
    }
  SimplicialChain b = boundary_chain(k, fundamental_chain(k));
  for (std::size_t i = 0; i < cofaces.size(); ++i) {
    Integer c = b.coefficients.count(i) ? b.coefficients.at(i) : Integer(0);
    const std::string face = show(k.simplex(n - 1, i));
    if (cofaces[i] > 2) return {false, "face " + face + " lies in more than two top simplices"};
    if (cofaces[i] == 2 && c != 0) return {false, "incoherent orientation across face " + face};
    if (cofaces[i] == 1 && closed) return {false, "free face " + face + " in a closed complex"};
  }
  return {};
}

// ---- maps -----------------------------------------------------------------

Simplex map_tuple(const VertexMap& map, const Simplex& tuple) {
  Simplex out;
  out.reserve(tuple.size());
  for (int v : tuple) out.push_back(map.at(static_cast<std::size_t>(v)));
  return out;
}

std::string simplicial_map_defect(const SimplicialComplex& source, const SimplicialComplex& target,
                                  const VertexMap& map) {
  if (map.size() != source.vertex_bound())
    return "vertex map has length " + std::to_string(map.size()) + ", expected " +
           std::to_string(source.vertex_bound());
  for (int v : source.vertices()) {
    int w = map[v];
    if (w < 0 || !target.has_vertex(w))
      return "vertex " + std::to_string(v) + " maps to non-vertex " + std::to_string(w);
  }
  for (const auto& s : source.maximal_simplices()) {
    Simplex img = sorted(map_tuple(map, s));
    img.erase(std::unique(img.begin(), img.end()), img.end());
    if (!target.find(img)) return "image of " + show(s) + " is not a simplex";
  }
  return {};
}

bool is_order_preserving(const SimplicialComplex& source, const SimplicialComplex& target,
                         const VertexMap& map) {
  for (const auto& s : source.maximal_simplices()) {
    Simplex img = map_tuple(map, s);
    Simplex set = sorted(img);
    set.erase(std::unique(set.begin(), set.end()), set.end());
    auto idx = target.find(set);
    if (!idx) return false;
    const Simplex& order = target.simplex(static_cast<int>(set.size()) - 1, *idx);
    std::vector<std::size_t> pos;
    for (int v : img) pos.push_back(static_cast<std::size_t>(
                          std::find(order.begin(), order.end(), v) - order.begin()));
    if (!std::is_sorted(pos.begin(), pos.end())) return false;
  }
  return true;
}

SimplicialChain pushforward(const SimplicialComplex& source, const SimplicialComplex& target,
                            const VertexMap& map, const SimplicialChain& c) {
  SimplicialChain out{c.degree, {}};
  for (const auto& [idx, coef] : c.coefficients) {
    Simplex img = map_tuple(map, source.simplex(c.degree, idx));
    auto o = target.orient(img);
    if (!o) throw ShapeMismatch("pushforward: image " + show(img) + " is not a simplex");
    if (o->sign != 0) out.add(o->index, coef * o->sign);
  }
  return out;
}

VertexMap compose_maps(const VertexMap& g, const VertexMap& f) {
  VertexMap out(f.size(), -1);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] >= 0) out[i] = g.at(static_cast<std::size_t>(f[i]));
  return out;
}

// ---- constructions --------------------------------------------------------

SimplicialComplex point_complex() { return SimplicialComplex::from_maximal(1, {{0}}); }

SimplicialComplex standard_simplex(int d) {
  Simplex s(static_cast<std::size_t>(d + 1));
  std::iota(s.begin(), s.end(), 0);
  return SimplicialComplex::from_maximal(s.size(), {s});
}

SimplicialComplex polygon(int n) {
  if (n < 3) throw ShapeMismatch("polygon needs at least 3 vertices");
  std::vector<Simplex> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return SimplicialComplex::from_maximal(static_cast<std::size_t>(n), edges);
}

SimplicialChain Subdivision::apply(const SimplicialComplex& original,
                                   const SimplicialChain& c) const {
  // Sd[v] = [b_v], Sd(s) = b_s * Sd(ds); cones prepend, keeping flags increasing.
  std::function<std::map<Simplex, Integer>(const Simplex&)> sd = [&](const Simplex& s) {
    std::map<Simplex, Integer> out;
    const int d = static_cast<int>(s.size()) - 1;
    const int b = barycenter[d][*original.find(s)];
    if (d == 0) {
      out[{b}] = 1;
      return out;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(i));
      for (auto& [t, coef] : sd(f)) {
        Simplex cone{b};
        cone.insert(cone.end(), t.begin(), t.end());
        out[cone] += (i % 2 == 0) ? coef : Integer(-coef);
      }
    }
    return out;
  };
  SimplicialChain out{c.degree, {}};
  for (const auto& [idx, coef] : c.coefficients)
    for (const auto& [t, v] : sd(original.simplex(c.degree, idx)))
      out.add(*complex.find(t), v * coef);
  return out;
}

Subdivision barycentric_subdivide(const SimplicialComplex& k) {
  Subdivision sd;
  if (k.empty()) return sd;
  sd.barycenter.resize(k.dim() + 1);
  int next = 0;
  for (int d = k.dim(); d >= 0; --d)
    for (std::size_t i = 0; i < k.count(d); ++i) sd.barycenter[d].push_back(next++);
  // maximal flags: chains from each maximal simplex down to a vertex
  std::vector<Simplex> flags;
  std::vector<Simplex> top_flags;
  std::function<void(const Simplex&, Simplex&)> walk = [&](const Simplex& s, Simplex& flag) {
    flag.push_back(sd.barycenter[s.size() - 1][*k.find(s)]);
    if (s.size() == 1) {
      flags.push_back(flag);
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex f = s;
        f.erase(f.begin() + static_cast<long>(i));
        walk(f, flag);
      }
    }
    flag.pop_back();
  };
  for (const auto& s : k.maximal_simplices()) {
    Simplex flag;
    walk(s, flag);
  }
  sd.complex = SimplicialComplex::from_maximal(static_cast<std::size_t>(next), flags);
  SimplicialChain f = sd.apply(k, fundamental_chain(k));
  std::vector<int> signs(sd.complex.count(sd.complex.dim()), 1);
  for (const auto& [i, c] : f.coefficients) signs[i] = c > 0 ? 1 : -1;
  sd.complex = sd.complex.with_orientation(signs);
  return sd;
}

VertexMap subdivide_map(const SimplicialComplex& source, const Subdivision& sd_source,
                        const SimplicialComplex& target, const Subdivision& sd_target,
                        const VertexMap& map) {
  VertexMap out(sd_source.complex.vertex_bound(), -1);
  for (int d = 0; d <= source.dim(); ++d)
    for (std::size_t i = 0; i < source.count(d); ++i) {
      Simplex img = sorted(map_tuple(map, source.simplex(d, i)));
      img.erase(std::unique(img.begin(), img.end()), img.end());
      auto idx = target.find(img);
      if (!idx) throw ShapeMismatch("subdivide_map: map is not simplicial");
      out[sd_source.barycenter[d][i]] = sd_target.barycenter[img.size() - 1][*idx];
    }
  return out;
}

namespace {

// All lattice paths from (0,0) to (p,q); each path is the list of steps
// (false = advance in a, true = advance in b).
void shuffles(int p, int q, std::vector<bool>& path, std::vector<std::vector<bool>>& out) {
  if (p == 0 && q == 0) {
    out.push_back(path);
    return;
  }
  if (p > 0) {
    path.push_back(false);
    shuffles(p - 1, q, path, out);
    path.pop_back();
  }
  if (q > 0) {
    path.push_back(true);
    shuffles(p, q - 1, path, out);
    path.pop_back();
  }
}

int shuffle_sign(const std::vector<bool>& path) {
  int sign = 1, b_seen = 0;
  for (bool step : path) {
    if (step)
      ++b_seen;
    else if (b_seen % 2)
      sign = -sign;
  }
  return sign;
}

}  // namespace

std::vector<ShuffleCell> shuffle_cells(const Simplex& a, const Simplex& b, std::size_t nb) {
  std::vector<std::vector<bool>> paths;
  std::vector<bool> path;
  shuffles(static_cast<int>(a.size()) - 1, static_cast<int>(b.size()) - 1, path, paths);
  std::vector<ShuffleCell> out;
  for (const auto& p : paths) {
    std::size_t i = 0, j = 0;
    Simplex t{static_cast<int>(a[0] * nb + b[0])};
    for (bool step : p) {
      (step ? j : i)++;
      t.push_back(static_cast<int>(a[i] * nb + b[j]));
    }
    out.push_back({t, shuffle_sign(p)});
  }
  return out;
}

SimplicialComplex shuffle_product(const SimplicialComplex& a, const SimplicialComplex& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t nb = b.vertex_bound();
  const int top = a.dim() + b.dim();
  std::vector<Simplex> cells;
  std::vector<int> signs;
  for (const auto& sa : a.maximal_simplices())
    for (const auto& sb : b.maximal_simplices()) {
      const bool is_top = static_cast<int>(sa.size() + sb.size()) - 2 == top;
      int base = 1;
      if (is_top)
        base = a.orientation()[*a.find(sa)] * b.orientation()[*b.find(sb)];
      for (auto& cell : shuffle_cells(sa, sb, nb)) {
        cells.push_back(cell.tuple);
        if (is_top) signs.push_back(base * cell.sign);
      }
    }
  return SimplicialComplex::from_maximal(a.vertex_bound() * nb, cells, signs);
}

SimplicialChain cross_chain(const SimplicialComplex& a, const SimplicialComplex& b,
                            const SimplicialComplex& product, const SimplicialChain& ca,
                            const SimplicialChain& cb) {
  SimplicialChain out{ca.degree + cb.degree, {}};
  for (const auto& [i, x] : ca.coefficients)
    for (const auto& [j, y] : cb.coefficients)
      for (auto& cell : shuffle_cells(a.simplex(ca.degree, i), b.simplex(cb.degree, j),
                                      b.vertex_bound())) {
        auto o = product.orient(cell.tuple);
        if (!o) throw ShapeMismatch("cross_chain: cell missing from product");
        out.add(o->index, x * y * cell.sign * o->sign);
      }
  return out;
}

VertexMap product_map(const SimplicialComplex& a, const SimplicialComplex& b,
                      const SimplicialComplex& a2, const SimplicialComplex& b2, const VertexMap& f,
                      const VertexMap& g) {
  const std::size_t nb = b.vertex_bound(), nb2 = b2.vertex_bound();
  VertexMap out(a.vertex_bound() * nb, -1);
  (void)a2;
  for (int i : a.vertices())
    for (int j : b.vertices())
      out[i * nb + j] = static_cast<int>(f[i] * nb2 + g[j]);
  return out;
}

}  // namespace floer
