#include "floer/fiber_product.hpp"

#include "floer/errors.hpp"

#include <algorithm>
#include <set>

namespace floer {

namespace {

std::optional<VertexMap> inverse_if_injective(const SimplicialComplex& x, const VertexMap& f,
                                              std::size_t target_bound) {
  VertexMap inv(target_bound, -1);
  for (int v : x.vertices()) {
    int w = f[v];
    if (inv[w] >= 0) return std::nullopt;
    inv[w] = v;
  }
  return inv;
}

std::vector<std::vector<std::size_t>> tops_by_vertex(const SimplicialComplex& k) {
  std::vector<std::vector<std::size_t>> out(k.vertex_bound());
  if (k.empty()) return out;
  for (std::size_t i = 0; i < k.count(k.dim()); ++i)
    for (int v : k.simplex(k.dim(), i)) out[v].push_back(i);
  return out;
}

// Top simplices containing every vertex of `vs`.
std::vector<std::size_t> tops_containing(const std::vector<std::vector<std::size_t>>& by_vertex,
                                         const std::set<int>& vs) {
  std::vector<std::size_t> out;
  bool first = true;
  for (int v : vs) {
    const auto& list = by_vertex[v];
    if (first) {
      out = list;
      first = false;
    } else {
      std::vector<std::size_t> keep;
      std::set_intersection(out.begin(), out.end(), list.begin(), list.end(),
                            std::back_inserter(keep));
      out.swap(keep);
    }
  }
  return out;
}

// Affine coordinate of vertex v in the ordered simplex: 0 for the first
// vertex, e_{i} (1-based) for the i-th.
int position(const Simplex& s, int v) {
  return static_cast<int>(std::find(s.begin(), s.end(), v) - s.begin());
}

class Orienter {
 public:
  Orienter(const MapInto& f1, const MapInto& f2, const SimplicialComplex& s, std::size_t n2)
      : f1_(f1), f2_(f2), s_(s), n2_(n2), by1_(tops_by_vertex(*f1.domain)),
        by2_(tops_by_vertex(*f2.domain)), bys_(tops_by_vertex(s)) {}

  int sign(const Simplex& q) const {
    const SimplicialComplex& x1 = *f1_.domain;
    const SimplicialComplex& x2 = *f2_.domain;
    const int d1 = x1.dim(), d2 = x2.dim(), ds = s_.dim();
    std::set<int> left, right;
    for (int id : q) {
      left.insert(id / static_cast<int>(n2_));
      right.insert(id % static_cast<int>(n2_));
    }
    for (std::size_t si : tops_containing(by1_, left))
      for (std::size_t ti : tops_containing(by2_, right)) {
        const Simplex& sig = x1.simplex(d1, si);
        const Simplex& tau = x2.simplex(d2, ti);
        std::set<int> img;
        for (int v : sig) img.insert(f1_.map[v]);
        for (int v : tau) img.insert(f2_.map[v]);
        for (std::size_t ri : tops_containing(bys_, img)) {
          const Simplex& rho = s_.simplex(ds, ri);
          const std::size_t n = static_cast<std::size_t>(d1 + d2);
          IntMatrix m(n, n);
          // tangent edges of q
          for (std::size_t j = 1; j < q.size(); ++j) {
            auto put = [&](int id, int sgn) {
              int a = id / static_cast<int>(n2_), b = id % static_cast<int>(n2_);
              int pa = position(sig, a), pb = position(tau, b);
              if (pa > 0) m(pa - 1, j - 1) += sgn;
              if (pb > 0) m(d1 + pb - 1, j - 1) += sgn;
            };
            put(q[j], 1);
            put(q[0], -1);
          }
          // normal columns: rows of Phi = [A1 | -A2]
          const std::size_t k = q.size() - 1;
          auto rho_coord = [&](int y, int sgn, std::size_t row) {
            int p = position(rho, y);
            if (p > 0) m(row, k + p - 1) += sgn;
          };
          for (int i = 1; i <= d1; ++i) {
            rho_coord(f1_.map[sig[i]], 1, i - 1);
            rho_coord(f1_.map[sig[0]], -1, i - 1);
          }
          for (int i = 1; i <= d2; ++i) {
            rho_coord(f2_.map[tau[i]], -1, d1 + i - 1);
            rho_coord(f2_.map[tau[0]], 1, d1 + i - 1);
          }
          Integer det = determinant(m);
          if (det == 0) continue;
          int e = x1.orientation()[si] * x2.orientation()[ti] * s_.orientation()[ri];
          if ((ds * d2) % 2) e = -e;
          return det > 0 ? e : -e;
        }
      }
    return 0;
  }

 private:
  const MapInto& f1_;
  const MapInto& f2_;
  const SimplicialComplex& s_;
  std::size_t n2_;
  std::vector<std::vector<std::size_t>> by1_, by2_, bys_;
};

std::string show(const Simplex& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

}  // namespace

std::vector<double> pair_point(int id, std::size_t n1, std::size_t n2) {
  std::vector<double> p(n1 + n2, 0.0);
  p[static_cast<std::size_t>(id) / n2] = 1;
  p[n1 + static_cast<std::size_t>(id) % n2] = 1;
  return p;
}

FiberProductResult fiber_product(const MapInto& f1, const MapInto& f2, const SimplicialComplex& s) {
  const SimplicialComplex& x1 = *f1.domain;
  const SimplicialComplex& x2 = *f2.domain;
  const std::size_t n1 = x1.vertex_bound(), n2 = x2.vertex_bound();
  FiberProductResult out;
  out.right_bound = n2;
  out.proj_left.assign(n1 * n2, -1);
  out.proj_right.assign(n1 * n2, -1);
  out.to_target.assign(n1 * n2, -1);
  if (x1.empty() || x2.empty()) return out;
  for (const auto* f : {&f1, &f2}) {
    std::string defect = simplicial_map_defect(*f->domain, s, f->map);
    if (!defect.empty()) throw NonTransverse("fiber product: " + defect);
  }
  const int expected = x1.dim() + x2.dim() - s.dim();

  std::vector<Simplex> cells;
  auto id = [n2](int a, int b) { return a * static_cast<int>(n2) + b; };
  if (auto g = inverse_if_injective(x1, f1.map, s.vertex_bound())) {
    out.method = FiberProductResult::Method::preimage_left;
    for (int d = 0; d <= x2.dim(); ++d)
      for (const auto& c : x2.simplices(d)) {
        Simplex lifted, pre;
        bool ok = true;
        for (int v : c) {
          int a = (*g)[f2.map[v]];
          if (a < 0) {
            ok = false;
            break;
          }
          lifted.push_back(id(a, v));
          pre.push_back(a);
        }
        std::sort(pre.begin(), pre.end());
        pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
        if (ok && x1.find(pre)) cells.push_back(lifted);
      }
  } else if (auto h = inverse_if_injective(x2, f2.map, s.vertex_bound())) {
    out.method = FiberProductResult::Method::preimage_right;
    for (int d = 0; d <= x1.dim(); ++d)
      for (const auto& c : x1.simplices(d)) {
        Simplex lifted, pre;
        bool ok = true;
        for (int v : c) {
          int b = (*h)[f1.map[v]];
          if (b < 0) {
            ok = false;
            break;
          }
          lifted.push_back(id(v, b));
          pre.push_back(b);
        }
        std::sort(pre.begin(), pre.end());
        pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
        if (ok && x2.find(pre)) cells.push_back(lifted);
      }
  } else {
    out.method = FiberProductResult::Method::product;
    auto matches = [&](int v) {
      return f1.map[v / static_cast<int>(n2)] == f2.map[v % static_cast<int>(n2)];
    };
    const auto m2 = x2.maximal_simplices();
    for (const auto& a : x1.maximal_simplices()) {
      std::set<int> img;
      for (int v : a) img.insert(f1.map[v]);
      for (const auto& b : m2) {
        bool meets = false;
        for (int v : b) meets = meets || img.count(f2.map[v]);
        if (!meets) continue;
        for (auto& cell : shuffle_cells(a, b, n2)) {
          Simplex keep;
          for (int v : cell.tuple)
            if (matches(v)) keep.push_back(v);
          if (!keep.empty()) cells.push_back(keep);
        }
      }
    }
  }
  if (cells.empty()) {
    out.method = FiberProductResult::Method::empty;
    return out;
  }
  {
    std::set<Simplex> seen;
    std::vector<Simplex> unique;
    for (auto& c : cells) {
      Simplex key = c;
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) unique.push_back(std::move(c));
    }
    cells.swap(unique);
  }
  SimplicialComplex raw = SimplicialComplex::from_maximal(n1 * n2, cells);
  std::vector<Simplex> tops;
  for (const auto& c : raw.maximal_simplices()) {
    if (static_cast<int>(c.size()) - 1 != expected)
      throw NonTransverse("fiber product cell " + show(c) + " has dimension " +
                          std::to_string(c.size() - 1) + ", expected " + std::to_string(expected));
    tops.push_back(c);
  }
  Orienter orienter(f1, f2, s, n2);
  std::vector<int> signs;
  for (const auto& q : tops) {
    int e = orienter.sign(q);
    if (e == 0) throw NonTransverse("fiber product cell " + show(q) + " is not transverse");
    signs.push_back(e);
  }
  out.complex = SimplicialComplex::from_maximal(n1 * n2, tops, signs);
  if (auto check = check_pseudo_manifold(out.complex, false); !check)
    throw NonTransverse("fiber product: " + check.message);
  for (int v : out.complex.vertices()) {
    out.proj_left[v] = v / static_cast<int>(n2);
    out.proj_right[v] = v % static_cast<int>(n2);
    out.to_target[v] = f1.map[v / static_cast<int>(n2)];
  }
  return out;
}

GeometricComparison check_boundary_identity(const MapInto& f1, const MapInto& f2,
                                            const SimplicialComplex& s) {
  const SimplicialComplex& x1 = *f1.domain;
  const SimplicialComplex& x2 = *f2.domain;
  const std::size_t n1 = x1.vertex_bound(), n2 = x2.vertex_bound();
  auto coords = [n1, n2](int v) { return pair_point(v, n1, n2); };
  auto fund = [&](const FiberProductResult& r) {
    return embed_chain(r.complex, fundamental_chain(r.complex), coords);
  };
  FiberProductResult whole = fiber_product(f1, f2, s);
  GeometricChain lhs =
      embed_chain(whole.complex, boundary_chain(whole.complex, fundamental_chain(whole.complex)),
                  coords);
  SimplicialComplex b1 = boundary_complex(x1), b2 = boundary_complex(x2);
  // corners must be transverse too
  if (!b1.empty() && !b2.empty()) fiber_product(MapInto{&b1, f1.map}, MapInto{&b2, f2.map}, s);
  GeometricChain rhs;
  rhs.degree = lhs.degree;
  if (!b1.empty()) rhs = rhs + fund(fiber_product(MapInto{&b1, f1.map}, f2, s));
  if (!b2.empty()) {
    int sign = ((x1.dim() + s.dim()) % 2) ? -1 : 1;
    rhs = rhs + scaled(fund(fiber_product(f1, MapInto{&b2, f2.map}, s)), sign);
  }
  return compare_geometric(lhs, rhs);
}

GeometricComparison check_associativity(const MapInto& f1, const MapInto& f2, const VertexMap& g2,
                                        const MapInto& f3, const SimplicialComplex& s,
                                        const SimplicialComplex& s_prime) {
  const std::size_t n1 = f1.domain->vertex_bound(), n2 = f2.domain->vertex_bound(),
                    n3 = f3.domain->vertex_bound();
  auto coords = [=](int id) {
    std::vector<double> p(n1 + n2 + n3, 0.0);
    std::size_t u = static_cast<std::size_t>(id);
    p[u / (n2 * n3)] = 1;
    p[n1 + (u / n3) % n2] = 1;
    p[n1 + n2 + u % n3] = 1;
    return p;
  };
  FiberProductResult p12 = fiber_product(f1, f2, s);
  FiberProductResult left =
      fiber_product(MapInto{&p12.complex, compose_maps(g2, p12.proj_right)}, f3, s_prime);
  FiberProductResult p23 = fiber_product(MapInto{f2.domain, g2}, f3, s_prime);
  FiberProductResult right =
      fiber_product(f1, MapInto{&p23.complex, compose_maps(f2.map, p23.proj_left)}, s);
  return compare_geometric(
      embed_chain(left.complex, fundamental_chain(left.complex), coords),
      embed_chain(right.complex, fundamental_chain(right.complex), coords));
}

}  // namespace floer
