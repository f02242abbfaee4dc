#include "floer/chain_complex.hpp"

#include "floer/errors.hpp"
#include "floer/smith.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace floer {

int IntegerChainComplex::min_degree() const { return ranks_.empty() ? 0 : ranks_.begin()->first; }
int IntegerChainComplex::max_degree() const {
  return ranks_.empty() ? -1 : ranks_.rbegin()->first;
}

std::size_t IntegerChainComplex::rank(int k) const {
  auto it = ranks_.find(k);
  return it == ranks_.end() ? 0 : it->second;
}

IntMatrix IntegerChainComplex::boundary(int k) const {
  auto it = boundaries_.find(k);
  if (it != boundaries_.end()) return it->second;
  return IntMatrix::zero(rank(k - 1), rank(k));
}

const std::vector<std::string>& IntegerChainComplex::labels(int k) const {
  static const std::vector<std::string> none;
  auto it = labels_.find(k);
  return it == labels_.end() ? none : it->second;
}

IntegerChainComplex build_complex(std::map<int, std::size_t> ranks,
                                  std::map<int, IntMatrix> boundaries,
                                  std::map<int, std::vector<std::string>> labels) {
  IntegerChainComplex c;
  if (!ranks.empty()) {
    int lo = ranks.begin()->first, hi = ranks.rbegin()->first;
    for (int k = lo; k <= hi; ++k) c.ranks_[k] = ranks.count(k) ? ranks[k] : 0;
  }
  for (auto& [k, m] : boundaries) {
    if (m.rows() != c.rank(k - 1) || m.cols() != c.rank(k))
      throw ShapeMismatch("boundary d_" + std::to_string(k) + " has shape " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected " + std::to_string(c.rank(k - 1)) + "x" +
                          std::to_string(c.rank(k)));
    if (!m.empty() && !m.is_zero()) c.boundaries_[k] = std::move(m);
  }
  for (auto& [k, l] : labels) {
    if (l.size() != c.rank(k))
      throw ShapeMismatch("label list for degree " + std::to_string(k) + " has wrong length");
    c.labels_[k] = std::move(l);
  }
  return c;
}

CheckResult verify_d_squared(const IntegerChainComplex& c) {
  if (c.empty()) return {};
  for (int k = c.min_degree() + 1; k <= c.max_degree(); ++k) {
    IntMatrix dk = c.boundary(k);
    IntMatrix dk1 = c.boundary(k - 1);
    if (dk.empty() || dk1.empty()) continue;
    if (!(dk1 * dk).is_zero()) return {false, k};
  }
  return {};
}

// ---- homology ----------------------------------------------------------

std::size_t HomologyResult::betti(int k) const {
  auto it = groups.find(k);
  return it == groups.end() ? 0 : it->second.betti;
}

std::vector<Integer> HomologyResult::torsion(int k) const {
  auto it = groups.find(k);
  return it == groups.end() ? std::vector<Integer>{} : it->second.torsion;
}

std::vector<std::size_t> HomologyResult::betti_range(int from, int to) const {
  std::vector<std::size_t> out;
  for (int k = from; k <= to; ++k) out.push_back(betti(k));
  return out;
}

std::vector<std::size_t> HomologyResult::betti_numbers() const {
  int lo = 0, hi = -1;
  bool any = false;
  for (const auto& [k, g] : groups)
    if (!g.is_zero()) {
      if (!any) lo = k;
      hi = k;
      any = true;
    }
  return any ? betti_range(lo, hi) : std::vector<std::size_t>{};
}

bool HomologyResult::torsion_free() const {
  return std::all_of(groups.begin(), groups.end(),
                     [](const auto& kv) { return kv.second.torsion.empty(); });
}

std::string HomologyResult::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, g] : groups) {
    if (!first) os << "; ";
    first = false;
    os << "H_" << k << " = ";
    if (g.is_zero()) {
      os << "0";
      continue;
    }
    bool plus = false;
    if (g.betti > 0) {
      os << "Z";
      if (g.betti > 1) os << "^" << g.betti;
      plus = true;
    }
    for (const auto& t : g.torsion) {
      os << (plus ? " + " : "") << "Z/" << t;
      plus = true;
    }
  }
  return os.str();
}

bool operator==(const HomologyResult& a, const HomologyResult& b) {
  auto nonzero = [](const HomologyResult& h) {
    std::map<int, HomologyGroup> out;
    for (const auto& [k, g] : h.groups)
      if (!g.is_zero()) out[k] = g;
    return out;
  };
  return nonzero(a) == nonzero(b);
}

HomologyResult homology(const IntegerChainComplex& c) {
  if (auto check = verify_d_squared(c); !check)
    throw NotAComplex(*check.failing_degree, "d^2 != 0 at degree " +
                                                 std::to_string(*check.failing_degree));
  HomologyResult out;
  if (c.empty()) return out;
  std::map<int, SmithForm> snf;
  for (int k = c.min_degree(); k <= c.max_degree() + 1; ++k) {
    IntMatrix d = c.boundary(k);
    if (!d.empty()) snf.emplace(k, smith_normal_form(d, false));
  }
  auto rank_of = [&](int k) -> std::size_t {
    auto it = snf.find(k);
    return it == snf.end() ? 0 : it->second.rank;
  };
  for (int k = c.min_degree(); k <= c.max_degree(); ++k) {
    HomologyGroup g;
    g.betti = c.rank(k) - rank_of(k) - rank_of(k + 1);
    if (auto it = snf.find(k + 1); it != snf.end())
      for (const auto& d : it->second.invariant_factors())
        if (d > 1) g.torsion.push_back(d);
    out.groups[k] = g;
  }
  return out;
}

IntegerChainComplex dual_complex(const IntegerChainComplex& c) {
  std::map<int, std::size_t> ranks;
  std::map<int, IntMatrix> bounds;
  std::map<int, std::vector<std::string>> labels;
  if (c.empty()) return build_complex(ranks);
  for (int k = c.min_degree(); k <= c.max_degree(); ++k) {
    ranks[-k] = c.rank(k);
    if (!c.labels(k).empty()) labels[-k] = c.labels(k);
  }
  // D_{-k} -> D_{-k-1} is the transpose of d_{k+1} : C_{k+1} -> C_k.
  for (int k = c.min_degree(); k < c.max_degree(); ++k) {
    IntMatrix d = c.boundary(k + 1);
    if (!d.empty()) bounds[-k] = d.transpose();
  }
  return build_complex(ranks, bounds, labels);
}

HomologyResult reindex_dual(const HomologyResult& dual_homology) {
  HomologyResult out;
  for (const auto& [k, g] : dual_homology.groups) out.groups[-k] = g;
  return out;
}

HomologyResult cohomology(const IntegerChainComplex& c) {
  if (auto check = verify_d_squared(c); !check)
    throw NotAComplex(*check.failing_degree, "d^2 != 0 at degree " +
                                                 std::to_string(*check.failing_degree));
  return reindex_dual(homology(dual_complex(c)));
}

// ---- chain maps --------------------------------------------------------

IntMatrix ChainMapData::matrix(int k) const {
  auto it = matrices.find(k);
  if (it != matrices.end()) return it->second;
  return IntMatrix::zero(target->rank(k + degree_shift), source->rank(k));
}

std::vector<int> ChainMapData::source_degrees() const {
  std::vector<int> out;
  if (source->empty()) return out;
  for (int k = source->min_degree(); k <= source->max_degree(); ++k) out.push_back(k);
  return out;
}

ChainMapData identity_map(std::shared_ptr<const IntegerChainComplex> c) {
  ChainMapData f{c, c, 0, {}};
  for (const auto& [k, r] : c->ranks()) f.matrices[k] = IntMatrix::identity(r);
  return f;
}

ChainMapData zero_map(std::shared_ptr<const IntegerChainComplex> source,
                      std::shared_ptr<const IntegerChainComplex> target, int shift) {
  return ChainMapData{std::move(source), std::move(target), shift, {}};
}

ChainMapData compose(const ChainMapData& g, const ChainMapData& f) {
  ChainMapData out{f.source, g.target, f.degree_shift + g.degree_shift, {}};
  for (int k : f.source_degrees()) out.matrices[k] = g.matrix(k + f.degree_shift) * f.matrix(k);
  return out;
}

namespace {

void check_shapes(const ChainMapData& f, const char* what) {
  if (!f.source || !f.target) throw ShapeMismatch(std::string(what) + ": missing complex");
  for (const auto& [k, m] : f.matrices)
    if (m.rows() != f.target->rank(k + f.degree_shift) || m.cols() != f.source->rank(k))
      throw ShapeMismatch(std::string(what) + ": matrix in degree " + std::to_string(k) +
                          " has shape " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
}

std::set<int> touched_degrees(const ChainMapData& f) {
  std::set<int> ks;
  if (!f.source->empty())
    for (int k = f.source->min_degree(); k <= f.source->max_degree() + 1; ++k) ks.insert(k);
  if (!f.target->empty())
    for (int k = f.target->min_degree(); k <= f.target->max_degree() + 1; ++k)
      ks.insert(k - f.degree_shift);
  return ks;
}

}  // namespace

CheckResult verify_chain_map(const ChainMapData& f) {
  check_shapes(f, "chain map");
  for (int k : touched_degrees(f)) {
    IntMatrix lhs = f.target->boundary(k + f.degree_shift) * f.matrix(k);
    IntMatrix rhs = f.matrix(k - 1) * f.source->boundary(k);
    if (!(lhs == rhs)) return {false, k};
  }
  return {};
}

CheckResult verify_chain_homotopy(const ChainMapData& f, const ChainMapData& g,
                                  const ChainMapData& theta) {
  check_shapes(f, "chain homotopy (f)");
  check_shapes(g, "chain homotopy (g)");
  check_shapes(theta, "chain homotopy (theta)");
  if (f.degree_shift != g.degree_shift || theta.degree_shift != f.degree_shift + 1)
    throw ShapeMismatch("chain homotopy: incompatible degree shifts");
  for (int k : touched_degrees(f)) {
    IntMatrix lhs = f.matrix(k) - g.matrix(k);
    IntMatrix rhs = f.target->boundary(k + f.degree_shift + 1) * theta.matrix(k) +
                    theta.matrix(k - 1) * f.source->boundary(k);
    if (!(lhs == rhs)) return {false, k};
  }
  return {};
}

// ---- induced maps ------------------------------------------------------

namespace {

Integer floor_mod(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

}  // namespace

std::vector<Integer> HomologyBasis::classify(const std::vector<Integer>& cycle) const {
  std::vector<Integer> y = coordinates.apply(cycle);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (orders[i] != 0) y[i] = floor_mod(y[i], orders[i]);
  return y;
}

HomologyBasis homology_basis(const IntegerChainComplex& c, int k) {
  HomologyBasis basis;
  basis.degree = k;
  const std::size_t n = c.rank(k);
  if (n == 0) {
    basis.coordinates = IntMatrix::zero(0, 0);
    return basis;
  }
  // Kernel of d_k: the trailing columns of V in U d_k V = D.
  IntMatrix dk = c.boundary(k);
  IntMatrix kernel, to_kernel;  // n x z and z x n
  if (dk.rows() == 0) {
    kernel = IntMatrix::identity(n);
    to_kernel = IntMatrix::identity(n);
  } else {
    SmithForm s = smith_normal_form(dk);
    const std::size_t z = n - s.rank;
    kernel = IntMatrix(n, z);
    to_kernel = IntMatrix(z, n);
    for (std::size_t j = 0; j < z; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        kernel(i, j) = s.right(i, s.rank + j);
        to_kernel(j, i) = s.right_inverse(s.rank + j, i);
      }
  }
  const std::size_t z = kernel.cols();
  IntMatrix image = to_kernel * c.boundary(k + 1);  // z x rank(k+1)
  IntMatrix u = IntMatrix::identity(z), u_inv = IntMatrix::identity(z);
  std::vector<Integer> diag(z, 0);
  if (image.cols() > 0 && z > 0) {
    SmithForm s = smith_normal_form(image);
    u = s.left;
    u_inv = s.left_inverse;
    for (std::size_t i = 0; i < s.rank; ++i) diag[i] = s.diagonal(i, i);
  }
  IntMatrix gens = kernel * u_inv;  // columns: adapted kernel basis
  IntMatrix coords = u * to_kernel;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < z; ++i)
    if (diag[i] != 1) keep.push_back(i);
  basis.coordinates = IntMatrix(keep.size(), n);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    basis.orders.push_back(diag[keep[r]]);
    basis.cycles.push_back(gens.column(keep[r]));
    for (std::size_t j = 0; j < n; ++j) basis.coordinates(r, j) = coords(keep[r], j);
  }
  return basis;
}

namespace {

std::pair<std::size_t, std::vector<Integer>> invariants(const std::vector<Integer>& orders) {
  std::size_t free = 0;
  std::vector<Integer> tors;
  for (const auto& o : orders) {
    if (o == 0)
      ++free;
    else
      tors.push_back(o);
  }
  std::sort(tors.begin(), tors.end());
  return {free, tors};
}

// A homomorphism between isomorphic finitely generated abelian groups is an
// isomorphism as soon as it is surjective.
bool is_iso(const InducedDegree& d) {
  if (invariants(d.source_orders) != invariants(d.target_orders)) return false;
  const std::size_t t = d.target_orders.size();
  if (t == 0) return true;
  IntMatrix gen(t, d.matrix.cols() + t);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t c = 0; c < d.matrix.cols(); ++c) gen(r, c) = d.matrix(r, c);
    gen(r, d.matrix.cols() + r) = d.target_orders[r];
  }
  SmithForm s = smith_normal_form(gen, false);
  if (s.rank != t) return false;
  for (const auto& f : s.invariant_factors())
    if (f != 1) return false;
  return true;
}

}  // namespace

InducedMap induced_map_on_homology(const ChainMapData& f) {
  for (const auto* c : {f.source.get(), f.target.get()})
    if (auto check = verify_d_squared(*c); !check)
      throw NotAComplex(*check.failing_degree, "induced map: complex fails d^2 = 0");
  if (auto check = verify_chain_map(f); !check)
    throw NotAChainMap("not a chain map at degree " + std::to_string(*check.failing_degree));

  InducedMap out;
  out.is_isomorphism = true;
  std::set<int> degrees;
  if (!f.source->empty())
    for (int k = f.source->min_degree(); k <= f.source->max_degree(); ++k) degrees.insert(k);
  if (!f.target->empty())
    for (int k = f.target->min_degree(); k <= f.target->max_degree(); ++k)
      degrees.insert(k - f.degree_shift);
  for (int k : degrees) {
    HomologyBasis src = homology_basis(*f.source, k);
    HomologyBasis tgt = homology_basis(*f.target, k + f.degree_shift);
    InducedDegree d;
    d.source_degree = k;
    d.target_degree = k + f.degree_shift;
    d.source_orders = src.orders;
    d.target_orders = tgt.orders;
    d.matrix = IntMatrix(tgt.orders.size(), src.orders.size());
    IntMatrix fk = f.matrix(k);
    for (std::size_t j = 0; j < src.cycles.size(); ++j) {
      if (tgt.orders.empty()) break;
      std::vector<Integer> y = tgt.classify(fk.apply(src.cycles[j]));
      for (std::size_t i = 0; i < y.size(); ++i) d.matrix(i, j) = y[i];
    }
    d.isomorphism = is_iso(d);
    out.is_isomorphism = out.is_isomorphism && d.isomorphism;
    out.degrees[k] = std::move(d);
  }
  return out;
}

}  // namespace floer
