#pragma once

#include "floer/chain_complex.hpp"
#include "floer/integer_matrix.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace floer {

/// Ordered vertex tuple. Inside a complex every simplex carries a local
/// vertex order; faces inherit the order of their cofaces.
using Simplex = std::vector<int>;

/// source vertex id -> target vertex id; -1 marks ids that are not vertices.
using VertexMap = std::vector<int>;

/// Finite simplicial complex with local vertex orders and signs on the
/// top-dimensional simplices.
///
/// Vertex ids are drawn from [0, vertex_bound). Ids that occur in no simplex
/// are allowed (fiber products use sparse pair ids). Simplices of each
/// dimension are kept sorted by their sorted vertex set.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// `maximal` lists simplices in their local order; every face is added.
  /// `orientation` is aligned with the maximal simplices of top dimension in
  /// the order given (empty means all +1). Throws ShapeMismatch on repeated
  /// vertices, out-of-range ids or two incompatible orders of one face.
  static SimplicialComplex from_maximal(std::size_t vertex_bound, std::vector<Simplex> maximal,
                                        std::vector<int> orientation = {});

  std::size_t vertex_bound() const { return vertex_bound_; }
  int dim() const { return static_cast<int>(cells_.size()) - 1; }
  bool empty() const { return cells_.empty(); }
  std::size_t count(int d) const;
  const Simplex& simplex(int d, std::size_t i) const { return cells_[d][i]; }
  const std::vector<Simplex>& simplices(int d) const { return cells_[d]; }
  /// Signs of the top-dimensional simplices, aligned with simplices(dim()).
  const std::vector<int>& orientation() const { return orientation_; }
  std::vector<int> vertices() const;
  bool has_vertex(int v) const;

  /// Index of the simplex with this vertex set (any order).
  std::optional<std::size_t> find(const Simplex& vertices) const;

  struct Oriented {
    std::size_t index = 0;
    int sign = 0;  // 0: the tuple repeats a vertex
  };
  /// Sign of the tuple against the local order of its simplex. nullopt when
  /// the vertex set is not a simplex.
  std::optional<Oriented> orient(const Simplex& tuple) const;

  /// Maximal simplices in local order (top-dimensional ones first).
  std::vector<Simplex> maximal_simplices() const;
  /// True when every local order is increasing.
  bool canonical_order() const;

  SimplicialComplex with_orientation(std::vector<int> signs) const;

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b);

 private:
  std::size_t vertex_bound_ = 0;
  std::vector<std::vector<Simplex>> cells_;
  std::vector<std::map<Simplex, std::size_t>> index_;
  std::vector<int> orientation_;
};

/// Normalized simplicial chain: coefficients on nondegenerate simplices of
/// one dimension, each taken with its local order.
struct SimplicialChain {
  int degree = 0;
  std::map<std::size_t, Integer> coefficients;

  void add(std::size_t index, const Integer& c);
  bool is_zero() const { return coefficients.empty(); }
  SimplicialChain& operator+=(const SimplicialChain& o);
  SimplicialChain scaled(const Integer& c) const;
  friend bool operator==(const SimplicialChain&, const SimplicialChain&) = default;
};

/// The chain of an ordered tuple: ±simplex, or zero when degenerate.
SimplicialChain tuple_chain(const SimplicialComplex& k, const Simplex& tuple);
/// Sum of top simplices with their signs.
SimplicialChain fundamental_chain(const SimplicialComplex& k);
/// Alternating-sum boundary. For an oriented manifold with corners this is
/// minus the chain of the boundary with its inward-normal orientation.
SimplicialChain boundary_chain(const SimplicialComplex& k, const SimplicialChain& c);

IntMatrix boundary_matrix(const SimplicialComplex& k, int d);
IntegerChainComplex simplicial_chain_complex(const SimplicialComplex& k);

/// Subcomplex made of the faces that carry d[K], oriented by its coefficients.
/// Throws ShapeMismatch if a coefficient is not ±1.
SimplicialComplex boundary_complex(const SimplicialComplex& k);

struct ManifoldCheck {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};
/// Pure, every codimension-1 face in one or two top simplices (exactly two
/// when `closed`), signs coherent across shared faces, and d[K] has
/// coefficients ±1 on free faces.
ManifoldCheck check_pseudo_manifold(const SimplicialComplex& k, bool closed);

// ---- maps -----------------------------------------------------------------

/// Empty string when the map is simplicial, else a description of the defect.
std::string simplicial_map_defect(const SimplicialComplex& source, const SimplicialComplex& target,
                                  const VertexMap& map);
/// Every simplex maps to a weakly increasing tuple in the target's order.
bool is_order_preserving(const SimplicialComplex& source, const SimplicialComplex& target,
                         const VertexMap& map);
Simplex map_tuple(const VertexMap& map, const Simplex& tuple);
/// Degenerate images vanish.
SimplicialChain pushforward(const SimplicialComplex& source, const SimplicialComplex& target,
                            const VertexMap& map, const SimplicialChain& c);
VertexMap compose_maps(const VertexMap& g, const VertexMap& f);

// ---- constructions --------------------------------------------------------

SimplicialComplex point_complex();
/// The standard d-simplex on vertices 0..d.
SimplicialComplex standard_simplex(int d);
/// Circle with n >= 3 vertices and edges (i, i+1 mod n); the closing edge is
/// ordered (n-1, 0), so rotation by one step is simplicial and order preserving.
SimplicialComplex polygon(int n);

struct Subdivision {
  SimplicialComplex complex;
  /// vertex id of the barycenter of simplex (d, i)
  std::vector<std::vector<int>> barycenter;
  /// Sd of a chain on the original complex.
  SimplicialChain apply(const SimplicialComplex& original, const SimplicialChain& c) const;
};
/// Barycentric subdivision. Barycenters of higher simplices get smaller ids,
/// so every flag is increasing. Orientation is Sd of the fundamental chain.
Subdivision barycentric_subdivide(const SimplicialComplex& k);
/// b_tau -> b_{f(tau)}.
VertexMap subdivide_map(const SimplicialComplex& source, const Subdivision& sd_source,
                        const SimplicialComplex& target, const Subdivision& sd_target,
                        const VertexMap& map);

/// Product vertex (i, j) has id i * b.vertex_bound() + j. Every pair of
/// maximal simplices is triangulated by its shuffles; the sign of a top cell
/// is the product of the factor signs and the shuffle sign.
SimplicialComplex shuffle_product(const SimplicialComplex& a, const SimplicialComplex& b);
struct ShuffleCell {
  Simplex tuple;  // product ids in path order
  int sign;       // parity of the shuffle
};
/// The shuffle cells of a x b for ordered simplices a, b.
std::vector<ShuffleCell> shuffle_cells(const Simplex& a, const Simplex& b, std::size_t nb);

/// Eilenberg-Zilber cross product of chains into the shuffle product.
SimplicialChain cross_chain(const SimplicialComplex& a, const SimplicialComplex& b,
                            const SimplicialComplex& product, const SimplicialChain& ca,
                            const SimplicialChain& cb);
/// (f x g)(i, j) = (f(i), g(j)) on product ids.
VertexMap product_map(const SimplicialComplex& a, const SimplicialComplex& b,
                      const SimplicialComplex& a2, const SimplicialComplex& b2, const VertexMap& f,
                      const VertexMap& g);

/// Parity of the permutation taking `from` to `to` (same vertex set): +1 or -1.
int permutation_sign(const Simplex& from, const Simplex& to);

}  // namespace floer
