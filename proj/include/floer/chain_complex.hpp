#pragma once

#include "floer/integer_matrix.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace floer {

/// Graded free abelian group with boundary d_k : C_k -> C_{k-1}.
///
/// d_k is stored as a rank(k-1) x rank(k) matrix. Degrees form a contiguous
/// range; degrees outside it have rank 0. Immutable once built.
class IntegerChainComplex {
 public:
  IntegerChainComplex() = default;

  bool empty() const { return ranks_.empty(); }
  int min_degree() const;
  int max_degree() const;

  std::size_t rank(int k) const;
  /// Zero matrix of the right shape when no boundary was supplied.
  IntMatrix boundary(int k) const;
  const std::map<int, std::size_t>& ranks() const { return ranks_; }
  const std::vector<std::string>& labels(int k) const;

 private:
  friend IntegerChainComplex build_complex(std::map<int, std::size_t>, std::map<int, IntMatrix>,
                                           std::map<int, std::vector<std::string>>);
  std::map<int, std::size_t> ranks_;
  std::map<int, IntMatrix> boundaries_;
  std::map<int, std::vector<std::string>> labels_;
};

/// Throws ShapeMismatch if a boundary or label list disagrees with the ranks.
/// Does not check d^2 = 0.
IntegerChainComplex build_complex(std::map<int, std::size_t> ranks,
                                  std::map<int, IntMatrix> boundaries = {},
                                  std::map<int, std::vector<std::string>> labels = {});

struct CheckResult {
  bool ok = true;
  std::optional<int> failing_degree;
  explicit operator bool() const { return ok; }
};

/// d_{k-1} d_k = 0 for every k; reports the first k where it fails.
CheckResult verify_d_squared(const IntegerChainComplex& c);

struct HomologyGroup {
  std::size_t betti = 0;
  std::vector<Integer> torsion;  // d_1 | d_2 | ..., each >= 2
  bool is_zero() const { return betti == 0 && torsion.empty(); }
  friend bool operator==(const HomologyGroup&, const HomologyGroup&) = default;
};

struct HomologyResult {
  std::map<int, HomologyGroup> groups;

  std::size_t betti(int k) const;
  std::vector<Integer> torsion(int k) const;
  /// Betti numbers from degree `from` to `to` inclusive.
  std::vector<std::size_t> betti_range(int from, int to) const;
  /// Betti numbers from the lowest to the highest degree with nonzero group.
  std::vector<std::size_t> betti_numbers() const;
  bool torsion_free() const;
  std::string to_string() const;

  /// Equal as graded groups; zero groups are ignored.
  friend bool operator==(const HomologyResult& a, const HomologyResult& b);
};

/// Throws NotAComplex if d^2 != 0.
HomologyResult homology(const IntegerChainComplex& c);

/// Dual complex in homological indexing: degree -k holds C^k and its boundary
/// is the transpose d_{k+1}^T : C^k -> C^{k+1}.
IntegerChainComplex dual_complex(const IntegerChainComplex& c);

/// H^k as the homology of the transposed complex, reported at degree k.
HomologyResult cohomology(const IntegerChainComplex& c);

/// Reindexes homology of a complex in dual indexing back to cohomological degrees.
HomologyResult reindex_dual(const HomologyResult& dual_homology);

/// F_k : C_k(source) -> C_{k+shift}(target).
struct ChainMapData {
  std::shared_ptr<const IntegerChainComplex> source;
  std::shared_ptr<const IntegerChainComplex> target;
  int degree_shift = 0;
  std::map<int, IntMatrix> matrices;

  /// Stored matrix or zero of shape rank_target(k+shift) x rank_source(k).
  IntMatrix matrix(int k) const;
  /// Degrees where F_k can be nonzero.
  std::vector<int> source_degrees() const;
};

ChainMapData identity_map(std::shared_ptr<const IntegerChainComplex> c);
ChainMapData zero_map(std::shared_ptr<const IntegerChainComplex> source,
                      std::shared_ptr<const IntegerChainComplex> target, int shift = 0);
/// g after f; shifts add.
ChainMapData compose(const ChainMapData& g, const ChainMapData& f);

/// d_target F_k = F_{k-1} d_source for all k. Throws ShapeMismatch on bad shapes.
CheckResult verify_chain_map(const ChainMapData& f);

/// f - g = d theta + theta d, with theta of shift f.degree_shift + 1.
CheckResult verify_chain_homotopy(const ChainMapData& f, const ChainMapData& g,
                                  const ChainMapData& theta);

/// Generators of H_k in SNF-derived coordinates.
struct HomologyBasis {
  int degree = 0;
  std::vector<Integer> orders;                 // 0 for a free generator
  std::vector<std::vector<Integer>> cycles;    // representative cycles
  IntMatrix coordinates;                       // rows map a cycle to generator coordinates

  /// Coordinates of a cycle, reduced modulo torsion orders.
  std::vector<Integer> classify(const std::vector<Integer>& cycle) const;
};

HomologyBasis homology_basis(const IntegerChainComplex& c, int k);

struct InducedDegree {
  int source_degree = 0;
  int target_degree = 0;
  std::vector<Integer> source_orders;
  std::vector<Integer> target_orders;
  IntMatrix matrix;  // target generators x source generators
  bool isomorphism = false;
};

struct InducedMap {
  std::map<int, InducedDegree> degrees;  // keyed by source degree
  bool is_isomorphism = false;
};

/// Throws NotAChainMap or NotAComplex when the preconditions fail.
InducedMap induced_map_on_homology(const ChainMapData& f);

}  // namespace floer
