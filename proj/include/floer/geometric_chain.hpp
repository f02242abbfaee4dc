#pragma once

#include "floer/integer_matrix.hpp"
#include "floer/simplicial.hpp"

#include <functional>
#include <string>
#include <vector>

namespace floer {

/// Chains of affine simplices in R^n, used to compare two triangulations of
/// the same oriented polyhedron without building a common subdivision.
///
/// Two chains are equal when, at a generic interior point of every cell that
/// occurs in either of them, the signed multiplicities agree. Generic points
/// use barycentric weights proportional to square roots of distinct primes,
/// so they avoid every rational hyperplane spanned by the (integer) vertices.
struct GeometricChain {
  struct Term {
    std::vector<std::vector<double>> points;  // ordered vertices
    Integer coefficient;
  };
  int degree = 0;
  std::vector<Term> terms;
};

/// Embeds a simplicial chain: `coords(v)` gives the point of vertex v.
GeometricChain embed_chain(const SimplicialComplex& k, const SimplicialChain& c,
                           const std::function<std::vector<double>(int)>& coords);

struct GeometricComparison {
  bool equal = true;
  std::string detail;  // first cell where the multiplicities differ
  explicit operator bool() const { return equal; }
};

GeometricComparison compare_geometric(const GeometricChain& a, const GeometricChain& b);

GeometricChain operator+(GeometricChain a, const GeometricChain& b);
GeometricChain scaled(GeometricChain a, const Integer& c);

}  // namespace floer
