#pragma once

#include "floer/geometric_chain.hpp"
#include "floer/simplicial.hpp"

#include <string>

namespace floer {

/// A simplicial map X -> S, with X and S held by reference.
struct MapInto {
  const SimplicialComplex* domain = nullptr;
  VertexMap map;
};

/// X1 x_S X2. Vertex (x1, x2) has id x1 * right_bound + x2.
///
/// Orientation: T(X1 x_S X2) + N = (-1)^{dim S dim X2} TX1 + TX2, where N is
/// mapped onto TS by (u, v) -> df1 u - df2 v. On a top cell Q inside the
/// product of top simplices s, t over a top simplex r of S this is the sign
/// of det[E | Phi^T], E the edge vectors of Q and Phi that linear map, in the
/// affine coordinates of s, t and r.
struct FiberProductResult {
  SimplicialComplex complex;
  std::size_t right_bound = 0;
  VertexMap proj_left, proj_right, to_target;
  enum class Method { empty, preimage_left, preimage_right, product } method = Method::empty;
};

/// Throws NonTransverse when the pullback is not a pseudo-manifold of
/// dimension dim X1 + dim X2 - dim S, or some top cell admits no transverse
/// frame.
FiberProductResult fiber_product(const MapInto& f1, const MapInto& f2, const SimplicialComplex& s);

/// Pair and triple embeddings into sums of vertex indicator vectors.
std::vector<double> pair_point(int id, std::size_t n1, std::size_t n2);

/// d(X1 x_S X2) = dX1 x_S X2 + (-1)^{dim X1 + dim S} X1 x_S dX2 as chains in
/// |X1| x |X2|.
GeometricComparison check_boundary_identity(const MapInto& f1, const MapInto& f2,
                                            const SimplicialComplex& s);

/// (X1 x_S X2) x_S' X3 = X1 x_S (X2 x_S' X3), for X1 -f1-> S <-f2- X2 -g2-> S' <-f3- X3.
GeometricComparison check_associativity(const MapInto& f1, const MapInto& f2, const VertexMap& g2,
                                        const MapInto& f3, const SimplicialComplex& s,
                                        const SimplicialComplex& s_prime);

}  // namespace floer
