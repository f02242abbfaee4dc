#pragma once

#include "floer/floer_complex.hpp"

#include <map>
#include <string>
#include <vector>

namespace floer {

/// A cyclic group acting by simplicial automorphisms, given by the vertex
/// permutation of its generator on every critical manifold and moduli space.
/// Missing entries act as the identity.
struct CyclicAction {
  int order = 1;
  std::map<std::string, VertexMap> critical;
  std::vector<VertexMap> moduli;  // aligned with FlowCategory::moduli
};

CyclicAction trivial_action();

/// Generator on stabilize(base, n): (t, x) -> (t - step, g x), with g the
/// generator of `base_action` (identity when null).
CyclicAction circle_rotation(const FlowCategory& base, int n, int step,
                             const CyclicAction* base_action = nullptr);

/// Signed permutation matrix of the generator on C_k.
IntMatrix action_matrix(const FloerComplexBundle& b, const CyclicAction& g, int k);

/// Throws ActionNotCommuting if the generator is not an automorphism of the
/// given order, does not commute with an endpoint map, or does not commute
/// with the boundary.
void check_action(const FloerComplexBundle& b, const CyclicAction& g);

struct EquivariantCochains {
  IntegerChainComplex complex;      // dual indexing: degree -k holds invariant C^k
  std::map<int, IntMatrix> basis;   // k -> columns spanning the invariant C^k
};

/// Invariant cochains (signed orbit sums) with the restricted coboundary.
EquivariantCochains equivariant_cochains(const FloerComplexBundle& b, const CyclicAction& g);

/// Cohomology of the invariant cochains, reported at degree k.
HomologyResult equivariant_cohomology(const FloerComplexBundle& b, const CyclicAction& g);

}  // namespace floer
