#pragma once

#include "floer/chain_complex.hpp"
#include "floer/errors.hpp"
#include "floer/flow_category.hpp"

#include <memory>
#include <string>
#include <vector>

namespace floer {

enum class Variant { bott, morse, stable, equivariant };
const char* variant_name(Variant v);

/// Generator of the Floer complex: the simplex (dim, index) of S_critical,
/// sitting in degree dim + mu.
struct Generator {
  std::size_t critical = 0;
  int dim = 0;
  std::size_t simplex = 0;
  friend bool operator==(const Generator&, const Generator&) = default;
};

struct FloerComplexBundle {
  std::shared_ptr<const FlowCategory> flow_category;
  std::shared_ptr<const IntegerChainComplex> complex;
  /// generators[k][i] is basis element i of degree k: ordered by critical
  /// manifold, then simplex index.
  std::map<int, std::vector<Generator>> generators;
  Variant variant = Variant::bott;
  /// "exact" or "refined" (one barycentric subdivision was needed).
  std::string path = "exact";

  std::size_t position(const Generator& g) const;
  std::string label(const Generator& g) const;
};

/// d^2 != 0 on the assembled complex. Carries the first generator whose
/// boundary of boundary is nonzero and that composite, as text.
class DSquaredFailure : public Error {
 public:
  DSquaredFailure(std::string generator, std::string composite)
      : Error("d^2 != 0 on " + generator + ": " + composite),
        generator_(std::move(generator)), composite_(std::move(composite)) {}
  const std::string& generator() const { return generator_; }
  const std::string& composite() const { return composite_; }

 private:
  std::string generator_, composite_;
};

struct AssembleOptions {
  /// Retry once on the barycentric subdivision when the exact complex fails.
  bool allow_refinement = true;
};

/// Normalized chains of every S_alpha graded by dim + mu, with
/// d = (-1)^k d_simplicial + sum over beta of pi_plus_*(sigma x_{S_alpha} M(alpha, beta)).
/// Does not call validate; throws DSquaredFailure or NonTransverse.
FloerComplexBundle assemble(const FlowCategory& fc, const AssembleOptions& options = {});

/// The boundary of one generator as a map degree -> coefficients (before
/// d^2 checking). Exposed for diagnostics and tests.
std::map<Generator, Integer> boundary_of(const FlowCategory& fc, const Generator& g);
bool operator<(const Generator& a, const Generator& b);

/// pi_+ of the oriented fiber product (simplex x_{S_alpha} M) with M mapped by
/// pi_minus, as a normalized chain on `target`. Zero chain when empty.
SimplicialChain transport_simplex(const SimplicialComplex& s_alpha, int dim, std::size_t simplex,
                                  const SimplicialComplex& m, const VertexMap& pi_minus,
                                  const VertexMap& pi_plus, const SimplicialComplex& target);

/// All critical manifolds must be points: d alpha = sum over mu drop 1 of the
/// signed count of M(alpha, beta) times beta.
FloerComplexBundle morse_assemble(const FlowCategory& fc);

/// Every S and M crossed with an n-gon; endpoint maps are the identity on the
/// circle factor. Requires endpoint maps that preserve local vertex orders.
FlowCategory stabilize(const FlowCategory& fc, int n);

/// One barycentric subdivision of every critical manifold and moduli space;
/// strata identifications are dropped.
FlowCategory refine(const FlowCategory& fc);

HomologyResult floer_homology(const FloerComplexBundle& b);
HomologyResult floer_cohomology(const FloerComplexBundle& b);

}  // namespace floer
