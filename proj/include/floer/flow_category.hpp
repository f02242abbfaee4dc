#pragma once

#include "floer/fiber_product.hpp"
#include "floer/simplicial.hpp"

#include <array>
#include <string>
#include <vector>

namespace floer {

/// S_alpha: a closed oriented pseudo-manifold with grading mu.
struct CriticalManifold {
  std::string id;
  int mu = 0;
  int dim = 0;
  SimplicialComplex complex;

  friend bool operator==(const CriticalManifold&, const CriticalManifold&) = default;
};

/// A codimension-1 face of M(alpha, beta) identified with
/// M(alpha, gamma) x_{S_gamma} M(gamma, beta). Each entry (x1, x2, m) sends
/// the fiber-product vertex (x1, x2) to the vertex m of M(alpha, beta).
struct Stratum {
  std::string gamma;
  std::vector<std::array<int, 3>> identification;

  friend bool operator==(const Stratum&, const Stratum&) = default;
};

struct ModuliSpace {
  std::string source;  // alpha
  std::string target;  // beta
  SimplicialComplex complex;
  VertexMap pi_minus;  // -> S_alpha
  VertexMap pi_plus;   // -> S_beta
  std::vector<Stratum> strata;

  friend bool operator==(const ModuliSpace&, const ModuliSpace&) = default;
};

struct FlowCategory {
  std::string name;
  std::vector<CriticalManifold> criticals;
  std::vector<ModuliSpace> moduli;

  /// Throws std::out_of_range for an unknown id.
  const CriticalManifold& critical(const std::string& id) const;
  std::size_t critical_index(const std::string& id) const;
  /// nullptr when no moduli space is listed for the pair.
  const ModuliSpace* moduli_between(const std::string& alpha, const std::string& beta) const;

  friend bool operator==(const FlowCategory&, const FlowCategory&) = default;
};

struct CheckOutcome {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<CheckOutcome> checks;  // in the order they ran
  /// "name: detail" of the first failed check, empty on success.
  std::string first_failure() const;
  explicit operator bool() const { return ok; }
};

/// Runs, in order: ids, dimension, critical-manifolds, endpoint-maps,
/// moduli-corners, boundary-strata, strata-endpoints. Stops at the first
/// failed check; later checks are reported as skipped. Never throws.
ValidationReport validate(const FlowCategory& fc);

/// The oriented fiber product M(alpha, gamma) x_{S_gamma} M(gamma, beta).
FiberProductResult stratum_fiber_product(const FlowCategory& fc, const ModuliSpace& left,
                                         const ModuliSpace& right);

/// Boundary sign of M(alpha, beta): d[M] = sign * sum over strata.
int stratum_sign(const FlowCategory& fc, const ModuliSpace& m);

/// A declared codimension-1 face: a fiber product glued into M through
/// (x1, x2, m) triples, counted with `sign`.
struct BoundaryFace {
  std::string name;
  FiberProductResult product;
  const std::vector<std::array<int, 3>>* identification = nullptr;
  int sign = 1;
};

/// Empty when d[m] equals the signed sum of the faces after common
/// refinement, otherwise a description of the mismatch.
std::string compare_boundary(const SimplicialComplex& m, const std::vector<BoundaryFace>& faces);

// ---- FCD files (strict JSON, version 1) ------------------------------------

std::string to_fcd_json(const FlowCategory& fc);
/// Throws ParseError (unknown or malformed field, with line for syntax
/// errors) or VersionMismatch.
FlowCategory from_fcd_json(const std::string& text);
FlowCategory load_fcd(const std::string& path);
void store_fcd(const FlowCategory& fc, const std::string& path);

}  // namespace floer
