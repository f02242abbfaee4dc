#pragma once

#include "floer/floer_complex.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace floer {

/// Boundary face of a transition space through a critical manifold gamma:
/// on the source side it is M_A(alpha, gamma) x T(gamma, beta), on the target
/// side T(alpha, gamma) x M_B(gamma, beta). Triples as in Stratum.
struct MixedStratum {
  enum class Side { source, target };
  Side side = Side::source;
  std::string gamma;
  std::vector<std::array<int, 3>> identification;

  friend bool operator==(const MixedStratum&, const MixedStratum&) = default;
};

/// A space of transition trajectories from S_alpha (in A) to S_beta (in B).
struct TransitionModuli {
  std::string source;
  std::string target;
  SimplicialComplex complex;
  VertexMap pi_minus;
  VertexMap pi_plus;
  std::vector<MixedStratum> strata;

  friend bool operator==(const TransitionModuli&, const TransitionModuli&) = default;
};

/// F : C_k(A) -> C_{k+shift}(B). dim T(alpha, beta) = dim S_alpha +
/// mu_A(alpha) - mu_B(beta) + shift.
struct TransitionData {
  std::string name;
  std::shared_ptr<const FlowCategory> source;
  std::shared_ptr<const FlowCategory> target;
  int shift = 0;
  std::vector<TransitionModuli> moduli;
};

/// Spaces with one more dimension than the transitions they interpolate;
/// they define Theta : C_k(A) -> C_{k+shift+1}(A').
struct HomotopyData {
  std::string name;
  TransitionData glued;  // the transition whose map is compared
  std::vector<TransitionModuli> moduli;
};

/// Identity transition: T(alpha, alpha) = S_alpha with both maps the identity.
TransitionData identity_transition(std::shared_ptr<const FlowCategory> fc);

/// Sign in front of M_A x T faces of d[T]; T x M_B faces carry -(-1)^shift times it.
int transition_stratum_sign(const TransitionData& t, const TransitionModuli& m);

/// Checks ids, dimension, endpoint-maps, moduli-corners, boundary-strata and
/// strata-endpoints, in that order. Never throws.
ValidationReport validate_transition(const TransitionData& t);

/// sigma -> (-1)^(k shift) pi_+ of (sigma x_{S_alpha} T), summed over T.
/// Throws ChainMapFailure, naming a generator, if the result is not a chain map.
ChainMapData assemble_chain_map(const TransitionData& t, const FloerComplexBundle& a,
                                const FloerComplexBundle& b);
ChainMapData assemble_chain_map(const TransitionData& t);

/// Theta for homotopy data between maps A -> B of the given shift.
ChainMapData assemble_homotopy(const HomotopyData& h, int map_shift, const FloerComplexBundle& a,
                               const FloerComplexBundle& b);

struct ProtocolStep {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct ProtocolVerdict {
  bool verified = false;
  std::vector<ProtocolStep> steps;
  std::optional<InducedMap> forward;
  std::optional<InducedMap> backward;
  bool forward_backward_identity = false;  // (F_bwd F_fwd)_* = Id on H(A)
  bool backward_forward_identity = false;  // (F_fwd F_bwd)_* = Id on H(B)
};

/// Checks, in order: the transitions and their chain maps; Step 1
/// F_bwd F_fwd - F_glued = d Theta + Theta d; Step 2 F_glued ~ id; Step 3 the
/// induced maps are isomorphisms, inverse to each other, respecting the shift.
/// The symmetric homotopies on B are checked when supplied.
ProtocolVerdict verify_invariance_protocol(const TransitionData& fwd, const TransitionData& bwd,
                                           const HomotopyData& glue_fwd_bwd,
                                           const HomotopyData& glue_to_identity,
                                           const HomotopyData* glue_bwd_fwd = nullptr,
                                           const HomotopyData* glue_to_identity_b = nullptr);

// ---- files --------------------------------------------------------------

/// Transition data file: `transitions` and `homotopies` arrays plus a
/// `protocol` block naming the roles. Transitions refer to the two
/// categories as "a" and "b".
struct TransitionFile {
  std::vector<TransitionData> transitions;
  std::vector<HomotopyData> homotopies;
  std::map<std::string, std::string> protocol;  // role -> transition or homotopy name
};

struct Comparison {
  TransitionData forward;
  TransitionData backward;
  HomotopyData glue_fwd_bwd;
  HomotopyData glue_to_identity;
  std::optional<HomotopyData> glue_bwd_fwd;
  std::optional<HomotopyData> glue_to_identity_b;
};

std::string to_transition_json(const TransitionFile& f, const FlowCategory& a,
                               const FlowCategory& b);
/// Throws ParseError or VersionMismatch.
TransitionFile from_transition_json(const std::string& text,
                                    std::shared_ptr<const FlowCategory> a,
                                    std::shared_ptr<const FlowCategory> b);
TransitionFile load_transitions(const std::string& path, std::shared_ptr<const FlowCategory> a,
                                std::shared_ptr<const FlowCategory> b);
void store_transitions(const TransitionFile& f, const FlowCategory& a, const FlowCategory& b,
                       const std::string& path);

/// Looks up the protocol roles forward, backward, glue_fwd_bwd,
/// glue_to_identity and optionally glue_bwd_fwd, glue_to_identity_b.
/// Throws ParseError for a missing or unknown name.
Comparison resolve_protocol(const TransitionFile& f);

}  // namespace floer
