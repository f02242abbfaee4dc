#include "doctest.h"

#include "../support/categories.hpp"
#include "floer/continuation.hpp"
#include "floer/errors.hpp"

#include <filesystem>

using namespace floer;

namespace {

std::shared_ptr<const FlowCategory> share(FlowCategory fc) {
  return std::make_shared<const FlowCategory>(std::move(fc));
}

TransitionModuli signed_points(const std::string& a, const std::string& b, std::vector<int> signs) {
  const int n = static_cast<int>(signs.size());
  return {a, b, cats::points(n, std::move(signs)), cats::constant(n), cats::constant(n), {}};
}

HomotopyData no_homotopy(const TransitionData& glued) { return {"zero", glued, {}}; }

// Identity on the saddle sphere plus T(a,b): two intervals, each running from
// a broken trajectory through b to one through a.
TransitionData saddle_with_interval(std::shared_ptr<const FlowCategory> fc) {
  TransitionData t = identity_transition(fc);
  t.name = "with-interval";
  TransitionModuli m{"a", "b",
                     SimplicialComplex::from_maximal(4, {{0, 1}, {2, 3}}, {-1, 1}),
                     cats::constant(4), cats::constant(4), {}};
  m.strata.push_back({MixedStratum::Side::source, "b", {{{0, 0, 0}}, {{1, 0, 2}}}});
  m.strata.push_back({MixedStratum::Side::target, "a", {{{0, 0, 1}}, {{0, 1, 3}}}});
  t.moduli.push_back(m);
  return t;
}

}  // namespace

TEST_CASE("identity transition") {
  for (const auto& fc : {cats::s2_height(), cats::flat_torus(), cats::s2_saddle(), cats::circle_only()}) {
    auto shared = share(fc);
    auto t = identity_transition(shared);
    auto r = validate_transition(t);
    CHECK_MESSAGE(r.ok, r.first_failure());
    auto f = assemble_chain_map(t);
    auto id = identity_map(f.source);
    for (const auto& [k, n] : f.source->ranks()) CHECK(f.matrix(k) == id.matrix(k));
    auto induced = induced_map_on_homology(f);
    CHECK(induced.is_isomorphism);
    auto v = verify_invariance_protocol(t, t, no_homotopy(t), no_homotopy(t));
    CHECK_MESSAGE(v.verified, v.steps.back().detail);
  }
}

TEST_CASE("wrong shift and missing stratum") {
  auto fc = share(cats::s2_saddle());
  auto t = saddle_with_interval(fc);
  auto r = validate_transition(t);
  CHECK_MESSAGE(r.ok, r.first_failure());
  CHECK(assemble_chain_map(t).matrix(1) == IntMatrix{{1}});

  auto wrong = t;
  wrong.shift = 1;
  CHECK_FALSE(validate_transition(wrong).checks[1].ok);
  CHECK(validate_transition(wrong).checks[1].name == "dimension");

  auto missing = t;
  missing.moduli.back().strata.pop_back();
  auto rm = validate_transition(missing);
  CHECK_FALSE(rm.ok);
  CHECK(rm.checks[4].name == "boundary-strata");
  CHECK_FALSE(rm.checks[4].ok);

  auto flipped = t;
  flipped.moduli.back().complex = flipped.moduli.back().complex.with_orientation({1, 1});
  CHECK_FALSE(validate_transition(flipped).ok);
}

TEST_CASE("empty transition between different homologies") {
  auto a = share(cats::s2_height());
  auto b = share(cats::circle_only());
  TransitionData t{"empty", a, b, 0, {}};
  CHECK(validate_transition(t).ok);
  auto f = assemble_chain_map(t);
  CHECK(verify_chain_map(f));
  CHECK_FALSE(induced_map_on_homology(f).is_isomorphism);
}

TEST_CASE("non chain map is withheld") {
  auto fc = share(cats::s2_saddle());
  TransitionData t = identity_transition(fc);
  t.moduli[1] = signed_points("b", "b", {1, 1});  // F(b) = 2b while F(c1) = c1
  try {
    assemble_chain_map(t);
    FAIL("accepted");
  } catch (const ChainMapFailure& e) {
    CHECK(std::string(e.what()).find("b[0]") != std::string::npos);
  }
}

TEST_CASE("glued transition homotopic to the identity") {
  auto fc = share(cats::s2_saddle());
  // F_glued = id + (d H + H d) with H(c1) = b
  TransitionData glued = identity_transition(fc);
  glued.name = "glued";
  glued.moduli[1] = signed_points("b", "b", {1, 1});
  glued.moduli[2] = signed_points("c1", "c1", {1, 1});
  glued.moduli.push_back(signed_points("c1", "c2", {-1}));
  CHECK(validate_transition(glued).ok);
  auto f = assemble_chain_map(glued);
  CHECK(induced_map_on_homology(f).is_isomorphism);

  auto id = identity_transition(fc);
  HomotopyData step1{"h1", glued, {signed_points("c1", "b", {-1})}};
  HomotopyData step2{"h2", id, {signed_points("c1", "b", {1})}};
  auto v = verify_invariance_protocol(id, id, step1, step2);
  for (const auto& s : v.steps) CHECK_MESSAGE(s.ok, s.name << ": " << s.detail);
  CHECK(v.verified);
  CHECK(v.forward_backward_identity);

  HomotopyData tampered = step1;
  tampered.moduli[0] = signed_points("c1", "b", {1});
  auto bad = verify_invariance_protocol(id, id, tampered, step2);
  CHECK_FALSE(bad.verified);
  CHECK(bad.steps[1].name == "step1-homotopy");
  CHECK_FALSE(bad.steps[1].ok);
  CHECK(bad.steps[2].detail == "skipped");
}

TEST_CASE("odd shift uses the degree twist") {
  // circle with mu 0 into circle with mu 1, shift 1: T = S^1, F = (-1)^k id
  auto a = share(cats::circle_only(4));
  auto shifted = cats::circle_only(4);
  shifted.criticals[0].mu = 1;
  auto b = share(shifted);
  TransitionData t{"up", a, b, 1, {}};
  VertexMap id{0, 1, 2, 3};
  t.moduli.push_back({"S", "S", a->criticals[0].complex, id, id, {}});
  CHECK(validate_transition(t).ok);
  auto f = assemble_chain_map(t);
  CHECK(verify_chain_map(f));
  CHECK(induced_map_on_homology(f).is_isomorphism);
}

TEST_CASE("transition file round trip") {
  auto a = share(cats::s2_saddle());
  TransitionFile file;
  auto id = identity_transition(a);
  auto t = saddle_with_interval(a);
  file.transitions = {id, t};
  file.homotopies = {{"h", id, {signed_points("c1", "b", {1})}}, {"zero", id, {}}};
  file.protocol = {{"forward", "identity"}, {"backward", "identity"}, {"glue_fwd_bwd", "zero"},
                   {"glue_to_identity", "zero"}};
  auto text = to_transition_json(file, *a, *a);
  auto back = from_transition_json(text, a, a);
  REQUIRE(back.transitions.size() == 2);
  CHECK(back.transitions[1].moduli == t.moduli);
  CHECK(back.homotopies[0].moduli == file.homotopies[0].moduli);
  auto c = resolve_protocol(back);
  CHECK(verify_invariance_protocol(c.forward, c.backward, c.glue_fwd_bwd, c.glue_to_identity).verified);

  auto path = std::filesystem::temp_directory_path() / "rt.transitions.json";
  store_transitions(file, *a, *a, path.string());
  CHECK(load_transitions(path.string(), a, a).protocol == file.protocol);
  std::filesystem::remove(path);

  auto broken = text;
  broken.replace(broken.find("\"glue_to_identity\": \"zero\""), 26, "\"glue_to_identity\": \"nope\"");
  CHECK_THROWS_AS(resolve_protocol(from_transition_json(broken, a, a)), ParseError);
}
