#include "doctest.h"

#include "../support/categories.hpp"
#include "../support/oracle.hpp"
#include "floer/errors.hpp"
#include "floer/floer_complex.hpp"

using namespace floer;

namespace {

std::vector<std::size_t> betti(const FloerComplexBundle& b, int lo, int hi) {
  return floer_homology(b).betti_range(lo, hi);
}

}  // namespace

TEST_CASE("single circle") {
  auto b = assemble(cats::circle_only(5));
  CHECK(betti(b, 0, 1) == std::vector<std::size_t>{1, 1});
  CHECK(b.path == "exact");
}

TEST_CASE("height on S2") {
  auto fc = cats::s2_height();
  auto b = assemble(fc);
  CHECK(betti(b, 0, 2) == std::vector<std::size_t>{1, 0, 1});
  CHECK(b.complex->boundary(2).is_zero());
  auto oct = oracle::octahedron();
  CHECK(oracle::betti(oracle::simplicial(oct), 0, 2) == betti(b, 0, 2));
  CHECK(floer_homology(morse_assemble(fc)) == floer_homology(b));
}

TEST_CASE("flat torus") {
  auto b = assemble(cats::flat_torus(4));
  CHECK(betti(b, 0, 2) == oracle::betti(oracle::simplicial(oracle::torus()), 0, 2));
  CHECK(betti(b, 0, 2) == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("Morse cases") {
  auto s1 = morse_assemble(cats::circle_morse());
  CHECK(betti(s1, 0, 1) == std::vector<std::size_t>{1, 1});
  auto pt = morse_assemble(cats::point_only());
  CHECK(betti(pt, 0, 0) == std::vector<std::size_t>{1});
  auto sad = cats::s2_saddle();
  auto m = morse_assemble(sad);
  CHECK(betti(m, 0, 2) == std::vector<std::size_t>{1, 0, 1});
  CHECK(floer_homology(assemble(sad)) == floer_homology(m));
  CHECK_THROWS_AS(morse_assemble(cats::circle_only()), Error);
}

TEST_CASE("grading and degree drop") {
  for (const auto& fc : {cats::s2_height(), cats::flat_torus(), cats::s2_saddle()}) {
    auto b = assemble(fc);
    for (const auto& [k, gens] : b.generators)
      for (const auto& g : gens) {
        CHECK(k == g.dim + fc.criticals[g.critical].mu);
        for (const auto& [h, c] : boundary_of(fc, g))
          CHECK(h.dim + fc.criticals[h.critical].mu == k - 1);
      }
    CHECK(verify_d_squared(*b.complex));
  }
}

TEST_CASE("restriction to a critical manifold is the signed simplicial boundary") {
  auto fc = cats::circle_only(4);
  fc.criticals[0].mu = 1;
  auto b = assemble(fc);
  // degree 2 edges: sign (-1)^2
  auto expected = boundary_matrix(fc.criticals[0].complex, 1);
  CHECK(b.complex->boundary(2) == expected);
  fc.criticals[0].mu = 0;
  CHECK(assemble(fc).complex->boundary(1) == IntMatrix::zero(expected.rows(), expected.cols()) - expected);
}

TEST_CASE("broken sign data raises DSquaredFailure") {
  auto fc = cats::s2_saddle();
  fc.moduli[2].complex = fc.moduli[2].complex.with_orientation({1});  // b -> c2 now +1
  fc.moduli[0].complex = fc.moduli[0].complex.with_orientation({1, 1});
  // d(a) = 2b, d(b) = c1 + c2: d^2 != 0 both before and after refinement
  try {
    morse_assemble(fc);
    FAIL("no failure");
  } catch (const DSquaredFailure& e) {
    CHECK(e.generator() == "a[0]");
    CHECK(e.composite().find("c1") != std::string::npos);
  }
  CHECK_THROWS_AS(assemble(fc), DSquaredFailure);
}

TEST_CASE("stabilize") {
  auto t = assemble(stabilize(cats::circle_only(4), 3));
  CHECK(betti(t, 0, 2) == std::vector<std::size_t>{1, 2, 1});
  auto s2 = stabilize(cats::s2_height(), 3);
  CHECK(validate(s2).ok);
  auto h3 = floer_homology(assemble(s2));
  CHECK(h3.betti_range(0, 3) == std::vector<std::size_t>{1, 1, 1, 1});
  auto h6 = floer_homology(assemble(stabilize(cats::s2_height(), 6)));
  CHECK(h3 == h6);
  for (const auto& fc : {cats::flat_torus(), cats::s2_saddle(), cats::circle_morse()}) {
    CAPTURE(fc.name);
    auto st = stabilize(fc, 4);
    CHECK_MESSAGE(validate(st).ok, validate(st).first_failure());
    auto base = floer_homology(assemble(fc));
    auto stable = floer_homology(assemble(st));
    for (int k = 0; k <= 4; ++k) CHECK(stable.betti(k) == base.betti(k) + base.betti(k - 1));
  }
}

TEST_CASE("refinement preserves homology") {
  for (const auto& fc : {cats::s2_height(), cats::flat_torus(), cats::s2_saddle()}) {
    auto r = refine(fc);
    CHECK(floer_homology(assemble(r)) == floer_homology(assemble(fc)));
  }
}
