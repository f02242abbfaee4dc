#include "doctest.h"

#include "../support/categories.hpp"
#include "floer/equivariant.hpp"
#include "floer/errors.hpp"

using namespace floer;

namespace {

// Reflection-free rotation of the base circles by one vertex.
CyclicAction rotate_torus_base(int n) {
  CyclicAction a;
  a.order = n;
  a.critical["top"] = cats::modulo(n, n);
  a.critical["bottom"] = cats::modulo(n, n);
  for (int i = 0; i < n; ++i) a.critical["top"][i] = a.critical["bottom"][i] = (i + 1) % n;
  VertexMap m(2 * n);
  for (int i = 0; i < 2 * n; ++i) m[i] = (i / n) * n + (i % n + 1) % n;
  a.moduli.push_back(m);
  return a;
}

}  // namespace

TEST_CASE("trivial action gives the stable cohomology") {
  for (const auto& fc : {cats::s2_height(), cats::flat_torus(), cats::s2_saddle(), cats::circle_only()}) {
    auto b = assemble(stabilize(fc, 3));
    auto inv = equivariant_cochains(b, trivial_action());
    CHECK(inv.complex.ranks() == dual_complex(*b.complex).ranks());
    CHECK(equivariant_cohomology(b, trivial_action()) == floer_cohomology(b));
  }
}

TEST_CASE("free rotation of the circle factor matches the quotient") {
  for (const auto& fc : {cats::s2_height(), cats::flat_torus(), cats::s2_saddle(), cats::circle_only()}) {
    CAPTURE(fc.name);
    const int q = 3;
    auto quotient = floer_cohomology(assemble(stabilize(fc, q)));
    for (int m : {2, 4}) {
      auto b = assemble(stabilize(fc, m * q));
      auto action = circle_rotation(fc, m * q, q);
      CHECK(action.order == m);
      CHECK(equivariant_cohomology(b, action) == quotient);
    }
  }
}

TEST_CASE("diagonal action on the torus category") {
  auto fc = cats::flat_torus(4);
  auto base = rotate_torus_base(4);
  auto b = assemble(stabilize(fc, 8));
  auto action = circle_rotation(fc, 8, 2, &base);
  CHECK(action.order == 4);
  check_action(b, action);
  auto h = equivariant_cohomology(b, action);
  CHECK(h.betti(0) == 1);
}

TEST_CASE("invariant subgroup is preserved by the coboundary") {
  auto fc = cats::flat_torus(4);
  auto b = assemble(stabilize(fc, 6));
  auto action = circle_rotation(fc, 6, 2);
  auto inv = equivariant_cochains(b, action);
  for (const auto& [k, basis] : inv.basis) {
    auto p = action_matrix(b, action, k);
    CHECK(p.transpose() * basis == basis);
  }
}

TEST_CASE("action that breaks an endpoint map") {
  auto fc = cats::flat_torus(4);
  auto base = rotate_torus_base(4);
  base.moduli.clear();  // moduli left fixed while the circles rotate
  auto b = assemble(stabilize(fc, 4));
  CHECK_THROWS_AS(check_action(b, circle_rotation(fc, 4, 0, &base)), ActionNotCommuting);
  CyclicAction wrong_order = circle_rotation(fc, 4, 1);
  wrong_order.order = 3;
  CHECK_THROWS_AS(check_action(b, wrong_order), ActionNotCommuting);
}
