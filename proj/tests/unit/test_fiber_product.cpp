#include "doctest.h"

#include "../support/fiber_catalogue.hpp"
#include "floer/errors.hpp"
#include "floer/fiber_product.hpp"

using namespace floer;
using namespace fibcat;

TEST_CASE("fiber product over a point is the product") {
  auto pt = point_complex();
  auto c = polygon(6);
  auto r = fiber_product({&pt, {0}}, {&c, constant(6, 0)}, pt);
  CHECK(r.complex == c);
  auto sq = fiber_product({&c, constant(6, 0)}, {&c, constant(6, 0)}, pt);
  CHECK(sq.complex == shuffle_product(c, c));
}

TEST_CASE("diagonal of the interval") {
  auto e = standard_simplex(1);
  auto r = fiber_product({&e, identity(2)}, {&e, identity(2)}, e);
  REQUIRE(r.complex.count(1) == 1);
  CHECK(r.complex.simplex(1, 0) == Simplex{0, 3});
  // In (u, v) coordinates the diagonal edge is (1, 1) and Phi = [1, -1]:
  // det [[1, 1], [1, -1]] = -2, so the naive frame comparison gives -1 and the
  // (-1)^{dim S dim X2} = -1 factor makes the diagonal positively oriented.
  CHECK(r.complex.orientation()[0] == 1);
}

TEST_CASE("non-transverse data is rejected") {
  auto s = standard_simplex(2);
  auto e = standard_simplex(1);
  CHECK_THROWS_AS(fiber_product({&e, {0, 1}}, {&e, {0, 1}}, s), NonTransverse);
}

TEST_CASE("square boundary identity by direct enumeration") {
  auto e = standard_simplex(1);
  auto pt = point_complex();
  auto r = fiber_product({&e, {0, 0}}, {&e, {0, 0}}, pt);
  auto d = boundary_chain(r.complex, fundamental_chain(r.complex));
  // square vertices (a, b) -> id 2a + b; oracle: the four boundary edges,
  // d(A x B) = dA x B - A x dB
  std::map<Simplex, int> expected{{{2, 3}, 1}, {{0, 1}, -1}, {{1, 3}, -1}, {{0, 2}, 1}};
  CHECK(d.coefficients.size() == 4);
  for (auto& [edge, sign] : expected) {
    auto o = r.complex.orient(edge);
    REQUIRE(o);
    CHECK(d.coefficients.at(o->index) == sign * o->sign);
  }
  CHECK(check_boundary_identity({&e, {0, 0}}, {&e, {0, 0}}, pt).equal);
}

TEST_CASE("boundary identity, exhaustive over the bundled suite") {
  int checked = 0, skipped = 0;
  for (const std::string t : {"point", "c4", "oct"}) {
    auto s = target(t);
    auto cat = catalogue(t);
    for (const auto& a : cat)
      for (const auto& b : cat) {
        GeometricComparison r;
        try {
          r = check_boundary_identity({&a.x, a.f}, {&b.x, b.f}, s);
        } catch (const NonTransverse&) {
          ++skipped;
          continue;
        }
        INFO(t << ": " << a.name << " x " << b.name << " " << r.detail);
        CHECK(r.equal);
        ++checked;
      }
  }
  CHECK(checked >= 60);
  MESSAGE("checked " << checked << ", non-transverse " << skipped);
}

TEST_CASE("associativity for composable triples of dim <= 1") {
  int checked = 0, skipped = 0;
  std::vector<std::pair<std::string, std::string>> targets{
      {"point", "point"}, {"point", "c4"}, {"c4", "point"}, {"point", "oct"}, {"oct", "point"}};
  auto low = [](const std::vector<Mapped>& v) {
    std::vector<Mapped> out;
    for (auto& m : v)
      if (m.x.dim() <= 1) out.push_back(m);
    return out;
  };
  for (auto& [sn, spn] : targets) {
    auto s = target(sn), sp = target(spn);
    auto left = low(catalogue(sn)), right = low(catalogue(spn));
    // X2 carries maps into both targets: one of them is a point
    std::vector<std::tuple<std::string, SimplicialComplex, VertexMap, VertexMap>> middles;
    if (sn == "point")
      for (auto& m : right) middles.emplace_back(m.name, m.x, constant(m.x.vertex_bound(), 0), m.f);
    else
      for (auto& m : left) middles.emplace_back(m.name, m.x, m.f, constant(m.x.vertex_bound(), 0));
    for (auto& a : left)
      for (auto& [name, x2, f2, g2] : middles)
        for (auto& c : right) {
          GeometricComparison r;
          try {
            r = check_associativity({&a.x, a.f}, {&x2, f2}, g2, {&c.x, c.f}, s, sp);
          } catch (const NonTransverse&) {
            ++skipped;
            continue;
          }
          INFO(sn << "/" << spn << ": " << a.name << " " << name << " " << c.name << " "
                  << r.detail);
          CHECK(r.equal);
          ++checked;
        }
  }
  // identity maps throughout: all three are the diagonal
  auto c = polygon(4);
  CHECK(check_associativity({&c, identity(4)}, {&c, identity(4)}, identity(4), {&c, identity(4)}, c,
                            c)
            .equal);
  CHECK(checked >= 50);
  MESSAGE("checked " << checked << ", non-transverse " << skipped);
}

TEST_CASE("cube associativity over points") {
  auto e = standard_simplex(1);
  auto pt = point_complex();
  VertexMap c0{0, 0};
  auto p12 = fiber_product({&e, c0}, {&e, c0}, pt);
  auto cube = fiber_product({&p12.complex, VertexMap(4, 0)}, {&e, c0}, pt);
  CHECK(cube.complex.count(3) == 6);
  CHECK(check_associativity({&e, c0}, {&e, c0}, c0, {&e, c0}, pt, pt).equal);
}
