#pragma once
// Small flow categories written out by hand for the tests.

#include "floer/flow_category.hpp"

#include <numeric>

namespace cats {

using floer::CriticalManifold;
using floer::FlowCategory;
using floer::ModuliSpace;
using floer::SimplicialComplex;

inline floer::VertexMap constant(std::size_t n, int v = 0) { return floer::VertexMap(n, v); }
inline floer::VertexMap modulo(std::size_t size, int n) {
  floer::VertexMap m(size);
  for (std::size_t i = 0; i < size; ++i) m[i] = static_cast<int>(i) % n;
  return m;
}

inline SimplicialComplex points(int n, std::vector<int> signs) {
  std::vector<floer::Simplex> cells;
  for (int i = 0; i < n; ++i) cells.push_back({i});
  return SimplicialComplex::from_maximal(n, cells, std::move(signs));
}

// Disjoint circles on vertices c*n .. c*n+n-1, one sign per circle.
inline SimplicialComplex circles(int n, const std::vector<int>& signs) {
  std::vector<floer::Simplex> cells;
  std::vector<int> orientation;
  for (std::size_t c = 0; c < signs.size(); ++c) {
    const int base = static_cast<int>(c) * n;
    for (int i = 0; i < n; ++i) {
      cells.push_back({base + i, base + (i + 1) % n});
      orientation.push_back(signs[c]);
    }
  }
  return SimplicialComplex::from_maximal(signs.size() * n, cells, orientation);
}

inline FlowCategory circle_only(int n = 4) {
  return {"s1-constant", {{"S", 0, 1, floer::polygon(n)}}, {}};
}

inline FlowCategory point_only() {
  return {"point", {{"p", 0, 0, floer::point_complex()}}, {}};
}

// Height on the round sphere: the moduli space is the circle of meridians.
inline FlowCategory s2_height(int n = 4) {
  FlowCategory fc{"s2-height",
                  {{"max", 2, 0, floer::point_complex()}, {"min", 0, 0, floer::point_complex()}},
                  {}};
  fc.moduli.push_back({"max", "min", floer::polygon(n), constant(n), constant(n), {}});
  return fc;
}

// Morse data on S^1: two trajectories with opposite signs.
inline FlowCategory circle_morse() {
  FlowCategory fc{"s1-morse",
                  {{"max", 1, 0, floer::point_complex()}, {"min", 0, 0, floer::point_complex()}},
                  {}};
  fc.moduli.push_back({"max", "min", points(2, {1, -1}), constant(2), constant(2), {}});
  return fc;
}

// Height on the flat torus: circles of maxima and minima joined by two
// families of trajectories with opposite orientation.
inline FlowCategory flat_torus(int n = 4) {
  FlowCategory fc{"t2-flat-height",
                  {{"top", 1, 1, floer::polygon(n)}, {"bottom", 0, 1, floer::polygon(n)}},
                  {}};
  fc.moduli.push_back({"top", "bottom", circles(n, {1, -1}), modulo(2 * n, n), modulo(2 * n, n), {}});
  return fc;
}

// A sphere with one maximum, one saddle and two minima. The two moduli
// spaces of dimension one are intervals broken at the saddle.
inline FlowCategory s2_saddle() {
  FlowCategory fc{"s2-saddle",
                  {{"a", 2, 0, floer::point_complex()},
                   {"b", 1, 0, floer::point_complex()},
                   {"c1", 0, 0, floer::point_complex()},
                   {"c2", 0, 0, floer::point_complex()}},
                  {}};
  const auto edge = SimplicialComplex::from_maximal(2, {{0, 1}}, {1});
  fc.moduli.push_back({"a", "b", points(2, {1, -1}), constant(2), constant(2), {}});
  fc.moduli.push_back({"b", "c1", points(1, {1}), constant(1), constant(1), {}});
  fc.moduli.push_back({"b", "c2", points(1, {-1}), constant(1), constant(1), {}});
  fc.moduli.push_back({"a", "c1", edge, constant(2), constant(2), {{"b", {{{0, 0, 1}}, {{1, 0, 0}}}}}});
  fc.moduli.push_back({"a", "c2", edge, constant(2), constant(2), {{"b", {{{0, 0, 0}}, {{1, 0, 1}}}}}});
  return fc;
}

}  // namespace cats
