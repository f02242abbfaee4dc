#pragma once

// Small spaces with maps into a point, the 4-gon and the octahedron, used for
// exhaustive fiber product identities.

#include "floer/fiber_product.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace fibcat {

using namespace floer;

struct Mapped {
  std::string name;
  SimplicialComplex x;
  VertexMap f;
};

inline VertexMap identity(std::size_t n) {
  VertexMap v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

inline VertexMap constant(std::size_t n, int c) { return VertexMap(n, c); }

// Square, cylinder and annulus-like test spaces with projections.
inline SimplicialComplex square() { return shuffle_product(standard_simplex(1), standard_simplex(1)); }
inline SimplicialComplex cylinder(int n) { return shuffle_product(polygon(n), standard_simplex(1)); }

// Vertices 0,1 = +-x, 2,3 = +-y, 4,5 = +-z, outward orientation.
inline SimplicialComplex octahedron() {
  std::vector<Simplex> faces;
  std::vector<int> signs;
  for (int a : {0, 1})
    for (int b : {2, 3})
      for (int c : {4, 5}) {
        faces.push_back({a, b, c});
        signs.push_back((a == 0 ? 1 : -1) * (b == 2 ? 1 : -1) * (c == 4 ? 1 : -1));
      }
  return SimplicialComplex::from_maximal(6, faces, signs);
}

// Catalogue of maps into a given target, by target name.
inline std::vector<Mapped> catalogue(const std::string& target) {
  std::vector<Mapped> out;
  auto simplex1 = standard_simplex(1), simplex2 = standard_simplex(2), pt = point_complex();
  auto c4 = polygon(4);
  if (target == "point") {
    for (auto& [name, k] : std::vector<std::pair<std::string, SimplicialComplex>>{
             {"pt", pt}, {"d1", simplex1}, {"d2", simplex2}, {"c4", c4}, {"sq", square()}})
      out.push_back({name, k, constant(k.vertex_bound(), 0)});
  } else if (target == "c4") {
    out.push_back({"id", c4, identity(4)});
    out.push_back({"v2", pt, {2}});
    out.push_back({"edge", simplex1, {1, 2}});
    auto cyl = cylinder(4);
    VertexMap pr(cyl.vertex_bound());
    for (std::size_t i = 0; i < pr.size(); ++i) pr[i] = static_cast<int>(i / 2);
    out.push_back({"cyl", cyl, pr});
    VertexMap flip{0, 3, 2, 1};
    out.push_back({"flip", c4, flip});
  } else if (target == "oct") {
    auto oct = octahedron();
    out.push_back({"id", oct, identity(6)});
    out.push_back({"face", simplex2, {0, 2, 4}});
    out.push_back({"face-rev", simplex2, {4, 2, 1}});
    out.push_back({"edge", simplex1, {0, 2}});
    out.push_back({"edge2", simplex1, {3, 5}});
    out.push_back({"v0", pt, {0}});
    // the square folded onto two faces sharing the edge (2, 4)
    out.push_back({"sq", square(), {0, 2, 4, 1}});
    VertexMap swap{1, 0, 2, 3, 4, 5};
    out.push_back({"reflect", oct, swap});
  }
  return out;
}

inline SimplicialComplex target(const std::string& name) {
  if (name == "point") return point_complex();
  if (name == "c4") return polygon(4);
  return octahedron();
}

}  // namespace fibcat
