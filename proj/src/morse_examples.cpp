#include "floer/errors.hpp"
#include "floer/json_util.hpp"
#include "floer/morse_lab.hpp"

#include <cmath>

namespace floer::lab {

namespace {

Vec unit(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1;
  return v;
}

Mat rotation(double a, double b, double c) {
  Mat rx = Mat::Identity(3, 3), ry = Mat::Identity(3, 3), rz = Mat::Identity(3, 3);
  rx(1, 1) = rx(2, 2) = std::cos(a);
  rx(1, 2) = -std::sin(a);
  rx(2, 1) = std::sin(a);
  ry(0, 0) = ry(2, 2) = std::cos(b);
  ry(0, 2) = std::sin(b);
  ry(2, 0) = -std::sin(b);
  rz(0, 0) = rz(1, 1) = std::cos(c);
  rz(0, 1) = -std::sin(c);
  rz(1, 0) = std::sin(c);
  return rz * ry * rx;
}

// Ellipsoid-type quadratic in a rotated frame plus a small linear tilt: six
// nondegenerate critical points of indices 2, 2, 1, 1, 0, 0.
SmoothFunction tilted() {
  const Mat r = rotation(0.3, 0.7, 0.4);
  Mat c = Mat::Zero(3, 3);
  c(0, 0) = 1;
  c(1, 1) = 2;
  c(2, 2) = 3;
  Vec w(3);
  w << 0.3, -0.5, 0.8;
  return quadratic_function("tilted", r.transpose() * c * r, 0.3 * w.normalized());
}

}  // namespace

std::vector<std::string> example_names() {
  return {"s2-height", "s2-tilted-morse", "t2-flat-height", "s1-constant", "s1xs2-product"};
}

MorseExample example(const std::string& name) {
  MorseExample e;
  e.name = name;
  if (name == "s2-height" || name == "s1xs2-product") {
    e.manifold = sphere();
    e.function = quadratic_function("height", Mat::Zero(3, 3), unit(3, 2));
    if (name == "s1xs2-product") {
      e.options.resolution = 12;
      e.product_circle = 4;
    }
  } else if (name == "s2-tilted-morse") {
    e.manifold = sphere();
    e.function = tilted();
  } else if (name == "t2-flat-height") {
    e.manifold = torus(2.0, 1.0);
    e.function = quadratic_function("height", Mat::Zero(3, 3), unit(3, 2));
    e.options.resolution = 12;
  } else if (name == "s1-constant") {
    e.manifold = circle();
    e.function = quadratic_function("zero", Mat::Zero(2, 2), Vec::Zero(2));
    e.options.resolution = 8;
  } else {
    throw std::out_of_range("unknown example '" + name + "'");
  }
  return e;
}

MorseExample parse_example(const std::string& text, const std::string& name) {
  using json_util::json;
  const json j = json_util::parse(text, "example");
  if (!j.is_object()) throw ParseError("example", "expected an object");
  json_util::expect_fields(j, "example", {"manifold"},
                           {"R", "r", "quadratic", "linear", "resolution", "product_circle", "seed"});
  MorseExample e;
  e.name = name;
  const std::string kind = json_util::get_string(j, "manifold", "example");
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ParseError(std::string("example.") + key, "expected a number");
    return j[key].get<double>();
  };
  if (kind == "sphere") {
    e.manifold = sphere();
  } else if (kind == "circle") {
    e.manifold = circle();
  } else if (kind == "torus") {
    const double big = number("R", 2.0), small = number("r", 1.0);
    if (!(small > 0 && big > small)) throw ParseError("example.R", "torus needs R > r > 0");
    e.manifold = torus(big, small);
  } else {
    throw ParseError("example.manifold", "expected sphere, torus or circle");
  }
  const int n = e.manifold.ambient;
  Mat q = Mat::Zero(n, n);
  Vec b = Vec::Zero(n);
  if (j.contains("quadratic")) {
    const json& a = json_util::get_array(j, "quadratic", "example");
    if (static_cast<int>(a.size()) != n) throw ParseError("example.quadratic", "expected " + std::to_string(n) + " rows");
    for (int r = 0; r < n; ++r) {
      if (!a[r].is_array() || static_cast<int>(a[r].size()) != n)
        throw ParseError("example.quadratic[" + std::to_string(r) + "]", "expected " + std::to_string(n) + " numbers");
      for (int c = 0; c < n; ++c) {
        if (!a[r][c].is_number()) throw ParseError("example.quadratic", "expected numbers");
        q(r, c) = a[r][c].get<double>();
      }
    }
  }
  if (j.contains("linear")) {
    const json& a = json_util::get_array(j, "linear", "example");
    if (static_cast<int>(a.size()) != n) throw ParseError("example.linear", "expected " + std::to_string(n) + " numbers");
    for (int r = 0; r < n; ++r) {
      if (!a[r].is_number()) throw ParseError("example.linear", "expected numbers");
      b[r] = a[r].get<double>();
    }
  }
  e.function = quadratic_function(name, q, b);
  if (j.contains("resolution")) {
    const int res = json_util::get_int(j, "resolution", "example");
    if (res < 3) throw ParseError("example.resolution", "must be at least 3");
    e.options.resolution = res;
  }
  if (j.contains("product_circle")) {
    const int pc = json_util::get_int(j, "product_circle", "example");
    if (pc != 0 && pc < 3) throw ParseError("example.product_circle", "must be 0 or at least 3");
    e.product_circle = pc;
  }
  if (j.contains("seed")) e.options.seed = static_cast<unsigned long long>(json_util::get_int(j, "seed", "example"));
  return e;
}

LabResult run_example(const MorseExample& e) {
  LabResult r = build_fcd(e.manifold, e.function, e.options, e.name);
  if (e.product_circle > 0) {
    r.category = stabilize(r.category, e.product_circle);
    r.category.name = e.name;
  }
  return r;
}

}  // namespace floer::lab
