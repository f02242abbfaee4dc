#include "doctest.h"

#include "../support/oracle.hpp"
#include "floer/continuation.hpp"
#include "floer/errors.hpp"
#include "floer/floer_complex.hpp"
#include "floer/morse_lab.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace floer;
using namespace floer::lab;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

SmoothFunction height_along(const Vec& u) {
  return quadratic_function("linear", Mat::Zero(u.size(), u.size()), u);
}

// Critical points of x^T q x + b.x on the unit sphere from the secular
// equation: x = -(2q - l)^-1 b with |x| = 1, solved in the eigenbasis of q.
std::vector<Vec> secular_critical_points(const Mat& q, const Vec& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(q);
  const Vec c = 2 * es.eigenvalues();
  const Vec beta = es.eigenvectors().transpose() * b;
  auto g = [&](double l) {
    double s = 0;
    for (int i = 0; i < c.size(); ++i) s += beta[i] * beta[i] / ((c[i] - l) * (c[i] - l));
    return s - 1;
  };
  auto root = [&](double lo, double hi) {  // g(lo), g(hi) of opposite sign
    const bool up = g(lo) < 0;
    for (int i = 0; i < 200; ++i) {
      const double mid = (lo + hi) / 2;
      ((g(mid) < 0) == up ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
  };
  std::vector<double> ls;
  const double eps = 1e-12, far = c.cwiseAbs().maxCoeff() + b.norm() + 10;
  ls.push_back(root(-far, c[0] - eps));
  for (int i = 0; i + 1 < c.size(); ++i) {
    double lo = c[i] + eps, hi = c[i + 1] - eps;
    for (int it = 0; it < 300; ++it) {  // g is convex between poles
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      (g(m1) < g(m2) ? hi : lo) = (g(m1) < g(m2) ? m2 : m1);
    }
    const double m = (lo + hi) / 2;
    if (g(m) < 0) {
      ls.push_back(root(m, c[i] + eps));
      ls.push_back(root(m, c[i + 1] - eps));
    }
  }
  ls.push_back(root(c[c.size() - 1] + eps, far));
  std::vector<Vec> out;
  for (double l : ls) {
    Vec y(c.size());
    for (int i = 0; i < c.size(); ++i) y[i] = -beta[i] / (c[i] - l);
    out.push_back(es.eigenvectors() * y);
  }
  return out;
}

double relative_error(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

Vec central_gradient(const SmoothFunction& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f.value(p) - f.value(m)) / (2 * h);
  }
  return g;
}

Mat central_hessian(const SmoothFunction& f, const Vec& x, double h = 1e-5) {
  Mat out(x.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    out.col(i) = (f.gradient(p) - f.gradient(m)) / (2 * h);
  }
  return out;
}

std::map<std::pair<std::string, std::string>, int> signed_counts(const FlowCategory& fc) {
  std::map<std::pair<std::string, std::string>, int> out;
  for (const auto& m : fc.moduli)
    if (m.complex.dim() == 0)
      for (std::size_t i = 0; i < m.complex.simplices(0).size(); ++i)
        out[{m.source, m.target}] += m.complex.orientation()[i];
  return out;
}

}  // namespace

TEST_CASE("height on the sphere has its poles as critical points") {
  const auto m = sphere();
  const auto f = height_along(v3(0, 0, 1));
  const auto cs = find_critical_manifolds(m, f);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].index == 2);
  CHECK(cs[0].dim == 0);
  CHECK((cs[0].vertices[0] - v3(0, 0, 1)).norm() < 1e-9);
  CHECK(cs[1].index == 0);
  CHECK((cs[1].vertices[0] - v3(0, 0, -1)).norm() < 1e-9);
  CHECK(cs[0].witnesses.size() + cs[1].witnesses.size() == 100);
}

TEST_CASE("tilted quadratic: six critical points matching the secular equation") {
  const auto ex = example("s2-tilted-morse");
  const auto cs = find_critical_manifolds(ex.manifold, ex.function, ex.options);
  REQUIRE(cs.size() == 6);
  std::vector<int> indices;
  for (const auto& c : cs) indices.push_back(c.index);
  CHECK(indices == std::vector<int>{2, 2, 1, 1, 0, 0});
  // Recover q and b from the function itself.
  Mat q = ex.function.hessian(Vec::Zero(3)) / 2;
  Vec b = ex.function.gradient(Vec::Zero(3));
  const auto expected = secular_critical_points(q, b);
  REQUIRE(expected.size() == 6);
  for (const auto& x : expected) {
    CHECK(std::abs(x.norm() - 1) < 1e-9);
    const bool found = std::any_of(cs.begin(), cs.end(), [&](const CriticalComponent& c) {
      return (c.vertices[0] - x).norm() < 1e-8;
    });
    CHECK(found);
  }
}

TEST_CASE("constant function on the circle: the whole circle is critical") {
  const auto ex = example("s1-constant");
  const auto cs = find_critical_manifolds(ex.manifold, ex.function, ex.options);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].dim == 1);
  CHECK(cs[0].index == 0);
  CHECK(cs[0].vertices.size() == 8);
  for (const auto& v : cs[0].vertices) CHECK(std::abs(v.norm() - 1) < 1e-9);
}

TEST_CASE("flat torus: two critical circles") {
  const auto ex = example("t2-flat-height");
  const auto cs = find_critical_manifolds(ex.manifold, ex.function, ex.options);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].dim == 1);
  CHECK(cs[0].index == 1);
  CHECK(cs[0].value == doctest::Approx(1).epsilon(1e-9));
  CHECK(cs[1].dim == 1);
  CHECK(cs[1].index == 0);
  CHECK(cs[1].value == doctest::Approx(-1).epsilon(1e-9));
  for (const auto& c : cs)
    for (const auto& v : c.vertices) CHECK(std::hypot(v[0], v[1]) == doctest::Approx(2).epsilon(1e-9));
}

TEST_CASE("normal index does not depend on the direction of the height") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  const auto m = sphere();
  for (int trial = 0; trial < 5; ++trial) {
    const Vec u = v3(n(rng), n(rng), n(rng)).normalized();
    const auto f = height_along(u);
    const auto cs = find_critical_manifolds(m, f);
    REQUIRE(cs.size() == 2);
    CHECK(normal_index(cs[0], f, m) == 2);
    CHECK(normal_index(cs[1], f, m) == 0);
    CHECK((cs[0].vertices[0] - u).norm() < 1e-8);
  }
  const auto t = example("t2-flat-height");
  const auto cs = find_critical_manifolds(t.manifold, t.function, t.options);
  CHECK(normal_index(cs[0], t.function, t.manifold) == 1);
}

TEST_CASE("meridian flow on the sphere") {
  const auto m = sphere();
  const auto f = height_along(v3(0, 0, 1));
  const double eps = 1e-4;
  const auto tr = integrate_flow(m, f, v3(std::sin(eps), 0, std::cos(eps)));
  CHECK_FALSE(tr.stationary);
  CHECK(tr.energy == doctest::Approx(std::cos(eps) + 1).epsilon(1e-8));
  CHECK(std::abs(tr.energy - 2) < 1e-6);
  CHECK((tr.points.back() - v3(0, 0, -1)).norm() < 1e-5);
  for (const auto& p : tr.points) CHECK(std::abs(p[1]) < 1e-12);

  const auto still = integrate_flow(m, f, v3(0, 0, 1));
  CHECK(still.stationary);
  CHECK(still.energy == 0);
}

TEST_CASE("every lab trajectory decreases f with the right energy") {
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const auto ex = example(name);
    const auto r = run_example(ex);
    for (const auto& t : r.trajectories) {
      for (std::size_t i = 1; i < t.values.size(); ++i) CHECK(t.values[i] < t.values[i - 1]);
      CHECK(std::abs(t.energy - (t.values.front() - t.values.back())) < 10 * ex.options.integrator_tol);
    }
  }
}

TEST_CASE("analytic derivatives agree with central differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const auto ex = example(name);
    std::vector<SmoothFunction> fs = ex.manifold.constraints;
    fs.push_back(ex.function);
    for (int i = 0; i < 100; ++i) {
      Vec x(ex.manifold.ambient);
      for (int k = 0; k < x.size(); ++k) x[k] = 2 * n(rng);
      for (const auto& f : fs) {
        CHECK(relative_error(f.gradient(x), central_gradient(f, x)) < 1e-6);
        CHECK((f.hessian(x) - central_hessian(f, x)).norm() / std::max(1.0, f.hessian(x).norm()) < 1e-6);
      }
    }
  }
}

TEST_CASE("bundled examples validate and match the reference homology") {
  const std::map<std::string, std::vector<std::size_t>> expected{
      {"s2-height", oracle::betti(oracle::simplicial(oracle::octahedron()), 0, 2)},
      {"s2-tilted-morse", oracle::betti(oracle::simplicial(oracle::octahedron()), 0, 2)},
      {"t2-flat-height", oracle::betti(oracle::simplicial(oracle::torus()), 0, 2)},
      {"s1-constant", oracle::betti(oracle::simplicial(oracle::circle()), 0, 1)},
      {"s1xs2-product",
       oracle::betti(oracle::simplicial(oracle::product(oracle::circle(), 3, oracle::octahedron(), 6)), 0, 3)}};
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const auto r = run_example(example(name));
    CHECK(r.category.name == name);
    CHECK(validate(r.category).ok);
    const auto h = floer_homology(assemble(r.category));
    CHECK(h.betti_range(0, static_cast<int>(expected.at(name).size()) - 1) == expected.at(name));
    CHECK(h.torsion_free());
  }
}

TEST_CASE("finer sweeps give the same signed counts") {
  auto ex = example("s2-tilted-morse");
  const auto coarse = signed_counts(run_example(ex).category);
  ex.options.resolution = 64;
  const auto fine = signed_counts(run_example(ex).category);
  CHECK(coarse == fine);
  CHECK(coarse.size() == 8);
  const auto b = morse_assemble(run_example(example("s2-tilted-morse")).category);
  CHECK(floer_homology(b).betti_range(0, 2) == std::vector<std::size_t>{1, 0, 1});
}

TEST_CASE("lab errors") {
  const auto m = sphere();
  CHECK_THROWS_AS(retract(m, Vec::Zero(3)), EscapeError);

  LabOptions bad;
  bad.newton_tol = 0;
  CHECK_THROWS_AS(find_critical_manifolds(m, height_along(v3(0, 0, 1)), bad), LabError);

  // x^3 is degenerate along the whole equator x = 0.
  SmoothFunction cubic{"cubic", [](const Vec& x) { return x[0] * x[0] * x[0]; },
                       [](const Vec& x) { return v3(3 * x[0] * x[0], 0, 0); },
                       [](const Vec& x) {
                         Mat h = Mat::Zero(3, 3);
                         h(0, 0) = 6 * x[0];
                         return h;
                       }};
  CHECK_THROWS_AS(find_critical_manifolds(m, cubic), NonIsolatedDegenerate);

  CHECK_THROWS_AS(example("no-such-example"), std::out_of_range);
  CHECK_THROWS_AS(parse_example("{\"manifold\": \"klein\"}"), ParseError);
  CHECK_THROWS_AS(parse_example("{\"manifold\": \"sphere\", \"linear\": [1, 2]}"), ParseError);
  CHECK_THROWS_AS(parse_example("{\"manifold\": \"torus\", \"R\": 1, \"r\": 2}"), ParseError);
  CHECK_THROWS_AS(parse_example("{\"manifold\": \"sphere\", \"resolution\": 2}"), ParseError);

  // Both sides have index-1 points: transitions between them are out of scope.
  const auto tilted = example("s2-tilted-morse");
  const auto r = run_example(tilted);
  auto fc = std::make_shared<const FlowCategory>(r.category);
  CHECK_THROWS_AS(build_transition("t", m, tilted.function, tilted.function, Schedule{{0, 1}}, r, r, fc, fc),
                  LabError);
}

TEST_CASE("parsed example equals the bundled one") {
  const auto e = parse_example(R"({"manifold": "sphere", "linear": [0, 0, 1]})", "s2-height");
  const auto a = run_example(e).category;
  const auto b = run_example(example("s2-height")).category;
  CHECK(to_fcd_json(a) == to_fcd_json(b));
}

TEST_CASE("generated comparison passes the invariance protocol") {
  const auto ea = example("s2-height"), eb = example("s2-tilted-morse");
  const auto a = run_example(ea), b = run_example(eb);
  const auto data = build_comparison(ea.manifold, ea.function, eb.function, a, b, ea.options);
  const auto c = resolve_protocol(data.file);
  const auto v = verify_invariance_protocol(c.forward, c.backward, c.glue_fwd_bwd, c.glue_to_identity);
  CHECK(v.verified);
  REQUIRE(v.forward);
  CHECK(v.forward->is_isomorphism);
  CHECK(c.forward.moduli.size() == 3);
  for (const auto& s : data.samples) CHECK(s.points.size() == s.times.size());
}
