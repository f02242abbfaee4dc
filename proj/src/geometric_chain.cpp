#include "floer/geometric_chain.hpp"

#include <cmath>
#include <sstream>

namespace floer {

namespace {

constexpr double kEps = 1e-9;

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // list of columns

Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Mat edges(const std::vector<Vec>& pts) {
  Mat e;
  for (std::size_t i = 1; i < pts.size(); ++i) e.push_back(sub(pts[i], pts[0]));
  return e;
}

// Solves the square system g x = r by partial pivoting; false if singular.
bool solve(Mat g, Vec r, Vec& x) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(g[i][c]) > std::abs(g[p][c])) p = i;
    if (std::abs(g[p][c]) < kEps) return false;
    std::swap(g[p], g[c]);
    std::swap(r[p], r[c]);
    for (std::size_t i = c + 1; i < n; ++i) {
      double f = g[i][c] / g[c][c];
      for (std::size_t j = c; j < n; ++j) g[i][j] -= f * g[c][j];
      r[i] -= f * r[c];
    }
  }
  x.assign(n, 0);
  for (std::size_t c = n; c-- > 0;) {
    double s = r[c];
    for (std::size_t j = c + 1; j < n; ++j) s -= g[c][j] * x[j];
    x[c] = s / g[c][c];
  }
  return true;
}

double det(Mat g) {
  const std::size_t n = g.size();
  double d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(g[i][c]) > std::abs(g[p][c])) p = i;
    if (std::abs(g[p][c]) < kEps) return 0;
    if (p != c) {
      std::swap(g[p], g[c]);
      d = -d;
    }
    d *= g[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      double f = g[i][c] / g[c][c];
      for (std::size_t j = c; j < n; ++j) g[i][j] -= f * g[c][j];
    }
  }
  return d;
}

Mat gram(const Mat& a, const Mat& b) {
  Mat g(a.size(), Vec(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) g[i][j] = dot(a[i], b[j]);
  return g;
}

bool nondegenerate(const std::vector<Vec>& pts) {
  Mat e = edges(pts);
  return e.empty() || std::abs(det(gram(e, e))) > kEps;
}

Vec generic_point(const std::vector<Vec>& pts) {
  static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  Vec x(pts[0].size(), 0);
  double total = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double w = std::sqrt(primes[i % 12]);
    total += w;
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += w * pts[i][j];
  }
  for (auto& v : x) v /= total;
  return x;
}

// Orientation of `cell` relative to `ref` if x lies in the relative interior
// of `cell` and the two span the same plane; 0 otherwise.
int relative_sign(const std::vector<Vec>& cell, const std::vector<Vec>& ref, const Vec& x) {
  Mat e = edges(cell);
  Vec r = sub(x, cell[0]);
  if (e.empty()) {
    return std::sqrt(dot(r, r)) < kEps ? 1 : 0;
  }
  Vec lambda;
  if (!solve(gram(e, e), [&] {
        Vec out(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) out[i] = dot(e[i], r);
        return out;
      }(),
             lambda))
    return 0;
  Vec fit = cell[0];
  double sum = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (lambda[i] <= kEps) return 0;
    sum += lambda[i];
    for (std::size_t j = 0; j < fit.size(); ++j) fit[j] += lambda[i] * e[i][j];
  }
  if (sum >= 1 - kEps) return 0;
  Vec res = sub(fit, x);
  if (std::sqrt(dot(res, res)) > 1e-7) return 0;
  Mat er = edges(ref);
  double d = det(gram(e, er));
  if (std::abs(d) < kEps) return 0;  // different planes through x
  return d > 0 ? 1 : -1;
}

Integer multiplicity(const GeometricChain& c, const std::vector<Vec>& ref, const Vec& x) {
  Integer m = 0;
  for (const auto& t : c.terms) {
    if (!nondegenerate(t.points)) continue;
    int s = relative_sign(t.points, ref, x);
    if (s != 0) m += t.coefficient * s;
  }
  return m;
}

}  // namespace

GeometricChain embed_chain(const SimplicialComplex& k, const SimplicialChain& c,
                           const std::function<std::vector<double>(int)>& coords) {
  GeometricChain g{c.degree, {}};
  for (const auto& [idx, coef] : c.coefficients) {
    GeometricChain::Term t;
    for (int v : k.simplex(c.degree, idx)) t.points.push_back(coords(v));
    t.coefficient = coef;
    g.terms.push_back(std::move(t));
  }
  return g;
}

GeometricComparison compare_geometric(const GeometricChain& a, const GeometricChain& b) {
  if (a.degree != b.degree && !a.terms.empty() && !b.terms.empty())
    return {false, "chains have different degrees"};
  for (const auto* side : {&a, &b})
    for (const auto& t : side->terms) {
      if (t.coefficient == 0 || !nondegenerate(t.points)) continue;
      Vec x = generic_point(t.points);
      Integer ma = multiplicity(a, t.points, x), mb = multiplicity(b, t.points, x);
      if (ma != mb) {
        std::ostringstream os;
        os << "multiplicity " << ma << " vs " << mb << " on a cell with first vertex (";
        for (std::size_t i = 0; i < t.points[0].size(); ++i)
          if (t.points[0][i] != 0) os << " " << i << ":" << t.points[0][i];
        os << " )";
        return {false, os.str()};
      }
    }
  return {};
}

GeometricChain operator+(GeometricChain a, const GeometricChain& b) {
  if (a.terms.empty()) a.degree = b.degree;
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

GeometricChain scaled(GeometricChain a, const Integer& c) {
  for (auto& t : a.terms) t.coefficient *= c;
  return a;
}

}  // namespace floer
