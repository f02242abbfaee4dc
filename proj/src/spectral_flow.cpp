#include "floer/spectral_flow.hpp"

#include "floer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

namespace floer {

namespace {

// Householder reduction to tridiagonal form: diagonal d, subdiagonal e
// (e[0] unused).
void tridiagonalize(std::vector<double> a, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e) {
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(A(i, k));
      if (scale == 0.0) {
        e[i] = A(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          A(i, k) /= scale;
          h += A(i, k) * A(i, k);
        }
        double f = A(i, l);
        double g = f >= 0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        A(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
          e[j] = g / h;
          f += e[j] * A(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = A(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) A(j, k) -= (f * e[k] + g * A(i, k));
        }
      }
    } else {
      e[i] = A(i, l);
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = A(i, i);
}

// Implicit QL with Wilkinson shifts on the tridiagonal matrix.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iterations > 60) throw Error("eigenvalue iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = (r = std::hypot(f, g));
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

int negative_count(const std::vector<double>& ev) {
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [](double x) { return x < 0; }));
}

double max_movement(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double min_abs(const std::vector<double>& ev) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : ev) m = std::min(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const SymMatrix& m) {
  if (m.n == 0) return {};
  if (m.n == 1) return {m.a[0]};
  std::vector<double> d, e;
  tridiagonalize(m.a, m.n, d, e);
  tridiagonal_ql(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

OperatorPath OperatorPath::from_samples(std::vector<std::pair<double, SymMatrix>> samples) {
  if (samples.size() < 2) throw ShapeMismatch("an operator path needs at least two samples");
  if (samples.front().first != 0.0 || samples.back().first != 1.0)
    throw ShapeMismatch("sample times must start at 0 and end at 1");
  const std::size_t n = samples.front().second.n;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].second.n != n || samples[i].second.a.size() != n * n)
      throw ShapeMismatch("samples have different sizes");
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw ShapeMismatch("sample times must be strictly increasing");
    const SymMatrix& m = samples[i].second;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c)
        if (m(r, c) != m(c, r)) throw ShapeMismatch("sample matrix is not symmetric");
  }
  OperatorPath p;
  p.n_ = n;
  p.samples_ = std::move(samples);
  for (const auto& s : p.samples_) p.grid_.push_back(s.first);
  auto shared = std::make_shared<std::vector<std::pair<double, SymMatrix>>>(p.samples_);
  p.f_ = [shared, n](double t) {
    const auto& s = *shared;
    auto it = std::upper_bound(s.begin(), s.end(), t,
                               [](double x, const std::pair<double, SymMatrix>& e) { return x < e.first; });
    if (it == s.begin()) return s.front().second;
    if (it == s.end()) return s.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.first) / (hi.first - lo.first);
    SymMatrix m(n);
    for (std::size_t i = 0; i < n * n; ++i) m.a[i] = (1 - w) * lo.second.a[i] + w * hi.second.a[i];
    return m;
  };
  return p;
}

OperatorPath OperatorPath::from_function(std::size_t n, std::function<SymMatrix(double)> f,
                                         std::size_t grid) {
  OperatorPath p;
  p.n_ = n;
  p.f_ = std::move(f);
  grid = std::max<std::size_t>(grid, 2);
  for (std::size_t i = 0; i < grid; ++i) p.grid_.push_back(static_cast<double>(i) / (grid - 1));
  return p;
}

SymMatrix OperatorPath::at(double t) const { return f_(std::clamp(t, 0.0, 1.0)); }

OperatorPath OperatorPath::reversed() const {
  OperatorPath p;
  p.n_ = n_;
  auto f = f_;
  p.f_ = [f](double t) { return f(1.0 - t); };
  for (auto it = grid_.rbegin(); it != grid_.rend(); ++it) p.grid_.push_back(1.0 - *it);
  for (auto it = samples_.rbegin(); it != samples_.rend(); ++it)
    p.samples_.push_back({1.0 - it->first, it->second});
  return p;
}

OperatorPath OperatorPath::concatenate(const OperatorPath& next) const {
  if (next.n_ != n_) throw ShapeMismatch("concatenated paths have different sizes");
  OperatorPath p;
  p.n_ = n_;
  auto f = f_, g = next.f_;
  p.f_ = [f, g](double t) { return t <= 0.5 ? f(2 * t) : g(2 * t - 1); };
  for (double t : grid_) p.grid_.push_back(t / 2);
  for (std::size_t i = 1; i < next.grid_.size(); ++i) p.grid_.push_back(0.5 + next.grid_[i] / 2);
  if (!samples_.empty() && !next.samples_.empty()) {
    for (const auto& s : samples_) p.samples_.push_back({s.first / 2, s.second});
    for (std::size_t i = 1; i < next.samples_.size(); ++i)
      p.samples_.push_back({0.5 + next.samples_[i].first / 2, next.samples_[i].second});
  }
  return p;
}

SpectralFlowResult spectral_flow_detail(const OperatorPath& p, const SpectralFlowOptions& o) {
  SpectralFlowResult result;
  const double half_gap = o.tolerance / 2;
  auto eig = [&](double t) { return symmetric_eigenvalues(p.at(t)); };
  const auto e0 = eig(0.0), e1 = eig(1.0);
  if (min_abs(e0) < o.tolerance)
    throw DegenerateEndpoint("A(0) has an eigenvalue within " + std::to_string(o.tolerance) + " of 0");
  if (min_abs(e1) < o.tolerance)
    throw DegenerateEndpoint("A(1) has an eigenvalue within " + std::to_string(o.tolerance) + " of 0");

  struct Node {
    double t;
    std::vector<double> ev;
  };
  // Interior points that land on a zero eigenvalue are nudged: the count of
  // negative eigenvalues must be unambiguous at every node.
  auto node = [&](double t, double lo, double hi) {
    auto ev = eig(t);
    for (int tries = 0; min_abs(ev) < 1e-12 && tries < 8; ++tries) {
      t = lo + (t - lo) * 0.999 + (hi - t) * 1e-3;
      ev = eig(t);
    }
    return Node{t, std::move(ev)};
  };
  std::function<void(const Node&, const Node&, int)> walk = [&](const Node& a, const Node& b,
                                                                 int depth) {
    if (max_movement(a.ev, b.ev) < half_gap) {
      ++result.intervals;
      const int change = negative_count(a.ev) - negative_count(b.ev);
      if (change != 0) {
        result.value += change;
        const int dir = change > 0 ? 1 : -1;
        for (int i = 0; i < std::abs(change); ++i) result.crossings.push_back({a.t, b.t, dir});
      }
      return;
    }
    if (depth >= o.max_depth)
      throw RefinementLimit("bisection depth " + std::to_string(o.max_depth) + " reached near t = " +
                            std::to_string(a.t));
    const Node mid = node((a.t + b.t) / 2, a.t, b.t);
    walk(a, mid, depth + 1);
    walk(mid, b, depth + 1);
  };
  std::vector<Node> nodes;
  const auto& grid = p.grid();
  nodes.push_back({0.0, e0});
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (grid[i] > 0.0 && grid[i] < 1.0) nodes.push_back(node(grid[i], grid[i - 1], grid[i + 1]));
  nodes.push_back({1.0, e1});
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) walk(nodes[i], nodes[i + 1], 0);
  return result;
}

int spectral_flow(const OperatorPath& p, double tolerance) {
  SpectralFlowOptions o;
  o.tolerance = tolerance;
  return spectral_flow_detail(p, o).value;
}

bool check_additivity(const OperatorPath& p1, const OperatorPath& p2, double tolerance) {
  const SymMatrix end = p1.at(1.0), start = p2.at(0.0);
  if (end.n != start.n) throw ShapeMismatch("paths have different sizes");
  for (std::size_t i = 0; i < end.a.size(); ++i)
    if (std::abs(end.a[i] - start.a[i]) > 1e-12 * (1 + std::abs(end.a[i])))
      throw ShapeMismatch("paths do not meet");
  return spectral_flow(p1.concatenate(p2), tolerance) ==
         spectral_flow(p1, tolerance) + spectral_flow(p2, tolerance);
}

std::map<std::string, int> assign_grading(const std::string& ref_id,
                                          const std::map<std::string, OperatorPath>& paths,
                                          const std::map<std::string, int>& corrections,
                                          double tolerance) {
  std::map<std::string, int> mu;
  mu[ref_id] = 0;
  for (const auto& [id, path] : paths) {
    if (id == ref_id) continue;
    auto it = corrections.find(id);
    mu[id] = spectral_flow(path, tolerance) - 1 + (it == corrections.end() ? 0 : it->second);
  }
  return mu;
}

OperatorPath parse_operator_path(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("header", "missing \"n samples\" line", line_no);
  std::istringstream header(line);
  long n = -1, count = -1;
  std::string extra;
  if (!(header >> n >> count) || (header >> extra) || n < 1 || count < 2)
    throw ParseError("header", "expected \"n samples\" with n >= 1 and samples >= 2", line_no);
  std::vector<std::pair<double, SymMatrix>> samples;
  const std::size_t entries = static_cast<std::size_t>(n * (n + 1) / 2);
  for (long s = 0; s < count; ++s) {
    if (!next_line()) throw ParseError("sample", "expected " + std::to_string(count) + " samples", line_no);
    std::istringstream row(line);
    double t;
    if (!(row >> t)) throw ParseError("sample", "expected t", line_no);
    SymMatrix m(static_cast<std::size_t>(n));
    std::size_t read = 0;
    for (std::size_t i = 0; i < m.n; ++i)
      for (std::size_t j = i; j < m.n; ++j) {
        double x;
        if (!(row >> x))
          throw ParseError("sample", "expected " + std::to_string(entries) + " entries after t", line_no);
        m(i, j) = m(j, i) = x;
        ++read;
      }
    if (row >> extra) throw ParseError("sample", "too many entries", line_no);
    samples.push_back({t, std::move(m)});
  }
  if (next_line()) throw ParseError("sample", "more samples than declared", line_no);
  try {
    return OperatorPath::from_samples(std::move(samples));
  } catch (const ShapeMismatch& e) {
    throw ParseError("samples", e.what());
  }
}

OperatorPath load_operator_path(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_operator_path(ss.str());
}

std::string format_operator_path(const OperatorPath& p) {
  if (p.samples().empty()) throw Error("only sampled paths can be written");
  std::ostringstream out;
  out << std::setprecision(17);
  out << p.size() << " " << p.samples().size() << "\n";
  for (const auto& [t, m] : p.samples()) {
    out << t;
    for (std::size_t i = 0; i < m.n; ++i)
      for (std::size_t j = i; j < m.n; ++j) out << " " << m(i, j);
    out << "\n";
  }
  return out.str();
}

}  // namespace floer
