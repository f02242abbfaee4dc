#include "floer/morse_lab.hpp"

#include "floer/errors.hpp"
#include "floer/parallel.hpp"
#include "floer/spectral_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace floer::lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// Fixed generic directions: canonical starting points, traversal directions
// and signs of unstable lines are chosen against them.
Vec generic_direction(int n, bool second) {
  static const std::array<double, 5> first = {1.0, 0.37, 0.11, 0.05, 0.02};
  static const std::array<double, 5> other = {-0.37, 1.0, 0.23, 0.07, 0.03};
  const auto& pick = second ? other : first;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = pick[std::min(i, 4)];
  return v;
}

Mat gram_inverse_times(const Mat& n, const Mat& rhs) {
  const Eigen::LDLT<Mat> gram(n.transpose() * n);
  return gram.solve(rhs);
}

Vec project_tangent(const Mat& n, const Vec& g) {
  if (n.cols() == 0) return g;
  return g - n * gram_inverse_times(n, n.transpose() * g);
}

int count_negative(const Mat& h, double kernel_tol, int* kernel = nullptr) {
  SymMatrix s(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) s(i, j) = 0.5 * (h(i, j) + h(j, i));
  int neg = 0, ker = 0;
  for (double ev : symmetric_eigenvalues(s)) {
    if (std::abs(ev) < kernel_tol) ++ker;
    else if (ev < 0) ++neg;
  }
  if (kernel) *kernel = ker;
  return neg;
}

// ---- Lagrange system: grad f + N lambda = 0, c = 0 -----------------------

struct LagrangePoint {
  Vec x;
  Vec lambda;
};

Vec lagrange_multipliers(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x) {
  const Mat n = constraint_normals(m, x);
  if (n.cols() == 0) return Vec();
  return -gram_inverse_times(n, n.transpose() * f.gradient(x));
}

Vec lagrange_residual(const EmbeddedManifold& m, const SmoothFunction& f, const LagrangePoint& p) {
  const int k = static_cast<int>(m.constraints.size());
  Vec r(m.ambient + k);
  Vec g = f.gradient(p.x);
  for (int i = 0; i < k; ++i) g += p.lambda[i] * m.constraints[i].gradient(p.x);
  r.head(m.ambient) = g;
  r.tail(k) = constraint_values(m, p.x);
  return r;
}

// Gauss-Newton with minimum-norm steps, so that on a critical circle the
// correction is normal to the circle. Returns false when it does not converge.
bool lagrange_newton(const EmbeddedManifold& m, const SmoothFunction& f, LagrangePoint& p,
                     double tol, int max_iter = 60) {
  const int n = m.ambient, k = static_cast<int>(m.constraints.size());
  Vec r = lagrange_residual(m, f, p);
  for (int it = 0; it < max_iter; ++it) {
    if (r.norm() < tol) return true;
    Mat j = Mat::Zero(n + k, n + k);
    Mat h = f.hessian(p.x);
    for (int i = 0; i < k; ++i) h += p.lambda[i] * m.constraints[i].hessian(p.x);
    const Mat nn = constraint_normals(m, p.x);
    j.topLeftCorner(n, n) = h;
    j.topRightCorner(n, k) = nn;
    j.bottomLeftCorner(k, n) = nn.transpose();
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(j);
    cod.setThreshold(1e-9);
    const Vec step = cod.solve(-r);
    double t = 1.0;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      LagrangePoint q{p.x + t * step.head(n), p.lambda + t * step.tail(k)};
      Vec rq = lagrange_residual(m, f, q);
      if (rq.allFinite() && rq.norm() < r.norm() * (1 - 1e-4 * t)) {
        p = q;
        r = rq;
        break;
      }
      if (ls == 29) return r.norm() < tol;
    }
  }
  return r.norm() < tol;
}

LagrangePoint lagrange_start(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x) {
  return {x, lagrange_multipliers(m, f, x)};
}

// Kernel dimension and a unit kernel vector (ambient) of the manifold Hessian.
int kernel_dim(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x, double tol,
               Vec* kernel_vector = nullptr) {
  const Mat t = tangent_basis(m, x);
  const Mat h = manifold_hessian(m, f, x);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  int ker = 0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if (std::abs(es.eigenvalues()[i]) < tol) {
      if (ker == 0 && kernel_vector) *kernel_vector = t * es.eigenvectors().col(i);
      ++ker;
    }
  return ker;
}

// ---- integration ----------------------------------------------------------

using Field = std::function<Vec(double, const Vec&)>;

struct Integration {
  std::vector<double> times;
  std::vector<Vec> points;
  double energy = 0;
};

// Dormand-Prince 5(4) on (x, E) with E' = |x'|^2; x is retracted onto the
// manifold after every accepted step.
Integration dopri(const EmbeddedManifold& m, const Field& field, Vec x, double t,
                  const std::function<bool(double, const Vec&)>& done,
                  const std::function<void(const Vec&, const Vec&)>& accept, const LabOptions& o) {
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static const double a[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static const double b4[7] = {5179.0 / 57600, 0,           7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  const int n = m.ambient;
  auto rhs = [&](double tt, const Vec& y) {
    Vec out(n + 1);
    const Vec v = field(tt, y.head(n));
    out.head(n) = v;
    out[n] = v.squaredNorm();
    return out;
  };
  Integration r;
  r.times.push_back(t);
  r.points.push_back(x);
  Vec y(n + 1);
  y.head(n) = x;
  y[n] = 0;
  double h = 1e-3;
  const double tol = o.integrator_tol;
  for (int steps = 0;; ++steps) {
    if (done(t, y.head(n))) break;
    if (steps >= o.max_steps) throw StallError("no convergence after " + std::to_string(steps) + " steps");
    Vec k[7];
    for (int s = 0; s < 7; ++s) {
      Vec ys = y;
      for (int j = 0; j < s; ++j) ys += h * a[s][j] * k[j];
      k[s] = rhs(t + c[s] * h, ys);
    }
    Vec y5 = y, err = Vec::Zero(n + 1);
    for (int s = 0; s < 7; ++s) {
      y5 += h * b5[s] * k[s];
      err += h * (b5[s] - b4[s]) * k[s];
    }
    double e = 0;
    for (int i = 0; i <= n; ++i) {
      const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      e = std::max(e, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(e)) throw EscapeError("integration produced a non-finite state");
    if (e <= 1.0) {
      t += h;
      Vec xn = retract(m, y5.head(n));
      if (accept) accept(y.head(n), xn);
      y.head(n) = xn;
      y[n] = y5[n];
      r.times.push_back(t);
      r.points.push_back(xn);
    }
    const double factor = e == 0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * (1 + std::abs(t))) throw StallError("step size underflow at t = " + fmt(t));
  }
  r.energy = y[n];
  return r;
}

// ---- components -----------------------------------------------------------

double distance_to(const CriticalComponent& c, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const Vec& v : c.vertices) d = std::min(d, (v - x).norm());
  return d;
}

double min_spacing(const CriticalComponent& c) {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < c.vertices.size(); ++j)
      s = std::min(s, (c.vertices[i] - c.vertices[j]).norm());
  return s;
}

// Closed curve of critical points through x0, resampled at n points.
std::vector<Vec> trace_circle(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x0,
                              const LabOptions& o, std::vector<Vec>& traced) {
  const double h = o.trace_step;
  Vec dir;
  kernel_dim(m, f, x0, o.kernel_tol, &dir);
  traced = {x0};
  LagrangePoint p = lagrange_start(m, f, x0);
  const int max_points = 100000;
  for (int i = 0;; ++i) {
    if (i > max_points) throw NonIsolatedDegenerate("critical curve through the seed does not close");
    LagrangePoint q{p.x + h * dir, p.lambda};
    if (!lagrange_newton(m, f, q, o.newton_tol))
      throw NonIsolatedDegenerate("critical curve cannot be continued near " + fmt(p.x[0]) + ", " +
                                  fmt(p.x[1]));
    Vec next_dir;
    const int ker = kernel_dim(m, f, q.x, o.kernel_tol, &next_dir);
    if (ker != 1)
      throw NonIsolatedDegenerate("kernel dimension changes from 1 to " + std::to_string(ker) +
                                  " along a critical curve");
    if (next_dir.dot(q.x - p.x) < 0) next_dir = -next_dir;
    dir = next_dir;
    p = q;
    if (i >= 3 && (p.x - x0).norm() < h * 0.999) break;
    traced.push_back(p.x);
  }
  // canonical start: maximum of a generic linear function
  const std::size_t count = traced.size();
  std::vector<double> arc(count + 1, 0.0);
  for (std::size_t i = 1; i <= count; ++i) arc[i] = arc[i - 1] + (traced[i % count] - traced[i - 1]).norm();
  const double length = arc[count];
  const Vec l1 = generic_direction(m.ambient, false), l2 = generic_direction(m.ambient, true);
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i)
    if (l1.dot(traced[i]) > l1.dot(traced[best])) best = i;
  const double fm = l1.dot(traced[(best + count - 1) % count]), f0 = l1.dot(traced[best]),
               fp = l1.dot(traced[(best + 1) % count]);
  double offset = 0;
  const double curv = fm - 2 * f0 + fp;
  if (curv < 0) offset = 0.5 * (fm - fp) / curv * h;
  const double start = std::fmod(arc[best] + offset + length, length);
  auto at = [&](double s) {
    s = std::fmod(s + 2 * length, length);
    const std::size_t i = std::upper_bound(arc.begin(), arc.end(), s) - arc.begin() - 1;
    const std::size_t j = std::min(i, count - 1);
    const double w = (s - arc[j]) / (arc[j + 1] - arc[j]);
    Vec x = (1 - w) * traced[j] + w * traced[(j + 1) % count];
    LagrangePoint q = lagrange_start(m, f, retract(m, x));
    if (!lagrange_newton(m, f, q, o.newton_tol))
      throw NonIsolatedDegenerate("resampling a critical curve failed");
    return q.x;
  };
  const int n = o.resolution;
  // traversal direction: positive against the second generic direction
  const Vec ahead = at(start + length / n) - at(start - length / n);
  const double sense = l2.dot(ahead) >= 0 ? 1.0 : -1.0;
  std::vector<Vec> out;
  for (int k = 0; k < n; ++k) out.push_back(at(start + sense * length * k / n));
  return out;
}

void attach_unstable(const EmbeddedManifold& m, const SmoothFunction& f, CriticalComponent& c,
                     const LabOptions& o) {
  const Vec l1 = generic_direction(m.ambient, false);
  c.unstable.clear();
  for (std::size_t vi = 0; vi < c.vertices.size(); ++vi) {
    const Vec& x = c.vertices[vi];
    const Mat t = tangent_basis(m, x);
    if (c.index == m.dim() && c.dim == 0) {
      c.unstable.push_back(t);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(manifold_hessian(m, f, x));
    std::vector<Vec> cols;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()[i] <= -o.kernel_tol) cols.push_back(t * es.eigenvectors().col(i));
    Mat u(m.ambient, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) u.col(i) = cols[i];
    if (u.cols() == 1) {
      if (vi == 0) {
        if (l1.dot(u.col(0)) < 0) u = -u;
      } else if (c.unstable.back().col(0).dot(u.col(0)) < 0) {
        u = -u;
      }
    }
    c.unstable.push_back(u);
  }
  if (c.dim == 1 && c.index == 1 && c.unstable.size() > 1 &&
      c.unstable.back().col(0).dot(c.unstable.front().col(0)) < 0)
    throw LabError("unstable line bundle over " + c.id + " is not orientable");
}

int component_of(const std::vector<CriticalComponent>& cs, const Vec& x, const SmoothFunction& f) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double d = distance_to(cs[i], x);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw LabError("no critical components");
  const auto& c = cs[best];
  const double reach = c.dim == 0 ? 1e-3 : min_spacing(c);
  if (bd > reach || std::abs(f.value(x) - c.value) > 1e-6 * (1 + std::abs(c.value)))
    throw LabError("flow ended at " + fmt(x[0]) + ", " + fmt(x[1]) +
                   " away from every detected critical component");
  return best;
}

// ---- sweeps ----------------------------------------------------------------

struct Flowline {
  TrajectorySample sample;
  int target = -1;  // component index
};

struct Separatrix {
  double theta = 0;
  int saddle = -1;
  int sign = 0;  // +1 when flows just above theta leave the saddle along +e_u
};

struct Context {
  const EmbeddedManifold& m;
  const SmoothFunction& f;
  const LabOptions& o;
  std::vector<CriticalComponent>& cs;
  std::vector<TrajectorySample>& trajectories;
};

Flowline flow_from(Context& ctx, int source, const Vec& x0) {
  Flowline fl;
  fl.sample = integrate_flow(ctx.m, ctx.f, x0, ctx.o);
  fl.target = component_of(ctx.cs, fl.sample.points.back(), ctx.f);
  fl.sample.source = ctx.cs[source].id;
  fl.sample.target = ctx.cs[fl.target].id;
  return fl;
}

// Closest approach of a flow line to a point.
std::pair<double, std::size_t> closest(const TrajectorySample& s, const Vec& p) {
  double d = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const double di = (s.points[i] - p).norm();
    if (di < d) {
      d = di;
      at = i;
    }
  }
  return {d, at};
}

int exit_side(const TrajectorySample& s, const CriticalComponent& saddle) {
  const Vec& p = saddle.vertices[0];
  const auto [d, at] = closest(s, p);
  for (std::size_t i = at; i < s.points.size(); ++i) {
    const Vec off = s.points[i] - p;
    if (off.norm() > 0.05) return saddle.unstable[0].col(0).dot(off) > 0 ? 1 : -1;
  }
  const Vec off = s.points.back() - p;
  return saddle.unstable[0].col(0).dot(off) > 0 ? 1 : -1;
}

struct UnstableCircle {
  std::vector<double> theta;
  std::vector<Flowline> flows;
  std::vector<Separatrix> separatrices;  // sorted by theta
};

UnstableCircle sweep_circle(Context& ctx, int alpha) {
  const auto& c = ctx.cs[alpha];
  const Vec& p = c.vertices[0];
  const Mat& u = c.unstable[0];
  const int n = ctx.o.resolution;
  auto start = [&](double th) {
    return retract(ctx.m, p + ctx.o.start_offset * (std::cos(th) * u.col(0) + std::sin(th) * u.col(1)));
  };
  UnstableCircle uc;
  uc.theta.resize(n);
  uc.flows.resize(n);
  for (int k = 0; k < n; ++k) uc.theta[k] = 2 * kPi * k / n;
  parallel_for(n, [&](std::size_t k) { uc.flows[k] = flow_from(ctx, alpha, start(uc.theta[k])); });
  for (const auto& fl : uc.flows) ctx.trajectories.push_back(fl.sample);

  for (int k = 0; k < n; ++k) {
    const Flowline& a = uc.flows[k];
    const Flowline& b = uc.flows[(k + 1) % n];
    if (a.target == b.target) continue;
    double lo = uc.theta[k], hi = uc.theta[k] + 2 * kPi / n;
    Flowline flo = a, fhi = b;
    std::optional<double> hit;
    while (hi - lo > ctx.o.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      Flowline fm = flow_from(ctx, alpha, start(mid));
      ctx.trajectories.push_back(fm.sample);
      if (ctx.cs[fm.target].index == 1 && ctx.cs[fm.target].dim == 0) {
        hit = mid;
        break;
      }
      if (fm.target == flo.target) {
        lo = mid;
        flo = std::move(fm);
      } else {
        hi = mid;
        fhi = std::move(fm);
      }
    }
    // the saddle both neighbours pass closest to
    int saddle = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ctx.cs.size(); ++i) {
      const auto& s = ctx.cs[i];
      if (s.index != 1 || s.dim != 0) continue;
      const double d = std::max(closest(flo.sample, s.vertices[0]).first,
                                closest(fhi.sample, s.vertices[0]).first);
      if (d < best) {
        best = d;
        saddle = static_cast<int>(i);
      }
    }
    if (saddle < 0 || best > 1e-2)
      throw ResolutionTooCoarse("separatrix of " + c.id + " near angle " + fmt(lo) +
                                " does not isolate a saddle point");
    Separatrix s;
    s.theta = hit ? *hit : 0.5 * (lo + hi);
    s.saddle = saddle;
    s.sign = exit_side(fhi.sample, ctx.cs[saddle]);
    if (exit_side(flo.sample, ctx.cs[saddle]) != -s.sign)
      throw ResolutionTooCoarse("flows on both sides of a separatrix of " + c.id +
                                " leave " + ctx.cs[saddle].id + " on the same side");
    uc.separatrices.push_back(s);
  }
  return uc;
}

SimplicialComplex circle_complex(int first, int n, int sign, std::vector<Simplex>& cells,
                                 std::vector<int>& orientation) {
  for (int i = 0; i < n; ++i) {
    cells.push_back({first + i, first + (i + 1) % n});
    orientation.push_back(sign);
  }
  return {};
}

int snap(const CriticalComponent& c, const Vec& x, const LabOptions& o) {
  if (c.dim == 0) return 0;
  const double tol = o.snap_tol > 0 ? o.snap_tol : 0.5 * min_spacing(c);
  int found = -1;
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    if ((c.vertices[i] - x).norm() <= tol) {
      if (found >= 0)
        throw ResolutionTooCoarse("endpoint " + fmt(x[0]) + ", " + fmt(x[1]) +
                                  " is within snap tolerance of two vertices of " + c.id);
      found = static_cast<int>(i);
    }
  }
  if (found < 0)
    throw ResolutionTooCoarse("endpoint " + fmt(x[0]) + ", " + fmt(x[1]) + " snaps to no vertex of " + c.id);
  return found;
}

// Working copy of one moduli space while the sweeps run.
struct Draft {
  int source = -1, target = -1;
  std::size_t vertices = 0;
  std::vector<Simplex> cells;
  std::vector<int> orientation;
  VertexMap pi_minus, pi_plus;
  std::map<int, std::vector<std::array<int, 3>>> strata;  // by gamma component
  // arcs: edge ranges and their end triples, oriented after assembly
  struct Arc {
    std::size_t first_edge = 0, edges = 0;
    int gamma_low = -1, gamma_high = -1;
    std::array<int, 3> low{}, high{};
  };
  std::vector<Arc> arcs;
  std::vector<int> point_signs;  // 0-dimensional spaces
};

}  // namespace

// ---- public geometry ------------------------------------------------------

SmoothFunction quadratic_function(std::string name, Mat q, Vec b) {
  Mat sym = 0.5 * (q + q.transpose());
  SmoothFunction f;
  f.name = std::move(name);
  f.value = [sym, b](const Vec& x) { return x.dot(sym * x) + b.dot(x); };
  f.gradient = [sym, b](const Vec& x) -> Vec { return 2 * sym * x + b; };
  f.hessian = [sym](const Vec&) -> Mat { return 2 * sym; };
  return f;
}

SmoothFunction interpolate(const SmoothFunction& f0, const SmoothFunction& f1, double s) {
  SmoothFunction f;
  f.name = f0.name + "~" + f1.name;
  f.value = [f0, f1, s](const Vec& x) { return (1 - s) * f0.value(x) + s * f1.value(x); };
  f.gradient = [f0, f1, s](const Vec& x) -> Vec { return (1 - s) * f0.gradient(x) + s * f1.gradient(x); };
  f.hessian = [f0, f1, s](const Vec& x) -> Mat { return (1 - s) * f0.hessian(x) + s * f1.hessian(x); };
  return f;
}

namespace {
SmoothFunction unit_norm_constraint(int n) {
  SmoothFunction c;
  c.name = "|x|^2 - 1";
  c.value = [](const Vec& x) { return x.squaredNorm() - 1; };
  c.gradient = [](const Vec& x) -> Vec { return 2 * x; };
  c.hessian = [n](const Vec&) -> Mat { return 2 * Mat::Identity(n, n); };
  return c;
}
}  // namespace

EmbeddedManifold sphere() {
  EmbeddedManifold m{"S2", 3, {unit_norm_constraint(3)}, {}};
  m.chart = [](double a, double b, double) {
    const double z = 2 * a - 1, r = std::sqrt(std::max(0.0, 1 - z * z)), phi = 2 * kPi * b;
    Vec x(3);
    x << r * std::cos(phi), r * std::sin(phi), z;
    return x;
  };
  return m;
}

EmbeddedManifold circle() {
  EmbeddedManifold m{"S1", 2, {unit_norm_constraint(2)}, {}};
  m.chart = [](double a, double, double) {
    Vec x(2);
    x << std::cos(2 * kPi * a), std::sin(2 * kPi * a);
    return x;
  };
  return m;
}

EmbeddedManifold torus(double big_r, double small_r) {
  SmoothFunction c;
  c.name = "torus";
  c.value = [=](const Vec& x) {
    const double rho = std::hypot(x[0], x[1]);
    return (rho - big_r) * (rho - big_r) + x[2] * x[2] - small_r * small_r;
  };
  c.gradient = [=](const Vec& x) -> Vec {
    const double rho = std::hypot(x[0], x[1]), d = rho - big_r;
    Vec g(3);
    g << 2 * d * x[0] / rho, 2 * d * x[1] / rho, 2 * x[2];
    return g;
  };
  c.hessian = [=](const Vec& x) -> Mat {
    const double rho = std::hypot(x[0], x[1]), d = rho - big_r, r2 = rho * rho, r3 = r2 * rho;
    Mat h = Mat::Zero(3, 3);
    h(0, 0) = 2 * (x[0] * x[0] / r2 + d * x[1] * x[1] / r3);
    h(1, 1) = 2 * (x[1] * x[1] / r2 + d * x[0] * x[0] / r3);
    h(0, 1) = h(1, 0) = 2 * (x[0] * x[1] / r2 - d * x[0] * x[1] / r3);
    h(2, 2) = 2;
    return h;
  };
  EmbeddedManifold m{"T2", 3, {c}, {}};
  m.chart = [=](double a, double b, double) {
    const double u = 2 * kPi * a, v = 2 * kPi * b, w = big_r + small_r * std::cos(v);
    Vec x(3);
    x << w * std::cos(u), w * std::sin(u), small_r * std::sin(v);
    return x;
  };
  return m;
}

Vec constraint_values(const EmbeddedManifold& m, const Vec& x) {
  Vec v(m.constraints.size());
  for (std::size_t i = 0; i < m.constraints.size(); ++i) v[i] = m.constraints[i].value(x);
  return v;
}

Mat constraint_normals(const EmbeddedManifold& m, const Vec& x) {
  Mat n(m.ambient, static_cast<Eigen::Index>(m.constraints.size()));
  for (std::size_t i = 0; i < m.constraints.size(); ++i) n.col(i) = m.constraints[i].gradient(x);
  return n;
}

Mat tangent_basis(const EmbeddedManifold& m, const Vec& x) {
  const Mat n = constraint_normals(m, x);
  const int k = static_cast<int>(n.cols()), d = m.ambient - k;
  Eigen::JacobiSVD<Mat> svd(n, Eigen::ComputeFullU);
  Mat t = svd.matrixU().rightCols(d);
  Mat frame(m.ambient, m.ambient);
  frame << n, t;
  if (d > 0 && frame.determinant() < 0) t.col(d - 1) = -t.col(d - 1);
  return t;
}

Vec retract(const EmbeddedManifold& m, const Vec& x) {
  Vec y = x;
  for (int it = 0; it < 50; ++it) {
    const Vec c = constraint_values(m, y);
    if (!y.allFinite()) break;
    if (c.norm() < 1e-14) return y;
    const Mat n = constraint_normals(m, y);
    y -= n * gram_inverse_times(n, c);
  }
  if (y.allFinite() && constraint_values(m, y).norm() < 1e-12) return y;
  throw EscapeError("point left the region where " + m.name + " can be projected onto");
}

Vec manifold_gradient(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x) {
  return project_tangent(constraint_normals(m, x), f.gradient(x));
}

Mat manifold_hessian(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x) {
  const Vec lambda = lagrange_multipliers(m, f, x);
  Mat h = f.hessian(x);
  for (std::size_t i = 0; i < m.constraints.size(); ++i) h += lambda[i] * m.constraints[i].hessian(x);
  const Mat t = tangent_basis(m, x);
  return t.transpose() * h * t;
}

// ---- critical sets ---------------------------------------------------------

std::vector<CriticalComponent> find_critical_manifolds(const EmbeddedManifold& m,
                                                       const SmoothFunction& f,
                                                       const LabOptions& o) {
  if (!(o.newton_tol > 0)) throw LabError("Newton tolerance must be positive");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> seeds;
  for (int i = 0; i < o.seeds; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    seeds.push_back(m.chart(a, b, c));
  }
  std::vector<std::optional<Vec>> converged(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    LagrangePoint p = lagrange_start(m, f, seeds[i]);
    if (lagrange_newton(m, f, p, o.newton_tol)) converged[i] = p.x;
  });

  std::vector<CriticalComponent> cs;
  std::vector<std::vector<Vec>> traces;
  for (const auto& x : converged) {
    if (!x) continue;
    const int ker = kernel_dim(m, f, *x, o.kernel_tol);
    bool placed = false;
    for (std::size_t i = 0; i < cs.size() && !placed; ++i) {
      if (cs[i].dim == 0 && (cs[i].vertices[0] - *x).norm() < std::max(o.cluster_tol, 1e-6)) placed = true;
      if (cs[i].dim == 1)
        for (const Vec& y : traces[i])
          if ((y - *x).norm() < o.trace_step) {
            placed = true;
            break;
          }
      if (placed) {
        if (ker != cs[i].dim)
          throw NonIsolatedDegenerate("kernel dimension " + std::to_string(ker) + " at a point of a " +
                                      std::to_string(cs[i].dim) + "-dimensional critical component");
        cs[i].witnesses.push_back(*x);
      }
    }
    if (placed) continue;
    CriticalComponent c;
    c.dim = ker;
    c.value = f.value(*x);
    c.witnesses.push_back(*x);
    std::vector<Vec> trace;
    if (ker == 0) {
      c.vertices.push_back(*x);
    } else if (ker == 1) {
      c.vertices = trace_circle(m, f, *x, o, trace);
    } else {
      throw NonIsolatedDegenerate("critical component of dimension " + std::to_string(ker) +
                                  " is beyond the lab's scope");
    }
    cs.push_back(std::move(c));
    traces.push_back(std::move(trace));
  }
  if (cs.empty()) throw LabError("no seed converged to a critical point");
  for (auto& c : cs) c.index = normal_index(c, f, m, o);
  std::sort(cs.begin(), cs.end(), [](const CriticalComponent& a, const CriticalComponent& b) {
    if (a.index != b.index) return a.index > b.index;
    if (a.value != b.value) return a.value > b.value;
    return std::lexicographical_compare(a.vertices[0].data(), a.vertices[0].data() + a.vertices[0].size(),
                                        b.vertices[0].data(), b.vertices[0].data() + b.vertices[0].size());
  });
  std::map<int, int> per_index;
  for (auto& c : cs) {
    c.id = "c" + std::to_string(c.index) + "_" + std::to_string(per_index[c.index]++);
    attach_unstable(m, f, c, o);
  }
  return cs;
}

int normal_index(const CriticalComponent& c, const SmoothFunction& f, const EmbeddedManifold& m,
                 const LabOptions& o) {
  std::vector<Vec> points;
  for (const Vec& v : c.vertices)
    if (points.size() < 3) points.push_back(v);
  for (const Vec& w : c.witnesses)
    if (points.size() < 5) points.push_back(w);
  int index = -1;
  for (const Vec& x : points) {
    int ker = 0;
    const int neg = count_negative(manifold_hessian(m, f, x), o.kernel_tol, &ker);
    if (ker != c.dim)
      throw NonIsolatedDegenerate("Hessian kernel of dimension " + std::to_string(ker) + " on a " +
                                  std::to_string(c.dim) + "-dimensional component");
    if (index >= 0 && neg != index)
      throw IndexInconsistent("normal index " + std::to_string(neg) + " differs from " +
                              std::to_string(index) + " on one component");
    index = neg;
  }
  return index;
}

TrajectorySample integrate_flow(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x0,
                                const LabOptions& o) {
  TrajectorySample s;
  const Vec start = retract(m, x0);
  if (manifold_gradient(m, f, start).norm() < o.end_tol) {
    s.stationary = true;
    s.times = {0.0};
    s.points = {start};
    s.values = {f.value(start)};
    return s;
  }
  Field field = [&](double, const Vec& x) -> Vec { return -manifold_gradient(m, f, x); };
  auto done = [&](double, const Vec& x) { return manifold_gradient(m, f, x).norm() < o.end_tol; };
  auto accept = [&](const Vec& before, const Vec& after) {
    if (!(f.value(after) < f.value(before)))
      throw StallError("f stopped decreasing along the flow at " + fmt(after[0]) + ", " + fmt(after[1]));
  };
  Integration r = dopri(m, field, start, 0.0, done, accept, o);
  s.times = std::move(r.times);
  s.points = std::move(r.points);
  for (const Vec& p : s.points) s.values.push_back(f.value(p));
  s.energy = r.energy;
  return s;
}

// ---- flow category -----------------------------------------------------------

LabResult build_fcd(const EmbeddedManifold& m, const SmoothFunction& f, const LabOptions& o,
                    const std::string& name) {
  LabResult result;
  result.criticals = find_critical_manifolds(m, f, o);
  auto& cs = result.criticals;
  Context ctx{m, f, o, cs, result.trajectories};
  const int count = static_cast<int>(cs.size());

  std::map<std::pair<int, int>, Draft> drafts;
  auto draft = [&](int a, int b) -> Draft& {
    Draft& d = drafts[{a, b}];
    d.source = a;
    d.target = b;
    return d;
  };
  // branch sign -> (target, point index) for saddle points
  std::map<std::pair<int, int>, std::pair<int, int>> branch;

  // index-1 points and circles: two branches
  for (int a = 0; a < count; ++a) {
    const auto& c = cs[a];
    if (c.index != 1) continue;
    const int n = static_cast<int>(c.vertices.size());
    for (int side : {1, -1}) {
      std::vector<Flowline> flows(n);
      parallel_for(n, [&](std::size_t i) {
        const Vec x0 = c.vertices[i] + side * o.start_offset * c.unstable[i].col(0);
        flows[i] = flow_from(ctx, a, retract(m, x0));
      });
      for (const auto& fl : flows) result.trajectories.push_back(fl.sample);
      const int target = flows[0].target;
      for (const auto& fl : flows)
        if (fl.target != target)
          throw LabError("flows from " + c.id + " on one side end in different components");
      if (cs[target].index >= c.index)
        throw LabError("flow from " + c.id + " ends at " + cs[target].id + " of no lower index");
      Draft& d = draft(a, target);
      const int first = static_cast<int>(d.vertices);
      if (c.dim == 0) {
        d.cells.push_back({first});
        d.orientation.push_back(side);
        d.pi_minus.push_back(0);
        d.pi_plus.push_back(snap(cs[target], flows[0].sample.points.back(), o));
        d.vertices += 1;
        branch[{a, side}] = {target, first};
      } else {
        circle_complex(first, n, side, d.cells, d.orientation);
        for (int i = 0; i < n; ++i) {
          d.pi_minus.push_back(i);
          d.pi_plus.push_back(snap(cs[target], flows[i].sample.points.back(), o));
        }
        d.vertices += n;
      }
    }
  }

  // index-2 points on surfaces: sweep the unstable circle
  std::map<int, int> incoming;  // saddle -> separatrices ending there
  for (int a = 0; a < count; ++a) {
    const auto& c = cs[a];
    if (c.index < 2) continue;
    if (c.index != 2 || c.dim != 0)
      throw LabError(c.id + ": only isolated index-2 points are swept (desk-scale scope)");
    UnstableCircle uc = sweep_circle(ctx, a);
    const int n = static_cast<int>(uc.theta.size());
    if (uc.separatrices.empty()) {
      const int target = uc.flows[0].target;
      if (cs[target].index != 0) throw LabError("flows from " + c.id + " end at " + cs[target].id);
      Draft& d = draft(a, target);
      const int first = static_cast<int>(d.vertices);
      circle_complex(first, n, 1, d.cells, d.orientation);
      for (int i = 0; i < n; ++i) {
        d.pi_minus.push_back(0);
        d.pi_plus.push_back(snap(cs[target], uc.flows[i].sample.points.back(), o));
      }
      d.vertices += n;
      continue;
    }
    // points of M(alpha, saddle)
    std::vector<int> point_of(uc.separatrices.size());
    for (std::size_t s = 0; s < uc.separatrices.size(); ++s) {
      const auto& sep = uc.separatrices[s];
      Draft& d = draft(a, sep.saddle);
      point_of[s] = static_cast<int>(d.vertices);
      d.cells.push_back({point_of[s]});
      d.orientation.push_back(sep.sign);
      d.pi_minus.push_back(0);
      d.pi_plus.push_back(0);
      d.vertices += 1;
      ++incoming[sep.saddle];
    }
    // arcs between consecutive separatrices
    const std::size_t ns = uc.separatrices.size();
    for (std::size_t s = 0; s < ns; ++s) {
      const Separatrix& low = uc.separatrices[s];
      const Separatrix& high = uc.separatrices[(s + 1) % ns];
      const double t0 = low.theta, t1 = high.theta + (s + 1 == ns ? 2 * kPi : 0);
      std::vector<int> inside;
      for (int k = 0; k < n; ++k) {
        double th = uc.theta[k];
        if (th < t0) th += 2 * kPi;
        if (th > t0 && th < t1) inside.push_back(k);
      }
      std::sort(inside.begin(), inside.end(), [&](int x, int y) {
        auto key = [&](int k) { return uc.theta[k] < t0 ? uc.theta[k] + 2 * kPi : uc.theta[k]; };
        return key(x) < key(y);
      });
      if (inside.empty())
        throw ResolutionTooCoarse("two separatrices of " + c.id + " between adjacent sweep samples");
      const int target = uc.flows[inside[0]].target;
      for (int k : inside)
        if (uc.flows[k].target != target)
          throw ResolutionTooCoarse("an arc of the unstable circle of " + c.id + " has two end components");
      const auto low_branch = branch.find({low.saddle, low.sign});
      const auto high_branch = branch.find({high.saddle, -high.sign});
      if (low_branch == branch.end() || high_branch == branch.end() ||
          low_branch->second.first != target || high_branch->second.first != target)
        throw ResolutionTooCoarse("broken trajectories at the ends of an arc of " + c.id +
                                  " do not reach its end component");
      if (cs[target].dim != 0) throw LabError("arcs ending on critical circles are beyond the lab's scope");
      Draft& d = draft(a, target);
      const int first = static_cast<int>(d.vertices);
      const int len = static_cast<int>(inside.size()) + 2;
      Draft::Arc arc;
      arc.first_edge = d.cells.size();
      arc.edges = len - 1;
      for (int i = 0; i + 1 < len; ++i) {
        d.cells.push_back({first + i, first + i + 1});
        d.orientation.push_back(1);
      }
      for (int i = 0; i < len; ++i) {
        d.pi_minus.push_back(0);
        d.pi_plus.push_back(0);
      }
      d.vertices += len;
      arc.gamma_low = low.saddle;
      arc.gamma_high = high.saddle;
      arc.low = {point_of[s], low_branch->second.second, first};
      arc.high = {point_of[(s + 1) % ns], high_branch->second.second, first + len - 1};
      d.strata[low.saddle].push_back(arc.low);
      d.strata[high.saddle].push_back(arc.high);
      d.arcs.push_back(arc);
    }
  }
  if (m.dim() == 2)
    for (int k = 0; k < count; ++k)
      if (cs[k].index == 1 && cs[k].dim == 0 && incoming[k] != 2)
        throw ResolutionTooCoarse(std::to_string(incoming[k]) + " separatrices reach " + cs[k].id +
                                  ", expected 2; raise the resolution");

  // assemble
  FlowCategory& fc = result.category;
  fc.name = name;
  for (const auto& c : cs)
    fc.criticals.push_back({c.id, c.index, c.dim, c.dim == 0 ? point_complex() : polygon(o.resolution)});
  for (auto& [key, d] : drafts) {
    ModuliSpace ms;
    ms.source = cs[d.source].id;
    ms.target = cs[d.target].id;
    ms.complex = SimplicialComplex::from_maximal(d.vertices, d.cells, d.orientation);
    ms.pi_minus = d.pi_minus;
    ms.pi_plus = d.pi_plus;
    for (auto& [gamma, triples] : d.strata) {
      std::sort(triples.begin(), triples.end());
      ms.strata.push_back({cs[gamma].id, triples});
    }
    fc.moduli.push_back(std::move(ms));
  }

  // orientation resolution: each arc is oriented so that its two ends agree
  // with the signed broken trajectories
  for (auto& [key, d] : drafts) {
    if (d.arcs.empty()) continue;
    const std::size_t mi = std::distance(drafts.begin(), drafts.find(key));
    ModuliSpace& ms = fc.moduli[mi];
    const int sigma = stratum_sign(fc, ms);
    auto end_sign = [&](int gamma, const std::array<int, 3>& t) {
      const ModuliSpace* left = fc.moduli_between(ms.source, cs[gamma].id);
      const ModuliSpace* right = fc.moduli_between(cs[gamma].id, ms.target);
      FiberProductResult fp = stratum_fiber_product(fc, *left, *right);
      const int id = t[0] * static_cast<int>(fp.right_bound) + t[1];
      auto found = fp.complex.find({id});
      if (!found) throw LabError("broken trajectory missing from the fiber product");
      return fp.complex.orientation()[*found];
    };
    std::vector<int> signs = d.orientation;
    for (const auto& arc : d.arcs) {
      const int cl = end_sign(arc.gamma_low, arc.low), ch = end_sign(arc.gamma_high, arc.high);
      if (cl != -ch)
        throw LabError("orientation resolution failed: both ends of an arc from " + ms.source + " to " +
                       ms.target + " carry the same sign");
      for (std::size_t e = 0; e < arc.edges; ++e) signs[arc.first_edge + e] = sigma * ch;
    }
    ms.complex = SimplicialComplex::from_maximal(d.vertices, d.cells, signs);
  }

  const ValidationReport report = validate(fc);
  if (!report) throw LabError("emitted category fails validation: " + report.first_failure());
  return result;
}

std::optional<ModuliSpace> build_moduli(const LabResult& r, const std::string& alpha,
                                        const std::string& beta) {
  if (const ModuliSpace* ms = r.category.moduli_between(alpha, beta)) return *ms;
  return std::nullopt;
}

// ---- transitions -------------------------------------------------------------

double Schedule::s(double t) const {
  if (knots.empty()) return 0;
  if (t <= 0) return knots.front();
  if (t >= duration()) return knots.back();
  const std::size_t j = static_cast<std::size_t>(t);
  const double u = t - j, w = u * u * u * (10 - 15 * u + 6 * u * u);
  return knots[j] + (knots[j + 1] - knots[j]) * w;
}

double Schedule::ds(double t) const {
  if (knots.empty() || t <= 0 || t >= duration()) return 0;
  const std::size_t j = static_cast<std::size_t>(t);
  const double u = t - j;
  return (knots[j + 1] - knots[j]) * 30 * u * u * (1 - u) * (1 - u);
}

namespace {

Vec family_gradient(const EmbeddedManifold& m, const SmoothFunction& f0, const SmoothFunction& f1,
                    double s, const Vec& x) {
  return project_tangent(constraint_normals(m, x), (1 - s) * f0.gradient(x) + s * f1.gradient(x));
}

}  // namespace

TransitionData build_transition(const std::string& name, const EmbeddedManifold& m,
                                const SmoothFunction& f0, const SmoothFunction& f1,
                                const Schedule& schedule, const LabResult& a, const LabResult& b,
                                std::shared_ptr<const FlowCategory> source,
                                std::shared_ptr<const FlowCategory> target, const LabOptions& o,
                                std::vector<TransitionSample>* samples) {
  const double s_end = schedule.knots.back();
  const SmoothFunction f_end = interpolate(f0, f1, s_end);
  const SmoothFunction f_start = interpolate(f0, f1, schedule.knots.front());
  const int top = m.dim();
  auto has_middle = [&](const LabResult& r) {
    for (const auto& c : r.criticals)
      if (c.index > 0 && c.index < top) return true;
    return false;
  };
  if (has_middle(a) && has_middle(b))
    throw LabError("transitions between intermediate indices on both sides are beyond the lab's scope");
  for (const auto* r : {&a, &b})
    for (const auto& c : r->criticals)
      if (c.dim != 0) throw LabError("transitions are computed between isolated critical points only");

  TransitionData t;
  t.name = name;
  t.source = std::move(source);
  t.target = std::move(target);
  t.shift = 0;
  const double duration = schedule.duration();
  auto add = [&](const std::string& from, const std::string& to) {
    for (auto& tm : t.moduli)
      if (tm.source == from && tm.target == to) {
        throw LabError("two transition trajectories from " + from + " to " + to);
      }
    t.moduli.push_back({from, to, point_complex(), {0}, {0}, {}});
  };
  std::vector<TransitionSample> local;
  // minima forward
  for (const auto& c : a.criticals) {
    if (c.index != 0) continue;
    Field field = [&](double tt, const Vec& x) -> Vec {
      return -family_gradient(m, f0, f1, schedule.s(tt), x);
    };
    auto done = [&](double tt, const Vec& x) {
      return tt >= duration && manifold_gradient(m, f_end, x).norm() < o.end_tol;
    };
    Integration r = dopri(m, field, c.vertices[0], 0.0, done, nullptr, o);
    const int end = component_of(b.criticals, r.points.back(), f_end);
    const auto& e = b.criticals[end];
    if (e.index != 0) throw LabError("forward shot from " + c.id + " ends at " + e.id + " of index " +
                                     std::to_string(e.index));
    add(c.id, e.id);
    local.push_back({r.times, r.points, c.id, e.id});
  }
  // maxima backward
  for (const auto& c : b.criticals) {
    if (c.index != top) continue;
    Field field = [&](double tau, const Vec& x) -> Vec {
      return family_gradient(m, f0, f1, schedule.s(duration - tau), x);
    };
    auto done = [&](double tau, const Vec& x) {
      return tau >= duration && manifold_gradient(m, f_start, x).norm() < o.end_tol;
    };
    Integration r = dopri(m, field, c.vertices[0], 0.0, done, nullptr, o);
    const int end = component_of(a.criticals, r.points.back(), f_start);
    const auto& e = a.criticals[end];
    if (e.index != top) throw LabError("backward shot from " + c.id + " ends at " + e.id + " of index " +
                                       std::to_string(e.index));
    add(e.id, c.id);
    std::vector<double> times;
    for (double tau : r.times) times.push_back(duration - tau);
    std::reverse(times.begin(), times.end());
    std::reverse(r.points.begin(), r.points.end());
    local.push_back({times, r.points, e.id, c.id});
  }
  std::sort(t.moduli.begin(), t.moduli.end(), [](const TransitionModuli& x, const TransitionModuli& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  });
  if (samples) samples->insert(samples->end(), local.begin(), local.end());
  const ValidationReport report = validate_transition(t);
  if (!report) throw LabError("transition " + name + " fails validation: " + report.first_failure());
  return t;
}

HomotopyData build_homotopy(const std::string& name, TransitionData glued, const LabResult& a) {
  for (const auto& x : a.criticals)
    for (const auto& y : a.criticals)
      if (y.index == x.index + 1 + glued.shift)
        throw LabError("homotopy " + name + " needs one-parameter families from " + x.id + " to " + y.id +
                       ", which the lab does not compute");
  return {name, std::move(glued), {}};
}

ComparisonData build_comparison(const EmbeddedManifold& m, const SmoothFunction& f0,
                                const SmoothFunction& f1, const LabResult& a, const LabResult& b,
                                const LabOptions& o) {
  ComparisonData out;
  out.a = std::make_shared<FlowCategory>(a.category);
  out.b = std::make_shared<FlowCategory>(b.category);
  // f_s = (1 - s) f0 + s f1 throughout; the backward map runs s from 1 to 0
  TransitionData fwd = build_transition("forward", m, f0, f1, {{0.0, 1.0}}, a, b, out.a, out.b, o, &out.samples);
  TransitionData bwd = build_transition("backward", m, f0, f1, {{1.0, 0.0}}, b, a, out.b, out.a, o, &out.samples);
  TransitionData glued =
      build_transition("glued", m, f0, f1, {{0.0, 1.0, 0.0}}, a, a, out.a, out.a, o, &out.samples);
  TransitionData identity = identity_transition(out.a);
  identity.name = "identity";
  out.file.transitions = {fwd, bwd, glued, identity};
  out.file.homotopies = {build_homotopy("glue_fwd_bwd", glued, a),
                         build_homotopy("glue_to_identity", identity, a)};
  out.file.protocol = {{"forward", "forward"},
                       {"backward", "backward"},
                       {"glue_fwd_bwd", "glue_fwd_bwd"},
                       {"glue_to_identity", "glue_to_identity"}};
  return out;
}

}  // namespace floer::lab
