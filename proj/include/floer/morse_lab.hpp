#pragma once

// Finite-dimensional gradient flows that generate flow-category data.

#include "floer/continuation.hpp"
#include "floer/flow_category.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace floer::lab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A scalar function on the ambient space with its derivatives.
struct SmoothFunction {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

/// x^T q x + b . x
SmoothFunction quadratic_function(std::string name, Mat q, Vec b);
/// (1 - s) f0 + s f1
SmoothFunction interpolate(const SmoothFunction& f0, const SmoothFunction& f1, double s);

/// Zero set of the constraints in R^ambient. Oriented by the constraint
/// gradients: a frame (n_1, ..., n_k, t_1, ..., t_d) is positive in R^ambient
/// exactly when (t_1, ..., t_d) is positive on the manifold.
struct EmbeddedManifold {
  std::string name;
  int ambient = 0;
  std::vector<SmoothFunction> constraints;
  /// A point of the manifold from three uniform numbers in [0, 1).
  std::function<Vec(double, double, double)> chart;

  int dim() const { return ambient - static_cast<int>(constraints.size()); }
};

EmbeddedManifold sphere();                        // unit S^2 in R^3
EmbeddedManifold torus(double big_r, double small_r);  // axis z, lying flat
EmbeddedManifold circle();                        // unit S^1 in R^2

/// Constraint values and the ambient x k matrix of their gradients.
Vec constraint_values(const EmbeddedManifold& m, const Vec& x);
Mat constraint_normals(const EmbeddedManifold& m, const Vec& x);
/// Oriented orthonormal basis of the tangent space, as columns.
Mat tangent_basis(const EmbeddedManifold& m, const Vec& x);
/// Newton projection along the normals; throws EscapeError when it fails.
Vec retract(const EmbeddedManifold& m, const Vec& x);
/// Gradient of f along the manifold.
Vec manifold_gradient(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x);
/// Hessian of f on the manifold at a critical point, in tangent_basis coordinates.
Mat manifold_hessian(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x);

struct LabOptions {
  double newton_tol = 1e-10;
  int seeds = 100;
  unsigned long long seed = 1;
  double kernel_tol = 1e-6;        // Hessian eigenvalues below this count as kernel
  double cluster_tol = 1e-6;
  double trace_step = 0.02;        // arclength step when tracing critical circles
  int resolution = 24;             // vertices on critical circles and unstable circles
  double integrator_tol = 1e-9;
  double end_tol = 1e-6;           // a flow stops once |grad f| is below this
  double start_offset = 1e-4;      // distance from the critical point along unstable directions
  double bisection_tol = 1e-11;    // angle width at which separatrix bisection stops
  int max_steps = 200000;
  double snap_tol = 0;             // 0: half the minimum vertex spacing
};

/// A connected component of the critical set, triangulated.
struct CriticalComponent {
  std::string id;
  int dim = 0;
  int index = 0;
  double value = 0;
  std::vector<Vec> vertices;       // 1 point, or an n-gon in traversal order
  std::vector<Vec> witnesses;      // converged seeds on the component
  /// Per vertex, unstable normal directions (ambient x index), oriented.
  std::vector<Mat> unstable;
};

/// Newton refinement of random seeds, clustering, dimension by the Hessian
/// kernel, circles traced and resampled. Throws NonIsolatedDegenerate.
std::vector<CriticalComponent> find_critical_manifolds(const EmbeddedManifold& m,
                                                       const SmoothFunction& f,
                                                       const LabOptions& o = {});

/// Number of negative eigenvalues of the Hessian normal to the component,
/// compared at up to five witness points. Throws IndexInconsistent.
int normal_index(const CriticalComponent& c, const SmoothFunction& f, const EmbeddedManifold& m,
                 const LabOptions& o = {});

struct TrajectorySample {
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<double> values;      // f at the points
  double energy = 0;               // integral of |grad f|^2
  bool stationary = false;
  std::string source;              // critical ids, filled by the sweeps
  std::string target;
};

/// Adaptive Dormand-Prince integration of x' = -grad f on the manifold until
/// |grad f| < end_tol. Throws EscapeError or StallError.
TrajectorySample integrate_flow(const EmbeddedManifold& m, const SmoothFunction& f, const Vec& x0,
                                const LabOptions& o = {});

struct LabResult {
  FlowCategory category;
  std::vector<CriticalComponent> criticals;
  std::vector<TrajectorySample> trajectories;
};

/// Criticals, sweeps and moduli spaces for a function on a surface or curve.
/// The emitted category passes validate.
LabResult build_fcd(const EmbeddedManifold& m, const SmoothFunction& f, const LabOptions& o = {},
                    const std::string& name = "lab");

/// The moduli space from alpha to beta inside a built result (nullopt when
/// there are no trajectories).
std::optional<ModuliSpace> build_moduli(const LabResult& r, const std::string& alpha,
                                        const std::string& beta);

// ---- transitions --------------------------------------------------------

/// Time-dependent family f_{s(t)}, s running through `knots` (linearly
/// interpolated in s, smoothed in t).
struct Schedule {
  std::vector<double> knots;       // values of s at t = 0, 1, 2, ...
  double s(double t) const;
  double ds(double t) const;
  double duration() const { return static_cast<double>(knots.size()) - 1; }
};

struct TransitionSample {
  std::vector<double> times;
  std::vector<Vec> points;
  std::string source;
  std::string target;
};

/// 0-dimensional transition spaces by shooting: minima forward from the
/// source, maxima backward from the target. Throws LabError for pairs the
/// lab cannot resolve (equal intermediate indices on both sides).
TransitionData build_transition(const std::string& name, const EmbeddedManifold& m,
                                const SmoothFunction& f0, const SmoothFunction& f1,
                                const Schedule& schedule, const LabResult& a, const LabResult& b,
                                std::shared_ptr<const FlowCategory> source,
                                std::shared_ptr<const FlowCategory> target,
                                const LabOptions& o = {},
                                std::vector<TransitionSample>* samples = nullptr);

/// Homotopy data between the composite of a forward/backward pair and the
/// glued transition; its interpolating spaces have dimension
/// dim S + mu_A - mu_B + 1, which vanishes only for index jumps the Morse
/// data here cannot contain. Throws LabError when such pairs exist.
HomotopyData build_homotopy(const std::string& name, TransitionData glued, const LabResult& a);

/// Forward, backward, glued and identity data between two functions on one
/// manifold, with the protocol roles filled in.
struct ComparisonData {
  std::shared_ptr<const FlowCategory> a;
  std::shared_ptr<const FlowCategory> b;
  TransitionFile file;
  std::vector<TransitionSample> samples;
};
ComparisonData build_comparison(const EmbeddedManifold& m, const SmoothFunction& f0,
                                const SmoothFunction& f1, const LabResult& a, const LabResult& b,
                                const LabOptions& o = {});

// ---- bundled examples ----------------------------------------------------

struct MorseExample {
  std::string name;
  EmbeddedManifold manifold;
  SmoothFunction function;
  LabOptions options;
  int product_circle = 0;          // > 0: cross the result with an n-gon circle
};

/// s2-height, s2-tilted-morse, t2-flat-height, s1-constant, s1xs2-product.
std::vector<std::string> example_names();
/// Throws std::out_of_range for an unknown name.
MorseExample example(const std::string& name);
/// JSON description: {"manifold": "sphere"|"torus"|"circle", "R", "r",
/// "quadratic": [[...]], "linear": [...], "resolution", "product_circle"}.
/// Throws ParseError.
MorseExample parse_example(const std::string& text, const std::string& name = "custom");
LabResult run_example(const MorseExample& e);

}  // namespace floer::lab
