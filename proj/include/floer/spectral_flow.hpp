#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace floer {

/// Dense real symmetric matrix, row major.
struct SymMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  SymMatrix() = default;
  explicit SymMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Eigenvalues in increasing order (Householder tridiagonalization followed
/// by implicit QL).
std::vector<double> symmetric_eigenvalues(const SymMatrix& m);

/// t -> A(t) on [0, 1]. Sampled paths interpolate linearly between samples.
class OperatorPath {
 public:
  OperatorPath() = default;
  /// Samples with t strictly increasing from 0 to 1; throws ShapeMismatch.
  static OperatorPath from_samples(std::vector<std::pair<double, SymMatrix>> samples);
  /// `grid` initial sample points are spread uniformly over [0, 1].
  static OperatorPath from_function(std::size_t n, std::function<SymMatrix(double)> f,
                                    std::size_t grid = 16);

  std::size_t size() const { return n_; }
  SymMatrix at(double t) const;
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<std::pair<double, SymMatrix>>& samples() const { return samples_; }

  OperatorPath reversed() const;
  /// First half runs through this path, second half through `next`.
  OperatorPath concatenate(const OperatorPath& next) const;

 private:
  std::size_t n_ = 0;
  std::function<SymMatrix(double)> f_;
  std::vector<double> grid_;
  std::vector<std::pair<double, SymMatrix>> samples_;  // empty for functional paths
};

struct Crossing {
  double t_low = 0;   // the crossing lies in [t_low, t_high]
  double t_high = 0;
  int direction = 0;  // +1: negative to positive
};

struct SpectralFlowOptions {
  double tolerance = 1e-3;  // endpoint gap; subintervals move eigenvalues < tolerance / 2
  int max_depth = 40;
};

struct SpectralFlowResult {
  int value = 0;
  std::vector<Crossing> crossings;
  std::size_t intervals = 0;
};

/// +1 for each eigenvalue passing from negative to positive. Throws
/// DegenerateEndpoint or RefinementLimit.
SpectralFlowResult spectral_flow_detail(const OperatorPath& p, const SpectralFlowOptions& o = {});
int spectral_flow(const OperatorPath& p, double tolerance = 1e-3);

/// SF(p1 * p2) == SF(p1) + SF(p2); throws ShapeMismatch when p1(1) != p2(0).
bool check_additivity(const OperatorPath& p1, const OperatorPath& p2, double tolerance = 1e-3);

/// mu(alpha) = SF(path from alpha to the reference) - 1 + correction(alpha);
/// the reference gets 0.
std::map<std::string, int> assign_grading(const std::string& ref_id,
                                          const std::map<std::string, OperatorPath>& paths,
                                          const std::map<std::string, int>& corrections = {},
                                          double tolerance = 1e-3);

/// Text format: "n samples" header, then per line t and the n(n+1)/2
/// upper-triangle entries row by row. '#' starts a comment.
OperatorPath parse_operator_path(const std::string& text);
OperatorPath load_operator_path(const std::string& path);
std::string format_operator_path(const OperatorPath& p);

}  // namespace floer
