#pragma once

#include "floer/integer_matrix.hpp"

#include <vector>

namespace floer {

/// Smith normal form U * m * V = D with unimodular U, V.
///
/// The diagonal of D is d_1 | d_2 | ... | d_r followed by zeros, all d_i > 0.
/// Pivots are chosen by minimal absolute value (first in row-major order on
/// ties), so the transforms are a deterministic function of the input.
struct SmithForm {
  IntMatrix diagonal;
  IntMatrix left;           // U
  IntMatrix left_inverse;   // U^{-1}
  IntMatrix right;          // V
  IntMatrix right_inverse;  // V^{-1}
  std::size_t rank = 0;

  /// The nonzero diagonal entries, in order.
  std::vector<Integer> invariant_factors() const;
};

/// When `with_transforms` is false only `diagonal` and `rank` are filled.
SmithForm smith_normal_form(const IntMatrix& m, bool with_transforms = true);

}  // namespace floer
