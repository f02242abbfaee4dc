#include "floer/smith.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace floer {
namespace {

class Reducer {
 public:
  Reducer(const IntMatrix& m, bool track) : a_(m), track_(track) {
    if (track_) {
      u_ = IntMatrix::identity(m.rows());
      ui_ = IntMatrix::identity(m.rows());
      v_ = IntMatrix::identity(m.cols());
      vi_ = IntMatrix::identity(m.cols());
    }
  }

  SmithForm run() {
    const std::size_t limit = std::min(a_.rows(), a_.cols());
    std::size_t t = 0;
    for (; t < limit; ++t) {
      if (!bring_min_to(t, t, t)) break;
      reduce_pivot(t);
      if (a_(t, t) < 0) negate_row(t);
    }
    SmithForm out;
    out.rank = t;
    out.diagonal = std::move(a_);
    if (track_) {
      out.left = std::move(u_);
      out.left_inverse = std::move(ui_);
      out.right = std::move(v_);
      out.right_inverse = std::move(vi_);
    }
    return out;
  }

 private:
  // Moves the minimal-|.| nonzero entry of the block [row0.., col0..] to (t, t).
  bool bring_min_to(std::size_t t, std::size_t row0, std::size_t col0) {
    bool found = false;
    std::size_t br = 0, bc = 0;
    Integer best;
    for (std::size_t r = row0; r < a_.rows(); ++r)
      for (std::size_t c = col0; c < a_.cols(); ++c) {
        const Integer& x = a_(r, c);
        if (x == 0) continue;
        Integer ax = abs(x);
        if (!found || ax < best) {
          found = true;
          best = ax;
          br = r;
          bc = c;
          if (best == 1) goto done;
        }
      }
  done:
    if (!found) return false;
    swap_rows(t, br);
    swap_cols(t, bc);
    return true;
  }

  void reduce_pivot(std::size_t t) {
    for (;;) {
      bool dirty = false;
      // Clear column t below the pivot.
      for (std::size_t r = t + 1; r < a_.rows(); ++r) {
        if (a_(r, t) == 0) continue;
        Integer q = a_(r, t) / a_(t, t);
        add_row(r, t, -q);
        if (a_(r, t) != 0) dirty = true;
      }
      // Clear row t right of the pivot.
      for (std::size_t c = t + 1; c < a_.cols(); ++c) {
        if (a_(t, c) == 0) continue;
        Integer q = a_(t, c) / a_(t, t);
        add_col(c, t, -q);
        if (a_(t, c) != 0) dirty = true;
      }
      if (dirty) {
        move_min_of_cross(t);
        continue;
      }
      // Divisibility: every remaining entry must be a multiple of the pivot.
      bool fixed = false;
      for (std::size_t r = t + 1; r < a_.rows() && !fixed; ++r)
        for (std::size_t c = t + 1; c < a_.cols(); ++c)
          if (a_(r, c) % a_(t, t) != 0) {
            add_row(t, r, 1);
            fixed = true;
            break;
          }
      if (!fixed) return;
    }
  }

  // After a partial reduction, bring the smallest nonzero entry of row t or
  // column t onto the diagonal.
  void move_min_of_cross(std::size_t t) {
    std::size_t br = t, bc = t;
    Integer best = abs(a_(t, t));
    for (std::size_t r = t + 1; r < a_.rows(); ++r)
      if (a_(r, t) != 0 && (best == 0 || abs(a_(r, t)) < best)) {
        best = abs(a_(r, t));
        br = r;
        bc = t;
      }
    for (std::size_t c = t + 1; c < a_.cols(); ++c)
      if (a_(t, c) != 0 && (best == 0 || abs(a_(t, c)) < best)) {
        best = abs(a_(t, c));
        br = t;
        bc = c;
      }
    swap_rows(t, br);
    swap_cols(t, bc);
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    a_.swap_rows(i, j);
    if (track_) {
      u_.swap_rows(i, j);
      ui_.swap_cols(i, j);
    }
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    a_.swap_cols(i, j);
    if (track_) {
      v_.swap_cols(i, j);
      vi_.swap_rows(i, j);
    }
  }
  // row_dst += f * row_src
  void add_row(std::size_t dst, std::size_t src, const Integer& f) {
    a_.add_row_multiple(dst, src, f);
    if (track_) {
      u_.add_row_multiple(dst, src, f);
      ui_.add_col_multiple(src, dst, -f);
    }
  }
  // col_dst += f * col_src
  void add_col(std::size_t dst, std::size_t src, const Integer& f) {
    a_.add_col_multiple(dst, src, f);
    if (track_) {
      v_.add_col_multiple(dst, src, f);
      vi_.add_row_multiple(src, dst, -f);
    }
  }
  void negate_row(std::size_t r) {
    a_.negate_row(r);
    if (track_) {
      u_.negate_row(r);
      ui_.negate_col(r);
    }
  }

  IntMatrix a_;
  bool track_;
  IntMatrix u_, ui_, v_, vi_;
};

}  // namespace

std::vector<Integer> SmithForm::invariant_factors() const {
  std::vector<Integer> out;
  out.reserve(rank);
  for (std::size_t i = 0; i < rank; ++i) out.push_back(diagonal(i, i));
  return out;
}

SmithForm smith_normal_form(const IntMatrix& m, bool with_transforms) {
  return Reducer(m, with_transforms).run();
}

}  // namespace floer
