#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the Smith normal form or the Floer pipeline.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long long>>;

// Rank over GF(p) by plain Gaussian elimination.
inline std::size_t rank_mod(Matrix m, long long p) {
  std::size_t rank = 0;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (auto& row : m)
    for (auto& x : row) x = ((x % p) + p) % p;
  auto inv = [p](long long a) {
    long long r = 1, e = p - 2;
    a %= p;
    while (e) {
      if (e & 1) r = static_cast<long long>((__int128)r * a % p);
      a = static_cast<long long>((__int128)a * a % p);
      e >>= 1;
    }
    return r;
  };
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    long long iv = inv(m[rank][c]);
    for (auto& x : m[rank]) x = static_cast<long long>((__int128)x * iv % p);
    for (std::size_t r = 0; r < rows; ++r)
      if (r != rank && m[r][c]) {
        long long f = m[r][c];
        for (std::size_t k = 0; k < cols; ++k)
          m[r][k] = ((m[r][k] - static_cast<long long>((__int128)f * m[rank][k] % p)) % p + p) % p;
      }
    ++rank;
  }
  return rank;
}

// Rank over Q, taken as the rank modulo a large prime (exact for the small
// entries used in tests with overwhelming margin).
inline std::size_t rank_q(const Matrix& m) { return rank_mod(m, 1000000007LL); }

struct Complex {
  std::map<int, std::size_t> ranks;
  std::map<int, Matrix> d;  // d[k]: rank(k-1) x rank(k)
};

// Betti numbers over Q from degree lo to hi.
inline std::vector<std::size_t> betti(const Complex& c, int lo, int hi) {
  auto rk = [&](int k) -> std::size_t {
    auto it = c.d.find(k);
    return it == c.d.end() || it->second.empty() ? 0 : rank_q(it->second);
  };
  std::vector<std::size_t> out;
  for (int k = lo; k <= hi; ++k) {
    auto it = c.ranks.find(k);
    std::size_t n = it == c.ranks.end() ? 0 : it->second;
    out.push_back(n - rk(k) - rk(k + 1));
  }
  return out;
}

// Simplicial complex given by maximal simplices (vertex sets), expanded to all
// faces, with the alternating boundary on increasing vertex order.
inline Complex simplicial(const std::vector<std::vector<int>>& maximal) {
  std::map<int, std::vector<std::vector<int>>> cells;
  std::set<std::vector<int>> seen;
  for (auto s : maximal) {
    std::sort(s.begin(), s.end());
    const unsigned n = static_cast<unsigned>(s.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<int> f;
      for (unsigned i = 0; i < n; ++i)
        if (mask & (1u << i)) f.push_back(s[i]);
      if (seen.insert(f).second) cells[static_cast<int>(f.size()) - 1].push_back(f);
    }
  }
  Complex c;
  for (auto& [d, list] : cells) {
    std::sort(list.begin(), list.end());
    c.ranks[d] = list.size();
  }
  for (auto& [d, list] : cells) {
    if (d == 0) continue;
    const auto& lower = cells[d - 1];
    Matrix m(lower.size(), std::vector<long long>(list.size(), 0));
    for (std::size_t j = 0; j < list.size(); ++j)
      for (std::size_t i = 0; i < list[j].size(); ++i) {
        auto f = list[j];
        f.erase(f.begin() + static_cast<long>(i));
        auto pos = std::lower_bound(lower.begin(), lower.end(), f) - lower.begin();
        m[static_cast<std::size_t>(pos)][j] = (i % 2 == 0) ? 1 : -1;
      }
    c.d[d] = m;
  }
  return c;
}

inline std::vector<std::vector<int>> octahedron() {
  // vertices 0,1 = +-x, 2,3 = +-y, 4,5 = +-z
  std::vector<std::vector<int>> out;
  for (int a : {0, 1})
    for (int b : {2, 3})
      for (int c : {4, 5}) out.push_back({a, b, c});
  return out;
}

// 3x3 grid torus, two triangles per square.
inline std::vector<std::vector<int>> torus(int n = 3) {
  std::vector<std::vector<int>> out;
  auto v = [n](int i, int j) { return ((i + n) % n) * n + (j + n) % n; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
      out.push_back({v(i, j), v(i, j + 1), v(i + 1, j + 1)});
    }
  return out;
}

inline std::vector<std::vector<int>> circle(int n = 3) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) out.push_back({i, (i + 1) % n});
  return out;
}

// Join-free product: S^1 x S^2 as the boundary of a solid... built directly as
// the simplicial product via the staircase rule on increasing orders.
inline std::vector<std::vector<int>> product(const std::vector<std::vector<int>>& a, int na,
                                             const std::vector<std::vector<int>>& b, int nb) {
  (void)na;
  std::vector<std::vector<int>> out;
  for (auto sa : a)
    for (auto sb : b) {
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      const int p = static_cast<int>(sa.size()) - 1, q = static_cast<int>(sb.size()) - 1;
      // enumerate monotone lattice paths as bitmasks of length p+q with q ones
      for (unsigned mask = 0; mask < (1u << (p + q)); ++mask) {
        if (__builtin_popcount(mask) != q) continue;
        int i = 0, j = 0;
        std::vector<int> cell{sa[0] * nb + sb[0]};
        for (int s = 0; s < p + q; ++s) {
          if (mask & (1u << s))
            ++j;
          else
            ++i;
          cell.push_back(sa[i] * nb + sb[j]);
        }
        out.push_back(cell);
      }
    }
  return out;
}

}  // namespace oracle
