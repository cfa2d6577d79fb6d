#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hspeed/common.hpp"

namespace hspeed {

// Exact solve of an m x k system (m >= k) by Gauss-Jordan elimination.
// Returns nothing when the system is rank deficient or inconsistent.
inline std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> a,
                                                        std::vector<Rational> b) {
  const std::size_t m = a.size();
  const std::size_t k = m ? a[0].size() : 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = row;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) return std::nullopt;
    std::swap(a[pivot], a[row]);
    std::swap(b[pivot], b[row]);
    const Rational inv = 1 / a[row][col];
    for (std::size_t c = col; c < k; ++c) a[row][c] *= inv;
    b[row] *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t c = col; c < k; ++c) a[r][c] -= f * a[row][c];
      b[r] -= f * b[row];
    }
    ++row;
  }
  for (std::size_t r = k; r < m; ++r)
    if (b[r] != 0) return std::nullopt;
  b.resize(k);
  return b;
}

// Sum over bases i = 1..polys.size() of p_i(n) * i^n; polys[i-1][j] is the
// coefficient of n^j.
struct SpeedForm {
  std::vector<std::vector<Rational>> polys;
  int threshold = 0;  // the form is asserted for n >= threshold

  int ell() const { return static_cast<int>(polys.size()); }

  Rational operator()(long n) const {
    Rational total = 0;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      Rational p = 0;
      Rational power = 1;
      for (const auto& c : polys[i]) {
        p += c * power;
        power *= n;
      }
      total += p * Rational(ipow(BigInt(i + 1), static_cast<unsigned>(n)));
    }
    return total;
  }

  int degree(int base) const {
    const auto& p = polys.at(base - 1);
    for (int j = static_cast<int>(p.size()) - 1; j >= 0; --j)
      if (p[j] != 0) return j;
    return -1;
  }

  std::string poly_string(int base) const {
    const auto& p = polys.at(base - 1);
    std::string out;
    for (int j = static_cast<int>(p.size()) - 1; j >= 0; --j) {
      if (p[j] == 0) continue;
      if (!out.empty()) out += " + ";
      out += "(" + to_string(p[j]) + ")";
      if (j >= 1) out += "*n";
      if (j >= 2) out += "^" + std::to_string(j);
    }
    return out.empty() ? "0" : out;
  }

  std::string to_string_form() const {
    std::string out;
    for (int i = ell(); i >= 1; --i) {
      if (degree(i) < 0) continue;
      if (!out.empty()) out += " + ";
      out += "[" + poly_string(i) + "]*" + std::to_string(i) + "^n";
    }
    return out.empty() ? "0" : out;
  }
};

}  // namespace hspeed
