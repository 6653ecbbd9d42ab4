#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "rational.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace permuton {

/// Depth-d prefixes are cells 0 .. 4^d - 1; f acts on them through digit_swap_index.

/// Increasing quadruples of distinct depth-d cells whose images order as the
/// pattern 3142, i.e. f(x2) < f(x4) < f(x1) < f(x3).
struct QuadrupleScan {
  int depth = 0;
  std::uint64_t quadruples = 0;
  std::uint64_t hits = 0;
};

inline QuadrupleScan scan_3142_images(int depth) {
  if (depth < 1 || depth > 4) throw PreconditionError("quadruple scan supports depth 1..4");
  const int cells = 1 << (2 * depth);
  std::vector<std::uint64_t> f(cells);
  for (int i = 0; i < cells; ++i) f[i] = digit_swap_index(static_cast<std::uint64_t>(i), depth);
  QuadrupleScan s{depth, 0, 0};
  for (int a = 0; a < cells; ++a)
    for (int b = a + 1; b < cells; ++b) {
      if (!(f[b] < f[a])) {
        // f(x2) < f(x1) is required; still count the quadruples skipped here.
        const std::uint64_t rest = static_cast<std::uint64_t>(cells - b - 1);
        s.quadruples += rest * (rest - 1) / 2;
        continue;
      }
      for (int c = b + 1; c < cells; ++c)
        for (int d = c + 1; d < cells; ++d) {
          ++s.quadruples;
          if (f[b] < f[d] && f[d] < f[a] && f[a] < f[c]) ++s.hits;
        }
    }
  return s;
}

/// Difference quotients (f(x) - f(x + i 4^-n)) / (i 4^-n) for x, x + i 4^-n
/// sharing their first n - 1 digits, over every prefix of length n <= depth.
struct QuotientScan {
  int depth = 0;
  std::uint64_t pairs = 0;
  std::set<Rational> values;
  bool within_target = true;
};

inline const std::set<Rational>& quotient_targets() {
  static const std::set<Rational> targets{make_rational(-2), make_rational(-1), make_rational(-1, 2),
                                          make_rational(1, 2), make_rational(1), make_rational(2)};
  return targets;
}

inline QuotientScan scan_difference_quotients(int depth) {
  if (depth < 1 || depth > 8) throw PreconditionError("quotient scan supports depth 1..8");
  QuotientScan s;
  s.depth = depth;
  for (int n = 1; n <= depth; ++n) {
    const std::uint64_t cells = std::uint64_t{1} << (2 * n);
    for (std::uint64_t x = 0; x < cells; ++x) {
      const int last = static_cast<int>(x & 3u);
      for (int i = -3; i <= 3; ++i) {
        if (i == 0 || last + i < 0 || last + i > 3) continue;
        const std::uint64_t y = x + i;  // same leading n - 1 digits
        const Rational fx(static_cast<std::int64_t>(digit_swap_index(x, n)));
        const Rational fy(static_cast<std::int64_t>(digit_swap_index(y, n)));
        const Rational q = (fx - fy) / i;  // the 4^-n scale cancels
        ++s.pairs;
        s.values.insert(q);
        if (!quotient_targets().count(q)) s.within_target = false;
      }
    }
  }
  return s;
}

/// f(f(s)) == s over every digit string of the given length.
inline bool digit_swap_is_involution(int depth) {
  if (depth < 1 || depth > 10) throw PreconditionError("involution check supports depth 1..10");
  const std::uint64_t cells = std::uint64_t{1} << (2 * depth);
  for (std::uint64_t x = 0; x < cells; ++x) {
    std::string s(depth, '0');
    for (int j = depth - 1, v = static_cast<int>(x); j >= 0; --j, v >>= 2) s[j] = static_cast<char>('0' + (v & 3));
    if (digit_swap_eval(digit_swap_eval(s)) != s) return false;
  }
  return true;
}

}  // namespace permuton
