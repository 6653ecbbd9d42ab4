#pragma once

#include "errors.hpp"
#include "permutation.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace permuton {

/// Exact occurrence count of a pattern; density is occurrences / C(n, k).
struct PatternCount {
  std::uint64_t occurrences = 0;
  std::uint64_t total_subsets = 1;

  Rational density() const { return Rational(BigInt(occurrences), BigInt(total_subsets)); }
};

template <typename T>
struct Point {
  T x;
  T y;
};

/// C(n, k); throws SizeLimitError when the value does not fit in 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) throw SizeLimitError("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

/// The permutation induced by points read left to right: output(i) = #{j : y_j <= y_i}.
template <typename T>
Permutation pattern_of_points(std::span<const Point<T>> points) {
  if (points.empty()) throw PreconditionError("empty point configuration");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i - 1].x < points[i].x)) throw PreconditionError("x-coordinates must be strictly increasing");
  std::vector<T> ys;
  ys.reserve(points.size());
  for (const auto& p : points) ys.push_back(p.y);
  std::vector<T> sorted = ys;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw PreconditionError("duplicate y-coordinate in point configuration");
  return standardize<T>(ys);
}

template <typename T>
Permutation pattern_of_points(const std::vector<Point<T>>& points) {
  return pattern_of_points(std::span<const Point<T>>(points));
}

/// Length of the longest strictly increasing subsequence (patience sorting).
inline int longest_increasing_length(std::span<const int> values) {
  std::vector<int> tails;
  for (int v : values) {
    auto it = std::lower_bound(tails.begin(), tails.end(), v);
    if (it == tails.end())
      tails.push_back(v);
    else
      *it = v;
  }
  return static_cast<int>(tails.size());
}

inline int longest_decreasing_length(std::span<const int> values) {
  std::vector<int> negated(values.begin(), values.end());
  for (int& v : negated) v = -v;
  return longest_increasing_length(negated);
}

/// Number of pairs i < j with values[i] > values[j], by merge sort.
inline std::uint64_t count_inversions(std::span<const int> values) {
  std::vector<int> a(values.begin(), values.end());
  std::vector<int> buf(a.size());
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < a.size(); width *= 2) {
    for (std::size_t lo = 0; lo < a.size(); lo += 2 * width) {
      std::size_t mid = std::min(lo + width, a.size());
      std::size_t hi = std::min(lo + 2 * width, a.size());
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (a[j] < a[i]) {
          inversions += mid - i;
          buf[out++] = a[j++];
        } else {
          buf[out++] = a[i++];
        }
      }
      while (i < mid) buf[out++] = a[i++];
      while (j < hi) buf[out++] = a[j++];
    }
    std::swap(a, buf);
  }
  return inversions;
}

namespace detail {

/// Depth-first search over positions chosen left to right. At depth d the new
/// value must fall strictly between the values already placed at the pattern's
/// nearest-below and nearest-above indices, which keeps every prefix
/// order-isomorphic to the pattern prefix.
class OccurrenceSearch {
 public:
  OccurrenceSearch(const Permutation& pattern, const Permutation& text)
      : k_(pattern.order()), n_(text.order()), text_(text.values()), lower_(k_, -1), upper_(k_, -1),
        chosen_(k_, 0) {
    for (int d = 0; d < k_; ++d) {
      int best_lo = 0, best_hi = k_ + 1;
      for (int j = 0; j < d; ++j) {
        int aj = pattern(j + 1), ad = pattern(d + 1);
        if (aj < ad && aj > best_lo) {
          best_lo = aj;
          lower_[d] = j;
        }
        if (aj > ad && aj < best_hi) {
          best_hi = aj;
          upper_[d] = j;
        }
      }
    }
  }

  std::uint64_t count() {
    stop_at_first_ = false;
    found_ = 0;
    extend(0, 0);
    return found_;
  }

  bool exists() {
    stop_at_first_ = true;
    found_ = 0;
    extend(0, 0);
    return found_ > 0;
  }

 private:
  bool extend(int depth, int first_position) {
    if (depth == k_) {
      ++found_;
      return stop_at_first_;
    }
    const int lo = lower_[depth] < 0 ? 0 : text_[chosen_[lower_[depth]]];
    const int hi = upper_[depth] < 0 ? n_ + 1 : text_[chosen_[upper_[depth]]];
    const int last = n_ - (k_ - depth);
    for (int q = first_position; q <= last; ++q) {
      const int v = text_[q];
      if (v <= lo || v >= hi) continue;
      chosen_[depth] = q;
      if (extend(depth + 1, q + 1)) return true;
    }
    return false;
  }

  int k_;
  int n_;
  std::span<const int> text_;
  std::vector<int> lower_;
  std::vector<int> upper_;
  std::vector<int> chosen_;
  std::uint64_t found_ = 0;
  bool stop_at_first_ = false;
};

/// Fenwick tree over values 1..n for prefix counts.
class Fenwick {
 public:
  explicit Fenwick(int n) : tree_(n + 1, 0) {}
  void add(int i) {
    for (; i < static_cast<int>(tree_.size()); i += i & -i) ++tree_[i];
  }
  std::uint64_t prefix(int i) const {
    std::uint64_t s = 0;
    for (; i > 0; i -= i & -i) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

inline std::uint64_t choose2(std::uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

/// All six order-3 pattern counts from left/right smaller/larger counts.
inline std::uint64_t count_order3(const Permutation& pattern, const Permutation& text) {
  const int n = text.order();
  Fenwick seen(n);
  std::uint64_t c123 = 0, c321 = 0, first_small = 0, last_large = 0, last_small = 0, first_large = 0;
  for (int j = 0; j < n; ++j) {
    const int v = text(j + 1);
    const std::uint64_t left_smaller = seen.prefix(v - 1);
    const std::uint64_t left_larger = static_cast<std::uint64_t>(j) - left_smaller;
    const std::uint64_t right_smaller = static_cast<std::uint64_t>(v - 1) - left_smaller;
    const std::uint64_t right_larger = static_cast<std::uint64_t>(n - 1 - j) - right_smaller;
    c123 += left_smaller * right_larger;
    c321 += left_larger * right_smaller;
    first_small += choose2(right_larger);
    first_large += choose2(right_smaller);
    last_large += choose2(left_smaller);
    last_small += choose2(left_larger);
    seen.add(v);
  }
  const auto p = pattern.values();
  const int code = p[0] * 100 + p[1] * 10 + p[2];
  switch (code) {
    case 123: return c123;
    case 321: return c321;
    case 132: return first_small - c123;
    case 213: return last_large - c123;
    case 231: return last_small - c321;
    case 312: return first_large - c321;
  }
  return 0;
}

inline void require_fits(const Permutation& pattern, const Permutation& text) {
  if (pattern.order() > text.order())
    throw PreconditionError("pattern order " + std::to_string(pattern.order()) + " exceeds permutation order " +
                            std::to_string(text.order()));
}

}  // namespace detail

/// Occurrences by the pruned enumeration alone (no specialised counters).
inline std::uint64_t count_occurrences_enumerate(const Permutation& pattern, const Permutation& text) {
  detail::require_fits(pattern, text);
  return detail::OccurrenceSearch(pattern, text).count();
}

/// Exact count of k-subsets of positions of `text` inducing `pattern`.
inline PatternCount count_occurrences(const Permutation& pattern, const Permutation& text) {
  detail::require_fits(pattern, text);
  const int k = pattern.order();
  const int n = text.order();
  PatternCount result;
  result.total_subsets = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  if (k == 1) {
    result.occurrences = static_cast<std::uint64_t>(n);
  } else if (k == 2) {
    const std::uint64_t inv = count_inversions(text.values());
    result.occurrences = pattern(1) == 2 ? inv : result.total_subsets - inv;
  } else if (k == 3) {
    result.occurrences = detail::count_order3(pattern, text);
  } else {
    result.occurrences = detail::OccurrenceSearch(pattern, text).count();
  }
  return result;
}

/// True iff `text` has no occurrence of `pattern`. Monotone patterns are decided
/// by longest increasing/decreasing subsequence length.
inline bool avoids(const Permutation& pattern, const Permutation& text) {
  detail::require_fits(pattern, text);
  const int k = pattern.order();
  if (pattern.is_identity()) return longest_increasing_length(text.values()) < k;
  if (pattern.is_reverse_identity()) return longest_decreasing_length(text.values()) < k;
  return !detail::OccurrenceSearch(pattern, text).exists();
}

/// All permutations of a given order in lexicographic order.
inline std::vector<Permutation> all_permutations(int k) {
  std::vector<int> v(k);
  for (int i = 0; i < k; ++i) v[i] = i + 1;
  std::vector<Permutation> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace permuton
