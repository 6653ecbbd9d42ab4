#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace permuton {

/// A bijection on {1..n}, stored as its value sequence: values()[i] == pi(i + 1).
class Permutation {
 public:
  /// Validates the bijection; throws PreconditionError otherwise.
  explicit Permutation(std::vector<int> values) : values_(std::move(values)) {
    const auto n = values_.size();
    if (n == 0) throw PreconditionError("permutation of order 0");
    std::vector<bool> seen(n + 1, false);
    for (int v : values_) {
      if (v < 1 || static_cast<std::size_t>(v) > n)
        throw PreconditionError("value " + std::to_string(v) + " outside 1.." + std::to_string(n));
      if (seen[v]) throw PreconditionError("duplicate value " + std::to_string(v));
      seen[v] = true;
    }
  }

  Permutation(std::initializer_list<int> values) : Permutation(std::vector<int>(values)) {}

  static Permutation identity(int n) {
    if (n < 1) throw PreconditionError("permutation of order 0");
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1;
    return Permutation(std::move(v), Trusted{});
  }

  static Permutation reverse_identity(int n) {
    if (n < 1) throw PreconditionError("permutation of order 0");
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = n - i;
    return Permutation(std::move(v), Trusted{});
  }

  int order() const noexcept { return static_cast<int>(values_.size()); }

  /// 1-based evaluation.
  int operator()(int i) const { return values_[static_cast<std::size_t>(i - 1)]; }

  std::span<const int> values() const noexcept { return values_; }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] != static_cast<int>(i + 1)) return false;
    return true;
  }

  bool is_reverse_identity() const noexcept {
    const int n = order();
    for (int i = 0; i < n; ++i)
      if (values_[i] != n - i) return false;
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.values_ <=> b.values_; }

 private:
  struct Trusted {};
  Permutation(std::vector<int> values, Trusted) : values_(std::move(values)) {}

  std::vector<int> values_;
};

enum class Symmetry { Inverse, Reverse, Complement };

inline Permutation apply_symmetry(const Permutation& pi, Symmetry which) {
  const int n = pi.order();
  std::vector<int> out(n);
  switch (which) {
    case Symmetry::Inverse:
      for (int i = 1; i <= n; ++i) out[pi(i) - 1] = i;
      break;
    case Symmetry::Reverse:
      for (int i = 1; i <= n; ++i) out[i - 1] = pi(n + 1 - i);
      break;
    case Symmetry::Complement:
      for (int i = 1; i <= n; ++i) out[i - 1] = n + 1 - pi(i);
      break;
  }
  return Permutation(std::move(out));
}

inline Permutation inverse(const Permutation& pi) { return apply_symmetry(pi, Symmetry::Inverse); }

/// Relative order of an arbitrary sequence of distinct values, as a permutation.
template <typename T>
Permutation standardize(std::span<const T> values) {
  std::vector<int> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
  std::vector<int> out(values.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out[idx[r]] = static_cast<int>(r + 1);
  return Permutation(std::move(out));
}

/// Single spaces, no trailing newline. Files hold this line followed by '\n'.
inline std::string format_permutation(const Permutation& pi) {
  std::string out;
  for (int i = 1; i <= pi.order(); ++i) {
    if (i > 1) out += ' ';
    out += std::to_string(pi(i));
  }
  return out;
}

/// Whitespace- or comma-separated 1-based integers.
inline Permutation parse_permutation(std::string_view text) {
  std::vector<long long> raw;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); };
  while (i < text.size()) {
    while (i < text.size() && is_sep(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_sep(text[j])) ++j;
    std::string_view tok = text.substr(i, j - i);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(ParseError::Kind::Malformed, "not an integer: '" + std::string(tok) + "'");
    raw.push_back(v);
    i = j;
  }
  if (raw.empty()) throw ParseError(ParseError::Kind::Empty, "empty permutation");
  const auto n = static_cast<long long>(raw.size());
  std::vector<bool> seen(raw.size() + 1, false);
  for (long long v : raw)
    if (v < 1 || v > n)
      throw ParseError(ParseError::Kind::OutOfRange,
                       "value " + std::to_string(v) + " outside 1.." + std::to_string(n));
  for (long long v : raw) {
    if (seen[v]) throw ParseError(ParseError::Kind::Duplicate, "duplicate value " + std::to_string(v));
    seen[v] = true;
  }
  return Permutation(std::vector<int>(raw.begin(), raw.end()));
}

/// Pattern literal: concatenated digits ("132") for order <= 9, otherwise the
/// separated form accepted by parse_permutation ("1,10,2,...").
inline Permutation parse_pattern(std::string_view literal) {
  const bool separated = std::any_of(literal.begin(), literal.end(), [](char c) {
    return c == ',' || std::isspace(static_cast<unsigned char>(c));
  });
  if (separated || literal.empty()) return parse_permutation(literal);
  if (literal.size() > 9)
    throw ParseError(ParseError::Kind::Malformed,
                     "digit-concatenated patterns are limited to order 9; use the comma form");
  std::string spaced;
  for (char c : literal) {
    if (c < '0' || c > '9')
      throw ParseError(ParseError::Kind::Malformed, "bad pattern digit '" + std::string(1, c) + "'");
    spaced += c;
    spaced += ' ';
  }
  return parse_permutation(spaced);
}

}  // namespace permuton
