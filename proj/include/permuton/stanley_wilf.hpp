#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "pattern.hpp"
#include "sampling.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace permuton {

enum class GenerationMode { Exhaustive, Random };

struct GenerationReport {
  GenerationMode mode = GenerationMode::Exhaustive;
  int n = 0;
  std::uint64_t per_choice_total = 0;  // number of choice vectors examined
  std::uint64_t discarded_ties = 0;    // choice vectors with a repeated height
  std::uint64_t distinct_count = 0;
  double nth_root = 0;
  bool pattern_checked = false;
  bool all_avoiding = false;
};

inline constexpr std::uint64_t kMaxExhaustiveChoices = std::uint64_t{1} << 24;

/// Generates permutations from the fixed positions x_i = (i - 1/2)/n by choosing
/// one fiber atom per position, and counts the distinct results. Random mode
/// draws `trials` choice vectors instead of enumerating all of them.
inline GenerationReport sw_generate(const TrackPermuton& g, int n, GenerationMode mode,
                                    const std::optional<Permutation>& pattern = std::nullopt,
                                    std::uint64_t seed = 0, std::uint64_t trials = 0) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  std::vector<std::vector<Rational>> heights(n);
  std::vector<Rational> all;
  for (int i = 0; i < n; ++i) {
    const Fiber f = fiber_at(g, make_rational(2 * i + 1, 2 * n));
    for (const auto& a : f.atoms()) {
      heights[i].push_back(a.y);
      all.push_back(a.y);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  // Integer ranks make tie detection and standardization exact and cheap.
  std::vector<std::vector<int>> rank(n);
  for (int i = 0; i < n; ++i)
    for (const auto& y : heights[i])
      rank[i].push_back(static_cast<int>(std::lower_bound(all.begin(), all.end(), y) - all.begin()));

  GenerationReport rep;
  rep.mode = mode;
  rep.n = n;
  if (mode == GenerationMode::Exhaustive) {
    std::uint64_t total = 1;
    for (const auto& r : rank) {
      total *= r.size();
      if (total > kMaxExhaustiveChoices) throw SizeLimitError("exhaustive generation limited to 2^24 choice vectors");
    }
    rep.per_choice_total = total;
  } else {
    if (trials < 1) throw PreconditionError("random generation needs at least one trial");
    rep.per_choice_total = trials;
  }

  std::unordered_set<std::string> seen;
  std::vector<int> choice(n, 0), ys(n);
  std::vector<char> used(all.size(), 0);
  auto record = [&] {
    bool tie = false;
    for (int i = 0; i < n; ++i) {
      ys[i] = rank[i][choice[i]];
      if (used[ys[i]]) tie = true;
      used[ys[i]] = 1;
    }
    for (int i = 0; i < n; ++i) used[ys[i]] = 0;
    if (tie) {
      ++rep.discarded_ties;
      return;
    }
    std::string key(2 * n, '\0');
    const Permutation pi = standardize<int>(ys);
    for (int i = 0; i < n; ++i) {
      key[2 * i] = static_cast<char>(pi(i + 1) & 0xff);
      key[2 * i + 1] = static_cast<char>(pi(i + 1) >> 8);
    }
    seen.insert(std::move(key));
  };

  if (mode == GenerationMode::Exhaustive) {
    for (;;) {
      record();
      int i = n - 1;
      while (i >= 0 && ++choice[i] == static_cast<int>(rank[i].size())) choice[i--] = 0;
      if (i < 0) break;
    }
  } else {
    Engine e = derived_engine(seed, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
      for (int i = 0; i < n; ++i) choice[i] = static_cast<int>(e() % rank[i].size());
      record();
    }
  }

  rep.distinct_count = seen.size();
  rep.nth_root = std::pow(static_cast<double>(rep.distinct_count), 1.0 / n);
  if (pattern && pattern->order() <= n) {
    rep.pattern_checked = true;
    rep.all_avoiding = true;
    for (const auto& key : seen) {
      std::vector<int> v(n);
      for (int i = 0; i < n; ++i)
        v[i] = static_cast<unsigned char>(key[2 * i]) | static_cast<unsigned char>(key[2 * i + 1]) << 8;
      if (!avoids(*pattern, Permutation(std::move(v)))) {
        rep.all_avoiding = false;
        break;
      }
    }
  }
  return rep;
}

}  // namespace permuton
