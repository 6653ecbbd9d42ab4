#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace permuton {

struct Atom {
  Rational y;
  Rational weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite atomic measure on [0,1]: distinct positions, positive weights, total <= 1.
/// Coincident positions passed to the constructor are merged by summing weights.
class Fiber {
 public:
  Fiber() = default;

  explicit Fiber(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.y < b.y; });
    for (auto& a : atoms) {
      if (a.weight <= 0) throw PreconditionError("fiber atom with non-positive weight");
      if (a.y < 0 || a.y > 1) throw PreconditionError("fiber atom outside [0,1]");
      if (!atoms_.empty() && atoms_.back().y == a.y)
        atoms_.back().weight += a.weight;
      else
        atoms_.push_back(std::move(a));
    }
    if (total_weight() > 1) throw PreconditionError("fiber total weight exceeds 1");
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  Rational total_weight() const {
    Rational s = 0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }

  bool is_probability() const { return total_weight() == 1; }

  friend bool operator==(const Fiber&, const Fiber&) = default;

 private:
  std::vector<Atom> atoms_;
};

namespace detail {

/// Smallest eps >= 0 such that from(S) <= to(closed eps-neighbourhood of S) + eps
/// for every subset S of `from`'s atoms. The closed neighbourhood at eps is the
/// limit of the open ones just above eps, so this is the infimum for the open
/// definition.
inline Rational one_sided_lp(const Fiber& from, const Fiber& to) {
  const auto& fa = from.atoms();
  const auto& ta = to.atoms();
  const std::size_t m = fa.size();
  const std::size_t mt = ta.size();

  // Rank all cross distances so per-subset work compares integers.
  std::vector<Rational> dist_values;
  dist_values.reserve(m * mt);
  for (const auto& a : fa)
    for (const auto& b : ta) dist_values.push_back(abs(a.y - b.y));
  std::vector<Rational> levels = dist_values;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::vector<int>> rank(m, std::vector<int>(mt));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < mt; ++j)
      rank[i][j] = static_cast<int>(std::lower_bound(levels.begin(), levels.end(), dist_values[i * mt + j]) -
                                    levels.begin());

  Rational worst = 0;
  std::vector<int> nearest(mt);
  std::vector<std::size_t> order(mt);
  const std::uint64_t subsets = std::uint64_t{1} << m;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    Rational mass = 0;
    std::fill(nearest.begin(), nearest.end(), static_cast<int>(levels.size()));
    for (std::size_t i = 0; i < m; ++i) {
      if (!(mask >> i & 1)) continue;
      mass += fa[i].weight;
      for (std::size_t j = 0; j < mt; ++j) nearest[j] = std::min(nearest[j], rank[i][j]);
    }
    if (mass <= worst) continue;  // eps_S <= from(S) can not raise the maximum
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nearest[a] < nearest[b]; });
    // Regime r covers eps in [e_r, e_{r+1}) where the first r atoms are inside.
    Rational covered = 0;
    Rational eps_s = mass;
    Rational regime_lo = 0;
    for (std::size_t r = 0; r <= mt; ++r) {
      if (r > 0) {
        covered += ta[order[r - 1]].weight;
        regime_lo = levels[nearest[order[r - 1]]];
        if (r < mt && nearest[order[r]] == nearest[order[r - 1]]) continue;
      }
      Rational candidate = std::max(regime_lo, Rational(mass - covered));
      if (r == mt || candidate < levels[nearest[order[r]]]) {
        eps_s = candidate;
        break;
      }
    }
    worst = std::max(worst, eps_s);
  }
  return worst;
}

}  // namespace detail

/// Lévy–Prokhorov distance between two atomic probability measures on [0,1].
inline Rational lp_distance(const Fiber& alpha, const Fiber& beta) {
  constexpr std::size_t kMaxAtoms = 20;
  if (!alpha.is_probability() || !beta.is_probability())
    throw PreconditionError("lp_distance needs probability fibers");
  if (alpha.size() > kMaxAtoms || beta.size() > kMaxAtoms)
    throw SizeLimitError("lp_distance supports at most 20 atoms per fiber");
  return std::max(detail::one_sided_lp(alpha, beta), detail::one_sided_lp(beta, alpha));
}

}  // namespace permuton
