#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace permuton {

/// sum(coeffs[i] * x_i) + constant  <  0   (strict)
/// sum(coeffs[i] * x_i) + constant  <= 0   (non-strict)
struct LinearConstraint {
  std::vector<Rational> coeffs;
  Rational constant;
  bool strict = true;

  bool is_constant() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c == 0; });
  }

  bool satisfied_by(const std::vector<Rational>& x) const {
    Rational s = constant;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * x[i];
    return strict ? s < 0 : s <= 0;
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == 0) continue;
      if (!out.empty()) out += " + ";
      out += format_rational(coeffs[i]) + "*x" + std::to_string(i + 1);
    }
    if (!out.empty()) out += " + ";
    out += format_rational(constant);
    out += strict ? " < 0" : " <= 0";
    return out;
  }
};

/// Rational linear inequalities over a handful of variables.
struct LinearConstraintSystem {
  static constexpr int kMaxVariables = 8;

  int variables = 0;
  std::vector<LinearConstraint> constraints;

  explicit LinearConstraintSystem(int vars) : variables(vars) {
    if (vars < 1 || vars > kMaxVariables) throw PreconditionError("constraint systems support 1..8 variables");
  }

  void add(std::vector<Rational> coeffs, Rational constant, bool strict) {
    if (static_cast<int>(coeffs.size()) != variables) throw PreconditionError("coefficient count mismatch");
    constraints.push_back(LinearConstraint{std::move(coeffs), std::move(constant), strict});
  }

  /// lhs < rhs for two affine forms given as (coeffs, constant).
  void add_less(const std::vector<Rational>& lhs, const Rational& lhs_c, const std::vector<Rational>& rhs,
                const Rational& rhs_c, bool strict = true) {
    std::vector<Rational> c(variables);
    for (int i = 0; i < variables; ++i) c[i] = lhs[i] - rhs[i];
    add(std::move(c), lhs_c - rhs_c, strict);
  }
};

/// Outcome of exact elimination: a refutation (the contradictory constant
/// constraint plus per-step sizes) or a rational witness point.
struct FeasibilityResult {
  bool feasible = false;
  std::vector<Rational> witness;
  std::vector<std::size_t> stage_sizes;  // constraints alive before each elimination
  std::size_t generated = 0;             // constraints produced by combination
  std::string refutation;
};

namespace detail {

inline void normalize(LinearConstraint& c) {
  for (const auto& v : c.coeffs)
    if (v != 0) {
      Rational scale = abs(v);
      for (auto& w : c.coeffs) w /= scale;
      c.constant /= scale;
      return;
    }
}

/// Keep one constraint per coefficient vector: the tightest one.
inline std::vector<LinearConstraint> prune(std::vector<LinearConstraint> cs) {
  std::map<std::vector<Rational>, LinearConstraint> best;
  for (auto& c : cs) {
    normalize(c);
    auto it = best.find(c.coeffs);
    if (it == best.end()) {
      best.emplace(c.coeffs, std::move(c));
    } else if (c.constant > it->second.constant || (c.constant == it->second.constant && c.strict)) {
      it->second = std::move(c);
    }
  }
  std::vector<LinearConstraint> out;
  out.reserve(best.size());
  for (auto& [k, v] : best) out.push_back(std::move(v));
  return out;
}

}  // namespace detail

/// Fourier–Motzkin elimination over the rationals with strictness tracking: a
/// combination is strict iff one of its parents is.
inline FeasibilityResult fourier_motzkin(const LinearConstraintSystem& system) {
  const int n = system.variables;
  FeasibilityResult result;
  std::vector<std::vector<LinearConstraint>> stages;
  stages.push_back(detail::prune(system.constraints));

  for (int var = 0; var < n; ++var) {
    const auto& cur = stages.back();
    result.stage_sizes.push_back(cur.size());
    std::vector<LinearConstraint> next, lower, upper;
    for (const auto& c : cur) {
      if (c.coeffs[var] > 0)
        upper.push_back(c);
      else if (c.coeffs[var] < 0)
        lower.push_back(c);
      else
        next.push_back(c);
    }
    for (const auto& u : upper)
      for (const auto& l : lower) {
        const Rational su = -l.coeffs[var];
        const Rational sl = u.coeffs[var];
        LinearConstraint comb;
        comb.coeffs.resize(n);
        for (int i = 0; i < n; ++i) comb.coeffs[i] = su * u.coeffs[i] + sl * l.coeffs[i];
        comb.coeffs[var] = 0;
        comb.constant = su * u.constant + sl * l.constant;
        comb.strict = u.strict || l.strict;
        next.push_back(std::move(comb));
        ++result.generated;
      }
    // Constant constraints decide feasibility immediately.
    std::vector<LinearConstraint> kept;
    for (auto& c : next) {
      if (c.is_constant()) {
        const bool ok = c.strict ? c.constant < 0 : c.constant <= 0;
        if (!ok) {
          result.feasible = false;
          result.refutation = "after eliminating x" + std::to_string(var + 1) + ": " + format_rational(c.constant) +
                              (c.strict ? " < 0" : " <= 0") + " is false";
          return result;
        }
        continue;
      }
      kept.push_back(std::move(c));
    }
    stages.push_back(detail::prune(std::move(kept)));
  }

  // Back-substitution: stage `var` only mentions x_var .. x_{n-1}.
  result.feasible = true;
  result.witness.assign(n, Rational(0));
  for (int var = n - 1; var >= 0; --var) {
    // Strictness only matters when lo == hi, which feasibility rules out unless
    // both bounds are non-strict.
    std::optional<Rational> lo, hi;
    for (const auto& c : stages[var]) {
      const Rational& a = c.coeffs[var];
      if (a == 0) continue;
      Rational rest = c.constant;
      for (int i = var + 1; i < n; ++i) rest += c.coeffs[i] * result.witness[i];
      Rational bound = -rest / a;
      if (a > 0) {
        if (!hi || bound < *hi) hi = bound;
      } else {
        if (!lo || bound > *lo) lo = bound;
      }
    }
    Rational value = 0;
    if (lo && hi)
      value = (*lo + *hi) / 2;
    else if (lo)
      value = *lo + 1;
    else if (hi)
      value = *hi - 1;
    result.witness[var] = value;
  }
  return result;
}

}  // namespace permuton
