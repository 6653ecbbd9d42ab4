#pragma once

#include "certify.hpp"
#include "distance.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "pattern.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace permuton {

struct RemovalReport {
  Permutation input{1};
  Permutation output{1};
  std::int64_t cost = 0;
  Rational normalized_cost;
  bool avoidance_checked = false;
  bool avoidance_verified = false;
  std::vector<Rational> snap_distances;
  Rational max_snap_distance;
  int tie_events = 0;       // snaps with two equidistant nearest atoms
  int collisions = 0;       // indices whose snapped height repeats an earlier one
  int boundary_shifts = 0;  // positions moved off a boundary before querying the fiber
};

enum class XPlacement { Midpoint, Random };
enum class TieRule { Lower, Upper };

struct ResnapOptions {
  XPlacement placement = XPlacement::Midpoint;
  std::uint64_t seed = 0;
  TieRule tie_rule = TieRule::Lower;
  std::optional<Permutation> pattern;  // verified on the output when its order permits
};

inline std::int64_t displacement_cost(const Permutation& a, const Permutation& b) {
  if (a.order() != b.order()) throw PreconditionError("displacement cost needs equal orders");
  std::int64_t total = 0;
  for (int i = 1; i <= a.order(); ++i) total += std::abs(a(i) - b(i));
  return total;
}

namespace detail {

inline int boundary_count(const Model& model) {
  if (const auto* g = std::get_if<TrackPermuton>(&model)) return static_cast<int>(g->pieces().size());
  if (const auto* s = std::get_if<StepPermuton>(&model)) return s->order();
  throw PreconditionError("resnapping needs a model with atomic fibers (tracks or step)");
}

}  // namespace detail

/// Moves every point (x_i, (pi(i) - 1/2)/n) vertically onto the nearest atom of
/// the model's fiber at x_i and reads off the induced permutation. Snapped
/// heights that coincide are ordered by original height, then by index.
inline RemovalReport resnap(const Permutation& pi, const Model& model, const ResnapOptions& options = {}) {
  const int n = pi.order();
  const int pieces = detail::boundary_count(model);
  const Rational shift = make_rational(1, 4 * static_cast<std::int64_t>(n) * pieces);
  Engine e = derived_engine(options.seed, 0);

  RemovalReport rep;
  rep.input = pi;
  std::vector<std::tuple<Rational, Rational, int>> keyed;
  keyed.reserve(n);
  for (int i = 1; i <= n; ++i) {
    Rational x;
    if (options.placement == XPlacement::Midpoint) {
      x = make_rational(2 * i - 1, 2 * n);
    } else {
      const std::uint64_t r = e() >> 32;
      x = (Rational(i - 1) + Rational(BigInt(2 * r + 1), BigInt(std::uint64_t{1} << 33))) / n;
    }
    std::optional<Fiber> fiber;
    try {
      fiber = fiber_at(model, x);
    } catch (const BoundaryError&) {
      ++rep.boundary_shifts;
      fiber = fiber_at(model, x + shift);  // a second boundary hit propagates
    }
    const Rational y = make_rational(2 * pi(i) - 1, 2 * n);
    const auto& atoms = fiber->atoms();
    std::size_t best = 0;
    Rational best_d = abs(atoms[0].y - y);
    bool tie = false;
    for (std::size_t j = 1; j < atoms.size(); ++j) {
      const Rational d = abs(atoms[j].y - y);
      if (d < best_d) {
        best = j, best_d = d, tie = false;
      } else if (d == best_d) {
        tie = true;  // atoms are sorted, so j is the upper candidate
        if (options.tie_rule == TieRule::Upper) best = j;
      }
    }
    if (tie) ++rep.tie_events;
    rep.snap_distances.push_back(best_d);
    if (best_d > rep.max_snap_distance) rep.max_snap_distance = best_d;
    keyed.emplace_back(atoms[best].y, y, i);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keyed[a] < keyed[b]; });
  std::vector<int> out(n);
  for (int r = 0; r < n; ++r) {
    out[order[r]] = r + 1;
    if (r > 0 && std::get<0>(keyed[order[r]]) == std::get<0>(keyed[order[r - 1]])) ++rep.collisions;
  }
  rep.output = Permutation(std::move(out));
  rep.cost = displacement_cost(rep.input, rep.output);
  rep.normalized_cost = make_rational(rep.cost, static_cast<std::int64_t>(n) * n);
  if (options.pattern && options.pattern->order() <= n) {
    rep.avoidance_checked = true;
    rep.avoidance_verified = avoids(*options.pattern, rep.output);
  }
  return rep;
}

struct ExactRemoval {
  Permutation best{1};
  std::int64_t cost = 0;
};

inline constexpr int kMaxExactRemovalOrder = 9;

/// Closest pattern-avoiding permutation in displacement cost, by depth-first
/// construction in lexicographic order with branch and bound. Among optimal
/// answers the lexicographically smallest is returned.
inline ExactRemoval exact_removal(const Permutation& pattern, const Permutation& pi) {
  const int n = pi.order();
  const int k = pattern.order();
  if (n > kMaxExactRemovalOrder) throw SizeLimitError("exact removal supports n <= 9");
  if (k > n) return {pi, 0};
  if (k == 1) throw PreconditionError("every permutation contains the pattern of order 1");

  const auto a = pattern.values();
  std::vector<int> prefix;
  std::vector<char> used(n + 1, 0);
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  std::vector<int> best;

  // Does the prefix contain the pattern with its last point at the newest entry?
  std::vector<int> pick(k);
  auto completes_occurrence = [&]() {
    const int m = static_cast<int>(prefix.size());
    if (m < k) return false;
    pick[k - 1] = m - 1;
    auto rec = [&](auto&& self, int slot, int from) -> bool {
      if (slot < 0) return true;
      for (int p = from; p >= slot; --p) {
        bool ok = true;
        for (int s = slot + 1; s < k && ok; ++s) ok = (prefix[p] < prefix[pick[s]]) == (a[slot] < a[s]);
        if (!ok) continue;
        pick[slot] = p;
        if (self(self, slot - 1, p - 1)) return true;
      }
      return false;
    };
    return rec(rec, k - 2, m - 2);
  };

  // Sorted matching of the remaining targets to the unused values bounds the rest.
  auto remaining_bound = [&](int pos) {
    std::vector<int> targets(pi.values().begin() + pos, pi.values().end());
    std::sort(targets.begin(), targets.end());
    std::int64_t total = 0;
    std::size_t t = 0;
    for (int v = 1; v <= n; ++v)
      if (!used[v]) total += std::abs(v - targets[t++]);
    return total;
  };

  auto dfs = [&](auto&& self, int pos, std::int64_t cost) -> void {
    if (pos == n) {
      if (cost < best_cost) best_cost = cost, best = prefix;
      return;
    }
    for (int v = 1; v <= n; ++v) {
      if (used[v]) continue;
      const std::int64_t c = cost + std::abs(v - pi(pos + 1));
      used[v] = 1;
      prefix.push_back(v);
      if (c + remaining_bound(pos + 1) < best_cost && !completes_occurrence()) self(self, pos + 1, c);
      prefix.pop_back();
      used[v] = 0;
    }
  };
  dfs(dfs, 0, 0);
  return {Permutation(std::move(best)), best_cost};
}

struct PerturbationSpec {
  Rational rate;  // in [0, 1]
  std::uint64_t seed = 0;
};

/// One left-to-right sweep of adjacent transpositions, each taken with
/// probability `rate`. The decision compares a 53-bit draw with the rate exactly.
inline Permutation perturb(const Permutation& pi, const PerturbationSpec& spec) {
  if (spec.rate < 0 || spec.rate > 1) throw PreconditionError("perturbation rate must lie in [0,1]");
  const BigInt p = numerator_of(spec.rate), q = denominator_of(spec.rate);
  const BigInt scale = BigInt(1) << 53;
  Engine e = derived_engine(spec.seed, 1);
  std::vector<int> v(pi.values().begin(), pi.values().end());
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const BigInt draw(e() >> 11);
    if (draw * q < p * scale) std::swap(v[i], v[i + 1]);
  }
  return Permutation(std::move(v));
}

struct ExperimentRow {
  int n = 0;
  Rational rho;
  std::uint64_t seed = 0;
  Rational density;
  std::int64_t cost = 0;
  Rational normalized_cost;
  Rational d_interval;
  bool avoidance_verified = false;
};

struct ExperimentResult {
  AvoidanceCertificate certificate;
  std::vector<ExperimentRow> rows;  // empty when the model is not certified
};

/// For every (n, rate, seed): sample from the model, perturb, resnap, and record
/// the input density, the repair cost and the interval distance between the
/// input and output step permutons. Nothing is sampled unless the model is
/// certified to avoid the pattern. Seeds run first_seed .. first_seed + seed_count - 1.
inline ExperimentResult removal_experiment(const Permutation& pattern, const TrackPermuton& model,
                                           const std::vector<int>& n_list, const std::vector<Rational>& rates,
                                           std::uint64_t first_seed, std::uint64_t seed_count,
                                           const std::string& model_id = "tracks") {
  ExperimentResult res{certify_avoidance(pattern, model, model_id), {}};
  if (!res.certificate.certified()) return res;
  const Model m = model;
  for (int n : n_list)
    for (const auto& rho : rates)
      for (std::uint64_t s = first_seed; s < first_seed + seed_count; ++s) {
        const Permutation sample = sample_permutation(m, n, s);
        const Permutation pi = perturb(sample, {rho, s});
        ResnapOptions opt;
        opt.pattern = pattern;
        const RemovalReport rep = resnap(pi, m, opt);
        ExperimentRow row;
        row.n = n;
        row.rho = rho;
        row.seed = s;
        row.density = pattern.order() <= n ? count_occurrences(pattern, pi).density() : Rational(0);
        row.cost = rep.cost;
        row.normalized_cost = rep.normalized_cost;
        row.d_interval = rect_distance_interval(StepPermuton{pi}, StepPermuton{rep.output}).value;
        row.avoidance_verified = rep.avoidance_checked && rep.avoidance_verified;
        res.rows.push_back(std::move(row));
      }
  return res;
}

inline std::string format_decimal(const Rational& r, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, to_double(r));
  return buf;
}

inline constexpr const char* kExperimentCsvHeader =
    "n,rho,seed,density,cost,normalized_cost,d_interval,avoidance_verified";

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = std::string(kExperimentCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + format_decimal(r.rho) + "," + std::to_string(r.seed) + "," +
           format_decimal(r.density) + "," + std::to_string(r.cost) + "," + format_decimal(r.normalized_cost) + "," +
           format_decimal(r.d_interval) + "," + (r.avoidance_verified ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace permuton
