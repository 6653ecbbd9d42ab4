#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "pattern.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace permuton {

using Engine = std::mt19937_64;

/// Engine for the index-th independent stream derived from a user seed.
inline Engine derived_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

/// Draws single points (x, y) from a model in double precision. Boundary x values
/// (null events) are redrawn internally.
class PointSampler {
 public:
  explicit PointSampler(const Model& model) : kind_(model.index()) {
    if (const auto* g = std::get_if<TrackPermuton>(&model)) {
      for (const auto& p : g->pieces()) {
        PieceTable t;
        t.x_hi = to_double(p.x_hi);
        double acc = 0;
        for (const auto& tr : p.tracks) {
          acc += to_double(tr.weight);
          t.cumulative.push_back(acc);
          t.slope.push_back(to_double(tr.slope));
          t.intercept.push_back(to_double(tr.intercept));
        }
        t.cumulative.back() = 1.0;
        pieces_.push_back(std::move(t));
      }
    } else if (const auto* s = std::get_if<StepPermuton>(&model)) {
      step_.assign(s->base.values().begin(), s->base.values().end());
    }
  }

  std::pair<double, double> draw(Engine& e) const {
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      switch (kind_) {
        case 0: {
          const double x = uniform01(e);
          auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                                     [](const PieceTable& p, double v) { return p.x_hi < v; });
          if (it == pieces_.end() || x == it->x_hi || x == 0.0) continue;
          const double u = uniform01(e);
          std::size_t j = std::upper_bound(it->cumulative.begin(), it->cumulative.end(), u) - it->cumulative.begin();
          j = std::min(j, it->cumulative.size() - 1);
          return {x, it->slope[j] * x + it->intercept[j]};
        }
        case 1: {
          // Cells are filled along their increasing diagonal: a permuton with the
          // same cell masses as the step representation whose y values never tie.
          const int n = static_cast<int>(step_.size());
          const double x = uniform01(e);
          const double scaled = x * n;
          const int cell = static_cast<int>(scaled);
          const double frac = scaled - cell;
          if (frac == 0.0) continue;
          return {x, (step_[cell] - 1 + frac) / n};
        }
        case 2: {
          const std::uint64_t bits = e() >> 12;  // 26 base-4 digits
          const std::uint64_t swapped = digit_swap_index(bits, 26);
          return {(static_cast<double>(bits) + 0.5) * 0x1.0p-52, (static_cast<double>(swapped) + 0.5) * 0x1.0p-52};
        }
        default: {
          const double x = uniform01(e);
          return {x, uniform01(e)};
        }
      }
    }
    throw std::runtime_error("sampler kept hitting null events; degenerate model");
  }

 private:
  static constexpr int kMaxRetries = 1000;

  struct PieceTable {
    double x_hi = 1;
    std::vector<double> cumulative, slope, intercept;
  };

  std::size_t kind_;
  std::vector<PieceTable> pieces_;
  std::vector<int> step_;
};

/// Pattern induced by `count` i.i.d. points; nullopt when x or y values tie.
inline std::optional<Permutation> induced_by_sample(const PointSampler& sampler, Engine& e, int count,
                                                    std::vector<Point<double>>& scratch) {
  scratch.clear();
  for (int i = 0; i < count; ++i) {
    auto [x, y] = sampler.draw(e);
    scratch.push_back({x, y});
  }
  std::sort(scratch.begin(), scratch.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  for (std::size_t i = 1; i < scratch.size(); ++i)
    if (scratch[i].x == scratch[i - 1].x) return std::nullopt;
  std::vector<double> ys;
  ys.reserve(scratch.size());
  for (const auto& p : scratch) ys.push_back(p.y);
  std::vector<double> sorted = ys;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return std::nullopt;
  return standardize<double>(ys);
}

/// n i.i.d. points from the model read left to right. Configurations with tied
/// coordinates are redrawn; persistent ties mean the model is degenerate.
inline Permutation sample_permutation(const Model& model, int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("sample size must be >= 1");
  PointSampler sampler(model);
  Engine e = derived_engine(seed, 0);
  std::vector<Point<double>> scratch;
  for (int attempt = 0; attempt < 100; ++attempt)
    if (auto pi = induced_by_sample(sampler, e, n, scratch)) return *pi;
  throw std::runtime_error("sample_permutation: coordinates keep colliding; degenerate model");
}

}  // namespace permuton
