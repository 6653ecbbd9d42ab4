#pragma once

#include "models.hpp"
#include "pattern.hpp"
#include "sampling.hpp"

#include <cmath>
#include <cstdint>

namespace permuton {

/// Monte Carlo pattern density with a distribution-free 99% Hoeffding interval.
struct DensityEstimate {
  double estimate = 0;
  std::uint64_t hits = 0;
  std::uint64_t sample_count = 0;
  double ci_half_width = 0;
  std::uint64_t seed = 0;
};

inline double hoeffding_half_width(std::uint64_t samples, double alpha = 0.01) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
}

/// Fraction of N independent k-point samples from the model that induce A.
/// Samples are drawn in fixed chunks, each from its own derived stream, so the
/// result depends only on (seed, N).
inline DensityEstimate density_monte_carlo(const Permutation& pattern, const Model& model, std::uint64_t samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("sample count must be >= 1");
  constexpr std::uint64_t kChunk = 4096;
  const int k = pattern.order();
  const auto a = pattern.values();
  PointSampler sampler(model);
  std::vector<std::pair<double, double>> pts(k);

  DensityEstimate est;
  est.sample_count = samples;
  est.seed = seed;
  for (std::uint64_t chunk = 0; chunk * kChunk < samples; ++chunk) {
    Engine e = derived_engine(seed, chunk + 1);
    const std::uint64_t end = std::min(samples, (chunk + 1) * kChunk);
    for (std::uint64_t s = chunk * kChunk; s < end; ++s) {
      bool tied = true;
      while (tied) {
        for (auto& p : pts) p = sampler.draw(e);
        std::sort(pts.begin(), pts.end());
        tied = false;
        for (int i = 0; i < k && !tied; ++i)
          for (int j = i + 1; j < k && !tied; ++j) tied = pts[i].first == pts[j].first || pts[i].second == pts[j].second;
      }
      bool match = true;
      for (int i = 0; i < k && match; ++i)
        for (int j = i + 1; j < k && match; ++j) match = (pts[i].second < pts[j].second) == (a[i] < a[j]);
      if (match) ++est.hits;
    }
  }
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(samples);
  est.ci_half_width = hoeffding_half_width(samples);
  return est;
}

}  // namespace permuton
