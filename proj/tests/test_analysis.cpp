#include "oracles.hpp"
#include "permuton/certify.hpp"
#include "permuton/density.hpp"
#include "permuton/distance.hpp"
#include "permuton/pattern.hpp"
#include "permuton/stanley_wilf.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace permuton;

namespace {

Rational r(std::int64_t p, std::int64_t q = 1) { return make_rational(p, q); }

TrackPermuton stripes() { return transpose_tracks(build_zigzag(Permutation::identity(3))); }

std::vector<oracle::Segment> segments(const TrackPermuton& g) {
  std::vector<oracle::Segment> out;
  for (const auto& p : g.pieces())
    for (const auto& t : p.tracks)
      out.push_back({to_double(p.x_lo), to_double(p.x_hi), to_double(t.slope), to_double(t.intercept), to_double(t.weight)});
  return out;
}

double mass(const DistanceOperand& op, double x0, double x1, double y0, double y1) {
  if (const auto* s = std::get_if<StepPermuton>(&op)) return oracle::step_mass(s->base, x0, x1, y0, y1);
  return oracle::track_mass(segments(std::get<TrackPermuton>(op)), x0, x1, y0, y1);
}

double dense_lower_bound(const DistanceOperand& a, const DistanceOperand& b, int grid) {
  return oracle::dense_interval_discrepancy(
      [&](double x0, double x1, double y0, double y1) { return mass(a, x0, x1, y0, y1) - mass(b, x0, x1, y0, y1); },
      grid);
}

void expect_witness_attains_value(const DistanceOperand& a, const DistanceOperand& b, const DistanceResult& d) {
  ASSERT_EQ(d.kind, DistanceResult::Witness::Intervals);
  const Rational diff = rectangle_mass(a, d.s_lo, d.s_hi, d.t_lo, d.t_hi) - rectangle_mass(b, d.s_lo, d.s_hi, d.t_lo, d.t_hi);
  EXPECT_EQ(abs(diff), d.value);
  EXPECT_NEAR(std::abs(mass(a, to_double(d.s_lo), to_double(d.s_hi), to_double(d.t_lo), to_double(d.t_hi)) -
                       mass(b, to_double(d.s_lo), to_double(d.s_hi), to_double(d.t_lo), to_double(d.t_hi))),
              to_double(d.value), 1e-12);
}

/// Checks a feasible verdict independently: the witness sits on the named tracks,
/// strictly inside the pieces, left to right, and induces the pattern.
void expect_valid_witness(const Permutation& A, const TrackPermuton& g, const AssignmentVerdict& v) {
  const int k = A.order();
  ASSERT_EQ(static_cast<int>(v.witness_x.size()), k);
  std::vector<int> ranks(k);
  for (int i = 0; i < k; ++i) {
    const auto& piece = g.pieces()[v.slots[i].piece];
    const auto& track = piece.tracks[v.slots[i].track];
    EXPECT_LT(piece.x_lo, v.witness_x[i]);
    EXPECT_LT(v.witness_x[i], piece.x_hi);
    EXPECT_EQ(v.witness_y[i], track.slope * v.witness_x[i] + track.intercept);
    if (i > 0) EXPECT_LT(v.witness_x[i - 1], v.witness_x[i]);
  }
  for (int i = 0; i < k; ++i) {
    ranks[i] = 1;
    for (int j = 0; j < k; ++j) ranks[i] += v.witness_y[j] < v.witness_y[i];
  }
  EXPECT_EQ(ranks, oracle::values(A));
}

}  // namespace

TEST(IntervalDistance, TransposedPairIsOneHalf) {
  const StepPermuton a{{1, 2}}, b{{2, 1}};
  const auto d = rect_distance_interval(a, b);
  EXPECT_EQ(d.value, r(1, 2));
  expect_witness_attains_value(a, b, d);
  EXPECT_EQ(rectangle_mass(a, 0, r(1, 2), 0, r(1, 2)) - rectangle_mass(b, 0, r(1, 2), 0, r(1, 2)), r(1, 2));
}

TEST(IntervalDistance, ZeroOnIdenticalInputs) {
  for (const DistanceOperand& op :
       {DistanceOperand{StepPermuton{{3, 1, 2}}}, DistanceOperand{stripes()}, DistanceOperand{identity_permuton()}})
    EXPECT_EQ(rect_distance_interval(op, op).value, 0);
}

TEST(IntervalDistance, StepPairsMatchGridEnumeration) {
  std::mt19937_64 rng(40);
  for (int rep = 0; rep < 60; ++rep) {
    const int n1 = 1 + static_cast<int>(rng() % 9), n2 = rep % 3 == 0 ? n1 : 1 + static_cast<int>(rng() % 9);
    const auto a = oracle::random_permutation(n1, rng), b = oracle::random_permutation(n2, rng);
    const auto d = rect_distance_interval(StepPermuton{a}, StepPermuton{b});
    ASSERT_EQ(d.value, oracle::interval_distance(a, b)) << format_permutation(a) << " vs " << format_permutation(b);
    expect_witness_attains_value(StepPermuton{a}, StepPermuton{b}, d);
  }
}

TEST(IntervalDistance, StaircaseAgainstTheDiagonal) {
  EXPECT_EQ(rect_distance_interval(StepPermuton{{1}}, identity_permuton()).value, r(1, 4));
  for (int n = 2; n <= 8; ++n) {
    const StepPermuton s{Permutation::identity(n)};
    const auto d = rect_distance_interval(s, identity_permuton());
    EXPECT_LE(d.value, r(1, n));
    EXPECT_EQ(d.value, r(1, 2 * n));
    expect_witness_attains_value(s, identity_permuton(), d);
  }
}

TEST(IntervalDistance, ZigzagAgainstItsTranspose) {
  const DistanceOperand a = build_zigzag(Permutation::identity(3)), b = stripes();
  const auto d = rect_distance_interval(a, b);
  EXPECT_EQ(d.value, r(1, 5));
  expect_witness_attains_value(a, b, d);
  const double lower = dense_lower_bound(a, b, 40);
  EXPECT_LE(lower, to_double(d.value) + 1e-12);
  EXPECT_GT(lower, 0.19);
}

TEST(IntervalDistance, NeverBelowADenseGridSearch) {
  std::mt19937_64 rng(6);
  std::vector<DistanceOperand> tracks{identity_permuton(), stripes(), build_zigzag({1, 3, 2}),
                                      transpose_tracks(build_zigzag({2, 4, 1, 3}))};
  for (int rep = 0; rep < 8; ++rep) {
    const DistanceOperand& t = tracks[rep % tracks.size()];
    const DistanceOperand s = StepPermuton{oracle::random_permutation(1 + rep % 5, rng)};
    const auto d = rect_distance_interval(s, t);
    expect_witness_attains_value(s, t, d);
    EXPECT_LE(dense_lower_bound(s, t, 24), to_double(d.value) + 1e-12);
  }
  const auto d = rect_distance_interval(tracks[2], tracks[3]);
  expect_witness_attains_value(tracks[2], tracks[3], d);
  EXPECT_LE(dense_lower_bound(tracks[2], tracks[3], 24), to_double(d.value) + 1e-12);
}

TEST(IntervalDistance, PseudometricOnTenModels) {
  const std::vector<DistanceOperand> models{
      StepPermuton{{1, 2}},
      StepPermuton{{2, 1}},
      StepPermuton{{2, 3, 1}},
      StepPermuton{{2, 4, 1, 3}},
      distance_operand(UniformPermuton{}),
      distance_operand(DigitSwapPermuton{}, 1),
      identity_permuton(),
      build_zigzag(Permutation::identity(3)),
      stripes(),
      build_zigzag({1, 3, 2}),
  };
  const std::size_t m = models.size();
  std::vector<std::vector<Rational>> d(m, std::vector<Rational>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) d[i][j] = rect_distance_interval(models[i], models[j]).value;
  for (std::size_t i = 0; i < m; ++i) {
    EXPECT_EQ(d[i][i], 0);
    for (std::size_t j = 0; j < m; ++j) {
      EXPECT_EQ(d[i][j], d[j][i]) << i << " " << j;
      EXPECT_GE(d[i][j], 0);
      EXPECT_LE(d[i][j], 1);
      for (std::size_t l = 0; l < m; ++l) EXPECT_LE(d[i][l], d[i][j] + d[j][l]) << i << " " << j << " " << l;
    }
  }
}

TEST(CutDistance, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    const int n1 = 1 + static_cast<int>(rng() % 5), n2 = rep % 2 ? n1 : 1 + static_cast<int>(rng() % 5);
    if (std::lcm(n1, n2) > 5) continue;
    const auto a = oracle::random_permutation(n1, rng), b = oracle::random_permutation(n2, rng);
    const auto d = cut_distance_bruteforce(StepPermuton{a}, StepPermuton{b});
    ASSERT_EQ(d.value, oracle::cut_distance(a, b));
    EXPECT_EQ(abs(cell_union_difference(StepPermuton{a}, StepPermuton{b}, d.grid, d.s_cells, d.t_cells)), d.value);
  }
}

TEST(CutDistance, WorkedExamplesAndLimit) {
  EXPECT_EQ(cut_distance_bruteforce(StepPermuton{{1, 2}}, StepPermuton{{2, 1}}).value, r(1, 2));
  EXPECT_EQ(cut_distance_bruteforce(StepPermuton{{3, 1, 2}}, StepPermuton{{3, 1, 2}}).value, 0);
  EXPECT_THROW(cut_distance_bruteforce(StepPermuton{Permutation::identity(3)}, StepPermuton{Permutation::identity(5)}),
               SizeLimitError);
}

TEST(CutDistance, DominatesTheIntervalVariant) {
  std::mt19937_64 rng(50);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto a = oracle::random_permutation(n, rng), b = oracle::random_permutation(n, rng);
    const auto cut = cut_distance_bruteforce(StepPermuton{a}, StepPermuton{b});
    ASSERT_GE(cut.value, rect_distance_interval(StepPermuton{a}, StepPermuton{b}).value);
    ASSERT_EQ(abs(cell_union_difference(StepPermuton{a}, StepPermuton{b}, cut.grid, cut.s_cells, cut.t_cells)),
              cut.value);
  }
}

TEST(Certify, IdentityZigzagAvoidsIdentity) {
  const auto cert = certify_avoidance(Permutation::identity(3), build_zigzag(Permutation::identity(3)));
  EXPECT_TRUE(cert.certified());
  EXPECT_EQ(cert.assignments.size(), 4u);
  for (const auto& a : cert.assignments) EXPECT_FALSE(a.refutation.empty());
}

TEST(Certify, DescentsAreRealisedOnAFallingPiece) {
  const auto g = build_zigzag(Permutation::identity(3));
  const auto cert = certify_avoidance({2, 1}, g);
  ASSERT_FALSE(cert.certified());
  const auto* w = cert.witness();
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->slots, (std::vector<Slot>{{0, 0}, {0, 0}}));
  for (const auto& a : cert.assignments)
    if (a.feasible) expect_valid_witness({2, 1}, g, a);
}

TEST(Certify, DiagonalAvoidsDescents) { EXPECT_TRUE(certify_avoidance({2, 1}, identity_permuton()).certified()); }

TEST(Certify, AssignmentsAreCompleteAndDistinct) {
  const auto g = stripes();
  for (int k = 1; k <= 4; ++k) {
    const auto cert = certify_avoidance(Permutation::identity(k), g);
    // one piece with two tracks: every track word of length k
    EXPECT_EQ(cert.assignments.size(), std::size_t{1} << k);
  }
  const auto z = build_zigzag({1, 4, 2, 3});
  const auto cert = certify_avoidance({1, 3, 2}, z);
  EXPECT_EQ(cert.assignments.size(), oracle::choose(3 + 3 - 1, 3));
  for (std::size_t i = 0; i < cert.assignments.size(); ++i)
    for (std::size_t j = i + 1; j < cert.assignments.size(); ++j)
      EXPECT_NE(cert.assignments[i].slots, cert.assignments[j].slots);
  EXPECT_THROW(certify_avoidance(Permutation::identity(9), z), PreconditionError);
}

TEST(Certify, EveryZigzagAvoidsItsPattern) {
  for (int k = 3; k <= 4; ++k)
    for (const auto& s : all_permutations(k)) ASSERT_TRUE(certify_avoidance(s, build_zigzag(s)).certified());
}

TEST(Certify, WitnessesInduceThePattern) {
  for (const auto& A : all_permutations(3))
    for (const auto& s : all_permutations(3)) {
      const auto g = transpose_tracks(build_zigzag(s));
      const auto cert = certify_avoidance(A, g);
      for (const auto& a : cert.assignments)
        if (a.feasible) expect_valid_witness(A, g, a);
    }
}

TEST(Certify, TransposeMatchesInversePattern) {
  for (int ks = 2; ks <= 4; ++ks)
    for (const auto& s : all_permutations(ks)) {
      const auto g = build_zigzag(s);
      const auto gt = transpose_tracks(g);
      for (int k = 1; k <= 4; ++k)
        for (const auto& A : all_permutations(k))
          ASSERT_EQ(certify_avoidance(A, gt).certified(), certify_avoidance(inverse(A), g).certified())
              << format_permutation(A) << " on zigzag " << format_permutation(s);
    }
}

TEST(Certify, CertifiedModelsNeverSampleThePattern) {
  const Model g = stripes();
  ASSERT_TRUE(certify_avoidance(Permutation::identity(3), stripes()).certified());
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    EXPECT_EQ(density_monte_carlo(Permutation::identity(3), g, 200000, seed).hits, 0u);
  const Model z = build_zigzag({2, 4, 1, 3});
  ASSERT_TRUE(certify_avoidance({2, 4, 1, 3}, std::get<TrackPermuton>(z)).certified());
  EXPECT_EQ(density_monte_carlo({2, 4, 1, 3}, z, 200000, 0).hits, 0u);
}

TEST(Certify, ReportHasOneLinePerAssignment) {
  const auto cert = certify_avoidance({2, 1}, build_zigzag(Permutation::identity(3)), "zigzag_id3");
  const std::string text = format_certificate(cert);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(cert.assignments.size() + 1));
  EXPECT_EQ(text.rfind("WITNESS pattern=", 0), 0u);
  EXPECT_NE(text.find("model=zigzag_id3"), std::string::npos);
}

TEST(MonteCarlo, UniformOrderThreeIsOneSixth) {
  for (const auto& A : all_permutations(3)) {
    const auto est = density_monte_carlo(A, UniformPermuton{}, 200000, 1);
    EXPECT_NEAR(est.estimate, 1.0 / 6, est.ci_half_width);
  }
}

TEST(MonteCarlo, StripesDescentDensity) {
  // two decreasing tracks, independent choices: a pair is a descent unless it spans the stripes upward
  const auto est = density_monte_carlo({2, 1}, stripes(), 400000, 0);
  EXPECT_NEAR(est.estimate, 0.75, est.ci_half_width);
}

TEST(SampleConvergence, DescentDensityApproachesTheLimit) {
  const Model g = stripes();
  const double limit = density_monte_carlo({2, 1}, g, 1000000, 0).estimate;
  std::vector<double> medians;
  for (int n : {50, 100, 200, 400}) {
    std::vector<double> gaps;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      gaps.push_back(std::abs(to_double(count_occurrences({2, 1}, sample_permutation(g, n, seed)).density()) - limit));
    std::sort(gaps.begin(), gaps.end());
    medians.push_back((gaps[9] + gaps[10]) / 2);
  }
  for (std::size_t i = 1; i < medians.size(); ++i) EXPECT_LE(medians[i], medians[i - 1]) << "step " << i;
}

TEST(Generator, MatchesChoiceEnumeration) {
  for (int n = 1; n <= 10; ++n) {
    std::vector<std::vector<Rational>> heights(n);
    for (int i = 1; i <= n; ++i) {
      const Rational x = r(2 * i - 1, 2 * n);
      heights[i - 1] = {(1 - x) / 2, 1 - x / 2};
    }
    const auto [perms, skipped] = oracle::choice_permutations(heights);
    const auto rep = sw_generate(stripes(), n, GenerationMode::Exhaustive, Permutation::identity(3));
    EXPECT_EQ(rep.distinct_count, perms.size()) << "n=" << n;
    EXPECT_EQ(rep.discarded_ties, skipped);
    EXPECT_EQ(rep.per_choice_total, std::uint64_t{1} << n);
    EXPECT_DOUBLE_EQ(rep.nth_root, std::pow(double(perms.size()), 1.0 / n));
    EXPECT_EQ(rep.pattern_checked, n >= 3);
    if (n >= 3)
      EXPECT_EQ(rep.all_avoiding, std::all_of(perms.begin(), perms.end(), [](const std::vector<int>& p) {
                  return avoids(Permutation::identity(3), Permutation(p));
                }));
  }
}

TEST(Generator, TrivialCases) {
  EXPECT_EQ(sw_generate(stripes(), 1, GenerationMode::Exhaustive).distinct_count, 1u);
  EXPECT_EQ(sw_generate(identity_permuton(), 9, GenerationMode::Exhaustive).distinct_count, 1u);
  const auto single = sw_generate(build_zigzag({2, 4, 1, 3}), 9, GenerationMode::Exhaustive);
  EXPECT_EQ(single.per_choice_total, 1u);
  EXPECT_EQ(single.distinct_count + single.discarded_ties, 1u);
  EXPECT_THROW(sw_generate(stripes(), 25, GenerationMode::Exhaustive), SizeLimitError);
}

TEST(Generator, RandomModeIsSeeded) {
  const auto a = sw_generate(stripes(), 30, GenerationMode::Random, std::nullopt, 4, 500);
  const auto b = sw_generate(stripes(), 30, GenerationMode::Random, std::nullopt, 4, 500);
  EXPECT_EQ(a.distinct_count, b.distinct_count);
  EXPECT_EQ(a.per_choice_total, 500u);
  EXPECT_LE(a.distinct_count, 500u);
}
