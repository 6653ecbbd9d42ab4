#include "oracles.hpp"
#include "permuton/removal.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace permuton;

namespace {

Rational r(std::int64_t p, std::int64_t q = 1) { return make_rational(p, q); }

TrackPermuton stripes() { return transpose_tracks(build_zigzag(Permutation::identity(3))); }

std::int64_t ceil_of(const Rational& q) {
  const BigInt f = floor_of(q);
  return static_cast<std::int64_t>(Rational(f) == q ? f : f + 1);
}

}  // namespace

TEST(Displacement, WorkedExamples) {
  EXPECT_EQ(displacement_cost({3, 1, 2}, {3, 1, 2}), 0);
  EXPECT_EQ(displacement_cost({1, 2, 3}, {2, 1, 3}), 2);
  for (int n = 1; n <= 10; ++n) {
    std::int64_t closed = 0;
    for (int i = 1; i <= n; ++i) closed += std::abs(2 * i - n - 1);
    EXPECT_EQ(displacement_cost(Permutation::reverse_identity(n), Permutation::identity(n)), closed);
    EXPECT_EQ(closed, 2 * (n * n / 4));
  }
  EXPECT_THROW(displacement_cost({1, 2}, {1, 2, 3}), PreconditionError);
}

TEST(Resnap, WorkedExampleOnStripes) {
  ResnapOptions opt;
  opt.pattern = Permutation::identity(3);
  const auto rep = resnap({1, 2, 3}, stripes(), opt);
  EXPECT_EQ(rep.output, (Permutation{2, 1, 3}));
  EXPECT_EQ(rep.cost, 2);
  EXPECT_EQ(rep.normalized_cost, r(2, 9));
  EXPECT_TRUE(rep.avoidance_checked);
  EXPECT_TRUE(rep.avoidance_verified);
  EXPECT_EQ(rep.tie_events, 1);
  EXPECT_EQ(rep.snap_distances, (std::vector<Rational>{r(1, 4), r(1, 4), r(1, 4)}));
  EXPECT_EQ(rep.max_snap_distance, r(1, 4));
}

TEST(Resnap, UpperTieRuleTakesTheOtherAtom) {
  ResnapOptions opt;
  opt.tie_rule = TieRule::Upper;
  const auto rep = resnap({1, 2, 3}, stripes(), opt);
  EXPECT_EQ(rep.output, (Permutation{1, 3, 2}));
  EXPECT_EQ(rep.tie_events, 1);
}

TEST(Resnap, DiagonalForcesTheIdentity) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pi = oracle::random_permutation(1 + rep, rng);
    const auto out = resnap(pi, identity_permuton());
    EXPECT_EQ(out.output, Permutation::identity(pi.order()));
    EXPECT_EQ(out.cost, displacement_cost(pi, Permutation::identity(pi.order())));
  }
}

TEST(Resnap, PermutationsOnTheAtomsAreStable) {
  // Rank heights (r - 1/2)/n need not sit nearest to the atom a point came from,
  // so an atom-supported input can move once; the output is then a fixed point.
  const auto g = stripes();
  int moved = 0;
  for (int n = 1; n <= 10; ++n)
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<Rational> ys;
      for (int i = 1; i <= n; ++i) {
        const Rational x = r(2 * i - 1, 2 * n);
        ys.push_back(mask >> (i - 1) & 1 ? Rational((1 - x) / 2) : Rational(1 - x / 2));
      }
      std::vector<Rational> sorted = ys;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
      std::vector<int> v(n);
      for (int i = 0; i < n; ++i)
        v[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), ys[i]) - sorted.begin()) + 1;
      const auto out = resnap(Permutation(v), g);
      if (n <= 4) ASSERT_EQ(out.cost, 0) << format_permutation(Permutation(v));
      if (n >= 3) ASSERT_TRUE(avoids(Permutation::identity(3), out.output));
      moved += out.cost != 0;
      ASSERT_EQ(resnap(out.output, g).output, out.output);
    }
  EXPECT_GT(moved, 0);
  const auto five = resnap({1, 5, 4, 3, 2}, g);
  EXPECT_EQ(five.output, (Permutation{2, 5, 4, 3, 1}));
  EXPECT_EQ(five.tie_events, 1);
  const auto six = resnap({1, 6, 5, 4, 3, 2}, g);
  EXPECT_EQ(six.output, (Permutation{2, 6, 5, 4, 3, 1}));
  EXPECT_EQ(six.cost, 2);
  EXPECT_EQ(six.tie_events, 0);
}

TEST(Resnap, ModelSamplesAreFixedUnlessTied) {
  const Model g = stripes();
  for (int n : {5, 30, 200})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = resnap(sample_permutation(g, n, seed), g);
      if (out.tie_events == 0) ASSERT_EQ(out.cost, 0) << n << " " << seed;
    }
}

TEST(Resnap, AlwaysReturnsABijection) {
  std::mt19937_64 rng(3);
  const TrackPermuton flat({Piece{0, r(1, 2), {Track{0, r(1, 4), r(1, 2)}, Track{0, r(3, 4), r(1, 2)}}},
                            Piece{r(1, 2), 1, {Track{0, r(1, 4), 1}}}});
  const std::vector<Model> models{stripes(), identity_permuton(), build_zigzag({2, 4, 1, 3}), flat,
                                  StepPermuton{{3, 1, 2}}};
  for (int rep = 0; rep < 100; ++rep) {
    const auto pi = oracle::random_permutation(1 + rep % 30, rng);
    for (const auto& m : models) {
      const auto out = resnap(pi, m);
      ASSERT_EQ(out.output.order(), pi.order());
      ASSERT_EQ(out.cost, displacement_cost(pi, out.output));
      ASSERT_GE(out.normalized_cost, 0);
      ASSERT_LE(out.normalized_cost, 1);
    }
  }
  EXPECT_GT(resnap(Permutation::identity(20), flat).collisions, 0);
}

TEST(Resnap, DeterministicInMidpointMode) {
  std::mt19937_64 rng(4);
  const auto pi = oracle::random_permutation(60, rng);
  const auto a = resnap(pi, stripes()), b = resnap(pi, stripes());
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(a.snap_distances, b.snap_distances);
  EXPECT_EQ(a.tie_events, b.tie_events);
}

TEST(Resnap, RandomPlacementStaysInsideCells) {
  ResnapOptions opt;
  opt.placement = XPlacement::Random;
  opt.seed = 9;
  opt.pattern = Permutation::identity(3);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pi = oracle::random_permutation(40, rng);
    const auto a = resnap(pi, stripes(), opt), b = resnap(pi, stripes(), opt);
    EXPECT_EQ(a.output, b.output);
    EXPECT_TRUE(a.avoidance_verified);
    EXPECT_EQ(a.boundary_shifts, 0);
  }
}

TEST(Resnap, BoundaryMidpointsAreShifted) {
  // n = 1 puts the only midpoint on the cut at 1/2
  const auto rep = resnap({1}, build_zigzag(Permutation::identity(3)));
  EXPECT_EQ(rep.boundary_shifts, 1);
  EXPECT_EQ(rep.output, Permutation{1});
  EXPECT_THROW(resnap({1}, UniformPermuton{}), PreconditionError);
}

TEST(Resnap, RankShiftBoundOnModelSamples) {
  const Model g = stripes();
  for (int n : {20, 50, 100, 300})
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      for (const auto& rho : {r(0), r(1, 20), r(1, 5)}) {
        const auto pi = perturb(sample_permutation(g, n, seed), {rho, seed});
        const auto rep = resnap(pi, g);
        std::int64_t far = 0, near = 0;
        for (const auto& d : rep.snap_distances) {
          if (d > r(1, 2 * n)) ++far;
          near += ceil_of(d * n);
        }
        ASSERT_LE(rep.cost, 2 * n * far + 2 * near) << "n=" << n << " seed=" << seed;
      }
}

TEST(ExactRemoval, WorkedExamples) {
  const auto a = exact_removal({2, 1}, {2, 1, 3});
  EXPECT_EQ(a.best, (Permutation{1, 2, 3}));
  EXPECT_EQ(a.cost, 2);
  const auto b = exact_removal({1, 2, 3}, {3, 1, 2});
  EXPECT_EQ(b.best, (Permutation{3, 1, 2}));
  EXPECT_EQ(b.cost, 0);
  const auto c = exact_removal({1, 2, 3}, {1, 2, 3});
  EXPECT_EQ(c.cost, 2);
  EXPECT_EQ(displacement_cost({1, 2, 3}, {2, 1, 3}), 2);
  EXPECT_EQ(displacement_cost({1, 2, 3}, {1, 3, 2}), 2);
  EXPECT_EQ(c.best, (Permutation{1, 3, 2}));
}

TEST(ExactRemoval, Limits) {
  EXPECT_THROW(exact_removal({1, 2}, Permutation::identity(10)), SizeLimitError);
  EXPECT_THROW(exact_removal({1}, {2, 1}), PreconditionError);
  EXPECT_EQ(exact_removal({1, 2, 3}, {2, 1}).cost, 0);
}

TEST(ExactRemoval, MatchesFullEnumeration) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 120; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int k = 2 + static_cast<int>(rng() % std::min(3, n - 1));
    const auto A = oracle::random_permutation(k, rng), pi = oracle::random_permutation(n, rng);
    const auto got = exact_removal(A, pi);
    const auto [best, cost] = oracle::removal(A, pi);
    ASSERT_EQ(got.cost, cost) << format_permutation(A) << " " << format_permutation(pi);
    ASSERT_EQ(got.best, best);
  }
}

TEST(ExactRemoval, ZeroExactlyWhenAvoiding) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 6 + rep % 3;
    const auto A = oracle::random_permutation(3, rng), pi = oracle::random_permutation(n, rng);
    ASSERT_EQ(exact_removal(A, pi).cost == 0, avoids(A, pi));
  }
}

TEST(ExactRemoval, NeverWorseThanResnapping) {
  std::mt19937_64 rng(8);
  const Model g = stripes();
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 6 + rep % 4;
    const auto pi = oracle::random_permutation(n, rng);
    ASSERT_LE(exact_removal(Permutation::identity(3), pi).cost, resnap(pi, g).cost);
  }
}

TEST(Perturb, WorkedExamples) {
  std::mt19937_64 rng(9);
  const auto pi = oracle::random_permutation(30, rng);
  EXPECT_EQ(perturb(pi, {0, 5}), pi);
  EXPECT_EQ(perturb(Permutation::identity(3), {1, 5}), (Permutation{2, 3, 1}));
  EXPECT_EQ(perturb(pi, {r(1, 3), 4}), perturb(pi, {r(1, 3), 4}));
  EXPECT_THROW(perturb(pi, {r(3, 2), 0}), PreconditionError);
}

TEST(Perturb, MeanDisplacementWithinTwiceTheRate) {
  const int n = 200;
  for (const auto& rho : {r(1, 20), r(1, 5), r(1, 2)}) {
    double total = 0, squares = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto c = static_cast<double>(displacement_cost(Permutation::identity(n), perturb(Permutation::identity(n), {rho, seed})));
      total += c;
      squares += c * c;
    }
    const double mean = total / 100, stderr_of_mean = std::sqrt((squares / 100 - mean * mean) / 99);
    EXPECT_LE(mean, 2 * to_double(rho) * n + 3 * stderr_of_mean);
  }
}

TEST(Experiment, RowsAreVerifiedAndQuietAtZeroRate) {
  const auto res = removal_experiment(Permutation::identity(3), stripes(), {50, 120}, {r(0), r(1, 10)}, 3, 4);
  ASSERT_TRUE(res.certificate.certified());
  ASSERT_EQ(res.rows.size(), 2u * 2u * 4u);
  for (const auto& row : res.rows) {
    EXPECT_TRUE(row.avoidance_verified);
    EXPECT_EQ(row.normalized_cost, make_rational(row.cost, static_cast<std::int64_t>(row.n) * row.n));
    if (row.rho == 0) {
      EXPECT_EQ(row.density, 0);
      EXPECT_LE(row.normalized_cost, r(1, row.n));
    }
  }
  EXPECT_EQ(res.rows.front().seed, 3u);
  EXPECT_EQ(res.rows.back().seed, 6u);
}

TEST(Experiment, RefusesUncertifiedModels) {
  const auto res = removal_experiment(Permutation::identity(3), identity_permuton(), {20}, {r(0)}, 0, 3);
  EXPECT_FALSE(res.certificate.certified());
  EXPECT_TRUE(res.rows.empty());
}

TEST(Experiment, CsvLayout) {
  const auto res = removal_experiment({2, 1}, identity_permuton(), {10}, {r(1, 4)}, 0, 2);
  const auto csv = experiment_csv(res.rows);
  EXPECT_EQ(csv.rfind(std::string(kExperimentCsvHeader) + "\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("10,0.2500000000,0,"), std::string::npos);
}
