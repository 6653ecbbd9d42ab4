#pragma once

#include "errors.hpp"
#include "fiber.hpp"
#include "permutation.hpp"
#include "rational.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace permuton {

/// y = slope * x + intercept over the owning piece, carrying `weight` of every fiber.
struct Track {
  Rational slope;
  Rational intercept;
  Rational weight;

  Rational at(const Rational& x) const { return slope * x + intercept; }

  friend bool operator==(const Track&, const Track&) = default;
  friend auto operator<=>(const Track& a, const Track& b) {
    if (a.slope != b.slope) return a.slope < b.slope ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.intercept != b.intercept)
      return a.intercept < b.intercept ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.weight != b.weight) return a.weight < b.weight ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

struct Piece {
  Rational x_lo;
  Rational x_hi;
  std::vector<Track> tracks;

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Piecewise-linear permuton with atomic fibers. Pieces partition [0,1]; inside a
/// piece every fiber is the set of track heights weighted by the track weights.
class TrackPermuton {
 public:
  explicit TrackPermuton(std::vector<Piece> pieces) : pieces_(std::move(pieces)) { validate(); }

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  /// Index of the piece whose open interval holds x (x = 0 and x = 1 map to the
  /// outer pieces). Interior breakpoints raise BoundaryError.
  std::size_t piece_index_at(const Rational& x) const {
    if (x < 0 || x > 1) throw PreconditionError("x outside [0,1]");
    for (std::size_t p = 0; p < pieces_.size(); ++p) {
      const bool last = p + 1 == pieces_.size();
      if (!last && x == pieces_[p].x_hi)
        throw BoundaryError("x = " + format_rational(x) + " lies on a piece boundary");
      if (x < pieces_[p].x_hi || last) return p;
    }
    return pieces_.size() - 1;
  }

  /// Tracks sorted within pieces, adjacent pieces with identical tracks merged.
  TrackPermuton canonical() const {
    std::vector<Piece> out;
    for (Piece p : pieces_) {
      std::sort(p.tracks.begin(), p.tracks.end());
      if (!out.empty() && out.back().tracks == p.tracks)
        out.back().x_hi = p.x_hi;
      else
        out.push_back(std::move(p));
    }
    return TrackPermuton(std::move(out));
  }

  bool has_zero_slope() const {
    for (const auto& p : pieces_)
      for (const auto& t : p.tracks)
        if (t.slope == 0) return true;
    return false;
  }

  friend bool operator==(const TrackPermuton&, const TrackPermuton&) = default;

 private:
  void validate() const {
    if (pieces_.empty()) throw PreconditionError("track permuton without pieces");
    if (pieces_.front().x_lo != 0 || pieces_.back().x_hi != 1)
      throw PreconditionError("pieces must cover [0,1]");
    for (std::size_t p = 0; p < pieces_.size(); ++p) {
      const auto& piece = pieces_[p];
      if (!(piece.x_lo < piece.x_hi)) throw PreconditionError("piece with empty x-interval");
      if (p > 0 && pieces_[p - 1].x_hi != piece.x_lo) throw PreconditionError("pieces leave a gap or overlap");
      if (piece.tracks.empty()) throw PreconditionError("piece without tracks");
      Rational total = 0;
      for (std::size_t i = 0; i < piece.tracks.size(); ++i) {
        const auto& t = piece.tracks[i];
        if (t.weight <= 0) throw PreconditionError("track with non-positive weight");
        total += t.weight;
        for (const Rational& y : {t.at(piece.x_lo), t.at(piece.x_hi)})
          if (y < 0 || y > 1) throw PreconditionError("track leaves the unit square");
        for (std::size_t j = 0; j < i; ++j)
          if (piece.tracks[j].slope == t.slope && piece.tracks[j].intercept == t.intercept)
            throw PreconditionError("identical tracks within a piece");
      }
      if (total != 1) throw PreconditionError("track weights of a piece must sum to 1");
    }
  }

  std::vector<Piece> pieces_;
};

/// Permuton representation of a finite permutation: mass n * area on the cells
/// [(i-1)/n, i/n) x [(pi(i)-1)/n, pi(i)/n).
struct StepPermuton {
  Permutation base;

  int order() const noexcept { return base.order(); }
  friend bool operator==(const StepPermuton&, const StepPermuton&) = default;
};

/// Measure on the graph of the base-4 digit map swapping 1 and 2.
struct DigitSwapPermuton {
  friend bool operator==(const DigitSwapPermuton&, const DigitSwapPermuton&) = default;
};

/// Lebesgue measure on the unit square.
struct UniformPermuton {
  friend bool operator==(const UniformPermuton&, const UniformPermuton&) = default;
};

using Model = std::variant<TrackPermuton, StepPermuton, DigitSwapPermuton, UniformPermuton>;

inline std::string_view model_kind(const Model& m) {
  switch (m.index()) {
    case 0: return "tracks";
    case 1: return "step";
    case 2: return "digit-swap-base4";
    default: return "uniform";
  }
}

// ---------------------------------------------------------------------------
// Constructors

inline TrackPermuton identity_permuton() {
  return TrackPermuton({Piece{0, 1, {Track{1, 0, 1}}}});
}

inline StepPermuton build_step(const Permutation& pi) { return StepPermuton{pi}; }

/// Graph of the zigzag L with k-1 pieces of slope +-(k-1): rising on piece i when
/// pi(i) > pi(i+1), falling otherwise. The resulting permuton avoids pi.
inline TrackPermuton build_zigzag(const Permutation& pi) {
  const int k = pi.order();
  if (k < 2) throw PreconditionError("zigzag needs a pattern of order >= 2");
  const Rational steep = k - 1;
  std::vector<Piece> pieces;
  for (int i = 1; i < k; ++i) {
    Rational lo = make_rational(i - 1, k - 1);
    Rational hi = make_rational(i, k - 1);
    Track t;
    t.weight = 1;
    if (pi(i) > pi(i + 1)) {
      t.slope = steep;  // L(lo) = 0, L(hi) = 1
      t.intercept = -steep * lo;
    } else {
      t.slope = -steep;  // L(lo) = 1, L(hi) = 0
      t.intercept = 1 + steep * lo;
    }
    pieces.push_back(Piece{lo, hi, {t}});
  }
  return TrackPermuton(std::move(pieces));
}

// ---------------------------------------------------------------------------
// Marginals

struct MarginalReport {
  bool x_ok = false;
  bool y_ok = false;
  Rational max_deviation = 0;
  std::string diagnostic;
};

namespace detail {

struct DensityBand {
  Rational lo, hi, density;
};

/// Absolutely continuous part of the y-marginal as bands of constant density.
inline std::vector<DensityBand> y_density_bands(const TrackPermuton& g) {
  std::vector<Rational> cuts{0, 1};
  std::vector<DensityBand> contributions;
  for (const auto& p : g.pieces())
    for (const auto& t : p.tracks) {
      if (t.slope == 0) continue;
      Rational a = t.at(p.x_lo), b = t.at(p.x_hi);
      if (b < a) std::swap(a, b);
      contributions.push_back({a, b, t.weight / abs(t.slope)});
      cuts.push_back(a);
      cuts.push_back(b);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<DensityBand> bands;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Rational d = 0;
    for (const auto& c : contributions)
      if (c.lo <= cuts[i] && cuts[i + 1] <= c.hi) d += c.density;
    bands.push_back({cuts[i], cuts[i + 1], d});
  }
  return bands;
}

}  // namespace detail

/// Exact check of both uniform-marginal conditions.
inline MarginalReport validate_marginals(const TrackPermuton& g) {
  MarginalReport r;
  r.x_ok = true;
  for (const auto& p : g.pieces()) {
    Rational total = 0;
    for (const auto& t : p.tracks) total += t.weight;
    Rational dev = abs(total - 1);
    if (dev != 0) r.x_ok = false;
    r.max_deviation = std::max(r.max_deviation, dev);
  }
  r.y_ok = true;
  for (const auto& band : detail::y_density_bands(g)) {
    Rational dev = abs(band.density - 1);
    if (dev != 0) {
      if (r.y_ok)
        r.diagnostic += "y-density " + format_rational(band.density) + " on [" + format_rational(band.lo) + ", " +
                        format_rational(band.hi) + "]; ";
      r.y_ok = false;
    }
    r.max_deviation = std::max(r.max_deviation, dev);
  }
  for (const auto& p : g.pieces())
    for (const auto& t : p.tracks)
      if (t.slope == 0) {
        r.y_ok = false;
        r.diagnostic += "zero-slope track puts an atom of mass " + format_rational(t.weight * (p.x_hi - p.x_lo)) +
                        " at y = " + format_rational(t.intercept) + "; ";
      }
  return r;
}

// ---------------------------------------------------------------------------
// Transposition

/// Pushforward under (x, y) -> (y, x). Each track y = a x + b becomes
/// x = (y - b) / a with weight w / |a| over every elementary y-interval it covers.
inline TrackPermuton transpose_tracks(const TrackPermuton& g) {
  if (g.has_zero_slope()) throw PreconditionError("zero-slope track can not be transposed");
  if (!validate_marginals(g).y_ok) throw PreconditionError("transpose needs a uniform y-marginal");
  struct Image {
    Rational lo, hi;
    Track t;
  };
  std::vector<Image> images;
  std::vector<Rational> cuts{0, 1};
  for (const auto& p : g.pieces())
    for (const auto& t : p.tracks) {
      Rational a = t.at(p.x_lo), b = t.at(p.x_hi);
      if (b < a) std::swap(a, b);
      images.push_back({a, b, Track{1 / t.slope, -t.intercept / t.slope, t.weight / abs(t.slope)}});
      cuts.push_back(a);
      cuts.push_back(b);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece piece{cuts[i], cuts[i + 1], {}};
    for (const auto& im : images)
      if (im.lo <= cuts[i] && cuts[i + 1] <= im.hi) piece.tracks.push_back(im.t);
    pieces.push_back(std::move(piece));
  }
  return TrackPermuton(std::move(pieces)).canonical();
}

// ---------------------------------------------------------------------------
// Digit swap

/// Base-4 digit-wise map 0->0, 1->2, 2->1, 3->3.
inline std::string digit_swap_eval(std::string_view digits) {
  std::string out(digits);
  for (char& c : out) {
    switch (c) {
      case '0': case '3': break;
      case '1': c = '2'; break;
      case '2': c = '1'; break;
      default: throw PreconditionError("invalid base-4 digit '" + std::string(1, c) + "'");
    }
  }
  return out;
}

/// Same map on a depth-d prefix encoded as an integer in [0, 4^d).
inline std::uint64_t digit_swap_index(std::uint64_t cell, int depth) {
  std::uint64_t out = 0;
  for (int i = 0; i < depth; ++i) {
    std::uint64_t d = cell >> (2 * i) & 3u;
    if (d == 1 || d == 2) d ^= 3u;
    out |= d << (2 * i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fibers

/// Default number of base-4 digits used for digit-swap fibers.
inline constexpr int kDefaultDigitDepth = 24;

inline Fiber fiber_at(const TrackPermuton& g, const Rational& x) {
  const Piece& p = g.pieces()[g.piece_index_at(x)];
  std::vector<Atom> atoms;
  for (const auto& t : p.tracks) atoms.push_back(Atom{t.at(x), t.weight});
  return Fiber(std::move(atoms));
}

/// Single atom at the vertical midpoint of the cell containing x.
inline Fiber fiber_at(const StepPermuton& s, const Rational& x) {
  if (x < 0 || x > 1) throw PreconditionError("x outside [0,1]");
  const int n = s.order();
  Rational scaled = x * n;
  BigInt cell = floor_of(scaled);
  if (x > 0 && x < 1 && Rational(cell) == scaled)
    throw BoundaryError("x = " + format_rational(x) + " lies on a cell boundary");
  int i = std::min(static_cast<int>(cell) + 1, n);
  return Fiber({Atom{make_rational(2 * s.base(i) - 1, 2 * n), 1}});
}

/// Single atom at f(x) truncated to `depth` base-4 digits. Points with a finite
/// base-4 expansion of length <= depth are the excluded countable set.
inline Fiber fiber_at(const DigitSwapPermuton&, const Rational& x, int depth = kDefaultDigitDepth) {
  if (x < 0 || x > 1) throw PreconditionError("x outside [0,1]");
  if (depth < 1) throw PreconditionError("digit depth must be positive");
  Rational rest = x;
  Rational y = 0;
  Rational place = 1;
  for (int i = 0; i < depth; ++i) {
    rest *= 4;
    int d = static_cast<int>(floor_of(rest));
    rest -= d;
    if (d == 4) d = 3;  // x == 1
    place /= 4;
    int fd = (d == 1 || d == 2) ? 3 - d : d;
    y += place * fd;
    if (rest == 0 && x > 0 && x < 1)
      throw BoundaryError("x = " + format_rational(x) + " has a finite base-4 expansion");
  }
  return Fiber({Atom{y, 1}});
}

inline Fiber fiber_at(const Model& model, const Rational& x, int digit_depth = kDefaultDigitDepth) {
  return std::visit(
      [&](const auto& m) -> Fiber {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, UniformPermuton>)
          throw PreconditionError("the uniform permuton has no atomic fibers");
        else if constexpr (std::is_same_v<M, DigitSwapPermuton>)
          return fiber_at(m, x, digit_depth);
        else
          return fiber_at(m, x);
      },
      model);
}

// ---------------------------------------------------------------------------
// Molecules

enum class Direction { Vertical, Horizontal };

struct CrossingPoint {
  Rational x;
  int atoms;
};

/// Atom counts of fibers as a function of x: histogram maps atom count to the
/// Lebesgue measure of the x-set with that count. Track crossings reduce the count
/// only on a null set; they are listed separately.
struct MoleculeProfile {
  int max_atoms = 0;
  std::map<int, Rational> histogram;
  std::vector<CrossingPoint> crossings;
};

inline MoleculeProfile molecule_profile(const TrackPermuton& g, Direction direction) {
  if (direction == Direction::Horizontal) return molecule_profile(transpose_tracks(g), Direction::Vertical);
  MoleculeProfile prof;
  for (const auto& p : g.pieces()) {
    const int count = static_cast<int>(p.tracks.size());
    prof.histogram[count] += p.x_hi - p.x_lo;
    prof.max_atoms = std::max(prof.max_atoms, count);
    std::vector<Rational> xs;
    for (std::size_t i = 0; i < p.tracks.size(); ++i)
      for (std::size_t j = i + 1; j < p.tracks.size(); ++j) {
        const auto& s = p.tracks[i];
        const auto& t = p.tracks[j];
        if (s.slope == t.slope) continue;
        Rational x = (t.intercept - s.intercept) / (s.slope - t.slope);
        if (p.x_lo < x && x < p.x_hi) xs.push_back(x);
      }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (const auto& x : xs) prof.crossings.push_back({x, static_cast<int>(fiber_at(g, x).size())});
  }
  return prof;
}

inline MoleculeProfile molecule_profile(const StepPermuton&, Direction) {
  MoleculeProfile prof;
  prof.max_atoms = 1;
  prof.histogram[1] = 1;
  return prof;
}

// ---------------------------------------------------------------------------
// Fiber Lévy–Prokhorov profile

struct LpProfile {
  std::vector<Rational> grid;                   // midpoints (i - 1/2) / grid_count
  std::vector<std::vector<Rational>> distance;  // pairwise lp_distance of fibers
  std::vector<std::pair<int, int>> parts;       // 0-based inclusive index ranges
};

/// Pairwise fiber distances on grid midpoints plus the coarsest partition of the
/// grid into consecutive runs whose pairwise distances all stay below delta.
inline LpProfile fiber_lp_profile(const Model& model, int grid_count, const Rational& delta) {
  if (grid_count < 2) throw PreconditionError("grid_count must be >= 2");
  LpProfile prof;
  std::vector<Fiber> fibers;
  for (int i = 0; i < grid_count; ++i) {
    prof.grid.push_back(make_rational(2 * i + 1, 2 * grid_count));
    fibers.push_back(fiber_at(model, prof.grid.back()));
  }
  prof.distance.assign(grid_count, std::vector<Rational>(grid_count, Rational(0)));
  for (int i = 0; i < grid_count; ++i)
    for (int j = i + 1; j < grid_count; ++j)
      prof.distance[i][j] = prof.distance[j][i] = lp_distance(fibers[i], fibers[j]);
  // Being a valid part is inherited by sub-runs, so greedy extension is optimal.
  int start = 0;
  for (int i = 1; i <= grid_count; ++i) {
    bool fits = i < grid_count;
    for (int j = start; fits && j < i; ++j) fits = prof.distance[j][i] < delta;
    if (!fits) {
      prof.parts.emplace_back(start, i - 1);
      start = i;
    }
  }
  return prof;
}

}  // namespace permuton
