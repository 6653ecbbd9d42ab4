#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace permuton {

/// Models with exact rectangle masses.
using DistanceOperand = std::variant<StepPermuton, TrackPermuton>;

/// Uniform becomes the order-1 step permuton; digit-swap becomes its
/// depth-d step approximant, exact on base-4 rectangles of that depth.
inline DistanceOperand distance_operand(const Model& model, int digit_depth = 3) {
  if (const auto* g = std::get_if<TrackPermuton>(&model)) return *g;
  if (const auto* s = std::get_if<StepPermuton>(&model)) return *s;
  if (std::holds_alternative<UniformPermuton>(model)) return StepPermuton{Permutation::identity(1)};
  if (digit_depth < 1 || digit_depth > 6) throw PreconditionError("digit depth for distances must be in 1..6");
  const int cells = 1 << (2 * digit_depth);
  std::vector<int> v(cells);
  for (int i = 0; i < cells; ++i) v[i] = static_cast<int>(digit_swap_index(static_cast<std::uint64_t>(i), digit_depth)) + 1;
  return StepPermuton{Permutation(std::move(v))};
}

struct DistanceResult {
  enum class Witness { Intervals, CellSubsets };

  Rational value;
  Witness kind = Witness::Intervals;
  Rational s_lo, s_hi, t_lo, t_hi;   // S = [s_lo, s_hi], T = [t_lo, t_hi]
  int grid = 0;                      // CellSubsets: cells of width 1/grid
  std::vector<int> s_cells, t_cells; // 0-based column / row indices
};

inline std::string describe_witness(const DistanceResult& r) {
  std::ostringstream out;
  if (r.kind == DistanceResult::Witness::Intervals) {
    out << "S=[" << format_rational(r.s_lo) << "," << format_rational(r.s_hi) << "] T=[" << format_rational(r.t_lo)
        << "," << format_rational(r.t_hi) << "]";
  } else {
    auto list = [&](const std::vector<int>& cells) {
      out << '{';
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? " " : "") << cells[i];
      out << '}';
    };
    out << "grid=" << r.grid << " S=";
    list(r.s_cells);
    out << " T=";
    list(r.t_cells);
  }
  return out.str();
}

namespace detail {

/// Exact distribution function G(x, y) = mass of [0,x] x [0,y].
class Cdf {
 public:
  struct Segment {
    Rational lo, hi, slope, intercept, weight;
    Rational at(const Rational& x) const { return slope * x + intercept; }
  };

  explicit Cdf(const DistanceOperand& op) {
    if (const auto* s = std::get_if<StepPermuton>(&op)) {
      n_ = s->order();
      perm_.assign(s->base.values().begin(), s->base.values().end());
      position_.assign(n_ + 1, 0);
      for (int i = 0; i < n_; ++i) position_[perm_[i]] = i + 1;
      prefix_.assign((n_ + 1) * (n_ + 1), 0);
      for (int i = 1; i <= n_; ++i)
        for (int j = 1; j <= n_; ++j)
          prefix_[i * (n_ + 1) + j] = prefix_[(i - 1) * (n_ + 1) + j] + prefix_[i * (n_ + 1) + j - 1] -
                                      prefix_[(i - 1) * (n_ + 1) + j - 1] + (perm_[i - 1] == j ? 1 : 0);
    } else {
      const auto& g = std::get<TrackPermuton>(op);
      if (g.has_zero_slope()) throw PreconditionError("rectangle distances need tracks with nonzero slope");
      for (const auto& p : g.pieces())
        for (const auto& t : p.tracks) segments_.push_back({p.x_lo, p.x_hi, t.slope, t.intercept, t.weight});
    }
  }

  int step_order() const noexcept { return n_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  Rational operator()(const Rational& x, const Rational& y) const {
    if (x <= 0 || y <= 0) return 0;
    if (n_ > 0) return step(x, y);
    Rational mass = 0;
    for (const auto& s : segments_) {
      if (x <= s.lo) continue;
      Rational lower = s.lo;
      Rational upper = x < s.hi ? x : s.hi;
      const Rational cut = (y - s.intercept) / s.slope;
      if (s.slope > 0) {
        if (cut < upper) upper = cut;
      } else if (cut > lower) {
        lower = cut;
      }
      if (upper > lower) mass += s.weight * (upper - lower);
    }
    return mass;
  }

 private:
  // Cells are [i-1, i)/n x [v-1, v)/n with density n.
  Rational step(const Rational& x, const Rational& y) const {
    const Rational nx = x >= 1 ? Rational(n_) : Rational(x * n_);
    const Rational ny = y >= 1 ? Rational(n_) : Rational(y * n_);
    int i0 = static_cast<int>(floor_of(nx));
    int j0 = static_cast<int>(floor_of(ny));
    Rational fx = nx - i0;
    Rational fy = ny - j0;
    if (i0 == n_) --i0, fx = 1;
    if (j0 == n_) --j0, fy = 1;
    Rational total = prefix_[i0 * (n_ + 1) + j0];
    if (position_[j0 + 1] <= i0) total += fy;
    const int v = perm_[i0];
    if (v <= j0) total += fx;
    else if (v == j0 + 1) total += fx * fy;
    return total / n_;
  }

  int n_ = 0;
  std::vector<int> perm_, position_, prefix_;
  std::vector<Segment> segments_;
};

inline Rational rectangle_mass(const Cdf& g, const Rational& s_lo, const Rational& s_hi, const Rational& t_lo,
                               const Rational& t_hi) {
  return g(s_hi, t_hi) - g(s_lo, t_hi) - g(s_hi, t_lo) + g(s_lo, t_lo);
}

inline std::vector<int> step_values(const StepPermuton& s) { return {s.base.values().begin(), s.base.values().end()}; }

/// Max and min of sum over rectangles of a +-1 point set on an n x n grid.
class DiscrepancyTree {
 public:
  explicit DiscrepancyTree(int n) : size_(1) {
    while (size_ < n) size_ *= 2;
    nodes_.assign(2 * size_, Node{});
  }

  void clear() { std::fill(nodes_.begin(), nodes_.end(), Node{}); }

  void add(int row, int delta) {
    int i = size_ + row;
    nodes_[i].sum += delta;
    Node& leaf = nodes_[i];
    leaf.max_pre = leaf.max_suf = leaf.max_sub = std::max(0, leaf.sum);
    leaf.min_pre = leaf.min_suf = leaf.min_sub = std::min(0, leaf.sum);
    for (i /= 2; i >= 1; i /= 2) nodes_[i] = merge(nodes_[2 * i], nodes_[2 * i + 1]);
  }

  int max_sub() const { return nodes_[1].max_sub; }
  int min_sub() const { return nodes_[1].min_sub; }

 private:
  struct Node {
    int sum = 0, max_pre = 0, max_suf = 0, max_sub = 0, min_pre = 0, min_suf = 0, min_sub = 0;
  };

  static Node merge(const Node& l, const Node& r) {
    Node m;
    m.sum = l.sum + r.sum;
    m.max_pre = std::max(l.max_pre, l.sum + r.max_pre);
    m.max_suf = std::max(r.max_suf, r.sum + l.max_suf);
    m.max_sub = std::max({l.max_sub, r.max_sub, l.max_suf + r.max_pre});
    m.min_pre = std::min(l.min_pre, l.sum + r.min_pre);
    m.min_suf = std::min(r.min_suf, r.sum + l.min_suf);
    m.min_sub = std::min({l.min_sub, r.min_sub, l.min_suf + r.min_pre});
    return m;
  }

  int size_;
  std::vector<Node> nodes_;
};

/// Best row range for a column-sum vector; sign +1 maximizes, -1 minimizes.
inline std::pair<int, int> best_row_range(const std::vector<std::int64_t>& rows, int sign) {
  std::int64_t best = 0, run = 0;
  int best_lo = 0, best_hi = 0, lo = 0;
  for (int j = 0; j < static_cast<int>(rows.size()); ++j) {
    if (run <= 0) run = 0, lo = j;
    run += sign * rows[j];
    if (run > best) best = run, best_lo = lo, best_hi = j + 1;
  }
  return {best_lo, best_hi};
}

/// Interval distance between two step permutons: the rectangle mass difference
/// is multilinear on the common grid, so grid rectangles suffice.
inline DistanceResult step_interval_distance(const StepPermuton& mu, const StepPermuton& nu) {
  const int n1 = mu.order(), n2 = nu.order();
  const auto p1 = step_values(mu), p2 = step_values(nu);
  DistanceResult r;
  std::int64_t best = 0;
  int best_a = 0, best_b = 0, best_sign = 1, grid = 0;
  std::int64_t scale = 0;  // value = best / scale

  if (n1 == n2) {
    const int n = n1;
    grid = n;
    scale = n;
    DiscrepancyTree tree(n);
    for (int a = 0; a < n; ++a) {
      tree.clear();
      for (int b = a; b < n; ++b) {
        if (p1[b] != p2[b]) {
          tree.add(p1[b] - 1, 1);
          tree.add(p2[b] - 1, -1);
        }
        if (tree.max_sub() > best) best = tree.max_sub(), best_a = a, best_b = b + 1, best_sign = 1;
        if (-tree.min_sub() > best) best = -tree.min_sub(), best_a = a, best_b = b + 1, best_sign = -1;
      }
    }
  } else {
    const std::int64_t lcm = std::lcm<std::int64_t>(n1, n2);
    if (lcm > 600) throw SizeLimitError("common grid of the two step permutons exceeds 600 cells");
    const int L = static_cast<int>(lcm);
    const int m1 = L / n1, m2 = L / n2;
    grid = L;
    scale = static_cast<std::int64_t>(L) * L;
    std::vector<std::int64_t> rows(L);
    for (int a = 0; a < L; ++a) {
      std::fill(rows.begin(), rows.end(), 0);
      for (int b = a; b < L; ++b) {
        const int v1 = p1[b / m1] - 1, v2 = p2[b / m2] - 1;
        for (int j = v1 * m1; j < (v1 + 1) * m1; ++j) rows[j] += n1;
        for (int j = v2 * m2; j < (v2 + 1) * m2; ++j) rows[j] -= n2;
        std::int64_t hi = 0, lo = 0, run_hi = 0, run_lo = 0;
        for (int j = 0; j < L; ++j) {
          run_hi = std::max<std::int64_t>(0, run_hi) + rows[j];
          run_lo = std::min<std::int64_t>(0, run_lo) + rows[j];
          hi = std::max(hi, run_hi);
          lo = std::min(lo, run_lo);
        }
        if (hi > best) best = hi, best_a = a, best_b = b + 1, best_sign = 1;
        if (-lo > best) best = -lo, best_a = a, best_b = b + 1, best_sign = -1;
      }
    }
  }

  r.value = Rational(BigInt(best), BigInt(scale));
  r.grid = grid;
  if (best == 0) {
    r.s_lo = r.s_hi = r.t_lo = r.t_hi = 0;
    return r;
  }
  // Recover the row range for the winning column range.
  const int m1 = grid / n1, m2 = grid / n2;
  std::vector<std::int64_t> rows(grid, 0);
  for (int b = best_a; b < best_b; ++b) {
    const int v1 = p1[b / m1] - 1, v2 = p2[b / m2] - 1;
    for (int j = v1 * m1; j < (v1 + 1) * m1; ++j) rows[j] += n1;
    for (int j = v2 * m2; j < (v2 + 1) * m2; ++j) rows[j] -= n2;
  }
  auto [lo, hi] = best_row_range(rows, best_sign);
  r.s_lo = make_rational(best_a, grid);
  r.s_hi = make_rational(best_b, grid);
  r.t_lo = make_rational(lo, grid);
  r.t_hi = make_rational(hi, grid);
  return r;
}

/// Line p*a + q*b = r in the plane of interval endpoints.
struct EndpointLine {
  Rational p, q, r;

  bool vertical() const { return q == 0; }
  Rational b_at(const Rational& a) const { return (r - p * a) / q; }
  bool contains(const Rational& a, const Rational& b) const { return p * a + q * b == r; }
  Rational slope() const { return -p / q; }

  void normalize() {
    const Rational s = q != 0 ? q : p;
    p /= s, q /= s, r /= s;
  }
  auto key() const { return std::tuple(p, q, r); }
};

/// Exact interval distance when tracks are involved. For fixed x-endpoints
/// (a, b) the best y-endpoints sit at breakpoints of the y-profile, which are
/// constants or track values at a or b. Each such choice turns the discrepancy
/// into a function of (a, b) that is quadratic on every face of a finite line
/// arrangement, so the supremum is found at vertices, edge stationary points
/// and face stationary points of that arrangement.
class IntervalSearch {
 public:
  IntervalSearch(const DistanceOperand& mu, const DistanceOperand& nu) : mu_(mu), nu_(nu) {
    std::set<Rational> ys{Rational(0), Rational(1)}, xs{Rational(0), Rational(1)};
    for (const Cdf* g : {&mu_, &nu_}) {
      for (int j = 1; j < g->step_order(); ++j) {
        ys.insert(make_rational(j, g->step_order()));
        xs.insert(make_rational(j, g->step_order()));
      }
      for (const auto& s : g->segments()) {
        tracks_.push_back(s);
        xs.insert(s.lo);
        xs.insert(s.hi);
        ys.insert(s.at(s.lo));
        ys.insert(s.at(s.hi));
      }
    }
    ycons_.assign(ys.begin(), ys.end());
    for (const auto& s : tracks_)
      for (const auto& y : ycons_) {
        const Rational x = (y - s.intercept) / s.slope;
        if (x >= s.lo && x <= s.hi) xs.insert(x);
      }
    for (std::size_t i = 0; i < tracks_.size(); ++i)
      for (std::size_t j = i + 1; j < tracks_.size(); ++j) {
        const auto& s = tracks_[i];
        const auto& t = tracks_[j];
        if (s.slope == t.slope) continue;
        const Rational x = (t.intercept - s.intercept) / (s.slope - t.slope);
        if (x >= 0 && x <= 1) xs.insert(x);
      }

    std::set<std::tuple<Rational, Rational, Rational>> seen;
    auto add_line = [&](EndpointLine l) {
      l.normalize();
      if (seen.insert(l.key()).second) lines_.push_back(l);
    };
    for (const auto& x : xs) {
      add_line({1, 0, x});
      add_line({0, 1, x});
    }
    for (const auto& s : tracks_)
      for (const auto& t : tracks_) add_line({s.slope, -t.slope, t.intercept - s.intercept});  // s(a) = t(b)
  }

  DistanceResult run() {
    collect_vertices();
    for (const auto& v : vertices_) consider(v.first, v.second);
    scan_edges();
    scan_faces();

    DistanceResult r;
    r.value = best_;
    r.s_lo = std::min(best_a_, best_b_);
    r.s_hi = std::max(best_a_, best_b_);
    r.t_lo = std::min(best_c_, best_d_);
    r.t_hi = std::max(best_c_, best_d_);
    return r;
  }

 private:
  std::size_t type_count() const { return ycons_.size() + 2 * tracks_.size(); }

  bool is_track_type(std::size_t type) const { return type >= ycons_.size(); }

  Rational type_y(std::size_t type, const Rational& a, const Rational& b) const {
    if (type < ycons_.size()) return ycons_[type];
    const std::size_t k = type - ycons_.size();
    const auto& s = tracks_[k / 2];
    Rational x = k % 2 == 0 ? a : b;
    if (x < s.lo) x = s.lo;
    if (x > s.hi) x = s.hi;
    return s.at(x);
  }

  Rational profile(const Rational& a, const Rational& b, const Rational& y) const {
    return (mu_(b, y) - mu_(a, y)) - (nu_(b, y) - nu_(a, y));
  }

  std::vector<Rational> type_values(const Rational& a, const Rational& b) const {
    std::vector<Rational> out(type_count());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = profile(a, b, type_y(t, a, b));
    return out;
  }

  void consider(const Rational& a, const Rational& b) {
    const auto h = type_values(a, b);
    std::size_t hi = 0, lo = 0;
    for (std::size_t t = 1; t < h.size(); ++t) {
      if (h[t] > h[hi]) hi = t;
      if (h[t] < h[lo]) lo = t;
    }
    const Rational v = h[hi] - h[lo];
    if (v > best_) {
      best_ = v;
      best_a_ = a, best_b_ = b;
      best_c_ = type_y(lo, a, b), best_d_ = type_y(hi, a, b);
    }
  }

  static bool in_square(const Rational& a, const Rational& b) { return a >= 0 && a <= 1 && b >= 0 && b <= 1; }

  void collect_vertices() {
    std::set<std::pair<Rational, Rational>> pts;
    for (std::size_t i = 0; i < lines_.size(); ++i)
      for (std::size_t j = i + 1; j < lines_.size(); ++j) {
        const auto& l = lines_[i];
        const auto& m = lines_[j];
        const Rational det = l.p * m.q - m.p * l.q;
        if (det == 0) continue;
        const Rational a = (l.r * m.q - m.r * l.q) / det;
        const Rational b = (l.p * m.r - m.p * l.r) / det;
        if (in_square(a, b)) pts.emplace(a, b);
      }
    vertices_.assign(pts.begin(), pts.end());
  }

  // Along a segment, each profile value is a quadratic in the offset u from
  // the midpoint; only differences involving a track type can bend.
  void scan_edges() {
    for (const auto& line : lines_) {
      std::vector<std::pair<Rational, Rational>> on;
      for (const auto& v : vertices_)
        if (line.contains(v.first, v.second)) on.push_back(v);
      std::sort(on.begin(), on.end(), [&](const auto& x, const auto& y) {
        return line.vertical() ? x.second < y.second : x.first < y.first;
      });
      for (std::size_t k = 0; k + 1 < on.size(); ++k) {
        const auto& P = on[k];
        const auto& Q = on[k + 1];
        auto at = [&](const Rational& t) {
          return std::pair<Rational, Rational>(P.first + t * (Q.first - P.first), P.second + t * (Q.second - P.second));
        };
        const auto m = at(make_rational(1, 2));
        const auto l = at(make_rational(1, 4));
        const auto u = at(make_rational(3, 4));
        const auto h0 = type_values(m.first, m.second);
        const auto hl = type_values(l.first, l.second);
        const auto hu = type_values(u.first, u.second);
        const std::size_t T = h0.size();
        std::vector<Rational> lin(T), quad(T);
        for (std::size_t t = 0; t < T; ++t) {
          lin[t] = 2 * (hu[t] - hl[t]);
          quad[t] = 8 * (hu[t] + hl[t] - 2 * h0[t]);
        }
        for (std::size_t i = 0; i < T; ++i)
          for (std::size_t j = 0; j < T; ++j) {
            if (i == j || (!is_track_type(i) && !is_track_type(j))) continue;
            const Rational g = quad[i] - quad[j];
            if (g >= 0) continue;
            const Rational beta = lin[i] - lin[j];
            const Rational s = -beta / (2 * g);
            if (s <= make_rational(-1, 2) || s >= make_rational(1, 2)) continue;
            const Rational predicted = (h0[i] - h0[j]) + beta * s + g * s * s;
            if (predicted <= best_) continue;
            const auto p = at(make_rational(1, 2) + s);
            consider(p.first, p.second);
          }
      }
    }
  }

  // Faces are covered by trapezoids between consecutive non-vertical lines
  // inside vertical slabs free of vertices. On each trapezoid every profile is
  // a quadratic in (a, b), recovered from six points around an interior centre.
  void scan_faces() {
    std::set<Rational> cuts;
    for (const auto& v : vertices_) cuts.insert(v.first);
    std::vector<Rational> slabs(cuts.begin(), cuts.end());
    std::vector<const EndpointLine*> sloped;
    for (const auto& l : lines_)
      if (!l.vertical()) sloped.push_back(&l);

    for (std::size_t s = 0; s + 1 < slabs.size(); ++s) {
      const Rational a_lo = slabs[s], a_hi = slabs[s + 1];
      const Rational a0 = (a_lo + a_hi) / 2;
      std::vector<std::pair<Rational, const EndpointLine*>> order;
      for (const auto* l : sloped) {
        const Rational b = l->b_at(a0);
        if (b >= 0 && b <= 1) order.emplace_back(b, l);
      }
      std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (std::size_t k = 0; k + 1 < order.size(); ++k)
        scan_trapezoid(a_lo, a_hi, a0, *order[k].second, *order[k + 1].second);
    }
  }

  void scan_trapezoid(const Rational& a_lo, const Rational& a_hi, const Rational& a0, const EndpointLine& lower,
                      const EndpointLine& upper) {
    const Rational b_lo = lower.b_at(a0), b_hi = upper.b_at(a0);
    const Rational b0 = (b_lo + b_hi) / 2;
    Rational r = (a_hi - a_lo) / 4;
    const Rational room = (b_hi - b_lo) / (2 * (2 + abs(lower.slope()) + abs(upper.slope())));
    if (room < r) r = room;

    const auto f0 = type_values(a0, b0);
    const auto f1 = type_values(a0 + r, b0);
    const auto f2 = type_values(a0 - r, b0);
    const auto f3 = type_values(a0, b0 + r);
    const auto f4 = type_values(a0, b0 - r);
    const auto f5 = type_values(a0 + r, b0 + r);
    const std::size_t T = f0.size();
    // q(u, v) = A + B u + C v + D u^2 + E u v + F v^2 around (a0, b0).
    std::vector<Rational> B(T), C(T), D(T), E(T), F(T);
    for (std::size_t t = 0; t < T; ++t) {
      B[t] = (f1[t] - f2[t]) / (2 * r);
      C[t] = (f3[t] - f4[t]) / (2 * r);
      D[t] = (f1[t] + f2[t] - 2 * f0[t]) / (2 * r * r);
      F[t] = (f3[t] + f4[t] - 2 * f0[t]) / (2 * r * r);
      E[t] = (f5[t] - f0[t] - B[t] * r - C[t] * r - D[t] * r * r - F[t] * r * r) / (r * r);
    }
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t j = 0; j < T; ++j) {
        if (i == j || (!is_track_type(i) && !is_track_type(j))) continue;
        const Rational d = D[i] - D[j], e = E[i] - E[j], f = F[i] - F[j];
        if (d >= 0) continue;
        const Rational det = 4 * d * f - e * e;
        if (det <= 0) continue;  // not strictly concave: maximum lies on the boundary
        const Rational b = B[i] - B[j], c = C[i] - C[j];
        const Rational u = (-2 * f * b + e * c) / det;
        const Rational v = (-2 * d * c + e * b) / det;
        const Rational a = a0 + u, bb = b0 + v;
        if (a < a_lo || a > a_hi || bb < lower.b_at(a) || bb > upper.b_at(a)) continue;
        const Rational predicted = (f0[i] - f0[j]) + b * u + c * v + d * u * u + e * u * v + f * v * v;
        if (predicted <= best_) continue;
        consider(a, bb);
      }
  }

  Cdf mu_, nu_;
  std::vector<Cdf::Segment> tracks_;
  std::vector<Rational> ycons_;
  std::vector<EndpointLine> lines_;
  std::vector<std::pair<Rational, Rational>> vertices_;
  Rational best_ = 0, best_a_ = 0, best_b_ = 0, best_c_ = 0, best_d_ = 0;
};

}  // namespace detail

/// Exact mass of the closed rectangle [s_lo, s_hi] x [t_lo, t_hi].
inline Rational rectangle_mass(const DistanceOperand& op, const Rational& s_lo, const Rational& s_hi,
                               const Rational& t_lo, const Rational& t_hi) {
  return detail::rectangle_mass(detail::Cdf(op), s_lo, s_hi, t_lo, t_hi);
}

/// Supremum of |mu(S x T) - nu(S x T)| over intervals S, T, exactly.
inline DistanceResult rect_distance_interval(const DistanceOperand& mu, const DistanceOperand& nu) {
  const auto* s1 = std::get_if<StepPermuton>(&mu);
  const auto* s2 = std::get_if<StepPermuton>(&nu);
  if (s1 && s2) return detail::step_interval_distance(*s1, *s2);
  return detail::IntervalSearch(mu, nu).run();
}

/// Exact supremum over arbitrary unions of common-grid cells, by enumerating
/// column subsets; the best row set for a column set is read off the signs.
inline DistanceResult cut_distance_bruteforce(const StepPermuton& mu, const StepPermuton& nu) {
  const int n1 = mu.order(), n2 = nu.order();
  const std::int64_t lcm = std::lcm<std::int64_t>(n1, n2);
  if (lcm > 14) throw SizeLimitError("brute-force cut distance needs a common grid of at most 14 cells");
  const int L = static_cast<int>(lcm);
  const int m1 = L / n1, m2 = L / n2;
  const auto p1 = detail::step_values(mu), p2 = detail::step_values(nu);
  std::vector<std::vector<std::int64_t>> col(L, std::vector<std::int64_t>(L, 0));
  for (int b = 0; b < L; ++b) {
    const int v1 = p1[b / m1] - 1, v2 = p2[b / m2] - 1;
    for (int j = v1 * m1; j < (v1 + 1) * m1; ++j) col[b][j] += n1;
    for (int j = v2 * m2; j < (v2 + 1) * m2; ++j) col[b][j] -= n2;
  }

  std::vector<std::int64_t> rows(L, 0);
  std::int64_t best = 0;
  std::uint32_t best_mask = 0;
  int best_sign = 1;
  std::uint32_t mask = 0;
  const std::uint32_t total = 1u << L;
  for (std::uint32_t step = 1; step < total; ++step) {
    const int flip = __builtin_ctz(step);  // Gray-code walk over column subsets
    mask ^= 1u << flip;
    const int sgn = (mask >> flip) & 1u ? 1 : -1;
    for (int j = 0; j < L; ++j) rows[j] += sgn * col[flip][j];
    std::int64_t pos = 0, neg = 0;
    for (int j = 0; j < L; ++j) (rows[j] > 0 ? pos : neg) += rows[j];
    if (pos > best) best = pos, best_mask = mask, best_sign = 1;
    if (-neg > best) best = -neg, best_mask = mask, best_sign = -1;
  }

  DistanceResult r;
  r.kind = DistanceResult::Witness::CellSubsets;
  r.grid = L;
  r.value = Rational(BigInt(best), BigInt(static_cast<std::int64_t>(L) * L));
  if (best == 0) return r;
  std::fill(rows.begin(), rows.end(), 0);
  for (int b = 0; b < L; ++b)
    if ((best_mask >> b) & 1u) {
      r.s_cells.push_back(b);
      for (int j = 0; j < L; ++j) rows[j] += col[b][j];
    }
  for (int j = 0; j < L; ++j)
    if (best_sign * rows[j] > 0) r.t_cells.push_back(j);
  return r;
}

/// Mass difference mu - nu on a union of grid cells, for checking witnesses.
inline Rational cell_union_difference(const StepPermuton& mu, const StepPermuton& nu, int grid,
                                      const std::vector<int>& s_cells, const std::vector<int>& t_cells) {
  const detail::Cdf g1(mu), g2(nu);
  Rational total = 0;
  for (int s : s_cells)
    for (int t : t_cells) {
      const Rational x0 = make_rational(s, grid), x1 = make_rational(s + 1, grid);
      const Rational y0 = make_rational(t, grid), y1 = make_rational(t + 1, grid);
      total += detail::rectangle_mass(g1, x0, x1, y0, y1) - detail::rectangle_mass(g2, x0, x1, y0, y1);
    }
  return total;
}

}  // namespace permuton
