#pragma once

#include "errors.hpp"
#include "fourier_motzkin.hpp"
#include "models.hpp"
#include "permutation.hpp"

#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace permuton {

/// Point i of a sample sits on track `track` of piece `piece` (both 0-based).
struct Slot {
  int piece = 0;
  int track = 0;

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct AssignmentVerdict {
  std::vector<Slot> slots;
  bool feasible = false;
  std::vector<Rational> witness_x;  // empty when infeasible
  std::vector<Rational> witness_y;
  std::size_t generated_constraints = 0;
  std::string refutation;
};

/// Exhaustive record of every placement of the k pattern points onto
/// (piece, track) pairs with non-decreasing piece index.
struct AvoidanceCertificate {
  Permutation pattern;
  std::string model_id;
  std::vector<AssignmentVerdict> assignments;

  bool certified() const {
    for (const auto& a : assignments)
      if (a.feasible) return false;
    return true;
  }

  const AssignmentVerdict* witness() const {
    for (const auto& a : assignments)
      if (a.feasible) return &a;
    return nullptr;
  }

  std::size_t feasible_count() const {
    std::size_t c = 0;
    for (const auto& a : assignments) c += a.feasible;
    return c;
  }
};

/// Constraints realising `pattern` with point i on slots[i]: x inside the open
/// piece interval, x strictly increasing, y-order following the pattern.
inline LinearConstraintSystem realization_system(const Permutation& pattern, const TrackPermuton& g,
                                                 const std::vector<Slot>& slots) {
  const int k = pattern.order();
  LinearConstraintSystem sys(k);
  auto unit = [k](int i, const Rational& c) {
    std::vector<Rational> v(k);
    v[i] = c;
    return v;
  };
  const std::vector<Rational> zero(k);
  for (int i = 0; i < k; ++i) {
    const Piece& p = g.pieces()[slots[i].piece];
    sys.add_less(zero, p.x_lo, unit(i, 1), 0);  // x_lo < x_i
    sys.add_less(unit(i, 1), 0, zero, p.x_hi);  // x_i < x_hi
    if (i + 1 < k) sys.add_less(unit(i, 1), 0, unit(i + 1, 1), 0);
  }
  const Permutation where = inverse(pattern);
  for (int r = 1; r < k; ++r) {
    const int u = where(r) - 1;
    const int v = where(r + 1) - 1;
    const Track& tu = g.pieces()[slots[u].piece].tracks[slots[u].track];
    const Track& tv = g.pieces()[slots[v].piece].tracks[slots[v].track];
    sys.add_less(unit(u, tu.slope), tu.intercept, unit(v, tv.slope), tv.intercept);  // y_u < y_v
  }
  return sys;
}

/// Decides t(pattern, g) == 0 exactly: every assignment of sample points to
/// tracks must give an infeasible open system.
inline AvoidanceCertificate certify_avoidance(const Permutation& pattern, const TrackPermuton& g,
                                              std::string model_id = "tracks") {
  const int k = pattern.order();
  if (k > LinearConstraintSystem::kMaxVariables) throw PreconditionError("certification supports k <= 8");
  AvoidanceCertificate cert{pattern, std::move(model_id), {}};

  std::vector<Slot> all;
  for (int p = 0; p < static_cast<int>(g.pieces().size()); ++p)
    for (int t = 0; t < static_cast<int>(g.pieces()[p].tracks.size()); ++t) all.push_back({p, t});

  std::vector<Slot> current;
  auto recurse = [&](auto&& self) -> void {
    if (static_cast<int>(current.size()) == k) {
      AssignmentVerdict v;
      v.slots = current;
      FeasibilityResult fr = fourier_motzkin(realization_system(pattern, g, current));
      v.feasible = fr.feasible;
      v.generated_constraints = fr.generated;
      v.refutation = fr.refutation;
      if (fr.feasible) {
        v.witness_x = fr.witness;
        for (int i = 0; i < k; ++i)
          v.witness_y.push_back(g.pieces()[current[i].piece].tracks[current[i].track].at(fr.witness[i]));
      }
      cert.assignments.push_back(std::move(v));
      return;
    }
    // Piece index may repeat; any track of a repeated piece is allowed.
    const int min_piece = current.empty() ? 0 : current.back().piece;
    for (std::size_t s = 0; s < all.size(); ++s) {
      if (all[s].piece < min_piece) continue;
      current.push_back(all[s]);
      self(self);
      current.pop_back();
    }
  };
  recurse(recurse);
  return cert;
}

/// One line per assignment, preceded by a verdict line.
inline std::string format_certificate(const AvoidanceCertificate& cert) {
  std::ostringstream out;
  if (cert.certified())
    out << "CERTIFIED pattern=" << format_permutation(cert.pattern) << " model=" << cert.model_id
        << " assignments=" << cert.assignments.size() << " infeasible=" << cert.assignments.size() << '\n';
  else
    out << "WITNESS pattern=" << format_permutation(cert.pattern) << " model=" << cert.model_id
        << " assignments=" << cert.assignments.size() << " feasible=" << cert.feasible_count() << '\n';
  for (const auto& a : cert.assignments) {
    out << '(';
    for (std::size_t i = 0; i < a.slots.size(); ++i)
      out << (i ? " " : "") << a.slots[i].piece + 1 << ':' << a.slots[i].track + 1;
    out << ") ";
    if (a.feasible) {
      out << "feasible x=(";
      for (std::size_t i = 0; i < a.witness_x.size(); ++i) out << (i ? " " : "") << format_rational(a.witness_x[i]);
      out << ") y=(";
      for (std::size_t i = 0; i < a.witness_y.size(); ++i) out << (i ? " " : "") << format_rational(a.witness_y[i]);
      out << ")";
    } else {
      out << "infeasible eliminated=" << a.generated_constraints;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace permuton
