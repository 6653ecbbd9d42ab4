#pragma once

#include "certify.hpp"
#include "density.hpp"
#include "distance.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "removal.hpp"
#include "stanley_wilf.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace permuton {

using Json = nlohmann::ordered_json;

namespace detail {

inline Rational rational_field(const Json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(ParseError::Kind::Malformed, std::string("missing field '") + key + "'");
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ParseError(ParseError::Kind::Malformed, std::string("field '") + key + "' must be a \"p/q\" string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(ParseError::Kind::Malformed, std::string("field '") + key + "': " + e.what());
  }
}

inline Json rational_array(const std::vector<Rational>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(format_rational(x));
  return out;
}

inline Json int_array(const Permutation& pi) { return Json(std::vector<int>(pi.values().begin(), pi.values().end())); }

}  // namespace detail

inline Json model_to_json(const Model& model) {
  Json j;
  if (const auto* g = std::get_if<TrackPermuton>(&model)) {
    j["type"] = "tracks";
    j["pieces"] = Json::array();
    for (const auto& p : g->pieces()) {
      Json piece;
      piece["x_lo"] = format_rational(p.x_lo);
      piece["x_hi"] = format_rational(p.x_hi);
      piece["tracks"] = Json::array();
      for (const auto& t : p.tracks)
        piece["tracks"].push_back(
            Json{{"a", format_rational(t.slope)}, {"b", format_rational(t.intercept)}, {"w", format_rational(t.weight)}});
      j["pieces"].push_back(std::move(piece));
    }
  } else if (const auto* s = std::get_if<StepPermuton>(&model)) {
    j["type"] = "step";
    j["perm"] = detail::int_array(s->base);
  } else if (std::holds_alternative<DigitSwapPermuton>(model)) {
    j["type"] = "digit-swap-base4";
  } else {
    j["type"] = "uniform";
  }
  return j;
}

/// Compact single-line JSON followed by a newline.
inline std::string format_model(const Model& model) { return model_to_json(model).dump() + "\n"; }

inline Model model_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw ParseError(ParseError::Kind::Malformed, "model must be an object with a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform") return UniformPermuton{};
  if (type == "digit-swap-base4") return DigitSwapPermuton{};
  if (type == "step") {
    if (!j.contains("perm") || !j.at("perm").is_array())
      throw ParseError(ParseError::Kind::Malformed, "step model needs an integer array 'perm'");
    std::string text;
    for (const auto& v : j.at("perm")) {
      if (!v.is_number_integer()) throw ParseError(ParseError::Kind::Malformed, "'perm' entries must be integers");
      text += std::to_string(v.get<long long>()) + " ";
    }
    return StepPermuton{parse_permutation(text)};
  }
  if (type == "tracks") {
    if (!j.contains("pieces") || !j.at("pieces").is_array() || j.at("pieces").empty())
      throw ParseError(ParseError::Kind::Malformed, "tracks model needs a non-empty 'pieces' array");
    std::vector<Piece> pieces;
    for (const auto& pj : j.at("pieces")) {
      if (!pj.is_object()) throw ParseError(ParseError::Kind::Malformed, "each piece must be an object");
      Piece p{detail::rational_field(pj, "x_lo"), detail::rational_field(pj, "x_hi"), {}};
      if (!pj.contains("tracks") || !pj.at("tracks").is_array())
        throw ParseError(ParseError::Kind::Malformed, "each piece needs a 'tracks' array");
      for (const auto& tj : pj.at("tracks")) {
        if (!tj.is_object()) throw ParseError(ParseError::Kind::Malformed, "each track must be an object");
        p.tracks.push_back(
            {detail::rational_field(tj, "a"), detail::rational_field(tj, "b"), detail::rational_field(tj, "w")});
      }
      pieces.push_back(std::move(p));
    }
    try {
      return TrackPermuton(std::move(pieces));
    } catch (const PreconditionError& e) {
      throw ParseError(ParseError::Kind::Malformed, std::string("invalid tracks model: ") + e.what());
    }
  }
  throw ParseError(ParseError::Kind::Malformed, "unknown model type '" + type + "'");
}

inline Model parse_model(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ParseError::Kind::Malformed, std::string("model file is not JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::Empty, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Model load_model(const std::string& path) { return parse_model(read_text_file(path)); }

inline Permutation load_permutation(const std::string& path) { return parse_permutation(read_text_file(path)); }

inline Json report_to_json(const RemovalReport& r) {
  return Json{{"input", detail::int_array(r.input)},
              {"output", detail::int_array(r.output)},
              {"cost", r.cost},
              {"normalized_cost", format_rational(r.normalized_cost)},
              {"avoidance_checked", r.avoidance_checked},
              {"avoidance_verified", r.avoidance_verified},
              {"snap_distances", detail::rational_array(r.snap_distances)},
              {"max_snap_distance", format_rational(r.max_snap_distance)},
              {"tie_events", r.tie_events},
              {"collisions", r.collisions},
              {"boundary_shifts", r.boundary_shifts}};
}

inline Json estimate_to_json(const DensityEstimate& e) {
  return Json{{"estimate", e.estimate},
              {"hits", e.hits},
              {"sample_count", e.sample_count},
              {"ci_half_width", e.ci_half_width},
              {"seed", e.seed}};
}

inline Json distance_to_json(const DistanceResult& d) {
  Json j{{"value", format_rational(d.value)}};
  if (d.kind == DistanceResult::Witness::Intervals) {
    j["witness"] = Json{{"S", {format_rational(d.s_lo), format_rational(d.s_hi)}},
                        {"T", {format_rational(d.t_lo), format_rational(d.t_hi)}}};
  } else {
    j["witness"] = Json{{"grid", d.grid}, {"S", d.s_cells}, {"T", d.t_cells}};
  }
  return j;
}

inline Json certificate_to_json(const AvoidanceCertificate& c) {
  Json j{{"pattern", detail::int_array(c.pattern)},
         {"model", c.model_id},
         {"certified", c.certified()},
         {"assignments", Json::array()}};
  for (const auto& a : c.assignments) {
    Json slots = Json::array();
    for (const auto& s : a.slots) slots.push_back({s.piece + 1, s.track + 1});
    Json entry{{"slots", slots}, {"feasible", a.feasible}};
    if (a.feasible) {
      entry["x"] = detail::rational_array(a.witness_x);
      entry["y"] = detail::rational_array(a.witness_y);
    } else {
      entry["eliminated"] = a.generated_constraints;
      entry["refutation"] = a.refutation;
    }
    j["assignments"].push_back(std::move(entry));
  }
  return j;
}

inline Json generation_to_json(const GenerationReport& g) {
  Json j{{"mode", g.mode == GenerationMode::Exhaustive ? "exhaustive" : "random"},
         {"n", g.n},
         {"per_choice_total", g.per_choice_total},
         {"discarded_ties", g.discarded_ties},
         {"distinct_count", g.distinct_count},
         {"nth_root", g.nth_root}};
  if (g.pattern_checked) j["all_avoiding"] = g.all_avoiding;
  return j;
}

inline Json experiment_row_to_json(const ExperimentRow& r) {
  return Json{{"n", r.n},
              {"rho", format_rational(r.rho)},
              {"seed", r.seed},
              {"density", format_rational(r.density)},
              {"cost", r.cost},
              {"normalized_cost", format_rational(r.normalized_cost)},
              {"d_interval", format_rational(r.d_interval)},
              {"avoidance_verified", r.avoidance_verified}};
}

}  // namespace permuton
