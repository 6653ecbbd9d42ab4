// Command-line front end. Exit codes: 0 ok, 1 negative answer (witness found,
// pattern contained), 2 bad input, 3 violated precondition.

#include "permuton/permuton.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace permuton;

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kPrecondition = 3 };

struct Options {
  std::string format = "text";
  std::string pattern;
  std::string perm_file;
  std::string model_file;
  std::string a, b;
  std::string method = "interval";
  std::string out_file;
  std::string x_mode = "midpoint";
  std::string tie = "lower";
  std::string mode = "exhaustive";
  std::string direction = "vertical";
  std::string kind;
  std::string n_list;
  std::string rho_list;
  std::string delta = "1/10";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  std::uint64_t seeds = 1;
  std::uint64_t trials = 0;
  int n = 0;
  int grid = 4;
  int digit_depth = 3;
  int avoid_depth = 3;
  int quotient_depth = 5;
  int involution_depth = 6;
};

std::string pattern_literal(const Permutation& p) {
  std::string out;
  const bool digits = p.order() <= 9;
  for (int i = 1; i <= p.order(); ++i) {
    if (!digits && i > 1) out += '-';
    out += std::to_string(p(i));
  }
  return out;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

Model require_model(const Options& o) {
  if (o.model_file.empty()) throw ParseError(ParseError::Kind::Empty, "--model is required");
  return load_model(o.model_file);
}

TrackPermuton require_tracks(const Model& m) {
  if (const auto* g = std::get_if<TrackPermuton>(&m)) return *g;
  throw ParseError(ParseError::Kind::Malformed, "this command needs a model of type \"tracks\"");
}

void print_json(const Json& j) { std::cout << j.dump() << '\n'; }

template <typename T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(convert(item));
  if (out.empty()) throw ParseError(ParseError::Kind::Empty, "empty list '" + text + "'");
  return out;
}

int to_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseError::Kind::Malformed, "not an integer: '" + s + "'");
  }
}

Rational to_rational(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(ParseError::Kind::Malformed, e.what());
  }
}

/// "y:w" atoms separated by spaces or commas.
Fiber parse_fiber(const std::string& text) {
  std::vector<Atom> atoms;
  std::string tok;
  std::string normalized = text;
  for (char& c : normalized)
    if (c == ',') c = ' ';
  std::istringstream in(normalized);
  while (in >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError(ParseError::Kind::Malformed, "atom '" + tok + "' is not y:w");
    atoms.push_back({to_rational(tok.substr(0, colon)), to_rational(tok.substr(colon + 1))});
  }
  if (atoms.empty()) throw ParseError(ParseError::Kind::Empty, "empty fiber");
  return Fiber(std::move(atoms));
}

/// A distance operand file holds either model JSON or a permutation line.
DistanceOperand load_operand(const std::string& path, int digit_depth) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return distance_operand(parse_model(text), digit_depth);
  return StepPermuton{parse_permutation(text)};
}

// ---------------------------------------------------------------------------

int cmd_density(const Options& o) {
  const Permutation A = parse_pattern(o.pattern);
  if (o.perm_file.empty() == o.model_file.empty())
    throw ParseError(ParseError::Kind::Malformed, "give exactly one of --perm and --model");
  if (!o.perm_file.empty()) {
    const Permutation pi = load_permutation(o.perm_file);
    const PatternCount c = count_occurrences(A, pi);
    if (o.format == "json")
      print_json({{"pattern", pattern_literal(A)},
                  {"occurrences", c.occurrences},
                  {"total_subsets", c.total_subsets},
                  {"density", format_rational(c.density())}});
    else if (o.format == "csv")
      std::cout << "model,pattern,value,ci,seed\n"
                << stem(o.perm_file) << ',' << pattern_literal(A) << ',' << format_decimal(c.density()) << ",0,0\n";
    else
      std::cout << format_rational(c.density()) << '\n';
    return kOk;
  }
  const Model m = require_model(o);
  const DensityEstimate e = density_monte_carlo(A, m, o.samples, o.seed);
  if (o.format == "csv") {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.10f,%.10f", e.estimate, e.ci_half_width);
    std::cout << "model,pattern,value,ci,seed\n"
              << stem(o.model_file) << ',' << pattern_literal(A) << ',' << buf << ',' << e.seed << '\n';
  } else {
    print_json(estimate_to_json(e));
  }
  return kOk;
}

int cmd_certify(const Options& o) {
  const Permutation A = parse_pattern(o.pattern);
  const TrackPermuton g = require_tracks(require_model(o));
  const AvoidanceCertificate cert = certify_avoidance(A, g, stem(o.model_file));
  if (o.format == "json")
    print_json(certificate_to_json(cert));
  else
    std::cout << format_certificate(cert);
  return cert.certified() ? kOk : kNegative;
}

int removal_single(const Options& o, const Permutation& A, const Model& m) {
  if (const auto* g = std::get_if<TrackPermuton>(&m)) {
    const AvoidanceCertificate cert = certify_avoidance(A, *g, stem(o.model_file));
    if (!cert.certified()) {
      std::cerr << "model is not certified to avoid the pattern\n" << format_certificate(cert);
      return kNegative;
    }
  }
  ResnapOptions opt;
  if (o.x_mode == "random")
    opt.placement = XPlacement::Random;
  else if (o.x_mode != "midpoint")
    throw ParseError(ParseError::Kind::Malformed, "--x-mode must be midpoint or random");
  if (o.tie == "upper")
    opt.tie_rule = TieRule::Upper;
  else if (o.tie != "lower")
    throw ParseError(ParseError::Kind::Malformed, "--tie must be lower or upper");
  opt.seed = o.seed;
  opt.pattern = A;
  const RemovalReport r = resnap(load_permutation(o.perm_file), m, opt);
  if (o.format == "json") {
    print_json(report_to_json(r));
  } else {
    std::cout << format_permutation(r.output) << '\n'
              << "cost " << r.cost << '\n'
              << "normalized_cost " << format_rational(r.normalized_cost) << '\n'
              << "avoidance_verified " << (r.avoidance_checked ? (r.avoidance_verified ? "true" : "false") : "unchecked")
              << '\n';
  }
  return r.avoidance_checked && !r.avoidance_verified ? kNegative : kOk;
}

int cmd_removal(const Options& o) {
  const Permutation A = parse_pattern(o.pattern);
  const Model m = require_model(o);
  if (!o.perm_file.empty()) return removal_single(o, A, m);

  const TrackPermuton g = require_tracks(m);
  if (o.n_list.empty() || o.rho_list.empty())
    throw ParseError(ParseError::Kind::Empty, "experiment mode needs --n and --rho (or --perm for a single run)");
  const auto ns = split_list<int>(o.n_list, to_int);
  const auto rates = split_list<Rational>(o.rho_list, to_rational);
  const ExperimentResult res = removal_experiment(A, g, ns, rates, o.seed, o.seeds, stem(o.model_file));
  if (!res.certificate.certified()) {
    std::cerr << "model is not certified to avoid the pattern\n" << format_certificate(res.certificate);
    return kNegative;
  }
  std::string body;
  if (o.format == "json") {
    Json rows = Json::array();
    for (const auto& r : res.rows) rows.push_back(experiment_row_to_json(r));
    body = rows.dump() + "\n";
  } else {
    body = experiment_csv(res.rows);
  }
  if (o.out_file.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(o.out_file, std::ios::binary);
    if (!out) throw ParseError(ParseError::Kind::Malformed, "cannot write '" + o.out_file + "'");
    out << body;
  }
  bool all_verified = true;
  for (const auto& r : res.rows) all_verified = all_verified && r.avoidance_verified;
  return all_verified ? kOk : kNegative;
}

int cmd_count(const Options& o) {
  const Permutation A = parse_pattern(o.pattern);
  const PatternCount c = count_occurrences(A, load_permutation(o.perm_file));
  if (o.format == "json")
    print_json({{"occurrences", c.occurrences},
                {"total_subsets", c.total_subsets},
                {"density", format_rational(c.density())}});
  else if (o.format == "csv")
    std::cout << "pattern,occurrences,total_subsets,density\n"
              << pattern_literal(A) << ',' << c.occurrences << ',' << c.total_subsets << ','
              << format_decimal(c.density()) << '\n';
  else
    std::cout << c.occurrences << ' ' << c.total_subsets << ' ' << format_rational(c.density()) << '\n';
  return kOk;
}

int cmd_avoid(const Options& o) {
  const Permutation A = parse_pattern(o.pattern);
  const bool ok = avoids(A, load_permutation(o.perm_file));
  if (o.format == "json")
    print_json({{"pattern", pattern_literal(A)}, {"avoids", ok}});
  else
    std::cout << (ok ? "avoids" : "contains") << '\n';
  return ok ? kOk : kNegative;
}

int cmd_sample(const Options& o) {
  if (o.n < 1) throw PreconditionError("--n must be >= 1");
  const Permutation pi = sample_permutation(require_model(o), o.n, o.seed);
  if (o.format == "json")
    print_json({{"perm", std::vector<int>(pi.values().begin(), pi.values().end())}, {"seed", o.seed}});
  else
    std::cout << format_permutation(pi) << '\n';
  return kOk;
}

int cmd_distance(const Options& o) {
  if (o.a.empty() || o.b.empty()) throw ParseError(ParseError::Kind::Empty, "--a and --b are required");
  const DistanceOperand x = load_operand(o.a, o.digit_depth);
  const DistanceOperand y = load_operand(o.b, o.digit_depth);
  DistanceResult d;
  if (o.method == "interval") {
    d = rect_distance_interval(x, y);
  } else if (o.method == "cut") {
    const auto* sx = std::get_if<StepPermuton>(&x);
    const auto* sy = std::get_if<StepPermuton>(&y);
    if (!sx || !sy) throw PreconditionError("the brute-force cut distance needs two step permutons");
    d = cut_distance_bruteforce(*sx, *sy);
  } else {
    throw ParseError(ParseError::Kind::Malformed, "--method must be interval or cut");
  }
  if (o.format == "json") {
    print_json(distance_to_json(d));
  } else if (o.format == "csv") {
    std::string w = describe_witness(d);
    for (char& c : w)
      if (c == ',') c = ';';
    std::cout << "model_a,model_b,value,witness,seed\n"
              << stem(o.a) << ',' << stem(o.b) << ',' << format_decimal(d.value) << ',' << w << ",0\n";
  } else {
    std::cout << format_rational(d.value) << ' ' << describe_witness(d) << '\n';
  }
  return kOk;
}

int cmd_lp(const Options& o) {
  if (!o.model_file.empty()) {
    const LpProfile prof = fiber_lp_profile(require_model(o), o.grid, to_rational(o.delta));
    Json j{{"grid", Json::array()}, {"distance", Json::array()}, {"parts", Json::array()}};
    for (const auto& g : prof.grid) j["grid"].push_back(format_rational(g));
    for (const auto& row : prof.distance) {
      Json r = Json::array();
      for (const auto& v : row) r.push_back(format_rational(v));
      j["distance"].push_back(std::move(r));
    }
    for (const auto& [lo, hi] : prof.parts) j["parts"].push_back({lo + 1, hi + 1});
    if (o.format == "json") {
      print_json(j);
    } else {
      for (const auto& row : prof.distance) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? " " : "") << format_rational(row[i]);
        std::cout << '\n';
      }
      std::cout << "parts";
      for (const auto& [lo, hi] : prof.parts) std::cout << ' ' << lo + 1 << '-' << hi + 1;
      std::cout << '\n';
    }
    return kOk;
  }
  if (o.a.empty() || o.b.empty()) throw ParseError(ParseError::Kind::Empty, "give --a and --b fibers, or --model");
  const Rational d = lp_distance(parse_fiber(o.a), parse_fiber(o.b));
  if (o.format == "json")
    print_json({{"distance", format_rational(d)}});
  else
    std::cout << format_rational(d) << '\n';
  return kOk;
}

int cmd_swbound(const Options& o) {
  const TrackPermuton g = require_tracks(require_model(o));
  std::optional<Permutation> A;
  if (!o.pattern.empty()) A = parse_pattern(o.pattern);
  GenerationMode mode = GenerationMode::Exhaustive;
  if (o.mode == "random")
    mode = GenerationMode::Random;
  else if (o.mode != "exhaustive")
    throw ParseError(ParseError::Kind::Malformed, "--mode must be exhaustive or random");
  const GenerationReport r = sw_generate(g, o.n, mode, A, o.seed, o.trials);
  if (o.format == "json") {
    print_json(generation_to_json(r));
  } else {
    char root[32];
    std::snprintf(root, sizeof root, "%.10f", r.nth_root);
    std::cout << "distinct " << r.distinct_count << "\nchoices " << r.per_choice_total << "\nties " << r.discarded_ties
              << "\nnth_root " << root << '\n';
    if (r.pattern_checked) std::cout << "all_avoiding " << (r.all_avoiding ? "true" : "false") << '\n';
  }
  return r.pattern_checked && !r.all_avoiding ? kNegative : kOk;
}

int cmd_digitswap(const Options& o) {
  const QuadrupleScan quad = scan_3142_images(o.avoid_depth);
  const QuotientScan quot = scan_difference_quotients(o.quotient_depth);
  const bool inv = digit_swap_is_involution(o.involution_depth);
  Json values = Json::array();
  for (const auto& v : quot.values) values.push_back(format_rational(v));
  if (o.format == "json") {
    print_json({{"avoidance", {{"depth", quad.depth}, {"quadruples", quad.quadruples}, {"hits", quad.hits}}},
                {"quotients",
                 {{"depth", quot.depth}, {"pairs", quot.pairs}, {"values", values}, {"within_target", quot.within_target}}},
                {"involution", {{"depth", o.involution_depth}, {"ok", inv}}}});
  } else {
    std::cout << "avoidance depth " << quad.depth << " quadruples " << quad.quadruples << " hits " << quad.hits << '\n'
              << "quotients depth " << quot.depth << " pairs " << quot.pairs << " values";
    for (const auto& v : quot.values) std::cout << ' ' << format_rational(v);
    std::cout << (quot.within_target ? " ok" : " outside") << '\n'
              << "involution depth " << o.involution_depth << (inv ? " ok" : " failed") << '\n';
  }
  return quad.hits == 0 && quot.within_target && inv ? kOk : kNegative;
}

int cmd_molecules(const Options& o) {
  const Model m = require_model(o);
  Direction dir = Direction::Vertical;
  if (o.direction == "horizontal")
    dir = Direction::Horizontal;
  else if (o.direction != "vertical")
    throw ParseError(ParseError::Kind::Malformed, "--direction must be vertical or horizontal");
  MoleculeProfile p;
  if (const auto* g = std::get_if<TrackPermuton>(&m))
    p = molecule_profile(*g, dir);
  else if (const auto* s = std::get_if<StepPermuton>(&m))
    p = molecule_profile(*s, dir);
  else
    throw PreconditionError("molecule profiles need a tracks or step model");
  if (o.format == "json") {
    Json hist = Json::object();
    for (const auto& [count, measure] : p.histogram) hist[std::to_string(count)] = format_rational(measure);
    Json cross = Json::array();
    for (const auto& c : p.crossings) cross.push_back({{"x", format_rational(c.x)}, {"atoms", c.atoms}});
    print_json({{"max_atoms", p.max_atoms}, {"histogram", hist}, {"crossings", cross}});
  } else {
    std::cout << "max_atoms " << p.max_atoms << '\n';
    for (const auto& [count, measure] : p.histogram) std::cout << "atoms " << count << ' ' << format_rational(measure) << '\n';
    for (const auto& c : p.crossings) std::cout << "crossing " << format_rational(c.x) << " atoms " << c.atoms << '\n';
  }
  return kOk;
}

int cmd_marginals(const Options& o) {
  const MarginalReport r = validate_marginals(require_tracks(require_model(o)));
  if (o.format == "json")
    print_json({{"x_ok", r.x_ok},
                {"y_ok", r.y_ok},
                {"max_deviation", format_rational(r.max_deviation)},
                {"diagnostic", r.diagnostic}});
  else
    std::cout << "x_ok " << (r.x_ok ? "true" : "false") << "\ny_ok " << (r.y_ok ? "true" : "false")
              << "\nmax_deviation " << format_rational(r.max_deviation) << '\n'
              << (r.diagnostic.empty() ? "" : r.diagnostic + "\n");
  return r.x_ok && r.y_ok ? kOk : kNegative;
}

int cmd_model(const Options& o) {
  Model m = UniformPermuton{};
  if (o.kind == "zigzag")
    m = build_zigzag(parse_pattern(o.pattern));
  else if (o.kind == "step")
    m = build_step(parse_pattern(o.pattern));
  else if (o.kind == "identity")
    m = identity_permuton();
  else if (o.kind == "transpose")
    m = transpose_tracks(require_tracks(require_model(o)));
  else if (o.kind == "digit-swap")
    m = DigitSwapPermuton{};
  else if (o.kind != "uniform")
    throw ParseError(ParseError::Kind::Malformed, "unknown --kind '" + o.kind + "'");
  std::cout << format_model(m);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pattern densities, permuton models, avoidance certificates and removal experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
  };
  auto add_pattern = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--pattern", o.pattern, "pattern literal, e.g. 132 or 1,10,2,...");
    if (required) opt->required();
  };

  auto* density = app.add_subcommand("density", "exact density in a permutation, or Monte Carlo in a model");
  add_pattern(density);
  density->add_option("--perm", o.perm_file, "permutation file");
  density->add_option("--model", o.model_file, "model JSON file");
  density->add_option("--samples", o.samples, "Monte Carlo sample count");
  density->add_option("--seed", o.seed, "seed");
  add_format(density);

  auto* certify = app.add_subcommand("certify", "decide pattern avoidance of a tracks model exactly");
  add_pattern(certify);
  certify->add_option("--model", o.model_file, "model JSON file")->required();
  add_format(certify);

  auto* removal = app.add_subcommand("removal", "resnap a permutation, or run the removal experiment");
  add_pattern(removal);
  removal->add_option("--model", o.model_file, "model JSON file")->required();
  removal->add_option("--perm", o.perm_file, "single permutation to resnap");
  removal->add_option("--n", o.n_list, "comma-separated orders");
  removal->add_option("--rho", o.rho_list, "comma-separated perturbation rates");
  removal->add_option("--seeds", o.seeds, "number of seeds per cell");
  removal->add_option("--seed", o.seed, "first seed (random x placement seed in single mode)");
  removal->add_option("--x-mode", o.x_mode, "midpoint or random");
  removal->add_option("--tie", o.tie, "lower or upper");
  removal->add_option("--out", o.out_file, "write experiment rows to this file");
  add_format(removal);

  auto* count = app.add_subcommand("count", "count pattern occurrences");
  add_pattern(count);
  count->add_option("--perm", o.perm_file, "permutation file")->required();
  add_format(count);

  auto* avoid = app.add_subcommand("avoid", "test pattern avoidance");
  add_pattern(avoid);
  avoid->add_option("--perm", o.perm_file, "permutation file")->required();
  add_format(avoid);

  auto* sample = app.add_subcommand("sample", "sample a permutation from a model");
  sample->add_option("--model", o.model_file, "model JSON file")->required();
  sample->add_option("--n", o.n, "order")->required();
  sample->add_option("--seed", o.seed, "seed");
  add_format(sample);

  auto* distance = app.add_subcommand("distance", "rectangular distance between two models or permutations");
  distance->add_option("--a", o.a, "model JSON or permutation file")->required();
  distance->add_option("--b", o.b, "model JSON or permutation file")->required();
  distance->add_option("--method", o.method, "interval or cut");
  distance->add_option("--digit-depth", o.digit_depth, "base-4 depth for digit-swap models");
  add_format(distance);

  auto* lp = app.add_subcommand("lp", "Levy-Prokhorov distance of fibers, or a model's fiber profile");
  lp->add_option("--a", o.a, "fiber as y:w atoms");
  lp->add_option("--b", o.b, "fiber as y:w atoms");
  lp->add_option("--model", o.model_file, "model JSON file");
  lp->add_option("--grid", o.grid, "number of grid cells");
  lp->add_option("--delta", o.delta, "part threshold");
  add_format(lp);

  auto* sw = app.add_subcommand("swbound", "count permutations generated from fixed fiber positions");
  sw->add_option("--model", o.model_file, "tracks model JSON file")->required();
  sw->add_option("--n", o.n, "order")->required();
  sw->add_option("--mode", o.mode, "exhaustive or random");
  sw->add_option("--trials", o.trials, "random mode trials");
  sw->add_option("--seed", o.seed, "random mode seed");
  add_pattern(sw, false);
  add_format(sw);

  auto* digits = app.add_subcommand("digitswap-check", "exhaustive checks of the digit-swap map");
  digits->add_option("--avoid-depth", o.avoid_depth, "prefix depth for the 3142 scan");
  digits->add_option("--quotient-depth", o.quotient_depth, "maximum prefix depth for difference quotients");
  digits->add_option("--involution-depth", o.involution_depth, "string length for the involution check");
  add_format(digits);

  auto* molecules = app.add_subcommand("molecules", "fiber atom counts");
  molecules->add_option("--model", o.model_file, "model JSON file")->required();
  molecules->add_option("--direction", o.direction, "vertical or horizontal");
  add_format(molecules);

  auto* marginals = app.add_subcommand("marginals", "exact uniform-marginal check");
  marginals->add_option("--model", o.model_file, "tracks model JSON file")->required();
  add_format(marginals);

  auto* model = app.add_subcommand("model", "write a model JSON file");
  model->add_option("--kind", o.kind, "zigzag, step, identity, transpose, uniform or digit-swap")->required();
  add_pattern(model, false);
  model->add_option("--model", o.model_file, "input model for transpose");
  add_format(model);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (density->parsed()) return cmd_density(o);
    if (certify->parsed()) return cmd_certify(o);
    if (removal->parsed()) return cmd_removal(o);
    if (count->parsed()) return cmd_count(o);
    if (avoid->parsed()) return cmd_avoid(o);
    if (sample->parsed()) return cmd_sample(o);
    if (distance->parsed()) return cmd_distance(o);
    if (lp->parsed()) return cmd_lp(o);
    if (sw->parsed()) return cmd_swbound(o);
    if (digits->parsed()) return cmd_digitswap(o);
    if (molecules->parsed()) return cmd_molecules(o);
    if (marginals->parsed()) return cmd_marginals(o);
    if (model->parsed()) return cmd_model(o);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPrecondition;
  }
  return kInput;
}
