#pragma once

// Command dispatch for problem files. Reports are JSON objects with sorted keys.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "problem.hpp"

namespace pfaff {

struct CliFlags {
  std::size_t samples = 8;
  std::uint64_t seed = 0;
  long height = 10;
  std::size_t trials = 24;
  bool json = false;
  std::string fibration, diffeo, jet, action, map, point;
};

struct CliResult {
  nlohmann::json report;
  int exit_code = 0;
};

inline const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> c{"validate", "analyze", "tableau", "prolong", "algebroid",
                                          "correspond", "symmetry", "action-check", "identity-check"};
  return c;
}

/// 1 for failed validation and structure checks, 3 for sampling and singularity trouble, 2 for everything else.
inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotASubmersion:
    case ErrorKind::TransversalityFails:
    case ErrorKind::VerticalPartNotConstantRank:
    case ErrorKind::VerticalPartNotInvolutive:
    case ErrorKind::StructureViolation:
    case ErrorKind::CorrespondenceMismatch:
      return 1;
    case ErrorKind::SamplingExhausted:
    case ErrorKind::SingularPoint:
    case ErrorKind::PoleAtPoint:
    case ErrorKind::RankInstability:
    case ErrorKind::SingularFrame:
    case ErrorKind::NoGlobalParametrization:
    case ErrorKind::Internal:
      return 3;
    default:
      return 2;
  }
}

namespace detail {

inline nlohmann::json empty_report(const std::string& command, std::uint64_t seed) {
  using nlohmann::json;
  return json{{"command", command}, {"seed", seed},   {"verdicts", json::object()}, {"dimensions", json::object()},
              {"characters", json::object()}, {"points", json::array()}, {"witnesses", json::array()}, {"errors", json::array()}};
}

inline nlohmann::json point_json(const Point& p) {
  nlohmann::json c = nlohmann::json::object();
  for (std::size_t k = 0; k < p.coords.size(); ++k) c[p.chart->coordinate(k)] = to_string(p.coords[k]);
  return {{"chart", p.chart->name()}, {"coords", c}};
}

inline std::string pick(const std::string& flag, const std::vector<std::string>& names, const char* what) {
  if (!flag.empty()) {
    if (std::find(names.begin(), names.end(), flag) == names.end()) fail(ErrorKind::UnresolvedReference, std::string("no ") + what + " named '" + flag + "'");
    return flag;
  }
  if (names.empty()) fail(ErrorKind::InvalidInput, std::string("the problem file has no ") + what);
  return names.front();
}

template <class M>
std::vector<std::string> names_of(const ProblemFile& P, const M& m, const char* kind) {
  std::vector<std::string> out;
  for (const auto& s : P.sections)
    if (s.kind == kind && m.count(s.name)) out.push_back(s.name);
  return out;
}

/// Samples nonsingular points of F, also avoiding the given extra locus.
inline std::vector<Point> regular_points(const PfaffianFibration& F, std::size_t count, const SamplePolicy& pol,
                                         std::vector<Expr> avoid = {}) {
  Sampler s(pol.seed);
  add_unique(avoid, F.singular_locus());
  std::vector<Point> out;
  std::size_t rejected = 0;
  while (out.size() < count) {
    Point p = sample_point(F.total(), avoid, s, pol);
    try {
      F.check_point(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularPoint) throw;
      if (++rejected > pol.max_retries) fail(ErrorKind::SamplingExhausted, "too many singular samples");
      continue;
    }
    out.push_back(p);
  }
  return out;
}

struct Context {
  const ProblemFile& P;
  const CliFlags& flags;
  SamplePolicy pol;
  nlohmann::json& r;

  std::string fibration_name() const { return pick(flags.fibration, P.fibration_names, "fibration"); }
  PfaffianFibration fibration() const { return build_fibration(P, fibration_name(), pol); }
  void verdict(const std::string& k, bool v) { r["verdicts"][k] = v; }
  void dimension(const std::string& k, long v) { r["dimensions"][k] = v; }
  void witness(const std::string& w) { r["witnesses"].push_back(w); }
  bool all_verdicts() const {
    for (const auto& [k, v] : r["verdicts"].items())
      if (!v.get<bool>()) return false;
    return true;
  }
  Point chosen_point(const PfaffianFibration& F) const {
    if (flags.point.empty()) return regular_points(F, 1, pol).front();
    const Point& p = detail::lookup(P.points, ProblemFile::Entry{flags.point, 0, 0}, "point");
    if (!same_chart(p.chart, F.total())) fail(ErrorKind::InvalidInput, "point " + flags.point + " does not lie on " + F.total()->name());
    F.check_point(p);
    return p;
  }
};

inline void run_validate(Context& c) {
  std::vector<std::string> names = c.flags.fibration.empty() ? c.P.fibration_names : std::vector<std::string>{c.fibration_name()};
  if (names.empty()) fail(ErrorKind::InvalidInput, "the problem file has no fibration");
  for (const auto& name : names) {
    try {
      auto F = build_fibration(c.P, name, c.pol);
      c.verdict(name + ".valid", true);
      c.dimension(name + ".total", static_cast<long>(F.N()));
      c.dimension(name + ".base", static_cast<long>(F.n()));
      c.dimension(name + ".rank", static_cast<long>(F.rank()));
      c.dimension(name + ".vertical_rank", static_cast<long>(F.vertical_rank()));
    } catch (const Error& e) {
      if (exit_code_for(e.kind()) != 1) throw;
      c.verdict(name + ".valid", false);
      c.witness(name + ": " + std::string(kind_name(e.kind())) + ": " + e.detail());
    }
  }
}

inline void run_analyze(Context& c, std::size_t trials) {
  auto F = c.fibration();
  auto rep = one_integrability_report(F, c.pol, trials);
  c.verdict("one_integrable_on_samples", rep.one_integrable_on_samples);
  c.verdict("torsion_found", rep.torsion_found);
  c.verdict("constant_fiber_dim", rep.constant_fiber_dim);
  c.verdict("involutive_on_samples", rep.involutive_on_samples);
  const auto& first = rep.points.front();
  c.dimension("fiber_dim", first.fiber_dim);
  c.dimension("partial_dim", first.partial_dim);
  c.dimension("prolongation_dim", static_cast<long>(first.prolongation_dim));
  c.dimension("rejected_points", static_cast<long>(rep.rejected_points));
  c.r["characters"]["cartan"] = first.cartan.characters;
  for (const auto& pr : rep.points) {
    auto j = point_json(pr.point);
    j["fiber_empty"] = pr.fiber_empty;
    j["fiber_dim"] = pr.fiber_dim;
    j["partial_dim"] = pr.partial_dim;
    j["characters"] = pr.cartan.characters;
    j["involutive"] = pr.cartan.involutive;
    c.r["points"].push_back(j);
    if (pr.fiber_empty) c.witness("empty prolongation fiber at " + describe(pr.point));
  }
}

inline void run_tableau(Context& c) {
  auto F = c.fibration();
  Point p = c.chosen_point(F);
  TableauMap t = tableau_map_at(F, p);
  auto rep = involutivity_test(t, c.flags.trials, c.flags.seed, c.flags.height);
  c.r["points"].push_back(point_json(p));
  c.verdict("involutive", rep.involutive);
  c.verdict("evaluations_surjective", rep.evaluations_surjective);
  c.dimension("symbol", static_cast<long>(t.dim_g));
  c.dimension("base", static_cast<long>(t.dim_v));
  c.dimension("quotient", static_cast<long>(t.dim_w));
  c.dimension("first_prolongation", static_cast<long>(rep.dim_g1));
  c.dimension("cartan_bound", static_cast<long>(rep.bound));
  c.dimension("kernel", static_cast<long>(rep.dim_kernel));
  c.dimension("trials", static_cast<long>(rep.trials));
  c.r["characters"]["cartan"] = rep.characters;
  if (!rep.involutive) c.witness(rep.verdict());
}

inline void run_prolong(Context& c) {
  auto F = c.fibration();
  auto pr = prolong_fibration(F, c.pol);
  c.verdict("prolongation_valid", true);
  c.dimension("total", static_cast<long>(pr.fibration.N()));
  c.dimension("base", static_cast<long>(pr.fibration.n()));
  c.dimension("rank", static_cast<long>(pr.fibration.rank()));
  c.dimension("parameters", static_cast<long>(pr.parameters.size()));
  const auto& P = *F.total();
  const auto& X = *F.base();
  for (const auto& e : pr.parameters) c.witness(e.name + " = d" + P.coordinate(e.total_index) + "/d" + X.coordinate(e.base_index));
  for (const auto& w : pr.fibration.distribution().annihilators()) c.witness("form " + to_string(w));
}

inline void run_algebroid(Context& c) {
  auto F = c.fibration();
  auto A = extract_algebroid(F);
  c.dimension("rank", static_cast<long>(A.n()));
  c.dimension("basic_coordinates", static_cast<long>(A.basic_coordinates.size()));
  for (std::size_t i = 0; i < A.n(); ++i) c.witness("anchor " + std::to_string(i + 1) + " = " + to_string(A.anchor[i]));
  try {
    auto rep = check_structure(A, c.pol);
    c.verdict("flat", rep.flat);
    c.verdict("leibniz", rep.leibniz);
    c.verdict("anchor", rep.anchor);
    c.verdict("pushforward", rep.pushforward);
    c.verdict("duality", rep.duality);
    c.dimension("points", static_cast<long>(rep.points));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::StructureViolation) throw;
    c.verdict("structure", false);
    c.witness(e.detail());
  }
}

inline void run_correspond(Context& c) {
  auto F = c.fibration();
  auto A = extract_algebroid(F);
  std::vector<Point> pts = c.flags.point.empty() ? regular_points(F, c.pol.samples, c.pol) : std::vector<Point>{c.chosen_point(F)};
  bool partial = true, full = true, tableau = true;
  for (const auto& p : pts) {
    auto j = point_json(p);
    try {
      auto rep = correspondence_check(F, A, p);
      j["full_dim"] = rep.full_dim;
      j["partial_dim"] = rep.partial_dim;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CorrespondenceMismatch) throw;
      partial = full = false;
      c.witness(e.detail());
    }
    bool m = algebroid_tableau_at(A, p).matches;
    j["tableau_matches"] = m;
    if (!m) c.witness("tableau differs at " + describe(p));
    tableau = tableau && m;
    c.r["points"].push_back(j);
  }
  c.verdict("partial_equal", partial);
  c.verdict("full_equal", full);
  c.verdict("tableau_matches", tableau);
}

inline void run_symmetry(Context& c) {
  auto F = c.fibration();
  if (!c.flags.jet.empty()) {
    JetElement j = build_jet_element(c.P, pick(c.flags.jet, c.P.jet_element_names, "jet-element"));
    auto v = jet_membership(F, j);
    c.verdict("jet_internal", v.internal);
    c.verdict("jet_pfaffian", v.pfaffian);
    for (const auto& w : v.witnesses) c.witness(w);
    c.r["points"].push_back(point_json(j.source));
    if (!v.pfaffian) return;
    auto rep = act_on_derivation_at(extract_algebroid(F), j);
    c.verdict("symbol_preserved", rep.symbol_preserved);
    c.verdict("flat_jets_preserved", rep.flat_jets_preserved);
    c.verdict("bracket_preserved", rep.bracket_preserved);
    for (const auto& w : rep.witnesses) c.witness(w);
    return;
  }
  const auto& phi = c.P.diffeos.at(pick(c.flags.diffeo, names_of(c.P, c.P.diffeos, "diffeo"), "diffeo"));
  if (!same_chart(phi.chart(), F.total())) fail(ErrorKind::InvalidInput, "diffeo does not act on " + F.total()->name());
  auto v = classify_symmetry(F, phi);
  c.verdict("internal", v.internal);
  c.verdict("pfaffian", v.pfaffian);
  for (const auto& w : v.witnesses) c.witness(w);
  if (!v.pfaffian) return;
  auto pr = verify_symmetry_prolongation(prolong_fibration(F, c.pol), phi);
  c.verdict("prolongation_pfaffian", pr.verdict.pfaffian);
  c.verdict("covering", pr.covering);
  for (const auto& w : pr.verdict.witnesses) c.witness("prolongation: " + w);
  for (std::size_t k = F.N(); k < pr.prolonged.map.components().size(); ++k)
    c.witness("prolonged " + pr.prolonged.chart()->coordinate(k) + " = " + to_string(pr.prolonged.map[k], *pr.prolonged.chart()));
  auto A = extract_algebroid(F);
  bool invariant = true;
  for (const auto& p : regular_points(F, c.pol.samples, c.pol, phi.domain)) {
    auto rep = act_on_derivation_at(A, jet_of(phi, p, 2));
    auto j = point_json(p);
    j["invariant"] = rep.invariant();
    c.r["points"].push_back(j);
    invariant = invariant && rep.invariant();
    for (const auto& w : rep.witnesses) c.witness(w + " at " + describe(p));
  }
  c.verdict("invariant_on_samples", invariant);
}

inline void run_action(Context& c) {
  auto F = c.fibration();
  std::string name = pick(c.flags.action, c.P.action_names, "action");
  if (c.flags.fibration.empty()) F = build_fibration(c.P, detail::key(c.P.section(name), "fibration").value, c.pol);
  auto rep = check_action(F, build_action(c.P, name, F), c.pol);
  c.verdict("internal", rep.internal);
  c.verdict("pfaffian", rep.pfaffian);
  c.dimension("samples", static_cast<long>(rep.samples));
  for (const auto& w : rep.witnesses) c.witness(w);
}

inline void run_identity(Context& c) {
  std::string name = c.flags.map;
  if (name.empty()) {
    for (const auto& s : c.P.sections)
      if (s.kind == "jet") {
        name = detail::key(s, "map").value;
        break;
      }
  }
  name = pick(name, names_of(c.P, c.P.maps, "map"), "map");
  auto rep = point_symmetry_identity(c.P.maps.at(name), c.pol.samples, c.flags.seed, c.flags.height);
  c.verdict("all_equal", rep.all_equal);
  c.verdict("containment", rep.containment);
  c.dimension("samples", static_cast<long>(rep.samples));
  for (const auto& w : rep.witnesses) c.witness(w);
}

}  // namespace detail

/// Runs one command. Never throws: failures become entries of "errors" and a nonzero exit code.
inline CliResult execute(const std::string& command, std::string_view problem_text, const CliFlags& flags) {
  CliResult out{detail::empty_report(command, flags.seed), 0};
  auto error = [&](const std::string& kind, const std::string& message, int code) {
    out.report["errors"].push_back({{"kind", kind}, {"message", message}});
    out.exit_code = code;
  };
  try {
    if (std::find(cli_commands().begin(), cli_commands().end(), command) == cli_commands().end())
      fail(ErrorKind::InvalidInput, "unknown command '" + command + "'");
    ProblemFile P = parse_problem(problem_text);
    SamplePolicy pol;
    pol.seed = flags.seed;
    pol.samples = flags.samples;
    pol.height = flags.height;
    detail::Context c{P, flags, pol, out.report};
    if (command == "validate") detail::run_validate(c);
    else if (command == "analyze") detail::run_analyze(c, flags.trials);
    else if (command == "tableau") detail::run_tableau(c);
    else if (command == "prolong") detail::run_prolong(c);
    else if (command == "algebroid") detail::run_algebroid(c);
    else if (command == "correspond") detail::run_correspond(c);
    else if (command == "symmetry") detail::run_symmetry(c);
    else if (command == "action-check") detail::run_action(c);
    else detail::run_identity(c);
    auto& v = out.report["verdicts"];
    bool ok = c.all_verdicts();
    if (command == "analyze")
      ok = !v["torsion_found"].get<bool>() && v["one_integrable_on_samples"].get<bool>() && v["involutive_on_samples"].get<bool>();
    if (command == "tableau") ok = v["involutive"].get<bool>();
    out.exit_code = ok ? 0 : 1;
  } catch (const Error& e) {
    error(std::string(kind_name(e.kind())), e.detail(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    error("Internal", e.what(), 3);
  }
  return out;
}

/// Plain-text rendering of a report.
inline std::string render_text(const nlohmann::json& r) {
  std::string s = "command: " + r["command"].get<std::string>() + " (seed " + std::to_string(r["seed"].get<std::uint64_t>()) + ")\n";
  for (const auto& [k, v] : r["verdicts"].items()) s += "  " + k + ": " + (v.get<bool>() ? "true" : "false") + "\n";
  for (const auto& [k, v] : r["dimensions"].items()) s += "  " + k + " = " + std::to_string(v.get<long>()) + "\n";
  for (const auto& [k, v] : r["characters"].items()) {
    s += "  characters " + k + ":";
    for (const auto& x : v) s += " " + std::to_string(x.get<long>());
    s += "\n";
  }
  for (const auto& p : r["points"]) {
    s += "  point on " + p["chart"].get<std::string>() + ":";
    for (const auto& [k, v] : p["coords"].items()) s += " " + k + "=" + v.get<std::string>();
    s += "\n";
  }
  for (const auto& w : r["witnesses"]) s += "  witness: " + w.get<std::string>() + "\n";
  for (const auto& e : r["errors"]) s += "error " + e["kind"].get<std::string>() + ": " + e["message"].get<std::string>() + "\n";
  return s;
}

}  // namespace pfaff
