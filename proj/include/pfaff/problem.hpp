#pragma once

// Sectioned problem files: charts, maps, distributions, fibrations, jets, PDEs, points, diffeomorphisms, jets of
// diffeomorphisms and groupoid actions, each introduced by a `[kind name ...]` header.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symmetry.hpp"

namespace pfaff {

struct ProblemFile {
  struct Entry {
    std::string value;
    std::size_t line = 0, column = 0;
  };
  /// Keys of one section, in file order; list-valued keys keep one entry per item.
  struct Section {
    std::string kind, name;
    std::vector<std::string> header;  // words after the name
    std::size_t line = 0;
    std::map<std::string, std::vector<Entry>> keys;
    std::vector<std::string> key_order;
  };

  std::vector<Section> sections;
  std::map<std::string, ChartRef> charts;
  std::map<std::string, SmoothMap> maps;
  std::map<std::string, Distribution> distributions;
  std::map<std::string, Point> points;
  std::map<std::string, LocalDiffeo> diffeos;
  std::map<std::string, JetFibration> jets;
  /// Fibration-like sections (fibration, jet, pde) in file order.
  std::vector<std::string> fibration_names;
  std::vector<std::string> action_names, jet_element_names;

  const Section& section(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return s;
    fail(ErrorKind::UnresolvedReference, "no section named " + name);
  }
  bool has(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return true;
    return false;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] inline void syntax(std::size_t line, std::size_t col, const std::string& msg) {
  fail(ErrorKind::SyntaxError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Re-raises parse failures of a value with its location in the file.
template <class F>
auto located(const ProblemFile::Entry& e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::SyntaxError || err.kind() == ErrorKind::UnknownCoordinate || err.kind() == ErrorKind::ZeroDenominator)
      fail(err.kind(), "line " + std::to_string(e.line) + ", column " + std::to_string(e.column) + ": " + err.detail());
    throw;
  }
}

inline std::vector<ProblemFile::Section> split_sections(std::string_view text) {
  std::vector<ProblemFile::Section> out;
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string raw(text.substr(pos, end - pos));
    pos = end + 1;
    ++lineno;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    std::size_t indent = raw.find_first_not_of(" \t");
    if (line.front() == '[') {
      if (line.back() != ']') syntax(lineno, indent + line.size(), "expected ']'");
      auto words = split_words(line.substr(1, line.size() - 2));
      if (words.size() < 2) syntax(lineno, indent + 1, "section header needs a kind and a name");
      ProblemFile::Section s;
      s.kind = words[0];
      s.name = words[1];
      s.header.assign(words.begin() + 2, words.end());
      s.line = lineno;
      out.push_back(std::move(s));
    } else {
      if (out.empty()) syntax(lineno, indent + 1, "content before the first section");
      auto& s = out.back();
      // Items are separated by ';'. An item with '=' starts a key; one without continues the previous key's list.
      std::string current;
      std::size_t start = 0;
      while (start <= raw.size()) {
        std::size_t semi = raw.find(';', start);
        if (semi == std::string::npos) semi = raw.size();
        std::string item = raw.substr(start, semi - start);
        std::size_t col = start + item.find_first_not_of(" \t") + 1;
        std::size_t eq = item.find('=');
        if (eq != std::string::npos) {
          current = trim(item.substr(0, eq));
          if (current.empty()) syntax(lineno, col, "missing key before '='");
          if (s.keys.count(current)) fail(ErrorKind::DuplicateName, "line " + std::to_string(lineno) + ": key '" + current + "' repeated in section " + s.name);
          s.key_order.push_back(current);
          std::string value = item.substr(eq + 1);
          std::size_t vcol = start + eq + 1 + (value.find_first_not_of(" \t") == std::string::npos ? 0 : value.find_first_not_of(" \t")) + 1;
          s.keys[current].push_back({trim(value), lineno, vcol});
        } else {
          if (current.empty()) syntax(lineno, col, "expected 'key = value'");
          if (trim(item).empty()) syntax(lineno, col, "empty list item");
          s.keys[current].push_back({trim(item), lineno, col});
        }
        start = semi + 1;
      }
    }
    if (end == text.size()) break;
  }
  return out;
}

inline const ProblemFile::Entry& key(const ProblemFile::Section& s, const std::string& k) {
  auto it = s.keys.find(k);
  if (it == s.keys.end()) fail(ErrorKind::SyntaxError, "line " + std::to_string(s.line) + ": section " + s.name + " needs key '" + k + "'");
  return it->second.front();
}

inline std::optional<ProblemFile::Entry> optional_key(const ProblemFile::Section& s, const std::string& k) {
  auto it = s.keys.find(k);
  if (it == s.keys.end()) return std::nullopt;
  return it->second.front();
}

inline void allow_keys(const ProblemFile::Section& s, std::initializer_list<const char*> allowed) {
  for (const auto& k : s.key_order) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) {
      const auto& e = s.keys.at(k).front();
      syntax(e.line, 1, "unknown key '" + k + "' in " + s.kind + " section " + s.name);
    }
  }
}

/// A comma-separated value; the list form 'a; b' is also accepted for the same key.
inline std::vector<ProblemFile::Entry> list_of(const ProblemFile::Section& s, const std::string& k) {
  std::vector<ProblemFile::Entry> out;
  auto it = s.keys.find(k);
  if (it == s.keys.end()) return out;
  for (const auto& e : it->second) {
    std::size_t start = 0;
    while (start <= e.value.size()) {
      std::size_t c = e.value.find(',', start);
      if (c == std::string::npos) c = e.value.size();
      std::string item = trim(e.value.substr(start, c - start));
      if (!item.empty()) out.push_back({item, e.line, e.column + start});
      else if (c != e.value.size() || start != 0) syntax(e.line, e.column + start, "empty list item");
      start = c + 1;
    }
  }
  return out;
}

template <class M>
const typename M::mapped_type& lookup(const M& m, const ProblemFile::Entry& e, const std::string& what) {
  auto it = m.find(e.value);
  if (it == m.end())
    fail(ErrorKind::UnresolvedReference, "line " + std::to_string(e.line) + ": no " + what + " named '" + e.value + "' defined before this point");
  return it->second;
}

inline std::vector<std::string> header_after(const ProblemFile::Section& s, const std::string& word, std::size_t count) {
  for (std::size_t i = 0; i + count < s.header.size() + 1; ++i)
    if (s.header[i] == word) return std::vector<std::string>(s.header.begin() + i + 1, s.header.begin() + i + 1 + count);
  syntax(s.line, 1, s.kind + " header needs '" + word + "'");
}

}  // namespace detail

inline ProblemFile parse_problem(std::string_view text) {
  using detail::key;
  ProblemFile P;
  P.sections = detail::split_sections(text);
  std::map<std::string, std::size_t> seen;
  for (const auto& s : P.sections) {
    if (!seen.emplace(s.name, s.line).second)
      fail(ErrorKind::DuplicateName, "line " + std::to_string(s.line) + ": name '" + s.name + "' already defined on line " + std::to_string(seen[s.name]));
  }
  auto chart_named = [&](const std::string& name, std::size_t line) -> ChartRef {
    if (auto it = P.charts.find(name); it != P.charts.end()) return it->second;
    if (auto it = P.jets.find(name); it != P.jets.end()) return it->second.chart();
    fail(ErrorKind::UnresolvedReference, "line " + std::to_string(line) + ": no chart named '" + name + "' defined before this point");
  };
  auto expr_on = [](const ProblemFile::Entry& e, const Chart& c) { return detail::located(e, [&] { return parse_expr(e.value, c); }); };
  auto components = [&](const ProblemFile::Section& s, const Chart& target, const Chart& source) {
    EVector c;
    for (const auto& name : target.coordinates()) c.push_back(expr_on(key(s, name), source));
    return c;
  };

  for (const auto& s : P.sections) {
    if (s.kind == "chart") {
      detail::allow_keys(s, {"coords"});
      std::vector<std::string> names;
      for (const auto& e : detail::list_of(s, "coords")) names.push_back(e.value);
      if (!s.keys.count("coords")) key(s, "coords");
      P.charts[s.name] = make_chart(s.name, names);
    } else if (s.kind == "map") {
      // [map name : SRC -> TGT]
      if (s.header.size() != 4 || s.header[0] != ":" || s.header[2] != "->") detail::syntax(s.line, 1, "map header must read '[map name : SOURCE -> TARGET]'");
      ChartRef src = chart_named(s.header[1], s.line), tgt = chart_named(s.header[3], s.line);
      for (const auto& k : s.key_order)
        if (k != "inverse" && !tgt->index_of(k)) detail::syntax(s.keys.at(k).front().line, 1, "'" + k + "' is not a coordinate of " + tgt->name());
      EVector c = components(s, *tgt, *src);
      std::optional<EVector> inv;
      if (s.keys.count("inverse")) {
        inv.emplace();
        for (const auto& e : s.keys.at("inverse")) inv->push_back(expr_on(e, *tgt));
      }
      P.maps.emplace(s.name, SmoothMap(src, tgt, c, inv));
    } else if (s.kind == "distribution") {
      ChartRef c = chart_named(detail::header_after(s, "on", 1)[0], s.line);
      detail::allow_keys(s, {"forms", "fields"});
      if (s.keys.count("forms") == s.keys.count("fields")) detail::syntax(s.line, 1, "distribution needs exactly one of 'forms' and 'fields'");
      if (s.keys.count("forms")) {
        std::vector<KForm> forms;
        for (const auto& e : detail::list_of(s, "forms")) forms.push_back(detail::located(e, [&] { return parse_form(e.value, c); }));
        P.distributions.emplace(s.name, Distribution::from_annihilators(c, forms));
      } else {
        std::vector<VectorField> fields;
        for (const auto& e : detail::list_of(s, "fields")) fields.push_back(detail::located(e, [&] { return parse_field(e.value, c); }));
        P.distributions.emplace(s.name, Distribution::from_generators(c, fields));
      }
    } else if (s.kind == "fibration") {
      detail::allow_keys(s, {"total", "base", "projection", "distribution"});
      chart_named(key(s, "total").value, key(s, "total").line);
      chart_named(key(s, "base").value, key(s, "base").line);
      detail::lookup(P.maps, key(s, "projection"), "map");
      detail::lookup(P.distributions, key(s, "distribution"), "distribution");
      P.fibration_names.push_back(s.name);
    } else if (s.kind == "jet") {
      detail::allow_keys(s, {"map"});
      const ProblemFile::Entry& m = key(s, "map");
      P.jets.emplace(s.name, build_first_jet(detail::lookup(P.maps, m, "map")));
      P.fibration_names.push_back(s.name);
    } else if (s.kind == "pde") {
      detail::allow_keys(s, {"jet", "chart", "embedding", "equations"});
      const auto& J = detail::lookup(P.jets, key(s, "jet"), "jet");
      ChartRef E = chart_named(key(s, "chart").value, key(s, "chart").line);
      const auto& emb = detail::lookup(P.maps, key(s, "embedding"), "map");
      if (!same_chart(emb.source(), E) || !same_chart(emb.target(), J.chart()))
        fail(ErrorKind::InvalidInput, "line " + std::to_string(s.line) + ": embedding must map " + E->name() + " into the jet chart");
      for (const auto& e : detail::list_of(s, "equations")) expr_on(e, *J.chart());
      P.fibration_names.push_back(s.name);
    } else if (s.kind == "point") {
      ChartRef c = chart_named(detail::header_after(s, "on", 1)[0], s.line);
      for (const auto& k : s.key_order)
        if (!c->index_of(k)) detail::syntax(s.keys.at(k).front().line, 1, "'" + k + "' is not a coordinate of " + c->name());
      Point p{c, {}};
      for (const auto& name : c->coordinates()) {
        const auto& e = key(s, name);
        p.coords.push_back(detail::located(e, [&] { return parse_rational(e.value); }));
      }
      P.points.emplace(s.name, p);
    } else if (s.kind == "diffeo") {
      ChartRef c = chart_named(detail::header_after(s, "on", 1)[0], s.line);
      for (const auto& k : s.key_order)
        if (k != "inverse" && !c->index_of(k)) detail::syntax(s.keys.at(k).front().line, 1, "'" + k + "' is not a coordinate of " + c->name());
      EVector fwd = components(s, *c, *c), inv;
      if (!s.keys.count("inverse")) key(s, "inverse");
      for (const auto& e : s.keys.at("inverse")) inv.push_back(expr_on(e, *c));
      P.diffeos.emplace(s.name, make_local_diffeo(c, fwd, inv));
    } else if (s.kind == "jet-element") {
      detail::allow_keys(s, {"fibration", "diffeo", "point", "order", "perturb"});
      if (std::find(P.fibration_names.begin(), P.fibration_names.end(), key(s, "fibration").value) == P.fibration_names.end())
        fail(ErrorKind::UnresolvedReference, "line " + std::to_string(key(s, "fibration").line) + ": no fibration named '" + key(s, "fibration").value + "'");
      detail::lookup(P.diffeos, key(s, "diffeo"), "diffeo");
      detail::lookup(P.points, key(s, "point"), "point");
      P.jet_element_names.push_back(s.name);
    } else if (s.kind == "action") {
      detail::allow_keys(s, {"fibration", "groupoid", "base", "source", "target", "unit", "moment", "H", "action"});
      if (std::find(P.fibration_names.begin(), P.fibration_names.end(), key(s, "fibration").value) == P.fibration_names.end())
        fail(ErrorKind::UnresolvedReference, "line " + std::to_string(key(s, "fibration").line) + ": no fibration named '" + key(s, "fibration").value + "'");
      chart_named(key(s, "groupoid").value, key(s, "groupoid").line);
      chart_named(key(s, "base").value, key(s, "base").line);
      for (const char* k : {"source", "target", "unit", "moment"}) detail::lookup(P.maps, key(s, k), "map");
      detail::lookup(P.distributions, key(s, "H"), "distribution");
      key(s, "action");
      P.action_names.push_back(s.name);
    } else {
      detail::syntax(s.line, 2, "unknown section kind '" + s.kind + "'");
    }
  }
  return P;
}

// ---------------------------------------------------------------- building analysis objects

inline PfaffianFibration build_fibration(const ProblemFile& P, const std::string& name, const SamplePolicy& pol = {}) {
  const auto& s = P.section(name);
  using detail::key;
  if (s.kind == "fibration") {
    ChartRef total = P.charts.count(key(s, "total").value) ? P.charts.at(key(s, "total").value) : P.jets.at(key(s, "total").value).chart();
    ChartRef base = P.charts.count(key(s, "base").value) ? P.charts.at(key(s, "base").value) : P.jets.at(key(s, "base").value).chart();
    const auto& pi = P.maps.at(key(s, "projection").value);
    const auto& C = P.distributions.at(key(s, "distribution").value);
    if (!same_chart(pi.source(), total) || !same_chart(pi.target(), base))
      fail(ErrorKind::InvalidInput, "projection of " + name + " must map " + total->name() + " to " + base->name());
    if (!same_chart(C.chart(), total)) fail(ErrorKind::InvalidInput, "distribution of " + name + " must live on " + total->name());
    return validate_fibration(total, base, pi, C, pol);
  }
  if (s.kind == "jet") return P.jets.at(name).fibration;
  if (s.kind == "pde") {
    const auto& J = P.jets.at(key(s, "jet").value);
    ChartRef E = P.charts.count(key(s, "chart").value) ? P.charts.at(key(s, "chart").value) : P.jets.at(key(s, "chart").value).chart();
    std::vector<Expr> eqs;
    for (const auto& e : detail::list_of(s, "equations")) eqs.push_back(parse_expr(e.value, *J.chart()));
    return restrict_to_pde(J, {E, P.maps.at(key(s, "embedding").value), eqs}, pol);
  }
  fail(ErrorKind::UnresolvedReference, name + " is not a fibration");
}

inline JetElement build_jet_element(const ProblemFile& P, const std::string& name) {
  const auto& s = P.section(name);
  if (s.kind != "jet-element") fail(ErrorKind::UnresolvedReference, name + " is not a jet-element section");
  using detail::key;
  const auto& phi = P.diffeos.at(key(s, "diffeo").value);
  const auto& pt = P.points.at(key(s, "point").value);
  unsigned order = 2;
  if (auto o = detail::optional_key(s, "order")) {
    if (o->value != "1" && o->value != "2") detail::syntax(o->line, o->column, "order must be 1 or 2");
    order = o->value == "1" ? 1 : 2;
  }
  if (!same_chart(pt.chart, phi.chart())) fail(ErrorKind::InvalidInput, "point and diffeo of " + name + " live on different charts");
  JetElement j = jet_of(phi, pt, order);
  // perturb = component, k, l, amount (1-based): adds amount to both d^2 phi_c / dx_k dx_l and its mirror.
  if (auto pe = detail::optional_key(s, "perturb")) {
    auto items = detail::list_of(s, "perturb");
    if (order != 2 || items.size() != 4) detail::syntax(pe->line, pe->column, "perturb needs order 2 and 'component, k, l, amount'");
    std::size_t idx[3];
    for (int t = 0; t < 3; ++t) {
      long v = std::stol(items[t].value);
      if (v < 1 || static_cast<std::size_t>(v) > j.first.rows()) detail::syntax(items[t].line, items[t].column, "index out of range");
      idx[t] = static_cast<std::size_t>(v - 1);
    }
    Rational a = parse_rational(items[3].value);
    j.second[idx[0]](idx[1], idx[2]) += a;
    if (idx[1] != idx[2]) j.second[idx[0]](idx[2], idx[1]) += a;
  }
  return j;
}

inline ActionSpec build_action(const ProblemFile& P, const std::string& name, const PfaffianFibration& F) {
  const auto& s = P.section(name);
  if (s.kind != "action") fail(ErrorKind::UnresolvedReference, name + " is not an action section");
  using detail::key;
  ActionSpec S;
  S.groupoid = P.charts.at(key(s, "groupoid").value);
  S.base = P.charts.at(key(s, "base").value);
  S.source = P.maps.at(key(s, "source").value);
  S.target = P.maps.at(key(s, "target").value);
  S.unit = P.maps.at(key(s, "unit").value);
  S.moment = P.maps.at(key(s, "moment").value);
  S.H = P.distributions.at(key(s, "H").value);
  auto check = [&](const SmoothMap& m, const ChartRef& a, const ChartRef& b, const char* what) {
    if (!same_chart(m.source(), a) || !same_chart(m.target(), b)) fail(ErrorKind::SpecInvalid, std::string(what) + " map of " + name + " has the wrong charts");
  };
  check(S.source, S.groupoid, S.base, "source");
  check(S.target, S.groupoid, S.base, "target");
  check(S.unit, S.base, S.groupoid, "unit");
  check(S.moment, F.total(), S.base, "moment");
  if (!same_chart(S.H.chart(), S.groupoid)) fail(ErrorKind::SpecInvalid, "H of " + name + " must live on the groupoid chart");
  S.pairs = product_chart(S.groupoid, F.total());
  const auto& items = s.keys.at("action");
  if (items.size() != F.N()) fail(ErrorKind::SpecInvalid, "action of " + name + " needs one component per coordinate of " + F.total()->name());
  for (const auto& e : items) S.action.push_back(detail::located(e, [&] { return parse_expr(e.value, *S.pairs); }));
  return S;
}

}  // namespace pfaff
