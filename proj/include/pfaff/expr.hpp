#pragma once

// Charts, exact rational-function expressions, parsing and printing.

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "poly.hpp"

namespace pfaff {

/// An ordered list of named coordinates on an open subset of Q^n.
class Chart {
 public:
  Chart() = default;
  Chart(std::string name, std::vector<std::string> coords) : name_(std::move(name)), coords_(std::move(coords)) {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!valid_identifier(coords_[i]))
        fail(ErrorKind::InvalidChart, "invalid coordinate name '" + coords_[i] + "' in chart " + name_);
      if (!index_.emplace(coords_[i], i).second)
        fail(ErrorKind::InvalidChart, "duplicate coordinate '" + coords_[i] + "' in chart " + name_);
    }
  }

  const std::string& name() const { return name_; }
  std::size_t dim() const { return coords_.size(); }
  const std::vector<std::string>& coordinates() const { return coords_; }
  const std::string& coordinate(std::size_t i) const { return coords_.at(i); }

  std::optional<std::size_t> index_of(std::string_view c) const {
    auto it = index_.find(std::string(c));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Chart& a, const Chart& b) { return a.coords_ == b.coords_; }

  static bool valid_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
  }

 private:
  std::string name_;
  std::vector<std::string> coords_;
  std::unordered_map<std::string, std::size_t> index_;
};

using ChartRef = std::shared_ptr<const Chart>;

inline ChartRef make_chart(std::string name, std::vector<std::string> coords) {
  return std::make_shared<const Chart>(std::move(name), std::move(coords));
}

inline bool same_chart(const ChartRef& a, const ChartRef& b) { return a == b || (a && b && *a == *b); }

/// A point of a chart with exact rational coordinates.
struct Point {
  ChartRef chart;
  std::vector<Rational> coords;
};

/// A rational function p/q in canonical form: gcd(p, q) = 1 and q has leading coefficient 1.
class Expr {
 public:
  Expr() : den_(1) {}
  Expr(const Rational& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  Expr(long c) : num_(c), den_(1) {}             // NOLINT(google-explicit-constructor)
  Expr(const Poly& p) : num_(p), den_(1) {}      // NOLINT(google-explicit-constructor)

  static Expr variable(std::size_t i) { return Expr(Poly::variable(static_cast<std::uint32_t>(i))); }

  static Expr fraction(const Poly& p, const Poly& q) {
    if (q.is_zero()) fail(ErrorKind::ZeroDenominator, "division by zero");
    Expr e;
    e.num_ = p;
    e.den_ = q;
    e.canonicalize(true);
    return e;
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value(); }
  bool is_one() const { return is_constant() && num_.constant_value() == 1; }

  /// Complexity used for pivot selection: constants first, then by degree and size.
  std::size_t weight() const {
    if (is_zero()) return 0;
    if (is_constant()) return 1;
    return 2 + 16 * (num_.total_degree() + den_.total_degree()) + num_.size() + den_.size();
  }

  friend bool operator==(const Expr& a, const Expr& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  Expr operator-() const {
    Expr r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend Expr operator+(const Expr& a, const Expr& b) { return add(a, b, false); }
  friend Expr operator-(const Expr& a, const Expr& b) { return add(a, b, true); }

  friend Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_polynomial() && b.is_polynomial()) return Expr(a.num_ * b.num_);
    Poly g1 = detail::gcd(a.num_, b.den_), g2 = detail::gcd(b.num_, a.den_);
    Expr r;
    r.num_ = detail::exact_divide(a.num_, g1) * detail::exact_divide(b.num_, g2);
    r.den_ = detail::exact_divide(a.den_, g2) * detail::exact_divide(b.den_, g1);
    r.canonicalize(false);
    return r;
  }

  friend Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) fail(ErrorKind::ZeroDenominator, "division by zero");
    Expr inv;
    inv.num_ = b.den_;
    inv.den_ = b.num_;
    inv.canonicalize(false);
    return a * inv;
  }

  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr& operator/=(const Expr& o) { return *this = *this / o; }

  Expr pow(long e) const {
    if (e < 0) return Expr(1) / pow(-e);
    Expr r;
    r.num_ = num_.pow(static_cast<unsigned>(e));
    r.den_ = den_.pow(static_cast<unsigned>(e));
    return r;
  }

 private:
  static Expr add(const Expr& a, const Expr& b, bool subtract) {
    if (a.den_ == b.den_) {
      Expr r;
      r.num_ = subtract ? a.num_ - b.num_ : a.num_ + b.num_;
      r.den_ = a.den_;
      r.canonicalize(!a.is_polynomial());
      return r;
    }
    Poly g = detail::gcd(a.den_, b.den_);
    Poly ca = detail::exact_divide(b.den_, g), cb = detail::exact_divide(a.den_, g);
    Expr r;
    r.num_ = subtract ? a.num_ * ca - b.num_ * cb : a.num_ * ca + b.num_ * cb;
    r.den_ = a.den_ * ca;
    r.canonicalize(true);
    return r;
  }

  void canonicalize(bool reduce) {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    if (reduce && !den_.is_constant()) {
      Poly g = detail::gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = detail::exact_divide(num_, g);
        den_ = detail::exact_divide(den_, g);
      }
    }
    const Rational& lc = den_.leading().coeff;
    if (lc != 1) {
      Rational s = 1 / lc;
      num_ = num_.scaled(s);
      den_ = den_.scaled(s);
    }
  }

  Poly num_, den_;
};

inline Expr differentiate(const Expr& e, std::size_t var) {
  auto v = static_cast<std::uint32_t>(var);
  if (e.is_polynomial()) return Expr(e.num().derivative(v)) / Expr(e.den());
  Poly n = e.num().derivative(v) * e.den() - e.num() * e.den().derivative(v);
  return Expr::fraction(n, e.den() * e.den());
}

inline Rational evaluate(const Expr& e, std::span<const Rational> x) {
  Rational d = e.den().evaluate(x);
  if (sgn(d) == 0) fail(ErrorKind::PoleAtPoint, "denominator vanishes at point");
  Rational r = e.num().evaluate(x) / d;
  return r;
}

inline Rational evaluate(const Expr& e, const Point& p) { return evaluate(e, std::span<const Rational>(p.coords)); }

/// Replaces variable i by images[i].
inline Expr substitute(const Expr& e, std::span<const Expr> images) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, Expr> cache;
  auto power = [&](std::uint32_t v, std::uint32_t k) -> const Expr& {
    auto key = std::make_pair(v, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (v >= images.size()) fail(ErrorKind::DimensionMismatch, "substitution has too few images");
    return cache.emplace(key, images[v].pow(k)).first->second;
  };
  auto sub_poly = [&](const Poly& p) {
    Expr s;
    for (const auto& t : p.terms()) {
      Expr m(t.coeff);
      for (const auto& [v, k] : t.mono.factors()) m = m * power(v, k);
      s = s + m;
    }
    return s;
  };
  if (e.is_polynomial()) return sub_poly(e.num());
  return sub_poly(e.num()) / sub_poly(e.den());
}

// ---------------------------------------------------------------- printing

namespace detail {

inline std::string monomial_string(const Monomial& m, const Chart& c) {
  std::string s;
  for (const auto& [v, e] : m.factors()) {
    if (!s.empty()) s += '*';
    s += v < c.dim() ? c.coordinate(v) : "_" + std::to_string(v);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

inline std::string poly_string(const Poly& p, const Chart& c) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : p.terms()) {
    bool neg = sgn(t.coeff) < 0;
    Rational a = abs(t.coeff);
    std::string mono = monomial_string(t.mono, c);
    std::string body;
    if (mono.empty()) body = a.get_str();
    else if (a == 1) body = mono;
    else body = a.get_str() + "*" + mono;
    if (first) {
      if (neg) {
        // "-x^2" would parse as (-x)^2, so a unit coefficient is spelled out there.
        bool needs_one = a == 1 && !t.mono.is_one() && t.mono.factors().front().second > 1;
        s += needs_one ? "-1*" + mono : "-" + body;
      } else {
        s += body;
      }
    } else {
      s += neg ? " - " : " + ";
      s += body;
    }
    first = false;
  }
  return s;
}

inline bool needs_parens(const Poly& p) {
  if (p.size() > 1) return true;
  if (p.size() == 1) {
    const auto& t = p.leading();
    if (sgn(t.coeff) < 0) return true;
    if (!t.mono.is_one() && (t.coeff != 1 || t.mono.factors().size() > 1)) return true;
    if (t.mono.is_one() && t.coeff.get_den() != 1) return true;
  }
  return false;
}

}  // namespace detail

inline std::string to_string(const Expr& e, const Chart& c) {
  if (e.is_polynomial()) return detail::poly_string(e.num(), c);
  std::string n = detail::poly_string(e.num(), c), d = detail::poly_string(e.den(), c);
  if (detail::needs_parens(e.num())) n = "(" + n + ")";
  if (detail::needs_parens(e.den())) d = "(" + d + ")";
  return n + "/" + d;
}

// ---------------------------------------------------------------- parsing

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view src, const Chart& chart) : s_(src), chart_(chart) {}

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::SyntaxError, msg + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    while (true) {
      if (eat('+')) e = e + term();
      else if (eat('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = factor();
    while (true) {
      if (eat('*')) {
        e = e * factor();
      } else if (eat('/')) {
        std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) {
          pos_ = at;
          fail(ErrorKind::ZeroDenominator, "division by zero at position " + std::to_string(at));
        }
        e = e / d;
      } else {
        return e;
      }
    }
  }
  Expr factor() {
    Expr b = base();
    if (eat('^')) {
      skip();
      bool neg = false;
      if (pos_ < s_.size() && s_[pos_] == '-') {
        neg = true;
        ++pos_;
      }
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected integer exponent");
      long k = std::stol(std::string(s_.substr(start, pos_ - start)));
      if (neg && b.is_zero()) fail(ErrorKind::ZeroDenominator, "negative power of zero");
      b = b.pow(neg ? -k : k);
    }
    return b;
  }
  Expr base() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Expr(Rational(Integer(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string_view id = s_.substr(start, pos_ - start);
      auto idx = chart_.index_of(id);
      if (!idx) fail(ErrorKind::UnknownCoordinate, "unknown coordinate '" + std::string(id) + "' in chart " + chart_.name());
      return Expr::variable(*idx);
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  const Chart& chart_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view src, const Chart& chart) {
  return detail::ExprParser(src, chart).parse_all();
}

/// Parses a rational literal such as "3", "-2/5".
inline Rational parse_rational(std::string_view src) {
  static const Chart empty;
  Expr e = parse_expr(src, empty);
  return e.constant_value();
}

/// Coordinate indices occurring in e.
inline std::vector<std::size_t> variables_of(const Expr& e) {
  auto a = e.num().variables(), b = e.den().variables();
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace pfaff
