#pragma once

// Sparse multivariate polynomials over Q with a multivariate gcd.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <limits>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace pfaff {

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

class Monomial {
 public:
  using Factor = std::pair<std::uint32_t, std::uint32_t>;  // (variable, exponent > 0)

  Monomial() = default;

  static Monomial variable(std::uint32_t v, std::uint32_t e = 1) {
    Monomial m;
    if (e > 0) {
      m.f_.emplace_back(v, e);
      m.degree_ = e;
    }
    return m;
  }

  std::uint32_t degree() const { return degree_; }
  bool is_one() const { return f_.empty(); }
  const std::vector<Factor>& factors() const { return f_; }

  std::uint32_t exponent(std::uint32_t v) const {
    for (const auto& [var, e] : f_)
      if (var == v) return e;
    return 0;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.f_.reserve(a.f_.size() + b.f_.size());
    std::size_t i = 0, j = 0;
    while (i < a.f_.size() || j < b.f_.size()) {
      if (j == b.f_.size() || (i < a.f_.size() && a.f_[i].first < b.f_[j].first)) {
        r.f_.push_back(a.f_[i++]);
      } else if (i == a.f_.size() || b.f_[j].first < a.f_[i].first) {
        r.f_.push_back(b.f_[j++]);
      } else {
        r.f_.emplace_back(a.f_[i].first, a.f_[i].second + b.f_[j].second);
        ++i;
        ++j;
      }
    }
    r.degree_ = a.degree_ + b.degree_;
    return r;
  }

  bool divides(const Monomial& other) const {
    if (degree_ > other.degree_) return false;
    std::size_t j = 0;
    for (const auto& [v, e] : f_) {
      while (j < other.f_.size() && other.f_[j].first < v) ++j;
      if (j == other.f_.size() || other.f_[j].first != v || other.f_[j].second < e) return false;
    }
    return true;
  }

  /// this / d; requires d.divides(*this).
  Monomial quotient(const Monomial& d) const {
    Monomial r;
    std::size_t j = 0;
    for (const auto& [v, e] : f_) {
      std::uint32_t sub = 0;
      if (j < d.f_.size() && d.f_[j].first == v) sub = d.f_[j++].second;
      if (e > sub) r.f_.emplace_back(v, e - sub);
    }
    r.degree_ = degree_ - d.degree_;
    return r;
  }

  static Monomial gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t j = 0;
    for (const auto& [v, e] : a.f_) {
      while (j < b.f_.size() && b.f_[j].first < v) ++j;
      if (j < b.f_.size() && b.f_[j].first == v) {
        std::uint32_t m = std::min(e, b.f_[j].second);
        r.f_.emplace_back(v, m);
        r.degree_ += m;
      }
    }
    return r;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }

  /// Graded lexicographic order with variable 0 the most significant.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
    std::size_t n = std::min(a.f_.size(), b.f_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.f_[i].first != b.f_[i].first)
        return a.f_[i].first < b.f_[i].first ? std::strong_ordering::greater
                                             : std::strong_ordering::less;
      if (a.f_[i].second != b.f_[i].second) return a.f_[i].second <=> b.f_[i].second;
    }
    return a.f_.size() <=> b.f_.size();
  }

 private:
  std::vector<Factor> f_;
  std::uint32_t degree_ = 0;
};

class Poly {
 public:
  struct Term {
    Monomial mono;
    Rational coeff;
  };

  Poly() = default;
  Poly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (sgn(c) != 0) t_.push_back({Monomial(), c});
  }
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static Poly variable(std::uint32_t v) {
    Poly p;
    p.t_.push_back({Monomial::variable(v), Rational(1)});
    return p;
  }
  static Poly term(const Monomial& m, const Rational& c) {
    Poly p;
    if (sgn(c) != 0) p.t_.push_back({m, c});
    return p;
  }

  /// Terms in descending graded-lex order, all coefficients nonzero.
  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].mono.is_one()); }
  Rational constant_value() const { return t_.empty() || !t_.back().mono.is_one() ? Rational(0) : t_.back().coeff; }
  const Term& leading() const { return t_.front(); }
  std::size_t size() const { return t_.size(); }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& t : t_) d = std::max(d, t.mono.degree());
    return d;
  }
  std::uint32_t degree_in(std::uint32_t v) const {
    std::uint32_t d = 0;
    for (const auto& t : t_) d = std::max(d, t.mono.exponent(v));
    return d;
  }
  std::vector<std::uint32_t> variables() const {
    std::vector<std::uint32_t> vs;
    for (const auto& t : t_)
      for (const auto& f : t.mono.factors()) vs.push_back(f.first);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (std::size_t i = 0; i < a.t_.size(); ++i)
      if (!(a.t_[i].mono == b.t_[i].mono) || a.t_[i].coeff != b.t_[i].coeff) return false;
    return true;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.t_) t.coeff = -t.coeff;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
  friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.t_.size() == 1 && a.t_[0].mono.is_one()) return b.scaled(a.t_[0].coeff);
    if (b.t_.size() == 1 && b.t_[0].mono.is_one()) return a.scaled(b.t_[0].coeff);
    std::vector<Term> all;
    all.reserve(a.t_.size() * b.t_.size());
    for (const auto& x : a.t_)
      for (const auto& y : b.t_) all.push_back({x.mono * y.mono, x.coeff * y.coeff});
    std::sort(all.begin(), all.end(), [](const Term& l, const Term& r) { return l.mono > r.mono; });
    Poly r;
    for (auto& t : all) {
      if (!r.t_.empty() && r.t_.back().mono == t.mono) {
        r.t_.back().coeff += t.coeff;
      } else {
        if (!r.t_.empty() && sgn(r.t_.back().coeff) == 0) r.t_.pop_back();
        r.t_.push_back(std::move(t));
      }
    }
    if (!r.t_.empty() && sgn(r.t_.back().coeff) == 0) r.t_.pop_back();
    return r;
  }

  Poly scaled(const Rational& c) const {
    if (sgn(c) == 0) return {};
    Poly r = *this;
    for (auto& t : r.t_) t.coeff *= c;
    return r;
  }

  Poly times_monomial(const Monomial& m) const {
    Poly r = *this;
    for (auto& t : r.t_) t.mono = t.mono * m;
    return r;
  }

  Poly pow(unsigned e) const {
    Poly result(1), base = *this;
    while (e) {
      if (e & 1u) result = result * base;
      e >>= 1u;
      if (e) base = base * base;
    }
    return result;
  }

  Poly derivative(std::uint32_t v) const {
    std::vector<Term> out;
    for (const auto& t : t_) {
      std::uint32_t e = t.mono.exponent(v);
      if (e == 0) continue;
      out.push_back({t.mono.quotient(Monomial::variable(v)), t.coeff * e});
    }
    std::sort(out.begin(), out.end(), [](const Term& l, const Term& r) { return l.mono > r.mono; });
    Poly r;
    r.t_ = std::move(out);
    return r;
  }

  Rational evaluate(std::span<const Rational> x) const {
    Rational s(0);
    for (const auto& t : t_) {
      Rational m = t.coeff;
      for (const auto& [v, e] : t.mono.factors()) {
        if (v >= x.size()) fail(ErrorKind::DimensionMismatch, "point has too few coordinates");
        Rational p;
        mpz_pow_ui(p.get_num_mpz_t(), x[v].get_num_mpz_t(), e);
        mpz_pow_ui(p.get_den_mpz_t(), x[v].get_den_mpz_t(), e);
        m *= p;
      }
      s += m;
    }
    return s;
  }

 private:
  static Poly merge(const Poly& a, const Poly& b, bool subtract) {
    Poly r;
    r.t_.reserve(a.t_.size() + b.t_.size());
    std::size_t i = 0, j = 0;
    while (i < a.t_.size() || j < b.t_.size()) {
      if (j == b.t_.size() || (i < a.t_.size() && a.t_[i].mono > b.t_[j].mono)) {
        r.t_.push_back(a.t_[i++]);
      } else if (i == a.t_.size() || b.t_[j].mono > a.t_[i].mono) {
        r.t_.push_back(b.t_[j++]);
        if (subtract) r.t_.back().coeff = -r.t_.back().coeff;
      } else {
        Rational c = subtract ? Rational(a.t_[i].coeff - b.t_[j].coeff) : Rational(a.t_[i].coeff + b.t_[j].coeff);
        if (sgn(c) != 0) r.t_.push_back({a.t_[i].mono, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  std::vector<Term> t_;
};

namespace detail {

/// Exact quotient a / b; raises Internal when b does not divide a.
inline Poly exact_divide(const Poly& a, const Poly& b) {
  if (b.is_zero()) fail(ErrorKind::ZeroDenominator, "division by zero polynomial");
  if (b.is_constant()) return a.scaled(1 / b.leading().coeff);
  Poly q, r = a;
  const auto& lb = b.leading();
  while (!r.is_zero()) {
    const auto& lr = r.leading();
    if (!lb.mono.divides(lr.mono)) fail(ErrorKind::Internal, "inexact polynomial division");
    Poly t = Poly::term(lr.mono.quotient(lb.mono), lr.coeff / lb.coeff);
    q = q + t;
    r = r - t * b;
  }
  return q;
}

/// Scales p to integer coefficients with unit content and positive leading coefficient.
inline Poly primitive_integer(const Poly& p) {
  if (p.is_zero()) return p;
  Integer l(1), g(0);
  for (const auto& t : p.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  for (const auto& t : p.terms()) {
    Integer v = t.coeff.get_num() * (l / t.coeff.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  Rational s(l, g);
  s.canonicalize();
  if (sgn(p.leading().coeff) < 0) s = -s;
  return p.scaled(s);
}

inline std::vector<Poly> coefficients_in(const Poly& p, std::uint32_t v) {
  std::vector<Poly> c(p.degree_in(v) + 1);
  for (const auto& t : p.terms()) {
    std::uint32_t e = t.mono.exponent(v);
    c[e] = c[e] + Poly::term(t.mono.quotient(Monomial::variable(v, e)), t.coeff);
  }
  return c;
}

inline Poly from_coefficients(const std::vector<Poly>& c, std::uint32_t v) {
  Poly r;
  for (std::size_t e = 0; e < c.size(); ++e)
    if (!c[e].is_zero()) r = r + c[e].times_monomial(Monomial::variable(v, static_cast<std::uint32_t>(e)));
  return r;
}

inline std::size_t degree_of(const std::vector<Poly>& c) {
  std::size_t d = c.size();
  while (d > 0 && c[d - 1].is_zero()) --d;
  return d == 0 ? 0 : d - 1;
}

Poly gcd(const Poly& a, const Poly& b);

inline Poly content_in(const Poly& p, std::uint32_t v) {
  Poly g;
  for (const auto& c : coefficients_in(p, v)) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? primitive_integer(c) : gcd(g, c);
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

/// Pseudo-remainder of a by b as polynomials in v: lc(b)^(deg a - deg b + 1) a mod b.
inline Poly pseudo_remainder(const Poly& a, const Poly& b, std::uint32_t v) {
  auto r = coefficients_in(a, v);
  auto bc = coefficients_in(b, v);
  std::size_t db = degree_of(bc);
  const Poly& lb = bc[db];
  std::size_t da = degree_of(r);
  std::size_t steps = da >= db ? da - db + 1 : 0;
  r.resize(da + 1);
  while (true) {
    std::size_t dr = degree_of(r);
    bool zero = std::all_of(r.begin(), r.end(), [](const Poly& c) { return c.is_zero(); });
    if (zero || dr < db) break;
    Poly lr = r[dr];
    std::size_t shift = dr - db;
    for (auto& c : r) c = c * lb;
    for (std::size_t k = 0; k <= db; ++k) r[k + shift] = r[k + shift] - lr * bc[k];
    r.resize(dr);
    --steps;
  }
  Poly out = from_coefficients(r, v);
  for (; steps > 0 && !out.is_zero(); --steps) out = out * lb;
  return out;
}

inline Poly power(const Poly& p, std::size_t e) {
  Poly r(1);
  for (std::size_t k = 0; k < e; ++k) r = r * p;
  return r;
}

using UPoly = std::vector<Rational>;  // dense univariate, index = degree

inline void trim(UPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

/// Image of p under x_w -> small integers for every w != v, as a polynomial in x_v.
inline UPoly specialize(const Poly& p, std::uint32_t v, unsigned attempt) {
  UPoly u(p.degree_in(v) + 1);
  for (const auto& t : p.terms()) {
    Rational c = t.coeff;
    std::uint32_t ev = 0;
    for (const auto& [w, e] : t.mono.factors()) {
      if (w == v) {
        ev = e;
        continue;
      }
      Integer val = 2 + (static_cast<unsigned long>(w) * 7919u + attempt * 104729u) % 89u;
      Integer pw;
      mpz_pow_ui(pw.get_mpz_t(), val.get_mpz_t(), e);
      c *= pw;
    }
    u[ev] += c;
  }
  trim(u);
  return u;
}

inline std::size_t univariate_gcd_degree(UPoly a, UPoly b) {
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    while (a.size() >= b.size() && !a.empty()) {
      Rational f = a.back() / b.back();
      std::size_t shift = a.size() - b.size();
      for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] -= f * b[k];
      a.pop_back();
      trim(a);
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

/// Upper bound for deg_v gcd(a, b). A returned 0 is exact: the leading coefficient of a in v
/// survives the specialization, so the specialized gcd cannot lose degree.
inline std::size_t gcd_degree_bound(const Poly& a, const Poly& b, std::uint32_t v) {
  std::size_t da = a.degree_in(v);
  for (unsigned attempt = 0; attempt < 6; ++attempt) {
    UPoly ua = specialize(a, v, attempt);
    if (ua.size() != da + 1) continue;
    return univariate_gcd_degree(ua, specialize(b, v, attempt));
  }
  return std::min<std::size_t>(da, b.degree_in(v));
}

inline Poly gcd(const Poly& a0, const Poly& b0) {
  if (a0.is_zero()) return primitive_integer(b0);
  if (b0.is_zero()) return primitive_integer(a0);
  Poly a = primitive_integer(a0), b = primitive_integer(b0);
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a == b) return a;
  if (a.size() == 1 || b.size() == 1) {
    Monomial m = a.leading().mono;
    for (const auto& t : a.terms()) m = Monomial::gcd(m, t.mono);
    for (const auto& t : b.terms()) m = Monomial::gcd(m, t.mono);
    return Poly::term(m, Rational(1));
  }
  auto va = a.variables(), vb = b.variables();
  std::vector<std::uint32_t> common;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
  if (common.empty()) return Poly(1);
  std::uint32_t v = common.front();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> bounds;
  for (auto w : common) bounds.push_back(gcd_degree_bound(a, b, w));
  // Every factor of the gcd involves only common variables; free of all of them means constant.
  if (std::all_of(bounds.begin(), bounds.end(), [](std::size_t d) { return d == 0; })) return Poly(1);
  for (std::size_t k = 0; k < common.size(); ++k) {
    const std::uint32_t w = common[k];
    const std::size_t bound = bounds[k];
    if (bound == 0) {
      // The gcd is free of w, so it divides every coefficient of a and b in w.
      auto cs = coefficients_in(a, w);
      auto cb = coefficients_in(b, w);
      cs.insert(cs.end(), cb.begin(), cb.end());
      std::erase_if(cs, [](const Poly& c) { return c.is_zero(); });
      std::sort(cs.begin(), cs.end(), [](const Poly& l, const Poly& r) { return l.size() < r.size(); });
      Poly g = cs.front();
      for (std::size_t k = 1; k < cs.size() && !g.is_constant(); ++k) g = gcd(g, cs[k]);
      return primitive_integer(g);
    }
    // The remainder sequence costs grow with the input degrees in v, not with the gcd degree.
    std::size_t cost = a.degree_in(w) + b.degree_in(w);
    if (cost < best) {
      best = cost;
      v = w;
    }
  }
  Poly ca = content_in(a, v), cb = content_in(b, v);
  Poly c = gcd(ca, cb);
  Poly pa = exact_divide(a, ca), pb = exact_divide(b, cb);
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  // Subresultant remainder sequence: the divisions by g h^delta are exact and keep coefficients small.
  Poly g(1), h(1);
  while (true) {
    std::size_t delta = pa.degree_in(v) - pb.degree_in(v);
    Poly r = pseudo_remainder(pa, pb, v);
    if (r.is_zero()) break;
    if (r.degree_in(v) == 0) {
      pb = Poly(1);
      break;
    }
    pa = pb;
    pb = exact_divide(r, g * power(h, delta));
    g = coefficients_in(pa, v).back();
    h = delta == 0 ? h : exact_divide(power(g, delta), power(h, delta - 1));
  }
  if (pb.degree_in(v) > 0) pb = exact_divide(pb, content_in(pb, v));
  else pb = Poly(1);
  return primitive_integer(pb * c);
}

}  // namespace detail

using detail::gcd;

}  // namespace pfaff
