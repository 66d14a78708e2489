#pragma once

// Vector fields, differential forms, smooth maps and distributions on a single chart.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exactla.hpp"

namespace pfaff {

class VectorField {
 public:
  VectorField() = default;
  VectorField(ChartRef chart, EVector comps) : chart_(std::move(chart)), c_(std::move(comps)) {
    if (c_.size() != chart_->dim()) fail(ErrorKind::DimensionMismatch, "vector field has wrong number of components");
  }
  static VectorField zero(ChartRef chart) {
    std::size_t n = chart->dim();
    return VectorField(std::move(chart), EVector(n));
  }
  /// The coordinate field d/dx_i.
  static VectorField coordinate(ChartRef chart, std::size_t i) {
    VectorField v = zero(std::move(chart));
    v.c_.at(i) = Expr(1L);
    return v;
  }

  const ChartRef& chart() const { return chart_; }
  const EVector& components() const { return c_; }
  const Expr& operator[](std::size_t i) const { return c_.at(i); }
  std::size_t dim() const { return c_.size(); }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Expr& e) { return e.is_zero(); });
  }

  /// X(f)
  Expr apply(const Expr& f) const {
    Expr s;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) s += c_[i] * differentiate(f, i);
    return s;
  }

  QVector at(const Point& p) const { return evaluate(c_, p.coords); }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    VectorField r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_.at(i);
    return r;
  }
  friend VectorField operator-(const VectorField& a, const VectorField& b) {
    VectorField r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_.at(i);
    return r;
  }
  friend VectorField operator*(const Expr& f, const VectorField& a) {
    VectorField r = a;
    for (auto& c : r.c_) c *= f;
    return r;
  }
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.c_ == b.c_; }

 private:
  ChartRef chart_;
  EVector c_;
};

/// [X, Y]^k = X(Y^k) - Y(X^k)
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  if (X.dim() != Y.dim()) fail(ErrorKind::DimensionMismatch, "bracket of fields on different charts");
  EVector c(X.dim());
  for (std::size_t k = 0; k < X.dim(); ++k) c[k] = X.apply(Y[k]) - Y.apply(X[k]);
  return VectorField(X.chart(), std::move(c));
}

using IndexTuple = std::vector<std::uint32_t>;

namespace detail {

/// Sorted union of disjoint tuples with the sign of the merging permutation; 0 when they intersect.
inline int merge_sign(const IndexTuple& a, const IndexTuple& b, IndexTuple& out) {
  out.clear();
  int inversions = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      inversions += static_cast<int>(a.size() - i);
      out.push_back(b[j++]);
    } else {
      return 0;
    }
  }
  return inversions % 2 ? -1 : 1;
}

}  // namespace detail

class KForm {
 public:
  KForm() = default;
  KForm(ChartRef chart, unsigned degree) : chart_(std::move(chart)), degree_(degree) {}

  static KForm function(ChartRef chart, const Expr& f) {
    KForm w(std::move(chart), 0);
    w.add({}, f);
    return w;
  }
  static KForm differential(ChartRef chart, std::size_t i) {
    KForm w(std::move(chart), 1);
    w.add({static_cast<std::uint32_t>(i)}, Expr(1L));
    return w;
  }
  static KForm one_form(ChartRef chart, const EVector& coeffs) {
    if (coeffs.size() != chart->dim()) fail(ErrorKind::DimensionMismatch, "1-form has wrong number of coefficients");
    KForm w(std::move(chart), 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i) w.add({static_cast<std::uint32_t>(i)}, coeffs[i]);
    return w;
  }

  const ChartRef& chart() const { return chart_; }
  unsigned degree() const { return degree_; }
  const std::map<IndexTuple, Expr>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  Expr coefficient(const IndexTuple& I) const {
    auto it = t_.find(I);
    return it == t_.end() ? Expr() : it->second;
  }
  /// Coefficients of a 1-form as a row vector.
  EVector coefficients() const {
    if (degree_ != 1) fail(ErrorKind::DimensionMismatch, "coefficients() needs a 1-form");
    EVector v(chart_->dim());
    for (const auto& [I, c] : t_) v[I[0]] = c;
    return v;
  }

  /// Adds c dx_I; I must be strictly increasing.
  void add(const IndexTuple& I, const Expr& c) {
    if (I.size() != degree_) fail(ErrorKind::DimensionMismatch, "index tuple has wrong length");
    if (c.is_zero()) return;
    auto [it, fresh] = t_.emplace(I, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  friend KForm operator+(const KForm& a, const KForm& b) {
    check(a, b);
    KForm r = a;
    for (const auto& [I, c] : b.t_) r.add(I, c);
    return r;
  }
  friend KForm operator-(const KForm& a, const KForm& b) {
    check(a, b);
    KForm r = a;
    for (const auto& [I, c] : b.t_) r.add(I, -c);
    return r;
  }
  friend KForm operator*(const Expr& f, const KForm& a) {
    KForm r(a.chart_, a.degree_);
    if (f.is_zero()) return r;
    for (const auto& [I, c] : a.t_) r.add(I, f * c);
    return r;
  }
  friend bool operator==(const KForm& a, const KForm& b) { return a.degree_ == b.degree_ && a.t_ == b.t_; }

 private:
  static void check(const KForm& a, const KForm& b) {
    if (a.degree_ != b.degree_) fail(ErrorKind::DimensionMismatch, "adding forms of different degree");
  }

  ChartRef chart_;
  unsigned degree_ = 0;
  std::map<IndexTuple, Expr> t_;
};

inline KForm wedge(const KForm& a, const KForm& b) {
  KForm r(a.chart(), a.degree() + b.degree());
  IndexTuple m;
  for (const auto& [I, x] : a.terms())
    for (const auto& [J, y] : b.terms()) {
      int s = detail::merge_sign(I, J, m);
      if (s == 0) continue;
      Expr c = x * y;
      r.add(m, s > 0 ? c : -c);
    }
  return r;
}

inline KForm exterior_derivative(const KForm& w) {
  KForm r(w.chart(), w.degree() + 1);
  IndexTuple m;
  for (const auto& [I, c] : w.terms())
    for (std::size_t v : variables_of(c)) {
      int s = detail::merge_sign({static_cast<std::uint32_t>(v)}, I, m);
      if (s == 0) continue;
      Expr dc = differentiate(c, v);
      r.add(m, s > 0 ? dc : -dc);
    }
  return r;
}

inline KForm d(const Expr& f, const ChartRef& chart) { return exterior_derivative(KForm::function(chart, f)); }

/// ω(X_1, ..., X_k) with the determinant convention (dx^dy)(X, Y) = X^x Y^y - X^y Y^x.
inline Expr contract(const KForm& w, const std::vector<VectorField>& X) {
  if (X.size() != w.degree()) fail(ErrorKind::DimensionMismatch, "wrong number of arguments for form");
  Expr s;
  const std::size_t k = X.size();
  for (const auto& [I, c] : w.terms()) {
    if (k == 0) {
      s += c;
    } else if (k == 1) {
      s += c * X[0][I[0]];
    } else if (k == 2) {
      s += c * (X[0][I[0]] * X[1][I[1]] - X[0][I[1]] * X[1][I[0]]);
    } else {
      EMatrix m(k, k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t j = 0; j < k; ++j) m(a, j) = X[j][I[a]];
      s += c * determinant(m);
    }
  }
  return s;
}

/// Exact alternating tensor obtained by evaluating a form at a point.
struct AlternatingTensor {
  std::size_t dim = 0;
  unsigned degree = 0;
  std::map<IndexTuple, Rational> entries;

  Rational apply(const std::vector<QVector>& v) const {
    if (v.size() != degree) fail(ErrorKind::DimensionMismatch, "wrong number of tensor arguments");
    Rational s(0);
    for (const auto& [I, c] : entries) {
      QMatrix m(degree, degree);
      for (std::size_t a = 0; a < degree; ++a)
        for (std::size_t j = 0; j < degree; ++j) m(a, j) = v[j].at(I[a]);
      s += c * (degree == 0 ? Rational(1) : determinant(m));
    }
    return s;
  }
};

inline AlternatingTensor evaluate_form_at(const KForm& w, const Point& p) {
  AlternatingTensor t{w.chart()->dim(), w.degree(), {}};
  for (const auto& [I, c] : w.terms()) {
    Rational v = evaluate(c, p);
    if (sgn(v) != 0) t.entries.emplace(I, v);
  }
  return t;
}

// ---------------------------------------------------------------- maps

class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(ChartRef source, ChartRef target, EVector comps, std::optional<EVector> inverse = std::nullopt)
      : src_(std::move(source)), tgt_(std::move(target)), c_(std::move(comps)), inv_(std::move(inverse)) {
    if (c_.size() != tgt_->dim()) fail(ErrorKind::DimensionMismatch, "map needs one component per target coordinate");
    if (inv_) {
      if (inv_->size() != src_->dim()) fail(ErrorKind::DimensionMismatch, "inverse needs one component per source coordinate");
      for (std::size_t i = 0; i < src_->dim(); ++i)
        if (!(substitute((*inv_)[i], c_) == Expr::variable(i)))
          fail(ErrorKind::InvalidInput, "supplied inverse does not invert the map");
      for (std::size_t i = 0; i < tgt_->dim(); ++i)
        if (!(substitute(c_[i], *inv_) == Expr::variable(i)))
          fail(ErrorKind::InvalidInput, "supplied inverse does not invert the map");
    }
  }

  static SmoothMap identity(const ChartRef& c) {
    EVector v;
    for (std::size_t i = 0; i < c->dim(); ++i) v.push_back(Expr::variable(i));
    return SmoothMap(c, c, v, v);
  }

  const ChartRef& source() const { return src_; }
  const ChartRef& target() const { return tgt_; }
  const EVector& components() const { return c_; }
  const Expr& operator[](std::size_t i) const { return c_.at(i); }
  bool has_inverse() const { return inv_.has_value(); }

  SmoothMap inverse() const {
    if (!inv_) fail(ErrorKind::InvalidInput, "map has no supplied inverse");
    return SmoothMap(tgt_, src_, *inv_, c_);
  }

  /// Jacobian matrix, rows = target coordinates, columns = source coordinates.
  EMatrix jacobian() const {
    EMatrix J(tgt_->dim(), src_->dim());
    for (std::size_t i = 0; i < tgt_->dim(); ++i)
      for (std::size_t j = 0; j < src_->dim(); ++j) J(i, j) = differentiate(c_[i], j);
    return J;
  }

  /// f∘this for f on the target chart.
  Expr pullback(const Expr& f) const { return substitute(f, c_); }

  Point operator()(const Point& p) const { return Point{tgt_, evaluate(c_, p.coords)}; }

 private:
  ChartRef src_, tgt_;
  EVector c_;
  std::optional<EVector> inv_;
};

/// g∘f
inline SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
  if (g.source()->dim() != f.target()->dim()) fail(ErrorKind::DimensionMismatch, "maps are not composable");
  EVector c;
  for (const auto& e : g.components()) c.push_back(substitute(e, f.components()));
  std::optional<EVector> inv;
  if (g.has_inverse() && f.has_inverse()) {
    EVector iv;
    SmoothMap fi = f.inverse(), gi = g.inverse();
    for (const auto& e : fi.components()) iv.push_back(substitute(e, gi.components()));
    inv = iv;
  }
  return SmoothMap(f.source(), g.target(), c, inv);
}

inline KForm pullback_form(const SmoothMap& f, const KForm& w) {
  if (!same_chart(f.target(), w.chart())) fail(ErrorKind::DimensionMismatch, "form does not live on the map's target");
  std::vector<std::optional<KForm>> dcache(f.target()->dim());
  auto dfi = [&](std::uint32_t i) -> const KForm& {
    if (!dcache[i]) dcache[i] = d(f[i], f.source());
    return *dcache[i];
  };
  KForm r(f.source(), w.degree());
  for (const auto& [I, c] : w.terms()) {
    KForm term = KForm::function(f.source(), f.pullback(c));
    for (auto i : I) term = wedge(term, dfi(i));
    r = r + term;
  }
  return r;
}

/// Pushes a field forward along a diffeomorphism: (φ_* X)(φ(x)) = Jφ(x) X(x).
inline VectorField pushforward(const SmoothMap& phi, const VectorField& X) {
  SmoothMap inv = phi.inverse();
  EVector c = phi.jacobian() * X.components();
  for (auto& e : c) e = substitute(e, inv.components());
  return VectorField(phi.target(), c);
}

// ---------------------------------------------------------------- distributions

class Distribution {
 public:
  enum class Presentation { Generators, Annihilators };

  Distribution() = default;

  static Distribution from_generators(ChartRef chart, std::vector<VectorField> gens) {
    Distribution D;
    D.chart_ = chart;
    D.supplied_ = Presentation::Generators;
    const std::size_t N = chart->dim();
    EMatrix G(gens.size(), N);
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t i = 0; i < N; ++i) G(a, i) = gens[a][i];
    auto rr = row_reduce(G);
    add_locus(D.locus_, G, rr);
    if (rr.rank() == gens.size()) {
      D.gens_ = std::move(gens);
    } else {
      for (std::size_t k = 0; k < rr.rank(); ++k) D.gens_.emplace_back(chart, rr.reduced.row(k));
    }
    auto ann = kernel_from_reduction(rr, N);
    D.set_annihilators(ann.empty() ? EMatrix(0, N) : EMatrix::from_rows(ann, N));
    return D;
  }

  static Distribution from_annihilators(ChartRef chart, const std::vector<KForm>& forms) {
    Distribution D;
    D.chart_ = chart;
    D.supplied_ = Presentation::Annihilators;
    const std::size_t N = chart->dim();
    EMatrix A(forms.size(), N);
    for (std::size_t k = 0; k < forms.size(); ++k) {
      if (forms[k].degree() != 1) fail(ErrorKind::DimensionMismatch, "annihilators must be 1-forms");
      auto c = forms[k].coefficients();
      for (std::size_t i = 0; i < N; ++i) A(k, i) = c[i];
    }
    D.set_annihilators(A);
    for (auto& g : D.gens_from_annihilators()) D.gens_.push_back(std::move(g));
    return D;
  }

  const ChartRef& chart() const { return chart_; }
  Presentation supplied() const { return supplied_; }
  std::size_t rank() const { return gens_.size(); }
  std::size_t corank() const { return theta_.rows(); }

  /// Independent generators.
  const std::vector<VectorField>& generators() const { return gens_; }
  /// Reduced annihilators: row k is 1 at quotient_axes()[k] and 0 at the other quotient axes.
  const EMatrix& annihilator_matrix() const { return theta_; }
  const std::vector<std::size_t>& quotient_axes() const { return axes_; }
  std::vector<KForm> annihilators() const {
    std::vector<KForm> out;
    for (std::size_t k = 0; k < theta_.rows(); ++k) out.push_back(KForm::one_form(chart_, theta_.row(k)));
    return out;
  }
  /// Denominators and nonconstant pivots met while converting; the coordinate model may degenerate there.
  const std::vector<Expr>& singular_locus() const { return locus_; }

  /// Coordinates of [X] in TP/C with respect to the quotient axes.
  EVector quotient(const EVector& X) const { return theta_ * X; }
  bool contains(const VectorField& X) const {
    for (const auto& e : quotient(X.components()))
      if (!e.is_zero()) return false;
    return true;
  }
  bool contains_at(const Point& p, const QVector& v) const {
    auto q = evaluate(theta_, p) * v;
    return std::all_of(q.begin(), q.end(), [](const Rational& r) { return sgn(r) == 0; });
  }

  /// N x rank matrix of generator values at p.
  QMatrix frame_at(const Point& p) const {
    QMatrix F(chart_->dim(), gens_.size());
    for (std::size_t a = 0; a < gens_.size(); ++a) {
      auto v = gens_[a].at(p);
      for (std::size_t i = 0; i < v.size(); ++i) F(i, a) = v[i];
    }
    return F;
  }
  EMatrix generator_matrix() const {
    EMatrix G(chart_->dim(), gens_.size());
    for (std::size_t a = 0; a < gens_.size(); ++a)
      for (std::size_t i = 0; i < chart_->dim(); ++i) G(i, a) = gens_[a][i];
    return G;
  }

 private:
  static void add_locus(std::vector<Expr>& locus, const EMatrix& m, const RowReduction<Expr>& rr) {
    for (auto& e : singular_factors(m, rr))
      if (std::find(locus.begin(), locus.end(), e) == locus.end()) locus.push_back(std::move(e));
  }

  void set_annihilators(const EMatrix& A) {
    const std::size_t N = chart_->dim();
    auto rr = row_reduce(A);
    add_locus(locus_, A, rr);
    theta_ = EMatrix(rr.rank(), N);
    for (std::size_t k = 0; k < rr.rank(); ++k)
      for (std::size_t i = 0; i < N; ++i) theta_(k, i) = rr.reduced(k, i);
    axes_ = rr.pivot_cols;
  }

  std::vector<VectorField> gens_from_annihilators() const {
    std::vector<VectorField> out;
    if (theta_.rows() == 0) {
      for (std::size_t i = 0; i < chart_->dim(); ++i) out.push_back(VectorField::coordinate(chart_, i));
      return out;
    }
    for (auto& v : kernel_basis(theta_)) out.emplace_back(chart_, std::move(v));
    return out;
  }

  ChartRef chart_;
  Presentation supplied_ = Presentation::Annihilators;
  std::vector<VectorField> gens_;
  EMatrix theta_;
  std::vector<std::size_t> axes_;
  std::vector<Expr> locus_;
};

/// The same distribution presented the other way round.
inline Distribution convert_presentation(const Distribution& D) {
  if (D.supplied() == Distribution::Presentation::Generators) return Distribution::from_annihilators(D.chart(), D.annihilators());
  return Distribution::from_generators(D.chart(), D.generators());
}

inline Distribution intersect(const Distribution& A, const Distribution& B) {
  auto forms = A.annihilators();
  auto more = B.annihilators();
  forms.insert(forms.end(), more.begin(), more.end());
  return Distribution::from_annihilators(A.chart(), forms);
}

/// Frobenius test on the generator list, after confirming constant rank at sampled points.
inline bool is_involutive(const Distribution& D, const SamplePolicy& pol = {}) {
  Sampler s(pol.seed);
  if (D.corank() > 0) verify_constant_rank(D.annihilator_matrix(), D.chart(), s, pol, D.singular_locus());
  const auto& g = D.generators();
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b)
      if (!D.contains(lie_bracket(g[a], g[b]))) return false;
  return true;
}

// ---------------------------------------------------------------- printing and parsing

namespace detail {

inline std::string coefficient_prefix(const Expr& c, const Chart& chart, bool first) {
  bool neg = c.num().size() == 1 && sgn(c.num().leading().coeff) < 0;
  Expr a = neg ? -c : c;
  std::string body;
  if (!a.is_one()) {
    std::string s = to_string(a, chart);
    bool compound = !(a.is_polynomial() && a.num().size() == 1);
    body = (compound ? "(" + s + ")" : s) + "*";
  }
  if (!first) return (neg ? " - " : " + ") + body;
  if (!neg) return body;
  // "-x^2*dx" would read as (-x)^2*dx
  const auto& f = a.num().leading().mono.factors();
  bool power_first = a.is_polynomial() && a.num().leading().coeff == 1 && !f.empty() && f.front().second > 1;
  return (power_first ? "-1*" : "-") + body;
}

}  // namespace detail

/// Terms with constant coefficients come first, then in index order; wedge products print as dx^dy.
inline std::string to_string(const KForm& w) {
  if (w.is_zero()) return "0";
  const Chart& c = *w.chart();
  std::vector<std::pair<IndexTuple, Expr>> terms(w.terms().begin(), w.terms().end());
  std::stable_partition(terms.begin(), terms.end(), [](const auto& t) { return t.second.is_constant(); });
  std::string s;
  bool first = true;
  for (const auto& [I, coef] : terms) {
    std::string atoms;
    for (std::size_t k = 0; k < I.size(); ++k) atoms += (k ? "^d" : "d") + c.coordinate(I[k]);
    if (I.empty()) {
      std::string v = to_string(coef, c);
      s += first ? v : " + (" + v + ")";
    } else {
      s += detail::coefficient_prefix(coef, c, first) + atoms;
    }
    first = false;
  }
  return s;
}

inline std::string to_string(const VectorField& X) {
  const Chart& c = *X.chart();
  std::string s;
  bool first = true;
  for (std::size_t i = 0; i < X.dim(); ++i) {
    if (X[i].is_zero()) continue;
    s += detail::coefficient_prefix(X[i], c, first) + "d/d" + c.coordinate(i);
    first = false;
  }
  return first ? "0" : s;
}

namespace detail {

/// Parses a linear expression in atoms by rewriting them to fresh coordinates of an extended chart.
inline EVector parse_linear(std::string_view src, const Chart& chart, bool fields) {
  std::vector<std::string> ext = chart.coordinates();
  const std::size_t N = chart.dim();
  for (std::size_t i = 0; i < N; ++i) ext.push_back("__d_" + chart.coordinate(i));
  std::string out;
  std::size_t i = 0;
  while (i < src.size()) {
    if (fields && src.compare(i, 3, "d/d") == 0 && (i == 0 || !(std::isalnum(static_cast<unsigned char>(src[i - 1])) || src[i - 1] == '_'))) {
      std::size_t j = i + 3;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string id(src.substr(i + 3, j - i - 3));
      if (!chart.index_of(id)) fail(ErrorKind::UnknownCoordinate, "unknown coordinate '" + id + "' in field '" + std::string(src) + "'");
      out += "__d_" + id;
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(src[i])) || src[i] == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string id(src.substr(i, j - i));
      if (!fields && id.size() > 1 && id[0] == 'd' && chart.index_of(id.substr(1))) {
        if (chart.index_of(id)) fail(ErrorKind::SyntaxError, "'" + id + "' is both a coordinate and a differential");
        out += "__d_" + id.substr(1);
      } else {
        out += id;
      }
      i = j;
      continue;
    }
    out += src[i++];
  }
  Chart big(chart.name(), ext);
  Expr e = parse_expr(out, big);
  EVector coeffs(N);
  Expr rest = e;
  for (std::size_t k = 0; k < N; ++k) {
    coeffs[k] = differentiate(e, N + k);
    for (std::size_t v : variables_of(coeffs[k]))
      if (v >= N) fail(ErrorKind::SyntaxError, "'" + std::string(src) + "' is not linear in its atoms");
    rest -= coeffs[k] * Expr::variable(N + k);
  }
  if (!rest.is_zero()) fail(ErrorKind::SyntaxError, "'" + std::string(src) + "' has a term without an atom");
  return coeffs;
}

}  // namespace detail

/// Parses a 1-form such as "du - p*dx".
inline KForm parse_form(std::string_view src, const ChartRef& chart) {
  return KForm::one_form(chart, detail::parse_linear(src, *chart, false));
}

/// Parses a vector field such as "d/dx + p*d/du".
inline VectorField parse_field(std::string_view src, const ChartRef& chart) {
  return VectorField(chart, detail::parse_linear(src, *chart, true));
}

}  // namespace pfaff
