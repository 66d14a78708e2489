#pragma once

// Tableau maps g -> Hom(V, W): Spencer differential, prolongations, Cartan characters and flags.

#include <string>
#include <vector>

#include "exactla.hpp"

namespace pfaff {

/// images[a] is the dim_w x dim_v matrix of the image of the a-th basis vector of g.
struct TableauMap {
  std::size_t dim_g = 0, dim_v = 0, dim_w = 0;
  std::vector<QMatrix> images;

  TableauMap() = default;
  TableauMap(std::size_t g, std::size_t v, std::size_t w) : dim_g(g), dim_v(v), dim_w(w), images(g, QMatrix(w, v)) {}

  void validate() const {
    if (images.size() != dim_g) fail(ErrorKind::DimensionMismatch, "tableau needs one image per basis vector of g");
    for (const auto& m : images)
      if (m.rows() != dim_w || m.cols() != dim_v) fail(ErrorKind::DimensionMismatch, "tableau image has wrong shape");
  }

  /// Image of the element of g with the given coordinates.
  QMatrix apply(const QVector& c) const {
    QMatrix r(dim_w, dim_v);
    for (std::size_t a = 0; a < dim_g; ++a)
      if (sgn(c.at(a)) != 0) r = r + scaled(images[a], c[a]);
    return r;
  }

 private:
  static QMatrix scaled(QMatrix m, const Rational& s) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) *= s;
    return m;
  }
};

/// An ordered basis of V, stored as the columns of an invertible matrix.
struct Flag {
  QMatrix basis;
  std::size_t dim() const { return basis.cols(); }
  QVector vector(std::size_t k) const { return basis.col(k); }

  static Flag standard(std::size_t n) { return Flag{QMatrix::identity(n)}; }
  static Flag from_vectors(const std::vector<QVector>& v) {
    Flag f{QMatrix::from_columns(v, v.size())};
    if (rank(f.basis) != v.size()) fail(ErrorKind::InvalidInput, "flag vectors are not a basis");
    return f;
  }
};

inline Flag random_flag(std::size_t n, Sampler& s, long height) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = s.rational(height);
    if (rank(m) == n) return Flag{m};
  }
  fail(ErrorKind::SamplingExhausted, "could not draw an invertible flag");
}

// Elements of Hom(V, g) are flattened as xi[i * dim_g + a] = g_a-coefficient of xi(e_i).

/// Rows indexed by (pair i<j, w), columns by (i, a).
inline QMatrix spencer_differential(const TableauMap& t) {
  t.validate();
  const std::size_t n = t.dim_v, g = t.dim_g, W = t.dim_w;
  QMatrix D(n * (n - (n ? 1 : 0)) / 2 * W, n * g);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++p)
      for (std::size_t w = 0; w < W; ++w)
        for (std::size_t a = 0; a < g; ++a) {
          D(p * W + w, i * g + a) += t.images[a](w, j);
          D(p * W + w, j * g + a) -= t.images[a](w, i);
        }
  return D;
}

inline Subspace<Rational> first_prolongation(const TableauMap& t) { return Subspace<Rational>::kernel(spencer_differential(t)); }

inline std::size_t kernel_dim(const TableauMap& t) {
  QMatrix M(t.dim_w * t.dim_v, t.dim_g);
  for (std::size_t a = 0; a < t.dim_g; ++a)
    for (std::size_t w = 0; w < t.dim_w; ++w)
      for (std::size_t i = 0; i < t.dim_v; ++i) M(w * t.dim_v + i, a) = t.images[a](w, i);
  return t.dim_g - rank(M);
}

namespace detail {

/// dim g_k = dim {c in g : tau(c) kills the first k flag vectors}; g_n is taken to be 0.
inline std::size_t flag_level_dim(const TableauMap& t, const Flag& f, std::size_t k) {
  if (k == 0) return t.dim_g;
  if (k >= t.dim_v) return 0;
  QMatrix M(k * t.dim_w, t.dim_g);
  for (std::size_t j = 0; j < k; ++j) {
    QVector e = f.vector(j);
    for (std::size_t a = 0; a < t.dim_g; ++a) {
      QVector img = t.images[a] * e;
      for (std::size_t w = 0; w < t.dim_w; ++w) M(j * t.dim_w + w, a) = img[w];
    }
  }
  return t.dim_g - rank(M);
}

/// The map xi -> xi(f) from Hom(V, g) to g.
inline QMatrix evaluation_map(std::size_t dim_g, std::size_t dim_v, const QVector& f) {
  QMatrix L(dim_g, dim_v * dim_g);
  for (std::size_t i = 0; i < dim_v; ++i)
    for (std::size_t a = 0; a < dim_g; ++a) L(a, i * dim_g + a) = f[i];
  return L;
}

/// True iff xi -> xi(f_k) maps (g1)_{k-1} onto g_{k-1} for every k.
inline bool evaluations_surjective(const TableauMap& t, const Subspace<Rational>& g1, const Flag& f) {
  const std::size_t n = t.dim_v;
  std::vector<QVector> level = g1.basis();  // basis of (g1)_{k-1}
  for (std::size_t k = 1; k <= n; ++k) {
    QMatrix L = evaluation_map(t.dim_g, n, f.vector(k - 1));
    std::vector<QVector> images;
    for (const auto& xi : level) images.push_back(L * xi);
    std::size_t r = images.empty() ? 0 : rank(QMatrix::from_rows(images, t.dim_g));
    if (r != flag_level_dim(t, f, k - 1)) return false;
    // (g1)_k: elements of the current level that also vanish on f_k.
    if (level.empty()) continue;
    QMatrix Lb = L * QMatrix::from_columns(level, n * t.dim_g);
    std::vector<QVector> next;
    QMatrix Lv = QMatrix::from_columns(level, n * t.dim_g);
    for (const auto& c : kernel_basis(Lb)) next.push_back(Lv * c);
    level = next;
  }
  return true;
}

}  // namespace detail

inline std::vector<std::size_t> cartan_characters(const TableauMap& t, const Flag& f) {
  t.validate();
  if (f.dim() != t.dim_v) fail(ErrorKind::DimensionMismatch, "flag has wrong dimension");
  std::vector<std::size_t> s;
  for (std::size_t k = 1; k <= t.dim_v; ++k) s.push_back(detail::flag_level_dim(t, f, k - 1) - detail::flag_level_dim(t, f, k));
  return s;
}

inline std::size_t cartan_bound(const std::vector<std::size_t>& s) {
  std::size_t b = 0;
  for (std::size_t k = 0; k < s.size(); ++k) b += (k + 1) * s[k];
  return b;
}

struct CartanReport {
  Flag flag;
  std::vector<std::size_t> characters;
  std::size_t bound = 0;
  std::size_t dim_g1 = 0;
  std::size_t dim_kernel = 0;        // dim ker tau
  bool involutive_with_this_flag = false;
  bool evaluations_surjective = false;  // surjectivity of xi -> xi(e_k) on the filtered prolongation
  std::size_t trials = 0;
  bool involutive = false;  // witnessed by some trial

  std::string verdict() const {
    return involutive ? "involutive" : "not witnessed involutive (trials=" + std::to_string(trials) + ")";
  }
};

inline CartanReport cartan_report(const TableauMap& t, const Flag& f, const Subspace<Rational>& g1) {
  CartanReport r;
  r.flag = f;
  r.characters = cartan_characters(t, f);
  r.bound = cartan_bound(r.characters);
  r.dim_g1 = g1.dim();
  r.dim_kernel = kernel_dim(t);
  r.involutive_with_this_flag = r.dim_g1 == r.bound;
  r.evaluations_surjective = detail::evaluations_surjective(t, g1, f);
  r.trials = 1;
  r.involutive = r.involutive_with_this_flag;
  return r;
}

inline CartanReport cartan_report(const TableauMap& t, const Flag& f) { return cartan_report(t, f, first_prolongation(t)); }

/// Tries random flags and keeps the one with the smallest gap between the bound and dim g1.
inline CartanReport involutivity_test(const TableauMap& t, std::size_t trials, std::uint64_t seed, long height = 10) {
  if (trials < 1) fail(ErrorKind::InvalidInput, "involutivity test needs at least one trial");
  Subspace<Rational> g1 = first_prolongation(t);
  Sampler s(seed);
  std::optional<CartanReport> best;
  std::size_t run = 0;
  while (run < trials) {
    Flag f = random_flag(t.dim_v, s, height);
    ++run;
    CartanReport r = cartan_report(t, f, g1);
    auto gap = [](const CartanReport& c) { return static_cast<long>(c.bound) - static_cast<long>(c.dim_g1); };
    if (!best || gap(r) < gap(*best)) best = r;
    if (best->involutive_with_this_flag) break;
  }
  best->trials = run;
  best->involutive = best->involutive_with_this_flag;
  return *best;
}

/// The image h = im tau as an inclusion tableau into Hom(V, W).
inline TableauMap image_tableau(const TableauMap& t) {
  std::vector<QVector> flat;
  for (const auto& m : t.images) {
    QVector v;
    for (std::size_t w = 0; w < t.dim_w; ++w)
      for (std::size_t i = 0; i < t.dim_v; ++i) v.push_back(m(w, i));
    flat.push_back(v);
  }
  auto h = Subspace<Rational>::span(t.dim_w * t.dim_v, flat);
  TableauMap r(h.dim(), t.dim_v, t.dim_w);
  for (std::size_t b = 0; b < h.dim(); ++b)
    for (std::size_t w = 0; w < t.dim_w; ++w)
      for (std::size_t i = 0; i < t.dim_v; ++i) r.images[b](w, i) = h.basis()[b][w * t.dim_v + i];
  return r;
}

struct Equivalences {
  bool image_bound_attained = false;   // dim h1 = sum k s_k(h)
  bool bound_attained = false;         // dim g1 = sum k s_k(g)
  bool image_evaluations_onto = false;
  bool evaluations_onto = false;
  bool all_equal() const {
    return image_bound_attained == bound_attained && bound_attained == image_evaluations_onto &&
           image_evaluations_onto == evaluations_onto;
  }
};

inline Equivalences check_equivalences(const TableauMap& t, const Flag& f) {
  TableauMap h = image_tableau(t);
  auto g1 = first_prolongation(t), h1 = first_prolongation(h);
  Equivalences e;
  e.image_bound_attained = h1.dim() == cartan_bound(cartan_characters(h, f));
  e.bound_attained = g1.dim() == cartan_bound(cartan_characters(t, f));
  e.image_evaluations_onto = detail::evaluations_surjective(h, h1, f);
  e.evaluations_onto = detail::evaluations_surjective(t, g1, f);
  return e;
}

/// The inclusion g1 -> Hom(V, g) viewed as a tableau map.
inline TableauMap prolonged_tableau(const TableauMap& t) {
  auto g1 = first_prolongation(t);
  TableauMap r(g1.dim(), t.dim_v, t.dim_g);
  for (std::size_t s = 0; s < g1.dim(); ++s)
    for (std::size_t i = 0; i < t.dim_v; ++i)
      for (std::size_t a = 0; a < t.dim_g; ++a) r.images[s](a, i) = g1.basis()[s][i * t.dim_g + a];
  return r;
}

/// g2, as a subspace of Hom(V, g1) in the basis of g1 returned by first_prolongation.
inline Subspace<Rational> second_prolongation(const TableauMap& t) { return first_prolongation(prolonged_tableau(t)); }

}  // namespace pfaff
