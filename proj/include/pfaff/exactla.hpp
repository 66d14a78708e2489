#pragma once

// Exact linear algebra over Q and over the rational-function field, plus seeded point sampling.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "expr.hpp"

namespace pfaff {

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static bool is_zero(const Rational& q) { return sgn(q) == 0; }
  static std::size_t weight(const Rational& q) { return sgn(q) == 0 ? 0 : 1; }
};

template <>
struct ScalarTraits<Expr> {
  static bool is_zero(const Expr& e) { return e.is_zero(); }
  static std::size_t weight(const Expr& e) { return e.weight(); }
};

template <class T>
bool is_zero(const T& x) {
  return ScalarTraits<T>::is_zero(x);
}

template <class T>
using Vector = std::vector<T>;

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, T(0L)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1L);
    return m;
  }
  static Matrix from_columns(const std::vector<Vector<T>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j].at(i);
    return m;
  }
  static Matrix from_rows(const std::vector<Vector<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i].at(j);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Vector<T> row(std::size_t i) const { return Vector<T>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }
  Vector<T> col(std::size_t j) const {
    Vector<T> v;
    v.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) fail(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& x = a(i, k);
        if (is_zero(x)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!is_zero(b(k, j))) r(i, j) = r(i, j) + x * b(k, j);
      }
    return r;
  }
  friend Vector<T> operator*(const Matrix& a, const Vector<T>& v) {
    if (a.cols_ != v.size()) fail(ErrorKind::DimensionMismatch, "matrix-vector shape mismatch");
    Vector<T> r(a.rows_, T(0L));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        if (!is_zero(a(i, k)) && !is_zero(v[k])) r[i] = r[i] + a(i, k) * v[k];
    return r;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix r = a;
    for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] + b.a_.at(i);
    return r;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix r = a;
    for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] - b.a_.at(i);
    return r;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  /// [this | other]
  Matrix hconcat(const Matrix& o) const {
    if (rows_ != o.rows_) fail(ErrorKind::DimensionMismatch, "hconcat row mismatch");
    Matrix r(rows_, cols_ + o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, cols_ + j) = o(i, j);
    }
    return r;
  }
  /// [this ; other]
  Matrix vconcat(const Matrix& o) const {
    if (cols_ != o.cols_) fail(ErrorKind::DimensionMismatch, "vconcat column mismatch");
    Matrix r(rows_ + o.rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
    for (std::size_t i = 0; i < o.rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(rows_ + i, j) = o(i, j);
    return r;
  }

  bool is_zero_matrix() const {
    for (const auto& x : a_)
      if (!is_zero(x)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

using QMatrix = Matrix<Rational>;
using EMatrix = Matrix<Expr>;
using QVector = Vector<Rational>;
using EVector = Vector<Expr>;

template <class T>
bool is_zero_vector(const Vector<T>& v) {
  for (const auto& x : v)
    if (!is_zero(x)) return false;
  return true;
}

/// Reduced row echelon form. Row k < rank has a 1 in column pivot_cols[k] and zeros there elsewhere.
template <class T>
struct RowReduction {
  Matrix<T> reduced;
  Matrix<T> companion;  // the same row operations applied to an optional right-hand side
  std::vector<std::size_t> pivot_cols;
  std::vector<T> pivots;  // pivot values before normalization
  std::size_t rank() const { return pivot_cols.size(); }
};

/// Gauss-Jordan elimination with complete pivoting by simplest entry (ties: lowest column, then row).
/// Pivots are searched only among the first `pivot_limit` columns.
template <class T>
RowReduction<T> row_reduce(Matrix<T> m, Matrix<T> companion = Matrix<T>(),
                           std::size_t pivot_limit = std::numeric_limits<std::size_t>::max()) {
  RowReduction<T> out;
  const std::size_t R = m.rows(), C = std::min(m.cols(), pivot_limit);
  Matrix<T> comp = companion.rows() == R ? std::move(companion) : Matrix<T>(R, 0);
  std::vector<bool> used(m.cols(), false);
  for (std::size_t k = 0; k < R; ++k) {
    std::size_t best = std::numeric_limits<std::size_t>::max(), br = 0, bc = 0;
    for (std::size_t c = 0; c < C; ++c) {
      if (used[c]) continue;
      for (std::size_t r = k; r < R; ++r) {
        std::size_t w = ScalarTraits<T>::weight(m(r, c));
        if (w != 0 && w < best) {
          best = w;
          br = r;
          bc = c;
          if (w == 1) break;
        }
      }
      if (best == 1) break;
    }
    if (best == std::numeric_limits<std::size_t>::max()) break;
    if (br != k) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(k, j), m(br, j));
      for (std::size_t j = 0; j < comp.cols(); ++j) std::swap(comp(k, j), comp(br, j));
    }
    T p = m(k, bc);
    out.pivots.push_back(p);
    out.pivot_cols.push_back(bc);
    used[bc] = true;
    if (!(p == T(1L))) {
      T inv = T(1L) / p;
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!is_zero(m(k, j))) m(k, j) = m(k, j) * inv;
      for (std::size_t j = 0; j < comp.cols(); ++j)
        if (!is_zero(comp(k, j))) comp(k, j) = comp(k, j) * inv;
    }
    m(k, bc) = T(1L);
    for (std::size_t r = 0; r < R; ++r) {
      if (r == k || is_zero(m(r, bc))) continue;
      T f = m(r, bc);
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!is_zero(m(k, j))) m(r, j) = m(r, j) - f * m(k, j);
      for (std::size_t j = 0; j < comp.cols(); ++j)
        if (!is_zero(comp(k, j))) comp(r, j) = comp(r, j) - f * comp(k, j);
      m(r, bc) = T(0L);
    }
  }
  out.reduced = std::move(m);
  out.companion = std::move(comp);
  return out;
}

template <class T>
std::size_t rank(const Matrix<T>& m) {
  return row_reduce(m).rank();
}

template <class T>
std::vector<Vector<T>> kernel_from_reduction(const RowReduction<T>& rr, std::size_t ncols) {
  std::vector<bool> pivot(ncols, false);
  for (auto c : rr.pivot_cols) pivot[c] = true;
  std::vector<Vector<T>> basis;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (pivot[f]) continue;
    Vector<T> v(ncols, T(0L));
    v[f] = T(1L);
    for (std::size_t k = 0; k < rr.rank(); ++k)
      if (!is_zero(rr.reduced(k, f))) v[rr.pivot_cols[k]] = -rr.reduced(k, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
std::vector<Vector<T>> kernel_basis(const Matrix<T>& m) {
  return kernel_from_reduction(row_reduce(m), m.cols());
}

/// Linear subspace of T^n kept as an independent basis.
template <class T>
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::size_t ambient) : n_(ambient) {}

  static Subspace span(std::size_t ambient, const std::vector<Vector<T>>& vecs) {
    Subspace s(ambient);
    if (vecs.empty()) return s;
    auto rr = row_reduce(Matrix<T>::from_rows(vecs, ambient));
    for (std::size_t k = 0; k < rr.rank(); ++k) s.basis_.push_back(rr.reduced.row(k));
    return s;
  }
  static Subspace kernel(const Matrix<T>& m) {
    Subspace s(m.cols());
    s.basis_ = kernel_basis(m);
    return s;
  }
  static Subspace whole(std::size_t n) {
    std::vector<Vector<T>> e;
    for (std::size_t i = 0; i < n; ++i) {
      Vector<T> v(n, T(0L));
      v[i] = T(1L);
      e.push_back(v);
    }
    Subspace s(n);
    s.basis_ = e;
    return s;
  }

  std::size_t ambient() const { return n_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Vector<T>>& basis() const { return basis_; }
  Matrix<T> basis_matrix() const { return Matrix<T>::from_columns(basis_, n_); }

  bool contains(const Vector<T>& v) const {
    if (v.size() != n_) fail(ErrorKind::DimensionMismatch, "vector does not live in ambient space");
    bool zero = true;
    for (const auto& x : v) zero = zero && is_zero(x);
    if (zero) return true;
    auto rows = basis_;
    rows.push_back(v);
    return rank(Matrix<T>::from_rows(rows, n_)) == dim();
  }
  bool contains(const Subspace& o) const {
    if (o.dim() == 0) return true;
    auto rows = basis_;
    rows.insert(rows.end(), o.basis_.begin(), o.basis_.end());
    return rank(Matrix<T>::from_rows(rows, n_)) == dim();
  }
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.n_ == b.n_ && a.dim() == b.dim() && a.contains(b);
  }

  Subspace intersect(const Subspace& o) const {
    if (o.n_ != n_) fail(ErrorKind::DimensionMismatch, "subspaces of different ambient spaces");
    if (dim() == 0 || o.dim() == 0) return Subspace(n_);
    // Solve A a - B b = 0 and map the a-part through A.
    Matrix<T> A = basis_matrix(), B = o.basis_matrix();
    Matrix<T> M(n_, dim() + o.dim());
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < dim(); ++j) M(i, j) = A(i, j);
      for (std::size_t j = 0; j < o.dim(); ++j) M(i, dim() + j) = -B(i, j);
    }
    std::vector<Vector<T>> out;
    for (const auto& kv : kernel_basis(M)) {
      Vector<T> a(kv.begin(), kv.begin() + static_cast<std::ptrdiff_t>(dim()));
      out.push_back(A * a);
    }
    return span(n_, out);
  }

 private:
  std::size_t n_ = 0;
  std::vector<Vector<T>> basis_;
};

/// Solution set of a linear system: empty, or point + linear part.
template <class T>
struct AffineSubspace {
  std::size_t ambient = 0;
  std::optional<Vector<T>> point;
  Subspace<T> linear;

  bool empty() const { return !point.has_value(); }
  /// Dimension; -1 encodes the empty set.
  long dim() const { return empty() ? -1 : static_cast<long>(linear.dim()); }

  bool contains(const Vector<T>& v) const {
    if (empty()) return false;
    Vector<T> d = v;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = d[i] - (*point)[i];
    return linear.contains(d);
  }
  friend bool operator==(const AffineSubspace& a, const AffineSubspace& b) {
    if (a.ambient != b.ambient) return false;
    if (a.empty() || b.empty()) return a.empty() == b.empty();
    return a.linear == b.linear && a.contains(*b.point);
  }
};

/// All solutions x of M x = b.
template <class T>
AffineSubspace<T> solve_affine(const Matrix<T>& M, const Vector<T>& b) {
  if (b.size() != M.rows()) fail(ErrorKind::DimensionMismatch, "right-hand side size mismatch");
  AffineSubspace<T> out;
  out.ambient = M.cols();
  Matrix<T> rhs(M.rows(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
  auto rr = row_reduce(M, rhs);
  for (std::size_t r = rr.rank(); r < M.rows(); ++r)
    if (!is_zero(rr.companion(r, 0))) {
      out.linear = Subspace<T>(M.cols());
      return out;
    }
  Vector<T> x(M.cols(), T(0L));
  for (std::size_t k = 0; k < rr.rank(); ++k) x[rr.pivot_cols[k]] = rr.companion(k, 0);
  out.point = x;
  Subspace<T> lin(M.cols());
  lin = Subspace<T>::span(M.cols(), kernel_from_reduction(rr, M.cols()));
  out.linear = lin;
  return out;
}

/// Inverse of a square matrix; SingularFrame when it is not invertible.
template <class T>
Matrix<T> inverse(const Matrix<T>& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "inverse of non-square matrix");
  auto rr = row_reduce(m, Matrix<T>::identity(m.rows()));
  if (rr.rank() != m.rows()) fail(ErrorKind::SingularFrame, "matrix is singular");
  Matrix<T> inv(m.rows(), m.rows());
  for (std::size_t k = 0; k < m.rows(); ++k)
    for (std::size_t j = 0; j < m.rows(); ++j) inv(rr.pivot_cols[k], j) = rr.companion(k, j);
  return inv;
}

template <class T>
T determinant(Matrix<T> m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  T det(1L);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = n;
    for (std::size_t r = c; r < n; ++r)
      if (!is_zero(m(r, c)) && (p == n || ScalarTraits<T>::weight(m(r, c)) < ScalarTraits<T>::weight(m(p, c)))) p = r;
    if (p == n) return T(0L);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(p, j));
      det = -det;
    }
    det = det * m(c, c);
    T inv = T(1L) / m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (is_zero(m(r, c))) continue;
      T f = m(r, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(r, j) = m(r, j) - f * m(c, j);
    }
  }
  return det;
}

inline QMatrix evaluate(const EMatrix& m, std::span<const Rational> x) {
  QMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) r(i, j) = evaluate(m(i, j), x);
  return r;
}
inline QMatrix evaluate(const EMatrix& m, const Point& p) { return evaluate(m, std::span<const Rational>(p.coords)); }

inline QVector evaluate(const EVector& v, std::span<const Rational> x) {
  QVector r;
  r.reserve(v.size());
  for (const auto& e : v) r.push_back(e.is_zero() ? Rational(0) : evaluate(e, x));
  return r;
}

inline EMatrix to_expr(const QMatrix& m) {
  EMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Expr(m(i, j));
  return r;
}

// ---------------------------------------------------------------- sampling

struct SamplePolicy {
  std::uint64_t seed = 0;
  long height = 10;          // numerators in [-height, height], denominators in [1, height]
  std::size_t samples = 8;   // points used by the constant-rank protocol
  std::size_t max_retries = 1000;
};

/// Deterministic source of random rationals. Identical seeds give identical streams on every platform.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  /// Independent stream for a numbered subtask.
  Sampler split(std::uint64_t task) const { return Sampler(seed_ ^ (0x9e3779b97f4a7c15ULL * (task + 1))); }

  long uniform(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r;
    do r = rng_();
    while (r >= limit);
    return lo + static_cast<long>(r % span);
  }

  Rational rational(long height) {
    long n = uniform(-height, height), d = uniform(1, height);
    return make_rational(n, d);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Draws a point of `chart` where no numerator or denominator of `avoid` vanishes.
inline Point sample_point(const ChartRef& chart, std::span<const Expr> avoid, Sampler& s, const SamplePolicy& pol) {
  for (std::size_t attempt = 0; attempt <= pol.max_retries; ++attempt) {
    Point p{chart, {}};
    for (std::size_t i = 0; i < chart->dim(); ++i) p.coords.push_back(s.rational(pol.height));
    bool ok = true;
    for (const auto& e : avoid) {
      if (sgn(e.den().evaluate(p.coords)) == 0 || sgn(e.num().evaluate(p.coords)) == 0) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
  fail(ErrorKind::SamplingExhausted, "no admissible point after " + std::to_string(pol.max_retries) + " retries");
}

struct RankCheck {
  std::size_t generic_rank = 0;
  std::vector<Point> points;
  std::size_t rejected = 0;
};

/// Every nonconstant pivot and entry denominator of the reduction of m.
inline std::vector<Expr> singular_factors(const EMatrix& m, const RowReduction<Expr>& rr) {
  std::vector<Expr> out;
  for (const auto& p : rr.pivots)
    if (!p.is_constant()) out.push_back(p);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_polynomial()) out.push_back(Expr(m(i, j).den()));
  return out;
}

/// Confirms at `pol.samples` points that m attains its generic rank; RankInstability otherwise.
inline RankCheck verify_constant_rank(const EMatrix& m, const ChartRef& chart, Sampler& s, const SamplePolicy& pol,
                                      std::span<const Expr> extra_avoid = {}) {
  auto rr = row_reduce(m);
  RankCheck out;
  out.generic_rank = rr.rank();
  auto avoid = singular_factors(m, rr);
  avoid.insert(avoid.end(), extra_avoid.begin(), extra_avoid.end());
  while (out.points.size() < pol.samples) {
    Point p = sample_point(chart, avoid, s, pol);
    if (rank(evaluate(m, p)) == out.generic_rank) {
      out.points.push_back(std::move(p));
    } else if (++out.rejected > pol.max_retries) {
      fail(ErrorKind::RankInstability, "rank keeps dropping below generic rank " + std::to_string(out.generic_rank));
    }
  }
  return out;
}

}  // namespace pfaff
