#pragma once

// Pfaffian fibrations (P, C, pi): validation, curvature, symbol, prolongation fibers and prolongation.

#include <optional>
#include <string>
#include <vector>

#include "exterior.hpp"
#include "tableau.hpp"

namespace pfaff {

class PfaffianFibration;
PfaffianFibration validate_fibration(ChartRef total, ChartRef base, SmoothMap pi, Distribution C,
                                     const SamplePolicy& pol = {});

/// A validated Pfaffian fibration with its adapted frame h_1..h_n (Tpi h_i = d/dx_i), v_1..v_r (C^pi).
class PfaffianFibration {
 public:
  const ChartRef& total() const { return P_; }
  const ChartRef& base() const { return X_; }
  const SmoothMap& projection() const { return pi_; }
  const Distribution& distribution() const { return C_; }
  const Distribution& vertical() const { return Cpi_; }
  const EMatrix& projection_jacobian() const { return Jpi_; }
  /// Reduced annihilators of C; row k reads the k-th quotient coordinate of TP/C.
  const EMatrix& theta() const { return C_.annihilator_matrix(); }

  std::size_t N() const { return P_->dim(); }
  std::size_t n() const { return X_->dim(); }
  std::size_t rank() const { return C_.rank(); }
  std::size_t vertical_rank() const { return vert_.size(); }
  std::size_t quotient_dim() const { return C_.corank(); }

  const std::vector<VectorField>& horizontal_frame() const { return horiz_; }
  const std::vector<VectorField>& vertical_frame() const { return vert_; }
  /// Frame h_1..h_n, v_1..v_r in this order.
  std::vector<VectorField> frame() const {
    auto f = horiz_;
    f.insert(f.end(), vert_.begin(), vert_.end());
    return f;
  }

  /// curvature(h_i, h_j) and curvature(h_i, v_a) in quotient coordinates, as Exprs on P.
  const EVector& curvature_hh(std::size_t i, std::size_t j) const { return Khh_.at(i * n() + j); }
  const EVector& curvature_hv(std::size_t i, std::size_t a) const { return Khv_.at(i * vertical_rank() + a); }

  const std::vector<Expr>& singular_locus() const { return locus_; }

  /// Throws SingularPoint unless every cached quantity is finite at p and all ranks are generic.
  void check_point(const Point& p) const {
    if (p.coords.size() != N()) fail(ErrorKind::DimensionMismatch, "point does not belong to the total chart");
    try {
      if (pfaff::rank(evaluate(Jpi_, p)) != n()) fail(ErrorKind::SingularPoint, "projection is not a submersion here");
      QMatrix F(N(), rank());
      auto fr = frame();
      for (std::size_t a = 0; a < fr.size(); ++a) {
        auto v = fr[a].at(p);
        for (std::size_t i = 0; i < N(); ++i) F(i, a) = v[i];
      }
      if (pfaff::rank(F) != rank()) fail(ErrorKind::SingularPoint, "frame degenerates here");
      if (pfaff::rank(evaluate(theta(), p)) != quotient_dim()) fail(ErrorKind::SingularPoint, "annihilators degenerate here");
      for (const auto& k : Khh_) evaluate(k, p.coords);
      for (const auto& k : Khv_) evaluate(k, p.coords);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PoleAtPoint) fail(ErrorKind::SingularPoint, "pole of a frame or curvature coefficient");
      throw;
    }
  }

 private:
  friend PfaffianFibration validate_fibration(ChartRef, ChartRef, SmoothMap, Distribution, const SamplePolicy&);
  PfaffianFibration() = default;

  ChartRef P_, X_;
  SmoothMap pi_;
  Distribution C_, Cpi_;
  EMatrix Jpi_;
  std::vector<VectorField> horiz_, vert_;
  std::vector<EVector> Khh_, Khv_;
  std::vector<Expr> locus_;
};

namespace detail {

inline void add_unique(std::vector<Expr>& to, const std::vector<Expr>& from) {
  for (const auto& e : from)
    if (!e.is_constant() && std::find(to.begin(), to.end(), e) == to.end()) to.push_back(e);
}

inline std::vector<Expr> denominators(const std::vector<VectorField>& fields) {
  std::vector<Expr> out;
  for (const auto& f : fields)
    for (const auto& c : f.components())
      if (!c.is_polynomial()) out.push_back(Expr(c.den()));
  return out;
}

}  // namespace detail

inline PfaffianFibration validate_fibration(ChartRef total, ChartRef base, SmoothMap pi, Distribution C,
                                            const SamplePolicy& pol) {
  if (!same_chart(pi.source(), total) || !same_chart(pi.target(), base))
    fail(ErrorKind::DimensionMismatch, "projection must map the total chart to the base chart");
  if (!same_chart(C.chart(), total)) fail(ErrorKind::DimensionMismatch, "distribution must live on the total chart");
  PfaffianFibration F;
  F.P_ = total;
  F.X_ = base;
  F.pi_ = pi;
  F.C_ = C;
  F.Jpi_ = pi.jacobian();
  const std::size_t N = total->dim(), n = base->dim();

  auto jr = row_reduce(F.Jpi_);
  if (jr.rank() != n) fail(ErrorKind::NotASubmersion, "generic rank of the projection is " + std::to_string(jr.rank()) + " < " + std::to_string(n));
  F.locus_ = C.singular_locus();
  detail::add_unique(F.locus_, singular_factors(F.Jpi_, jr));

  // Tpi restricted to C must be onto.
  EMatrix G = C.generator_matrix();
  EMatrix M = F.Jpi_ * G;
  auto mr = row_reduce(M, EMatrix::identity(n));
  if (mr.rank() != n) fail(ErrorKind::TransversalityFails, "C + ker T(pi) has generic rank " + std::to_string(N - n + mr.rank()) + " < " + std::to_string(N));
  detail::add_unique(F.locus_, singular_factors(M, mr));
  for (std::size_t i = 0; i < n; ++i) {
    EVector c(G.cols());
    for (std::size_t k = 0; k < mr.rank(); ++k) c[mr.pivot_cols[k]] = mr.companion(k, i);
    F.horiz_.emplace_back(total, G * c);
  }
  for (const auto& k : kernel_from_reduction(mr, G.cols())) F.vert_.emplace_back(total, G * k);
  detail::add_unique(F.locus_, detail::denominators(F.horiz_));
  detail::add_unique(F.locus_, detail::denominators(F.vert_));
  F.Cpi_ = Distribution::from_generators(total, F.vert_.empty() ? std::vector<VectorField>{} : F.vert_);

  Sampler s(pol.seed);
  try {
    verify_constant_rank(F.Jpi_, total, s, pol, F.locus_);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::RankInstability) fail(ErrorKind::NotASubmersion, "projection rank drops on samples");
    throw;
  }
  if (!F.vert_.empty()) {
    EMatrix V(N, F.vert_.size());
    for (std::size_t a = 0; a < F.vert_.size(); ++a)
      for (std::size_t i = 0; i < N; ++i) V(i, a) = F.vert_[a][i];
    try {
      auto rc = verify_constant_rank(V, total, s, pol, F.locus_);
      if (rc.generic_rank != F.vert_.size()) fail(ErrorKind::VerticalPartNotConstantRank, "vertical frame is dependent");
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::RankInstability) fail(ErrorKind::VerticalPartNotConstantRank, e.detail());
      throw;
    }
  }

  for (std::size_t a = 0; a < F.vert_.size(); ++a)
    for (std::size_t b = a + 1; b < F.vert_.size(); ++b) {
      VectorField br = lie_bracket(F.vert_[a], F.vert_[b]);
      if (!C.contains(br)) fail(ErrorKind::VerticalPartNotInvolutive, "bracket of vertical generators " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " leaves C");
    }

  const EMatrix& th = C.annihilator_matrix();
  F.Khh_.assign(n * n, EVector(th.rows()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      EVector k = th * lie_bracket(F.horiz_[i], F.horiz_[j]).components();
      F.Khh_[i * n + j] = k;
      for (auto& e : k) e = -e;
      F.Khh_[j * n + i] = k;
    }
  F.Khv_.clear();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < F.vert_.size(); ++a) F.Khv_.push_back(th * lie_bracket(F.horiz_[i], F.vert_[a]).components());
  return F;
}

// ---------------------------------------------------------------- curvature and symbol

/// The curvature at a point in a given frame of C: blocks[a][b] = [f_a, f_b] mod C.
struct CurvatureAtPoint {
  Point point;
  QMatrix frame;  // N x rank, columns are the frame vectors at the point
  std::size_t quotient_dim = 0;
  std::vector<std::vector<QVector>> blocks;

  /// curvature(X, Y) for X, Y in C at the point.
  QVector apply(const QVector& X, const QVector& Y) const {
    auto cx = solve_affine(frame, X), cy = solve_affine(frame, Y);
    if (cx.empty() || cy.empty()) fail(ErrorKind::InvalidInput, "curvature arguments must lie in C");
    QVector out(quotient_dim);
    for (std::size_t a = 0; a < blocks.size(); ++a)
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        Rational w = (*cx.point)[a] * (*cy.point)[b];
        if (sgn(w) == 0) continue;
        for (std::size_t k = 0; k < quotient_dim; ++k) out[k] += w * blocks[a][b][k];
      }
    return out;
  }
};

/// Curvature computed from an arbitrary frame of C (used to confirm frame independence).
inline CurvatureAtPoint curvature_in_frame(const PfaffianFibration& F, const std::vector<VectorField>& frame, const Point& p) {
  F.check_point(p);
  CurvatureAtPoint c;
  c.point = p;
  c.quotient_dim = F.quotient_dim();
  c.frame = QMatrix(F.N(), frame.size());
  for (std::size_t a = 0; a < frame.size(); ++a) {
    auto v = frame[a].at(p);
    for (std::size_t i = 0; i < F.N(); ++i) c.frame(i, a) = v[i];
  }
  if (rank(c.frame) != F.rank()) fail(ErrorKind::SingularPoint, "frame does not span C here");
  QMatrix th = evaluate(F.theta(), p);
  c.blocks.assign(frame.size(), std::vector<QVector>(frame.size(), QVector(c.quotient_dim)));
  for (std::size_t a = 0; a < frame.size(); ++a)
    for (std::size_t b = a + 1; b < frame.size(); ++b) {
      QVector k = th * lie_bracket(frame[a], frame[b]).at(p);
      c.blocks[a][b] = k;
      for (auto& e : k) e = -e;
      c.blocks[b][a] = k;
    }
  return c;
}

inline CurvatureAtPoint curvature_at(const PfaffianFibration& F, const Point& p) {
  F.check_point(p);
  const std::size_t n = F.n(), r = F.vertical_rank(), W = F.quotient_dim();
  CurvatureAtPoint c;
  c.point = p;
  c.quotient_dim = W;
  auto fr = F.frame();
  c.frame = QMatrix(F.N(), fr.size());
  for (std::size_t a = 0; a < fr.size(); ++a) {
    auto v = fr[a].at(p);
    for (std::size_t i = 0; i < F.N(); ++i) c.frame(i, a) = v[i];
  }
  c.blocks.assign(n + r, std::vector<QVector>(n + r, QVector(W)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) c.blocks[i][j] = evaluate(F.curvature_hh(i, j), p.coords);
    for (std::size_t a = 0; a < r; ++a) {
      QVector k = evaluate(F.curvature_hv(i, a), p.coords);
      c.blocks[i][n + a] = k;
      for (auto& e : k) e = -e;
      c.blocks[n + a][i] = k;
    }
  }
  return c;
}

/// Symbol at p: g = C^pi_p with basis v_a, V = T X with basis d/dx_i, W = TP/C in quotient coordinates.
inline TableauMap tableau_map_at(const PfaffianFibration& F, const Point& p) {
  F.check_point(p);
  const std::size_t n = F.n(), r = F.vertical_rank(), W = F.quotient_dim();
  TableauMap t(r, n, W);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      QVector k = evaluate(F.curvature_hv(i, a), p.coords);
      for (std::size_t w = 0; w < W; ++w) t.images[a](w, i) = -k[w];
    }
  return t;
}

// ---------------------------------------------------------------- prolongation fibers

enum class FiberVariant { Partial, Full };

/// Splittings h: T_{pi(p)}X -> T_pP flattened as h[i * N + k] = k-th component of h(d/dx_i).
struct ProlongationFiber {
  Point point;
  FiberVariant variant = FiberVariant::Full;
  AffineSubspace<Rational> space;
  bool empty() const { return space.empty(); }
};

namespace detail {

/// Curvature equations in the vertical coefficients c[(i, a)] = coefficient of v_a in h(d/dx_i) - h_i.
/// Rows are indexed by (pair i<j, w).
template <class T>
struct CurvatureSystem {
  Matrix<T> A;
  Vector<T> b;
};

template <class T, class Get>
CurvatureSystem<T> curvature_system(std::size_t n, std::size_t r, std::size_t W, Get K) {
  // K(i, j) -> curvature(h_i, h_j) (i != j), K(i, n + a) -> curvature(h_i, v_a)
  std::size_t pairs = n * (n - (n ? 1 : 0)) / 2;
  CurvatureSystem<T> s{Matrix<T>(pairs * W, n * r), Vector<T>(pairs * W, T(0L))};
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++p) {
      Vector<T> hh = K(i, j);
      for (std::size_t w = 0; w < W; ++w) s.b[p * W + w] = -hh[w];
      for (std::size_t a = 0; a < r; ++a) {
        Vector<T> kia = K(i, n + a), kja = K(j, n + a);
        for (std::size_t w = 0; w < W; ++w) {
          s.A(p * W + w, j * r + a) += kia[w];
          s.A(p * W + w, i * r + a) -= kja[w];
        }
      }
    }
  return s;
}

/// Maps vertical coefficients to splittings: h = h0 + sum c[(i,a)] v_a (x) dx_i.
template <class T>
Vector<T> splitting_from(const std::vector<Vector<T>>& h0, const std::vector<Vector<T>>& v, const Vector<T>& c, bool affine) {
  const std::size_t n = h0.size(), N = h0.empty() ? 0 : h0[0].size(), r = v.size();
  Vector<T> out(n * N, T(0L));
  for (std::size_t i = 0; i < n; ++i) {
    if (affine)
      for (std::size_t k = 0; k < N; ++k) out[i * N + k] = h0[i][k];
    for (std::size_t a = 0; a < r; ++a) {
      if (is_zero(c[i * r + a])) continue;
      for (std::size_t k = 0; k < N; ++k)
        if (!is_zero(v[a][k])) out[i * N + k] = out[i * N + k] + c[i * r + a] * v[a][k];
    }
  }
  return out;
}

template <class T>
AffineSubspace<T> splittings_of(const std::vector<Vector<T>>& h0, const std::vector<Vector<T>>& v, const AffineSubspace<T>& c) {
  const std::size_t n = h0.size(), N = h0.empty() ? 0 : h0[0].size();
  AffineSubspace<T> out;
  out.ambient = n * N;
  out.linear = Subspace<T>(n * N);
  if (c.empty()) return out;
  out.point = splitting_from(h0, v, *c.point, true);
  std::vector<Vector<T>> lin;
  for (const auto& k : c.linear.basis()) lin.push_back(splitting_from(h0, v, k, false));
  out.linear = Subspace<T>::span(n * N, lin);
  return out;
}

}  // namespace detail

/// Partial: Tpi h = id and h lands in C. Full: additionally h^* curvature = 0.
inline ProlongationFiber prolongation_fiber_at(const PfaffianFibration& F, const Point& p, FiberVariant variant) {
  F.check_point(p);
  const std::size_t N = F.N(), n = F.n(), r = F.vertical_rank(), W = F.quotient_dim();
  ProlongationFiber out{p, variant, {}};
  if (variant == FiberVariant::Partial) {
    QMatrix J = evaluate(F.projection_jacobian(), p), th = evaluate(F.theta(), p);
    QMatrix A((n + W) * n, N * n);
    QVector b((n + W) * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t k = 0; k < N; ++k) A(i * (n + W) + row, i * N + k) = J(row, k);
        b[i * (n + W) + row] = row == i ? 1 : 0;
      }
      for (std::size_t w = 0; w < W; ++w)
        for (std::size_t k = 0; k < N; ++k) A(i * (n + W) + n + w, i * N + k) = th(w, k);
    }
    out.space = solve_affine(A, b);
    return out;
  }
  CurvatureAtPoint c = curvature_at(F, p);
  auto sys = detail::curvature_system<Rational>(n, r, W, [&](std::size_t a, std::size_t b) { return c.blocks[a][b]; });
  auto coeffs = solve_affine(sys.A, sys.b);
  std::vector<QVector> h0, v;
  for (const auto& h : F.horizontal_frame()) h0.push_back(h.at(p));
  for (const auto& x : F.vertical_frame()) v.push_back(x.at(p));
  out.space = detail::splittings_of(h0, v, coeffs);
  return out;
}

/// Splitting of T_x sigma for a section sigma of pi, in the flattened layout of ProlongationFiber.
inline QVector splitting_of_section(const SmoothMap& sigma, const Point& x) {
  QMatrix J = evaluate(sigma.jacobian(), x);
  const std::size_t N = J.rows(), n = J.cols();
  QVector h(n * N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < N; ++k) h[i * N + k] = J(k, i);
  return h;
}

// ---------------------------------------------------------------- integrability report

struct PointReport {
  Point point;
  bool fiber_empty = false;
  long fiber_dim = -1;
  long partial_dim = -1;
  std::size_t prolongation_dim = 0;  // dim of the first prolongation of the symbol
  CartanReport cartan;
};

struct IntegrabilityReport {
  std::vector<PointReport> points;
  bool one_integrable_on_samples = false;
  bool torsion_found = false;
  bool constant_fiber_dim = false;
  bool involutive_on_samples = false;
  std::size_t rejected_points = 0;
};

inline IntegrabilityReport one_integrability_report(const PfaffianFibration& F, const SamplePolicy& pol, std::size_t trials = 24) {
  IntegrabilityReport rep;
  Sampler s(pol.seed);
  while (rep.points.size() < pol.samples) {
    Point p = sample_point(F.total(), F.singular_locus(), s, pol);
    try {
      F.check_point(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularPoint) throw;
      if (++rep.rejected_points > pol.max_retries) fail(ErrorKind::SamplingExhausted, "too many singular samples");
      continue;
    }
    PointReport pr;
    pr.point = p;
    auto full = prolongation_fiber_at(F, p, FiberVariant::Full);
    auto part = prolongation_fiber_at(F, p, FiberVariant::Partial);
    pr.fiber_empty = full.empty();
    pr.fiber_dim = full.space.dim();
    pr.partial_dim = part.space.dim();
    TableauMap t = tableau_map_at(F, p);
    pr.prolongation_dim = first_prolongation(t).dim();
    pr.cartan = involutivity_test(t, trials, s.split(rep.points.size()).seed(), pol.height);
    rep.points.push_back(std::move(pr));
  }
  rep.torsion_found = false;
  rep.constant_fiber_dim = true;
  rep.involutive_on_samples = true;
  for (const auto& pr : rep.points) {
    rep.torsion_found = rep.torsion_found || pr.fiber_empty;
    rep.constant_fiber_dim = rep.constant_fiber_dim && pr.fiber_dim == rep.points.front().fiber_dim;
    rep.involutive_on_samples = rep.involutive_on_samples && pr.cartan.involutive;
  }
  rep.one_integrable_on_samples = !rep.torsion_found && rep.constant_fiber_dim;
  return rep;
}

// ---------------------------------------------------------------- explicit prolongation

/// A new fiber coordinate and the derivative it stands for: d(total coordinate) / d(base coordinate).
struct ParameterEntry {
  std::string name;
  std::size_t total_index = 0;
  std::size_t base_index = 0;
};

struct ProlongedFibration {
  PfaffianFibration fibration;
  PfaffianFibration original;
  std::vector<ParameterEntry> parameters;
  /// N x n splitting matrix h(y, w) on the prolonged chart; column i is h(d/dx_i).
  EMatrix splitting;
};

namespace detail {

inline std::string parameter_prefix(const Chart& c) {
  for (int level = 1;; ++level) {
    std::string pre = level == 1 ? "w_" : "w" + std::to_string(level) + "_";
    bool clash = false;
    for (const auto& name : c.coordinates()) clash = clash || name.rfind(pre, 0) == 0;
    if (!clash) return pre;
  }
}

}  // namespace detail

inline ProlongedFibration prolong_fibration(const PfaffianFibration& F, const SamplePolicy& pol = {}) {
  const std::size_t N = F.N(), n = F.n(), r = F.vertical_rank(), W = F.quotient_dim();
  auto sys = detail::curvature_system<Expr>(n, r, W, [&](std::size_t a, std::size_t b) -> EVector {
    if (b < n) return F.curvature_hh(a, b);
    return F.curvature_hv(a, b - n);
  });
  auto coeffs = solve_affine(sys.A, sys.b);
  if (coeffs.empty()) fail(ErrorKind::NoGlobalParametrization, "curvature equations are generically inconsistent (torsion)");

  // The generic rank must persist on samples, otherwise the parametrization is not global.
  {
    Sampler s(pol.seed);
    std::size_t generic = rank(sys.A);
    for (std::size_t k = 0; k < pol.samples; ++k) {
      Point p = sample_point(F.total(), F.singular_locus(), s, pol);
      try {
        F.check_point(p);
      } catch (const Error&) {
        continue;
      }
      auto fib = prolongation_fiber_at(F, p, FiberVariant::Full);
      if (fib.empty() || rank(evaluate(sys.A, p)) != generic)
        fail(ErrorKind::NoGlobalParametrization, "fiber rank jumps at a sampled point");
    }
  }

  std::vector<EVector> h0, v;
  for (const auto& h : F.horizontal_frame()) h0.push_back(h.components());
  for (const auto& x : F.vertical_frame()) v.push_back(x.components());
  AffineSubspace<Expr> fib = detail::splittings_of(h0, v, coeffs);

  // Canonical parameters: reduce the linear part so that parameter t equals the entry at its pivot.
  std::vector<EVector> L;
  std::vector<std::size_t> pos;
  if (fib.linear.dim() > 0) {
    auto rr = row_reduce(EMatrix::from_rows(fib.linear.basis(), N * n));
    for (std::size_t t = 0; t < rr.rank(); ++t) {
      L.push_back(rr.reduced.row(t));
      pos.push_back(rr.pivot_cols[t]);
    }
  }
  EVector part = *fib.point;
  for (std::size_t t = 0; t < L.size(); ++t) {
    Expr c = part[pos[t]];
    if (c.is_zero()) continue;
    for (std::size_t k = 0; k < part.size(); ++k) part[k] -= c * L[t][k];
  }
  std::vector<std::size_t> order(L.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pos[a] < pos[b]; });

  std::vector<std::string> names = F.total()->coordinates();
  std::string pre = detail::parameter_prefix(*F.total());
  std::vector<ParameterEntry> params;
  for (std::size_t t = 0; t < order.size(); ++t) {
    std::size_t pp = pos[order[t]];
    params.push_back({pre + std::to_string(t + 1), pp % N, pp / N});
    names.push_back(params.back().name);
  }
  ChartRef P1 = make_chart(F.total()->name() + "1", names);

  EMatrix H(N, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      Expr e = part[i * N + k];
      for (std::size_t t = 0; t < order.size(); ++t) {
        const Expr& l = L[order[t]][i * N + k];
        if (!l.is_zero()) e += l * Expr::variable(N + t);
      }
      H(k, i) = e;
    }

  // C1 = ker of dy_k - sum_i H_ki dpi_i.
  const EMatrix& J = F.projection_jacobian();
  std::vector<KForm> forms;
  for (std::size_t k = 0; k < N; ++k) {
    EVector c(P1->dim());
    c[k] = Expr(1L);
    for (std::size_t i = 0; i < n; ++i) {
      if (H(k, i).is_zero()) continue;
      for (std::size_t j = 0; j < N; ++j)
        if (!J(i, j).is_zero()) c[j] -= H(k, i) * J(i, j);
    }
    KForm w = KForm::one_form(P1, c);
    if (!w.is_zero()) forms.push_back(w);
  }
  SmoothMap pi1(P1, F.base(), F.projection().components());
  Distribution C1 = Distribution::from_annihilators(P1, forms);
  return ProlongedFibration{validate_fibration(P1, F.base(), pi1, C1, pol), F, params, H};
}

}  // namespace pfaff
