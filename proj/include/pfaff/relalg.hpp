#pragma once

// The relative algebroid (pi^*TX, flat partial connection, derivation) underlying a Pfaffian fibration.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfaffian.hpp"

namespace pfaff {

/// A section of Lambda^k B^* in a frame of B: coefficients on increasing index tuples.
struct BForm {
  std::size_t degree = 0;
  std::map<IndexTuple, Expr> coeffs;

  const Expr& at(const IndexTuple& I) const {
    static const Expr zero;
    auto it = coeffs.find(I);
    return it == coeffs.end() ? zero : it->second;
  }
  void add(const IndexTuple& I, const Expr& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = coeffs.emplace(I, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) coeffs.erase(it);
    }
  }
  bool is_zero() const { return coeffs.empty(); }
  bool operator==(const BForm&) const = default;
};

/// Structure data in the pullback frame e_i = pi^* d/dx_i of B = pi^*TX.
struct RelativeAlgebroid {
  PfaffianFibration fibration;
  /// C^pi-basic functions used to probe the derivation: the projection components followed by basic coordinates.
  std::vector<Expr> basic;
  std::vector<std::size_t> basic_coordinates;
  /// anchor[i] is a representative in C of the class I(e_i) in TP / C^pi.
  std::vector<VectorField> anchor;
  /// connection[a](i, j): component on e_i of the connection along v_a applied to e_j.
  std::vector<EMatrix> connection;
  /// vertical_structure[a][b]: coefficients of [v_a, v_b] on the vertical frame.
  std::vector<std::vector<EVector>> vertical_structure;
  /// bracket[k](i, j) = c^k_ij with [e_i, e_j] = c^k_ij e_k.
  std::vector<EMatrix> bracket;
  /// derivation[k](i, j) = coefficient of D e^k on e^i ^ e^j.
  std::vector<EMatrix> derivation;

  std::size_t n() const { return fibration.n(); }
  const ChartRef& chart() const { return fibration.total(); }
};

namespace detail {

/// I: B^* -> nu^*(C^pi) applied to a B-form given in the pullback frame.
inline KForm to_cotangent(const RelativeAlgebroid& A, const BForm& a) {
  const auto& P = A.chart();
  std::vector<KForm> dpi;
  for (std::size_t i = 0; i < A.n(); ++i) dpi.push_back(d(A.fibration.projection()[i], P));
  KForm out(P, a.degree);
  for (const auto& [I, c] : a.coeffs) {
    KForm w = KForm::function(P, c);
    for (auto i : I) w = wedge(w, dpi[i]);
    out = out + w;
  }
  return out;
}

inline void for_each_tuple(std::size_t n, std::size_t k, const std::function<void(const IndexTuple&)>& f) {
  IndexTuple I(k);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t pos, std::uint32_t start) {
    if (pos == k) {
      f(I);
      return;
    }
    for (std::uint32_t i = start; i < n; ++i) {
      I[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

/// Pi: restriction of a form on P to the anchor representatives.
inline BForm project(const RelativeAlgebroid& A, const KForm& w) {
  BForm out;
  out.degree = w.degree();
  for_each_tuple(A.n(), w.degree(), [&](const IndexTuple& I) {
    std::vector<VectorField> X;
    for (auto i : I) X.push_back(A.anchor[i]);
    out.add(I, contract(w, X));
  });
  return out;
}

inline EMatrix frame_coords(const PfaffianFibration& F, const VectorField& Y) {
  EMatrix out(F.n(), 1);
  EVector c = F.projection_jacobian() * Y.components();
  for (std::size_t i = 0; i < F.n(); ++i) out(i, 0) = c[i];
  return out;
}

}  // namespace detail

/// D^C a = Pi(d I(a)); a must be flat for the result to be meaningful.
inline BForm apply_derivation(const RelativeAlgebroid& A, const BForm& a) {
  return detail::project(A, exterior_derivative(detail::to_cotangent(A, a)));
}

/// pi^* a for a form on the base, in the pullback frame.
inline BForm pullback_to_b(const RelativeAlgebroid& A, const KForm& a) {
  BForm out;
  out.degree = a.degree();
  for (const auto& [I, c] : a.terms()) out.add(I, substitute(c, A.fibration.projection().components()));
  return out;
}

inline BForm wedge(const BForm& a, const BForm& b) {
  BForm out;
  out.degree = a.degree + b.degree;
  for (const auto& [I, x] : a.coeffs)
    for (const auto& [J, y] : b.coeffs) {
      IndexTuple K;
      int s = detail::merge_sign(I, J, K);
      if (s != 0) out.add(K, Expr(static_cast<long>(s)) * x * y);
    }
  return out;
}

inline RelativeAlgebroid extract_algebroid(const PfaffianFibration& F) {
  RelativeAlgebroid A{F, {}, {}, F.horizontal_frame(), {}, {}, {}, {}};
  const std::size_t N = F.N(), n = F.n(), r = F.vertical_rank();
  for (std::size_t i = 0; i < n; ++i) A.basic.push_back(F.projection()[i]);
  for (std::size_t k = 0; k < N; ++k) {
    bool basic = true;
    for (const auto& v : F.vertical_frame()) basic = basic && v[k].is_zero();
    if (basic) {
      A.basic.push_back(Expr::variable(k));
      A.basic_coordinates.push_back(k);
    }
  }
  {
    EMatrix Jb(A.basic.size(), N);
    for (std::size_t b = 0; b < A.basic.size(); ++b)
      for (std::size_t k = 0; k < N; ++k) Jb(b, k) = differentiate(A.basic[b], k);
    if (rank(Jb) != N - r)
      fail(ErrorKind::InvalidInput, "the vertical part needs " + std::to_string(N - r) + " independent coordinate first integrals");
  }
  EMatrix Vm(N, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t k = 0; k < N; ++k) Vm(k, a) = F.vertical_frame()[a][k];

  for (std::size_t a = 0; a < r; ++a) {
    EMatrix G(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      EMatrix c = detail::frame_coords(F, lie_bracket(F.vertical_frame()[a], A.anchor[j]));
      for (std::size_t i = 0; i < n; ++i) G(i, j) = c(i, 0);
    }
    A.connection.push_back(G);
  }
  A.vertical_structure.assign(r, std::vector<EVector>(r, EVector(r)));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      if (a == b) continue;
      auto s = solve_affine(Vm, lie_bracket(F.vertical_frame()[a], F.vertical_frame()[b]).components());
      if (s.empty()) fail(ErrorKind::VerticalPartNotInvolutive, "vertical bracket leaves C^pi");
      A.vertical_structure[a][b] = *s.point;
    }
  A.bracket.assign(n, EMatrix(n, n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      EMatrix c = detail::frame_coords(F, lie_bracket(A.anchor[i], A.anchor[j]));
      for (std::size_t k = 0; k < n; ++k) A.bracket[k](i, j) = c(k, 0);
    }
  A.derivation.assign(n, EMatrix(n, n));
  for (std::size_t k = 0; k < n; ++k) {
    BForm ek;
    ek.degree = 1;
    ek.add({static_cast<std::uint32_t>(k)}, Expr(1L));
    BForm dk = apply_derivation(A, ek);
    for (const auto& [I, c] : dk.coeffs) {
      A.derivation[k](I[0], I[1]) = c;
      A.derivation[k](I[1], I[0]) = -c;
    }
  }
  return A;
}

// ---------------------------------------------------------------- frames

/// Connection, bracket and derivation coefficients in the frame b_j = sum_i M(i, j) e_i.
struct FrameData {
  EMatrix frame, inverse;
  std::vector<EMatrix> connection;
  std::vector<EMatrix> bracket;     // bracket[k](i, j) on b_k
  std::vector<EMatrix> derivation;  // coefficient of D b^k on b^i ^ b^j
};

inline FrameData in_frame(const RelativeAlgebroid& A, const EMatrix& M) {
  const std::size_t n = A.n();
  FrameData out{M, inverse(M), {}, {}, {}};
  const auto& V = A.fibration.vertical_frame();
  for (std::size_t a = 0; a < V.size(); ++a) {
    EMatrix dM(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dM(i, j) = V[a].apply(M(i, j));
    out.connection.push_back(out.inverse * (A.connection[a] * M + dM));
  }
  // Anchors of the new frame and their brackets, projected with T pi and written in the new frame.
  std::vector<VectorField> rho;
  for (std::size_t j = 0; j < n; ++j) {
    VectorField X = VectorField::zero(A.chart());
    for (std::size_t i = 0; i < n; ++i) X = X + M(i, j) * A.anchor[i];
    rho.push_back(X);
  }
  out.bracket.assign(n, EMatrix(n, n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      EMatrix c = out.inverse * detail::frame_coords(A.fibration, lie_bracket(rho[i], rho[j]));
      for (std::size_t k = 0; k < n; ++k) out.bracket[k](i, j) = c(k, 0);
    }
  out.derivation.assign(n, EMatrix(n, n));
  for (std::size_t k = 0; k < n; ++k) {
    BForm bk;
    bk.degree = 1;
    for (std::size_t l = 0; l < n; ++l) bk.add({static_cast<std::uint32_t>(l)}, out.inverse(k, l));
    KForm w = exterior_derivative(detail::to_cotangent(A, bk));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) out.derivation[k](i, j) = contract(w, {rho[i], rho[j]});
  }
  return out;
}

/// Curvature of a C^pi-connection given by matrices along the vertical frame; zero iff flat.
inline std::vector<EMatrix> connection_curvature(const RelativeAlgebroid& A, const std::vector<EMatrix>& G) {
  const auto& V = A.fibration.vertical_frame();
  const std::size_t n = A.n();
  std::vector<EMatrix> out;
  for (std::size_t a = 0; a < V.size(); ++a)
    for (std::size_t b = a + 1; b < V.size(); ++b) {
      EMatrix R = G[a] * G[b] - G[b] * G[a];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) R(i, j) += V[a].apply(G[b](i, j)) - V[b].apply(G[a](i, j));
      for (std::size_t c = 0; c < V.size(); ++c) {
        const Expr& s = A.vertical_structure[a][b][c];
        if (!s.is_zero())
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) R(i, j) -= s * G[c](i, j);
      }
      out.push_back(R);
    }
  return out;
}

// ---------------------------------------------------------------- structure checks

struct StructureReport {
  bool flat = false;
  bool leibniz = false;
  bool anchor = false;
  bool pushforward = false;
  bool duality = false;
  std::size_t points = 0;
  bool ok() const { return flat && leibniz && anchor && pushforward && duality; }
};

namespace detail {

inline std::string describe(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    if (i) s += ", ";
    s += p.chart->coordinate(i) + "=" + to_string(p.coords[i]);
  }
  return s + ")";
}

[[noreturn]] inline void violation(const std::string& check, const Point& p) {
  fail(ErrorKind::StructureViolation, check + " fails at " + describe(p));
}

/// A random polynomial in the basic functions, hence itself basic.
inline Expr random_basic(const RelativeAlgebroid& A, Sampler& s) {
  Poly q;
  const std::size_t nb = A.basic.size();
  for (int t = 0; t < 3; ++t) {
    Poly m(s.uniform(-3, 3));
    for (int e = 0; e < 2; ++e)
      if (s.uniform(0, 1)) m = m * Poly::variable(s.uniform(0, static_cast<long>(nb) - 1));
    q = q + m;
  }
  return substitute(Expr(q), A.basic);
}

inline KForm random_base_form(const ChartRef& X, std::size_t degree, Sampler& s) {
  KForm w(X, degree);
  for_each_tuple(X->dim(), degree, [&](const IndexTuple& I) {
    Poly c(s.uniform(-2, 2));
    for (std::size_t k = 0; k < X->dim(); ++k)
      if (s.uniform(0, 1)) c = c + Poly(s.uniform(-2, 2)) * Poly::variable(k);
    w.add(I, Expr(c));
  });
  return w;
}

}  // namespace detail

/// Throws StructureViolation naming the failed check and a witness point.
inline StructureReport check_structure(const RelativeAlgebroid& A, const SamplePolicy& pol = {}) {
  StructureReport rep;
  const auto& F = A.fibration;
  Sampler s(pol.seed);
  std::vector<Point> pts;
  while (pts.size() < pol.samples) {
    Point p = sample_point(F.total(), F.singular_locus(), s, pol);
    try {
      F.check_point(p);
      pts.push_back(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularPoint) throw;
    }
  }
  rep.points = pts.size();

  // (a) flatness of the partial connection
  for (const auto& R : connection_curvature(A, A.connection)) {
    if (R.is_zero_matrix()) continue;
    for (const auto& p : pts)
      if (!evaluate(R, p).is_zero_matrix()) detail::violation("flatness", p);
    detail::violation("flatness", pts.front());
  }
  rep.flat = true;

  // (b) Leibniz rule D(f pi^*a) = Df ^ pi^*a + f pi^*(da) at sampled points
  const auto& X = F.base();
  for (const auto& p : pts) {
    Expr f = detail::random_basic(A, s);
    KForm a = detail::random_base_form(X, 1, s);
    BForm pa = pullback_to_b(A, a);
    BForm fa = pa;
    for (auto& [I, c] : fa.coeffs) c = f * c;
    BForm lhs = apply_derivation(A, fa);
    BForm df = apply_derivation(A, BForm{0, {{IndexTuple{}, f}}});
    BForm rhs = wedge(df, pa);
    for (const auto& [I, c] : pullback_to_b(A, exterior_derivative(a)).coeffs) rhs.add(I, f * c);
    bool ok = true;
    detail::for_each_tuple(A.n(), 2, [&](const IndexTuple& I) { ok = ok && evaluate(lhs.at(I), p) == evaluate(rhs.at(I), p); });
    if (!ok) detail::violation("leibniz", p);
  }
  rep.leibniz = true;

  // (c) anchor equation <Df, e_i> = <df, rho(e_i)> with a shifted representative of rho(e_i)
  for (int t = 0; t < 5; ++t) {
    Expr f = detail::random_basic(A, s);
    BForm df = apply_derivation(A, BForm{0, {{IndexTuple{}, f}}});
    const Point& p = pts[t % pts.size()];
    for (std::size_t i = 0; i < A.n(); ++i) {
      VectorField rep_i = A.anchor[i];
      for (const auto& v : F.vertical_frame()) rep_i = rep_i + Expr(s.rational(pol.height)) * v;
      if (evaluate(df.at({static_cast<std::uint32_t>(i)}), p) != evaluate(rep_i.apply(f), p)) detail::violation("anchor", p);
    }
  }
  rep.anchor = true;

  // (d) pi_* D = pi^* d on pulled-back forms, exactly
  for (std::size_t k = 0; k <= std::min<std::size_t>(A.n(), 2); ++k) {
    KForm a = detail::random_base_form(X, k, s);
    if (!(apply_derivation(A, pullback_to_b(A, a)) == pullback_to_b(A, exterior_derivative(a)))) detail::violation("pushforward", pts.front());
  }
  rep.pushforward = true;

  // duality between bracket and derivation: <D e^k, e_i ^ e_j> = -c^k_ij
  for (std::size_t k = 0; k < A.n(); ++k)
    if (!(A.derivation[k] + A.bracket[k]).is_zero_matrix()) detail::violation("duality", pts.front());
  rep.duality = true;
  return rep;
}

// ---------------------------------------------------------------- pointwise completions

/// Pointwise derivations extending D^C at a point: symbol H (flattened like splittings) and D e^k.
struct CompletionFiber {
  Point point;
  FiberVariant variant = FiberVariant::Full;
  AffineSubspace<Rational> space;   // unknowns: H[i * N + k], then beta^k_ij for i<j
  AffineSubspace<Rational> symbol;  // projection to the symbol H
  bool empty() const { return space.empty(); }
};

inline CompletionFiber completion_fiber_at(const RelativeAlgebroid& A, const Point& p, FiberVariant variant = FiberVariant::Full) {
  const auto& F = A.fibration;
  F.check_point(p);
  const std::size_t N = F.N(), n = F.n(), pairs = n * (n - 1) / 2;
  const std::size_t nh = n * N, unknowns = nh + n * pairs;
  std::vector<QVector> rows;
  QVector rhs;
  auto pair_index = [&](std::size_t i, std::size_t j) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < i; ++a) idx += n - 1 - a;
    return idx + (j - i - 1);
  };
  auto grad = [&](const Expr& g) {
    QVector out(N);
    for (std::size_t k = 0; k < N; ++k) out[k] = evaluate(differentiate(g, k), p);
    return out;
  };
  // Agreement with D^C on basic functions.
  std::vector<std::vector<Expr>> Df;  // Df[b][i] = <D f_b, e_i>
  for (const auto& f : A.basic) {
    BForm df = apply_derivation(A, BForm{0, {{IndexTuple{}, f}}});
    std::vector<Expr> row;
    for (std::size_t i = 0; i < n; ++i) row.push_back(df.at({static_cast<std::uint32_t>(i)}));
    Df.push_back(row);
    QVector g = grad(f);
    for (std::size_t i = 0; i < n; ++i) {
      QVector r(unknowns);
      for (std::size_t k = 0; k < N; ++k) r[i * N + k] = g[k];
      rows.push_back(r);
      rhs.push_back(evaluate(row[i], p));
    }
  }
  // Agreement with D^C on the flat coframe.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        QVector r(unknowns);
        r[nh + k * pairs + pair_index(i, j)] = 1;
        rows.push_back(r);
        rhs.push_back(evaluate(A.derivation[k](i, j), p));
      }
  if (variant == FiberVariant::Full) {
    // D~(D f) = 0 on e^i ^ e^j.
    for (std::size_t b = 0; b < A.basic.size(); ++b) {
      std::vector<QVector> gk;
      for (std::size_t k = 0; k < n; ++k) gk.push_back(grad(Df[b][k]));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          QVector r(unknowns);
          for (std::size_t k = 0; k < N; ++k) {
            r[i * N + k] += gk[j][k];
            r[j * N + k] -= gk[i][k];
          }
          for (std::size_t k = 0; k < n; ++k) r[nh + k * pairs + pair_index(i, j)] += evaluate(Df[b][k], p);
          rows.push_back(r);
          rhs.push_back(0);
        }
    }
    // D~(D e^k) = 0 holds trivially once D e^k vanishes identically.
    for (const auto& d : A.derivation)
      if (!d.is_zero_matrix()) fail(ErrorKind::Internal, "derivation of the pullback coframe is expected to vanish");
  }
  CompletionFiber out{p, variant, {}, {}};
  out.space = rows.empty() ? AffineSubspace<Rational>{unknowns, QVector(unknowns), Subspace<Rational>::whole(unknowns)}
                           : solve_affine(QMatrix::from_rows(rows, unknowns), rhs);
  out.symbol.ambient = nh;
  out.symbol.linear = Subspace<Rational>(nh);
  if (!out.space.empty()) {
    out.symbol.point = QVector(out.space.point->begin(), out.space.point->begin() + nh);
    std::vector<QVector> lin;
    for (const auto& v : out.space.linear.basis()) lin.emplace_back(v.begin(), v.begin() + nh);
    out.symbol.linear = Subspace<Rational>::span(nh, lin);
  }
  return out;
}

struct CorrespondenceReport {
  long partial_dim = -1;
  long full_dim = -1;
  bool partial_equal = false;
  bool full_equal = false;
  bool ok() const { return partial_equal && full_equal; }
};

/// Compares prolongation fibers with completion fibers at p; throws CorrespondenceMismatch on disagreement.
inline CorrespondenceReport correspondence_check(const PfaffianFibration& F, const RelativeAlgebroid& A, const Point& p) {
  CorrespondenceReport rep;
  for (auto v : {FiberVariant::Partial, FiberVariant::Full}) {
    auto pf = prolongation_fiber_at(F, p, v);
    auto cf = completion_fiber_at(A, p, v);
    bool same = pf.space == cf.symbol;
    // The symbol projection must be injective on completions.
    if (!cf.empty() && cf.space.dim() != cf.symbol.dim()) same = false;
    std::string which = v == FiberVariant::Full ? "full" : "partial";
    if (!same)
      fail(ErrorKind::CorrespondenceMismatch, which + " fibers differ at " + detail::describe(p) + ": dimensions " +
                                                  std::to_string(pf.space.dim()) + " and " + std::to_string(cf.symbol.dim()));
    (v == FiberVariant::Full ? rep.full_dim : rep.partial_dim) = pf.space.dim();
    (v == FiberVariant::Full ? rep.full_equal : rep.partial_equal) = true;
  }
  return rep;
}

// ---------------------------------------------------------------- tableau of the algebroid

struct AlgebroidTableau {
  /// symbol[a] is N x n: column i represents the class of [v_a, I(e_i)] in TP / C^pi.
  std::vector<QMatrix> symbol;
  TableauMap composite;  // theta_C composed with the symbol
  bool matches = false;
};

inline AlgebroidTableau algebroid_tableau_at(const RelativeAlgebroid& A, const Point& p) {
  const auto& F = A.fibration;
  F.check_point(p);
  const std::size_t N = F.N(), n = F.n(), r = F.vertical_rank(), W = F.quotient_dim();
  const auto& V = F.vertical_frame();
  // Representatives of I(e_i) shifted along C^pi by coordinate multiples of the vertical frame.
  std::vector<VectorField> lift;
  for (std::size_t i = 0; i < n; ++i) {
    VectorField X = A.anchor[i];
    for (std::size_t b = 0; b < r; ++b) X = X + Expr::variable((i + b) % N) * V[b];
    lift.push_back(X);
  }
  AlgebroidTableau out{{}, TableauMap(r, n, W), false};
  QMatrix th = evaluate(F.theta(), p);
  for (std::size_t a = 0; a < r; ++a) {
    QMatrix S(N, n);
    for (std::size_t i = 0; i < n; ++i) {
      QVector br = lie_bracket(V[a], lift[i]).at(p);
      for (std::size_t k = 0; k < N; ++k) S(k, i) = br[k];
    }
    out.composite.images[a] = th * S;
    out.symbol.push_back(std::move(S));
  }
  TableauMap direct = tableau_map_at(F, p);
  out.matches = true;
  for (std::size_t a = 0; a < r; ++a) out.matches = out.matches && out.composite.images[a] == direct.images[a];
  return out;
}

// ---------------------------------------------------------------- realizations

struct RealizationReport {
  bool realization = false;
  std::string reason;
  std::optional<KForm> witness;  // a form on P whose intertwining identity fails
};

/// Theta: TU -> B over r: U -> P, with Theta(d/du_l) = sum_j theta(j, l) e_j.
inline RealizationReport realization_check(const RelativeAlgebroid& A, const SmoothMap& r, const EMatrix& theta) {
  const auto& F = A.fibration;
  RealizationReport rep;
  const auto& U = r.source();
  if (!same_chart(r.target(), F.total())) fail(ErrorKind::DimensionMismatch, "realization must cover a map into the total chart");
  if (theta.rows() != A.n() || theta.cols() != U->dim()) fail(ErrorKind::DimensionMismatch, "bundle map must be square of size rank B");
  if (rank(theta) != A.n()) {
    rep.reason = "not fiberwise invertible";
    return rep;
  }
  // Functions: d(f o r) = Theta^*(D f).
  for (const auto& f : A.basic) {
    BForm df = apply_derivation(A, BForm{0, {{IndexTuple{}, f}}});
    Expr fr = substitute(f, r.components());
    for (std::size_t l = 0; l < U->dim(); ++l) {
      Expr rhs;
      for (std::size_t j = 0; j < A.n(); ++j)
        rhs += theta(j, l) * substitute(df.at({static_cast<std::uint32_t>(j)}), r.components());
      if (!(differentiate(fr, l) == rhs)) {
        KForm w = d(f, F.total());
        for (std::size_t j = 0; j < A.n(); ++j) w = w - df.at({static_cast<std::uint32_t>(j)}) * d(F.projection()[j], F.total());
        rep.reason = "d(f o r) differs from Theta^*(D f) for f = " + to_string(f, *F.total());
        rep.witness = w;
        return rep;
      }
    }
  }
  // Coframe: d(Theta^* e^k) = Theta^*(D e^k).
  for (std::size_t k = 0; k < A.n(); ++k) {
    KForm tk(U, 1);
    for (std::size_t l = 0; l < U->dim(); ++l) tk.add({static_cast<std::uint32_t>(l)}, theta(k, l));
    KForm lhs = exterior_derivative(tk), rhs(U, 2);
    for (std::size_t i = 0; i < A.n(); ++i)
      for (std::size_t j = i + 1; j < A.n(); ++j) {
        KForm ti(U, 1), tj(U, 1);
        for (std::size_t l = 0; l < U->dim(); ++l) {
          ti.add({static_cast<std::uint32_t>(l)}, theta(i, l));
          tj.add({static_cast<std::uint32_t>(l)}, theta(j, l));
        }
        rhs = rhs + substitute(A.derivation[k](i, j), r.components()) * wedge(ti, tj);
      }
    if (!(lhs == rhs)) {
      rep.reason = "d(Theta^* e^k) differs from Theta^*(D e^k) for k = " + std::to_string(k + 1);
      rep.witness = d(F.projection()[k], F.total());
      return rep;
    }
  }
  rep.realization = true;
  return rep;
}

/// The realization induced by a section: Theta(X) = X in B over sigma.
inline RealizationReport realization_of_section(const RelativeAlgebroid& A, const SmoothMap& sigma) {
  return realization_check(A, sigma, EMatrix::identity(A.n()));
}

}  // namespace pfaff
