#pragma once

// Internal and Pfaffian symmetries: classification, prolongation, jets, actions on derivations and groupoid actions.

#include <optional>
#include <string>
#include <vector>

#include "jets.hpp"
#include "relalg.hpp"

namespace pfaff {

/// A diffeomorphism P -> P with its inverse, defined off the zero sets in `domain`.
struct LocalDiffeo {
  SmoothMap map;
  std::vector<Expr> domain;

  const ChartRef& chart() const { return map.source(); }
  SmoothMap inverse() const { return map.inverse(); }
};

inline LocalDiffeo make_local_diffeo(const ChartRef& P, EVector comps, EVector inverse) {
  LocalDiffeo phi{SmoothMap(P, P, std::move(comps), std::move(inverse)), {}};
  for (const auto& c : phi.map.components())
    if (!c.den().is_constant()) detail::add_unique(phi.domain, {Expr(c.den())});
  const SmoothMap inv = phi.map.inverse();
  for (const auto& c : inv.components())
    if (!c.den().is_constant()) detail::add_unique(phi.domain, {substitute(Expr(c.den()), phi.map.components())});
  return phi;
}

inline LocalDiffeo compose(const LocalDiffeo& g, const LocalDiffeo& f) {
  LocalDiffeo out{compose(g.map, f.map), f.domain};
  for (const auto& e : g.domain) detail::add_unique(out.domain, {substitute(e, f.map.components())});
  return out;
}

struct SymmetryVerdict {
  bool internal = false;
  bool pfaffian = false;
  std::vector<std::string> witnesses;
};

namespace detail {

/// Components of theta o phi and Jpi o phi, as functions on the source.
inline EMatrix along(const EMatrix& M, const EVector& phi) {
  EMatrix out(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) out(i, j) = substitute(M(i, j), phi);
  return out;
}

}  // namespace detail

inline SymmetryVerdict classify_symmetry(const PfaffianFibration& F, const LocalDiffeo& phi) {
  if (!same_chart(phi.chart(), F.total())) fail(ErrorKind::DimensionMismatch, "diffeomorphism must act on the total chart");
  const EMatrix theta = detail::along(F.distribution().annihilator_matrix(), phi.map.components());
  const EMatrix Jpi = detail::along(F.projection_jacobian(), phi.map.components());
  const EMatrix J = phi.map.jacobian();
  SymmetryVerdict v{true, true, {}};
  for (const auto& g : F.distribution().generators()) {
    EVector image = J * g.components();
    EVector res = theta * image;
    for (const auto& x : res)
      if (!x.is_zero()) {
        v.internal = v.pfaffian = false;
        v.witnesses.push_back("image of " + to_string(g) + " leaves C");
        break;
      }
  }
  if (!v.internal) return v;
  for (const auto& g : F.vertical_frame()) {
    EVector w = Jpi * (J * g.components());
    for (const auto& x : w)
      if (!x.is_zero()) {
        v.pfaffian = false;
        v.witnesses.push_back("image of " + to_string(g) + " leaves C^pi");
        break;
      }
  }
  return v;
}

// ---------------------------------------------------------------- jets of diffeomorphisms

/// A 1- or 2-jet of a diffeomorphism at `source`; second[m](k, l) = d^2 phi_m / dx_k dx_l.
struct JetElement {
  unsigned order = 1;
  Point source, target;
  QMatrix first;
  std::vector<QMatrix> second;
};

inline JetElement jet_of(const LocalDiffeo& phi, const Point& x, unsigned order) {
  const auto& c = phi.map.components();
  const std::size_t N = c.size();
  JetElement j{order, x, phi.map(x), evaluate(phi.map.jacobian(), x), {}};
  if (order == 2)
    for (std::size_t m = 0; m < N; ++m) {
      QMatrix S(N, N);
      for (std::size_t k = 0; k < N; ++k) {
        Expr dk = differentiate(c[m], k);
        for (std::size_t l = 0; l < N; ++l) S(k, l) = evaluate(differentiate(dk, l), x);
      }
      j.second.push_back(std::move(S));
    }
  return j;
}

namespace detail {

inline void check_jet(const JetElement& j, std::size_t N) {
  if (j.first.rows() != N || j.first.cols() != N) fail(ErrorKind::DimensionMismatch, "jet has the wrong size");
  if (determinant(j.first) == 0) fail(ErrorKind::InvalidInput, "first derivative of the jet is singular");
  if (j.order == 2) {
    if (j.second.size() != N) fail(ErrorKind::DimensionMismatch, "second-order part has the wrong size");
    for (const auto& S : j.second)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < k; ++l)
          if (S(k, l) != S(l, k)) fail(ErrorKind::InvalidInput, "second-order part is not symmetric");
  }
}

}  // namespace detail

inline SymmetryVerdict jet_membership(const PfaffianFibration& F, const JetElement& j) {
  F.check_point(j.source);
  F.check_point(j.target);
  detail::check_jet(j, F.N());
  const QMatrix theta = evaluate(F.distribution().annihilator_matrix(), j.target);
  const QMatrix Jpi = evaluate(F.projection_jacobian(), j.target);
  SymmetryVerdict v{true, true, {}};
  for (const auto& g : F.distribution().generators()) {
    QVector image = j.first * g.at(j.source);
    if (!is_zero_vector(theta * image)) {
      v.internal = v.pfaffian = false;
      v.witnesses.push_back("image of " + to_string(g) + " leaves C");
      return v;
    }
  }
  for (const auto& g : F.vertical_frame())
    if (!is_zero_vector(Jpi * (j.first * g.at(j.source)))) {
      v.pfaffian = false;
      v.witnesses.push_back("image of " + to_string(g) + " leaves C^pi");
      return v;
    }
  return v;
}

// ---------------------------------------------------------------- prolongation

namespace detail {

/// phi^(1)(y, w): push the splitting H(y, w) by T phi and renormalize against T pi.
inline EVector prolonged_components(const ProlongedFibration& pr, const SmoothMap& phi, std::vector<Expr>* domain) {
  const auto& F = pr.original;
  const std::size_t N = F.N(), n = F.n();
  const EMatrix J = phi.jacobian();
  const EMatrix M = J * pr.splitting;
  const EMatrix K = along(F.projection_jacobian(), phi.components()) * M;
  Expr det = determinant(K);
  if (det.is_zero()) fail(ErrorKind::NotInternal, "pushed splitting does not project onto the base");
  if (domain && !det.is_constant()) add_unique(*domain, {det});
  const EMatrix H = M * inverse(K);
  EVector out(phi.components().begin(), phi.components().end());
  for (const auto& t : pr.parameters) out.push_back(H(t.total_index, t.base_index));
  // The image must be the splitting at the image point.
  std::vector<Expr> images = out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < N; ++k)
      if (!(substitute(pr.splitting(k, i), images) == H(k, i)))
        fail(ErrorKind::NotInternal, "pushed splitting leaves the prolongation");
  return out;
}

}  // namespace detail

inline LocalDiffeo prolong_symmetry(const ProlongedFibration& pr, const LocalDiffeo& phi) {
  if (!classify_symmetry(pr.original, phi).internal) fail(ErrorKind::NotInternal, "map does not preserve C");
  const auto& P1 = pr.fibration.total();
  // Expressions on P are expressions on P1, whose first coordinates are those of P.
  std::vector<Expr> domain = phi.domain;
  EVector forward = detail::prolonged_components(pr, phi.map, &domain);
  EVector backward = detail::prolonged_components(pr, phi.map.inverse(), nullptr);
  return LocalDiffeo{SmoothMap(P1, P1, forward, backward), domain};
}

inline LocalDiffeo prolong_symmetry(const PfaffianFibration& F, const LocalDiffeo& phi) {
  return prolong_symmetry(prolong_fibration(F), phi);
}

struct ProlongationReport {
  LocalDiffeo prolonged;
  SymmetryVerdict verdict;
  bool covering = false;
  bool ok() const { return verdict.pfaffian && covering; }
};

inline ProlongationReport verify_symmetry_prolongation(const ProlongedFibration& pr, const LocalDiffeo& phi) {
  ProlongationReport rep{prolong_symmetry(pr, phi), {}, true};
  rep.verdict = classify_symmetry(pr.fibration, rep.prolonged);
  for (std::size_t k = 0; k < pr.original.N(); ++k)
    rep.covering = rep.covering && rep.prolonged.map[k] == phi.map[k];
  return rep;
}

inline ProlongationReport verify_symmetry_prolongation(const PfaffianFibration& F, const LocalDiffeo& phi) {
  return verify_symmetry_prolongation(prolong_fibration(F), phi);
}

// ---------------------------------------------------------------- action on derivations

struct DerivationActionReport {
  /// Induced map pi^*TX at the source to pi^*TX at the target, in the pullback frames.
  QMatrix bundle_map;
  bool symbol_preserved = false;
  bool flat_jets_preserved = false;
  bool bracket_preserved = false;
  std::vector<std::string> witnesses;
  bool invariant() const { return symbol_preserved && flat_jets_preserved && bracket_preserved; }
};

/// Transports the derivation at j.source by a 2-jet and compares with the derivation at j.target.
inline DerivationActionReport act_on_derivation_at(const RelativeAlgebroid& A, const JetElement& j) {
  const auto& F = A.fibration;
  if (j.order != 2) fail(ErrorKind::InvalidInput, "action on derivations needs a 2-jet");
  if (!jet_membership(F, j).pfaffian) fail(ErrorKind::NotInGCpi, "first-order part does not preserve C and C^pi");
  const std::size_t N = F.N(), n = F.n();
  const Point &x = j.source, &y = j.target;
  const QMatrix& T = j.first;
  const QMatrix Jy = evaluate(F.projection_jacobian(), y);
  const QMatrix theta_y = evaluate(F.distribution().annihilator_matrix(), y);
  std::vector<QVector> hx, hy;
  for (const auto& h : F.horizontal_frame()) {
    hx.push_back(h.at(x));
    hy.push_back(h.at(y));
  }
  QMatrix Hx = QMatrix::from_columns(hx, N);
  DerivationActionReport rep;
  rep.bundle_map = Jy * T * Hx;
  if (determinant(rep.bundle_map) == 0) fail(ErrorKind::NotInGCpi, "induced bundle map is singular");
  const QMatrix Psi = inverse(rep.bundle_map);

  // Symbol: T H Psi - h(y) must lie in C^pi at y.
  rep.symbol_preserved = true;
  QMatrix Hn = T * Hx * Psi;
  for (std::size_t i = 0; i < n; ++i) {
    QVector d = Hn.col(i);
    for (std::size_t k = 0; k < N; ++k) d[k] -= hy[i][k];
    if (!is_zero_vector(theta_y * d) || !is_zero_vector(Jy * d)) {
      rep.symbol_preserved = false;
      rep.witnesses.push_back("symbol of e_" + std::to_string(i + 1) + " leaves its class");
    }
  }

  // Derivative of the bundle map entries Phi(., l) along V at x, from the 2-jet.
  std::vector<QMatrix> dJ;  // dJ[s] = d Jpi / dy_s at y
  for (std::size_t s = 0; s < N; ++s) {
    EMatrix D(n, N);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < N; ++k) D(i, k) = differentiate(F.projection_jacobian()(i, k), s);
    dJ.push_back(evaluate(D, y));
  }
  auto dPhi = [&](std::size_t l, const VectorField& V) {
    QVector v = V.at(x), Tv = T * v, Th = T * hx[l];
    QVector out(n);
    for (std::size_t s = 0; s < N; ++s)
      if (Tv[s] != 0) {
        QVector t = dJ[s] * Th;
        for (std::size_t i = 0; i < n; ++i) out[i] += Tv[s] * t[i];
      }
    QVector w(N);
    for (std::size_t m = 0; m < N; ++m)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t s = 0; s < N; ++s) w[m] += j.second[m](k, s) * hx[l][k] * v[s];
    QVector Vh(N);
    for (std::size_t k = 0; k < N; ++k) Vh[k] = evaluate(V.apply(F.horizontal_frame()[l][k]), x);
    QVector Tvh = T * Vh;
    for (std::size_t m = 0; m < N; ++m) w[m] += Tvh[m];
    QVector t = Jy * w;
    for (std::size_t i = 0; i < n; ++i) out[i] += t[i];
    return out;
  };

  // Flat jets go to flat jets: the bundle map is parallel along C^pi.
  rep.flat_jets_preserved = true;
  for (const auto& v : F.vertical_frame())
    for (std::size_t l = 0; l < n; ++l)
      if (!is_zero_vector(dPhi(l, v))) {
        rep.flat_jets_preserved = false;
        rep.witnesses.push_back("image of e_" + std::to_string(l + 1) + " is not parallel along " + to_string(v));
      }

  // Bracket: Phi_* D_x Phi^* e^k against D_y e^k.
  std::vector<std::vector<QVector>> grad(n, std::vector<QVector>(n));  // grad[i][l] = h_i(Phi(., l)) at x
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) grad[i][l] = dPhi(l, F.horizontal_frame()[i]);
  std::vector<QMatrix> Dx, Dy;
  for (const auto& d : A.derivation) {
    Dx.push_back(evaluate(d, x));
    Dy.push_back(evaluate(d, y));
  }
  rep.bracket_preserved = true;
  for (std::size_t k = 0; k < n; ++k) {
    QMatrix w(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        Rational c = grad[a][b][k] - grad[b][a][k];
        for (std::size_t m = 0; m < n; ++m) c += rep.bundle_map(k, m) * Dx[m](a, b);
        w(a, b) = c;
      }
    QMatrix moved = Psi.transpose() * w * Psi;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (moved(a, b) != Dy[k](a, b)) {
          rep.bracket_preserved = false;
          rep.witnesses.push_back("structure function " + std::to_string(k + 1) + "," + std::to_string(a + 1) + std::to_string(b + 1) + " changes");
        }
  }
  return rep;
}

// ---------------------------------------------------------------- groupoid actions

/// A groupoid G over M acting on P through the moment map mu, with a distribution H on G.
struct ActionSpec {
  ChartRef groupoid, base;
  SmoothMap source, target, unit;  // s, t: G -> M, unit: M -> G
  SmoothMap moment;                // P -> M
  ChartRef pairs;                  // coordinates of G followed by those of P
  EVector action;                  // components over `pairs`
  Distribution H;
};

inline ChartRef product_chart(const ChartRef& G, const ChartRef& P) {
  std::vector<std::string> names = G->coordinates();
  for (const auto& c : P->coordinates()) {
    if (std::find(names.begin(), names.end(), c) != names.end())
      fail(ErrorKind::SpecInvalid, "coordinate " + c + " occurs in both the groupoid and the total chart");
    names.push_back(c);
  }
  return make_chart(G->name() + "x" + P->name(), names);
}

struct ActionReport {
  bool internal = false;
  bool pfaffian = false;
  std::size_t samples = 0;
  std::vector<std::string> witnesses;
};

inline ActionReport check_action(const PfaffianFibration& F, const ActionSpec& S, const SamplePolicy& pol = {}) {
  const auto& P = F.total();
  const std::size_t N = F.N(), g = S.groupoid->dim(), mdim = S.base->dim();
  if (S.action.size() != N || S.pairs->dim() != g + N) fail(ErrorKind::SpecInvalid, "action map has the wrong shape");
  // s must pick coordinates of G so that composable pairs can be sampled directly.
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < mdim; ++i) {
    const Expr& c = S.source[i];
    if (!(c.is_polynomial() && c.num().size() == 1 && c.num().total_degree() == 1 && c.num().terms()[0].coeff == 1))
      fail(ErrorKind::SpecInvalid, "source map must be a coordinate projection");
    picked.push_back(c.num().variables().front());
  }
  for (std::size_t i = 0; i < mdim; ++i)
    if (!(substitute(S.source[i], S.unit.components()) == Expr::variable(i))) fail(ErrorKind::SpecInvalid, "s o unit is not the identity");
  {
    EVector images;
    for (std::size_t i = 0; i < g; ++i) images.push_back(substitute(S.unit[i], S.moment.components()));
    for (std::size_t k = 0; k < N; ++k) images.push_back(Expr::variable(k));
    for (std::size_t k = 0; k < N; ++k)
      if (!(substitute(S.action[k], images) == Expr::variable(k))) fail(ErrorKind::SpecInvalid, "unit does not act trivially");
  }
  EMatrix Tm(N, g + N);
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t c = 0; c < g + N; ++c) Tm(k, c) = differentiate(S.action[k], c);
  const EMatrix Ts = S.source.jacobian(), Jmu = S.moment.jacobian();

  ActionReport rep{true, true, 0, {}};
  Sampler s(pol.seed);
  std::size_t tries = 0;
  while (rep.samples < pol.samples) {
    if (tries++ > pol.max_retries) fail(ErrorKind::SamplingExhausted, "no admissible composable pairs found");
    try {
      Point p = sample_point(P, F.singular_locus(), s, pol);
      F.check_point(p);
      QVector mu = evaluate(S.moment.components(), p.coords);
      Point gp{S.groupoid, QVector(g)};
      for (std::size_t i = 0; i < g; ++i) gp.coords[i] = s.rational(pol.height);
      for (std::size_t i = 0; i < mdim; ++i) gp.coords[picked[i]] = mu[i];
      QVector both = gp.coords;
      both.insert(both.end(), p.coords.begin(), p.coords.end());
      Point q{P, evaluate(S.action, both)};
      F.check_point(q);
      const QMatrix Tmq = evaluate(Tm, both), Tsq = evaluate(Ts, gp), Jmuq = evaluate(Jmu, p);
      const QMatrix Hf = S.H.rank() ? S.H.frame_at(gp) : QMatrix(g, 0);
      const QMatrix theta = evaluate(F.distribution().annihilator_matrix(), q), Jpi = evaluate(F.projection_jacobian(), q);
      std::string where = "at g = " + detail::describe(gp) + ", p = " + detail::describe(p);
      for (bool vertical : {false, true}) {
        std::vector<QVector> cols;
        if (vertical)
          for (const auto& v : F.vertical_frame()) cols.push_back(v.at(p));
        else
          for (const auto& c : F.distribution().generators()) cols.push_back(c.at(p));
        const std::size_t rh = Hf.cols(), rc = cols.size();
        QMatrix Cf = QMatrix::from_columns(cols, N);
        // Ts W = Tmu V with W = Hf a, V = Cf b.
        QMatrix lhs = Tsq * Hf, rhs = Jmuq * Cf;
        QMatrix K(mdim, rh + rc);
        for (std::size_t r = 0; r < mdim; ++r) {
          for (std::size_t c = 0; c < rh; ++c) K(r, c) = lhs(r, c);
          for (std::size_t c = 0; c < rc; ++c) K(r, rh + c) = -rhs(r, c);
        }
        for (const auto& ab : kernel_basis(K)) {
          QVector a(ab.begin(), ab.begin() + rh), b(ab.begin() + rh, ab.end());
          QVector W = Hf * a, V = Cf * b;
          QVector WV = W;
          WV.insert(WV.end(), V.begin(), V.end());
          QVector out = Tmq * WV;
          bool ok = is_zero_vector(theta * out) && (!vertical || is_zero_vector(Jpi * out));
          if (!ok) {
            if (vertical) {
              if (rep.pfaffian) rep.witnesses.push_back("vertical pair leaves C^pi " + where);
              rep.pfaffian = false;
            } else {
              if (rep.internal) rep.witnesses.push_back("pair leaves C " + where);
              rep.internal = rep.pfaffian = false;
            }
            break;
          }
        }
      }
      ++rep.samples;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularPoint && e.kind() != ErrorKind::PoleAtPoint) throw;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- twisted identity on first jets

namespace detail {

inline QVector minus(const QVector& a, const QVector& b) {
  QVector r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

}  // namespace detail

struct IdentityReport {
  std::size_t samples = 0;
  bool all_equal = true;
  bool containment = true;
  std::vector<std::string> witnesses;
};

/// 1-jets g of fibered diffeomorphisms of Q act on J^1 q; checks the twisted Cartan-form identity at random data.
inline IdentityReport point_symmetry_identity(const SmoothMap& q, std::size_t samples, std::uint64_t seed, long height = 10) {
  JetFibration J = build_first_jet(q);
  const std::size_t n = J.n(), m = J.m(), N = n + m;
  // Coordinates: a (N), b (N), Abar (n x n), C (m x n), E (m x m), P (m x n); all in adapted order (base first).
  std::vector<std::string> names;
  auto add = [&](const std::string& pre, std::size_t r, std::size_t c) {
    std::size_t start = names.size();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) names.push_back(pre + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    return start;
  };
  const std::size_t ia = add("a", N, 1), ib = add("b", N, 1), iA = add("A", n, n), iC = add("C", m, n), iE = add("E", m, m),
                    iP = add("P", m, n);
  ChartRef G = make_chart("jets", names);
  auto var = [](std::size_t k) { return Expr::variable(k); };
  EMatrix Abar(n, n), Cm(m, n), Em(m, m), Pm(m, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Abar(i, j) = var(iA + i * n + j);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Cm(i, j) = var(iC + i * n + j);
      Pm(i, j) = var(iP + i * n + j);
    }
    for (std::size_t j = 0; j < m; ++j) Em(i, j) = var(iE + i * m + j);
  }
  const EMatrix Pnew = (Cm + Em * Pm) * inverse(Abar);
  // The action map (g, h) -> g.h in jet coordinates (b, P').
  EVector act;
  for (std::size_t k = 0; k < N; ++k) act.push_back(var(ib + k));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) act.push_back(Pnew(i, j));
  EMatrix Tm(act.size(), G->dim());
  for (std::size_t r = 0; r < act.size(); ++r)
    for (std::size_t c = 0; c < G->dim(); ++c) Tm(r, c) = differentiate(act[r], c);

  // Cartan forms of J^1 q with coordinates permuted to the adapted order, which the jet chart already uses.
  std::vector<KForm> cartan = J.cartan_forms();
  auto theta_at = [&](const QVector& jet_point, const QVector& vec) {
    // Returns the N-vector whose dependent entries are the Cartan forms on vec; base entries vanish.
    QVector out(N);
    for (std::size_t a = 0; a < m; ++a) {
      Rational s = 0;
      const KForm& w = cartan[a];
      for (const auto& [I, c] : w.terms()) s += evaluate(c, std::span<const Rational>(jet_point)) * vec[I[0]];
      out[n + a] = s;
    }
    return out;
  };

  IdentityReport rep;
  Sampler s(seed);
  std::size_t tries = 0;
  while (rep.samples < samples) {
    if (tries++ > 1000) fail(ErrorKind::SamplingExhausted, "no invertible jet data found");
    QVector pt(G->dim()), tv(G->dim());
    for (auto& x : pt) x = s.rational(height);
    QMatrix Aq = evaluate(Abar, pt), Eq = evaluate(Em, pt);
    if (determinant(Aq) == 0 || determinant(Eq) == 0) continue;
    for (auto& x : tv) x = s.rational(height);
    QMatrix A(N, N), Cq = evaluate(Cm, pt), Pq = evaluate(Pm, pt), P1 = evaluate(Pnew, pt);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) A(i, j) = Aq(i, j);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) A(n + i, j) = Cq(i, j);
      for (std::size_t j = 0; j < m; ++j) A(n + i, n + j) = Eq(i, j);
    }
    auto H_of = [&](const QMatrix& Pp) {
      QMatrix H(N, n);
      for (std::size_t i = 0; i < n; ++i) H(i, i) = 1;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) H(n + i, j) = Pp(i, j);
      return H;
    };
    const QMatrix H = H_of(Pq), H1 = H_of(P1);
    auto slice = [&](const QVector& v, std::size_t from, std::size_t len) { return QVector(v.begin() + from, v.begin() + from + len); };
    const QMatrix Tmq = evaluate(Tm, std::span<const Rational>(pt));
    auto evaluate_sides = [&](const QVector& W) {
      QVector da = slice(W, ia, N), db = slice(W, ib, N);
      QVector dabar = slice(da, 0, n), dbbar = slice(db, 0, n);
      // Source point h in J^1 q and the tangent V = (da, dP) to it.
      QVector h = slice(pt, ia, N), dP = slice(W, iP, m * n);
      for (std::size_t k = 0; k < m * n; ++k) h.push_back(pt[iP + k]);
      QVector V = da;
      V.insert(V.end(), dP.begin(), dP.end());
      QVector image = evaluate(act, pt), dimage = Tmq * W;
      QVector omega = detail::minus(db, A * da);
      QVector lhs = detail::minus(omega, H1 * detail::minus(dbbar, Aq * dabar));
      QVector rhs = detail::minus(theta_at(image, dimage), A * theta_at(h, V));
      return std::pair{lhs, rhs};
    };
    auto [lhs, rhs] = evaluate_sides(tv);
    if (lhs != rhs) {
      rep.all_equal = false;
      rep.witnesses.push_back("identity fails at sample " + std::to_string(rep.samples));
    }
    // Containment: W in ker omega (db = A da) and V in ker theta (du = P dxbar) map into ker theta.
    QVector W = tv;
    for (std::size_t a = 0; a < m; ++a) {
      Rational u = 0;
      for (std::size_t i = 0; i < n; ++i) u += Pq(a, i) * W[ia + i];
      W[ia + n + a] = u;
    }
    QVector db = A * slice(W, ia, N);
    for (std::size_t k = 0; k < N; ++k) W[ib + k] = db[k];
    QVector image = evaluate(act, pt), dimage = Tmq * W;
    if (!is_zero_vector(theta_at(image, dimage))) {
      rep.containment = false;
      rep.witnesses.push_back("containment fails at sample " + std::to_string(rep.samples));
    }
    ++rep.samples;
  }
  return rep;
}

}  // namespace pfaff
