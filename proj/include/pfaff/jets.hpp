#pragma once

// First-jet fibrations of coordinate projections, parametrized PDEs and holonomic sections.

#include <optional>
#include <string>
#include <vector>

#include "pfaffian.hpp"

namespace pfaff {

/// J^1 q for a coordinate projection q: Q -> X, with coordinates (x^i, u^a, u^a_i).
struct JetFibration {
  PfaffianFibration fibration;
  SmoothMap q;
  std::vector<std::size_t> base_coords;  // positions of x^i in Q
  std::vector<std::size_t> dep_coords;   // positions of u^a in Q
  /// Position of u^a_i in the jet chart.
  std::size_t jet_index(std::size_t a, std::size_t i) const { return n() + m() + a * n() + i; }
  std::size_t n() const { return base_coords.size(); }
  std::size_t m() const { return dep_coords.size(); }
  const ChartRef& chart() const { return fibration.total(); }
  /// The projection J^1 q -> Q.
  SmoothMap source_projection() const {
    EVector c(q.source()->dim());
    for (std::size_t i = 0; i < n(); ++i) c[base_coords[i]] = Expr::variable(i);
    for (std::size_t a = 0; a < m(); ++a) c[dep_coords[a]] = Expr::variable(n() + a);
    return SmoothMap(chart(), q.source(), c);
  }
  /// Cartan forms du^a - u^a_i dx^i.
  std::vector<KForm> cartan_forms() const { return fibration.distribution().annihilators(); }
};

inline JetFibration build_first_jet(const SmoothMap& q, const SamplePolicy& pol = {}) {
  const Chart& Q = *q.source();
  const Chart& X = *q.target();
  std::vector<bool> used(Q.dim(), false);
  std::vector<std::size_t> base, dep;
  for (std::size_t i = 0; i < X.dim(); ++i) {
    const Expr& c = q[i];
    bool coordinate = c.is_polynomial() && c.num().size() == 1 && c.num().total_degree() == 1 &&
                      c.num().terms()[0].coeff == 1;
    if (!coordinate) fail(ErrorKind::NotAProjection, "component " + X.coordinate(i) + " is not a coordinate of " + Q.name());
    std::size_t v = c.num().variables().front();
    if (used[v]) fail(ErrorKind::NotAProjection, "coordinate " + Q.coordinate(v) + " is used twice");
    used[v] = true;
    base.push_back(v);
  }
  for (std::size_t k = 0; k < Q.dim(); ++k)
    if (!used[k]) dep.push_back(k);

  std::vector<std::string> names;
  for (auto k : base) names.push_back(Q.coordinate(k));
  for (auto k : dep) names.push_back(Q.coordinate(k));
  for (auto a : dep)
    for (auto i : base) {
      std::string nm = Q.coordinate(a) + "_" + Q.coordinate(i);
      while (std::find(names.begin(), names.end(), nm) != names.end()) nm += "_";
      names.push_back(nm);
    }
  ChartRef P = make_chart("J1" + Q.name(), names);
  const std::size_t n = base.size(), m = dep.size();
  EVector pi;
  for (std::size_t i = 0; i < n; ++i) pi.push_back(Expr::variable(i));
  std::vector<KForm> forms;
  for (std::size_t a = 0; a < m; ++a) {
    EVector c(P->dim());
    c[n + a] = Expr(1L);
    for (std::size_t i = 0; i < n; ++i) c[i] = -Expr::variable(n + m + a * n + i);
    forms.push_back(KForm::one_form(P, c));
  }
  return JetFibration{validate_fibration(P, q.target(), SmoothMap(P, q.target(), pi), Distribution::from_annihilators(P, forms), pol),
                      q, base, dep};
}

/// A PDE given by a rational parametrization E -> J^1 q, optionally with defining equations on J^1 q.
struct ParametrizedPDE {
  ChartRef chart;
  SmoothMap embedding;
  std::vector<Expr> equations;
};

inline PfaffianFibration restrict_to_pde(const JetFibration& J, const ParametrizedPDE& E, const SamplePolicy& pol = {}) {
  if (!same_chart(E.embedding.source(), E.chart) || !same_chart(E.embedding.target(), J.chart()))
    fail(ErrorKind::DimensionMismatch, "embedding must map the PDE chart into the jet chart");
  EMatrix Je = E.embedding.jacobian();
  std::size_t r = rank(Je);
  if (r != E.chart->dim())
    fail(ErrorKind::EmbeddingRankDrop, "embedding has generic rank " + std::to_string(r) + " < " + std::to_string(E.chart->dim()));
  for (const auto& f : E.equations)
    if (!substitute(f, E.embedding.components()).is_zero())
      fail(ErrorKind::InvalidInput, "parametrization does not satisfy " + to_string(f, *J.chart()));
  std::vector<KForm> forms;
  for (const auto& th : J.cartan_forms()) {
    KForm w = pullback_form(E.embedding, th);
    if (!w.is_zero()) forms.push_back(w);
  }
  SmoothMap pi = compose(J.fibration.projection(), E.embedding);
  return validate_fibration(E.chart, J.fibration.base(), pi, Distribution::from_annihilators(E.chart, forms), pol);
}

/// True iff sigma pulls back every defining form of C to zero. Throws NotASection unless pi o sigma = id.
inline bool holonomic_check(const PfaffianFibration& F, const SmoothMap& sigma) {
  if (!same_chart(sigma.source(), F.base()) || !same_chart(sigma.target(), F.total()))
    fail(ErrorKind::DimensionMismatch, "section must map the base chart to the total chart");
  SmoothMap id = compose(F.projection(), sigma);
  for (std::size_t i = 0; i < F.n(); ++i)
    if (!(id[i] == Expr::variable(i))) fail(ErrorKind::NotASection, "pi o sigma differs from the identity in component " + F.base()->coordinate(i));
  for (const auto& th : F.distribution().annihilators())
    if (!pullback_form(sigma, th).is_zero()) return false;
  return true;
}

/// The jet lift x -> (x, s(x), ds/dx) of a section given by its dependent components.
inline SmoothMap prolong_section(const JetFibration& J, const EVector& dependents) {
  if (dependents.size() != J.m()) fail(ErrorKind::DimensionMismatch, "one expression per dependent coordinate is needed");
  EVector c;
  for (std::size_t i = 0; i < J.n(); ++i) c.push_back(Expr::variable(i));
  for (const auto& s : dependents) c.push_back(s);
  for (const auto& s : dependents)
    for (std::size_t i = 0; i < J.n(); ++i) c.push_back(differentiate(s, i));
  return SmoothMap(J.fibration.base(), J.chart(), c);
}

/// Same, for a section X -> Q of q.
inline SmoothMap prolong_section(const JetFibration& J, const SmoothMap& s) {
  EVector dep;
  for (auto k : J.dep_coords) dep.push_back(s[k]);
  return prolong_section(J, dep);
}

}  // namespace pfaff
