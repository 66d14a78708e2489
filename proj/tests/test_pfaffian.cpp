#include <gtest/gtest.h>

#include <pfaff/pfaffian.hpp>

#include "generators.hpp"

using namespace pfaff;

namespace {

/// ker(du - p dx) over the x-line.
PfaffianFibration contact() {
  auto P = make_chart("P", {"x", "u", "p"});
  auto X = make_chart("X", {"x"});
  return validate_fibration(P, X, SmoothMap(P, X, {Expr::variable(0)}),
                            Distribution::from_annihilators(P, {parse_form("du - p*dx", P)}));
}

/// ker(du - p dx - q dy) over the (x, y)-plane.
PfaffianFibration first_jets_plane() {
  auto P = make_chart("P", {"x", "y", "u", "p", "q"});
  auto X = make_chart("X", {"x", "y"});
  return validate_fibration(P, X, SmoothMap(P, X, {Expr::variable(0), Expr::variable(1)}),
                            Distribution::from_annihilators(P, {parse_form("du - p*dx - q*dy", P)}));
}

/// ker(du - u dx - x dy): no vertical part and curvature (1 - x) d/du.
PfaffianFibration torsion() {
  auto P = make_chart("P", {"x", "y", "u"});
  auto X = make_chart("X", {"x", "y"});
  return validate_fibration(P, X, SmoothMap(P, X, {Expr::variable(0), Expr::variable(1)}),
                            Distribution::from_annihilators(P, {parse_form("du - u*dx - x*dy", P)}));
}

Point at(const PfaffianFibration& F, std::vector<long> c) {
  Point p{F.total(), {}};
  for (long v : c) p.coords.emplace_back(v);
  return p;
}

}  // namespace

TEST(Pfaffian, ContactSystemValidates) {
  auto F = contact();
  EXPECT_EQ(F.rank(), 2u);
  EXPECT_EQ(F.vertical_rank(), 1u);
  EXPECT_EQ(F.horizontal_frame()[0], parse_field("d/dx + p*d/du", F.total()));
  EXPECT_EQ(F.vertical_frame()[0], parse_field("d/dp", F.total()));
  auto p = at(F, {1, 2, 3});
  auto fib = prolongation_fiber_at(F, p, FiberVariant::Full);
  EXPECT_EQ(fib.space.dim(), 1);
  EXPECT_EQ(prolongation_fiber_at(F, p, FiberVariant::Partial).space.dim(), 1);
  TableauMap t = tableau_map_at(F, p);
  EXPECT_EQ(t.dim_g, 1u);
  EXPECT_EQ(t.dim_v, 1u);
  EXPECT_EQ(abs(t.images[0](0, 0)), 1);
}

TEST(Pfaffian, ValidationErrors) {
  auto P = make_chart("P", {"x", "u", "p"});
  auto X = make_chart("X", {"x"});
  SmoothMap pi(P, X, {Expr::variable(0)});
  try {
    validate_fibration(P, X, pi, Distribution::from_annihilators(P, {parse_form("dx", P)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TransversalityFails);
  }
  try {
    validate_fibration(P, X, SmoothMap(P, X, {Expr(1L)}), Distribution::from_annihilators(P, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotASubmersion);
  }
  // The vertical fields d/du + p*d/dr and d/dp bracket to d/dr, outside C.
  auto Q = make_chart("Q", {"x", "u", "p", "r"});
  SmoothMap pq(Q, X, {Expr::variable(0)});
  auto C = Distribution::from_generators(Q, {parse_field("d/dx", Q), parse_field("d/du + p*d/dr", Q), parse_field("d/dp", Q)});
  try {
    validate_fibration(Q, X, pq, C);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::VerticalPartNotInvolutive);
  }
}

TEST(Pfaffian, TorsionFiberIsEmptyOffTheLine) {
  auto F = torsion();
  EXPECT_EQ(F.vertical_rank(), 0u);
  for (long x : {0L, 2L, -3L}) {
    auto p = at(F, {x, 0, 1});
    EXPECT_TRUE(prolongation_fiber_at(F, p, FiberVariant::Full).empty());
    auto partial = prolongation_fiber_at(F, p, FiberVariant::Partial);
    EXPECT_EQ(partial.space.dim(), 0);
    auto k = curvature_at(F, p);
    EXPECT_EQ(k.blocks[0][1], QVector{Rational(1 - x)});
  }
  EXPECT_EQ(prolongation_fiber_at(F, at(F, {1, 5, 2}), FiberVariant::Full).space.dim(), 0);
  try {
    prolong_fibration(F);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoGlobalParametrization);
  }
}

TEST(Pfaffian, PartialFiberMatchesFrameParametrization) {
  auto F = first_jets_plane();
  Sampler s(5);
  for (int k = 0; k < 6; ++k) {
    Point p = sample_point(F.total(), F.singular_locus(), s, {});
    auto partial = prolongation_fiber_at(F, p, FiberVariant::Partial);
    auto full = prolongation_fiber_at(F, p, FiberVariant::Full);
    EXPECT_EQ(partial.space.dim(), 4);
    EXPECT_EQ(full.space.dim(), 3);
    EXPECT_TRUE(partial.space.contains(*full.space.point));
    for (const auto& v : full.space.linear.basis()) EXPECT_TRUE(partial.space.linear.contains(v));
    EXPECT_EQ(full.space.dim(), static_cast<long>(first_prolongation(tableau_map_at(F, p)).dim()));
  }
}

TEST(Pfaffian, CurvatureIsFrameIndependent) {
  auto F = first_jets_plane();
  auto P = F.total();
  auto fr = F.frame();
  // Perturb by a nonconstant change of frame.
  std::vector<VectorField> other{fr[0] + parse_expr("u", *P) * fr[2], fr[1] + parse_expr("x^2", *P) * fr[0] - fr[3],
                                 parse_expr("q + 3", *P) * fr[2], fr[3] + fr[2]};
  Sampler s(11);
  std::vector<Expr> avoid = F.singular_locus();
  avoid.push_back(parse_expr("q + 3", *P));
  for (int k = 0; k < 5; ++k) {
    Point p = sample_point(P, avoid, s, {});
    auto a = curvature_at(F, p), b = curvature_in_frame(F, other, p);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        auto X = a.frame.col(i), Y = a.frame.col(j);
        EXPECT_EQ(a.apply(X, Y), b.apply(X, Y));
      }
  }
}

TEST(Pfaffian, HolonomicSplittingsLieInTheFiber) {
  auto F = contact();
  auto X = F.base();
  SmoothMap sigma(X, F.total(), {parse_expr("x", *X), parse_expr("x^3 - x", *X), parse_expr("3*x^2 - 1", *X)});
  for (long x : {-2L, 0L, 3L}) {
    Point px{X, {Rational(x)}};
    Point p = sigma(px);
    auto h = splitting_of_section(sigma, px);
    EXPECT_TRUE(prolongation_fiber_at(F, p, FiberVariant::Full).space.contains(h));
  }
}

TEST(Pfaffian, ContactProlongation) {
  auto pr = prolong_fibration(contact());
  const auto& G = pr.fibration;
  EXPECT_EQ(G.total()->coordinates(), (std::vector<std::string>{"x", "u", "p", "w_1"}));
  ASSERT_EQ(pr.parameters.size(), 1u);
  EXPECT_EQ(pr.parameters[0].total_index, 2u);
  EXPECT_EQ(pr.parameters[0].base_index, 0u);
  auto forms = G.distribution().annihilators();
  ASSERT_EQ(forms.size(), 2u);
  EXPECT_EQ(to_string(forms[0]), "du - p*dx");
  EXPECT_EQ(to_string(forms[1]), "dp - w_1*dx");
  // Second prolongation renames its parameters.
  auto pr2 = prolong_fibration(G);
  EXPECT_EQ(pr2.fibration.total()->coordinates().back(), "w2_1");
}

TEST(Pfaffian, FirstJetsOfThePlaneProlongation) {
  auto pr = prolong_fibration(first_jets_plane());
  EXPECT_EQ(pr.fibration.total()->dim(), 8u);
  ASSERT_EQ(pr.parameters.size(), 3u);
  // Parameters stand for p_x, q_x (= p_y) and q_y.
  EXPECT_EQ(pr.parameters[0].total_index, 3u);
  EXPECT_EQ(pr.parameters[0].base_index, 0u);
  EXPECT_EQ(pr.parameters[1].total_index, 4u);
  EXPECT_EQ(pr.parameters[1].base_index, 0u);
  EXPECT_EQ(pr.parameters[2].total_index, 4u);
  EXPECT_EQ(pr.parameters[2].base_index, 1u);
  EXPECT_EQ(pr.fibration.vertical_rank(), 3u);
  auto rep = one_integrability_report(pr.fibration, {});
  EXPECT_TRUE(rep.one_integrable_on_samples);
  EXPECT_TRUE(rep.involutive_on_samples);
}

TEST(Pfaffian, IntegrabilityReportVerdicts) {
  auto c = one_integrability_report(contact(), {});
  EXPECT_TRUE(c.one_integrable_on_samples);
  EXPECT_FALSE(c.torsion_found);
  EXPECT_EQ(c.points.size(), 8u);
  for (const auto& p : c.points) EXPECT_EQ(p.fiber_dim, 1);
  auto t = one_integrability_report(torsion(), {});
  EXPECT_TRUE(t.torsion_found);
  EXPECT_FALSE(t.one_integrable_on_samples);
}
