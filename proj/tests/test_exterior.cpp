#include <gtest/gtest.h>

#include <pfaff/exterior.hpp>

#include "generators.hpp"

using namespace pfaff;

namespace {

ChartRef xup() { return make_chart("P", {"x", "u", "p"}); }

}  // namespace

TEST(ExactLA, RankKernelAndSolve) {
  QMatrix m(2, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 2;
  m(1, 1) = 4;
  m(1, 2) = 6;
  EXPECT_EQ(rank(m), 1u);
  auto k = kernel_basis(m);
  ASSERT_EQ(k.size(), 2u);
  for (const auto& v : k) {
    auto z = m * v;
    EXPECT_EQ(z[0], 0);
    EXPECT_EQ(z[1], 0);
  }
  auto s = solve_affine(m, QVector{Rational(1), Rational(3)});
  EXPECT_TRUE(s.empty());
  auto t = solve_affine(m, QVector{Rational(1), Rational(2)});
  ASSERT_FALSE(t.empty());
  EXPECT_EQ(t.dim(), 2);
  EXPECT_EQ((m * *t.point)[0], 1);
}

TEST(ExactLA, SymbolicRankAndInverse) {
  auto c = xup();
  EMatrix m(2, 2);
  m(0, 0) = parse_expr("x", *c);
  m(0, 1) = parse_expr("x^2", *c);
  m(1, 0) = Expr(1L);
  m(1, 1) = parse_expr("x", *c);
  EXPECT_EQ(rank(m), 1u);
  m(1, 1) = parse_expr("u", *c);
  EXPECT_EQ(rank(m), 2u);
  EMatrix inv = inverse(m);
  EXPECT_EQ(m * inv, EMatrix::identity(2));
  EXPECT_EQ(determinant(m), parse_expr("x*u - x^2", *c));
}

TEST(ExactLA, SubspaceIntersection) {
  auto e = [](long a, long b, long c) { return QVector{Rational(a), Rational(b), Rational(c)}; };
  auto A = Subspace<Rational>::span(3, {e(1, 0, 0), e(0, 1, 0)});
  auto B = Subspace<Rational>::span(3, {e(0, 1, 0), e(0, 0, 1)});
  auto I = A.intersect(B);
  EXPECT_EQ(I.dim(), 1u);
  EXPECT_TRUE(I.contains(e(0, 5, 0)));
  auto C = Subspace<Rational>::span(3, {e(1, 1, 1)});
  EXPECT_EQ(A.intersect(C).dim(), 0u);
  EXPECT_EQ(A.intersect(A), A);
}

TEST(Sampling, DeterministicAndAvoidsZeros) {
  auto c = xup();
  std::vector<Expr> avoid{parse_expr("x", *c), parse_expr("1/(u - 1)", *c)};
  SamplePolicy pol;
  Sampler s1(42), s2(42);
  for (int k = 0; k < 20; ++k) {
    Point a = sample_point(c, avoid, s1, pol), b = sample_point(c, avoid, s2, pol);
    EXPECT_EQ(a.coords, b.coords);
    EXPECT_NE(a.coords[0], 0);
    EXPECT_NE(a.coords[1], 1);
    for (const auto& q : a.coords) {
      EXPECT_LE(abs(q.get_num()), 10);
      EXPECT_LE(q.get_den(), 10);
    }
  }
  std::vector<Expr> impossible{Expr()};
  SamplePolicy tight;
  tight.max_retries = 5;
  EXPECT_THROW(sample_point(c, impossible, s1, tight), Error);
}

TEST(Exterior, DerivativeExamples) {
  auto c = make_chart("P", {"x", "y"});
  KForm xdy = parse_expr("x", *c) * KForm::differential(c, 1);
  EXPECT_EQ(exterior_derivative(xdy), wedge(KForm::differential(c, 0), KForm::differential(c, 1)));
  EXPECT_TRUE(exterior_derivative(KForm::differential(c, 0)).is_zero());
  auto p = xup();
  KForm theta = parse_form("du - p*dx", p);
  EXPECT_EQ(to_string(exterior_derivative(theta)), "dx^dp");
}

TEST(Exterior, BracketExamples) {
  auto c = make_chart("P", {"x", "y"});
  EXPECT_TRUE(lie_bracket(VectorField::coordinate(c, 0), VectorField::coordinate(c, 1)).is_zero());
  EXPECT_EQ(lie_bracket(parse_field("x*d/dy", c), parse_field("d/dx", c)), parse_field("-d/dy", c));
  auto p = xup();
  EXPECT_EQ(lie_bracket(parse_field("d/dx + p*d/du", p), parse_field("d/dp", p)), parse_field("-d/du", p));
}

TEST(Exterior, PullbackExamples) {
  auto p = xup();
  auto X = make_chart("X", {"x"});
  KForm theta = parse_form("du - p*dx", p);
  SmoothMap hol(X, p, {parse_expr("x", *X), parse_expr("x^2", *X), parse_expr("2*x", *X)});
  EXPECT_TRUE(pullback_form(hol, theta).is_zero());
  SmoothMap bad(X, p, {parse_expr("x", *X), parse_expr("x^2", *X), parse_expr("x", *X)});
  EXPECT_EQ(pullback_form(bad, theta), parse_form("x*dx", X));
}

TEST(Exterior, FormAndFieldPrintingRoundTrips) {
  auto p = xup();
  for (const char* s : {"du - p*dx", "-x^2*dx + du", "(x + 1)*dp - 1/2*du", "dx"}) {
    KForm w = parse_form(s, p);
    EXPECT_EQ(parse_form(to_string(w), p), w) << to_string(w);
  }
  EXPECT_EQ(to_string(parse_form("du - p*dx", p)), "du - p*dx");
  VectorField X = parse_field("d/dx + p*d/du - x^2*d/dp", p);
  EXPECT_EQ(parse_field(to_string(X), p), X);
  EXPECT_THROW(parse_form("du*dx", p), Error);
  EXPECT_THROW(parse_form("du + 1", p), Error);
}

TEST(Exterior, ConvertPresentationExamples) {
  auto p = xup();
  auto C = Distribution::from_annihilators(p, {parse_form("du - p*dx", p)});
  ASSERT_EQ(C.rank(), 2u);
  EXPECT_EQ(C.generators()[0], parse_field("d/dx + p*d/du", p));
  EXPECT_EQ(C.generators()[1], parse_field("d/dp", p));
  auto c2 = make_chart("Q", {"x", "y"});
  auto D = Distribution::from_generators(c2, {VectorField::coordinate(c2, 0)});
  ASSERT_EQ(D.corank(), 1u);
  EXPECT_EQ(D.annihilators()[0], parse_form("dy", c2));
  auto full = Distribution::from_annihilators(p, {});
  EXPECT_EQ(full.rank(), 3u);
  // Double conversion keeps the pointwise spaces.
  auto back = convert_presentation(convert_presentation(C));
  Sampler s(3);
  for (int k = 0; k < 8; ++k) {
    Point x = sample_point(p, std::vector<Expr>{}, s, {});
    for (const auto& g : C.generators()) EXPECT_TRUE(back.contains_at(x, g.at(x)));
    EXPECT_EQ(back.rank(), C.rank());
  }
}

TEST(Exterior, InvolutivityExamples) {
  auto c = make_chart("P", {"x", "y", "z"});
  EXPECT_TRUE(is_involutive(Distribution::from_generators(c, {VectorField::coordinate(c, 0), VectorField::coordinate(c, 1)})));
  auto p = xup();
  auto C = Distribution::from_annihilators(p, {parse_form("du - p*dx", p)});
  EXPECT_FALSE(is_involutive(C));
  auto V = Distribution::from_annihilators(p, {parse_form("du - p*dx", p), parse_form("dx", p)});
  EXPECT_TRUE(is_involutive(V));
}

TEST(Exterior, InvolutivityAgreesWithPointwiseOracle) {
  Sampler s(99);
  auto c = make_chart("P", {"x", "y", "z", "w"});
  for (int t = 0; t < 12; ++t) {
    std::vector<VectorField> gens{gen::field(s, c), gen::field(s, c)};
    auto D = Distribution::from_generators(c, gens);
    if (D.rank() < 2) continue;
    bool symbolic = is_involutive(D);
    // Oracle: at sampled points the bracket lies in the span of the generator values.
    bool pointwise = true;
    Sampler ps(t);
    std::vector<Expr> avoid = D.singular_locus();
    for (int k = 0; k < 8; ++k) {
      Point x = sample_point(c, avoid, ps, {});
      QMatrix F = D.frame_at(x);
      auto br = lie_bracket(D.generators()[0], D.generators()[1]).at(x);
      auto span = Subspace<Rational>::span(4, {F.col(0), F.col(1)});
      pointwise = pointwise && span.contains(br);
    }
    EXPECT_EQ(symbolic, pointwise) << t;
  }
}

TEST(Exterior, EvaluateFormAtPoint) {
  auto c = make_chart("P", {"x", "y"});
  KForm w = parse_form("x*dy", c);
  auto t = evaluate_form_at(w, Point{c, {Rational(2), Rational(5)}});
  ASSERT_EQ(t.entries.size(), 1u);
  EXPECT_EQ(t.entries.at(IndexTuple{1}), 2);
  KForm a = wedge(KForm::differential(c, 0), KForm::differential(c, 1));
  auto at = evaluate_form_at(a, Point{c, {Rational(7), Rational(-1)}});
  EXPECT_EQ(at.apply({QVector{Rational(1), Rational(0)}, QVector{Rational(0), Rational(1)}}), 1);
  EXPECT_EQ(at.apply({QVector{Rational(0), Rational(1)}, QVector{Rational(1), Rational(0)}}), -1);
}

TEST(Exterior, PullbackEvaluationCommutesWithContraction) {
  Sampler s(17);
  auto X = make_chart("X", {"s", "t"});
  auto P = xup();
  for (int k = 0; k < 20; ++k) {
    SmoothMap f = gen::map(s, X, P);
    KForm w = gen::form(s, P, 1);
    KForm pw = pullback_form(f, w);
    Point x = sample_point(X, std::vector<Expr>{}, s, {});
    Point fx = f(x);
    bool pole = false;
    for (const auto& [I, c] : w.terms()) pole = pole || sgn(c.den().evaluate(fx.coords)) == 0;
    if (pole) continue;
    QMatrix J = evaluate(f.jacobian(), x);
    for (std::size_t j = 0; j < 2; ++j) {
      QVector e(2);
      e[j] = 1;
      EXPECT_EQ(evaluate_form_at(pw, x).apply({e}), evaluate_form_at(w, fx).apply({J * e}));
    }
  }
}

TEST(Exterior, SmoothMapInverseIsChecked) {
  auto P = xup();
  EVector fwd{parse_expr("x", *P), parse_expr("u + x", *P), parse_expr("p + 1", *P)};
  EVector inv{parse_expr("x", *P), parse_expr("u - x", *P), parse_expr("p - 1", *P)};
  EXPECT_NO_THROW(SmoothMap(P, P, fwd, inv));
  EVector wrong{parse_expr("x", *P), parse_expr("u + x", *P), parse_expr("p - 1", *P)};
  EXPECT_THROW(SmoothMap(P, P, fwd, wrong), Error);
}

TEST(Exterior, DerivativeFormulaOnLargeDenominators) {
  // Summing the terms produces denominators of degree 6 in a over four variables.
  auto P = make_chart("P", {"a", "b", "c", "e"});
  KForm w = parse_form("((-3/4*a*e + 3/4*c*e - 3/4)/(a + 9/4))*da + ((1/2*a*c - 1/2*a*e + 2*c*e - 3*a - 1/2*b + 9*c - 3*e - 27/2)/(a + e + 9/2))*de", P);
  VectorField X = parse_field("((3*a*b - 2*b*e)/(a - 8))*d/da + ((-1/3*a*c + 1/3*a)/(e + 5/3))*d/db + (e^2 + 3)*d/dc + (3*c*e + c - 3)*d/de", P);
  VectorField Y = parse_field("(-2*a*c - 2*c + 2)*d/da + (2/(b + 2*c + 6))*d/de", P);
  Expr rhs = X.apply(contract(w, {Y})) - Y.apply(contract(w, {X})) - contract(w, {lie_bracket(X, Y)});
  EXPECT_EQ(contract(exterior_derivative(w), {X, Y}), rhs);
}
