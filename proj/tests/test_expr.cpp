#include <gtest/gtest.h>

#include <random>

#include <pfaff/expr.hpp>

using namespace pfaff;

namespace {

ChartRef xyz() { return make_chart("P", {"x", "y", "z"}); }

Expr E(const char* s, const ChartRef& c) { return parse_expr(s, *c); }

// Random small polynomial generator for property tests.
Expr random_poly(std::mt19937_64& g, std::size_t vars, int terms, int maxdeg) {
  std::uniform_int_distribution<int> coef(-3, 3), deg(0, maxdeg), var(0, static_cast<int>(vars) - 1);
  Expr p;
  for (int t = 0; t < terms; ++t) {
    Expr m(static_cast<long>(coef(g)));
    int d = deg(g);
    for (int k = 0; k < d; ++k) m = m * Expr::variable(static_cast<std::size_t>(var(g)));
    p = p + m;
  }
  return p;
}

std::vector<Rational> random_point(std::mt19937_64& g, std::size_t n) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  std::vector<Rational> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(make_rational(num(g), den(g)));
  return x;
}

}  // namespace

TEST(Expr, CanonicalFormCancelsCommonFactors) {
  auto c = xyz();
  EXPECT_EQ(E("(x^2 - y^2)/(x - y)", c), E("x + y", c));
  EXPECT_EQ(E("(2*x)/2", c), E("x", c));
  EXPECT_EQ(E("(-x)/(-1)", c), E("x", c));
  EXPECT_EQ(E("(x*y + x)/(x*z + x)", c), E("(y + 1)/(z + 1)", c));
  EXPECT_EQ(to_string(E("(x^2 - 1)/(2*x + 2)", c), *c), "1/2*x - 1/2");
  EXPECT_TRUE(E("x/x - 1", c).is_zero());
}

TEST(Expr, DenominatorIsMonic) {
  auto c = xyz();
  Expr e = E("1/(3*y - 6)", c);
  EXPECT_EQ(e.den().leading().coeff, 1);
  EXPECT_EQ(to_string(e, *c), "(1/3)/(y - 2)");
}

TEST(Expr, GcdOfKnownFactorizations) {
  auto c = xyz();
  Poly a = E("(x + y)^2*(x - z)*(y^2 + 1)", c).num();
  Poly b = E("(x + y)*(x - z)^3*(z + 2)", c).num();
  EXPECT_EQ(Expr(gcd(a, b)), E("(x + y)*(x - z)", c) * Expr(gcd(a, b).leading().coeff));
  EXPECT_TRUE(gcd(E("x^2 + 1", c).num(), E("y + 1", c).num()).is_constant());
  EXPECT_EQ(Expr(gcd(E("x^3*y", c).num(), E("x*y^2 + x^2*y", c).num())), E("x*y", c));
}

TEST(Expr, GcdOfHighDegreeProducts) {
  auto c = make_chart("P", {"a", "b", "c", "e"});
  Poly shared = E("(b + 2*c + 6)^2*(a + 9/4)^3*(e + 5/3)", c).num();
  Poly f = shared * E("a^3*e - 8*b*c + 1", c).num(), g = shared * E("(a - 8)^2*(a + e + 9/2)", c).num();
  Poly d = gcd(f, g);
  EXPECT_EQ(Expr(d) / Expr(d.leading().coeff), Expr(shared) / Expr(shared.leading().coeff));
}

TEST(Expr, GcdPropertyAgainstEvaluation) {
  // gcd(f*h, g*h) is divisible by h, and both quotients are polynomials.
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 40; ++trial) {
    Expr f = random_poly(g, 3, 3, 2), k = random_poly(g, 3, 3, 2), h = random_poly(g, 3, 2, 2);
    if (f.is_zero() || k.is_zero() || h.is_zero()) continue;
    Poly d = gcd((f * h).num(), (k * h).num());
    Expr q = Expr::fraction(d, h.num());
    EXPECT_TRUE(q.is_polynomial()) << trial;
    EXPECT_TRUE(Expr::fraction((f * h).num(), d).is_polynomial());
    EXPECT_TRUE(Expr::fraction((k * h).num(), d).is_polynomial());
  }
}

TEST(Expr, FieldOperationsAgreeWithPointEvaluation) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 60; ++trial) {
    Expr a = random_poly(g, 3, 3, 2), b = random_poly(g, 3, 3, 2), c = random_poly(g, 3, 3, 2);
    if (b.is_zero() || c.is_zero()) continue;
    Expr r = a / b + c / (a + b == Expr() ? Expr(1) : a + b);
    Expr s = (a / b) * (c / b) - a;
    for (int k = 0; k < 3; ++k) {
      auto x = random_point(g, 3);
      Rational bv = evaluate(b, x), abv = evaluate(a + b, x);
      if (sgn(bv) == 0 || sgn(abv) == 0) continue;
      Rational av = evaluate(a, x), cv = evaluate(c, x);
      Rational expect_r = av / bv + cv / abv;
      Rational expect_s = (av / bv) * (cv / bv) - av;
      EXPECT_EQ(evaluate(r, x), expect_r);
      EXPECT_EQ(evaluate(s, x), expect_s);
    }
  }
}

TEST(Expr, NormalizationIsIdempotentAndOrderIndependent) {
  auto c = xyz();
  Expr a = E("x/(y + 1)", c), b = E("z/(x - 2)", c), d = E("y^2/(x*z + 1)", c);
  EXPECT_EQ((a + b) + d, a + (b + d));
  EXPECT_EQ(a * (b + d), a * b + a * d);
  EXPECT_EQ(substitute(a, std::vector<Expr>{Expr::variable(0), Expr::variable(1), Expr::variable(2)}), a);
}

TEST(Expr, PrintParseRoundTrip) {
  auto c = xyz();
  for (const char* s : {"x", "-x", "-x^2 + y", "3/4*x^2*y - x + 1", "(x + 1)/(x^2 + 1)", "-1/(y - 2)",
                        "x/y^2", "(-x)/y", "(1/2*x)/(y*z + 1)", "0", "-7/3", "(x*y)/z"}) {
    Expr e = E(s, c);
    EXPECT_EQ(E(to_string(e, *c).c_str(), c), e) << s << " -> " << to_string(e, *c);
  }
  std::mt19937_64 g(3);
  for (int t = 0; t < 50; ++t) {
    Expr a = random_poly(g, 3, 4, 3), b = random_poly(g, 3, 3, 2);
    if (b.is_zero()) continue;
    Expr e = a / b;
    EXPECT_EQ(parse_expr(to_string(e, *c), *c), e);
  }
}

TEST(Expr, ParserErrors) {
  auto c = xyz();
  try {
    E("x + * y", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("position 4"), std::string::npos);
  }
  try {
    E("x + w", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownCoordinate);
  }
  try {
    E("x/(y - y)", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroDenominator);
  }
  EXPECT_THROW(E("(x + 1", c), Error);
  EXPECT_THROW(E("x y", c), Error);
}

TEST(Expr, EvaluateRaisesAtPole) {
  auto c = xyz();
  std::vector<Rational> x{Rational(1), Rational(-1), Rational(0)};
  try {
    evaluate(E("x/(y + 1)", c), x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PoleAtPoint);
  }
  EXPECT_EQ(evaluate(E("(x^2 - y^2)/(x + y + 3)", c), x), 0);
}

TEST(Expr, DerivativeRules) {
  auto c = xyz();
  EXPECT_EQ(differentiate(E("x^3*y + 2*x", c), 0), E("3*x^2*y + 2", c));
  EXPECT_EQ(differentiate(E("1/(x + y)", c), 1), E("-1/(x + y)^2", c));
  std::mt19937_64 g(5);
  for (int t = 0; t < 30; ++t) {
    Expr a = random_poly(g, 3, 3, 3), b = random_poly(g, 3, 3, 2);
    if (b.is_zero()) continue;
    for (std::size_t v = 0; v < 3; ++v) {
      Expr lhs = differentiate(a * b, v), rhs = differentiate(a, v) * b + a * differentiate(b, v);
      EXPECT_EQ(lhs, rhs);
      Expr q = a / b;
      EXPECT_EQ(differentiate(q, v), (differentiate(a, v) * b - a * differentiate(b, v)) / (b * b));
    }
  }
}

TEST(Expr, SubstitutionComposes) {
  auto c = xyz();
  Expr f = E("x*y + z", c);
  std::vector<Expr> img{E("y + 1", c), E("x^2", c), E("1/x", c)};
  EXPECT_EQ(substitute(f, img), E("(y + 1)*x^2 + 1/x", c));
}

TEST(Chart, RejectsBadNames) {
  EXPECT_THROW(make_chart("P", {"x", "x"}), Error);
  EXPECT_THROW(make_chart("P", {"1x"}), Error);
  auto c = make_chart("P", {"x", "u_x"});
  EXPECT_EQ(c->index_of("u_x"), 1u);
}
