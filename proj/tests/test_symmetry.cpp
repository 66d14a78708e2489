#include <gtest/gtest.h>

#include <pfaff/symmetry.hpp>

using namespace pfaff;

namespace {

PfaffianFibration contact() {
  auto P = make_chart("P", {"x", "u", "p"});
  auto X = make_chart("X", {"x"});
  return validate_fibration(P, X, SmoothMap(P, X, {Expr::variable(0)}),
                            Distribution::from_annihilators(P, {parse_form("du - p*dx", P)}));
}

PfaffianFibration first_jets_plane() {
  auto P = make_chart("P", {"x", "y", "u", "p", "q"});
  auto X = make_chart("X", {"x", "y"});
  return validate_fibration(P, X, SmoothMap(P, X, {Expr::variable(0), Expr::variable(1)}),
                            Distribution::from_annihilators(P, {parse_form("du - p*dx - q*dy", P)}));
}

LocalDiffeo diffeo(const PfaffianFibration& F, std::vector<std::string> fwd, std::vector<std::string> inv) {
  const auto& P = F.total();
  EVector a, b;
  for (const auto& s : fwd) a.push_back(parse_expr(s, *P));
  for (const auto& s : inv) b.push_back(parse_expr(s, *P));
  return make_local_diffeo(P, a, b);
}

LocalDiffeo shear(const PfaffianFibration& F) { return diffeo(F, {"x", "u + x", "p + 1"}, {"x", "u - x", "p - 1"}); }
LocalDiffeo scaling(const PfaffianFibration& F) { return diffeo(F, {"2*x", "u", "p/2"}, {"x/2", "u", "2*p"}); }
LocalDiffeo hodograph(const PfaffianFibration& F) { return diffeo(F, {"u", "x", "1/p"}, {"u", "x", "1/p"}); }

Point at(const PfaffianFibration& F, std::vector<long> c) {
  Point p{F.total(), {}};
  for (long v : c) p.coords.emplace_back(v);
  return p;
}

std::vector<Point> samples(const PfaffianFibration& F, const LocalDiffeo& phi, std::size_t count, std::uint64_t seed) {
  Sampler s(seed);
  std::vector<Expr> avoid = F.singular_locus();
  avoid.insert(avoid.end(), phi.domain.begin(), phi.domain.end());
  std::vector<Point> out;
  while (out.size() < count) out.push_back(sample_point(F.total(), avoid, s, {}));
  return out;
}

}  // namespace

TEST(Symmetry, ClassifyExamples) {
  auto F = contact();
  auto v = classify_symmetry(F, shear(F));
  EXPECT_TRUE(v.internal);
  EXPECT_TRUE(v.pfaffian);
  auto bad = classify_symmetry(F, diffeo(F, {"x", "u", "p + 1"}, {"x", "u", "p - 1"}));
  EXPECT_FALSE(bad.internal);
  EXPECT_FALSE(bad.pfaffian);
  ASSERT_EQ(bad.witnesses.size(), 1u);
  EXPECT_NE(bad.witnesses[0].find("d/dx + p*d/du"), std::string::npos);
  auto id = classify_symmetry(F, diffeo(F, {"x", "u", "p"}, {"x", "u", "p"}));
  EXPECT_TRUE(id.pfaffian);
  EXPECT_TRUE(classify_symmetry(F, scaling(F)).pfaffian);
  EXPECT_TRUE(classify_symmetry(F, hodograph(F)).pfaffian);
  // Swapping u and p keeps neither C nor C^pi.
  auto swap = classify_symmetry(F, diffeo(F, {"x", "p", "u"}, {"x", "p", "u"}));
  EXPECT_FALSE(swap.internal);
}

TEST(Symmetry, InternalButNotPfaffian) {
  // The Legendre transform preserves C but tilts C^pi.
  auto F = first_jets_plane();
  auto L = diffeo(F, {"p", "q", "p*x + q*y - u", "x", "y"}, {"p", "q", "p*x + q*y - u", "x", "y"});
  auto v = classify_symmetry(F, L);
  EXPECT_TRUE(v.internal);
  EXPECT_FALSE(v.pfaffian);
  ASSERT_FALSE(v.witnesses.empty());
  EXPECT_NE(v.witnesses[0].find("C^pi"), std::string::npos);
}

TEST(Symmetry, JetMembership) {
  auto F = contact();
  auto o = at(F, {0, 0, 0});
  EXPECT_TRUE(jet_membership(F, jet_of(shear(F), o, 1)).pfaffian);
  JetElement id{1, o, o, QMatrix::identity(3), {}};
  EXPECT_TRUE(jet_membership(F, id).pfaffian);
  // Frame (d/dx + p d/du, d/dp, d/du) at the origin is (d/dx, d/dp, d/du); M keeps f1, sends f2 to f2 + f3, keeps f3.
  QMatrix fr = QMatrix::from_columns({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}, 3);
  QMatrix M = QMatrix::from_columns({{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}, 3);
  JetElement j{1, o, o, fr * M * inverse(fr), {}};
  auto v = jet_membership(F, j);
  // d/dp goes to d/dp + d/du, which leaves C = span{d/dx, d/dp} at the origin.
  EXPECT_FALSE(v.internal);
  EXPECT_FALSE(v.pfaffian);
  // Sending f2 to f2 + f1 stays in C but leaves C^pi.
  QMatrix M2 = QMatrix::from_columns({{1, 0, 0}, {1, 1, 0}, {0, 0, 1}}, 3);
  auto v2 = jet_membership(F, JetElement{1, o, o, fr * M2 * inverse(fr), {}});
  EXPECT_TRUE(v2.internal);
  EXPECT_FALSE(v2.pfaffian);
}

TEST(Symmetry, ProlongationExamples) {
  auto F = contact();
  auto pr = prolong_fibration(F);
  const auto& P1 = *pr.fibration.total();
  auto s = prolong_symmetry(pr, shear(F));
  EXPECT_EQ(s.map.components(), (EVector{parse_expr("x", P1), parse_expr("u + x", P1), parse_expr("p + 1", P1), parse_expr("w_1", P1)}));
  EXPECT_TRUE(s.domain.empty());
  auto sc = prolong_symmetry(pr, scaling(F));
  EXPECT_EQ(sc.map[3], parse_expr("w_1/4", P1));
  auto h = prolong_symmetry(pr, hodograph(F));
  EXPECT_EQ(h.map[3], parse_expr("-w_1/p^3", P1));
  EXPECT_NE(std::find(h.domain.begin(), h.domain.end(), parse_expr("p", P1)), h.domain.end());
  for (const auto& phi : {shear(F), scaling(F), hodograph(F)}) {
    auto rep = verify_symmetry_prolongation(pr, phi);
    EXPECT_TRUE(rep.ok());
    EXPECT_TRUE(rep.verdict.internal);
  }
  try {
    prolong_symmetry(pr, diffeo(F, {"x", "u", "p + 1"}, {"x", "u", "p - 1"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInternal);
  }
}

TEST(Symmetry, ProlongationIsFunctorial) {
  auto F = contact();
  auto pr = prolong_fibration(F);
  std::vector<LocalDiffeo> fs{shear(F), scaling(F), hodograph(F)};
  for (const auto& a : fs)
    for (const auto& b : fs) {
      auto lhs = prolong_symmetry(pr, compose(a, b));
      auto rhs = compose(prolong_symmetry(pr, a), prolong_symmetry(pr, b));
      EXPECT_EQ(lhs.map.components(), rhs.map.components());
    }
}

TEST(Symmetry, SecondProlongationOfPlaneJets) {
  auto F = first_jets_plane();
  auto pr = prolong_fibration(F);
  auto phi = diffeo(F, {"x + y", "y", "u", "p", "q - p"}, {"x - y", "y", "u", "p", "q + p"});
  EXPECT_TRUE(classify_symmetry(F, phi).pfaffian);
  EXPECT_TRUE(verify_symmetry_prolongation(pr, phi).ok());
}

TEST(Symmetry, ActOnDerivationInvariantForFiberedSymmetries) {
  auto F = contact();
  auto A = extract_algebroid(F);
  for (const auto& phi : {shear(F), scaling(F), diffeo(F, {"x", "u", "p"}, {"x", "u", "p"})}) {
    for (const auto& p : samples(F, phi, 5, 9)) {
      auto rep = act_on_derivation_at(A, jet_of(phi, p, 2));
      EXPECT_TRUE(rep.invariant());
    }
  }
  auto G = first_jets_plane();
  auto B = extract_algebroid(G);
  for (const auto& phi : {diffeo(G, {"x + y", "y", "u", "p", "q - p"}, {"x - y", "y", "u", "p", "q + p"}),
                          diffeo(G, {"x", "y", "u + x^2*y", "p + 2*x*y", "q + x^2"}, {"x", "y", "u - x^2*y", "p - 2*x*y", "q - x^2"})})
    for (const auto& p : samples(G, phi, 5, 4)) EXPECT_TRUE(act_on_derivation_at(B, jet_of(phi, p, 2)).invariant());
}

TEST(Symmetry, ActOnDerivationDetectsPerturbedSecondOrder) {
  auto F = contact();
  auto A = extract_algebroid(F);
  auto j = jet_of(shear(F), at(F, {0, 0, 0}), 2);
  j.second[0](0, 2) += 1;
  j.second[0](2, 0) += 1;
  auto rep = act_on_derivation_at(A, j);
  EXPECT_TRUE(rep.symbol_preserved);
  EXPECT_FALSE(rep.flat_jets_preserved);
  EXPECT_FALSE(rep.invariant());

  // Symmetric second derivatives cancel in the transported bracket, so only the mixed horizontal-vertical part is seen.
  auto G = first_jets_plane();
  auto B = extract_algebroid(G);
  auto id = diffeo(G, {"x", "y", "u", "p", "q"}, {"x", "y", "u", "p", "q"});
  auto k = jet_of(id, at(G, {1, 2, 3, 4, 5}), 2);
  k.second[0](0, 1) += 1;
  k.second[0](1, 0) += 1;
  EXPECT_TRUE(act_on_derivation_at(B, k).invariant());
  auto k2 = jet_of(id, at(G, {1, 2, 3, 4, 5}), 2);
  k2.second[1](0, 3) += 1;
  k2.second[1](3, 0) += 1;
  auto r2 = act_on_derivation_at(B, k2);
  EXPECT_TRUE(r2.bracket_preserved);
  EXPECT_FALSE(r2.flat_jets_preserved);
}

TEST(Symmetry, HodographDoesNotPreserveTheFlatConnection) {
  // The hodograph is a Pfaffian symmetry, yet its bundle map is multiplication by p, which is not parallel along d/dp.
  auto F = contact();
  auto A = extract_algebroid(F);
  auto phi = hodograph(F);
  for (const auto& p : samples(F, phi, 5, 2)) {
    auto rep = act_on_derivation_at(A, jet_of(phi, p, 2));
    EXPECT_EQ(rep.bundle_map(0, 0), p.coords[2]);
    EXPECT_TRUE(rep.symbol_preserved);
    EXPECT_TRUE(rep.bracket_preserved);
    EXPECT_FALSE(rep.flat_jets_preserved);
  }
}

TEST(Symmetry, ActOnDerivationRejectsNonPfaffianJets) {
  auto F = contact();
  auto A = extract_algebroid(F);
  auto j = jet_of(diffeo(F, {"x", "u", "p + 1"}, {"x", "u", "p - 1"}), at(F, {1, 1, 1}), 2);
  try {
    act_on_derivation_at(A, j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInGCpi);
  }
}

namespace {

ActionSpec translation(const PfaffianFibration& F, std::vector<std::string> action, bool full_h) {
  auto G = make_chart("G", {"t"});
  auto M = make_chart("M", {});
  ActionSpec S;
  S.groupoid = G;
  S.base = M;
  S.source = SmoothMap(G, M, {});
  S.target = SmoothMap(G, M, {});
  S.unit = SmoothMap(M, G, {Expr(0L)});
  S.moment = SmoothMap(F.total(), M, {});
  S.pairs = product_chart(G, F.total());
  for (const auto& a : action) S.action.push_back(parse_expr(a, *S.pairs));
  S.H = Distribution::from_generators(G, full_h ? std::vector<VectorField>{VectorField::coordinate(G, 0)} : std::vector<VectorField>{});
  return S;
}

}  // namespace

TEST(Symmetry, CheckActionExamples) {
  auto F = contact();
  auto zero = check_action(F, translation(F, {"x + t", "u", "p"}, false));
  EXPECT_TRUE(zero.internal);
  EXPECT_TRUE(zero.pfaffian);
  EXPECT_EQ(zero.samples, 8u);
  // With H = TG the pair (d/dt, 0) maps to d/dx, outside C.
  auto full = check_action(F, translation(F, {"x + t", "u", "p"}, true));
  EXPECT_FALSE(full.internal);
  auto fault = check_action(F, translation(F, {"x", "u", "p + t"}, false));
  EXPECT_FALSE(fault.internal);
  EXPECT_FALSE(fault.pfaffian);
  ASSERT_FALSE(fault.witnesses.empty());

  // Unit groupoid of P acting trivially, with H the whole tangent bundle.
  auto P = F.total();
  auto G = make_chart("G", {"gx", "gu", "gp"});
  ActionSpec U;
  U.groupoid = G;
  U.base = P;
  EVector ids{Expr::variable(0), Expr::variable(1), Expr::variable(2)};
  U.source = SmoothMap(G, P, ids);
  U.target = SmoothMap(G, P, ids);
  U.unit = SmoothMap(P, G, ids);
  U.moment = SmoothMap::identity(P);
  U.pairs = product_chart(G, P);
  U.action = {Expr::variable(3), Expr::variable(4), Expr::variable(5)};
  U.H = Distribution::from_generators(G, {VectorField::coordinate(G, 0), VectorField::coordinate(G, 1), VectorField::coordinate(G, 2)});
  auto u = check_action(F, U);
  EXPECT_TRUE(u.internal);
  EXPECT_TRUE(u.pfaffian);
}

TEST(Symmetry, CheckActionSpecErrors) {
  auto F = contact();
  auto S = translation(F, {"x + t", "u", "p"}, false);
  S.action[0] = parse_expr("x + t + 1", *S.pairs);
  try {
    check_action(F, S);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpecInvalid);
  }
  auto G = make_chart("G", {"t", "s"});
  auto M = make_chart("M", {"m"});
  ActionSpec B;
  B.groupoid = G;
  B.base = M;
  B.source = SmoothMap(G, M, {parse_expr("2*t", *G)});
  B.target = B.source;
  B.unit = SmoothMap(M, G, {parse_expr("m/2", *M), Expr(0L)});
  B.moment = SmoothMap(F.total(), M, {Expr::variable(0)});
  B.pairs = product_chart(G, F.total());
  B.action = {Expr::variable(2), Expr::variable(3), Expr::variable(4)};
  B.H = Distribution::from_generators(G, {});
  try {
    check_action(F, B);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpecInvalid);
  }
  try {
    product_chart(make_chart("G", {"x"}), F.total());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpecInvalid);
  }
}

TEST(Symmetry, TwistedIdentityOnFirstJets) {
  auto Q = make_chart("Q", {"x", "u"});
  auto X = make_chart("X", {"x"});
  auto r = point_symmetry_identity(SmoothMap(Q, X, {Expr::variable(0)}), 20, 7);
  EXPECT_EQ(r.samples, 20u);
  EXPECT_TRUE(r.all_equal);
  EXPECT_TRUE(r.containment);
  auto Q2 = make_chart("Q", {"x", "y", "u"});
  auto X2 = make_chart("X", {"x", "y"});
  auto r2 = point_symmetry_identity(SmoothMap(Q2, X2, {Expr::variable(0), Expr::variable(1)}), 20, 3);
  EXPECT_TRUE(r2.all_equal);
  EXPECT_TRUE(r2.containment);
  auto Q3 = make_chart("Q", {"x", "u", "v"});
  auto r3 = point_symmetry_identity(SmoothMap(Q3, X, {Expr::variable(0)}), 10, 1);
  EXPECT_TRUE(r3.all_equal);
  EXPECT_TRUE(r3.containment);
}
