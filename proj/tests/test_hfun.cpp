#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "carleman/hfun.hpp"

using namespace carleman;

namespace {

const LogSequence& mstar1() {
  static const auto seq = build_sequence({SequenceKind::mstar, 1, 100000, {}});
  return seq;
}

const std::vector<double> kSGrid{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

const PropertyCheck& property(const HSuiteReport& r, const std::string& name) {
  for (const auto& p : r.properties)
    if (p.name == name) return p;
  throw std::runtime_error("no property " + name);
}

}  // namespace

TEST(HDiscrete, ClosedForm) {
  const auto& seq = mstar1();
  EXPECT_NEAR(h_discrete(seq, 2.0).proxy, -std::log(2.0), 1e-3);
  EXPECT_NEAR(h_discrete(seq, 0.5).proxy, std::log(2.0), 1e-3);
  EXPECT_EQ(h_discrete(seq, 1.0).proxy, 0.0);
}

TEST(HDiscrete, WindowBeyondK) {
  EXPECT_THROW(h_discrete(mstar1(), 2.0, HWindow{1000, 60000}), InputError);
  EXPECT_THROW(h_discrete(mstar1(), -1.0), InputError);
}

TEST(HContinuous, ClosedForms) {
  const auto v = builtin_v(SequenceKind::mstar);
  EXPECT_NEAR(h_continuous(v, 2.0, HWindow{1e4, 1e5}).proxy, -std::log(2.0), 1e-3);
  const auto affine = [](double x) { return 3 * x; };
  for (double s : {0.25, 2.0, 5.0}) EXPECT_NEAR(h_continuous(affine, s, HWindow{1, 100}).proxy, 0.0, 1e-12);
  const auto g = builtin_v(SequenceKind::gammafact, 2.0);
  EXPECT_NEAR(h_continuous(g, 2.0, HWindow{1e5, 1e6}).proxy, -2 * std::log(2.0), 1e-3);
}

TEST(HContinuous, DomainOverflow) {
  const auto vL = to_vfun(build_sequence({SequenceKind::mstar, 1, 1000, {}}));
  EXPECT_THROW(h_continuous(vL, 2.0, HWindow{100, 800}), InputError);
}

TEST(HProperties, SuitePasses) {
  const auto r = lemma1_suite(mstar1(), kSGrid);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.properties.size(), 6u);
  for (std::size_t i = 0; i + 1 < r.h.size(); ++i) EXPECT_GE(r.h[i], r.h[i + 1]);
  for (std::size_t i = 0; i < r.h.size(); ++i) {
    // the [sk] + 1 index lags by ln(sk)/(sk), about 1.4e-3 at s = 1/8
    EXPECT_NEAR(r.h[i], -std::log(kSGrid[i]), 3e-3);
    EXPECT_LE(r.h[i] + r.h_inv[i], 1e-3);
  }
  const auto g = lemma1_suite(build_sequence({SequenceKind::gammafact, 2, 100000, {}}), kSGrid);
  EXPECT_EQ(g.verdict, Verdict::pass);
  for (std::size_t i = 0; i < g.h.size(); ++i) EXPECT_NEAR(g.h[i], -2 * std::log(kSGrid[i]), 2e-2);
}

TEST(HProperties, AllBuiltins) {
  for (auto kind : {SequenceKind::mstar, SequenceKind::gammafact, SequenceKind::arctg}) {
    const auto r = lemma1_suite(build_sequence({kind, 1, 100000, {}}), kSGrid);
    EXPECT_EQ(r.verdict, Verdict::pass) << to_string(kind);
    EXPECT_TRUE(property(r, "sign").ok);
    EXPECT_TRUE(property(r, "pairing").ok);
    EXPECT_TRUE(property(r, "nonincreasing").ok);
  }
}

TEST(LFunction, Values) {
  EXPECT_NEAR(l_of(h_discrete(mstar1(), 2.0)), 0.5, 1e-3);
  EXPECT_NEAR(l_of(h_discrete(mstar1(), 0.5)), 2.0, 2e-3);
  EXPECT_EQ(l_of(h_discrete(mstar1(), 1.0)), 1.0);
  const auto m2 = build_sequence({SequenceKind::mstar, 2, 100000, {}});
  EXPECT_NEAR(l_of(h_discrete(m2, 2.0)), 0.25, 1e-3);
  EXPECT_EQ(l_properties(mstar1(), kSGrid).verdict, Verdict::pass);
}

TEST(HDiscreteContinuous, DiscreteMatchesContinuous) {
  const std::vector<double> s{0.5, 1.0, 2.0, 4.0};
  for (auto kind : {SequenceKind::mstar, SequenceKind::gammafact, SequenceKind::arctg}) {
    for (double rho : {1.0, 2.0}) {
      if (kind == SequenceKind::arctg && rho != 1.0) continue;
      for (const auto& row : lemma2_check(build_sequence({kind, rho, 100000, {}}), s))
        EXPECT_LE(row.diff, row.tolerance) << to_string(kind) << " rho " << rho << " s " << row.discrete.s;
    }
  }
}

TEST(ClassV, Mstar) {
  const auto r = classV_check(builtin_v(SequenceKind::mstar));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_GE(r.v1.A_v, -1e-12);
  for (const auto& row : r.v2) {
    if (row.s == 2.0) {
      EXPECT_NEAR(row.eta, 2 * std::log(2.0), 1e-3);
    }
  }
}

TEST(ClassV, LinearFailsV1) {
  const auto r = classV_check([](double x) { return x; });
  EXPECT_EQ(r.v1.verdict, Verdict::failed);
  EXPECT_EQ(r.verdict, Verdict::failed);
}

TEST(ClassV, NeedsZeroAtOrigin) {
  EXPECT_THROW(classV_check([](double x) { return x * x + 1; }), InputError);
}

TEST(QuadraticDomination, XLogOnePlusX) {
  const auto u = [](double x) { return x * std::log1p(x); };
  std::vector<double> q;
  for (double eps : {0.25, 0.5, 1.0}) {
    const auto r = prop1_check(u, 1.25, eps);
    EXPECT_TRUE(r.curvature_ok);
    EXPECT_TRUE(std::isfinite(r.Q_constructive));
    EXPECT_TRUE(r.stabilized);
    EXPECT_LE(r.Q_min, r.Q_constructive);
    EXPECT_EQ(r.verdict, Verdict::pass);
    q.push_back(r.Q_constructive);
  }
  EXPECT_GE(q[0], q[1]);
  EXPECT_GE(q[1], q[2]);
}

TEST(QuadraticDomination, OtherFunctions) {
  const auto lin = prop1_check([](double x) { return 2 * x; }, 1.0, 0.5);
  EXPECT_EQ(lin.verdict, Verdict::pass);
  const auto g = prop1_check(builtin_v(SequenceKind::gammafact, 2.0), 2.0, 1.0);
  EXPECT_EQ(g.verdict, Verdict::pass);
  // curvature x u'' = x / 1 exceeds any C for u = x^2 / 2
  const auto sq = prop1_check([](double x) { return x * x / 2; }, 1.25, 0.5);
  EXPECT_FALSE(sq.curvature_ok);
  EXPECT_EQ(sq.verdict, Verdict::failed);
}

TEST(Inequalities, Eq2AndEq7) {
  const auto v = builtin_v(SequenceKind::mstar);
  InequalityParams p;
  EXPECT_EQ(verify_inequality(InequalityId::eq2, v, p).verdict, Verdict::pass);
  p.s = 1.0;
  const auto e7 = verify_inequality(InequalityId::eq7, v, p);
  EXPECT_EQ(e7.verdict, Verdict::pass);
  EXPECT_NEAR(e7.residual, 0.0, 1e-12);
}

TEST(Inequalities, FittedConstants) {
  const auto v = builtin_v(SequenceKind::mstar);
  EXPECT_THROW(verify_inequality(InequalityId::eq3, v, {}), InputError);
  const auto fit = fit_v3(v, 0.5, 1e5, 1e3);
  InequalityParams p;
  p.eps = 0.5;
  p.a_eps = fit.a;
  p.b_eps = fit.b;
  for (auto id : {InequalityId::eq3, InequalityId::eq4, InequalityId::eq5, InequalityId::eq6})
    EXPECT_EQ(verify_inequality(id, v, p).verdict, Verdict::pass) << to_string(id);
}
