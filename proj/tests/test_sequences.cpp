#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <vector>

#include "carleman/sequences.hpp"

using namespace carleman;

namespace {

using big = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<200>>;

// ln M_k recomputed with 200 digits; ln Gamma(k+2) as a sum of logs.
big reference_lnM(SequenceKind kind, int rho, int k) {
  const big x = k;
  switch (kind) {
    case SequenceKind::mstar: return big(rho) * x * log(x + 1);
    case SequenceKind::gammafact: {
      big s = 0;
      for (int j = 2; j <= k + 1; ++j) s += log(big(j));
      return big(rho) * s;
    }
    case SequenceKind::arctg: return (x + 1) * log(x + 1) * atan(x + 1);
    default: return 0;
  }
}

LogSequence make(SequenceKind kind, double rho, int K) { return build_sequence({kind, rho, K, {}}); }

}  // namespace

TEST(BuildSequence, SmallValues) {
  const auto m = make(SequenceKind::mstar, 1, 4);
  ASSERT_EQ(m.K(), 4);
  EXPECT_DOUBLE_EQ(m[0], 0.0);
  EXPECT_NEAR(m[1], std::log(2.0), 1e-15);
  EXPECT_NEAR(m[2], 2 * std::log(3.0), 1e-15);
  EXPECT_NEAR(m[3], 3 * std::log(4.0), 1e-14);
  EXPECT_NEAR(m[4], 4 * std::log(5.0), 1e-14);

  const auto g = make(SequenceKind::gammafact, 1, 3);
  EXPECT_NEAR(g[1], std::log(2.0), 1e-15);
  EXPECT_NEAR(g[2], std::log(6.0), 1e-15);
  EXPECT_NEAR(g[3], std::log(24.0), 1e-14);

  const auto a = make(SequenceKind::arctg, 1, 2);
  EXPECT_EQ(a[0], 0.0);
}

TEST(BuildSequence, MatchesHighPrecisionReference) {
  for (auto kind : {SequenceKind::mstar, SequenceKind::gammafact, SequenceKind::arctg}) {
    for (int rho : {1, 2}) {
      const auto seq = make(kind, rho, 100);
      for (int k = 1; k <= 100; ++k) {
        const double ref = reference_lnM(kind, kind == SequenceKind::arctg ? 1 : rho, k).convert_to<double>();
        EXPECT_LE(std::abs(seq[k] - ref), 1e-10 * std::abs(ref)) << to_string(kind) << " rho " << rho << " k " << k;
      }
    }
  }
}

TEST(BuildSequence, Rejections) {
  EXPECT_THROW(make(SequenceKind::mstar, 0.5, 10), InputError);
  EXPECT_THROW(build_sequence({SequenceKind::table, 1, 0, {0.0, 2.0, 1.0}}), InputError);
  EXPECT_THROW(build_sequence({SequenceKind::table, 1, 0, {0.5, 1.0, 2.0}}), InputError);
  EXPECT_THROW(sequence_kind_from_string("fib"), InputError);
}

TEST(BuildSequence, CoveringReachesRadius) {
  const auto seq = build_sequence_covering({SequenceKind::mstar, 1, 2000, {}}, 1e6);
  EXPECT_GE(seq[seq.K()] - seq[seq.K() - 1], std::log(1e6));
}

TEST(CheckI1, Examples) {
  EXPECT_TRUE(check_i1(make(SequenceKind::mstar, 1, 2000)).ok);
  EXPECT_TRUE(check_i1(make(SequenceKind::gammafact, 2, 500)).ok);
  const std::vector<double> bad{0.0, std::log(3.0), std::log(4.0)};
  const auto r = check_i1(std::span<const double>(bad));
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(*r.first_violation, 1);
}

TEST(EstimateI2, Gammafact) {
  const auto r = estimate_i2(make(SequenceKind::gammafact, 1, 2000));
  // (k+1)! >= k!: H2 tends to 1 from above, H1 = 1 from the k = 0 row.
  EXPECT_GE(r.H2, 1.0);
  EXPECT_LE(r.H2, std::pow(2001.0, 1.0 / 1000));
  EXPECT_GE(r.residual, -1e-12);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(EstimateI2, Mstar) {
  const auto r = estimate_i2(make(SequenceKind::mstar, 1, 2000));
  EXPECT_GE(r.H2, 2.5);
  EXPECT_LE(r.H2, std::exp(1.0));
  EXPECT_GE(r.residual, -1e-12);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(EstimateI2, GeometricGrowthFails) {
  std::vector<double> t(2001);
  for (int k = 0; k <= 2000; ++k) t[k] = k * std::log(2.0);
  EXPECT_EQ(estimate_i2(build_sequence({SequenceKind::table, 1, 0, t})).verdict, Verdict::failed);
}

TEST(CheckI3, AnalyticLimits) {
  const std::vector<double> s{2.0, 3.0};
  const auto m = check_i3(make(SequenceKind::mstar, 1, 5000), s);
  EXPECT_NEAR(m[0].proxy, 2 * std::log(2.0), 1e-2);
  EXPECT_NEAR(m[1].proxy, 3 * std::log(3.0), 2e-2);
  const auto g = check_i3(make(SequenceKind::gammafact, 1, 5000), std::span<const double>(s).first(1));
  // Stirling: the window minimum sits (3/2) ln n / n below the limit at n = n_lo.
  const double n_lo = g[0].n_lo;
  EXPECT_NEAR(g[0].proxy, 2 * std::log(2.0), 2 * std::log(n_lo) / n_lo);
  for (const auto& row : m) EXPECT_EQ(row.verdict, Verdict::pass);
}

TEST(CheckI3, SmallWindowRejected) {
  const std::vector<double> s{2.0};
  EXPECT_THROW(check_i3(make(SequenceKind::mstar, 1, 30), s), InputError);
}

TEST(CheckI4, Examples) {
  const auto g = check_i4(make(SequenceKind::gammafact, 1, 2200), 1.0, 200, 2000);
  EXPECT_LE(g.residual, 1e-9);
  EXPECT_TRUE(std::isfinite(g.p) && std::isfinite(g.t));
  EXPECT_GE(g.p, 1.0);
  const auto m = check_i4(make(SequenceKind::mstar, 1, 2000), 0.5, 50, 1950);
  EXPECT_LE(m.residual, 1e-9);
  EXPECT_EQ(m.verdict, Verdict::pass);
}

TEST(CheckI4, UnboundedRowIsInconclusive) {
  // delta tiny relative to the growth: the maximizing m sits at the edge.
  const auto r = check_i4(make(SequenceKind::mstar, 1, 200), 1e-6, 10, 190);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
}

TEST(RatioLimit, Values) {
  for (auto kind : {SequenceKind::mstar, SequenceKind::gammafact}) {
    const auto seq = make(kind, 1, 10001);
    const auto r = check_eq1_limit(seq);
    const int n = r.rows.back().n;
    const double expect = std::exp((builtin_lnM(kind, 1, n + 1) - builtin_lnM(kind, 1, n)) / n);
    EXPECT_NEAR(r.last, expect, 1e-12);
    EXPECT_LT(r.last, 1.0012);
    EXPECT_EQ(r.verdict, Verdict::pass);
  }
  std::vector<double> flat(200);
  for (int k = 0; k < 200; ++k) flat[k] = std::min(k, 50) * 1.0 + 0.01 * std::min(k, 50) * std::min(k, 50);
  EXPECT_DOUBLE_EQ(check_eq1_limit(std::span<const double>(flat)).last, 1.0);
}

TEST(ToVfun, Interpolation) {
  const auto g = to_vfun(make(SequenceKind::gammafact, 1, 10));
  EXPECT_NEAR(g(0.5), 0.5 * std::log(2.0), 1e-15);
  const auto m = to_vfun(make(SequenceKind::mstar, 1, 10));
  EXPECT_NEAR(m(2.0), 2 * std::log(3.0), 1e-15);
  EXPECT_NEAR(m(1.25), 0.75 * std::log(2.0) + 0.25 * 2 * std::log(3.0), 1e-15);
  EXPECT_EQ(m.first_nonconvex_node(), ConvexGridFunction::npos);
}

TEST(ClassM, BuiltinsUpTo5000) {
  for (auto kind : {SequenceKind::mstar, SequenceKind::gammafact, SequenceKind::arctg}) {
    for (double rho : {1.0, 2.0}) {
      if (kind == SequenceKind::arctg && rho != 1.0) continue;
      for (int K : {500, 5000}) {
        const auto r = check_class_m(make(kind, rho, K));
        EXPECT_TRUE(r.i1.ok);
        EXPECT_GE(r.i2.residual, -1e-9);
        for (const auto& row : r.i3) EXPECT_GT(row.proxy, 0) << to_string(kind) << " s " << row.s;
        for (const auto& row : r.i4) EXPECT_LE(row.residual, 1e-9) << to_string(kind) << " delta " << row.delta;
        EXPECT_EQ(r.verdict, Verdict::pass) << to_string(kind) << " rho " << rho << " K " << K;
      }
    }
  }
}
