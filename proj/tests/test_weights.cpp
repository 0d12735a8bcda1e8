#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "carleman/weights.hpp"

using namespace carleman;

namespace {

WeightFunction weight(SequenceKind kind, double rho, int K = 2000) {
  return WeightFunction(build_sequence({kind, rho, K, {}}));
}

// max over every k, smallest k on ties
WeightValue brute_w(const std::vector<double>& lnM, double r) {
  if (r == 0) return {0.0, 0};
  const double lr = std::log(r);
  WeightValue best{0.0, 0};
  for (std::size_t k = 1; k < lnM.size(); ++k) {
    const double v = double(k) * lr - lnM[k];
    if (v > best.value) best = {v, int(k)};
  }
  return best;
}

}  // namespace

TEST(EvalW, SpotValues) {
  const auto wf = weight(SequenceKind::mstar, 1);
  EXPECT_EQ(wf.eval(1.0).value, 0.0);
  EXPECT_EQ(wf.eval(1.0).k, 0);
  EXPECT_EQ(wf.eval(0.0).value, 0.0);
  const auto t = wf.eval(4.5);
  EXPECT_NEAR(t.value, std::log(2.25), 1e-12);
  EXPECT_EQ(t.k, 1);
  const auto ten = wf.eval(10.0);
  EXPECT_NEAR(ten.value, std::log(16.0), 1e-12);
  EXPECT_EQ(ten.k, 4);
}

TEST(EvalW, Truncation) {
  const auto wf = weight(SequenceKind::mstar, 1, 50);
  EXPECT_NO_THROW(wf(wf.r_max()));
  EXPECT_THROW(wf(wf.r_max() * 1.01), TruncationError);
  EXPECT_THROW(wf(-1.0), InputError);
}

TEST(EvalW, MatchesBruteForce) {
  std::mt19937_64 rng(20240601);
  for (auto kind : {SequenceKind::mstar, SequenceKind::gammafact, SequenceKind::arctg}) {
    for (double rho : {1.0, 2.0}) {
      const auto wf = weight(kind, rho);
      std::uniform_real_distribution<double> lr(std::log(1e-2), std::log(wf.r_max()));
      double diff = 0;
      for (int i = 0; i < 10000; ++i) {
        const double r = std::exp(lr(rng));
        const auto fast = wf.eval(r);
        const auto slow = brute_w(wf.lnM(), r);
        diff = std::max(diff, std::abs(fast.value - slow.value));
      }
      EXPECT_LE(diff, 1e-12) << to_string(kind) << " rho " << rho;
    }
  }
}

TEST(Counting, Steps) {
  const auto wf = weight(SequenceKind::mstar, 1);
  EXPECT_EQ(wf.counting(1.0), 0);
  EXPECT_EQ(wf.counting(10.0), 4);
  EXPECT_EQ(wf.counting(2.0), 0);
  EXPECT_EQ(wf.counting(2.0 * (1 + 1e-12)), 1);
  for (int k = 1; k < 200; ++k) {
    EXPECT_EQ(wf.counting(wf.mu(k) * (1 - 1e-9)), k - 1);
    EXPECT_EQ(wf.counting(wf.mu(k) * (1 + 1e-9)), k);
  }
}

TEST(EvalW, MonotoneAndConvexInLog) {
  const auto wf = weight(SequenceKind::gammafact, 1);
  const auto rs = logspace(0.5, wf.r_max(), 3000);
  double prev = -1;
  for (double r : rs) {
    EXPECT_GE(wf(r), prev);
    prev = wf(r);
  }
  for (std::size_t i = 0; i + 2 < rs.size(); ++i) {
    const double a = wf(rs[i]), b = wf(rs[i + 1]), c = wf(rs[i + 2]);
    // equal spacing in ln r
    EXPECT_GE((c - b) - (b - a), -1e-9 * std::max(1.0, c));
  }
}

TEST(Family, MonotoneInM) {
  const WeightFamily fam(weight(SequenceKind::mstar, 1), 1.0);
  for (double r : logspace(0.1, 2000, 400))
    for (int m = 1; m < 6; ++m) EXPECT_LE(fam.w_m(m, r), fam.w_m(m + 1, r));
}

TEST(LinearBound, Examples) {
  const auto big = WeightFunction(build_sequence_covering({SequenceKind::mstar, 1, 2000, {}}, 1e6));
  const auto b = linear_bound_Aw(big, 1e6);
  EXPECT_NEAR(b.A_w, std::exp(-1.0), 5e-3);
  EXPECT_TRUE(b.verified);
  const auto g = WeightFunction(build_sequence_covering({SequenceKind::gammafact, 1, 2000, {}}, 1e6));
  EXPECT_TRUE(std::isfinite(linear_bound_Aw(g, 1e6).A_w));
  for (double r : linspace(0.01, 2.0, 50)) EXPECT_EQ(big(r) / r, 0.0);
}

TEST(Sandwich, BothRho) {
  for (double rho : {1.0, 2.0}) {
    const auto s = check_sandwich_mstar(rho, 1e6);
    EXPECT_EQ(s.checked, 500u);
    EXPECT_GE(s.min_lower_slack, -1e-9);
    EXPECT_GE(s.min_upper_slack, -1e-9);
    EXPECT_EQ(s.verdict, Verdict::pass);
  }
  const auto wf = weight(SequenceKind::mstar, 1);
  const std::vector<double> edge{std::exp(1.0), 10.0};
  const auto r = check_sandwich_mstar(wf, 1.0, edge);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.checked, 1u);
}

TEST(FamilyGap, GapFiniteAndStabilized) {
  const WeightFamily fam(WeightFunction(build_sequence_covering({SequenceKind::mstar, 1, 2000, {}}, 1e6)), 1.0);
  const auto g = lemma3_gap(fam, 1, 1.0, 1e6);
  EXPECT_TRUE(std::isfinite(g.Q));
  EXPECT_GE(g.Q, 0.0);
  EXPECT_TRUE(g.stabilized);
  EXPECT_GT(g.maximizer, 0.0);
  EXPECT_EQ(g.verdict, Verdict::pass);
  EXPECT_EQ(lemma3_gap(fam, 2, 0.0, 1e6).Q, 0.0);
}

TEST(FamilyGap, ShortWeightTruncates) {
  const WeightFamily fam(weight(SequenceKind::mstar, 1, 100), 1.0);
  EXPECT_THROW(lemma3_gap(fam, 1, 1.0, 1e6), TruncationError);
}

TEST(ScaledGap, Examples) {
  const auto wf = WeightFunction(build_sequence_covering({SequenceKind::mstar, 1, 2000, {}}, 1e6 / 0.45));
  const auto g = lemma4_gap(wf, 2.0, 0.1, 0.5, 1e6);
  EXPECT_TRUE(std::isfinite(g.Q));
  EXPECT_TRUE(g.stabilized);
  const auto one = lemma4_gap(wf, 1.0, 0.1, 1.0, 1e6);
  EXPECT_EQ(one.Q, 0.0);
}

TEST(KWeight, RatioAtMostOne) {
  const auto wf = WeightFunction(build_sequence_covering({SequenceKind::mstar, 1, 2000, {}}, 2e4));
  const auto kw = make_kweight(PsiSpec{}, wf, 1.0);
  std::vector<std::complex<double>> zs;
  for (double r : logspace(1e-2, 1e4, 120))
    for (int a = 0; a < 16; ++a) zs.push_back(std::polar(r, 2 * std::numbers::pi * a / 16));
  const auto eps = [](int m) { return 1.0 / m; };
  for (int m = 1; m <= 3; ++m) {
    const auto r = ratio_check(kw, eps, m, zs);
    EXPECT_LE(r.max_log_ratio, 0.0);
    EXPECT_EQ(r.verdict, Verdict::pass);
  }
  // real and imaginary rays: exp(w_m(|z|) - w(|z|/sigma))
  for (double y : {5.0, 50.0, 500.0}) {
    const std::vector<std::complex<double>> one{{y, 0}}, imag{{0, y}};
    const double expect = wf(y / 2.0) - wf(y);
    EXPECT_NEAR(ratio_check(kw, eps, 1, one).max_log_ratio, expect, 1e-12);
    // psi(y) cancels in the ratio; rounding scales with it
    EXPECT_NEAR(ratio_check(kw, eps, 1, imag).max_log_ratio, expect, 1e-12 * (1 + y * y / 2));
  }
}
