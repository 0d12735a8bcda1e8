#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "carleman/conjugates.hpp"

using namespace carleman;

namespace {

ConvexGridFunction sample(double lo, double hi, double step, double (*f)(double)) {
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> xs(n), vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = lo + double(i) * step;
    vs[i] = f(xs[i]);
  }
  return ConvexGridFunction(xs, vs);
}

double half_square(double y) { return y * y / 2; }
double cube_third(double y) { return std::pow(std::abs(y), 3) / 3; }
double abs_val(double y) { return std::abs(y); }
double affine(double y) { return 3 * y - 1; }

// O(n^2) reference: max over all nodes for every slope.
std::vector<double> brute_conjugate(const ConvexGridFunction& f, const std::vector<double>& slopes) {
  std::vector<double> out;
  for (double x : slopes) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, x * f.xs()[i] - f.vals()[i]);
    out.push_back(best);
  }
  return out;
}

}  // namespace

TEST(ConvexGridFunction, RejectsNonconvex) {
  EXPECT_THROW(ConvexGridFunction({0, 1, 2}, {0, 1, 0}), InputError);
  EXPECT_THROW(ConvexGridFunction({0, 0, 2}, {0, 1, 3}), InputError);
  const ConvexGridFunction f({0, 1, 2}, {0, 0, 1});
  EXPECT_DOUBLE_EQ(f(1.5), 0.5);
  EXPECT_THROW(f(2.5), TruncationError);
}

TEST(Legendre, QuadraticExamples) {
  const auto f = sample(-10, 10, 1e-3, half_square);
  const std::vector<double> xs{0.0, 1.0};
  const auto g = legendre_transform(f, xs);
  EXPECT_NEAR(g.g.vals()[0], 0.0, 1e-12);
  EXPECT_NEAR(g.g.vals()[1], 0.5, 1e-9);
  EXPECT_FALSE(g.any_edge());
}

TEST(Legendre, CubeAtFour) {
  const auto f = sample(-10, 10, 1e-3, cube_third);
  const std::vector<double> xs{3.0, 4.0};
  EXPECT_NEAR(legendre_transform(f, xs).g.vals()[1], 2.0 / 3.0 * 8.0, 1e-8);
}

TEST(Legendre, SweepMatchesBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // a random convex function: cumulative sums of increasing slopes
  std::vector<double> slopes_f(800);
  for (auto& s : slopes_f) s = -20 + 40 * u(rng);
  std::sort(slopes_f.begin(), slopes_f.end());
  std::vector<double> xs{-4.0}, vs{0.0};
  for (double s : slopes_f) {
    const double dx = 0.001 + 0.02 * u(rng);
    xs.push_back(xs.back() + dx);
    vs.push_back(vs.back() + s * dx);
  }
  const ConvexGridFunction f(xs, vs);
  for (const auto& g : {f, sample(-10, 10, 1e-2, cube_third), sample(-5, 5, 1e-2, abs_val)}) {
    const auto slopes = linspace(-25, 25, 1000);
    const auto fast = legendre_transform(g, slopes);
    const auto slow = brute_conjugate(g, slopes);
    double diff = 0;
    for (std::size_t i = 0; i < slopes.size(); ++i) diff = std::max(diff, std::abs(fast.g.vals()[i] - slow[i]));
    EXPECT_LE(diff, 1e-12);
    EXPECT_EQ(fast.g.first_nonconvex_node(), ConvexGridFunction::npos);
  }
}

TEST(Legendre, EdgeFlag) {
  const auto f = sample(-1, 1, 1e-2, half_square);
  const std::vector<double> xs{0.5, 2.0};
  const auto g = legendre_transform(f, xs);
  EXPECT_FALSE(g.edge[0]);
  EXPECT_TRUE(g.edge[1]);
}

TEST(Legendre, PowerDuality) {
  // psi = |y|^3/3 has conjugate |x|^{3/2}/(3/2)
  PsiSpec psi;
  psi.alpha = 3;
  psi.Y = 20;
  const auto xs = linspace(-20, 20, 801);
  const auto g = conjugate_psi(psi, xs);
  double err = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    err = std::max(err, std::abs(g.g.vals()[i] - std::pow(std::abs(xs[i]), 1.5) / 1.5));
  // sampling deficit is at most psi''(y*) h^2 / 8 with y* = sqrt 20
  EXPECT_LE(err, 2 * std::sqrt(20.0) * 1e-6 / 8 + 1e-12);
}

TEST(Biconjugate, Examples) {
  const auto slopes = linspace(-12, 12, 24001);
  const auto q = biconjugate_check(sample(-10, 10, 1e-3, half_square), slopes);
  EXPECT_LE(q.defect, 1e-6);
  EXPECT_GE(q.min_gap, -1e-12);
  EXPECT_NEAR(biconjugate_check(sample(-2, 2, 1e-2, affine), linspace(0, 5, 101)).defect, 0.0, 1e-12);
  // |y| is recovered once the slope grid holds its two slopes +-1
  const std::vector<double> kinks{-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0};
  EXPECT_NEAR(biconjugate_check(sample(-2, 2, 1e-2, abs_val), kinks).defect, 0.0, 1e-12);
}

TEST(Psi, SelfConjugacyOnFifty) {
  PsiSpec psi;  // y^2/2 on [-100, 100], step 1e-3
  const auto xs = linspace(-50, 50, 10001);
  const auto g = conjugate_psi(psi, xs);
  double err = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) err = std::max(err, std::abs(g.g.vals()[i] - xs[i] * xs[i] / 2));
  EXPECT_LE(err, 1e-5);
  const auto b = biconjugate_check(psi_grid(psi), linspace(-60, 60, 120001));
  EXPECT_GE(b.defect, 0.0);
  EXPECT_LE(b.defect, 1e-5);
}

TEST(Psi, Validation) {
  PsiSpec quad;
  const auto q = validate_psi(quad);
  EXPECT_LE(q.A_psi, 1.0);
  EXPECT_EQ(q.verdict, Verdict::pass);

  PsiSpec lin;
  lin.exponent = 1.0;
  const auto l = validate_psi(lin);
  EXPECT_FALSE(l.superlinear_ok);
  EXPECT_EQ(l.verdict, Verdict::failed);

  PsiSpec cube;
  cube.alpha = 3;
  const auto c = validate_psi(cube);
  EXPECT_TRUE(std::isfinite(c.A_psi));
  EXPECT_EQ(c.verdict, Verdict::pass);

  PsiSpec bad;
  bad.alpha = 1.0;
  EXPECT_THROW(validate_psi(bad), InputError);
}

TEST(Theta, Values) {
  PsiSpec psi;
  psi.Y = 10;
  const auto phi = conjugate_psi(psi, linspace(-5, 5, 1001)).g;
  for (int m : {0, 1, 4}) EXPECT_NEAR(theta_m(m, 0.0, phi).value, 1.0, 1e-12);
  EXPECT_NEAR(theta_m(1, 1.0, phi).value, std::exp(0.5 - std::log(2.0)), 1e-8);
  EXPECT_NEAR(theta_m(0, 2.0, phi).value, std::exp(2.0), 1e-7);
  EXPECT_THROW(theta_m(1, 6.0, phi), InputError);
}
