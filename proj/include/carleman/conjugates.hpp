#pragma once

// Discrete Legendre-Fenchel conjugation phi(x) = sup_y (x y - psi(y)) and the
// spatial weights theta_m(x) = exp(phi(x) - m ln(1 + |x|)).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/grid.hpp"

namespace carleman {

struct ConjugateResult {
  ConvexGridFunction g;
  std::vector<std::size_t> argmax;  // grid index of the maximizing y, smallest on ties
  std::vector<bool> edge;           // sup attained at a grid end: may lie beyond the grid

  bool any_edge() const { return std::find(edge.begin(), edge.end(), true) != edge.end(); }
};

/// g(x) = max_i (x y_i - f(y_i)) for increasing slopes x. The maximizing index
/// is nondecreasing in x, so one forward sweep over the grid suffices.
inline ConjugateResult legendre_transform(const ConvexGridFunction& f, std::span<const double> slopes) {
  detail::require(slopes.size() >= 2, "legendre_transform: need at least two slopes");
  for (std::size_t i = 0; i + 1 < slopes.size(); ++i)
    detail::require(slopes[i + 1] > slopes[i], "legendre_transform: slopes must be strictly increasing");
  const auto& ys = f.xs();
  const auto& fv = f.vals();
  const std::size_t n = ys.size();
  std::vector<double> vals(slopes.size());
  std::vector<std::size_t> arg(slopes.size());
  std::vector<bool> edge(slopes.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    const double x = slopes[i];
    double cur = x * ys[j] - fv[j];
    while (j + 1 < n) {
      const double next = x * ys[j + 1] - fv[j + 1];
      if (!(next > cur)) break;
      cur = next;
      ++j;
    }
    vals[i] = cur;
    arg[i] = j;
    // At an end node the sup is only certified when x is within the end slope.
    edge[i] = (j == 0 && x < f.slope(0)) || (j + 1 == n && x > f.slope(n - 2));
  }
  return {ConvexGridFunction(std::vector<double>(slopes.begin(), slopes.end()), std::move(vals)),
          std::move(arg), std::move(edge)};
}

struct BiconjugateReport {
  double defect = 0;       // max over certified nodes of f - f**
  double min_gap = 0;      // min of f - f**, >= 0 up to rounding
  double witness_y = 0;
  std::size_t checked = 0;
};

/// Compares f with (f*)* on the nodes of f whose supporting slopes lie inside
/// the slope grid; outside that band the truncated conjugate cannot recover f.
inline BiconjugateReport biconjugate_check(const ConvexGridFunction& f, std::span<const double> slopes) {
  const auto star = legendre_transform(f, slopes);
  const auto back = legendre_transform(star.g, f.xs());
  BiconjugateReport r;
  r.defect = -std::numeric_limits<double>::infinity();
  r.min_gap = std::numeric_limits<double>::infinity();
  const double lo = slopes.front(), hi = slopes.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    if (f.slope(i - 1) < lo || f.slope(i) > hi) continue;
    const double gap = f.vals()[i] - back.g.vals()[i];
    ++r.checked;
    r.min_gap = std::min(r.min_gap, gap);
    if (gap > r.defect) {
      r.defect = gap;
      r.witness_y = f.xs()[i];
    }
  }
  detail::require(r.checked > 0, "biconjugate_check: slope grid covers no node of f");
  return r;
}

// ---------------------------------------------------------------------------
// psi

enum class PsiForm { power, grid };

/// psi(y) = |y|^p / p with p = exponent (defaults to alpha), sampled on
/// [-Y, Y], or a user-supplied convex grid. alpha is the Holder exponent in
/// |psi(x1) - psi(x2)| <= A (1 + |x1| + |x2|)^{alpha-1} |x1 - x2|.
struct PsiSpec {
  PsiForm form = PsiForm::power;
  double alpha = 2.0;
  std::optional<double> exponent;
  double Y = 100.0;
  double step = 1e-3;
  std::optional<ConvexGridFunction> grid;

  double power() const { return exponent.value_or(alpha); }

  double operator()(double y) const {
    if (form == PsiForm::grid) return grid.value()(y);
    const double p = power();
    return std::pow(std::abs(y), p) / p;
  }

  double y_max() const { return form == PsiForm::grid ? std::min(-grid->x_min(), grid->x_max()) : Y; }
};

/// psi sampled on a symmetric grid with 0 as an exact node.
inline ConvexGridFunction psi_grid(const PsiSpec& psi) {
  if (psi.form == PsiForm::grid) return psi.grid.value();
  detail::require(psi.Y > 0 && psi.step > 0, "psi grid: Y and step must be positive");
  const long long half = std::llround(psi.Y / psi.step);
  std::vector<double> xs(2 * half + 1), vals(2 * half + 1);
  for (long long i = -half; i <= half; ++i) {
    xs[i + half] = static_cast<double>(i) * psi.step;
    vals[i + half] = psi(xs[i + half]);
  }
  return ConvexGridFunction(std::move(xs), std::move(vals));
}

/// phi = psi* evaluated at increasing xs.
inline ConjugateResult conjugate_psi(const PsiSpec& psi, std::span<const double> xs) {
  return legendre_transform(psi_grid(psi), xs);
}

struct PsiReport {
  double A_psi = 0;           // smallest Holder constant on the pair grid
  double A_psi_inner = 0;     // same, restricted to the inner half range
  double witness_x1 = 0, witness_x2 = 0;
  bool nonnegative = true;
  bool convex = true;
  bool holder_ok = true;      // condition 1
  bool superlinear_ok = true; // condition 2
  double ratio_growth_pos = 0, ratio_growth_neg = 0;  // psi(Y)/Y over psi(Y/2)/(Y/2)
  Verdict verdict = Verdict::pass;
};

inline PsiReport validate_psi(const PsiSpec& psi, std::size_t pair_points = 401) {
  detail::require(psi.alpha > 1, "validate_psi: alpha must exceed 1");
  PsiReport r;
  const double Y = psi.y_max();
  const auto ys = linspace(-Y, Y, pair_points);
  std::vector<double> vals(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    vals[i] = psi(ys[i]);
    if (vals[i] < 0) r.nonnegative = false;
  }
  try {
    (void)ConvexGridFunction(ys, vals);
  } catch (const InputError&) {
    r.convex = false;
  }
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      const double x1 = ys[i], x2 = ys[j];
      const double q = std::abs(vals[i] - vals[j]) /
                       (std::pow(1 + std::abs(x1) + std::abs(x2), psi.alpha - 1) * std::abs(x1 - x2));
      if (q > r.A_psi) {
        r.A_psi = q;
        r.witness_x1 = x1;
        r.witness_x2 = x2;
      }
      if (std::abs(x1) <= Y / 2 && std::abs(x2) <= Y / 2) r.A_psi_inner = std::max(r.A_psi_inner, q);
    }
  }
  r.holder_ok = r.A_psi <= 1.1 * r.A_psi_inner + 1e-12;

  // psi(x)/|x| on the outer half of each side.
  auto ratio_side = [&](double sign, double& growth) {
    const auto outer = linspace(Y / 2, Y, 101);
    bool increasing = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (double a : outer) {
      const double q = psi(sign * a) / a;
      if (!(q > prev)) increasing = false;
      prev = q;
    }
    const double half = psi(sign * Y / 2) / (Y / 2);
    growth = half > 0 ? (psi(sign * Y) / Y) / half : std::numeric_limits<double>::infinity();
    return increasing && growth >= 1 + 1e-3;
  };
  r.superlinear_ok = ratio_side(1.0, r.ratio_growth_pos) && ratio_side(-1.0, r.ratio_growth_neg);
  const bool ok = r.nonnegative && r.convex && r.holder_ok && r.superlinear_ok;
  r.verdict = ok ? Verdict::pass : Verdict::failed;
  return r;
}

// ---------------------------------------------------------------------------
// theta_m

struct ThetaValue {
  double log_value;
  double value;
};

inline ThetaValue theta_m(int m, double x, const ConvexGridFunction& phi) {
  detail::require(m >= 0, "theta_m: m must be nonnegative");
  if (!phi.contains(x)) throw InputError("theta_m: x = " + std::to_string(x) + " outside the phi grid");
  const double lg = phi(x) - m * std::log1p(std::abs(x));
  return {lg, std::exp(lg)};
}

}  // namespace carleman
