#pragma once

// Zero placement for an entire function N with ln|N(z)| close to w(|z|/sigma).
// One zero lies on each circle |z| = mu_k = sigma M_k / M_{k-1}, so the
// counting function of the zeros is the slope of w and, by Jensen's formula,
// the circular mean of ln|N| equals w(r/sigma).
//
// N is the product over all K zeros the weight provides. The first J factors
// are multiplied directly; zeros J+1..K enter through their power sums,
//   sum_{k>J} ln|1 - z/l_k| = -Re sum_{p>=1} (z^p / p) sum_{k>J} l_k^{-p},
// truncated at p = P with an explicit remainder bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/grid.hpp"
#include "carleman/weights.hpp"

namespace carleman {

using cplx = std::complex<double>;

enum class AngleRule { golden, real_axis };

inline const char* to_string(AngleRule a) { return a == AngleRule::golden ? "golden" : "real_axis"; }

inline AngleRule angle_rule_from_string(const std::string& s) {
  if (s == "golden") return AngleRule::golden;
  if (s == "real_axis") return AngleRule::real_axis;
  throw InputError("unknown angle rule '" + s + "'");
}

inline constexpr int kFarFieldOrder = 64;

class ZeroSet {
 public:
  std::vector<double> radii;   // mu_1..mu_J, multiplied explicitly
  std::vector<double> angles;  // argument of each explicit zero
  std::vector<double> far_radii;   // mu_{J+1}..mu_K
  std::vector<double> far_angles;
  double sigma = 1;
  bool symmetric = false;  // zeros at +-mu_k with factors (1 - z^2/mu_k^2)
  AngleRule rule = AngleRule::golden;
  double d = 0;            // exclusion-disc radius

  int J() const { return static_cast<int>(radii.size()); }
  int K() const { return J() + static_cast<int>(far_radii.size()); }

  cplx zero(std::size_t k) const { return std::polar(radii[k], angles[k]); }

  /// Radius beyond which evaluation is refused: mu_{floor(0.6 J)}.
  double admissible_radius() const {
    const auto idx = static_cast<std::size_t>(std::max(1, static_cast<int>(std::floor(0.6 * J()))));
    return radii[idx - 1];
  }

  /// Power sums of the far zeros in the scaled variable u = z / mu_{J+1}:
  /// moments[p-1] = sum_{k>J} (mu_{J+1} / l_k)^p (symmetric mode: over +-l_k).
  std::vector<cplx> moments;
  double far_scale = 0;

  void build_far_field() {
    moments.assign(kFarFieldOrder, cplx{0, 0});
    if (far_radii.empty()) return;
    far_scale = far_radii.front();
    for (std::size_t k = 0; k < far_radii.size(); ++k) {
      const cplx c = std::polar(far_scale / far_radii[k], -far_angles[k]);
      cplx pw = 1;
      for (int p = 1; p <= kFarFieldOrder; ++p) {
        pw *= c;
        if (symmetric && p % 2 == 1) continue;  // odd powers of +-l cancel
        moments[p - 1] += symmetric ? 2.0 * pw : pw;
      }
    }
  }
};

struct GapReport;
inline double default_exclusion(const ZeroSet& zs);

inline constexpr double kGoldenFraction = 0.6180339887498948482;  // (sqrt 5 - 1)/2

/// Zeros mu_k = sigma exp(t_k) for every k the weight provides; the first J are
/// explicit. Golden rule: angle 2 pi frac(k (sqrt5 - 1)/2). Real-axis rule:
/// angle 0 with zeros at +-mu_k.
inline ZeroSet place_zeros(const WeightFunction& wf, double sigma, int J, AngleRule rule = AngleRule::golden) {
  detail::require(sigma > 0, "place_zeros: sigma must be positive");
  detail::require(J >= 1, "place_zeros: J must be >= 1");
  if (J > wf.K()) throw InputError("place_zeros: J = " + std::to_string(J) + " exceeds K = " + std::to_string(wf.K()));
  ZeroSet zs;
  zs.sigma = sigma;
  zs.rule = rule;
  zs.symmetric = rule == AngleRule::real_axis;
  for (int k = 1; k <= wf.K(); ++k) {
    const double mu = sigma * std::exp(wf.breakpoint(k));
    double theta = 0;
    if (rule == AngleRule::golden) {
      const double f = std::fmod(static_cast<double>(k) * kGoldenFraction, 1.0);
      theta = 2 * std::numbers::pi * f;
    }
    if (k <= J) {
      zs.radii.push_back(mu);
      zs.angles.push_back(theta);
    } else {
      zs.far_radii.push_back(mu);
      zs.far_angles.push_back(theta);
    }
  }
  zs.build_far_field();
  if (J >= 2) zs.d = default_exclusion(zs);
  return zs;
}

// ---------------------------------------------------------------------------

struct GapReport {
  double d_max = 0;        // half the smallest gap between explicit zeros' circles
  std::size_t prefix = 0;  // gaps beyond this index all exceed 2 d
  bool simple = true;      // no repeated radius
  int repeated_at = 0;
};

inline GapReport min_gap(const ZeroSet& zs, double d = 0) {
  detail::require(zs.J() >= 2, "min_gap: need J >= 2");
  GapReport g;
  double smallest = std::numeric_limits<double>::infinity();
  if (zs.symmetric) smallest = 2 * zs.radii.front();
  for (std::size_t k = 0; k + 1 < zs.radii.size(); ++k) {
    const double gap = zs.radii[k + 1] - zs.radii[k];
    smallest = std::min(smallest, gap);
    if (!(gap > 0) && g.simple) {
      g.simple = false;
      g.repeated_at = static_cast<int>(k + 2);
    }
    if (!(gap > 2 * d)) g.prefix = k + 1;
  }
  g.d_max = smallest / 2;
  return g;
}

/// Default exclusion radius min(0.5, d_max/2).
inline double default_exclusion(const ZeroSet& zs) { return std::min(0.5, min_gap(zs).d_max / 2); }

// ---------------------------------------------------------------------------

struct LogModulus {
  double value = 0;
  bool excluded = false;
  double tail_bound = 0;  // bound on the dropped power-sum terms
};

inline constexpr double kTailTol = 1e-9;

inline LogModulus log_abs_N(cplx z, const ZeroSet& zs, double tail_tol = kTailTol) {
  LogModulus out;
  const double az = std::abs(z);
  if (az > zs.admissible_radius() * (1 + 1e-12))
    throw TruncationError("log_abs_N: |z| = " + std::to_string(az) + " beyond admissible radius mu_{0.6J} = " +
                          std::to_string(zs.admissible_radius()));
  double sum = 0;
  for (std::size_t k = 0; k < zs.radii.size(); ++k) {
    const cplx lam = zs.zero(k);
    if (zs.symmetric) {
      const cplx q = z / lam;
      sum += std::log(std::abs(1.0 - q * q));
      const double dist = std::min(std::abs(z - lam), std::abs(z + lam));
      if (dist < zs.d) out.excluded = true;
    } else {
      sum += std::log(std::abs(1.0 - z / lam));
      if (std::abs(z - lam) < zs.d) out.excluded = true;
    }
  }
  if (!zs.far_radii.empty()) {
    const cplx u = z / zs.far_scale;
    cplx acc = 0;
    for (int p = kFarFieldOrder; p >= 1; --p) acc = acc * u + zs.moments[p - 1] / double(p);
    sum -= std::real(acc * u);
    // Remainder: sum_k sum_{p>P} |z/l_k|^p / p <= sum_k |u_k|^{P+1} / ((P+1)(1 - |u_k|)),
    // doubled in symmetric mode.
    double tail = 0;
    for (double mu : zs.far_radii) {
      const double a = az / mu;
      if (a >= 1) throw TruncationError("log_abs_N: far-field expansion diverges");
      const double term = std::pow(a, kFarFieldOrder + 1) / ((kFarFieldOrder + 1) * (1 - a));
      tail += term;
      if (term < 1e-30 * std::max(tail, 1e-300)) break;
    }
    out.tail_bound = zs.symmetric ? 2 * tail : tail;
    if (out.tail_bound > tail_tol)
      throw TruncationError("log_abs_N: tail bound " + std::to_string(out.tail_bound) + " exceeds tolerance");
  }
  out.value = sum;
  return out;
}

// ---------------------------------------------------------------------------
// |w(|z|/sigma) - ln|N(z)|| <= A ln(1+|z|) + C0 outside the exclusion discs

struct PolarGrid {
  double r_min = 0.1;
  double r_max = 0;  // 0 -> mu_300 (or the admissible radius if smaller)
  std::size_t n_radii = 300;
  std::size_t n_angles = 64;
};

struct Residual8Fit {
  double A = 0, C0 = 0;
  double max_residual = 0;
  double witness_r = 0, witness_theta = 0;
  std::size_t points = 0, excluded = 0;
  double excluded_fraction = 0;
  double coverage = 1;  // fraction of non-excluded points satisfying the bound
  double r_max = 0;
  Verdict verdict = Verdict::pass;
};

inline double default_r_max(const ZeroSet& zs) {
  const std::size_t idx = std::min<std::size_t>(300, zs.radii.size());
  return std::min(zs.radii[idx - 1], zs.admissible_radius());
}

inline Residual8Fit check_eq8(const ZeroSet& zs, const WeightFunction& wf, const PolarGrid& grid = {}) {
  detail::require(grid.n_radii >= 2 && grid.n_angles >= 1, "check_eq8: grid too small");
  Residual8Fit fit;
  fit.r_max = grid.r_max > 0 ? grid.r_max : default_r_max(zs);
  detail::require(fit.r_max > grid.r_min, "check_eq8: r_max must exceed r_min");
  const auto rs = logspace(grid.r_min, fit.r_max, grid.n_radii);
  std::vector<double> xs, res;
  std::vector<std::pair<double, double>> where;
  for (double r : rs) {
    const double w = wf(r / zs.sigma);
    for (std::size_t a = 0; a < grid.n_angles; ++a) {
      const double theta = 2 * std::numbers::pi * double(a) / double(grid.n_angles);
      const auto lm = log_abs_N(std::polar(r, theta), zs);
      ++fit.points;
      if (lm.excluded) {
        ++fit.excluded;
        continue;
      }
      xs.push_back(std::log1p(r));
      res.push_back(std::abs(w - lm.value));
      where.emplace_back(r, theta);
    }
  }
  fit.excluded_fraction = double(fit.excluded) / double(fit.points);
  if (fit.excluded_fraction > 0.5)
    throw InputError("check_eq8: more than half the grid lies in exclusion discs; shrink d or refine the grid");

  // Upper convex hull of (ln(1+|z|), residual); A is the slope of its last edge.
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] < xs[b] || (xs[a] == xs[b] && res[a] < res[b]);
  });
  std::vector<std::size_t> hull;
  for (std::size_t i : order) {
    while (hull.size() >= 2) {
      const auto p = hull[hull.size() - 2], q = hull.back();
      const double cross = (xs[q] - xs[p]) * (res[i] - res[p]) - (res[q] - res[p]) * (xs[i] - xs[p]);
      if (cross >= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  if (hull.size() >= 2) {
    const auto p = hull[hull.size() - 2], q = hull.back();
    if (xs[q] > xs[p]) fit.A = std::max(0.0, (res[q] - res[p]) / (xs[q] - xs[p]));
  }
  fit.C0 = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.C0 = std::max(fit.C0, res[i] - fit.A * xs[i]);
    if (res[i] > fit.max_residual) {
      fit.max_residual = res[i];
      fit.witness_r = where[i].first;
      fit.witness_theta = where[i].second;
    }
  }
  std::size_t ok = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (res[i] <= fit.A * xs[i] + fit.C0) ++ok;
  fit.coverage = xs.empty() ? 0 : double(ok) / double(xs.size());
  fit.verdict = fit.coverage == 1.0 ? Verdict::pass : Verdict::failed;
  return fit;
}

}  // namespace carleman
