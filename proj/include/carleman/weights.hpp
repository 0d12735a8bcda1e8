#pragma once

// Associated weight w(r) = sup_k ln(r^k / M_k), held exactly as a convex
// piecewise-linear function of t = ln r with integer slopes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carleman/conjugates.hpp"
#include "carleman/errors.hpp"
#include "carleman/grid.hpp"
#include "carleman/sequences.hpp"

namespace carleman {

struct WeightValue {
  double value;
  int k;  // maximizing index, smallest on ties
};

class WeightFunction {
 public:
  explicit WeightFunction(const LogSequence& seq) : WeightFunction(std::span<const double>(seq.lnM)) {}

  explicit WeightFunction(std::span<const double> lnM) : lnM_(lnM.begin(), lnM.end()) {
    detail::require(lnM_.size() >= 3, "WeightFunction: need K >= 2");
    detail::require(lnM_[0] == 0.0, "WeightFunction: lnM[0] must be 0");
    const auto i1 = check_i1(lnM);
    if (!i1.ok)
      throw InputError("WeightFunction: breakpoints decrease (i1 fails) at k = " +
                       std::to_string(*i1.first_violation));
    t_.resize(lnM_.size());
    t_[0] = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < lnM_.size(); ++k) t_[k] = lnM_[k] - lnM_[k - 1];
  }

  int K() const { return static_cast<int>(lnM_.size()) - 1; }
  const std::vector<double>& lnM() const { return lnM_; }

  /// t_k = ln(M_k / M_{k-1}); the slope of w(e^t) is k on [t_k, t_{k+1}].
  double breakpoint(int k) const { return t_.at(static_cast<std::size_t>(k)); }
  double mu(int k) const { return std::exp(breakpoint(k)); }

  /// Largest radius answered without truncation.
  double r_max() const { return std::exp(t_.back()); }

  WeightValue eval(double r) const {
    detail::require(r >= 0 && std::isfinite(r), "eval_w: r must be finite and >= 0");
    if (r == 0) return {0.0, 0};
    const double lr = std::log(r);
    if (lr > t_.back())
      throw TruncationError("eval_w: ln r = " + std::to_string(lr) + " beyond last breakpoint t_K = " +
                            std::to_string(t_.back()) + "; increase K");
    int k = static_cast<int>(std::lower_bound(t_.begin() + 1, t_.end(), lr) - (t_.begin() + 1));
    auto at = [&](int j) { return j * lr - lnM_[j]; };
    // Rounding in t_k can misplace ln r by one interval; settle locally.
    while (k < K() && at(k + 1) > at(k)) ++k;
    while (k > 0 && at(k - 1) >= at(k) - 1e-14 * std::max(1.0, std::abs(at(k)))) --k;
    return {std::max(at(k), 0.0), k};
  }

  double operator()(double r) const { return eval(r).value; }
  int counting(double r) const { return eval(r).k; }

 private:
  std::vector<double> lnM_;
  std::vector<double> t_;
};

/// w_m(r) = w(r / (sigma + eps_m)), eps_m = 1/m unless overridden.
struct WeightFamily {
  WeightFunction wf;
  double sigma = 1.0;
  std::function<double(int)> eps = [](int m) { return 1.0 / m; };

  WeightFamily(WeightFunction w, double s) : wf(std::move(w)), sigma(s) {
    detail::require(sigma > 0, "WeightFamily: sigma must be positive");
  }

  double scale(int m) const {
    detail::require(m >= 1, "WeightFamily: m must be >= 1");
    const double e = eps(m);
    detail::require(e > 0, "WeightFamily: eps_m must be positive");
    return sigma + e;
  }

  double w_m(int m, double r) const { return wf(r / scale(m)); }
};

// ---------------------------------------------------------------------------
// w(r) <= A_w r

struct LinearBound {
  double A_w = 0;
  double argmax = 0;
  double max_grid_violation = 0;  // max of w(r) - A_w r over the grid, <= 0 when verified
  bool verified = true;
};

/// Exact sup of w(r)/r on (0, r_max]. On the slope-k piece the ratio
/// (k ln r - lnM_k)/r peaks at ln r = 1 + lnM_k/k, so candidates are the piece
/// ends and that critical point.
inline LinearBound linear_bound_Aw(const WeightFunction& wf, double r_max, std::size_t grid_points = 2000) {
  detail::require(r_max > 0, "linear_bound_Aw: r_max must be positive");
  if (std::log(r_max) > wf.breakpoint(wf.K()))
    throw TruncationError("linear_bound_Aw: r_max beyond the last breakpoint");
  LinearBound out;
  const double lmax = std::log(r_max);
  auto consider = [&](double lr) {
    const double r = std::exp(lr);
    const double q = wf(r) / r;
    if (q > out.A_w) {
      out.A_w = q;
      out.argmax = r;
    }
  };
  for (int k = 1; k <= wf.K(); ++k) {
    const double lo = wf.breakpoint(k);
    if (lo > lmax) break;
    const double hi = k < wf.K() ? std::min(wf.breakpoint(k + 1), lmax) : lmax;
    consider(lo);
    consider(hi);
    const double crit = 1 + wf.lnM()[k] / k;
    if (crit > lo && crit < hi) consider(crit);
  }
  for (double r : logspace(std::min(1e-3, r_max), r_max, grid_points)) {
    const double gap = wf(r) - out.A_w * r;
    out.max_grid_violation = std::max(out.max_grid_violation, gap);
  }
  out.verified = out.max_grid_violation <= 1e-12 * std::max(1.0, out.A_w * r_max);
  return out;
}

// ---------------------------------------------------------------------------
// rho e^{-1} r^{1/rho} - 2 ln r <= w*(r) <= rho e^{-1} r^{1/rho}

struct SandwichReport {
  double rho = 1;
  double min_lower_slack = std::numeric_limits<double>::infinity();  // w - lower
  double min_upper_slack = std::numeric_limits<double>::infinity();  // upper - w
  double witness_lower = 0, witness_upper = 0;
  std::size_t checked = 0, skipped = 0;
  double tolerance = 1e-9;
  Verdict verdict = Verdict::pass;
};

/// Checks the two-sided bound at every r in r_grid with r > e^rho; wf must be
/// the weight of mstar(rho).
inline SandwichReport check_sandwich_mstar(const WeightFunction& wf, double rho, std::span<const double> r_grid) {
  detail::require(rho >= 1, "sandwich: rho must be >= 1");
  SandwichReport out;
  out.rho = rho;
  const double c = rho / std::exp(1.0);
  for (double r : r_grid) {
    if (!(r > std::exp(rho))) {
      ++out.skipped;
      continue;
    }
    const double w = wf(r);
    const double upper = c * std::pow(r, 1 / rho);
    const double lower = upper - 2 * std::log(r);
    ++out.checked;
    if (w - lower < out.min_lower_slack) {
      out.min_lower_slack = w - lower;
      out.witness_lower = r;
    }
    if (upper - w < out.min_upper_slack) {
      out.min_upper_slack = upper - w;
      out.witness_upper = r;
    }
  }
  detail::require(out.checked > 0, "sandwich: no grid point above e^rho");
  const bool ok = out.min_lower_slack >= -out.tolerance && out.min_upper_slack >= -out.tolerance;
  out.verdict = ok ? Verdict::pass : Verdict::failed;
  return out;
}

/// Builds mstar(rho) with K large enough for r_max and checks n log-spaced
/// radii in (e^rho, r_max].
inline SandwichReport check_sandwich_mstar(double rho, double r_max, std::size_t n = 500) {
  detail::require(r_max > std::exp(rho), "sandwich: r_max must exceed e^rho");
  const auto seq = build_sequence_covering({SequenceKind::mstar, rho, 2000, {}}, r_max);
  const WeightFunction wf(seq);
  auto grid = logspace(std::exp(rho), r_max, n + 1);
  grid.erase(grid.begin());
  return check_sandwich_mstar(wf, rho, grid);
}

// ---------------------------------------------------------------------------
// family gaps (lemma3_gap, lemma4_gap)

struct GapResult {
  double Q = 0;
  double maximizer = 0;
  bool stabilized = false;
  double r_max = 0;
  Verdict verdict = Verdict::pass;
};

namespace detail {
template <class F>
GapResult gap_scan(const F& f, double r_max, std::size_t n) {
  require(r_max > 1, "gap scan: r_max must exceed 1");
  GapResult out;
  out.r_max = r_max;
  // r = 0 contributes exactly 0 to every gap considered here.
  out.Q = 0;
  out.maximizer = 0;
  const auto sup = sup_on_halfline(f, 1e-3, r_max, n);
  if (sup.value > out.Q) {
    out.Q = sup.value;
    out.maximizer = sup.argmax;
  }
  out.stabilized = out.maximizer < r_max / 10;
  out.verdict = std::isfinite(out.Q) && out.stabilized ? Verdict::pass : Verdict::inconclusive;
  return out;
}
}  // namespace detail

/// Q = max_r w_m(r) + A ln(1+r) - w_{m+1}(r) over [0, r_max].
inline GapResult lemma3_gap(const WeightFamily& fam, int m, double A, double r_max, std::size_t n = 4000) {
  detail::require(m >= 1, "lemma3: m must be >= 1");
  detail::require(A >= 0, "lemma3: A must be nonnegative");
  if (r_max / fam.scale(m + 1) > fam.wf.r_max())
    throw TruncationError("lemma3: r_max / (sigma + eps_{m+1}) beyond the weight's range; increase K");
  auto f = [&](double r) { return fam.w_m(m, r) + A * std::log1p(r) - fam.w_m(m + 1, r); };
  return detail::gap_scan(f, r_max, n);
}

/// Q = max_r s w(r) - w(r / (l_s (1 - delta))) over [0, r_max].
inline GapResult lemma4_gap(const WeightFunction& wf, double s, double delta, double l_s, double r_max,
                            std::size_t n = 4000) {
  detail::require(s > 0, "lemma4: s must be positive");
  detail::require(delta > 0 && delta < 1, "lemma4: need 0 < delta < 1");
  detail::require(l_s > 0, "lemma4: l(s) must be positive");
  const double c = l_s * (1 - delta);
  if (r_max / c > wf.r_max() || r_max > wf.r_max())
    throw TruncationError("lemma4: r_max / (l_s (1 - delta)) beyond the weight's range; increase K");
  auto f = [&](double r) { return s * wf(r) - wf(r / c); };
  return detail::gap_scan(f, r_max, n);
}

// ---------------------------------------------------------------------------
// k(z) = exp(psi(Im z) + w(|z| / sigma))

struct KWeight {
  PsiSpec psi;
  WeightFunction wf;
  double sigma;

  double log_k(std::complex<double> z) const { return psi(z.imag()) + wf(std::abs(z) / sigma); }
};

inline KWeight make_kweight(PsiSpec psi, WeightFunction wf, double sigma) {
  detail::require(sigma > 0, "make_kweight: sigma must be positive");
  return {std::move(psi), std::move(wf), sigma};
}

struct RatioReport {
  int m = 0;
  double max_log_ratio = -std::numeric_limits<double>::infinity();
  double max_ratio = 0;
  std::complex<double> witness{};
  std::size_t checked = 0;
  Verdict verdict = Verdict::pass;
};

/// sup over z of exp(psi(Im z) + w_m(|z|)) / k(z); must not exceed 1.
inline RatioReport ratio_check(const KWeight& kw, const std::function<double(int)>& eps, int m,
                               std::span<const std::complex<double>> zs) {
  detail::require(m >= 1, "ratio_check: m must be >= 1");
  const double scale = kw.sigma + eps(m);
  RatioReport out;
  out.m = m;
  for (auto z : zs) {
    const double lr = kw.psi(z.imag()) + kw.wf(std::abs(z) / scale) - kw.log_k(z);
    ++out.checked;
    if (lr > out.max_log_ratio) {
      out.max_log_ratio = lr;
      out.witness = z;
    }
  }
  detail::require(out.checked > 0, "ratio_check: empty z grid");
  out.max_ratio = std::exp(out.max_log_ratio);
  out.verdict = out.max_log_ratio <= 0 ? Verdict::pass : Verdict::failed;
  return out;
}

}  // namespace carleman
