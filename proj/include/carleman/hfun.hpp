#pragma once

// h_v(s) = liminf_{x->inf} (v(x)/x - v(sx)/(sx)) and l(s) = exp(h(s)), the
// class-V conditions, the subadditivity bound for convex u with u'' <= C/x,
// and the intermediate inequalities derived from them.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/grid.hpp"
#include "carleman/sequences.hpp"

namespace carleman {

using VFun = std::function<double(double)>;

/// Closed forms of v with v(k) = ln M_k for the built-in families.
inline VFun builtin_v(SequenceKind kind, double rho = 1.0) {
  switch (kind) {
    case SequenceKind::mstar: return [rho](double x) { return rho * x * std::log1p(x); };
    case SequenceKind::gammafact: return [rho](double x) { return rho * std::lgamma(x + 2.0); };
    case SequenceKind::arctg: return [](double x) { return (x + 1) * std::log1p(x) * std::atan(x + 1); };
    case SequenceKind::table: break;
  }
  throw InputError("builtin_v: table sequences have no closed form");
}

enum class HMethod { discrete, continuous };

inline const char* to_string(HMethod m) { return m == HMethod::discrete ? "discrete" : "continuous"; }

struct HEstimate {
  double s = 1;
  double proxy = 0;        // tail-window minimum
  double noise = 0;        // tail-error estimate |a(lo) - a(hi)| * hi / (hi - lo)
  double lo = 0, hi = 0;   // window
  double witness = 0;      // abscissa of the minimum
  double trend_slope = 0;  // least-squares slope of the tail terms against 1/x
  HMethod method = HMethod::discrete;
};

struct HWindow {
  double lo;
  double hi;
};

namespace detail {
inline void finish_window(HEstimate& e, std::span<const double> xs, std::span<const double> a) {
  auto it = std::min_element(a.begin(), a.end());
  e.proxy = *it;
  e.witness = xs[static_cast<std::size_t>(it - a.begin())];
  e.noise = std::abs(a.front() - a.back()) * e.hi / (e.hi - e.lo);
  std::vector<double> inv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) inv[i] = 1.0 / xs[i];
  e.trend_slope = ls_slope(inv, a);
}
}  // namespace detail

/// Default discrete window [k_hi/2, k_hi] with k_hi = floor((K-1)/max(s,1)),
/// so that [s k_hi] + 1 <= K.
inline HWindow default_discrete_window(int K, double s) {
  const double hi = std::floor((K - 1) / std::max(s, 1.0));
  return {std::floor(hi / 2), hi};
}

/// Tail minimum of lnM[k]/k - lnM[[sk]+1]/(sk) over the window.
inline HEstimate h_discrete(const LogSequence& seq, double s, std::optional<HWindow> window = {}) {
  detail::require(s > 0, "h_discrete: s must be positive");
  const int K = seq.K();
  const HWindow w = window.value_or(default_discrete_window(K, s));
  HEstimate e;
  e.s = s;
  e.method = HMethod::discrete;
  e.lo = w.lo;
  e.hi = w.hi;
  detail::require(w.lo >= 1 && w.hi > w.lo, "h_discrete: window needs 1 <= k_lo < k_hi");
  const auto klo = static_cast<long long>(w.lo), khi = static_cast<long long>(w.hi);
  if (guarded_floor(s * double(khi)) + 1 > K)
    throw InputError("h_discrete: window exceeds K ([s k_hi] + 1 > K)");
  if (s == 1.0) return e;  // h(1) = 0 by definition
  std::vector<double> xs, a;
  xs.reserve(std::size_t(khi - klo + 1));
  a.reserve(xs.capacity());
  for (long long k = klo; k <= khi; ++k) {
    const double kd = double(k);
    const auto idx = static_cast<std::size_t>(guarded_floor(s * kd) + 1);
    xs.push_back(kd);
    a.push_back(seq.lnM[std::size_t(k)] / kd - seq.lnM[idx] / (s * kd));
  }
  detail::finish_window(e, xs, a);
  return e;
}

/// Tail minimum of v(x)/x - v(sx)/(sx) on a log-spaced grid over [lo, hi].
template <class F>
  requires(!std::same_as<F, ConvexGridFunction>)
HEstimate h_continuous(const F& v, double s, HWindow window, std::size_t points = 2000) {
  detail::require(s > 0, "h_continuous: s must be positive");
  detail::require(window.lo > 0 && window.hi > window.lo, "h_continuous: need 0 < lo < hi");
  HEstimate e;
  e.s = s;
  e.method = HMethod::continuous;
  e.lo = window.lo;
  e.hi = window.hi;
  if (s == 1.0) return e;
  const auto xs = logspace(window.lo, window.hi, points);
  std::vector<double> a(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) a[i] = v(xs[i]) / xs[i] - v(s * xs[i]) / (s * xs[i]);
  detail::finish_window(e, xs, a);
  return e;
}

/// Grid-function version; default window [X/10, X] with X = x_max / max(s, 1).
inline HEstimate h_continuous(const ConvexGridFunction& v, double s, std::optional<HWindow> window = {},
                              std::size_t points = 2000) {
  const double X = v.x_max() / std::max(s, 1.0);
  const HWindow w = window.value_or(HWindow{X / 10, X});
  if (w.hi > v.x_max() || s * w.hi > v.x_max() || w.lo < v.x_min() || s * w.lo < v.x_min())
    throw InputError("h_continuous: window leaves the domain of v");
  return h_continuous([&](double x) { return v(x); }, s, w, points);
}

inline double l_of(const HEstimate& h) { return std::exp(h.proxy); }

// ---------------------------------------------------------------------------
// discrete / continuous agreement

struct Lemma2Row {
  HEstimate discrete, continuous;
  double diff = 0;
  double tolerance = 0;  // 2x the larger window noise
  Verdict verdict = Verdict::pass;
};

inline std::vector<Lemma2Row> lemma2_check(const LogSequence& seq, std::span<const double> s_values) {
  const auto vL = to_vfun(seq);
  std::vector<Lemma2Row> rows;
  for (double s : s_values) {
    Lemma2Row r;
    r.discrete = h_discrete(seq, s);
    r.continuous = h_continuous(vL, s);
    r.diff = std::abs(r.discrete.proxy - r.continuous.proxy);
    r.tolerance = 2 * std::max(r.discrete.noise, r.continuous.noise);
    r.verdict = r.diff <= r.tolerance ? Verdict::pass : Verdict::failed;
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// h property suite and the properties of l

struct PropertyCheck {
  std::string name;
  bool ok = true;
  double value = 0;    // the measured quantity
  double witness = 0;  // s at which it was measured
  double tolerance = 0;
};

struct HSuiteReport {
  std::vector<double> s_grid;
  std::vector<double> h;      // h(s) on s_grid
  std::vector<double> h_inv;  // h(1/s) on s_grid
  double h_below = 0, h_above = 0;  // h(1 - 1e-2), h(1 + 1e-2)
  std::vector<PropertyCheck> properties;
  Verdict verdict = Verdict::pass;
};

inline constexpr double kContinuityProbe = 1e-2;
inline constexpr double kContinuityTol = 5e-2;
inline constexpr double kPairTol = 1e-3;
inline constexpr double kGrowthMin = 1e-3;

namespace detail {
inline HSuiteReport h_table(const LogSequence& seq, std::span<const double> s_grid) {
  require(s_grid.size() >= 2, "lemma1: need at least two s values");
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i)
    require(s_grid[i + 1] > s_grid[i], "lemma1: s grid must be increasing");
  require(s_grid.front() > 0, "lemma1: s must be positive");
  HSuiteReport r;
  r.s_grid.assign(s_grid.begin(), s_grid.end());
  for (double s : s_grid) {
    r.h.push_back(h_discrete(seq, s).proxy);
    r.h_inv.push_back(h_discrete(seq, 1 / s).proxy);
  }
  r.h_below = h_discrete(seq, 1 - kContinuityProbe).proxy;
  r.h_above = h_discrete(seq, 1 + kContinuityProbe).proxy;
  return r;
}

inline void finish_suite(HSuiteReport& r) {
  r.verdict = Verdict::pass;
  for (const auto& p : r.properties)
    if (!p.ok) r.verdict = Verdict::failed;
}
}  // namespace detail

/// The six properties of h_v on a finite s grid:
/// 1 finite, 2 sign pattern, 3 nonincreasing, 4 growth as s -> 0 (the rate
/// kappa = min_{s<1} h(s)/ln(1/s) must be positive), 5 continuity at 1,
/// 6 h(s) + h(1/s) <= tol.
inline HSuiteReport lemma1_suite(const LogSequence& seq, std::span<const double> s_grid) {
  auto r = detail::h_table(seq, s_grid);
  const std::size_t n = r.s_grid.size();

  PropertyCheck finite{"finite"};
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(r.h[i]) || !std::isfinite(r.h_inv[i])) {
      finite.ok = false;
      finite.witness = r.s_grid[i];
      break;
    }
  r.properties.push_back(finite);

  PropertyCheck sign{"sign"};
  for (std::size_t i = 0; i < n && sign.ok; ++i) {
    const double s = r.s_grid[i], h = r.h[i];
    const bool ok = s < 1 ? h > 0 : s > 1 ? h < 0 : h == 0;
    if (!ok) {
      sign.ok = false;
      sign.value = h;
      sign.witness = s;
    }
  }
  r.properties.push_back(sign);

  PropertyCheck mono{"nonincreasing"};
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (r.h[i + 1] > r.h[i]) {
      mono.ok = false;
      mono.value = r.h[i + 1] - r.h[i];
      mono.witness = r.s_grid[i + 1];
      break;
    }
  r.properties.push_back(mono);

  PropertyCheck growth{"growth_at_zero"};
  growth.tolerance = kGrowthMin;
  growth.value = std::numeric_limits<double>::infinity();
  bool any_small = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.s_grid[i] >= 1) continue;
    any_small = true;
    const double kappa = r.h[i] / std::log(1 / r.s_grid[i]);
    if (kappa < growth.value) {
      growth.value = kappa;
      growth.witness = r.s_grid[i];
    }
  }
  detail::require(any_small, "lemma1: s grid needs a value below 1");
  growth.ok = growth.value > kGrowthMin;
  r.properties.push_back(growth);

  PropertyCheck cont{"continuity_at_one"};
  double scale = 1;
  for (double h : r.h) scale = std::max(scale, std::abs(h));
  cont.tolerance = kContinuityTol * scale;
  cont.value = std::max(std::abs(r.h_below), std::abs(r.h_above));
  cont.witness = std::abs(r.h_below) >= std::abs(r.h_above) ? 1 - kContinuityProbe : 1 + kContinuityProbe;
  cont.ok = cont.value <= cont.tolerance;
  r.properties.push_back(cont);

  PropertyCheck pair{"pairing"};
  pair.tolerance = kPairTol;
  pair.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = r.h[i] + r.h_inv[i];
    if (v > pair.value) {
      pair.value = v;
      pair.witness = r.s_grid[i];
    }
  }
  pair.ok = pair.value <= kPairTol;
  r.properties.push_back(pair);

  detail::finish_suite(r);
  return r;
}

/// The six properties of l = exp(h): positive and finite, continuous at 1,
/// l > 1 below 1 and l < 1 above, unbounded as s -> 0, l(s) l(1/s) <= 1,
/// nonincreasing.
inline HSuiteReport l_properties(const LogSequence& seq, std::span<const double> s_grid) {
  auto r = detail::h_table(seq, s_grid);
  const std::size_t n = r.s_grid.size();
  std::vector<double> l(n), l_inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = std::exp(r.h[i]);
    l_inv[i] = std::exp(r.h_inv[i]);
  }

  PropertyCheck pos{"positive_finite"};
  for (std::size_t i = 0; i < n; ++i)
    if (!(l[i] > 0 && std::isfinite(l[i]))) {
      pos.ok = false;
      pos.value = l[i];
      pos.witness = r.s_grid[i];
      break;
    }
  r.properties.push_back(pos);

  PropertyCheck cont{"continuity_at_one"};
  double scale = 1;
  for (double h : r.h) scale = std::max(scale, std::abs(h));
  cont.tolerance = std::expm1(kContinuityTol * scale);
  cont.value = std::max(std::abs(std::expm1(r.h_below)), std::abs(std::expm1(r.h_above)));
  cont.witness = std::abs(r.h_below) >= std::abs(r.h_above) ? 1 - kContinuityProbe : 1 + kContinuityProbe;
  cont.ok = cont.value <= cont.tolerance;
  r.properties.push_back(cont);

  PropertyCheck side{"side_of_one"};
  for (std::size_t i = 0; i < n && side.ok; ++i) {
    const double s = r.s_grid[i];
    const bool ok = s < 1 ? l[i] > 1 : s > 1 ? (l[i] > 0 && l[i] < 1) : l[i] == 1;
    if (!ok) {
      side.ok = false;
      side.value = l[i];
      side.witness = s;
    }
  }
  r.properties.push_back(side);

  PropertyCheck growth{"growth_at_zero"};
  growth.tolerance = kGrowthMin;
  growth.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (r.s_grid[i] >= 1) continue;
    const double kappa = std::log(l[i]) / std::log(1 / r.s_grid[i]);
    if (kappa < growth.value) {
      growth.value = kappa;
      growth.witness = r.s_grid[i];
    }
  }
  detail::require(std::isfinite(growth.value), "l_properties: s grid needs a value below 1");
  growth.ok = growth.value > kGrowthMin;
  r.properties.push_back(growth);

  PropertyCheck pair{"product"};
  pair.tolerance = std::exp(kPairTol);
  pair.value = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (l[i] * l_inv[i] > pair.value) {
      pair.value = l[i] * l_inv[i];
      pair.witness = r.s_grid[i];
    }
  pair.ok = pair.value <= pair.tolerance;
  r.properties.push_back(pair);

  PropertyCheck mono{"nonincreasing"};
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (l[i + 1] > l[i]) {
      mono.ok = false;
      mono.value = l[i + 1] - l[i];
      mono.witness = r.s_grid[i + 1];
      break;
    }
  r.properties.push_back(mono);

  detail::finish_suite(r);
  return r;
}

// ---------------------------------------------------------------------------
// class V

struct V1Fit {
  double A_v = 0, B_v = 0;
  double drop_last_decade = 0;  // decrease of min (v - x ln x)/x over the last decade
  Verdict verdict = Verdict::pass;
};

struct V2Row {
  double s = 0;
  double eta = 0, m = 0;
  double witness = 0;
  Verdict verdict = Verdict::pass;
};

struct V3Row {
  double eps = 0;
  double a = 0, b = 0;
  bool stabilized = true;
  double worst_y = 0;  // y whose inner sup failed to stabilize, if any
  Verdict verdict = Verdict::pass;
};

struct ClassVReport {
  V1Fit v1;
  std::vector<V2Row> v2;
  std::vector<V3Row> v3;
  Verdict verdict = Verdict::pass;
};

struct ClassVOptions {
  double x_max = 1e5;
  std::vector<double> s_grid{1.5, 2.0, 3.0};
  std::vector<double> eps_grid{0.25, 0.5, 1.0};
  double y_max = 1e3;
  std::size_t points = 400;
};

inline constexpr double kV1DropTol = 1e-2;

/// V1 fit: A_v = min over [1, X] of (v(x) - x ln x)/x, B_v = min of the gap
/// below that slope. A minimum still falling over the last decade means
/// v - x ln x is not bounded below by a line.
inline V1Fit fit_v1(const VFun& v, double x_max, std::size_t points = 400) {
  V1Fit f;
  const auto xs = logspace(1.0, x_max, points);
  std::vector<double> g(xs.size());
  double inner = std::numeric_limits<double>::infinity();
  f.A_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    g[i] = v(xs[i]) - xs[i] * std::log(xs[i]);
    const double q = g[i] / xs[i];
    f.A_v = std::min(f.A_v, q);
    if (xs[i] <= x_max / 10) inner = std::min(inner, q);
  }
  f.B_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) f.B_v = std::min(f.B_v, g[i] - f.A_v * xs[i]);
  f.drop_last_decade = inner - f.A_v;
  f.verdict = f.drop_last_decade <= kV1DropTol ? Verdict::pass : Verdict::failed;
  return f;
}

/// V2 fit for one s > 1: eta_s = tail-window minimum of (v(sx) - s v(x))/x on
/// [X/10, X] (X = x_max/s), m_s = min over [0, X] of the remaining gap.
inline V2Row fit_v2(const VFun& v, double s, double x_max, std::size_t points = 400) {
  detail::require(s > 1, "V2: s must exceed 1");
  V2Row row;
  row.s = s;
  const double X = x_max / s;
  auto d = [&](double x) { return v(s * x) - s * v(x); };
  row.eta = std::numeric_limits<double>::infinity();
  for (double x : logspace(X / 10, X, points)) {
    const double q = d(x) / x;
    if (q < row.eta) {
      row.eta = q;
      row.witness = x;
    }
  }
  row.m = d(0.0);
  for (double x : logspace(std::min(1e-3, X), X, points)) row.m = std::min(row.m, d(x) - row.eta * x);
  row.verdict = row.eta > 0 ? Verdict::pass : Verdict::failed;
  return row;
}

/// V3 fit for one eps: S(y) = sup_{x >= 1} v(x+y) - v(x) - eps x on [1, x_max],
/// then a = max over the last y decade of (S(y) - v(y))/y and
/// b = max over y of S(y) - v(y) - a y.
inline V3Row fit_v3(const VFun& v, double eps, double x_max, double y_max, std::size_t points = 400) {
  detail::require(eps > 0, "V3: eps must be positive");
  detail::require(y_max > 1, "V3: y_max must exceed 1");
  V3Row row;
  row.eps = eps;
  const auto ys = logspace(1.0, y_max, 60);
  std::vector<double> e(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    const auto sup = sup_on_halfline([&](double x) { return v(x + y) - v(x) - eps * x; }, 1.0, x_max, points);
    if (!sup.stabilized && row.stabilized) {
      row.stabilized = false;
      row.worst_y = y;
    }
    e[i] = sup.value - v(y);
  }
  row.a = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ys.size(); ++i)
    if (ys[i] >= y_max / 10) row.a = std::max(row.a, e[i] / ys[i]);
  row.b = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ys.size(); ++i) row.b = std::max(row.b, e[i] - row.a * ys[i]);
  row.verdict = row.stabilized ? Verdict::pass : Verdict::inconclusive;
  return row;
}

inline ClassVReport classV_check(const VFun& v, const ClassVOptions& opt = {}) {
  detail::require(v(0.0) == 0.0, "classV: v(0) must be 0");
  ClassVReport r;
  r.v1 = fit_v1(v, opt.x_max, opt.points);
  r.verdict = r.v1.verdict;
  for (double s : opt.s_grid) {
    r.v2.push_back(fit_v2(v, s, opt.x_max, opt.points));
    r.verdict = combine(r.verdict, r.v2.back().verdict);
  }
  for (double eps : opt.eps_grid) {
    r.v3.push_back(fit_v3(v, eps, opt.x_max, opt.y_max, opt.points));
    r.verdict = combine(r.verdict, r.v3.back().verdict);
  }
  return r;
}

// ---------------------------------------------------------------------------
// sup_{x>=1} (u(x+y) - u(x) - eps x) < u(y) + (C ln(2C/eps) + 5C/4) y + Q_eps

struct Prop1Options {
  double x_max = 1e5;
  double y_max = 1e3;
  std::size_t y_points = 40;
  std::size_t x_points = 400;
};

struct Prop1Report {
  double C = 0, eps = 0;
  double slope_B = 0;           // C ln(2C/eps) + 5C/4
  bool curvature_ok = true;     // second divided differences <= C/x
  double curvature_worst = 0;   // max of x u'' / C over the grid
  double curvature_witness = 0;
  double q_eps = 0;             // sup_x u(x+1) - u(x) - eps x / 2
  double Q_constructive = 0;    // -C + eps/4 + 2 q_eps
  double Q_min = 0;             // smallest Q making the bound hold on the y grid
  double witness_y = 0;
  bool stabilized = true;
  Verdict verdict = Verdict::pass;
};

inline Prop1Report prop1_check(const VFun& u, double C, double eps, const Prop1Options& opt = {}) {
  detail::require(C > 0, "prop1: C must be positive");
  detail::require(eps > 0 && eps < C, "prop1: need 0 < eps < C");
  Prop1Report r;
  r.C = C;
  r.eps = eps;
  r.slope_B = C * std::log(2 * C / eps) + 1.25 * C;

  const auto xs = logspace(1.0, opt.x_max, 2000);
  for (std::size_t i = 0; i + 2 < xs.size(); ++i) {
    const double x1 = xs[i], x2 = xs[i + 1], x3 = xs[i + 2];
    const double d2 = 2 * ((u(x3) - u(x2)) / (x3 - x2) - (u(x2) - u(x1)) / (x2 - x1)) / (x3 - x1);
    const double ratio = x1 * d2 / C;
    if (ratio > r.curvature_worst) {
      r.curvature_worst = ratio;
      r.curvature_witness = x1;
    }
  }
  r.curvature_ok = r.curvature_worst <= 1 + 1e-9;

  const auto q = sup_on_halfline([&](double x) { return u(x + 1) - u(x) - eps * x / 2; }, 1.0, opt.x_max,
                                 opt.x_points);
  r.q_eps = std::max(q.value, u(1.0) - u(0.0));
  r.Q_constructive = -C + eps / 4 + 2 * r.q_eps;
  r.stabilized = q.stabilized;

  r.Q_min = -std::numeric_limits<double>::infinity();
  for (double y : logspace(1.0, opt.y_max, opt.y_points)) {
    const auto sup =
        sup_on_halfline([&](double x) { return u(x + y) - u(x) - eps * x; }, 1.0, opt.x_max, opt.x_points);
    if (!sup.stabilized) r.stabilized = false;
    const double need = sup.value - u(y) - r.slope_B * y;
    if (need > r.Q_min) {
      r.Q_min = need;
      r.witness_y = y;
    }
  }
  if (!r.curvature_ok || r.Q_min > r.Q_constructive)
    r.verdict = Verdict::failed;
  else if (!r.stabilized)
    r.verdict = Verdict::inconclusive;
  return r;
}

// ---------------------------------------------------------------------------
// intermediate inequalities

enum class InequalityId { eq2, eq3, eq4, eq5, eq6, eq7 };

inline InequalityId inequality_from_string(const std::string& s) {
  if (s == "eq2") return InequalityId::eq2;
  if (s == "eq3") return InequalityId::eq3;
  if (s == "eq4") return InequalityId::eq4;
  if (s == "eq5") return InequalityId::eq5;
  if (s == "eq6") return InequalityId::eq6;
  if (s == "eq7") return InequalityId::eq7;
  throw InputError("unknown inequality '" + s + "'");
}

inline const char* to_string(InequalityId id) {
  static const char* names[] = {"eq2", "eq3", "eq4", "eq5", "eq6", "eq7"};
  return names[static_cast<int>(id)];
}

struct InequalityParams {
  std::optional<double> eps;  // the eps of the V3 constants
  std::optional<double> a_eps, b_eps;
  double s = 2.0;
  double x_max = 1e6;
  std::size_t points = 400;
};

struct InequalityReport {
  InequalityId id = InequalityId::eq2;
  double residual = 0;  // max violation (lhs - rhs); trend value for eq2; |difference| for eq7
  double witness = 0;
  double tolerance = 0;
  double c_tilde = 0;  // eq6 only
  Verdict verdict = Verdict::pass;
};

inline constexpr double kEq2Tol = 1e-3;

inline InequalityReport verify_inequality(InequalityId id, const VFun& v, const InequalityParams& p) {
  InequalityReport r;
  r.id = id;
  auto need_constants = [&] {
    if (!p.eps || !p.a_eps || !p.b_eps)
      throw InputError(std::string(to_string(id)) + ": needs fitted eps, a_eps, b_eps (run classV first)");
  };
  auto track = [&](double viol, double at) {
    if (viol > r.residual) {
      r.residual = viol;
      r.witness = at;
    }
  };
  auto scale_tol = [&](double mag) { return 1e-9 * std::max(1.0, std::abs(mag)); };
  const auto xs = logspace(1.0, p.x_max, p.points);
  r.residual = -std::numeric_limits<double>::infinity();

  switch (id) {
    case InequalityId::eq2: {
      // (v(x+1) - v(x))/x -> 0: last value small, second half nonincreasing.
      std::vector<double> q(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) q[i] = (v(xs[i] + 1) - v(xs[i])) / xs[i];
      bool decreasing = true;
      for (std::size_t i = q.size() / 2; i + 1 < q.size(); ++i)
        if (q[i + 1] > q[i] * (1 + 1e-12)) decreasing = false;
      r.residual = q.back();
      r.witness = xs.back();
      r.tolerance = kEq2Tol;
      r.verdict = (std::abs(q.back()) <= kEq2Tol && decreasing) ? Verdict::pass : Verdict::failed;
      return r;
    }
    case InequalityId::eq3: {
      need_constants();
      const auto ys = logspace(1.0, std::sqrt(p.x_max), 40);
      double tol = 0;
      for (double y : ys)
        for (double x : logspace(1.0, p.x_max, 120)) {
          const double lhs = v(x + y);
          const double rhs = v(x) + *p.eps * x + v(y) + *p.a_eps * y + *p.b_eps;
          tol = std::max(tol, scale_tol(lhs));
          track(lhs - rhs, y);
        }
      r.tolerance = tol;
      break;
    }
    case InequalityId::eq4: {
      need_constants();
      const double a = *p.a_eps, b = *p.b_eps, e = *p.eps;
      double tol = 0;
      for (double x : xs) {
        const double rhs = (2 * v(1.0) + a + 2 * b + e) * x + (a + e) * x * std::log(x) / std::log(2.0) - b;
        tol = std::max(tol, scale_tol(v(x)));
        track(v(x) - rhs, x);
      }
      r.tolerance = tol;
      break;
    }
    case InequalityId::eq5: {
      need_constants();
      detail::require(p.s > 1, "eq5: s must exceed 1");
      const double s = p.s;
      const double N = std::ceil(s) - 1;  // s in (N, N+1]
      const double x0 = 1 / (s - N);
      double tol = 0;
      for (double x : logspace(x0, p.x_max / s, p.points)) {
        const double lhs = v(s * x);
        const double rhs = s * v(x) + (*p.eps + *p.a_eps * (2 * s - N - 1) / 2) * s * x + *p.b_eps * s;
        tol = std::max(tol, scale_tol(lhs));
        track(lhs - rhs, x);
      }
      r.tolerance = tol;
      break;
    }
    case InequalityId::eq6: {
      need_constants();
      detail::require(p.s > 1, "eq6: s must exceed 1");
      const double s = p.s;
      const double N = std::ceil(s) - 1;
      const double x0 = 1 / (s - N);
      auto gap = [&](double x) {
        return v(s * x) - s * v(x) - (*p.eps + *p.a_eps * s / 2) * s * x - *p.b_eps * s;
      };
      // c~_s absorbs the range [0, x0) not covered by the (N, N+1] estimate.
      r.c_tilde = std::max(0.0, gap(0.0));
      for (double x : linspace(0.0, x0, 200)) r.c_tilde = std::max(r.c_tilde, gap(x));
      double tol = 0;
      for (double x : logspace(std::min(1e-3, x0), p.x_max / s, p.points)) {
        tol = std::max(tol, scale_tol(v(s * x)));
        track(gap(x) - r.c_tilde, x);
      }
      r.tolerance = tol;
      break;
    }
    case InequalityId::eq7: {
      // h(s) from the definition against liminf (v(x/s)/(x/s) - v(x)/x).
      detail::require(p.s > 0, "eq7: s must be positive");
      const double s = p.s;
      const double X = p.x_max / std::max(s, 1.0);
      const auto direct = h_continuous(v, s, HWindow{X / 10, X});
      const double Xr = p.x_max / std::max(1 / s, 1.0);
      HEstimate rep;
      if (s != 1.0) {
        const auto g = [&](double x) { return -v(x) / x; };
        // terms v(x/s)/(x/s) - v(x)/x on x in [Xr/10, Xr]
        const auto grid = logspace(Xr / 10, Xr, 2000);
        std::vector<double> a(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) a[i] = v(grid[i] / s) / (grid[i] / s) + g(grid[i]);
        rep.lo = Xr / 10;
        rep.hi = Xr;
        detail::finish_window(rep, grid, a);
      }
      r.residual = std::abs(direct.proxy - rep.proxy);
      r.witness = s;
      r.tolerance = 2 * std::max(direct.noise, rep.noise);
      r.verdict = r.residual <= r.tolerance ? Verdict::pass : Verdict::failed;
      return r;
    }
  }
  r.verdict = r.residual <= r.tolerance ? Verdict::pass : Verdict::failed;
  return r;
}

}  // namespace carleman
