#pragma once

// Log-convex sequences M_k and numerical membership tests for the class
// defined by conditions i1 (log-convexity), i2 (factorial lower bound),
// i3 (super-power growth of M_[sn] / M_n^s) and i4 (shift stability).
// Everything is carried in the log domain: lnM[k] = ln M_k.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carleman/errors.hpp"
#include "carleman/grid.hpp"

namespace carleman {

enum class SequenceKind { mstar, gammafact, arctg, table };

inline const char* to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::mstar: return "mstar";
    case SequenceKind::gammafact: return "gammafact";
    case SequenceKind::arctg: return "arctg";
    case SequenceKind::table: return "table";
  }
  return "unknown";
}

inline SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "mstar") return SequenceKind::mstar;
  if (s == "gammafact") return SequenceKind::gammafact;
  if (s == "arctg") return SequenceKind::arctg;
  if (s == "table") return SequenceKind::table;
  throw InputError("unknown sequence kind '" + s + "'");
}

struct SequenceSpec {
  SequenceKind kind = SequenceKind::mstar;
  double rho = 1.0;
  int K = 2000;
  std::vector<double> table;  // lnM values, used when kind == table
};

struct LogSequence {
  std::string name;
  std::map<std::string, double> params;
  std::vector<double> lnM;

  int K() const { return static_cast<int>(lnM.size()) - 1; }
  double operator[](std::size_t k) const { return lnM[k]; }
};

/// ln M_k for the built-in families, evaluated directly from the closed form.
inline double builtin_lnM(SequenceKind kind, double rho, long long k) {
  const double x = static_cast<double>(k);
  switch (kind) {
    case SequenceKind::mstar: return rho * x * std::log1p(x);             // (k+1)^{rho k}
    case SequenceKind::gammafact: return rho * std::lgamma(x + 2.0);      // Gamma(k+2)^rho
    case SequenceKind::arctg: return (x + 1) * std::log1p(x) * std::atan(x + 1);
    case SequenceKind::table: break;
  }
  throw InputError("builtin_lnM: table sequences have no closed form");
}

inline LogSequence build_sequence(const SequenceSpec& spec) {
  LogSequence seq;
  seq.name = to_string(spec.kind);
  if (spec.kind == SequenceKind::table) {
    detail::require(spec.table.size() >= 3, "table sequence needs K >= 2 (at least 3 values)");
    detail::require(spec.table.front() == 0.0, "table sequence must start with lnM[0] = 0");
    for (std::size_t k = 0; k + 1 < spec.table.size(); ++k)
      if (!(spec.table[k + 1] > spec.table[k]))
        throw InputError("table sequence is not strictly increasing at k = " + std::to_string(k + 1));
    seq.lnM = spec.table;
    return seq;
  }
  detail::require(spec.K >= 2, "sequence needs K >= 2");
  if (spec.kind != SequenceKind::arctg) {
    detail::require(spec.rho >= 1.0, "rho must be >= 1");
    seq.params["rho"] = spec.rho;
  }
  seq.lnM.resize(static_cast<std::size_t>(spec.K) + 1);
  for (int k = 0; k <= spec.K; ++k) seq.lnM[k] = builtin_lnM(spec.kind, spec.rho, k);
  seq.lnM[0] = 0.0;
  return seq;
}

/// Smallest K (doubling from spec.K) whose last breakpoint lnM[K]-lnM[K-1]
/// reaches ln(r_max), so the associated weight is exact up to r_max.
inline LogSequence build_sequence_covering(SequenceSpec spec, double r_max) {
  if (spec.kind == SequenceKind::table) return build_sequence(spec);
  const double target = std::log(r_max);
  for (;;) {
    if (builtin_lnM(spec.kind, spec.rho, spec.K) - builtin_lnM(spec.kind, spec.rho, spec.K - 1) >= target)
      return build_sequence(spec);
    detail::require(spec.K < (1 << 26), "build_sequence_covering: radius needs an unreasonable K");
    spec.K *= 2;
  }
}

// ---------------------------------------------------------------------------
// i1: L_n^2 <= L_{n-1} L_{n+1}

struct I1Result {
  bool ok = true;
  std::optional<int> first_violation;
  double min_second_difference = 0;
};

inline I1Result check_i1(std::span<const double> lnM) {
  detail::require(lnM.size() >= 3, "check_i1: need K >= 2");
  I1Result out;
  out.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < lnM.size(); ++k) {
    const double d2 = lnM[k + 1] - 2 * lnM[k] + lnM[k - 1];
    out.min_second_difference = std::min(out.min_second_difference, d2);
    if (d2 < -1e-12 * std::max(1.0, std::abs(lnM[k + 1])) && out.ok) {
      out.ok = false;
      out.first_violation = static_cast<int>(k);
    }
  }
  return out;
}

inline I1Result check_i1(const LogSequence& seq) { return check_i1(std::span<const double>(seq.lnM)); }

// ---------------------------------------------------------------------------
// i2: L_n >= H1 H2^n n!

struct I2Result {
  double H1 = 0, H2 = 0;
  double lnH1 = 0, lnH2 = 0;
  double residual = 0;       // min_k lnM[k] - ln k! - k lnH2 - lnH1, >= 0 when satisfied
  int residual_at = 0;
  double tail_drift = 0;     // g(K) - g(K/2), g(k) = (lnM[k] - ln k!)/k
  Verdict verdict = Verdict::pass;
};

inline I2Result estimate_i2(const LogSequence& seq) {
  const int K = seq.K();
  detail::require(K >= 10, "estimate_i2: need K >= 10");
  auto g = [&](int k) { return (seq.lnM[k] - std::lgamma(k + 1.0)) / k; };
  I2Result out;
  out.lnH2 = std::numeric_limits<double>::infinity();
  for (int k = K / 2; k <= K; ++k) out.lnH2 = std::min(out.lnH2, g(k));
  out.lnH1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= K; ++k)
    out.lnH1 = std::min(out.lnH1, seq.lnM[k] - std::lgamma(k + 1.0) - k * out.lnH2);
  out.residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= K; ++k) {
    const double r = seq.lnM[k] - std::lgamma(k + 1.0) - k * out.lnH2 - out.lnH1;
    if (r < out.residual) {
      out.residual = r;
      out.residual_at = k;
    }
  }
  out.H1 = std::exp(out.lnH1);
  out.H2 = std::exp(out.lnH2);
  out.tail_drift = g(K) - g(K / 2);
  // A sequence growing like C^k (slower than k!) has g(k) ~ -ln k, so g drops
  // by about ln 2 across the tail half; factorial-type sequences settle.
  if (out.residual < -1e-9 || out.tail_drift < -0.5 * std::log(2.0)) out.verdict = Verdict::failed;
  return out;
}

// ---------------------------------------------------------------------------
// i3: liminf (L_[sn] / L_n^s)^{1/n} > 1

struct I3Row {
  double s = 0;
  double proxy = 0;        // min over window of (lnM[[sn]] - s lnM[n]) / n
  int witness_n = 0;
  double trend_slope = 0;
  int n_lo = 0, n_hi = 0;
  double bound = 0;        // ln(1 + margin)
  Verdict verdict = Verdict::pass;
};

inline constexpr double kI3Margin = 1e-3;

inline std::vector<I3Row> check_i3(const LogSequence& seq, std::span<const double> s_values,
                                   double window = 0.1) {
  const int K = seq.K();
  std::vector<I3Row> rows;
  for (double s : s_values) {
    detail::require(s > 1, "check_i3: s must exceed 1");
    I3Row row;
    row.s = s;
    row.n_lo = std::max(1, static_cast<int>(std::ceil(K * window)));
    row.n_hi = static_cast<int>(std::floor(K / s));
    detail::require(row.n_hi - row.n_lo + 1 >= 20,
                    "check_i3: window has fewer than 20 points for s = " + std::to_string(s));
    std::vector<double> ns, as;
    row.proxy = std::numeric_limits<double>::infinity();
    for (int n = row.n_lo; n <= row.n_hi; ++n) {
      const long long m = guarded_floor(s * n);
      const double a = (seq.lnM[m] - s * seq.lnM[n]) / n;
      ns.push_back(n);
      as.push_back(a);
      if (a < row.proxy) {
        row.proxy = a;
        row.witness_n = n;
      }
    }
    row.trend_slope = ls_slope(ns, as);
    row.bound = std::log1p(kI3Margin);
    row.verdict = (row.proxy > row.bound && row.trend_slope >= 0) ? Verdict::pass : Verdict::failed;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// i4: sup_m L_{m+n} / (L_m (1+delta)^m) <= p t^n L_n

struct I4Result {
  double delta = 0;
  double ln_p = 0, ln_t = 0;
  double p = 0, t = 0;
  double residual = 0;      // max_n S(n) - lnM[n] - ln p - n ln t, <= 0 when satisfied
  int witness_n = 0;
  int max_argmax_m = 0;     // largest maximizing m seen over all n
  Verdict verdict = Verdict::pass;
};

inline I4Result check_i4(const LogSequence& seq, double delta, int n_max, int m_max) {
  detail::require(delta > 0, "check_i4: delta must be positive");
  detail::require(n_max >= 1 && m_max >= 1, "check_i4: n_max, m_max must be positive");
  detail::require(n_max + m_max <= seq.K(), "check_i4: n_max + m_max exceeds K");
  const double ld = std::log1p(delta);
  I4Result out;
  out.delta = delta;
  std::vector<double> D(static_cast<std::size_t>(n_max) + 1);
  bool rising_at_edge = false;
  for (int n = 0; n <= n_max; ++n) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int m = 0; m <= m_max; ++m) {
      const double v = seq.lnM[m + n] - seq.lnM[m] - m * ld;
      if (v > best) {
        best = v;
        arg = m;
      }
    }
    out.max_argmax_m = std::max(out.max_argmax_m, arg);
    if (arg == m_max) rising_at_edge = true;
    D[n] = best - seq.lnM[n];
  }
  double max_step = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < n_max; ++n) max_step = std::max(max_step, D[n + 1] - D[n]);
  out.ln_t = std::max(max_step, std::numeric_limits<double>::epsilon());
  out.ln_p = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_max; ++n) out.ln_p = std::max(out.ln_p, D[n] - n * out.ln_t);
  out.residual = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_max; ++n) {
    const double r = D[n] - out.ln_p - n * out.ln_t;
    if (r > out.residual) {
      out.residual = r;
      out.witness_n = n;
    }
  }
  out.p = std::exp(out.ln_p);
  out.t = std::exp(out.ln_t);
  if (rising_at_edge)
    out.verdict = Verdict::inconclusive;
  else if (out.residual > 1e-9)
    out.verdict = Verdict::failed;
  return out;
}

// ---------------------------------------------------------------------------
// (L_{n+1}/L_n)^{1/n} -> 1

struct Eq1Row {
  int n;
  double value;
};

struct Eq1Result {
  std::vector<Eq1Row> rows;
  double last = 0;
  Verdict verdict = Verdict::pass;
};

inline constexpr double kEq1Tol = 5e-2;

inline Eq1Result check_eq1_limit(std::span<const double> lnM, std::size_t points = 40) {
  const int K = static_cast<int>(lnM.size()) - 1;
  detail::require(K >= 3, "check_eq1_limit: need K >= 3");
  Eq1Result out;
  int prev = 0;
  for (double x : logspace(1.0, K - 1.0, points)) {
    const int n = static_cast<int>(std::lround(x));
    if (n == prev) continue;
    prev = n;
    out.rows.push_back({n, std::exp((lnM[n + 1] - lnM[n]) / n)});
  }
  out.last = out.rows.back().value;
  bool decreasing = true;
  for (std::size_t i = out.rows.size() / 2; i + 1 < out.rows.size(); ++i)
    if (out.rows[i + 1].value > out.rows[i].value * (1 + 1e-12)) decreasing = false;
  out.verdict = (out.last - 1 <= kEq1Tol && decreasing) ? Verdict::pass : Verdict::failed;
  return out;
}

inline Eq1Result check_eq1_limit(const LogSequence& seq) {
  detail::require(seq.K() >= 100, "check_eq1_limit: need K >= 100");
  return check_eq1_limit(std::span<const double>(seq.lnM));
}

// ---------------------------------------------------------------------------

/// Piecewise-linear interpolant v_L through (k, lnM[k]).
inline ConvexGridFunction to_vfun(const LogSequence& seq) {
  const auto i1 = check_i1(seq);
  if (!i1.ok) throw InputError("to_vfun: sequence is not log-convex at k = " + std::to_string(*i1.first_violation));
  std::vector<double> xs(seq.lnM.size());
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = static_cast<double>(k);
  return ConvexGridFunction(std::move(xs), seq.lnM);
}

/// Condensed class-membership report over default grids.
struct ClassMReport {
  I1Result i1;
  I2Result i2;
  std::vector<I3Row> i3;
  std::vector<I4Result> i4;
  Eq1Result eq1;
  Verdict verdict = Verdict::pass;
};

struct ClassMOptions {
  std::vector<double> s_values{1.5, 2.0, 3.0};
  std::vector<double> deltas{0.1, 0.5, 1.0};
  double i3_window = 0.1;
  int i4_n_max = 0;  // 0 -> K/40
};

inline ClassMReport check_class_m(const LogSequence& seq, const ClassMOptions& opt = {}) {
  ClassMReport r;
  r.i1 = check_i1(seq);
  r.i2 = estimate_i2(seq);
  r.i3 = check_i3(seq, opt.s_values, opt.i3_window);
  const int n_max = opt.i4_n_max > 0 ? opt.i4_n_max : std::max(1, seq.K() / 40);
  for (double d : opt.deltas) r.i4.push_back(check_i4(seq, d, n_max, seq.K() - n_max));
  r.eq1 = check_eq1_limit(std::span<const double>(seq.lnM));
  r.verdict = r.i1.ok ? Verdict::pass : Verdict::failed;
  r.verdict = combine(r.verdict, r.i2.verdict);
  for (const auto& row : r.i3) r.verdict = combine(r.verdict, row.verdict);
  for (const auto& row : r.i4) r.verdict = combine(r.verdict, row.verdict);
  r.verdict = combine(r.verdict, r.eq1.verdict);
  return r;
}

}  // namespace carleman
