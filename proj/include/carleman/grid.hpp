#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "carleman/errors.hpp"

namespace carleman {

/// n points geometrically spaced on [lo, hi], endpoints exact.
inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  detail::require(lo > 0 && hi >= lo, "logspace: need 0 < lo <= hi");
  detail::require(n >= 2, "logspace: need at least two points");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  detail::require(n >= 2 && hi > lo, "linspace: need n >= 2 and lo < hi");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  out.back() = hi;
  return out;
}

/// Integer floor of a product that is guarded against representation error:
/// a value within 1e-12 (relative) of an integer snaps to that integer.
inline long long guarded_floor(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<long long>(r);
  return static_cast<long long>(std::floor(x));
}

/// Least-squares slope of ys against xs.
inline double ls_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

/// A convex function sampled on a strictly increasing grid, evaluated by
/// linear interpolation. Construction enforces discrete convexity.
class ConvexGridFunction {
 public:
  static constexpr double kSlopeTol = 1e-10;

  ConvexGridFunction(std::vector<double> xs, std::vector<double> vals)
      : xs_(std::move(xs)), vals_(std::move(vals)) {
    detail::require(xs_.size() >= 2, "ConvexGridFunction: need at least two nodes");
    detail::require(xs_.size() == vals_.size(), "ConvexGridFunction: xs/vals length mismatch");
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
      detail::require(xs_[i + 1] > xs_[i], "ConvexGridFunction: abscissae must be strictly increasing");
    const auto bad = first_nonconvex_node();
    if (bad != npos)
      throw InputError("ConvexGridFunction: not convex at node " + std::to_string(bad));
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& vals() const { return vals_; }
  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }

  /// Slope of the segment [xs[i], xs[i+1]].
  double slope(std::size_t i) const { return (vals_[i + 1] - vals_[i]) / (xs_[i + 1] - xs_[i]); }

  bool contains(double x) const { return x >= xs_.front() && x <= xs_.back(); }

  double operator()(double x) const {
    if (!contains(x))
      throw TruncationError("ConvexGridFunction: x = " + std::to_string(x) + " outside [" +
                            std::to_string(xs_.front()) + ", " + std::to_string(xs_.back()) + "]");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = it == xs_.end() ? xs_.size() - 2 : std::size_t(it - xs_.begin()) - 1;
    if (x == xs_[i]) return vals_[i];
    const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return vals_[i] + t * (vals_[i + 1] - vals_[i]);
  }

  /// Index of the middle node of the first slope decrease beyond tolerance.
  /// The tolerance has a relative part and a rounding part scaled by |vals|/dx.
  std::size_t first_nonconvex_node() const {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i + 2 < xs_.size(); ++i) {
      const double s0 = slope(i), s1 = slope(i + 1);
      const double dx = std::min(xs_[i + 1] - xs_[i], xs_[i + 2] - xs_[i + 1]);
      const double tol = kSlopeTol * std::max({1.0, std::abs(s0), std::abs(s1)}) +
                         8 * eps * (std::abs(vals_[i]) + std::abs(vals_[i + 1]) + std::abs(vals_[i + 2])) / dx;
      if (s1 < s0 - tol) return i + 1;
    }
    return npos;
  }

 private:
  std::vector<double> xs_;
  std::vector<double> vals_;
};

/// Supremum of f over a geometric grid on [lo, hi], refined by golden-section
/// search around the best node. The result is `stabilized` when the maximizer
/// lies below hi/10, i.e. the running max is constant over the final decade.
struct SupResult {
  double value = -std::numeric_limits<double>::infinity();
  double argmax = 0;
  bool stabilized = false;
};

template <class F>
SupResult sup_on_halfline(const F& f, double lo, double hi, std::size_t n = 400) {
  const auto xs = logspace(lo, hi, n);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = f(xs[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  SupResult out{best_v, xs[best], false};
  // Golden-section refinement inside the bracket of neighbouring nodes.
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[best + 1 == xs.size() ? best : best + 1];
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  if (fc > out.value) {
    out.value = fc;
    out.argmax = c;
  }
  if (fd > out.value) {
    out.value = fd;
    out.argmax = d;
  }
  out.stabilized = out.argmax < hi / 10;
  return out;
}

}  // namespace carleman
