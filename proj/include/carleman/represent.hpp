#pragma once

// Exponential sums sum_j c_j exp(-i nu_j x) fitted by weighted least squares
// to a target f, with residuals measured in the seminorms
//   p_m(f) = sup_{x,k} |f^(k)(x)| / ((sigma + eps_m)^k M_k theta_m(x)).

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carleman/conjugates.hpp"
#include "carleman/entire.hpp"
#include "carleman/errors.hpp"
#include "carleman/grid.hpp"
#include "carleman/weights.hpp"

namespace carleman {

enum class TargetKind { gaussian, cosine, table };

inline const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::gaussian: return "gaussian";
    case TargetKind::cosine: return "cos";
    case TargetKind::table: return "table";
  }
  return "unknown";
}

inline TargetKind target_kind_from_string(const std::string& s) {
  if (s == "gaussian") return TargetKind::gaussian;
  if (s == "cos") return TargetKind::cosine;
  if (s == "table") return TargetKind::table;
  throw InputError("unknown target '" + s + "'");
}

/// f(x) = exp(-a x^2), cos(omega x), or a sampled table (order 0 only).
struct TargetFunction {
  TargetKind kind = TargetKind::gaussian;
  double param = 1.0;  // a for gaussian, omega for cos
  std::vector<double> table_x, table_y;

  static TargetFunction gaussian(double a) {
    detail::require(a > 0, "gaussian target: a must be positive");
    return {TargetKind::gaussian, a, {}, {}};
  }
  static TargetFunction cosine(double omega) { return {TargetKind::cosine, omega, {}, {}}; }
  static TargetFunction table(std::vector<double> xs, std::vector<double> ys) {
    detail::require(xs.size() >= 2 && xs.size() == ys.size(), "table target: need matching xs, ys");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      detail::require(xs[i + 1] > xs[i], "table target: xs must be strictly increasing");
    return {TargetKind::table, 0, std::move(xs), std::move(ys)};
  }

  int max_order() const { return kind == TargetKind::table ? 0 : 64; }

  /// k-th derivative at x.
  double derivative(int k, double x) const {
    detail::require(k >= 0, "target derivative: order must be >= 0");
    if (k > max_order())
      throw InputError("target derivative: order " + std::to_string(k) + " beyond the oracle (max " +
                       std::to_string(max_order()) + ")");
    switch (kind) {
      case TargetKind::gaussian: {
        // d^k/dx^k exp(-a x^2) = (-sqrt a)^k H_k(sqrt a x) exp(-a x^2), H the physicists' Hermite.
        const double ra = std::sqrt(param), y = ra * x;
        double h0 = 1, h1 = 2 * y;
        double hk = k == 0 ? h0 : h1;
        for (int n = 1; n < k; ++n) {
          hk = 2 * y * h1 - 2 * n * h0;
          h0 = h1;
          h1 = hk;
        }
        return std::pow(-ra, k) * hk * std::exp(-y * y);
      }
      case TargetKind::cosine:
        return std::pow(param, k) * std::cos(param * x + k * std::numbers::pi / 2);
      case TargetKind::table: {
        if (x < table_x.front() || x > table_x.back())
          throw TruncationError("table target: x outside the table");
        auto it = std::upper_bound(table_x.begin(), table_x.end(), x);
        const std::size_t i = it == table_x.end() ? table_x.size() - 2 : std::size_t(it - table_x.begin()) - 1;
        const double t = (x - table_x[i]) / (table_x[i + 1] - table_x[i]);
        return table_y[i] + t * (table_y[i + 1] - table_y[i]);
      }
    }
    return 0;
  }

  double operator()(double x) const { return derivative(0, x); }
};

/// The data behind p_m: the sequence (through the weight), sigma, eps_m, and
/// phi sampled on the fit grid.
struct WeightedSpace {
  WeightFunction wf;
  double sigma = 1;
  std::function<double(int)> eps = [](int m) { return 1.0 / m; };
  ConvexGridFunction phi;

  double log_theta(int m, double x) const { return theta_m(m, x, phi).log_value; }
};

/// phi = psi* on xs (which must be increasing).
inline WeightedSpace make_space(WeightFunction wf, double sigma, const PsiSpec& psi, std::span<const double> xs) {
  detail::require(sigma > 0, "weighted space: sigma must be positive");
  auto conj = conjugate_psi(psi, xs);
  if (conj.any_edge()) throw TruncationError("weighted space: phi grid exceeds the psi grid; enlarge Y");
  return {std::move(wf), sigma, [](int m) { return 1.0 / m; }, std::move(conj.g)};
}

/// +mu_1, -mu_1, +mu_2, -mu_2, ... from the first J radii of the zero set.
inline std::vector<double> symmetric_frequencies(const ZeroSet& zs, int J) {
  detail::require(J >= 1 && J <= zs.J(), "symmetric_frequencies: need 1 <= J <= explicit zeros");
  std::vector<double> nu;
  for (int k = 0; k < J; ++k) {
    nu.push_back(zs.radii[std::size_t(k)]);
    nu.push_back(-zs.radii[std::size_t(k)]);
  }
  return nu;
}

enum class Penalty { kweighted, ridge };

inline const char* to_string(Penalty p) { return p == Penalty::kweighted ? "kweighted" : "ridge"; }

inline Penalty penalty_from_string(const std::string& s) {
  if (s == "kweighted") return Penalty::kweighted;
  if (s == "ridge") return Penalty::ridge;
  throw InputError("unknown penalty '" + s + "'");
}

struct DirichletModel {
  std::vector<double> nu;
  std::vector<std::complex<double>> c;
  double weighted_residual = 0;  // sup_x |f - S| / theta_1
  double objective = 0;          // penalized least-squares objective at the solution
  double condition = 0;          // of the regularized system
  double lambda = 0;
  Penalty penalty = Penalty::kweighted;
  bool ill_conditioned = false;  // condition > 1e12

  /// k-th derivative of the sum at x.
  std::complex<double> eval(double x, int k = 0) const {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < nu.size(); ++j)
      s += c[j] * std::pow(std::complex<double>(0, -nu[j]), k) * std::exp(std::complex<double>(0, -nu[j] * x));
    return s;
  }
};

inline constexpr double kConditionWarn = 1e12;

struct FitOptions {
  Penalty penalty = Penalty::kweighted;
  std::optional<double> lambda;  // default 1e-12 (max scaled column norm)^2
};

/// Weighted least squares on the space's grid with weights 1/theta_1, plus the
/// penalty lambda sum |c_j s_j|^2 where s_j = k(nu_j) (kweighted) or 1 (ridge).
inline DirichletModel fit_dirichlet(const TargetFunction& f, std::span<const double> nu, const WeightedSpace& space,
                                    const FitOptions& opt = {}) {
  detail::require(!nu.empty(), "fit_dirichlet: empty frequency set");
  const auto& xs = space.phi.xs();
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index F = static_cast<Eigen::Index>(nu.size());
  detail::require(4 * F <= n, "fit_dirichlet: need at least 4 samples per frequency");

  Eigen::VectorXd W(n);
  for (Eigen::Index i = 0; i < n; ++i) W(i) = std::exp(-space.log_theta(1, xs[std::size_t(i)]));
  Eigen::VectorXd scale(F);
  for (Eigen::Index j = 0; j < F; ++j)
    scale(j) = opt.penalty == Penalty::kweighted ? std::exp(space.wf(std::abs(nu[std::size_t(j)]) / space.sigma)) : 1.0;

  // Columns in the variable d_j = s_j c_j so the penalty is plain ridge on d.
  Eigen::MatrixXcd A(n, F);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < F; ++j)
      A(i, j) = W(i) * std::exp(std::complex<double>(0, -nu[std::size_t(j)] * xs[std::size_t(i)])) / scale(j);
  Eigen::VectorXcd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = W(i) * f(xs[std::size_t(i)]);

  double max_norm = 0;
  for (Eigen::Index j = 0; j < F; ++j) max_norm = std::max(max_norm, A.col(j).norm());
  const double lambda = opt.lambda.value_or(1e-12 * max_norm * max_norm);

  Eigen::MatrixXcd M(n + F, F);
  M.topRows(n) = A;
  M.bottomRows(F) = std::sqrt(lambda) * Eigen::MatrixXcd::Identity(F, F);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + F);
  rhs.head(n) = b;
  const Eigen::VectorXcd d = M.householderQr().solve(rhs);

  DirichletModel model;
  model.nu.assign(nu.begin(), nu.end());
  model.penalty = opt.penalty;
  model.lambda = lambda;
  model.c.resize(std::size_t(F));
  for (Eigen::Index j = 0; j < F; ++j) model.c[std::size_t(j)] = d(j) / scale(j);
  model.objective = (M * d - rhs).squaredNorm();

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  model.condition = sv(0) / sv(sv.size() - 1);
  model.ill_conditioned = model.condition > kConditionWarn;

  const Eigen::VectorXcd r = b - A * d;
  for (Eigen::Index i = 0; i < n; ++i) model.weighted_residual = std::max(model.weighted_residual, std::abs(r(i)));
  return model;
}

struct SeminormResult {
  double value = 0;
  double witness_x = 0;
  int witness_k = 0;
};

/// sup over the grid and k <= k_max of |r^(k)(x)| / ((sigma + eps_m)^k M_k theta_m(x)), r = f - S.
inline SeminormResult residual_seminorm(const DirichletModel& model, const TargetFunction& f,
                                        const WeightedSpace& space, int m, int k_max) {
  detail::require(m >= 1, "residual_seminorm: m must be >= 1");
  detail::require(k_max >= 0, "residual_seminorm: k_max must be >= 0");
  if (k_max > f.max_order())
    throw InputError("residual_seminorm: k_max beyond the target's derivative oracle");
  detail::require(k_max <= space.wf.K(), "residual_seminorm: k_max beyond the sequence");
  const double lscale = std::log(space.sigma + space.eps(m));
  SeminormResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (double x : space.phi.xs()) {
    const double lt = space.log_theta(m, x);
    for (int k = 0; k <= k_max; ++k) {
      const double r = std::abs(f.derivative(k, x) - model.eval(x, k));
      if (r == 0) continue;
      const double v = std::log(r) - k * lscale - space.wf.lnM()[std::size_t(k)] - lt;
      if (v > best) {
        best = v;
        out.witness_x = x;
        out.witness_k = k;
      }
    }
  }
  out.value = std::isfinite(best) ? std::exp(best) : 0.0;
  return out;
}

struct CoeffRow {
  std::size_t j;
  double nu;
  std::complex<double> c;
  double scaled;  // |c_j| k(nu_j)
};

struct CoeffDecay {
  double proxy = 0;  // max_j |c_j| k(nu_j)
  std::size_t witness = 0;
  std::vector<CoeffRow> rows;
};

inline CoeffDecay coeff_decay_check(const DirichletModel& model, const KWeight& kw) {
  CoeffDecay out;
  for (std::size_t j = 0; j < model.nu.size(); ++j) {
    const double s = std::abs(model.c[j]) * std::exp(kw.log_k(std::complex<double>(model.nu[j], 0)));
    out.rows.push_back({j, model.nu[j], model.c[j], s});
    if (s > out.proxy) {
      out.proxy = s;
      out.witness = j;
    }
  }
  return out;
}

/// Proxies along increasing J must not grow tenfold over the first one.
inline Verdict proxy_trend(std::span<const double> proxies) {
  detail::require(!proxies.empty(), "proxy_trend: no proxies");
  const double first = proxies.front();
  for (double p : proxies)
    if (!std::isfinite(p) || p > 10 * first) return Verdict::failed;
  return Verdict::pass;
}

}  // namespace carleman
