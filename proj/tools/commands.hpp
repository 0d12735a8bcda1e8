#pragma once

// Subcommand implementations. Each returns a verdict plus the artifacts to
// write; nothing touches the filesystem here.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "carleman/conjugates.hpp"
#include "carleman/entire.hpp"
#include "carleman/errors.hpp"
#include "carleman/grid.hpp"
#include "carleman/hfun.hpp"
#include "carleman/represent.hpp"
#include "carleman/sequences.hpp"
#include "carleman/weights.hpp"
#include "config.hpp"
#include "report.hpp"

namespace carleman::cli {

struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  Verdict verdict = Verdict::pass;
  std::vector<Artifact> artifacts;
};

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::failed: return 2;
    case Verdict::inconclusive: return 3;
  }
  return 2;
}

namespace detail {

inline json check(const std::string& name, double value, double witness, bool stabilized, double tolerance,
                  Verdict v) {
  return {{"name", name},          {"value", value},         {"witness", witness},
          {"stabilized", stabilized}, {"tolerance", tolerance}, {"verdict", to_string(v)}};
}

inline Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::failed; }

inline SequenceSpec sequence_spec(RunConfig& cfg, int default_K) {
  SequenceSpec spec;
  spec.kind = sequence_kind_from_string(cfg.kind);
  spec.rho = cfg.rho;
  if (spec.kind == SequenceKind::table) {
    spec.table = cfg.lnM;
    cfg.K = static_cast<int>(cfg.lnM.size()) - 1;
  } else {
    if (!cfg.K) cfg.K = default_K;
    spec.K = *cfg.K;
  }
  return spec;
}

inline PsiSpec psi_spec(const RunConfig& cfg) {
  if (cfg.psi_form != "power") throw InputError("psi: only form 'power' is configurable");
  PsiSpec p;
  p.alpha = cfg.alpha;
  p.exponent = cfg.exponent;
  p.Y = cfg.Y;
  p.step = cfg.step;
  return p;
}

inline VFun v_of(const RunConfig& cfg) { return builtin_v(sequence_kind_from_string(cfg.v), cfg.rho); }

template <class T>
void default_list(std::vector<T>& v, std::vector<T> d) {
  if (v.empty()) v = std::move(d);
}

inline Outcome finish(const RunConfig& cfg, json report, Verdict v, const std::string& name,
                      std::vector<Artifact> extra = {}) {
  report["config"] = config_to_json(cfg);
  report["verdict"] = to_string(v);
  Outcome o;
  o.verdict = v;
  o.artifacts = std::move(extra);
  o.artifacts.push_back({name, dump_json(report)});
  return o;
}

inline const std::vector<double> kDefaultSGrid{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

}  // namespace detail

// ---------------------------------------------------------------------------

inline Outcome cmd_seq_check(RunConfig cfg) {
  using namespace detail;
  const auto seq = build_sequence(sequence_spec(cfg, 2000));
  default_list(cfg.s, {1.5, 2.0, 3.0});
  default_list(cfg.delta, {0.1, 0.5, 1.0});
  ClassMOptions opt;
  opt.s_values = cfg.s;
  opt.deltas = cfg.delta;
  const auto r = check_class_m(seq, opt);

  json rep;
  rep["i1"] = {{"ok", r.i1.ok},
               {"first_violation", r.i1.first_violation ? json(*r.i1.first_violation) : json(nullptr)},
               {"min_second_difference", r.i1.min_second_difference}};
  rep["i2"] = {{"H1", r.i2.H1},           {"H2", r.i2.H2},         {"residual", r.i2.residual},
               {"residual_at", r.i2.residual_at}, {"tail_drift", r.i2.tail_drift}, {"verdict", to_string(r.i2.verdict)}};
  json i3 = json::array();
  for (const auto& row : r.i3)
    i3.push_back({{"s", row.s}, {"proxy", row.proxy}, {"witness_n", row.witness_n}, {"trend_slope", row.trend_slope},
                  {"window", {row.n_lo, row.n_hi}}, {"bound", row.bound}, {"verdict", to_string(row.verdict)}});
  rep["i3"] = i3;
  json i4 = json::array();
  for (const auto& row : r.i4)
    i4.push_back({{"delta", row.delta}, {"p", row.p}, {"t", row.t}, {"residual", row.residual},
                  {"witness_n", row.witness_n}, {"max_argmax_m", row.max_argmax_m}, {"verdict", to_string(row.verdict)}});
  rep["i4"] = i4;
  json eq1 = json::array();
  for (const auto& row : r.eq1.rows) eq1.push_back({row.n, row.value});
  rep["eq1_trend"] = {{"rows", eq1}, {"last", r.eq1.last}, {"tolerance", kEq1Tol}, {"verdict", to_string(r.eq1.verdict)}};

  json checks = json::array();
  checks.push_back(check("i1", r.i1.min_second_difference, r.i1.first_violation.value_or(-1), true, 1e-12,
                         verdict_of(r.i1.ok)));
  checks.push_back(check("i2", r.i2.residual, r.i2.residual_at, true, 1e-9, r.i2.verdict));
  for (const auto& row : r.i3)
    checks.push_back(check("i3", row.proxy, row.witness_n, row.trend_slope >= 0, row.bound, row.verdict));
  for (const auto& row : r.i4)
    checks.push_back(check("i4", row.residual, row.witness_n, row.verdict != Verdict::inconclusive, 1e-9, row.verdict));
  checks.push_back(check("eq1", r.eq1.last, r.eq1.rows.back().n, true, kEq1Tol, r.eq1.verdict));
  rep["checks"] = checks;
  return finish(cfg, rep, r.verdict, "classm.json");
}

// ---------------------------------------------------------------------------

inline Outcome cmd_weight_eval(RunConfig cfg) {
  using namespace detail;
  if (!cfg.r_max) cfg.r_max = 1e3;
  carleman::detail::require(cfg.r_n >= 2, "weight-eval: need at least two radii");
  const auto seq = build_sequence_covering(sequence_spec(cfg, 2000), *cfg.r_max);
  cfg.K = seq.K();
  const WeightFunction wf(seq);
  CsvWriter csv({"r", "w", "n"});
  for (double r : logspace(cfg.r_min, *cfg.r_max, std::size_t(cfg.r_n))) {
    const auto e = wf.eval(r);
    csv.row({r, e.value, double(e.k)});
  }
  const auto lb = linear_bound_Aw(wf, *cfg.r_max);
  const bool stab = lb.argmax < *cfg.r_max / 10;
  json rep;
  rep["linear_bound"] = {{"constant", lb.A_w},         {"maximizer", lb.argmax}, {"stabilized", stab},
                         {"max_grid_violation", lb.max_grid_violation}, {"verified", lb.verified}};
  rep["checks"] = json::array({check("w_le_Aw_r", lb.max_grid_violation, lb.argmax, stab, 0.0, verdict_of(lb.verified))});
  return finish(cfg, rep, verdict_of(lb.verified), "weight.json", {{"weight.csv", csv.str()}});
}

// ---------------------------------------------------------------------------

inline Outcome cmd_conjugate(RunConfig cfg) {
  using namespace detail;
  const auto psi = psi_spec(cfg);
  carleman::detail::require(cfg.x_n >= 2 && cfg.X > 0, "conjugate: need X > 0 and at least two points");
  const auto xs = linspace(-cfg.X, cfg.X, std::size_t(cfg.x_n));
  const auto conj = conjugate_psi(psi, xs);
  const auto val = validate_psi(psi);
  CsvWriter csv({"x", "phi"});
  std::size_t edges = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    csv.row({xs[i], conj.g.vals()[i]});
    if (conj.edge[i]) ++edges;
  }
  json rep;
  rep["psi"] = {{"A_psi", val.A_psi},
                {"A_psi_inner", val.A_psi_inner},
                {"witness", {val.witness_x1, val.witness_x2}},
                {"nonnegative", val.nonnegative},
                {"convex", val.convex},
                {"holder_ok", val.holder_ok},
                {"superlinear_ok", val.superlinear_ok},
                {"ratio_growth", {val.ratio_growth_neg, val.ratio_growth_pos}},
                {"verdict", to_string(val.verdict)}};
  rep["edge_points"] = edges;
  const Verdict v = combine(val.verdict, edges ? Verdict::inconclusive : Verdict::pass);
  rep["checks"] = json::array(
      {check("holder", val.A_psi, val.witness_x2, val.holder_ok, 1.1 * val.A_psi_inner, verdict_of(val.holder_ok)),
       check("superlinear", std::min(val.ratio_growth_pos, val.ratio_growth_neg), psi.y_max(), true, 1 + 1e-3,
             verdict_of(val.superlinear_ok)),
       check("edge_attainment", double(edges), 0, edges == 0, 0, edges ? Verdict::inconclusive : Verdict::pass)});
  return finish(cfg, rep, v, "conjugate.json", {{"phi.csv", csv.str()}});
}

// ---------------------------------------------------------------------------

inline json hest_json(const HEstimate& e) {
  return {{"s", e.s},         {"proxy", e.proxy},     {"noise", e.noise}, {"window", {e.lo, e.hi}},
          {"witness", e.witness}, {"trend_slope", e.trend_slope}, {"method", to_string(e.method)}};
}

inline Outcome cmd_hfun(RunConfig cfg) {
  using namespace detail;
  const auto seq = build_sequence(sequence_spec(cfg, cfg.hK));
  default_list(cfg.s, kDefaultSGrid);
  const auto rows = lemma2_check(seq, cfg.s);
  CsvWriter csv({"s", "h_discrete", "h_continuous", "l"});
  json arr = json::array(), checks = json::array();
  Verdict v = Verdict::pass;
  for (const auto& r : rows) {
    csv.row({r.discrete.s, r.discrete.proxy, r.continuous.proxy, l_of(r.discrete)});
    arr.push_back({{"discrete", hest_json(r.discrete)},
                   {"continuous", hest_json(r.continuous)},
                   {"l", l_of(r.discrete)},
                   {"diff", r.diff},
                   {"tolerance", r.tolerance},
                   {"verdict", to_string(r.verdict)}});
    checks.push_back(check("agreement", r.diff, r.discrete.s, true, r.tolerance, r.verdict));
    v = combine(v, r.verdict);
  }
  json rep;
  rep["rows"] = arr;
  rep["checks"] = checks;
  return finish(cfg, rep, v, "hfun.json", {{"hfun.csv", csv.str()}});
}

// ---------------------------------------------------------------------------
// verify

inline json suite_json(const HSuiteReport& r) {
  json props = json::array();
  for (const auto& p : r.properties)
    props.push_back({{"name", p.name}, {"ok", p.ok}, {"value", p.value}, {"witness", p.witness}, {"tolerance", p.tolerance}});
  return {{"s_grid", r.s_grid}, {"h", r.h}, {"h_inverse", r.h_inv}, {"h_below_one", r.h_below},
          {"h_above_one", r.h_above}, {"properties", props}, {"verdict", to_string(r.verdict)}};
}

inline json gap_json(const GapResult& g) {
  return {{"constant", g.Q}, {"maximizer", g.maximizer}, {"stabilized", g.stabilized}, {"r_max", g.r_max},
          {"verdict", to_string(g.verdict)}};
}

inline Outcome verify_prop1(RunConfig cfg) {
  using namespace detail;
  if (!cfg.C) cfg.C = 1.25;
  default_list(cfg.eps, {0.25, 0.5, 1.0});
  auto eps = cfg.eps;
  std::sort(eps.begin(), eps.end());
  const auto u = v_of(cfg);
  json rows = json::array(), checks = json::array();
  Verdict v = Verdict::pass;
  std::vector<double> qc;
  for (double e : eps) {
    const auto r = prop1_check(u, *cfg.C, e);
    rows.push_back({{"eps", e},
                    {"slope_B", r.slope_B},
                    {"curvature_ok", r.curvature_ok},
                    {"curvature_worst", r.curvature_worst},
                    {"curvature_witness", r.curvature_witness},
                    {"q_eps", r.q_eps},
                    {"Q_constructive", r.Q_constructive},
                    {"Q_min", r.Q_min},
                    {"witness_y", r.witness_y},
                    {"stabilized", r.stabilized},
                    {"verdict", to_string(r.verdict)}});
    checks.push_back(check("prop1", r.Q_min, r.witness_y, r.stabilized, r.Q_constructive, r.verdict));
    qc.push_back(r.Q_constructive);
    v = combine(v, r.verdict);
  }
  bool mono = true;
  for (std::size_t i = 0; i + 1 < qc.size(); ++i)
    if (qc[i + 1] > qc[i]) mono = false;
  checks.push_back(check("Q_nonincreasing_in_eps", qc.empty() ? 0 : qc.back(), eps.empty() ? 0 : eps.back(), true, 0,
                         verdict_of(mono)));
  v = combine(v, verdict_of(mono));
  cfg.eps = eps;
  json rep;
  rep["rows"] = rows;
  rep["checks"] = checks;
  return finish(cfg, rep, v, "prop1.json");
}

inline Outcome verify_lemma1(RunConfig cfg) {
  using namespace detail;
  const auto seq = build_sequence(sequence_spec(cfg, cfg.hK));
  default_list(cfg.s, kDefaultSGrid);
  const auto h = lemma1_suite(seq, cfg.s);
  const auto l = l_properties(seq, cfg.s);
  json checks = json::array();
  for (const auto& p : h.properties)
    checks.push_back(check("h_" + p.name, p.value, p.witness, true, p.tolerance, verdict_of(p.ok)));
  for (const auto& p : l.properties)
    checks.push_back(check("l_" + p.name, p.value, p.witness, true, p.tolerance, verdict_of(p.ok)));
  json rep;
  rep["h"] = suite_json(h);
  rep["l"] = suite_json(l);
  rep["checks"] = checks;
  return finish(cfg, rep, combine(h.verdict, l.verdict), "lemma1.json");
}

inline Outcome verify_lemma2(RunConfig cfg) {
  auto o = cmd_hfun(std::move(cfg));
  for (auto& a : o.artifacts)
    if (a.name == "hfun.json") a.name = "lemma2.json";
  return o;
}

inline Outcome verify_lemma3(RunConfig cfg) {
  using namespace detail;
  if (!cfg.sigma) cfg.sigma = 1.0;
  if (!cfg.r_max) cfg.r_max = 1e6;
  default_list(cfg.m, {1, 2, 3});
  default_list(cfg.A, {1.0, 5.0});
  const auto seq = build_sequence_covering(sequence_spec(cfg, 2000), *cfg.r_max);
  cfg.K = seq.K();
  const WeightFamily fam(WeightFunction(seq), *cfg.sigma);
  json rows = json::array(), checks = json::array();
  Verdict v = Verdict::pass;
  for (int m : cfg.m)
    for (double A : cfg.A) {
      const auto g = lemma3_gap(fam, m, A, *cfg.r_max);
      auto row = gap_json(g);
      row["m"] = m;
      row["A"] = A;
      rows.push_back(row);
      checks.push_back(check("lemma3", g.Q, g.maximizer, g.stabilized, 0, g.verdict));
      v = combine(v, g.verdict);
    }
  json rep;
  rep["rows"] = rows;
  rep["checks"] = checks;
  return finish(cfg, rep, v, "lemma3.json");
}

inline Outcome verify_lemma4(RunConfig cfg) {
  using namespace detail;
  if (!cfg.r_max) cfg.r_max = 1e6;
  default_list(cfg.s, {0.5, 2.0});
  default_list(cfg.delta, {0.1});
  SequenceSpec hspec = sequence_spec(cfg, 2000);
  hspec.K = cfg.hK;
  const auto hseq = build_sequence(hspec);
  json rows = json::array(), checks = json::array();
  Verdict v = Verdict::pass;
  for (double s : cfg.s) {
    const auto h = h_discrete(hseq, s);
    const double l = l_of(h);
    for (double delta : cfg.delta) {
      const double reach = *cfg.r_max / std::min(1.0, l * (1 - delta));
      const auto seq = build_sequence_covering(sequence_spec(cfg, 2000), reach);
      const auto g = lemma4_gap(WeightFunction(seq), s, delta, l, *cfg.r_max);
      auto row = gap_json(g);
      row["s"] = s;
      row["delta"] = delta;
      row["l_s"] = l;
      row["K"] = seq.K();
      rows.push_back(row);
      checks.push_back(check("lemma4", g.Q, g.maximizer, g.stabilized, 0, g.verdict));
      v = combine(v, g.verdict);
    }
  }
  json rep;
  rep["rows"] = rows;
  rep["checks"] = checks;
  return finish(cfg, rep, v, "lemma4.json");
}

inline json classv_json(const ClassVReport& r) {
  json v2 = json::array(), v3 = json::array();
  for (const auto& row : r.v2)
    v2.push_back({{"s", row.s}, {"eta", row.eta}, {"m", row.m}, {"witness", row.witness}, {"verdict", to_string(row.verdict)}});
  for (const auto& row : r.v3)
    v3.push_back({{"eps", row.eps}, {"a", row.a}, {"b", row.b}, {"stabilized", row.stabilized},
                  {"worst_y", row.worst_y}, {"verdict", to_string(row.verdict)}});
  return {{"V1", {{"A_v", r.v1.A_v}, {"B_v", r.v1.B_v}, {"drop_last_decade", r.v1.drop_last_decade},
                  {"tolerance", kV1DropTol}, {"verdict", to_string(r.v1.verdict)}}},
          {"V2", v2},
          {"V3", v3},
          {"verdict", to_string(r.verdict)}};
}

inline Outcome verify_classV(RunConfig cfg) {
  using namespace detail;
  default_list(cfg.s, {1.5, 2.0, 3.0});
  default_list(cfg.eps, {0.25, 0.5, 1.0});
  ClassVOptions opt;
  opt.s_grid = cfg.s;
  opt.eps_grid = cfg.eps;
  const auto r = classV_check(v_of(cfg), opt);
  json checks = json::array();
  checks.push_back(check("V1", r.v1.drop_last_decade, 1, true, kV1DropTol, r.v1.verdict));
  for (const auto& row : r.v2) checks.push_back(check("V2", row.eta, row.witness, true, 0, row.verdict));
  for (const auto& row : r.v3) checks.push_back(check("V3", row.a, row.worst_y, row.stabilized, 0, row.verdict));
  json rep = classv_json(r);
  rep["checks"] = checks;
  return finish(cfg, rep, r.verdict, "classV.json");
}

inline Outcome verify_eq(RunConfig cfg, InequalityId id) {
  using namespace detail;
  default_list(cfg.eps, {0.5});
  default_list(cfg.s, {2.0});
  const auto v = v_of(cfg);
  InequalityParams p;
  p.s = cfg.s.front();
  json rep;
  if (id != InequalityId::eq2 && id != InequalityId::eq7) {
    ClassVOptions opt;
    opt.s_grid = {};
    opt.eps_grid = {cfg.eps.front()};
    const auto row = fit_v3(v, cfg.eps.front(), opt.x_max, opt.y_max, opt.points);
    p.eps = row.eps;
    p.a_eps = row.a;
    p.b_eps = row.b;
    rep["constants"] = {{"eps", row.eps}, {"a_eps", row.a}, {"b_eps", row.b}, {"stabilized", row.stabilized}};
    if (row.verdict != Verdict::pass) {
      rep["checks"] = json::array({check(to_string(id), 0, row.worst_y, false, 0, row.verdict)});
      return finish(cfg, rep, row.verdict, std::string(to_string(id)) + ".json");
    }
  }
  const auto r = verify_inequality(id, v, p);
  rep["residual"] = r.residual;
  rep["witness"] = r.witness;
  rep["tolerance"] = r.tolerance;
  if (id == InequalityId::eq6) rep["c_tilde"] = r.c_tilde;
  rep["checks"] = json::array({check(to_string(id), r.residual, r.witness, true, r.tolerance, r.verdict)});
  return finish(cfg, rep, r.verdict, std::string(to_string(id)) + ".json");
}

inline Outcome verify_sandwich(RunConfig cfg) {
  using namespace detail;
  if (!cfg.r_max) cfg.r_max = 1e6;
  cfg.kind = "mstar";
  const auto r = check_sandwich_mstar(cfg.rho, *cfg.r_max, std::size_t(cfg.r_n));
  json rep;
  rep["min_lower_slack"] = r.min_lower_slack;
  rep["min_upper_slack"] = r.min_upper_slack;
  rep["witness_lower"] = r.witness_lower;
  rep["witness_upper"] = r.witness_upper;
  rep["checked"] = r.checked;
  rep["checks"] = json::array(
      {check("lower", r.min_lower_slack, r.witness_lower, true, -r.tolerance, verdict_of(r.min_lower_slack >= -r.tolerance)),
       check("upper", r.min_upper_slack, r.witness_upper, true, -r.tolerance, verdict_of(r.min_upper_slack >= -r.tolerance))});
  return finish(cfg, rep, r.verdict, "sandwich.json");
}

inline const std::vector<std::string> kVerifyChecks{"prop1", "lemma1", "lemma2", "lemma3", "lemma4", "eq2", "eq3",
                                                    "eq4",   "eq5",    "eq6",    "eq7",    "classV", "sandwich"};

inline Outcome cmd_verify(RunConfig cfg, const std::string& which) {
  if (which == "prop1") return verify_prop1(std::move(cfg));
  if (which == "lemma1") return verify_lemma1(std::move(cfg));
  if (which == "lemma2") return verify_lemma2(std::move(cfg));
  if (which == "lemma3") return verify_lemma3(std::move(cfg));
  if (which == "lemma4") return verify_lemma4(std::move(cfg));
  if (which == "classV") return verify_classV(std::move(cfg));
  if (which == "sandwich") return verify_sandwich(std::move(cfg));
  return verify_eq(std::move(cfg), inequality_from_string(which));
}

// ---------------------------------------------------------------------------

inline Outcome cmd_zeros(RunConfig cfg) {
  using namespace detail;
  if (!cfg.sigma) cfg.sigma = 1.0;
  default_list(cfg.J, {500});
  const auto seq = build_sequence(sequence_spec(cfg, 2000));
  const WeightFunction wf(seq);
  const int J = cfg.J.front();
  auto zs = place_zeros(wf, *cfg.sigma, J, angle_rule_from_string(cfg.angles));
  if (cfg.d) zs.d = *cfg.d;
  CsvWriter csv({"k", "mu", "theta", "re", "im"});
  for (std::size_t k = 0; k < zs.radii.size(); ++k) {
    const auto z = zs.zero(k);
    csv.row({double(k + 1), zs.radii[k], zs.angles[k], z.real(), z.imag()});
  }
  json rep;
  Verdict v = Verdict::pass;
  json checks = json::array();
  if (J >= 2) {
    const auto g = min_gap(zs, zs.d);
    rep["min_gap"] = {{"d_max", g.d_max}, {"prefix", g.prefix}, {"simple", g.simple}, {"repeated_at", g.repeated_at},
                      {"d", zs.d}};
    v = verdict_of(g.simple);
    checks.push_back(check("simple", g.d_max, g.repeated_at, true, 0, v));
  }
  // Counting consistency midway between consecutive radii.
  int mismatches = 0;
  for (std::size_t k = 0; k + 1 < zs.radii.size(); ++k) {
    if (!(zs.radii[k + 1] > zs.radii[k])) continue;
    const double r = 0.5 * (zs.radii[k] + zs.radii[k + 1]);
    const auto count = std::upper_bound(zs.radii.begin(), zs.radii.end(), r) - zs.radii.begin();
    if (count != wf.counting(r / zs.sigma)) ++mismatches;
  }
  checks.push_back(check("counting", mismatches, 0, true, 0, verdict_of(mismatches == 0)));
  v = combine(v, verdict_of(mismatches == 0));
  rep["J"] = J;
  rep["angles"] = to_string(zs.rule);
  rep["admissible_radius"] = zs.admissible_radius();
  rep["checks"] = checks;
  return finish(cfg, rep, v, "zeros.json", {{"zeros.csv", csv.str()}});
}

// ---------------------------------------------------------------------------

inline constexpr double kDoublingTol = 1e-6;

inline Outcome cmd_check8(RunConfig cfg) {
  using namespace detail;
  if (!cfg.sigma) cfg.sigma = 1.0;
  default_list(cfg.J, {500});
  const int J = cfg.J.front();
  const auto seq = build_sequence(sequence_spec(cfg, std::max(4000, 2 * J)));
  const WeightFunction wf(seq);
  const auto rule = angle_rule_from_string(cfg.angles);
  auto zs = place_zeros(wf, *cfg.sigma, J, rule);
  if (!cfg.d) cfg.d = zs.d;
  zs.d = *cfg.d;
  PolarGrid grid;
  grid.r_min = cfg.polar_rmin;
  grid.n_radii = std::size_t(cfg.n_radii);
  grid.n_angles = std::size_t(cfg.n_angles);
  if (cfg.r_max) grid.r_max = *cfg.r_max;
  const auto fit = check_eq8(zs, wf, grid);

  // Per-point table and the J-doubling perturbation.
  const bool can_double = 2 * J <= wf.K();
  ZeroSet zs2;
  if (can_double) {
    zs2 = place_zeros(wf, *cfg.sigma, 2 * J, rule);
    zs2.d = zs.d;
  }
  CsvWriter csv({"re", "im", "log_abs_N", "w", "residual", "excluded"});
  double doubling = 0;
  for (double r : logspace(grid.r_min, fit.r_max, grid.n_radii)) {
    const double w = wf(r / zs.sigma);
    for (std::size_t a = 0; a < grid.n_angles; ++a) {
      const auto z = std::polar(r, 2 * std::numbers::pi * double(a) / double(grid.n_angles));
      const auto lm = log_abs_N(z, zs);
      csv.row({z.real(), z.imag(), lm.value, w, std::abs(w - lm.value), lm.excluded ? 1.0 : 0.0});
      if (can_double && !lm.excluded) doubling = std::max(doubling, std::abs(lm.value - log_abs_N(z, zs2).value));
    }
  }
  json rep;
  rep["fit"] = {{"A", fit.A},
                {"C0", fit.C0},
                {"max_residual", fit.max_residual},
                {"witness", {fit.witness_r, fit.witness_theta}},
                {"points", fit.points},
                {"excluded", fit.excluded},
                {"excluded_fraction", fit.excluded_fraction},
                {"coverage", fit.coverage},
                {"r_max", fit.r_max}};
  rep["doubling"] = {{"checked", can_double}, {"max_change", doubling}, {"tolerance", kDoublingTol}};
  json checks = json::array();
  checks.push_back(check("coverage", fit.coverage, fit.witness_r, true, 1.0, fit.verdict));
  Verdict v = fit.verdict;
  if (can_double) {
    const Verdict dv = verdict_of(doubling <= kDoublingTol);
    checks.push_back(check("doubling", doubling, fit.r_max, true, kDoublingTol, dv));
    v = combine(v, dv);
  }
  rep["checks"] = checks;
  return finish(cfg, rep, v, "check8.json", {{"check8.csv", csv.str()}});
}

// ---------------------------------------------------------------------------

inline constexpr double kSeminormTol = 1e-6;

inline Outcome cmd_fit(RunConfig cfg) {
  using namespace detail;
  if (!cfg.sigma) cfg.sigma = 0.18;
  default_list(cfg.J, {10, 20, 40});
  default_list(cfg.m, {1});
  std::sort(cfg.J.begin(), cfg.J.end());
  const auto seq = build_sequence(sequence_spec(cfg, 2000));
  const WeightFunction wf(seq);
  const auto psi = psi_spec(cfg);
  carleman::detail::require(cfg.x_n >= 2 && cfg.X > 0, "fit: need X > 0 and at least two samples");
  const auto xs = linspace(-cfg.X, cfg.X, std::size_t(cfg.x_n));
  const auto space = make_space(wf, *cfg.sigma, psi, xs);
  const auto zs = place_zeros(wf, *cfg.sigma, cfg.J.back());
  const auto kw = make_kweight(psi, wf, *cfg.sigma);
  TargetFunction target;
  const auto tk = target_kind_from_string(cfg.target);
  if (tk == TargetKind::gaussian)
    target = TargetFunction::gaussian(cfg.a);
  else if (tk == TargetKind::cosine) {
    if (!cfg.omega) cfg.omega = zs.radii.front();
    target = TargetFunction::cosine(*cfg.omega);
  } else
    throw InputError("fit: table targets are only available through the library");
  FitOptions fopt;
  fopt.penalty = penalty_from_string(cfg.penalty);

  CsvWriter res_csv({"J", "m", "k_max", "seminorm"});
  json runs = json::array();
  std::vector<double> resid, proxies;
  std::vector<std::vector<double>> sem(cfg.m.size());
  DirichletModel last;
  for (int J : cfg.J) {
    const auto nu = symmetric_frequencies(zs, J);
    const auto model = fit_dirichlet(target, nu, space, fopt);
    const auto decay = coeff_decay_check(model, kw);
    json run = {{"J", J},
                {"weighted_residual", model.weighted_residual},
                {"objective", model.objective},
                {"condition", model.condition},
                {"ill_conditioned", model.ill_conditioned},
                {"lambda", model.lambda},
                {"coeff_proxy", decay.proxy},
                {"coeff_proxy_witness", decay.witness}};
    json sems = json::array();
    for (std::size_t i = 0; i < cfg.m.size(); ++i) {
      const auto s = residual_seminorm(model, target, space, cfg.m[i], cfg.k_max);
      res_csv.row({double(J), double(cfg.m[i]), double(cfg.k_max), s.value});
      sems.push_back({{"m", cfg.m[i]}, {"value", s.value}, {"witness_x", s.witness_x}, {"witness_k", s.witness_k}});
      sem[i].push_back(s.value);
    }
    run["seminorms"] = sems;
    runs.push_back(run);
    resid.push_back(model.weighted_residual);
    proxies.push_back(decay.proxy);
    last = model;
  }
  CsvWriter coeffs({"j", "nu", "re_c", "im_c", "abs_c_times_k"});
  const auto decay = coeff_decay_check(last, kw);
  for (const auto& row : decay.rows) coeffs.row({double(row.j), row.nu, row.c.real(), row.c.imag(), row.scaled});

  json checks = json::array();
  Verdict v = Verdict::pass;
  if (cfg.J.size() >= 2) {
    const double factor = resid.front() / resid.back();
    const bool exact = resid.front() <= 1e-10;
    const Verdict fv = exact ? Verdict::pass : verdict_of(factor >= 10);
    checks.push_back(check("residual_decrease_factor", factor, cfg.J.back(), true, 10, fv));
    v = combine(v, fv);
    for (std::size_t i = 0; i < cfg.m.size(); ++i) {
      bool mono = true;
      std::size_t at = 0;
      for (std::size_t k = 0; k + 1 < sem[i].size(); ++k)
        if (sem[i][k + 1] > sem[i][k] * (1 + kSeminormTol) + 1e-12) {
          mono = false;
          at = k + 1;
        }
      checks.push_back(check("seminorm_monotone_m" + std::to_string(cfg.m[i]), sem[i].back(), cfg.J[at], true,
                             kSeminormTol, verdict_of(mono)));
      v = combine(v, verdict_of(mono));
    }
    const Verdict pv = proxy_trend(proxies);
    checks.push_back(check("coeff_proxy_bounded", *std::max_element(proxies.begin(), proxies.end()), cfg.J.back(), true,
                           10 * proxies.front(), pv));
    v = combine(v, pv);
  }
  json rep;
  rep["runs"] = runs;
  rep["checks"] = checks;
  return finish(cfg, rep, v, "fit.json", {{"coeffs.csv", coeffs.str()}, {"residuals.csv", res_csv.str()}});
}

}  // namespace carleman::cli
