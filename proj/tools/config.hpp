#pragma once

// Run configuration: loaded from a JSON file (unknown keys rejected), then
// overridden by command-line flags. Unset optionals take per-command defaults.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/errors.hpp"

namespace carleman::cli {

using nlohmann::json;

struct RunConfig {
  // sequence
  std::string kind = "mstar";
  double rho = 1.0;
  std::optional<int> K;
  std::vector<double> lnM;  // table kind

  // psi
  std::string psi_form = "power";
  double alpha = 2.0;
  std::optional<double> exponent;
  double Y = 100.0;
  double step = 1e-3;

  std::optional<double> sigma;
  std::string eps_rule = "inverse";  // eps_m = 1/m

  // grids
  double r_min = 1e-2;
  std::optional<double> r_max;
  int r_n = 500;
  double X = 5.0;
  int x_n = 2001;
  std::vector<double> s;
  std::vector<double> delta;
  std::vector<double> eps;
  std::vector<int> m;
  std::vector<double> A;
  std::vector<int> J;

  // per-command parameters
  std::optional<double> C;
  std::string v = "mstar";  // closed-form v / u for classV, prop1, eq*
  std::string target = "gaussian";
  double a = 1.0;
  std::optional<double> omega;
  std::string angles = "golden";
  std::optional<double> d;
  double polar_rmin = 0.1;
  int n_radii = 300;
  int n_angles = 64;
  int k_max = 6;
  int hK = 100000;
  std::string penalty = "kweighted";
  std::string out = ".";
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw InputError("config: unknown key '" + where + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  using detail::check_keys;
  using detail::read;
  RunConfig c;
  check_keys(j, {"sequence", "psi", "sigma", "eps_rule", "grids", "C", "v", "target", "zeros", "polar", "k_max", "hK",
                 "penalty", "out"},
             "");
  try {
    if (j.contains("sequence")) {
      const auto& s = j.at("sequence");
      check_keys(s, {"kind", "rho", "K", "lnM"}, "sequence.");
      read(s, "kind", c.kind);
      read(s, "rho", c.rho);
      read(s, "K", c.K);
      read(s, "lnM", c.lnM);
    }
    if (j.contains("psi")) {
      const auto& p = j.at("psi");
      check_keys(p, {"form", "alpha", "exponent", "Y", "step"}, "psi.");
      read(p, "form", c.psi_form);
      read(p, "alpha", c.alpha);
      read(p, "exponent", c.exponent);
      read(p, "Y", c.Y);
      read(p, "step", c.step);
    }
    read(j, "sigma", c.sigma);
    read(j, "eps_rule", c.eps_rule);
    if (j.contains("grids")) {
      const auto& g = j.at("grids");
      check_keys(g, {"r", "x", "s", "delta", "eps", "m", "A", "J"}, "grids.");
      if (g.contains("r")) {
        check_keys(g.at("r"), {"min", "max", "n"}, "grids.r.");
        read(g.at("r"), "min", c.r_min);
        read(g.at("r"), "max", c.r_max);
        read(g.at("r"), "n", c.r_n);
      }
      if (g.contains("x")) {
        check_keys(g.at("x"), {"X", "n"}, "grids.x.");
        read(g.at("x"), "X", c.X);
        read(g.at("x"), "n", c.x_n);
      }
      read(g, "s", c.s);
      read(g, "delta", c.delta);
      read(g, "eps", c.eps);
      read(g, "m", c.m);
      read(g, "A", c.A);
      read(g, "J", c.J);
    }
    read(j, "C", c.C);
    read(j, "v", c.v);
    if (j.contains("target")) {
      const auto& t = j.at("target");
      check_keys(t, {"kind", "a", "omega"}, "target.");
      read(t, "kind", c.target);
      read(t, "a", c.a);
      read(t, "omega", c.omega);
    }
    if (j.contains("zeros")) {
      const auto& z = j.at("zeros");
      check_keys(z, {"angles", "d"}, "zeros.");
      read(z, "angles", c.angles);
      read(z, "d", c.d);
    }
    if (j.contains("polar")) {
      const auto& p = j.at("polar");
      check_keys(p, {"rmin", "n_radii", "n_angles"}, "polar.");
      read(p, "rmin", c.polar_rmin);
      read(p, "n_radii", c.n_radii);
      read(p, "n_angles", c.n_angles);
    }
    read(j, "k_max", c.k_max);
    read(j, "hK", c.hK);
    read(j, "penalty", c.penalty);
    read(j, "out", c.out);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (c.eps_rule != "inverse") throw InputError("config: eps_rule must be 'inverse' (eps_m = 1/m)");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

/// The resolved configuration as embedded in every report.
inline json config_to_json(const RunConfig& c) {
  json j;
  j["sequence"] = {{"kind", c.kind}, {"rho", c.rho}, {"K", opt_json(c.K)}};
  if (c.kind == "table") j["sequence"]["lnM"] = c.lnM;
  j["psi"] = {{"form", c.psi_form}, {"alpha", c.alpha}, {"exponent", opt_json(c.exponent)}, {"Y", c.Y},
              {"step", c.step}};
  j["sigma"] = opt_json(c.sigma);
  j["eps_rule"] = c.eps_rule;
  j["grids"] = {{"r", {{"min", c.r_min}, {"max", opt_json(c.r_max)}, {"n", c.r_n}}},
                {"x", {{"X", c.X}, {"n", c.x_n}}},
                {"s", c.s},
                {"delta", c.delta},
                {"eps", c.eps},
                {"m", c.m},
                {"A", c.A},
                {"J", c.J}};
  j["C"] = opt_json(c.C);
  j["v"] = c.v;
  j["target"] = {{"kind", c.target}, {"a", c.a}, {"omega", opt_json(c.omega)}};
  j["zeros"] = {{"angles", c.angles}, {"d", opt_json(c.d)}};
  j["polar"] = {{"rmin", c.polar_rmin}, {"n_radii", c.n_radii}, {"n_angles", c.n_angles}};
  j["k_max"] = c.k_max;
  j["hK"] = c.hK;
  j["penalty"] = c.penalty;
  j["out"] = c.out;
  return j;
}

}  // namespace carleman::cli
