// carleman: command-line front end.
//
//   carleman <subcommand> [flags]   (see --help)
//
// Exit codes: 0 pass, 2 condition failed, 3 inconclusive, 4 input error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"

namespace {

constexpr int kInputError = 4;

// --config is read before the flags are bound so flags override file values.
std::string find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

void bind_flags(CLI::App& app, carleman::cli::RunConfig& c, std::string& config_path) {
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--kind", c.kind, "sequence kind: mstar|gammafact|arctg|table");
  app.add_option("--rho", c.rho, "sequence parameter rho >= 1");
  app.add_option("--K", c.K, "largest sequence index");
  app.add_option("--lnM", c.lnM, "table values ln M_k (kind table)")->delimiter(',');
  app.add_option("--alpha", c.alpha, "psi Holder exponent");
  app.add_option("--exponent", c.exponent, "psi power (defaults to alpha)");
  app.add_option("--Y", c.Y, "psi grid half-width");
  app.add_option("--step", c.step, "psi grid step");
  app.add_option("--sigma", c.sigma, "weight scale sigma");
  app.add_option("--rmin", c.r_min, "smallest radius");
  app.add_option("--rmax", c.r_max, "largest radius");
  app.add_option("--rn", c.r_n, "number of radii");
  app.add_option("--X", c.X, "half-width of the x window");
  app.add_option("--xn", c.x_n, "number of x samples");
  app.add_option("--s", c.s, "s values")->delimiter(',');
  app.add_option("--delta", c.delta, "delta values")->delimiter(',');
  app.add_option("--eps", c.eps, "eps values")->delimiter(',');
  app.add_option("--m", c.m, "seminorm / family indices")->delimiter(',');
  app.add_option("--A", c.A, "lemma3 constants A")->delimiter(',');
  app.add_option("--J", c.J, "numbers of zeros / frequency pairs")->delimiter(',');
  app.add_option("--C", c.C, "curvature constant");
  app.add_option("--v", c.v, "closed-form v: mstar|gammafact|arctg");
  app.add_option("--target", c.target, "fit target: gaussian|cos");
  app.add_option("--a", c.a, "gaussian exponent a in exp(-a x^2)");
  app.add_option("--omega", c.omega, "cosine frequency (default mu_1)");
  app.add_option("--angles", c.angles, "zero angles: golden|real_axis");
  app.add_option("--d", c.d, "exclusion-disc radius");
  app.add_option("--polar-rmin", c.polar_rmin, "smallest polar-grid radius");
  app.add_option("--nr", c.n_radii, "polar-grid radii");
  app.add_option("--na", c.n_angles, "polar-grid angles");
  app.add_option("--kmax", c.k_max, "highest derivative in the seminorm");
  app.add_option("--hK", c.hK, "sequence length for h estimates");
  app.add_option("--penalty", c.penalty, "fit penalty: kweighted|ridge");
  app.add_option("--out", c.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace carleman;
  using namespace carleman::cli;

  RunConfig cfg;
  std::string config_path = find_config(argc, argv);
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }

  CLI::App app{"Weighted-space toolkit: sequences, weights, conjugates, h/l, zeros, fits"};
  app.require_subcommand(1);
  app.fallthrough();
  bind_flags(app, cfg, config_path);

  std::string which;
  auto* seq_check = app.add_subcommand("seq-check", "class-M conditions i1-i4 and the ratio limit");
  auto* weight_eval = app.add_subcommand("weight-eval", "w(r) and n(r) on a radius grid, linear bound A_w");
  auto* conjugate = app.add_subcommand("conjugate", "phi = psi* on the x window, psi conditions");
  auto* hfun = app.add_subcommand("hfun", "h(s) and l(s), discrete and continuous estimates");
  auto* verify = app.add_subcommand("verify", "named inequality checks");
  verify->add_option("check", which, "prop1|lemma1|lemma2|lemma3|lemma4|eq2..eq7|classV|sandwich")
      ->required()
      ->check(CLI::IsMember(kVerifyChecks));
  auto* zeros = app.add_subcommand("zeros", "zero placement and separation");
  auto* check8 = app.add_subcommand("check8", "residual bound for ln|N| against w");
  auto* fit = app.add_subcommand("fit", "exponential-sum fit and seminorm residuals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    Outcome o;
    if (*seq_check)
      o = cmd_seq_check(cfg);
    else if (*weight_eval)
      o = cmd_weight_eval(cfg);
    else if (*conjugate)
      o = cmd_conjugate(cfg);
    else if (*hfun)
      o = cmd_hfun(cfg);
    else if (*verify)
      o = cmd_verify(cfg, which);
    else if (*zeros)
      o = cmd_zeros(cfg);
    else if (*check8)
      o = cmd_check8(cfg);
    else if (*fit)
      o = cmd_fit(cfg);
    for (const auto& a : o.artifacts) write_atomic(cfg.out, a.name, a.content);
    std::printf("%s\n", to_string(o.verdict));
    return exit_code(o.verdict);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "truncation: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
}
