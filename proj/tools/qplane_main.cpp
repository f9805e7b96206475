// qplane: evaluate q-deformed special functions, verify the operator
// identities, and drive the spectral Green operator on the quantum plane.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qplane/eq2.hpp"
#include "qplane/plane.hpp"
#include "qplane/qcalc.hpp"
#include "qplane/qspecial.hpp"
#include "qplane/table_io.hpp"
#include "qplane/verify.hpp"

namespace {

using namespace qplane;

struct CliOptions {
  VerifyConfig cfg;
  std::string format = "csv";
  std::string out;
  std::string config_path;
  std::string precision = "double";
  bool allow_q_near_one = false;
  bool timings = false;
};

void apply_config_file(CliOptions &opt, const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw ConfigError("cannot read config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t h = line.find('#');
    if (h != std::string::npos)
      line.resize(h);
    const size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos)
      continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "q")
      opt.cfg.q = std::stod(val);
    else if (key == "L")
      opt.cfg.L = std::stoi(val);
    else if (key == "series_tol")
      opt.cfg.series_tol = std::stod(val);
    else if (key == "assert_tol")
      opt.cfg.assert_tol = std::stod(val);
    else if (key == "epsilon")
      opt.cfg.epsilon = std::stod(val);
    else if (key == "seed")
      opt.cfg.seed = std::stoull(val);
    else if (key == "precision")
      opt.precision = val;
    else if (key == "format")
      opt.format = val;
    else
      throw ConfigError(path + ": unknown key '" + key + "'");
  }
}

void finalize(CliOptions &opt) {
  if (opt.precision == "double")
    opt.cfg.mode = PrecisionMode::Double;
  else if (opt.precision == "extended")
    opt.cfg.mode = PrecisionMode::Extended;
  else
    throw ConfigError("precision must be double or extended");
  if (!(opt.cfg.q > 0.0 && opt.cfg.q < 1.0))
    throw ConfigError("q must satisfy 0 < q < 1");
  if (opt.cfg.q > 1.0 - 1e-6 && !opt.allow_q_near_one)
    throw ConfigError(
        "q > 1-1e-6 is expensive; pass --allow-q-near-one to override");
  if (opt.cfg.series_tol <= 0.0 || opt.cfg.assert_tol <= 0.0)
    throw ConfigError("tolerances must be positive");
}

std::map<std::string, std::string> meta_of(const CliOptions &opt) {
  std::map<std::string, std::string> m;
  m["q"] = format_double(opt.cfg.q);
  m["L"] = format_int(opt.cfg.L);
  m["series_tol"] = format_double(opt.cfg.series_tol);
  m["assert_tol"] = format_double(opt.cfg.assert_tol);
  m["epsilon"] = format_double(opt.cfg.epsilon);
  m["precision"] = opt.precision;
  m["seed"] = format_int(static_cast<long long>(opt.cfg.seed));
  return m;
}

int cmd_eval(const CliOptions &opt, const std::string &fn,
             const std::vector<double> &xs, const std::vector<double> &ps,
             const std::vector<double> &rhos, double cq, int s) {
  const QContext ctx(opt.cfg.q, opt.cfg.mode, opt.cfg.series_tol, 4000);
  Table t;
  t.meta = meta_of(opt);
  t.meta["fn"] = fn;
  bool any_error = false;
  if (fn == "J" || fn == "Js") {
    t.header = {"x", "value_re", "value_im", "terms", "error_bound"};
    for (double x : xs) {
      try {
        const SeriesResult r = fn == "J" ? bessel_j(ctx, x)
                                         : bessel_j_order(ctx, s, x);
        t.rows.push_back({format_double(x), format_double(r.value.real()),
                          format_double(r.value.imag()),
                          format_int(r.terms_used),
                          format_double(r.error_bound)});
      } catch (const Error &e) {
        any_error = true;
        t.rows.push_back({format_double(x), "error", e.what(), "0", "0"});
      }
    }
  } else if (fn == "N" || fn == "G" || fn == "spectral-G") {
    t.header = {"p", "rho", "value_re", "value_im", "terms", "error_bound"};
    for (double p : ps)
      for (double rho : rhos) {
        try {
          if (fn == "N") {
            const SeriesResult r = neumann_n(ctx, GreenParams{p, cq}, rho);
            t.rows.push_back({format_double(p), format_double(rho),
                              format_double(r.value.real()),
                              format_double(r.value.imag()),
                              format_int(r.terms_used),
                              format_double(r.error_bound)});
          } else if (fn == "G") {
            const Complex g = green_g(ctx, GreenParams{p, cq}, rho);
            t.rows.push_back({format_double(p), format_double(rho),
                              format_double(g.real()), format_double(g.imag()),
                              "0", "0"});
          } else {
            SpectralEvalParams sp;
            sp.epsilon = opt.cfg.epsilon;
            const int dec = static_cast<int>(
                std::ceil(std::sqrt(45.0 / -ctx.ln_q())));
            sp.j_min = -(dec + 6);
            sp.j_max =
                static_cast<int>(std::ceil(40.0 / -ctx.ln_q())) + 8;
            const SeriesResult r =
                spectral_green(ctx, GreenParams{p, cq}, sp, rho);
            t.rows.push_back({format_double(p), format_double(rho),
                              format_double(r.value.real()),
                              format_double(r.value.imag()),
                              format_int(r.terms_used),
                              format_double(r.error_bound)});
          }
        } catch (const Error &e) {
          any_error = true;
          t.rows.push_back({format_double(p), format_double(rho), "error",
                            e.what(), "0", "0"});
        }
      }
  } else {
    throw ConfigError("unknown function: " + fn);
  }
  write_table(t, opt.format, opt.out);
  return any_error ? 1 : 0;
}

int cmd_verify(const CliOptions &opt, const std::string &suite) {
  const VerificationReport rep = run_suite(suite, opt.cfg);
  Table t = rep.to_table(opt.cfg, opt.timings);
  t.meta["suite"] = suite;
  write_table(t, opt.format, opt.out);
  return rep.all_pass() ? 0 : 1;
}

int cmd_spectrum(const CliOptions &opt, int s, int j_lo, int j_hi) {
  const QContext ctx(opt.cfg.q, opt.cfg.mode, opt.cfg.series_tol, 4000);
  const std::vector<SpectrumRow> rows = spectrum_scan(ctx, s, j_lo, j_hi);
  Table t;
  t.meta = meta_of(opt);
  t.meta["s"] = format_int(s);
  t.header = {"t", "eigenvalue", "q^2t", "residual", "overlap"};
  bool fail = false;
  for (const SpectrumRow &r : rows) {
    const double lam = std::exp(2.0 * r.t * ctx.ln_q());
    t.rows.push_back({format_int(r.t), format_double(r.eigenvalue),
                      format_double(lam), format_double(r.residual),
                      format_double(r.overlap)});
    if (std::abs(r.eigenvalue - lam) / lam > opt.cfg.assert_tol ||
        r.residual > opt.cfg.assert_tol)
      fail = true;
  }
  write_table(t, opt.format, opt.out);
  return fail ? 1 : 0;
}

int cmd_apply_green(const CliOptions &opt, const std::string &vec, double p,
                    double cq, int t, int s, int a, int b) {
  const QContext ctx(opt.cfg.q, opt.cfg.mode, opt.cfg.series_tol, 4000);
  const GreenParams gp{p, cq};
  const int Lg = std::max(opt.cfg.L, 40);
  PlaneVector v(Lg);
  Table tab;
  tab.meta = meta_of(opt);
  tab.meta["p"] = format_double(p);
  tab.meta["cq"] = format_double(cq);
  if (vec == "ets") {
    const EtsVector e = ets_vector(ctx, t, s, std::max(-Lg, -Lg - s),
                                   std::min(Lg, Lg - s), 1e-9);
    for (int j = e.j_lo; j <= e.j_hi; ++j)
      v.at(s + j, j) = Complex{e.c[static_cast<size_t>(j - e.j_lo)], 0.0};
  } else if (vec == "basis") {
    v.at(a, b) = Complex{1.0, 0.0};
  } else {
    throw ConfigError("--vector must be ets or basis");
  }
  const PlaneVector gv = apply_green_plane(ctx, gp, v);
  const EtsExpansion ex = expand_in_ets(ctx, gv);
  tab.header = {"t", "s", "coeff_re", "coeff_im"};
  for (const auto &[ts, c] : ex.coeff)
    tab.rows.push_back({format_int(ts.first), format_int(ts.second),
                        format_double(c.real()), format_double(c.imag())});
  write_table(tab, opt.format, opt.out);
  return 0;
}

int cmd_estimate_cq(const CliOptions &opt, int p_count, int p_start,
                    const std::vector<int> &rho_exps) {
  const QContext ctx(opt.cfg.q, opt.cfg.mode, opt.cfg.series_tol, 9000);
  SpectralGrid grid;
  grid.p_grid = anti_resonant_p_grid(ctx, p_count, p_start);
  grid.rho_exponents = rho_exps;
  SpectralEvalParams sp;
  sp.epsilon = opt.cfg.epsilon;
  const int dec =
      static_cast<int>(std::ceil(std::sqrt(45.0 / -ctx.ln_q())));
  sp.j_min = -(dec + 8);
  sp.j_max = static_cast<int>(std::ceil(30.0 / -ctx.ln_q())) + 12 +
             2 * (p_count + p_start);
  const CqEstimate est = estimate_c_q(ctx, grid, sp);
  Table t;
  t.meta = meta_of(opt);
  t.header = {"c_q", "rms_rel_residual", "max_rel_residual",
              "window_sensitivity", "im_max"};
  t.rows.push_back({format_double(est.c_q),
                    format_double(est.rms_rel_residual),
                    format_double(est.max_rel_residual),
                    format_double(est.window_sensitivity),
                    format_double(est.im_max)});
  write_table(t, opt.format, opt.out);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"q-deformed harmonic analysis on the quantum plane"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string config_flag;
  app.add_option("--q", opt.cfg.q, "deformation parameter, 0 < q < 1");
  app.add_option("--L", opt.cfg.L, "window half-width");
  app.add_option("--series-tol", opt.cfg.series_tol, "series tolerance");
  app.add_option("--assert-tol", opt.cfg.assert_tol, "assertion tolerance");
  app.add_option("--epsilon", opt.cfg.epsilon, "spectral regularization");
  app.add_option("--precision", opt.precision, "double | extended");
  app.add_option("--format", opt.format, "csv | json");
  app.add_option("--seed", opt.cfg.seed, "seed for randomized checks");
  app.add_option("--config", config_flag, "key=value config file");
  app.add_option("--out", opt.out, "output path (default stdout)");
  app.add_flag("--allow-q-near-one", opt.allow_q_near_one,
               "permit q > 1-1e-6 (slow)");
  app.add_flag("--timings", opt.timings, "include wall times in reports");

  // eval
  auto *eval = app.add_subcommand("eval", "evaluate J, Js, N, G, spectral-G");
  std::string fn = "J";
  std::vector<double> xs, ps{1.0}, rhos{1.0};
  double cq = 0.0;
  int order_s = 0;
  eval->add_option("--fn", fn, "J | Js | N | G | spectral-G")->required();
  eval->add_option("--x", xs, "argument list for J/Js");
  eval->add_option("--p", ps, "spectral parameter list");
  eval->add_option("--rho", rhos, "radial point list");
  eval->add_option("--cq", cq, "Neumann constant c_q");
  eval->add_option("--s", order_s, "order for Js");

  // verify
  auto *verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all";
  verify->add_option("--suite", suite,
                     "algebra | calculus | bessel | delta | green | plane | all");

  // spectrum
  auto *spectrum = app.add_subcommand("spectrum", "sector spectrum scan");
  int sec_s = 0, sj_lo = -45, sj_hi = 25;
  spectrum->add_option("--s", sec_s, "sector index difference");
  spectrum->add_option("--j-lo", sj_lo, "sector window low edge");
  spectrum->add_option("--j-hi", sj_hi, "sector window high edge");

  // apply-green
  auto *apply = app.add_subcommand("apply-green", "apply G^p(R) to a vector");
  std::string vec = "ets";
  double ag_p = 0.37, ag_cq = 0.0;
  int ag_t = 0, ag_s = 0, ag_a = 0, ag_b = 0;
  apply->add_option("--vector", vec, "ets | basis");
  apply->add_option("--p", ag_p, "spectral parameter");
  apply->add_option("--cq", ag_cq, "Neumann constant c_q");
  apply->add_option("--t", ag_t, "t index (ets)");
  apply->add_option("--s", ag_s, "sector (ets)");
  apply->add_option("--a", ag_a, "a index (basis)");
  apply->add_option("--b", ag_b, "b index (basis)");

  // estimate-cq
  auto *est = app.add_subcommand("estimate-cq", "calibrate C_q");
  int p_count = 4, p_start = 0;
  std::vector<int> rho_exps{0, 1, 2, 3};
  est->add_option("--p-count", p_count, "anti-resonant p-grid size");
  est->add_option("--p-start", p_start, "first spectrum midpoint index");
  est->add_option("--rho-exponents", rho_exps, "lattice exponents l");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) // --help
      return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (config_flag.empty()) {
      if (const char *env = std::getenv("QPLANE_CONFIG"))
        config_flag = env;
    }
    // precedence: flags > config file > defaults
    if (!config_flag.empty()) {
      CliOptions file_opt;
      apply_config_file(file_opt, config_flag);
      CliOptions merged = file_opt;
      // re-apply any flag the user passed explicitly
      if (app.count("--q"))
        merged.cfg.q = opt.cfg.q;
      if (app.count("--L"))
        merged.cfg.L = opt.cfg.L;
      if (app.count("--series-tol"))
        merged.cfg.series_tol = opt.cfg.series_tol;
      if (app.count("--assert-tol"))
        merged.cfg.assert_tol = opt.cfg.assert_tol;
      if (app.count("--epsilon"))
        merged.cfg.epsilon = opt.cfg.epsilon;
      if (app.count("--precision"))
        merged.precision = opt.precision;
      if (app.count("--format"))
        merged.format = opt.format;
      if (app.count("--seed"))
        merged.cfg.seed = opt.cfg.seed;
      merged.out = opt.out;
      merged.allow_q_near_one = opt.allow_q_near_one;
      merged.timings = opt.timings;
      opt = merged;
    }
    finalize(opt);

    if (eval->parsed()) {
      if (fn == "J" || fn == "Js") {
        if (xs.empty())
          throw ConfigError("eval --fn J needs at least one --x");
      }
      return cmd_eval(opt, fn, xs, ps, rhos, cq, order_s);
    }
    if (verify->parsed())
      return cmd_verify(opt, suite);
    if (spectrum->parsed())
      return cmd_spectrum(opt, sec_s, sj_lo, sj_hi);
    if (apply->parsed())
      return cmd_apply_green(opt, vec, ag_p, ag_cq, ag_t, ag_s, ag_a, ag_b);
    if (est->parsed())
      return cmd_estimate_cq(opt, p_count, p_start, rho_exps);
    return 2;
  } catch (const ConfigError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
