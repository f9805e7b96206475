#include "qplane/qspecial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qplane {

namespace {

SeriesResult from_eval(const detail::EvalInfo &e) {
  SeriesResult r;
  r.value = Complex{e.value, 0.0};
  r.terms_used = e.terms;
  r.cancellation_magnitude =
      std::max(1.0, std::exp(e.ln_abs_peak - e.ln_abs_value));
  if (!std::isfinite(r.cancellation_magnitude))
    r.cancellation_magnitude = std::numeric_limits<double>::max();
  // clean digits left after cancellation
  const double clean =
      e.digits_used - (e.ln_abs_peak - e.ln_abs_value) / 2.302585092994046;
  r.error_bound = std::abs(e.value) * std::pow(10.0, -std::max(clean, 1.0));
  return r;
}

} // namespace

SeriesResult bessel_j(const QContext &ctx, double x) {
  return from_eval(detail::bessel_j_auto(ctx, x));
}

SeriesResult bessel_j_order(const QContext &ctx, int s, double x) {
  if (s >= 0)
    return from_eval(detail::bessel_j_order_auto(ctx, s, x));
  SeriesResult r = from_eval(detail::bessel_j_order_auto(ctx, -s, x));
  if ((-s) % 2 != 0)
    r.value = -r.value;
  return r;
}

SeriesResult neumann_n(const QContext &ctx, const GreenParams &gp,
                       double rho) {
  if (!(rho > 0.0))
    throw DomainError("neumann_n: rho must be > 0");
  const detail::GreenEval g =
      detail::green_parts_auto(ctx, gp.p, rho, gp.c_q, nullptr);
  SeriesResult r;
  r.value = Complex{g.neumann, 0.0};
  r.terms_used = g.bessel.terms;
  r.cancellation_magnitude = std::max(
      1.0, std::exp(g.bessel.ln_abs_peak - g.ln_abs_neumann));
  const double clean =
      g.digits_used -
      (g.bessel.ln_abs_peak - g.ln_abs_neumann) / 2.302585092994046;
  r.error_bound =
      std::abs(g.neumann) * std::pow(10.0, -std::max(clean, 1.0));
  return r;
}

SeriesResult neumann_on_lattice(const QContext &ctx, const GreenParams &gp,
                                int j) {
  const double rho = std::exp(2.0 * j * ctx.ln_q());
  const detail::GreenEval g =
      detail::green_parts_auto(ctx, gp.p, rho, gp.c_q, &j);
  SeriesResult r;
  r.value = Complex{g.neumann, 0.0};
  r.terms_used = g.bessel.terms;
  r.cancellation_magnitude =
      std::max(1.0, std::exp(g.bessel.ln_abs_peak - g.ln_abs_neumann));
  const double clean =
      g.digits_used -
      (g.bessel.ln_abs_peak - g.ln_abs_neumann) / 2.302585092994046;
  r.error_bound =
      std::abs(g.neumann) * std::pow(10.0, -std::max(clean, 1.0));
  return r;
}

Complex green_g(const QContext &ctx, const GreenParams &gp, double rho) {
  if (!(rho > 0.0))
    throw DomainError("green_g: rho must be > 0");
  const detail::GreenEval g =
      detail::green_parts_auto(ctx, gp.p, rho, gp.c_q, nullptr);
  return Complex{g.neumann, -g.bessel.value};
}

Complex green_on_lattice(const QContext &ctx, const GreenParams &gp, int j) {
  const double rho = std::exp(2.0 * j * ctx.ln_q());
  const detail::GreenEval g =
      detail::green_parts_auto(ctx, gp.p, rho, gp.c_q, &j);
  return Complex{g.neumann, -g.bessel.value};
}

double residual_homogeneous(const QContext &ctx, detail::HomogeneousKind kind,
                            const GreenParams &gp, int j) {
  return detail::residual_homogeneous(ctx, kind, gp.p, gp.c_q, j);
}

double fb_phi(const QContext &ctx, int a) {
  return detail::bessel_j_lattice_auto(ctx, a).value;
}

double spectrum_point(const QContext &ctx, int n) {
  return ctx.mu() * ctx.mu() * std::exp(2.0 * n * ctx.ln_q());
}

bool p_on_spectrum(const QContext &ctx, double p, int *t_out, double tol) {
  if (!(p > 0.0))
    return false;
  const double t = std::log(p / (ctx.mu() * ctx.mu())) / (2.0 * ctx.ln_q());
  const double tr = std::round(t);
  if (t_out)
    *t_out = static_cast<int>(tr);
  return std::abs(t - tr) < tol;
}

namespace {

// phi cache over combined exponents [a_lo, a_hi]; OpenMP fill optional.
std::vector<double> phi_cache(const QContext &ctx, int a_lo, int a_hi,
                              bool parallel) {
  std::vector<double> c(static_cast<size_t>(a_hi - a_lo + 1));
  std::string err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int a = a_lo; a <= a_hi; ++a) {
    try {
      c[static_cast<size_t>(a - a_lo)] = fb_phi(ctx, a);
    } catch (const std::exception &e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (err.empty())
        err = e.what();
    }
  }
  if (!err.empty())
    throw PrecisionError("phi cache: " + err);
  return c;
}

std::vector<std::vector<double>> fb_gram_impl(const QContext &ctx, int n_min,
                                              int n_max, int L,
                                              bool parallel) {
  if (n_min > n_max || L < 2)
    throw DomainError("fb_gram: bad ranges");
  const int a_lo = n_min - L, a_hi = n_max + L;
  const std::vector<double> phi = phi_cache(ctx, a_lo, a_hi, parallel);
  const int nn = n_max - n_min + 1;
  std::vector<std::vector<double>> M(static_cast<size_t>(nn),
                                     std::vector<double>(static_cast<size_t>(nn)));
  const QLattice lat(ctx, -L, L);
  const double w0 = 1.0 - ctx.q2();
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
#endif
  for (int n = n_min; n <= n_max; ++n)
    for (int m = n_min; m <= n_max; ++m) {
      double acc = 0.0;
      for (int j = -L; j <= L; ++j)
        acc += lat.point(j) * phi[static_cast<size_t>(n + j - a_lo)] *
               phi[static_cast<size_t>(m + j - a_lo)];
      M[static_cast<size_t>(n - n_min)][static_cast<size_t>(m - n_min)] =
          w0 * acc;
    }
  return M;
}

} // namespace

std::vector<std::vector<double>> fb_gram(const QContext &ctx, int n_min,
                                         int n_max, int L) {
  return fb_gram_impl(ctx, n_min, n_max, L, true);
}

std::vector<std::vector<double>> fb_gram_serial(const QContext &ctx, int n_min,
                                                int n_max, int L) {
  return fb_gram_impl(ctx, n_min, n_max, L, false);
}

namespace {

// core spectral sum given a phi accessor; fixed-order summation
SeriesResult spectral_sum(const QContext &ctx, const GreenParams &gp,
                          const SpectralEvalParams &sp,
                          const std::function<double(int)> &phi_at,
                          bool allow_divergence_check = true) {
  if (sp.j_min >= sp.j_max)
    throw DomainError("spectral_green: empty window");
  int t_res = 0;
  if (p_on_spectrum(ctx, gp.p, &t_res) && t_res >= sp.j_min &&
      t_res <= sp.j_max && sp.epsilon <= 0.0)
    throw DomainError(
        "spectral_green: p on the spectrum requires epsilon > 0");
  const double w0 = 1.0 - ctx.q2();
  Complex acc{0.0, 0.0};
  // q^-2 (1-q^2) lambda_j = q^(2j)/(1-q^2): summed from the lambda -> inf
  // end so the divergence test sees the head magnitudes in window order.
  std::vector<double> head_mags;
  double q2j = std::exp(2.0 * sp.j_min * ctx.ln_q());
  Complex last{0.0, 0.0};
  double tail_hi = 0.0;
  std::ostringstream partials;
  for (int j = sp.j_min; j <= sp.j_max; ++j) {
    const double lambda = ctx.mu() * ctx.mu() * q2j;
    const Complex den{gp.p - lambda, sp.epsilon};
    const Complex term = q2j * phi_at(j) / (w0 * den);
    acc += term;
    if (j - sp.j_min < 4) {
      head_mags.push_back(std::abs(term));
      partials << " S(" << j << ")=" << std::abs(acc);
    }
    last = term;
    q2j *= ctx.q2();
  }
  // head (lambda -> inf) divergence check: the deepest terms must be far
  // below the inner ones (phi decays super-geometrically on the lattice;
  // a flat or growing head means the sum does not converge, e.g. rho = 0)
  if (allow_divergence_check && head_mags.size() >= 3) {
    if (head_mags[0] > ctx.series_tol() * std::max(std::abs(acc), 1e-300) &&
        head_mags[0] > 0.25 * head_mags[2])
      throw DivergenceError(
          "spectral_green: lambda->inf tail not decaying; partial sums:" +
          partials.str());
  }
  tail_hi = std::abs(last) * ctx.q2() / (1.0 - ctx.q2());
  SeriesResult r;
  r.value = acc;
  r.terms_used = sp.j_max - sp.j_min + 1;
  r.error_bound = tail_hi + (head_mags.empty() ? 0.0 : head_mags.front());
  r.cancellation_magnitude = 1.0;
  return r;
}

} // namespace

SeriesResult spectral_green(const QContext &ctx, const GreenParams &gp,
                            const SpectralEvalParams &sp, double rho) {
  if (rho < 0.0)
    throw DomainError("spectral_green: rho must be >= 0");
  if (rho == 0.0)
    return spectral_sum(ctx, gp, sp, [&](int) { return 1.0; });
  // The sum converges only when sqrt(rho) shifts the arguments onto the
  // near-zero lattice of J, i.e. rho = q^(2l); off-lattice rho leaves the
  // deep terms at the envelope scale and the lambda -> inf tail diverges.
  const double lr = std::log(rho) / (2.0 * ctx.ln_q());
  const double lrr = std::round(lr);
  if (std::abs(lr - lrr) > 1e-9)
    throw DomainError("spectral_green: rho must be a lattice point q^(2l); "
                      "the spectral sum diverges off the lattice");
  const int l = static_cast<int>(lrr);
  return spectral_sum(ctx, gp, sp, [&](int j) {
    return detail::bessel_j_lattice_auto(ctx, j + l).value;
  });
}

namespace {

std::vector<std::vector<SeriesResult>>
spectral_green_grid_impl(const QContext &ctx, const SpectralEvalParams &sp,
                         const SpectralGrid &grid, bool parallel) {
  int a_lo = sp.j_min, a_hi = sp.j_max;
  for (int l : grid.rho_exponents) {
    a_lo = std::min(a_lo, sp.j_min + l);
    a_hi = std::max(a_hi, sp.j_max + l);
  }
  const std::vector<double> phi = phi_cache(ctx, a_lo, a_hi, parallel);
  std::vector<std::vector<SeriesResult>> out(grid.p_grid.size());
  for (size_t ip = 0; ip < grid.p_grid.size(); ++ip) {
    GreenParams gp{grid.p_grid[ip], 0.0};
    out[ip].resize(grid.rho_exponents.size());
    for (size_t il = 0; il < grid.rho_exponents.size(); ++il) {
      const int l = grid.rho_exponents[il];
      out[ip][il] = spectral_sum(ctx, gp, sp, [&](int j) {
        return phi[static_cast<size_t>(j + l - a_lo)];
      });
    }
  }
  return out;
}

} // namespace

std::vector<std::vector<SeriesResult>>
spectral_green_grid(const QContext &ctx, const SpectralEvalParams &sp,
                    const SpectralGrid &grid) {
  return spectral_green_grid_impl(ctx, sp, grid, true);
}

std::vector<std::vector<SeriesResult>>
spectral_green_grid_serial(const QContext &ctx, const SpectralEvalParams &sp,
                           const SpectralGrid &grid) {
  return spectral_green_grid_impl(ctx, sp, grid, false);
}

std::vector<double> anti_resonant_p_grid(const QContext &ctx, int count,
                                         int n0) {
  std::vector<double> p(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    p[static_cast<size_t>(i)] =
        ctx.mu() * ctx.mu() * std::exp((2.0 * (n0 + i) + 1.0) * ctx.ln_q());
  return p;
}

namespace {

CqEstimate estimate_c_q_window(const QContext &ctx, const SpectralGrid &grid,
                               const SpectralEvalParams &sp) {
  const auto spec = spectral_green_grid(ctx, sp, grid);
  double num = 0.0, den = 0.0, im_max = 0.0;
  std::vector<double> y, n0, beta;
  for (size_t ip = 0; ip < grid.p_grid.size(); ++ip) {
    const double p = grid.p_grid[ip];
    for (size_t il = 0; il < grid.rho_exponents.size(); ++il) {
      const int l = grid.rho_exponents[il];
      const SeriesResult &s = spec[ip][il];
      im_max = std::max(im_max, std::abs(s.value.imag()));
      GreenParams gp0{p, 0.0};
      const double N0 = neumann_on_lattice(ctx, gp0, l).value.real();
      const double rho = std::exp(2.0 * l * ctx.ln_q());
      const double J = detail::bessel_j_auto(ctx, std::sqrt(p * rho)).value;
      const double b = ctx.q_minus_inv_q() / (ctx.q() * ctx.ln_q()) * J;
      y.push_back(s.value.real());
      n0.push_back(N0);
      beta.push_back(b);
      num += b * (s.value.real() - N0);
      den += b * b;
    }
  }
  if (den == 0.0)
    throw CalibrationError("estimate_c_q: degenerate grid (all beta zero)");
  CqEstimate est;
  est.c_q = num / den;
  est.im_max = im_max;
  double scale = 0.0;
  for (double v : y)
    scale += v * v;
  scale = std::sqrt(scale / static_cast<double>(y.size()));
  if (scale == 0.0)
    scale = 1.0;
  double ss = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double r = (y[i] - n0[i] - est.c_q * beta[i]) / scale;
    est.residuals.push_back(r);
    ss += r * r;
    est.max_rel_residual = std::max(est.max_rel_residual, std::abs(r));
  }
  est.rms_rel_residual = std::sqrt(ss / static_cast<double>(y.size()));
  return est;
}

} // namespace

CqEstimate estimate_c_q(const QContext &ctx, const SpectralGrid &grid,
                        const SpectralEvalParams &sp) {
  CqEstimate est = estimate_c_q_window(ctx, grid, sp);
  SpectralEvalParams sp2 = sp;
  sp2.j_min *= 2;
  sp2.j_max *= 2;
  const CqEstimate est2 = estimate_c_q_window(ctx, grid, sp2);
  est.window_sensitivity = std::abs(est2.c_q - est.c_q);
  const double thresh = 1e-3;
  if (est.rms_rel_residual > thresh)
    throw CalibrationError(
        "estimate_c_q: residual " + std::to_string(est.rms_rel_residual) +
        " above threshold; c_q=" + std::to_string(est.c_q));
  return est;
}

} // namespace qplane
