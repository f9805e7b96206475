#include <doctest.h>

#include <cmath>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "qplane/qspecial.hpp"

using namespace qplane;

namespace {

using Oracle = boost::multiprecision::number<
    boost::multiprecision::cpp_dec_float<120>, boost::multiprecision::et_off>;

// Independent oracle: plain term-by-term summation of the J series in
// 120-digit arithmetic, no adaptive truncation (>= 200 terms).
double oracle_bessel_j(double q, double x, int terms = 250) {
  const Oracle qq(q);
  const Oracle y = Oracle(x) * Oracle(x);
  Oracle t{1}, s{0};
  Oracle qk{1}, iqk{1};
  for (int k = 0; k < terms; ++k) {
    s += t;
    qk *= qq;
    iqk /= qq;
    const Oracle qn = (qk - iqk) / (qq - Oracle(1) / qq);
    t = -t * y / (qn * qn);
  }
  return s.convert_to<double>();
}

// Independent route: the standard Hahn-Exton normalization
//   J0(z; Q) = sum (-1)^k Q^{k(k+1)/2} z^{2k} / ((Q;Q)_k)^2   with Q = q^2.
double oracle_hahn_exton_j0(double q, double z, int terms = 250) {
  const Oracle Q = Oracle(q) * Oracle(q);
  const Oracle z2 = Oracle(z) * Oracle(z);
  Oracle s{0}, t{1}, Qk{1}, poch{1};
  for (int k = 0; k < terms; ++k) {
    s += t;
    Qk *= Q;            // Q^{k+1}
    poch *= (1 - Qk);   // (Q;Q)_{k+1} / (Q;Q)_k factor
    // ratio: -Q^{k+1} z^2 / (1-Q^{k+1})^2
    t = -t * Qk * z2 / ((1 - Qk) * (1 - Qk));
  }
  return s.convert_to<double>();
}

} // namespace

TEST_CASE("bessel_j: trivial and frozen oracle values") {
  const QContext ctx(0.5);
  CHECK(bessel_j(ctx, 0.0).value.real() == 1.0);
  // extended-precision exact-summation oracle, q=0.5, x=1
  const double expect = oracle_bessel_j(0.5, 1.0);
  CHECK(expect == doctest::Approx(0.15424631954556064).epsilon(1e-14));
  CHECK(bessel_j(ctx, 1.0).value.real() ==
        doctest::Approx(expect).epsilon(1e-14));
  const SeriesResult r = bessel_j(ctx, 1.0);
  CHECK(r.terms_used <= ctx.max_terms());
  CHECK(r.cancellation_magnitude >= 1.0);
  CHECK(r.error_bound >= 0.0);
}

TEST_CASE("bessel_j equals the standard Hahn-Exton series after rescaling") {
  // J(x) = J0^HE((1-q^2) x / q ; q^2) -- confirmed numerically before use
  for (double q : {0.3, 0.5, 0.8}) {
    const QContext ctx(q);
    for (double x : {0.2, 1.0, 2.5, 7.0}) {
      const double lhs = bessel_j(ctx, x).value.real();
      const double rhs = oracle_hahn_exton_j0(q, (1.0 - q * q) * x / q);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("bessel_j: cancellation failover to extended precision") {
  const QContext ctx(0.5);
  // a double argument right next to a zero of J: the alternating series
  // cancels ~ 16 orders, far beyond the 1e6 double budget
  const double x = ctx.mu() * std::exp(10.0 * std::log(2.0));
  const SeriesResult r = bessel_j(ctx, x);
  CHECK(std::isfinite(r.value.real()));
  CHECK(r.cancellation_magnitude > 1e6);
  const double expect = oracle_bessel_j(0.5, x, 400);
  CHECK(r.value.real() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bessel_j: precision error beyond the top tier") {
  const QContext ctx(0.5);
  CHECK_THROWS_AS((void)bessel_j(ctx, std::pow(2.0, 200.0)), PrecisionError);
}

TEST_CASE("bessel_j_order: conventions") {
  const QContext ctx(0.55);
  for (double x : {0.0, 0.4, 1.3})
    CHECK(bessel_j_order(ctx, 0, x).value.real() ==
          doctest::Approx(bessel_j(ctx, x).value.real()).epsilon(1e-15));
  // leading order x^s / [s]!
  for (int s : {1, 3}) {
    const double x = 1e-5;
    CHECK(bessel_j_order(ctx, s, x).value.real() / std::pow(x, s) ==
          doctest::Approx(1.0 / q_factorial(ctx, s)).epsilon(1e-8));
  }
  // J_{-s} = (-1)^s J_s
  for (int s : {1, 2, 5})
    for (double x : {0.7, 2.1}) {
      const double a = bessel_j_order(ctx, -s, x).value.real();
      const double b = bessel_j_order(ctx, s, x).value.real();
      CHECK(a == ((s % 2 == 0) ? b : -b));
    }
  CHECK_THROWS_AS((void)bessel_j_order(ctx, 1, -0.5), DomainError);
}

TEST_CASE("neumann: frozen oracle value and c_q linearity") {
  const QContext ctx(0.5);
  const GreenParams gp{1.0, 0.5772156649};
  // extended-precision series oracle (mpmath-independent check recomputed
  // with the 120-digit summation at development time)
  CHECK(neumann_n(ctx, gp, 1.0).value.real() ==
        doctest::Approx(4.107329233665833).epsilon(1e-13));
  CHECK_THROWS_AS((void)neumann_n(ctx, gp, -1.0), DomainError);
  CHECK_THROWS_AS((void)neumann_n(ctx, gp, 0.0), DomainError);
  // linearity: N(c+d) - N(c) = (q-1/q)/(q ln q) d J
  const GreenParams a{0.73, 0.1}, b{0.73, 0.8};
  for (double rho : {0.4, 1.7}) {
    const double lhs = neumann_n(ctx, b, rho).value.real() -
                       neumann_n(ctx, a, rho).value.real();
    const double rhs = ctx.q_minus_inv_q() / (ctx.q() * ctx.ln_q()) *
                       (b.c_q - a.c_q) *
                       bessel_j(ctx, std::sqrt(0.73 * rho)).value.real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // lattice evaluation agrees with the generic path
  for (int j : {-3, 0, 4}) {
    const double rho = std::exp(2.0 * j * ctx.ln_q());
    CHECK(neumann_on_lattice(ctx, gp, j).value.real() ==
          doctest::Approx(neumann_n(ctx, gp, rho).value.real())
              .epsilon(1e-12));
  }
}

TEST_CASE("homogeneous residuals at sample points") {
  const QContext ctx(0.5);
  const GreenParams gp{0.37, 0.5772156649};
  for (int j : {-10, -3, 0, 5, 15}) {
    CHECK(residual_homogeneous(ctx, detail::HomogeneousKind::BesselJ, gp, j) <=
          1e-12);
    CHECK(residual_homogeneous(ctx, detail::HomogeneousKind::NeumannN, gp, j) <=
          1e-10);
  }
}

TEST_CASE("green: Im G = -J by construction") {
  const QContext ctx(0.45);
  const GreenParams gp{0.61, 0.3};
  for (double rho : {0.2, 1.0, 3.7}) {
    const Complex g = green_g(ctx, gp, rho);
    // the standalone J evaluation squares sqrt(p rho), so match to 1 ulp
    CHECK(g.imag() ==
          doctest::Approx(-bessel_j(ctx, std::sqrt(gp.p * rho)).value.real())
              .epsilon(4e-15));
    CHECK(g.real() ==
          doctest::Approx(neumann_n(ctx, gp, rho).value.real())
              .epsilon(4e-15));
  }
}

TEST_CASE("classical limit sanity at q = 0.999") {
  const QContext ctx(0.999, PrecisionMode::Extended, 1e-16, 4000);
  const double x = 0.7;
  CHECK(std::abs(bessel_j(ctx, x).value.real() -
                 std::cyl_bessel_j(0.0, 2.0 * x)) <= 2e-7);
  const GreenParams gp{1.0, 0.5772156649015329};
  CHECK(std::abs(neumann_n(ctx, gp, x * x).value.real() -
                 M_PI * std::cyl_neumann(0.0, 2.0 * x)) <= 5e-3);
}

TEST_CASE("orthogonal family: lattice decay and Gram matrix") {
  const QContext ctx(0.5);
  // |phi(-n)| tracks q^{n(n+1)} (the zero-lattice decay)
  for (int n : {6, 10, 14}) {
    const double v = std::abs(fb_phi(ctx, -n));
    const double scale = std::exp(n * (n + 1) * ctx.ln_q());
    CHECK(v / scale > 0.5);
    CHECK(v / scale < 3.0);
  }
  const auto M = fb_gram(ctx, -2, 2, 30);
  for (int m = -2; m <= 2; ++m) {
    const double expect = (1.0 - ctx.q2()) * std::exp(-2.0 * m * ctx.ln_q());
    CHECK(M[static_cast<size_t>(m + 2)][static_cast<size_t>(m + 2)] ==
          doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(std::abs(M[2][3]) <= 1e-10 * M[3][3]);
  CHECK(std::abs(M[0][4]) <= 1e-10 * M[4][4]);
}

TEST_CASE("spectral sum: error contracts") {
  const QContext ctx(0.5);
  SpectralEvalParams sp;
  sp.j_min = -16;
  sp.j_max = 40;
  const GreenParams off{anti_resonant_p_grid(ctx, 1)[0], 0.0};
  // rho = 0 diverges at the lambda -> inf end
  CHECK_THROWS_AS((void)spectral_green(ctx, off, sp, 0.0), DivergenceError);
  // on-spectrum p needs regularization
  const GreenParams on{spectrum_point(ctx, 2), 0.0};
  CHECK_THROWS_AS((void)spectral_green(ctx, on, sp, 1.0), DomainError);
  SpectralEvalParams sp_eps = sp;
  sp_eps.epsilon = 1e-4;
  const SeriesResult r = spectral_green(ctx, on, sp_eps, 1.0);
  CHECK(std::isfinite(r.value.real()));
  CHECK(std::abs(r.value.imag()) > 0.0); // resonant term is imaginary
  // off-spectrum, eps = 0: real and stable under window growth
  const SeriesResult a = spectral_green(ctx, off, sp, 1.0);
  CHECK(a.value.imag() == 0.0);
  SpectralEvalParams sp2 = sp;
  sp2.j_min -= 8;
  sp2.j_max += 10;
  const SeriesResult b = spectral_green(ctx, off, sp2, 1.0);
  CHECK(std::abs(a.value - b.value) <= 1e-10 * std::abs(b.value));
}

TEST_CASE("estimate_c_q: frozen oracle, cross-validation, agreement") {
  const QContext ctx(0.5);
  SpectralEvalParams sp;
  sp.j_min = -16;
  sp.j_max = 48;
  SpectralGrid grid;
  grid.p_grid = anti_resonant_p_grid(ctx, 3);
  grid.rho_exponents = {0, 1, 2};
  const CqEstimate est = estimate_c_q(ctx, grid, sp);
  // frozen from the independent 450-digit development oracle
  CHECK(est.c_q == doctest::Approx(0.642656865456961).epsilon(1e-12));
  CHECK(est.rms_rel_residual <= 1e-12);
  CHECK(est.window_sensitivity <= 1e-12);
  CHECK(est.im_max == 0.0);
  // cross-validation: disjoint rho grids agree
  SpectralGrid g2;
  g2.p_grid = grid.p_grid;
  g2.rho_exponents = {3, 4, 5};
  const CqEstimate est2 = estimate_c_q(ctx, g2, sp);
  CHECK(std::abs(est2.c_q - est.c_q) <= 1e-11);
  // agreement with green_g after calibration (real parts)
  const GreenParams gp{grid.p_grid[1], est.c_q};
  const auto spec = spectral_green_grid(ctx, sp, grid);
  for (size_t il = 0; il < grid.rho_exponents.size(); ++il) {
    const double n =
        neumann_on_lattice(ctx, gp, grid.rho_exponents[il]).value.real();
    CHECK(spec[1][il].value.real() == doctest::Approx(n).epsilon(1e-11));
  }
}

TEST_CASE("estimate_c_q: non-geometric p-grid fails calibration") {
  const QContext ctx(0.5);
  SpectralEvalParams sp;
  sp.j_min = -16;
  sp.j_max = 48;
  SpectralGrid grid;
  // two p values with different off-lattice phases carry different implied
  // c_q, so a single-parameter fit cannot absorb them
  grid.p_grid = {0.37, 0.123};
  grid.rho_exponents = {0, 1};
  CHECK_THROWS_AS((void)estimate_c_q(ctx, grid, sp), CalibrationError);
}

TEST_CASE("spectrum points and on-spectrum detection") {
  const QContext ctx(0.5);
  int t = 0;
  CHECK(p_on_spectrum(ctx, spectrum_point(ctx, 3), &t));
  CHECK(t == 3);
  CHECK(!p_on_spectrum(ctx, anti_resonant_p_grid(ctx, 1)[0], &t));
  CHECK(!p_on_spectrum(ctx, 0.37, &t));
}
