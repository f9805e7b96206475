#include <doctest.h>

#include <cmath>
#include <random>

#include "qplane/qcalc.hpp"

using namespace qplane;

namespace {

RadialFunction sample_real(const QContext &ctx, const QLattice &lat,
                           const std::function<double(double)> &f,
                           DecayClass dc, double f0) {
  return RadialFunction::sample(
      ctx, lat, [&](double r) { return Complex{f(r), 0.0}; }, dc,
      Complex{f0, 0.0});
}

} // namespace

TEST_CASE("q-numbers and factorials") {
  const QContext ctx(0.5);
  CHECK(q_number(ctx, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q_number(ctx, 2) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(q_number(ctx, 3) == doctest::Approx(5.25).epsilon(1e-15));
  CHECK(q_factorial(ctx, 0) == 1.0);
  CHECK(q_factorial(ctx, 2) == doctest::Approx(2.5).epsilon(1e-15));
  // product of the q_number values 1 * 2.5 * 5.25
  CHECK(q_factorial(ctx, 3) == doctest::Approx(13.125).epsilon(1e-15));
  for (int m = 1; m <= 40; ++m) {
    CHECK(q_number(ctx, -m) == -q_number(ctx, m)); // exact sign symmetry
    CHECK(q_number(ctx, m) > 0.0);
  }
  CHECK_THROWS_AS((void)q_factorial(ctx, -1), DomainError);
}

TEST_CASE("context validation") {
  CHECK_THROWS_AS(QContext(0.0), DomainError);
  CHECK_THROWS_AS(QContext(1.0), DomainError);
  CHECK_THROWS_AS(QContext(-0.5), DomainError);
  CHECK_THROWS_AS(QContext(0.5, PrecisionMode::Double, 0.0), DomainError);
  CHECK_THROWS_AS(QContext(0.5, PrecisionMode::Double, 1e-10, 0), DomainError);
}

TEST_CASE("lattice generation: rho_0 exact, ratio structure") {
  const QContext ctx(0.7);
  const QLattice lat(ctx, -30, 30);
  CHECK(lat.point(0) == 1.0);
  for (int j = 0; j < 30; ++j)
    CHECK(lat.point(j + 1) == lat.point(j) * ctx.q2()); // bit-exact upward
  for (int j = -30; j < 0; ++j) {
    const double ratio = lat.point(j + 1) / lat.point(j);
    CHECK(ratio == doctest::Approx(ctx.q2()).epsilon(4e-16));
  }
}

TEST_CASE("jackson integral examples") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -20, 20);
  // single-point support: exactly (1-q^2) rho_j
  for (int j : {-9, 0, 7}) {
    const WeightedPairing w =
        jackson_integral(ctx, RadialFunction::indicator(lat, j));
    CHECK(w.value.real() == (1.0 - ctx.q2()) * lat.point(j));
    CHECK(w.value.imag() == 0.0);
    CHECK(w.truncation_estimate >= 0.0);
  }
  // geometric series: f = rho on j >= 0 gives 1/(1+q^2) = 0.8
  const QLattice half(ctx, 0, 40);
  const RadialFunction f = sample_real(
      ctx, half, [](double r) { return r; }, DecayClass::Summable, 0.0);
  CHECK(jackson_integral(ctx, f).value.real() ==
        doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("pairing_H conjugate symmetry and reality") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -10, 10);
  const RadialFunction f = RadialFunction::sample(
      ctx, lat,
      [](double r) { return Complex{std::exp(-r), 0.4 * std::exp(-2.0 * r)}; },
      DecayClass::Summable);
  const RadialFunction g = RadialFunction::sample(
      ctx, lat,
      [](double r) { return Complex{r * std::exp(-r), -0.1 * std::exp(-r)}; },
      DecayClass::Summable);
  const Complex a = pairing_H(ctx, f, g).value;
  const Complex b = pairing_H(ctx, g, f).value;
  CHECK(std::abs(a - std::conj(b)) <= 1e-15 * std::abs(a));
  // real inputs give a real pairing
  const RadialFunction fr = sample_real(
      ctx, lat, [](double r) { return std::exp(-r); }, DecayClass::Summable,
      1.0);
  CHECK(pairing_H(ctx, fr, fr).value.imag() == 0.0);
}

TEST_CASE("difference operators on monomials") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -12, 12);
  const RadialFunction c1 = sample_real(
      ctx, lat, [](double) { return 1.0; }, DecayClass::Unrestricted, 1.0);
  const RadialFunction r1 = sample_real(
      ctx, lat, [](double r) { return r; }, DecayClass::Unrestricted, 0.0);
  const RadialFunction r2 = sample_real(
      ctx, lat, [](double r) { return r * r; }, DecayClass::Unrestricted, 0.0);

  const RadialFunction dc = d_plus(ctx, c1);
  CHECK(dc.lattice().j_max() == 11); // small-rho edge consumed
  for (int j = dc.lattice().j_min(); j <= dc.lattice().j_max(); ++j)
    CHECK(std::abs(dc.at(j)) == 0.0);

  const RadialFunction dr = d_plus(ctx, r1);
  for (int j = dr.lattice().j_min(); j <= dr.lattice().j_max(); ++j)
    CHECK(dr.at(j).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dr.zero_limit(ctx).real() == doctest::Approx(1.0).epsilon(1e-10));

  const RadialFunction dr2 = d_plus(ctx, r2);
  for (int j = dr2.lattice().j_min(); j <= dr2.lattice().j_max(); ++j) {
    const double expect = (1.0 + ctx.q2()) * dr2.lattice().point(j);
    CHECK(dr2.at(j).real() == doctest::Approx(expect).epsilon(1e-14));
  }

  const RadialFunction dm = d_minus(ctx, r1);
  CHECK(dm.lattice().j_min() == -11); // large-rho edge consumed
  for (int j = dm.lattice().j_min(); j <= dm.lattice().j_max(); ++j)
    CHECK(dm.at(j).real() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS((void)d_plus(ctx, RadialFunction::indicator(
                                        QLattice(ctx, 0, 1), 0)),
                  WindowError);
}

TEST_CASE("box: examples and window bookkeeping") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -12, 12);
  const RadialFunction c1 = sample_real(
      ctx, lat, [](double) { return 1.0; }, DecayClass::Unrestricted, 1.0);
  const RadialFunction b1 = box(ctx, c1);
  CHECK(b1.lattice().j_min() == -11);
  CHECK(b1.lattice().j_max() == 11);
  for (int j = b1.lattice().j_min(); j <= b1.lattice().j_max(); ++j)
    CHECK(std::abs(b1.at(j)) == 0.0);
  const RadialFunction r1 = sample_real(
      ctx, lat, [](double r) { return r; }, DecayClass::Unrestricted, 0.0);
  const RadialFunction br = box(ctx, r1);
  for (int j = br.lattice().j_min(); j <= br.lattice().j_max(); ++j)
    CHECK(br.at(j).real() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("property: box equals the expanded stencil on random functions") {
  const QContext ctx(0.6);
  const QLattice lat(ctx, -14, 14);
  std::mt19937_64 rng(991);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    // random smooth profile: sum of a few rho^k exp(-c rho) modes
    const double a0 = u(rng), a1 = u(rng), a2 = u(rng);
    const double c0 = 0.5 + 0.5 * std::abs(u(rng));
    const RadialFunction f = RadialFunction::sample(
        ctx, lat,
        [&](double r) {
          const double e = std::exp(-c0 * r);
          return Complex{(a0 + a1 * r + a2 * r * r) * e, a1 * e};
        },
        DecayClass::Summable);
    const RadialFunction a = box(ctx, f);
    const RadialFunction b = box_stencil(ctx, f);
    for (int j = a.lattice().j_min(); j <= a.lattice().j_max(); ++j) {
      const double scale =
          std::max({std::abs(a.at(j)), std::abs(b.at(j)), 1.0});
      CHECK(std::abs(a.at(j) - b.at(j)) / scale <= 64.0 *
                                                       std::numeric_limits<
                                                           double>::epsilon());
    }
  }
}

TEST_CASE("property: box is symmetric for compactly supported functions") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -16, 16);
  std::mt19937_64 rng(417);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    auto mk = [&] {
      std::vector<Complex> s(static_cast<size_t>(lat.size()),
                             Complex{0.0, 0.0});
      for (int j = -8; j <= 8; ++j)
        s[static_cast<size_t>(j - lat.j_min())] = Complex{u(rng), u(rng)};
      return RadialFunction(lat, std::move(s), DecayClass::CompactSupport,
                            Complex{0.0, 0.0});
    };
    const RadialFunction f = mk(), g = mk();
    const Complex a = weak_box_pairing(ctx, g, f).value; // (g, box f)
    const Complex b = weak_box_pairing(ctx, f, g).value; // (f, box g)
    const double scale = std::max({std::abs(a), std::abs(b), 1e-3});
    CHECK(std::abs(a - std::conj(b)) / scale <= 1e-13);
  }
}

TEST_CASE("zero limit estimation and delta pairing") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -6, 30);
  const RadialFunction r1 = sample_real(
      ctx, lat, [](double r) { return r; }, DecayClass::Unrestricted, 0.0);
  CHECK(std::abs(delta_pairing(ctx, r1)) == 0.0); // supplied
  // estimated limit of exp(-rho) is 1
  const RadialFunction ex = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{std::exp(-r), 0.0}; },
      DecayClass::Summable);
  CHECK(!ex.has_zero_limit());
  CHECK(delta_pairing(ctx, ex).real() == doctest::Approx(1.0).epsilon(1e-12));
  // non-contracting deep samples refuse to extrapolate
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  std::vector<Complex> s(static_cast<size_t>(lat.size()));
  for (auto &x : s)
    x = Complex{u(rng), 0.0};
  const RadialFunction bad(lat, std::move(s), DecayClass::Unrestricted);
  CHECK_THROWS_AS((void)delta_pairing(ctx, bad), ExtrapolationError);
}

TEST_CASE("weak delta identity: (log rho, box f) = (2q ln q)/(q-1/q) f(0)") {
  const QContext ctx(0.5);
  // direct arithmetic on the closed form at q = 0.5
  CHECK(weak_delta_factor(ctx) ==
        doctest::Approx(0.46209812037329687).epsilon(1e-15));
  const QLattice lat(ctx, -24, 40);
  const RadialFunction lg = log_rho(ctx, lat);
  const RadialFunction f = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{std::exp(-r), 0.0}; },
      DecayClass::Summable, Complex{1.0, 0.0});
  const WeightedPairing w = weak_box_pairing(ctx, lg, f);
  CHECK(w.value.real() ==
        doctest::Approx(weak_delta_factor(ctx)).epsilon(1e-12));
  // f with f(0) = 0 pairs to ~0
  const RadialFunction g = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{r * std::exp(-r), 0.0}; },
      DecayClass::Summable, Complex{0.0, 0.0});
  CHECK(std::abs(weak_box_pairing(ctx, lg, g).value) <= 1e-12);
}

TEST_CASE("weak delta identity: window-growth extrapolation oracle") {
  const QContext ctx(0.5);
  // the pairing approaches the closed-form factor as the window grows
  double prev_err = 1e9;
  for (int L : {10, 20, 40}) {
    const QLattice lat(ctx, -L, L);
    const RadialFunction lg = log_rho(ctx, lat);
    const RadialFunction f = RadialFunction::sample(
        ctx, lat, [](double r) { return Complex{std::exp(-r), 0.0}; },
        DecayClass::Summable, Complex{1.0, 0.0});
    const double err = std::abs(weak_box_pairing(ctx, lg, f).value.real() -
                                weak_delta_factor(ctx));
    CHECK(err <= prev_err + 1e-15);
    prev_err = err;
  }
  CHECK(prev_err <= 1e-12);
}

TEST_CASE("divergence detection at the rho -> inf end") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -30, 6);
  const RadialFunction f = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{r, 0.0}; },
      DecayClass::Unrestricted, Complex{0.0, 0.0});
  CHECK_THROWS_AS((void)jackson_integral(ctx, f), DivergenceError);
}
