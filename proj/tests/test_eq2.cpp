#include <doctest.h>

#include <cmath>
#include <random>

#include "qplane/eq2.hpp"
#include "qplane/plane.hpp"
#include "qplane/qcalc.hpp"
#include "qplane/qspecial.hpp"

using namespace qplane;

namespace {
const double kEps = std::numeric_limits<double>::epsilon();
}

TEST_CASE("generators: definitions and relations") {
  const QContext ctx(0.5);
  const TruncatedBasis basis{20, 1};
  const Generators g = build_generators(ctx, basis, PhaseParams{});
  // z diagonal entries (..., 1/q, 1, q, ...)
  CHECK(g.z.entry(0, 0) == Complex{1.0, 0.0});
  CHECK(g.z.entry(1, 1).real() == doctest::Approx(0.5));
  CHECK(g.z.entry(-1, -1).real() == doctest::Approx(2.0));
  CHECK(g.u.entry(1, 0) == Complex{1.0, 0.0});
  // u* u = identity on the interior
  const BandOperator uu = g.u_star * g.u;
  const BandOperator I = BandOperator::identity(-basis.L, basis.L);
  CHECK((uu - I).interior_abs_max(1) == 0.0);
  // z z* = z* z exactly (both diagonal)
  CHECK((g.z * g.z_star - g.z_star * g.z).interior_abs_max(0) == 0.0);
  // report-based relation check
  const RelationReport rep = check_relations(ctx, g, basis);
  CHECK(rep.max_relative() <= 100.0 * kEps);
  // phases commute through the relations
  const Generators gp = build_generators(ctx, basis, PhaseParams{1.1, -0.4});
  CHECK(check_relations(ctx, gp, basis).max_relative() <= 100.0 * kEps);
}

TEST_CASE("scalar product on A") {
  const QContext ctx(0.5);
  const TruncatedBasis basis{16, 1};
  // rank-one diagonal projector at j=0
  BandOperator P(-basis.L, basis.L);
  {
    std::vector<Complex> d(static_cast<size_t>(2 * basis.L + 1),
                           Complex{0.0, 0.0});
    d[static_cast<size_t>(basis.L)] = Complex{1.0, 0.0};
    P.set_band(0, std::move(d));
  }
  CHECK(scalar_product_A(ctx, P, P).value ==
        Complex{1.0 - ctx.q2(), 0.0});
  // radial operators reduce to pairing_H (same code path, bit-equal)
  const QLattice lat(ctx, -basis.L, basis.L);
  const RadialFunction f = RadialFunction::sample(
      ctx, lat,
      [](double r) { return Complex{std::exp(-r), 0.2 * std::exp(-r)}; },
      DecayClass::Summable);
  const RadialFunction h = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{std::exp(-1.5 * r), 0.0}; },
      DecayClass::Summable);
  BandOperator F(-basis.L, basis.L), H(-basis.L, basis.L);
  std::vector<Complex> fd(static_cast<size_t>(lat.size())),
      hd(static_cast<size_t>(lat.size()));
  for (int j = lat.j_min(); j <= lat.j_max(); ++j) {
    fd[static_cast<size_t>(j - lat.j_min())] = f.at(j);
    hd[static_cast<size_t>(j - lat.j_min())] = h.at(j);
  }
  F.set_band(0, std::move(fd));
  H.set_band(0, std::move(hd));
  const Complex a = scalar_product_A(ctx, F, H).value;
  const Complex b = pairing_H(ctx, f, h).value;
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
  // z is not square integrable: the weighted trace grows at j -> -inf
  const Generators g = build_generators(ctx, basis, PhaseParams{});
  CHECK_THROWS_AS((void)scalar_product_A(ctx, g.z, g.z), DivergenceError);
}

TEST_CASE("coproduct operators and relations") {
  const QContext ctx(0.5);
  const TruncatedBasis basis{10, 1};
  const PhaseParams ph{0.0, 0.9};
  const CoproductOps ops = build_coproduct_ops(ctx, basis, ph);
  // V(e_a x e_b) = e^{2 i phi} e_{a+1} x e_{b+1}
  CHECK(std::abs(ops.V.coeff(1, 1, 2, -3) - std::polar(1.0, 2.0 * ph.phi)) <=
        1e-15);
  const RelationReport rep = check_coproduct_relations(ctx, ops, basis);
  CHECK(rep.max_relative() <= 100.0 * kEps);
  // R = Delta(rho) = Z Z* = Z* Z, self-adjoint, sector-diagonal
  const TensorBandOperator R = delta_rho(ctx, basis, ph);
  const double scale = R.interior_abs_max(1);
  CHECK((R - ops.Z * ops.Z_star).interior_abs_max(1) <= 100.0 * kEps * scale);
  CHECK((R - ops.Z_star * ops.Z).interior_abs_max(1) <= 100.0 * kEps * scale);
  CHECK((R - R.adjoint()).interior_abs_max(1) <= 100.0 * kEps * scale);
  CHECK(sector_leakage(R) == 0.0);
}

TEST_CASE("tensor pairing: orthonormality, factorization, symmetry") {
  const QContext ctx(0.5);
  const TruncatedBasis basis{10, 1};
  auto projector = [&](int j0) {
    BandOperator P(-basis.L, basis.L);
    std::vector<Complex> d(static_cast<size_t>(2 * basis.L + 1),
                           Complex{0.0, 0.0});
    d[static_cast<size_t>(j0 + basis.L)] = Complex{1.0, 0.0};
    P.set_band(0, std::move(d));
    return P;
  };
  // orthonormal tensor projectors pair to delta * delta (weighted)
  const TensorBandOperator P00 = tensor_product(projector(0), projector(0));
  const TensorBandOperator P01 = tensor_product(projector(0), projector(1));
  const double w = (1.0 - ctx.q2());
  CHECK(std::abs(tensor_pairing(ctx, P00, P00) - w * w) <= 1e-15);
  CHECK(std::abs(tensor_pairing(ctx, P00, P01)) == 0.0);
  // factorization on random decaying diagonals
  std::mt19937_64 rng(20260809);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rand_diag = [&] {
    BandOperator A(-basis.L, basis.L);
    std::vector<Complex> d(static_cast<size_t>(2 * basis.L + 1));
    for (int j = -basis.L; j <= basis.L; ++j)
      d[static_cast<size_t>(j + basis.L)] =
          std::exp(-1.2 * std::abs(j)) * Complex{u(rng), u(rng)};
    A.set_band(0, std::move(d));
    return A;
  };
  for (int trial = 0; trial < 8; ++trial) {
    const BandOperator F1 = rand_diag(), F2 = rand_diag(), F3 = rand_diag(),
                       F4 = rand_diag();
    const Complex lhs =
        tensor_pairing(ctx, tensor_product(F1, F2), tensor_product(F3, F4));
    const Complex rhs = scalar_product_A(ctx, F1, F3).value *
                        scalar_product_A(ctx, F2, F4).value;
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1e-6, std::abs(rhs)));
    // conjugate symmetry
    const Complex fwd =
        tensor_pairing(ctx, tensor_product(F1, F2), tensor_product(F3, F4));
    const Complex bwd =
        tensor_pairing(ctx, tensor_product(F3, F4), tensor_product(F1, F2));
    CHECK(std::abs(fwd - std::conj(bwd)) <= 1e-13 * std::abs(fwd));
  }
}

TEST_CASE("sigma gradings and projections") {
  const QContext ctx(0.5);
  CHECK(sigma1_grade(1, 1) == 0);
  CHECK(sigma2_grade(1, 1) == 1);
  const QLattice lat(ctx, -8, 8);
  const RadialFunction g = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{std::exp(-r), 0.0}; },
      DecayClass::Summable);
  const GradedElement F =
      GradedElement::monomial(1, 1, g)
          .plus(GradedElement::monomial(0, 0, g))
          .plus(GradedElement::monomial(2, 1, g));
  // (m=1, j=1) is in B but not in H
  const GradedElement B = project_B(F);
  CHECK(B.comps().size() == 2); // (1,1) and (0,0)
  const GradedElement H = project_H(F);
  CHECK(H.comps().size() == 1);
  CHECK(H.comps().begin()->first == GradedElement::Key{0, 0});
  // projections idempotent
  CHECK(graded_diff(project_B(B), B).abs_diff == 0.0);
  CHECK(graded_diff(project_H(H), H).abs_diff == 0.0);
}

TEST_CASE("rep_L: radial identities") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -14, 14);
  // L(kappa) fixes radial elements
  const RadialFunction g = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{std::exp(-r), 0.0}; },
      DecayClass::Summable);
  const GradedElement F = GradedElement::radial(g);
  CHECK(graded_diff(rep_L(ctx, UqGen::Kappa, F), F).abs_diff == 0.0);
  // L(C) rho = 1 (= box rho)
  const RadialFunction rr = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{r, 0.0}; },
      DecayClass::Unrestricted, Complex{0.0, 0.0});
  const GradedElement C = casimir_L(ctx, GradedElement::radial(rr));
  REQUIRE(C.comps().size() == 1);
  CHECK(C.comps().begin()->first == GradedElement::Key{0, 0});
  const RadialFunction &h = C.comps().begin()->second;
  for (int j = h.lattice().j_min(); j <= h.lattice().j_max(); ++j)
    CHECK(h.at(j).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rep_L: L(C) on radial J(sqrt(p rho)) = -p J") {
  const QContext ctx(0.5);
  const double p = 0.37;
  const QLattice lat(ctx, -6, 6);
  const RadialFunction f = RadialFunction::sample(
      ctx, lat,
      [&](double r) {
        return Complex{bessel_j(ctx, std::sqrt(p * r)).value.real(), 0.0};
      },
      DecayClass::Summable, Complex{1.0, 0.0});
  const GradedElement C = casimir_L(ctx, GradedElement::radial(f));
  const RadialFunction &h = C.comps().begin()->second;
  const double d = ctx.q_minus_inv_q() * ctx.q_minus_inv_q();
  for (int j = h.lattice().j_min(); j <= h.lattice().j_max(); ++j) {
    const double denom = (2.0 * std::abs(f.at(j)) + std::abs(f.at(j + 1)) +
                          std::abs(f.at(j - 1))) /
                             (d * lat.point(j)) +
                         p * std::abs(f.at(j));
    CHECK(std::abs((h.at(j) + p * f.at(j)).real()) / denom <= 1e-11);
  }
}

TEST_CASE("rep_L: algebra relations on graded corpus") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -16, 16);
  // radial parts vanish at rho = 0: the divided differences of a function
  // with f(0) != 0 lose eps/rho digits at the small-rho end, which would
  // measure conditioning rather than the algebra
  const RadialFunction g1 = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{r * std::exp(-r), 0.0}; },
      DecayClass::Summable);
  const RadialFunction g2 = RadialFunction::sample(
      ctx, lat,
      [](double r) { return Complex{r * r * std::exp(-r), 0.1 * r}; },
      DecayClass::Summable);
  std::vector<GradedElement> corpus;
  corpus.push_back(GradedElement::radial(g1));
  corpus.push_back(GradedElement::monomial(1, 0, g2));
  corpus.push_back(GradedElement::monomial(-1, 1, g1));
  corpus.push_back(GradedElement::monomial(2, -1, g2));
  corpus.push_back(GradedElement::monomial(0, 2, g1)
                       .plus(GradedElement::monomial(1, 1, g2)));
  for (const GradedElement &F : corpus) {
    // L(p*) L(p) = q^2 L(p) L(p*)
    const GradedElement a =
        rep_L(ctx, UqGen::PStar, rep_L(ctx, UqGen::P, F));
    const GradedElement b = rep_L(ctx, UqGen::P, rep_L(ctx, UqGen::PStar, F))
                                .scaled(Complex{ctx.q2(), 0.0});
    CHECK(graded_diff(a, b, 1).relative() <= 1e-12);
    // L(kappa) L(p) = q^2 L(p) L(kappa)
    const GradedElement c =
        rep_L(ctx, UqGen::Kappa, rep_L(ctx, UqGen::P, F));
    const GradedElement d = rep_L(ctx, UqGen::P, rep_L(ctx, UqGen::Kappa, F))
                                .scaled(Complex{ctx.q2(), 0.0});
    CHECK(graded_diff(c, d, 1).relative() <= 1e-12);
    // Casimir is central
    const GradedElement e = casimir_L(ctx, rep_L(ctx, UqGen::Kappa, F));
    const GradedElement f = rep_L(ctx, UqGen::Kappa, casimir_L(ctx, F));
    CHECK(graded_diff(e, f, 1).relative() <= 1e-12);
  }
}

TEST_CASE("casimir matrix equals box matrix on radial indicators") {
  const QContext ctx(0.5);
  const QLattice w(ctx, -12, 4);
  for (int l = w.j_min() + 1; l <= w.j_max() - 1; ++l) {
    const RadialFunction ind = RadialFunction::indicator(w, l);
    const GradedElement C = casimir_L(ctx, GradedElement::radial(ind));
    const RadialFunction &h = C.comps().begin()->second;
    const RadialFunction b = box(ctx, ind);
    for (int i = h.lattice().j_min(); i <= h.lattice().j_max(); ++i)
      CHECK(std::abs(h.at(i) - b.at(i)) <= 1e-12);
  }
}

TEST_CASE("realize: linearity, twist equivariance, window policing") {
  const QContext ctx(0.5);
  const QLattice lat(ctx, -14, 14);
  const TruncatedBasis basis{10, 2};
  const RadialFunction g1 = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{std::exp(-r), 0.1}; },
      DecayClass::Summable);
  const RadialFunction g2 = RadialFunction::sample(
      ctx, lat, [](double r) { return Complex{1.0 / (1.0 + r), 0.0}; },
      DecayClass::Summable);
  const GradedElement F = GradedElement::monomial(1, 2, g1);
  const GradedElement G = GradedElement::monomial(-2, 0, g2);
  const Complex a{0.8, -0.1}, b{0.4, 0.7};
  const BandOperator lhs =
      realize(ctx, F.scaled(a).plus(G.scaled(b)), basis, PhaseParams{});
  const BandOperator rhs = realize(ctx, F, basis, PhaseParams{}).scaled(a) +
                           realize(ctx, G, basis, PhaseParams{}).scaled(b);
  const double scale = std::max(lhs.interior_abs_max(0), 1e-300);
  CHECK((lhs - rhs).interior_abs_max(0) / scale <= 1e-14);
  // sigma twist then realize == phase-scaled realize
  const double t = 1.3;
  const BandOperator tw =
      realize(ctx, sigma_twist(F.plus(G), t, 1), basis, PhaseParams{});
  const BandOperator tw2 =
      realize(ctx, F, basis, PhaseParams{})
          .scaled(std::polar(1.0, t * sigma1_grade(1, 2))) +
      realize(ctx, G, basis, PhaseParams{})
          .scaled(std::polar(1.0, t * sigma1_grade(-2, 0)));
  CHECK((tw - tw2).interior_abs_max(0) / scale <= 1e-14);
  // coefficient window too small -> window error
  const QLattice tiny(ctx, -3, 3);
  const RadialFunction gs = RadialFunction::sample(
      ctx, tiny, [](double r) { return Complex{std::exp(-r), 0.0}; },
      DecayClass::Summable);
  CHECK_THROWS_AS(
      (void)realize(ctx, GradedElement::monomial(0, 0, gs), basis,
                    PhaseParams{}),
      WindowError);
}

TEST_CASE("edge containment: interior bit-stable under window growth") {
  const QContext ctx(0.5);
  const TruncatedBasis small{12, 2}, big{18, 2};
  const Generators gs = build_generators(ctx, small, PhaseParams{0.3, 0.8});
  const Generators gb = build_generators(ctx, big, PhaseParams{0.3, 0.8});
  const BandOperator as =
      (gs.z * gs.u + gs.u_star * gs.z_star) * (gs.z * gs.z_star);
  const BandOperator ab =
      (gb.z * gb.u + gb.u_star * gb.z_star) * (gb.z * gb.z_star);
  for (int col = -10; col <= 10; ++col)
    for (int row = -10; row <= 10; ++row) {
      CHECK(as.entry(row, col) == ab.entry(row, col));
    }
}
