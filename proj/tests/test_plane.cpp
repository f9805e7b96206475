#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qplane/plane.hpp"

using namespace qplane;

TEST_CASE("sector matrix entries") {
  const QContext ctx(0.5);
  const SectorMatrix M = build_sector_matrix(ctx, DiagonalSector{0, -3, 3});
  CHECK(M.diag[3] == doctest::Approx(2.0).epsilon(1e-15));  // q^0 + q^0
  CHECK(M.offdiag[3] == doctest::Approx(0.5).epsilon(1e-15)); // q^{s+2j+1}
  CHECK_THROWS_AS((void)build_sector_matrix(ctx, DiagonalSector{0, -3, 3},
                                            PhaseParams{0.2, 0.0}),
                  DomainError);
  // agreement with the tensor realization of Delta(rho)
  const TruncatedBasis tb{12, 1};
  const TensorBandOperator R = delta_rho(ctx, tb, PhaseParams{});
  for (int s : {-2, 0, 3}) {
    const DiagonalSector sec{s, -8, 8 - std::max(0, s)};
    const SectorMatrix A = build_sector_matrix(ctx, sec);
    const SectorMatrix B = sector_matrix_from_tensor(ctx, R, sec);
    for (int i = 0; i < A.size(); ++i) {
      CHECK(A.diag[static_cast<size_t>(i)] ==
            doctest::Approx(B.diag[static_cast<size_t>(i)]).epsilon(1e-13));
      if (i + 1 < A.size())
        CHECK(A.offdiag[static_cast<size_t>(i)] ==
              doctest::Approx(B.offdiag[static_cast<size_t>(i)])
                  .epsilon(1e-13));
    }
  }
}

TEST_CASE("ets vectors: norm, eigen residual, tails") {
  const QContext ctx(0.5);
  for (int s : {-3, -1, 0, 2}) {
    for (int t : {-2, 0, 3}) {
      const EtsVector e = ets_vector(ctx, t, s, -45, 25, 1e-10);
      CHECK(std::abs(e.norm() - 1.0) <= 1e-9);
      CHECK(ets_eigen_residual(ctx, e) <= 1e-12);
    }
  }
  // window too small: tails exceed the tolerance
  CHECK_THROWS_AS((void)ets_vector(ctx, 0, 0, -6, 6, 1e-10), WindowError);
}

TEST_CASE("50-digit QL implementation cross-checked against Eigen") {
  const QContext ctx(0.5);
  // same plain truncated matrix through both solvers; the window is benign
  // enough (||A|| ~ q^{-16}) for double QR to hold ~1e-11 absolute
  const DiagonalSector sec{0, -8, 8};
  const int n = sec.j_hi - sec.j_lo + 1;
  const SectorMatrix M = build_sector_matrix(ctx, sec);
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i)
    diag[i] = M.diag[static_cast<size_t>(i)];
  for (int i = 0; i + 1 < n; ++i)
    sub[i] = M.offdiag[static_cast<size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub);
  REQUIRE(es.info() == Eigen::Success);
  const std::vector<double> ql = sector_eigenvalues_r50(ctx, sec);
  REQUIRE(static_cast<int>(ql.size()) == n);
  for (int i = 0; i < n; ++i)
    CHECK(ql[static_cast<size_t>(i)] ==
          doctest::Approx(es.eigenvalues()[i]).epsilon(1e-10));
}

TEST_CASE("eigensolve oracle: absorbing corner recovers the true spectrum") {
  const QContext ctx(0.5);
  // plain truncation misses the s=0 spectrum by O(1) percent at any depth;
  // the corner-corrected oracle lands on q^{2t} to ~1e-12
  const EigenCheck ec = eigensolve_check(ctx, 0, 0);
  CHECK(ec.relative_gap <= 1e-10);
  CHECK(ec.overlap >= 1.0 - 1e-9);
  const std::vector<double> raw =
      sector_eigenvalues_r50(ctx, DiagonalSector{0, -24, 11});
  double best = 1e300;
  for (double v : raw)
    best = std::min(best, std::abs(v - 1.0));
  CHECK(best > 1e-3); // the uncorrected gap really is large
}

TEST_CASE("eigensolve oracle across sectors and t") {
  const QContext ctx(0.5);
  for (int s : {-3, 0, 2})
    for (int t : {-3, 0, 4}) {
      const EigenCheck ec = eigensolve_check(ctx, t, s);
      CHECK(ec.relative_gap <= 1e-9);
      CHECK(ec.overlap >= 1.0 - 1e-9);
    }
  // spectrum universality: same eigenvalues in every sector
  const double lam = std::exp(2.0 * 1 * ctx.ln_q());
  double ref = -1.0;
  for (int s = -3; s <= 3; ++s) {
    const EigenCheck ec = eigensolve_check(ctx, 1, s);
    if (ref < 0.0)
      ref = ec.eigenvalue;
    CHECK(std::abs(ec.eigenvalue - ref) / lam <= 1e-10);
  }
}

TEST_CASE("plane vectors: sector masses partition the norm") {
  PlaneVector v(6);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b)
      v.at(a, b) = Complex{u(rng), u(rng)};
  double acc = 0.0;
  for (int s = -12; s <= 12; ++s)
    acc += v.sector_mass(s);
  CHECK(acc == doctest::Approx(v.norm() * v.norm()).epsilon(1e-14));
}

TEST_CASE("expansion: e_ts maps to a single unit coefficient") {
  const QContext ctx(0.5);
  const int Lg = 54, t = 1, s = -2;
  const EtsVector e = ets_vector(ctx, t, s, std::max(-Lg, -Lg - s),
                                 std::min(Lg, Lg - s), 1e-9);
  PlaneVector v(Lg);
  for (int j = e.j_lo; j <= e.j_hi; ++j)
    v.at(s + j, j) = Complex{e.c[static_cast<size_t>(j - e.j_lo)], 0.0};
  const EtsExpansion ex = expand_in_ets(ctx, v);
  for (const auto &[ts, a] : ex.coeff) {
    if (ts.first == t && ts.second == s)
      CHECK(std::abs(a - Complex{1.0, 0.0}) <= 1e-9);
    else
      CHECK(std::abs(a) <= 1e-9);
  }
  CHECK(ex.unresolved_mass <= 1e-9);
}

TEST_CASE("expansion: inverse coefficients match the analytic formula") {
  const QContext ctx(0.5);
  const int Lg = 54, s = 1, j0 = 0;
  PlaneVector v(Lg);
  v.at(s + j0, j0) = Complex{1.0, 0.0}; // e_{s+j0} x e_{j0}
  const EtsExpansion ex = expand_in_ets(ctx, v);
  const int w_lo = std::max(-Lg, -Lg - s), w_hi = std::min(Lg, Lg - s);
  for (const auto &[ts, a] : ex.coeff) {
    if (ts.second != s)
      continue;
    const EtsVector e = ets_vector(ctx, ts.first, s, w_lo, w_hi, 1.0);
    const double expect = e.c[static_cast<size_t>(j0 - e.j_lo)];
    CHECK(a.real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(a.imag() == 0.0);
  }
  // Parseval: the basis vector is fully captured by the resolvable t set
  double sum2 = 0.0;
  for (const auto &[ts, a] : ex.coeff)
    sum2 += std::norm(a);
  CHECK(sum2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("round trip and Parseval for a random interior vector") {
  const QContext ctx(0.5);
  const int Lg = 54;
  PlaneVector v(Lg);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = -3; s <= 3; ++s)
    for (int j = -2; j <= 2; ++j)
      v.at(s + j, j) = Complex{u(rng), u(rng)};
  const EtsExpansion ex = expand_in_ets(ctx, v);
  const double n2 = v.norm() * v.norm();
  double sum2 = 0.0;
  for (const auto &[ts, a] : ex.coeff)
    sum2 += std::norm(a);
  CHECK(std::abs(sum2 - n2) / n2 <= 1e-9);
  const PlaneVector w = reconstruct_from_ets(ctx, ex, Lg);
  double diff2 = 0.0;
  for (int a = -Lg; a <= Lg; ++a)
    for (int b = -Lg; b <= Lg; ++b)
      diff2 += std::norm(w.at(a, b) - v.at(a, b));
  CHECK(std::sqrt(diff2 / n2) <= 1e-9);
}

TEST_CASE("green operator on the plane") {
  const QContext ctx(0.5);
  const GreenParams gp{0.37, 0.5772156649};
  const int Lg = 54, t = 0, s = 1;
  const EtsVector e = ets_vector(ctx, t, s, std::max(-Lg, -Lg - s),
                                 std::min(Lg, Lg - s), 1e-9);
  PlaneVector v(Lg);
  for (int j = e.j_lo; j <= e.j_hi; ++j)
    v.at(s + j, j) = Complex{e.c[static_cast<size_t>(j - e.j_lo)], 0.0};
  const PlaneVector gv = apply_green_plane(ctx, gp, v);
  const Complex expect = green_on_lattice(ctx, gp, t);
  for (int j = e.j_lo; j <= e.j_hi; ++j) {
    const Complex want = expect * v.at(s + j, j);
    CHECK(std::abs(gv.at(s + j, j) - want) <= 1e-9 * std::abs(expect));
  }
  // functional calculus via the numeric eigensolve agrees
  const PlaneVector gn = apply_green_plane_numeric(ctx, gp, v);
  double diff2 = 0.0, scale2 = 0.0;
  for (int a = -Lg; a <= Lg; ++a)
    for (int b = -Lg; b <= Lg; ++b) {
      diff2 += std::norm(gv.at(a, b) - gn.at(a, b));
      scale2 += std::norm(gv.at(a, b));
    }
  CHECK(std::sqrt(diff2 / scale2) <= 1e-8);
  // unresolved spectral weight: edge-supported vector raises the error
  PlaneVector bad(8);
  bad.at(-8, -8) = Complex{1.0, 0.0};
  CHECK_THROWS_AS((void)apply_green_plane(ctx, gp, bad), ResolutionError);
}

TEST_CASE("spectrum scan rows") {
  const QContext ctx(0.5);
  const std::vector<SpectrumRow> rows = spectrum_scan(ctx, 0, -45, 25);
  REQUIRE(!rows.empty());
  bool saw_t0 = false;
  for (const SpectrumRow &r : rows) {
    const double lam = std::exp(2.0 * r.t * ctx.ln_q());
    CHECK(std::abs(r.eigenvalue - lam) / lam <= 1e-8);
    CHECK(r.residual <= 1e-8);
    CHECK(r.overlap >= 1.0 - 1e-8);
    if (r.t == 0) {
      saw_t0 = true;
      CHECK(r.eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(saw_t0);
}
