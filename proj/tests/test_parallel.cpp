#include <doctest.h>

#include "qplane/plane.hpp"
#include "qplane/qspecial.hpp"

using namespace qplane;

// The OpenMP kernels parallelize across independent values only; each value
// keeps a fixed summation order, so parallel results must be byte-identical
// to the serial reference implementations.

TEST_CASE("fb_gram: parallel equals serial bitwise") {
  const QContext ctx(0.5);
  const auto a = fb_gram(ctx, -4, 4, 40);
  const auto b = fb_gram_serial(ctx, -4, 4, 40);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      CHECK(a[i][j] == b[i][j]);
}

TEST_CASE("spectral grid: parallel equals serial bitwise") {
  const QContext ctx(0.5);
  SpectralGrid grid;
  grid.p_grid = anti_resonant_p_grid(ctx, 3);
  grid.rho_exponents = {0, 1, 2};
  SpectralEvalParams sp;
  sp.j_min = -16;
  sp.j_max = 40;
  const auto a = spectral_green_grid(ctx, sp, grid);
  const auto b = spectral_green_grid_serial(ctx, sp, grid);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) {
      CHECK(a[i][j].value.real() == b[i][j].value.real());
      CHECK(a[i][j].value.imag() == b[i][j].value.imag());
    }
}

TEST_CASE("spectrum scan: parallel equals serial") {
  const QContext ctx(0.5);
  const auto a = spectrum_scan(ctx, 1, -40, 20);
  const auto b = spectrum_scan_serial(ctx, 1, -40, 20);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].eigenvalue == b[i].eigenvalue);
    CHECK(a[i].residual == b[i].residual);
    CHECK(a[i].overlap == b[i].overlap);
  }
}
