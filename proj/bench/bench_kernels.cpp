// Benchmark: OpenMP kernels against their serial reference implementations.
// Each kernel's parallel and serial routes must produce identical bytes;
// the table reports wall times and the speedup.

#include <chrono>
#include <cstdio>
#include <string>

#include "qplane/plane.hpp"
#include "qplane/qspecial.hpp"
#include "qplane/series.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace qplane;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class Fn> double time_ms(Fn &&fn) {
  const double t0 = now_ms();
  fn();
  return now_ms() - t0;
}

void row(const std::string &name, double serial_ms, double parallel_ms,
         bool equal) {
  std::printf("%-34s %10.1f %10.1f %8.2fx   %s\n", name.c_str(), serial_ms,
              parallel_ms, serial_ms / parallel_ms, equal ? "equal" : "DIFF");
}

} // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serial\n");
#endif
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial/ms", "omp/ms",
              "speedup");

  {
    const QContext ctx(0.5);
    std::vector<std::vector<double>> a, b;
    const double ts = time_ms([&] { b = fb_gram_serial(ctx, -5, 5, 60); });
    const double tp = time_ms([&] { a = fb_gram(ctx, -5, 5, 60); });
    row("fb_gram (n=11, L=60, q=0.5)", ts, tp, a == b);
  }
  {
    const QContext ctx(0.9);
    SpectralGrid grid;
    grid.p_grid = anti_resonant_p_grid(ctx, 3);
    grid.rho_exponents = {0, 1, 2};
    SpectralEvalParams sp;
    sp.j_min = -30;
    sp.j_max = 220;
    std::vector<std::vector<SeriesResult>> a, b;
    const double ts =
        time_ms([&] { b = spectral_green_grid_serial(ctx, sp, grid); });
    const double tp = time_ms([&] { a = spectral_green_grid(ctx, sp, grid); });
    bool eq = true;
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < a[i].size(); ++j)
        eq = eq && a[i][j].value == b[i][j].value;
    row("spectral grid (q=0.9)", ts, tp, eq);
  }
  {
    const QContext ctx(0.5);
    std::vector<SpectrumRow> a, b;
    const double ts =
        time_ms([&] { b = spectrum_scan_serial(ctx, 0, -45, 25); });
    const double tp = time_ms([&] { a = spectrum_scan(ctx, 0, -45, 25); });
    bool eq = a.size() == b.size();
    for (size_t i = 0; eq && i < a.size(); ++i)
      eq = a[i].eigenvalue == b[i].eigenvalue && a[i].residual == b[i].residual;
    row("spectrum scan (s=0, q=0.5)", ts, tp, eq);
  }
  {
    // residual sweep: the tier-heavy kernel of the acceptance gate
    const QContext ctx(0.5);
    const GreenParams gp{1.0, 0.5772156649};
    std::vector<double> a(61), b(61);
    const double ts = time_ms([&] {
      for (int j = -30; j <= 30; ++j)
        b[static_cast<size_t>(j + 30)] = residual_homogeneous(
            ctx, detail::HomogeneousKind::NeumannN, gp, j);
    });
    const double tp = time_ms([&] {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (int j = -30; j <= 30; ++j)
        a[static_cast<size_t>(j + 30)] = residual_homogeneous(
            ctx, detail::HomogeneousKind::NeumannN, gp, j);
    });
    row("residual sweep (N, 61 pts, q=0.5)", ts, tp, a == b);
  }
  return 0;
}
