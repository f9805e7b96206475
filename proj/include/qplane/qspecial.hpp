#pragma once
#include <vector>

#include "qplane/lattice.hpp"
#include "qplane/series.hpp"

namespace qplane {

//! Outcome of a truncated series evaluation.
struct SeriesResult {
  Complex value{0.0, 0.0};
  int terms_used = 0;
  double cancellation_magnitude = 1.0; // max|partial| / |value|, >= 1
  double error_bound = 0.0;
};

//! Parameters of the Green equation (box + p) G = delta.
struct GreenParams {
  double p = 1.0;   // spectral parameter, > 0
  double c_q = 0.0; // additive constant of the q-Neumann function
};

//! Window and regularization of the spectral (Fourier-Bessel) sum.
struct SpectralEvalParams {
  double epsilon = 0.0; // required > 0 when p sits on the spectrum
  int j_min = -40;      // lambda-window exponents (lambda_j = mu^2 q^(2j))
  int j_max = 60;
};

//! Hahn-Exton q-Bessel J(x) = sum (-1)^k x^(2k)/([k]!)^2 (regular solution).
SeriesResult bessel_j(const QContext &ctx, double x);

//! Integer-order extension: s >= 0 gives sum (-1)^k x^(2k+s)/([k]![k+s]!);
//! J_{-s} = (-1)^s J_s (terms with negative factorial index dropped).
SeriesResult bessel_j_order(const QContext &ctx, int s, double x);

//! q-Neumann function at rho > 0 (second, log-singular solution).
SeriesResult neumann_n(const QContext &ctx, const GreenParams &gp, double rho);

//! Same on the lattice point rho = q^(2j): ln(p rho) = ln p + 2j ln q stays
//! exactly linear in the index.
SeriesResult neumann_on_lattice(const QContext &ctx, const GreenParams &gp,
                                int j);

//! Green function G_p = N - i J.
Complex green_g(const QContext &ctx, const GreenParams &gp, double rho);
Complex green_on_lattice(const QContext &ctx, const GreenParams &gp, int j);

//! Relative residual of (box + p) f at lattice point j for f = J or N,
//! evaluated at adequate precision for the whole window (acceptance route).
double residual_homogeneous(const QContext &ctx, detail::HomogeneousKind kind,
                            const GreenParams &gp, int j);

// --- the orthogonal Fourier-Bessel family -------------------------------
//
// phi_n(rho) = J(mu q^n sqrt(rho)), mu = q/(1-q^2), the eigenfamily of box
// at the point spectrum p_n = mu^2 q^(2n).  This is the family whose Jackson
// pairings converge (the unscaled J(q^n sqrt(rho)) is unbounded on the
// lattice); diagonal (1-q^2) q^(-2n), off-diagonal zero.

//! phi value at combined exponent a: J(mu q^a).
double fb_phi(const QContext &ctx, int a);

//! Point of the box spectrum: p_n = mu^2 q^(2n).
double spectrum_point(const QContext &ctx, int n);

//! True iff p = mu^2 q^(2t) for integer t within tol; t reported.
bool p_on_spectrum(const QContext &ctx, double p, int *t_out = nullptr,
                   double tol = 1e-9);

//! Gram matrix M(n,m) = jackson( phi_n phi_m ) for n,m in [n_min, n_max],
//! summed over the lattice window [-L, L].  OpenMP over independent values;
//! per-entry summation order fixed (byte-deterministic).
std::vector<std::vector<double>> fb_gram(const QContext &ctx, int n_min,
                                         int n_max, int L);
//! Serial reference implementation (kept for the parallel-equality test).
std::vector<std::vector<double>> fb_gram_serial(const QContext &ctx, int n_min,
                                                int n_max, int L);

// --- spectral representation --------------------------------------------

//! G_p(rho) = q^-2 (1-q^2) sum_j lambda_j J(sqrt(lambda_j rho))
//!            / (p - lambda_j + i eps),   lambda_j = mu^2 q^(2j).
//! Divergence at the lambda -> inf end (e.g. rho = 0) raises
//! DivergenceError carrying the trailing partial sums.
SeriesResult spectral_green(const QContext &ctx, const GreenParams &gp,
                            const SpectralEvalParams &sp, double rho);

//! Lattice variant (rho = q^(2l)) sharing one phi cache across l and p.
struct SpectralGrid {
  std::vector<double> p_grid;
  std::vector<int> rho_exponents; // rho = q^(2l)
};
std::vector<std::vector<SeriesResult>>
spectral_green_grid(const QContext &ctx, const SpectralEvalParams &sp,
                    const SpectralGrid &grid);
std::vector<std::vector<SeriesResult>>
spectral_green_grid_serial(const QContext &ctx, const SpectralEvalParams &sp,
                           const SpectralGrid &grid);

//! Anti-resonant p-grid: geometric midpoints p_i = mu^2 q^(2 n_i + 1).
//! The implied c_q is invariant under p -> q^2 p, so this grid shares one
//! c_q and the single-parameter fit is exact up to truncation.
std::vector<double> anti_resonant_p_grid(const QContext &ctx, int count,
                                         int n0 = 0);

struct CqEstimate {
  double c_q = 0.0;
  double rms_rel_residual = 0.0;
  double max_rel_residual = 0.0;
  double window_sensitivity = 0.0; // |c_q(window doubled) - c_q|
  double im_max = 0.0;             // diagnostic: eps=0 sums are real
  std::vector<double> residuals;   // per grid point, fit residual / scale
};

//! Least squares in the single linear parameter c_q of N against the real
//! part of the spectral sum over p_grid x rho_grid.
CqEstimate estimate_c_q(const QContext &ctx, const SpectralGrid &grid,
                        const SpectralEvalParams &sp);

} // namespace qplane
