#pragma once
#include <map>
#include <vector>

#include "qplane/eq2.hpp"
#include "qplane/qspecial.hpp"

namespace qplane {

//! R-invariant subspace spanned by e_{s+j} (x) e_j at fixed index
//! difference s; j runs over [j_lo, j_hi].
struct DiagonalSector {
  int s = 0;
  int j_lo = -20;
  int j_hi = 20;
};

//! Symmetric tridiagonal matrix of R on a diagonal sector (psi = phi = 0):
//! diag_j = q^(2(s+j)) + q^(2j), offdiag(j, j+1) = q^(s+2j+1).
struct SectorMatrix {
  DiagonalSector sector;
  std::vector<double> diag;    // index j - j_lo
  std::vector<double> offdiag; // couples j and j+1; size = size-1
  int size() const { return static_cast<int>(diag.size()); }
};

//! Analytic entries.  Nonzero phases are rejected: the real e_ts
//! coefficients presuppose phi = 0.
SectorMatrix build_sector_matrix(const QContext &ctx,
                                 const DiagonalSector &sector,
                                 const PhaseParams &phases = PhaseParams{});

//! Same matrix read off the tensor realization of Delta(rho) (oracle route);
//! entries valid on the interior of the tensor window.
SectorMatrix sector_matrix_from_tensor(const QContext &ctx,
                                       const TensorBandOperator &R,
                                       const DiagonalSector &sector);

//! Structural leakage of R between different sectors (must be exactly 0).
double sector_leakage(const TensorBandOperator &R);

//! Analytic eigenvector of R: c_j = (-1)^j q^(t-j) Jhat_s(q^(t-j)) with the
//! standard-normalized Hahn-Exton coefficient function (unit l^2 norm).
struct EtsVector {
  int t = 0, s = 0;
  int j_lo = 0, j_hi = 0;
  std::vector<double> c; // index j - j_lo
  double tail_lo = 0.0;  // |c| at the j_lo edge
  double tail_hi = 0.0;  // |c| at the j_hi edge
  double norm() const;
};

//! Throws WindowError when either coefficient tail exceeds tail_tol.
EtsVector ets_vector(const QContext &ctx, int t, int s, int j_lo, int j_hi,
                     double tail_tol = 1e-12);

//! || R c - q^(2t) c || / (q^(2t) ||c||) on the sector window.
double ets_eigen_residual(const QContext &ctx, const EtsVector &e);

//! t values whose e_ts tails fit inside [j_lo, j_hi] at tail_tol.
std::vector<int> resolvable_t(const QContext &ctx, int s, int j_lo, int j_hi,
                              double tail_tol = 1e-12);

//! Independent oracle: symmetric tridiagonal QL with implicit shifts run in
//! 50-digit arithmetic on a window balanced around the target t (double QR
//! loses the small eigenvalues of these graded matrices to eps * ||A||).
//! Reports the nearest eigenvalue and the overlap with the analytic vector.
struct EigenCheck {
  double eigenvalue = 0.0;   // nearest numeric eigenvalue
  double relative_gap = 0.0; // |lambda - q^(2t)| / q^(2t)
  double overlap = 0.0;      // |<v_num, c_analytic>| (unit vectors)
};
EigenCheck eigensolve_check(const QContext &ctx, int t, int s,
                            int half_width = 0);

//! Raw 50-digit QL eigenvalues of the plain truncated sector matrix, sorted
//! ascending (validation hook; the oracle itself uses an absorbing corner
//! at the large-rho edge, without which the s = 0 truncation does not
//! converge to the spectrum).
std::vector<double> sector_eigenvalues_r50(const QContext &ctx,
                                           const DiagonalSector &sec);

//! Dense coefficients on the truncated grid e_a (x) e_b, a,b in [-L, L].
class PlaneVector {
public:
  explicit PlaneVector(int L);
  int L() const { return L_; }
  Complex &at(int a, int b);
  Complex at(int a, int b) const;
  double norm() const;
  PlaneVector scaled(Complex x) const;
  PlaneVector plus(const PlaneVector &o) const;
  //! l^2 mass of the diagonal sector s (partition of the total norm^2).
  double sector_mass(int s) const;

private:
  int L_;
  std::vector<Complex> v_;
};

//! Expansion of v in the e_ts basis over the resolvable t per sector.
struct EtsExpansion {
  std::map<std::pair<int, int>, Complex> coeff; // (t, s) -> coefficient
  double unresolved_mass = 0.0; // ||v||^2 - sum |coeff|^2
};
EtsExpansion expand_in_ets(const QContext &ctx, const PlaneVector &v,
                           double tail_tol = 1e-12);

PlaneVector reconstruct_from_ets(const QContext &ctx, const EtsExpansion &ex,
                                 int L, double tail_tol = 1e-12);

//! G^p(R) v = sum G^p(q^(2t)) coeff(t,s) e_ts.  Throws ResolutionError when
//! the unresolved spectral mass exceeds mass_tol * ||v||^2.
PlaneVector apply_green_plane(const QContext &ctx, const GreenParams &gp,
                              const PlaneVector &v, double mass_tol = 1e-8);

//! Oracle route: numeric eigensolve per sector over the resolvable band.
PlaneVector apply_green_plane_numeric(const QContext &ctx,
                                      const GreenParams &gp,
                                      const PlaneVector &v,
                                      double mass_tol = 1e-8);

//! Per-sector scan used by the CLI spectrum command; OpenMP across t.
struct SpectrumRow {
  int t = 0;
  double eigenvalue = 0.0;
  double residual = 0.0;
  double overlap = 0.0;
};
std::vector<SpectrumRow> spectrum_scan(const QContext &ctx, int s, int j_lo,
                                       int j_hi);
std::vector<SpectrumRow> spectrum_scan_serial(const QContext &ctx, int s,
                                              int j_lo, int j_hi);

} // namespace qplane
