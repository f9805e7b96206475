#pragma once
#include <complex>

#include "qplane/context.hpp"

// Internal series engine.  Evaluates the Hahn-Exton q-Bessel series and the
// q-Neumann correction series in double or in one of a fixed ladder of
// decimal-float precisions, chosen from an a-priori cancellation estimate
// (the alternating series loses ~ 2 * peak-term digits on the deep lattice).
// Entry points return doubles plus the log-magnitude bookkeeping callers
// need for error bounds and tier escalation.

namespace qplane::detail {

struct EvalInfo {
  double value = 0.0;       // rounded to double (0 on underflow)
  double ln_abs_value = 0.0; // true log magnitude (finite even when value==0)
  double ln_abs_peak = 0.0;  // largest partial sum magnitude, log
  int terms = 0;
  int digits_used = 16;     // 16 = double path
};

// J(x) = sum_k (-1)^k x^{2k} / ([k]!)^2, any x >= 0.
EvalInfo bessel_j_auto(const QContext &ctx, double x);

// J(mu q^n), mu = q/(1-q^2): the orthogonal-family value at combined
// exponent n.  These arguments sit on the near-zero lattice of J, where the
// value is smaller than the series envelope by hundreds of digits, so the
// argument is rebuilt inside each precision tier; rounding it to double
// first would bury the value under envelope * 1e-16.
EvalInfo bessel_j_lattice_auto(const QContext &ctx, int n);

// J_s for s >= 0: sum_k (-1)^k x^{2k+s} / ([k]! [k+s]!).  s < 0 handled by
// the caller through J_{-s} = (-1)^s J_s.
EvalInfo bessel_j_order_auto(const QContext &ctx, int s, double x);

// Standard-normalized Hahn-Exton coefficient function used by the e_ts
// basis: Jhat_s(q^a) with Jhat_s(y) = ((q^{2s+2};q^2)inf/(q^2;q^2)inf)
//   * sum_k (-1)^k q^{k(k+1)} y^{2k+s} / ((q^2;q^2)_k (q^{2s+2};q^2)_k),
// and Jhat_{-s}(y) = (-1)^s q^s Jhat_s(q^s y).  Argument passed as the
// exponent a (y = q^a) so deep lattice points keep their exact structure.
EvalInfo hahn_exton_std_auto(const QContext &ctx, int s, int a);

// N(sqrt(p rho)) with ln(p rho) supplied through the exact decomposition
// ln p + (2j) ln q when rho = q^{2j} is a lattice point (j_hint), else
// computed directly.  Needs J at the same point; returns both.
struct GreenEval {
  EvalInfo bessel;
  double neumann = 0.0;
  double ln_abs_neumann = 0.0;
  int digits_used = 16;
};
GreenEval green_parts_auto(const QContext &ctx, double p, double rho,
                           double c_q, const int *j_hint);

enum class HomogeneousKind { BesselJ, NeumannN };

// Relative residual |box f + p f| / (p |f|) at lattice point j, with samples
// and stencil evaluated together at a precision adequate for both the series
// cancellation and the stencil cancellation.  This is the full-window
// verification route for the homogeneous-solution acceptance gate.
double residual_homogeneous(const QContext &ctx, HomogeneousKind kind,
                            double p, double c_q, int j);

// ln [m] without overflow (valid for any m != 0).
double ln_q_number(const QContext &ctx, int m);

} // namespace qplane::detail
