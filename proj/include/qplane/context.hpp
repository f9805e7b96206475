#pragma once
#include <cmath>
#include <cstdint>

#include "qplane/errors.hpp"

namespace qplane {

enum class PrecisionMode { Double, Extended };

//! Deformation parameter plus the numeric policy every routine consults.
//!
//! Immutable after construction; cheap to copy.  Derived constants
//! (ln q, q - 1/q, the lattice-anchor scale mu = q/(1-q^2)) are cached here
//! so that e.g. log(rho_j) = 2*j*ln_q stays exactly linear in j.
class QContext {
public:
  QContext(double q, PrecisionMode mode = PrecisionMode::Double,
           double series_tol = 1e-14, int max_terms = 800)
      : q_(q), mode_(mode), series_tol_(series_tol), max_terms_(max_terms) {
    if (!(q > 0.0) || !(q < 1.0))
      throw DomainError("q must satisfy 0 < q < 1");
    if (!(series_tol > 0.0))
      throw DomainError("series_tol must be positive");
    if (max_terms < 1)
      throw DomainError("max_terms must be >= 1");
    q2_ = q * q;
    inv_q_ = 1.0 / q;
    inv_q2_ = 1.0 / q2_;
    ln_q_ = std::log(q);
    q_minus_inv_q_ = q - inv_q_;
    mu_ = q / (1.0 - q2_);
  }

  double q() const { return q_; }
  double q2() const { return q2_; }
  double inv_q() const { return inv_q_; }
  double inv_q2() const { return inv_q2_; }
  double ln_q() const { return ln_q_; }
  double q_minus_inv_q() const { return q_minus_inv_q_; }
  //! Argument scale of the orthogonal Fourier-Bessel family, q/(1-q^2).
  double mu() const { return mu_; }

  PrecisionMode mode() const { return mode_; }
  double series_tol() const { return series_tol_; }
  int max_terms() const { return max_terms_; }

private:
  double q_;
  PrecisionMode mode_;
  double series_tol_;
  int max_terms_;
  double q2_, inv_q_, inv_q2_, ln_q_, q_minus_inv_q_, mu_;
};

//! Symmetric q-number [m] = (q^m - q^-m)/(q - q^-1).  [-m] = -[m] exactly.
double q_number(const QContext &ctx, int m);

//! [m]! = [1][2]...[m]; [0]! = 1.  Throws DomainError for m < 0.
double q_factorial(const QContext &ctx, int m);

//! q^n by repeated multiplication (n of either sign).
double q_power(const QContext &ctx, int n);

} // namespace qplane
