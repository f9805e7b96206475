#pragma once
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "qplane/context.hpp"

namespace qplane {

using Complex = std::complex<double>;

//! The q^2-lattice {rho_j = q^(2j), j_min <= j <= j_max}, descending in j.
//!
//! Points are generated by repeated multiplication (never powf): the j >= 0
//! side by q^2 from rho_0 = 1, the j < 0 side by 1/q^2, so rho_0 == 1 exactly
//! and the ratio structure rho_{j+1} = q^2 rho_j holds to one rounding.
class QLattice {
public:
  QLattice(const QContext &ctx, int j_min, int j_max);

  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int size() const { return j_max_ - j_min_ + 1; }
  bool contains(int j) const { return j >= j_min_ && j <= j_max_; }

  //! rho_j = q^(2j)
  double point(int j) const { return points_[static_cast<size_t>(j - j_min_)]; }
  const std::vector<double> &points() const { return points_; }

  //! Sub-window sharing the same stored points.
  QLattice shrunk(int lo_cut, int hi_cut) const;

private:
  int j_min_, j_max_;
  std::vector<double> points_;
};

enum class DecayClass { CompactSupport, Summable, Unrestricted };

//! Complex samples on a QLattice window plus the lattice limit f(0).
//!
//! zero_limit is either supplied at construction or estimated from the three
//! deepest small-rho samples (geometric Richardson step, ratio check q^2).
class RadialFunction {
public:
  RadialFunction(QLattice lattice, std::vector<Complex> samples,
                 DecayClass decay = DecayClass::Summable,
                 std::optional<Complex> zero_limit = std::nullopt);

  //! Sample a callable f(rho) over the window.  f(0) estimated unless given.
  static RadialFunction sample(const QContext &ctx, const QLattice &lat,
                               const std::function<Complex(double)> &f,
                               DecayClass decay = DecayClass::Summable,
                               std::optional<Complex> zero_limit = std::nullopt);

  //! Indicator of the single lattice point j0.
  static RadialFunction indicator(const QLattice &lat, int j0);

  const QLattice &lattice() const { return lattice_; }
  Complex at(int j) const {
    return samples_[static_cast<size_t>(j - lattice_.j_min())];
  }
  Complex &at(int j) { return samples_[static_cast<size_t>(j - lattice_.j_min())]; }
  DecayClass decay_class() const { return decay_; }

  bool has_zero_limit() const { return zero_limit_.has_value(); }
  //! Supplied f(0), or the converged lattice-limit estimate (may throw
  //! ExtrapolationError when the deep samples do not contract like q^2).
  Complex zero_limit(const QContext &ctx) const;

private:
  QLattice lattice_;
  std::vector<Complex> samples_;
  DecayClass decay_;
  std::optional<Complex> zero_limit_;
};

//! Value of a weighted lattice sum plus a bound on the window-truncation error.
struct WeightedPairing {
  Complex value{0.0, 0.0};
  double truncation_estimate = 0.0;
};

} // namespace qplane
