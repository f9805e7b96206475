#include "qplane/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qplane {

QLattice::QLattice(const QContext &ctx, int j_min, int j_max)
    : j_min_(j_min), j_max_(j_max) {
  if (j_min >= j_max)
    throw DomainError("QLattice: j_min must be < j_max");
  points_.resize(static_cast<size_t>(size()));
  // Repeated multiplication from rho_0 = 1 on both sides.
  if (j_min <= 0 && j_max >= 0) {
    points_[static_cast<size_t>(-j_min)] = 1.0;
  }
  double acc = 1.0;
  for (int j = 1; j <= j_max; ++j) {
    acc *= ctx.q2();
    if (j >= j_min)
      points_[static_cast<size_t>(j - j_min)] = acc;
  }
  acc = 1.0;
  for (int j = -1; j >= j_min; --j) {
    acc *= ctx.inv_q2();
    if (j <= j_max)
      points_[static_cast<size_t>(j - j_min)] = acc;
  }
}

QLattice QLattice::shrunk(int lo_cut, int hi_cut) const {
  QLattice out(*this);
  if (size() - lo_cut - hi_cut < 2)
    throw WindowError("QLattice::shrunk: window exhausted");
  out.points_.erase(out.points_.begin(), out.points_.begin() + lo_cut);
  out.points_.resize(out.points_.size() - static_cast<size_t>(hi_cut));
  out.j_min_ += lo_cut;
  out.j_max_ -= hi_cut;
  return out;
}

RadialFunction::RadialFunction(QLattice lattice, std::vector<Complex> samples,
                               DecayClass decay,
                               std::optional<Complex> zero_limit)
    : lattice_(std::move(lattice)), samples_(std::move(samples)), decay_(decay),
      zero_limit_(zero_limit) {
  if (samples_.size() != static_cast<size_t>(lattice_.size()))
    throw DomainError("RadialFunction: sample count does not match window");
}

RadialFunction RadialFunction::sample(const QContext &ctx, const QLattice &lat,
                                      const std::function<Complex(double)> &f,
                                      DecayClass decay,
                                      std::optional<Complex> zero_limit) {
  (void)ctx;
  std::vector<Complex> s(static_cast<size_t>(lat.size()));
  for (int j = lat.j_min(); j <= lat.j_max(); ++j)
    s[static_cast<size_t>(j - lat.j_min())] = f(lat.point(j));
  return RadialFunction(lat, std::move(s), decay, zero_limit);
}

RadialFunction RadialFunction::indicator(const QLattice &lat, int j0) {
  if (!lat.contains(j0))
    throw DomainError("indicator: point outside window");
  std::vector<Complex> s(static_cast<size_t>(lat.size()), Complex{0.0, 0.0});
  s[static_cast<size_t>(j0 - lat.j_min())] = Complex{1.0, 0.0};
  return RadialFunction(lat, std::move(s), DecayClass::CompactSupport,
                        Complex{0.0, 0.0});
}

Complex RadialFunction::zero_limit(const QContext &ctx) const {
  if (zero_limit_)
    return *zero_limit_;
  // Lattice limit j -> infinity from the three deepest small-rho samples:
  // for f differentiable at 0 the successive differences contract by q^2,
  // and the geometric tail gives f(0) = f_b + d_b q^2/(1-q^2).
  if (lattice_.size() < 3)
    throw ExtrapolationError("zero_limit: window too small");
  const int b = lattice_.j_max();
  const Complex fb = at(b), fb1 = at(b - 1), fb2 = at(b - 2);
  const Complex d1 = fb - fb1;       // deepest difference
  const Complex d0 = fb1 - fb2;
  const double scale =
      std::max({std::abs(fb), std::abs(fb1), std::abs(fb2), 1.0});
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  if (std::abs(d1) <= floor)
    return fb; // flat to rounding: converged
  if (std::abs(d1) > std::abs(d0) * ctx.q2() * (1.0 + 1e3 * ctx.series_tol()) ||
      std::abs(d0) <= floor)
    throw ExtrapolationError(
        "zero_limit: deep samples do not contract like q^2");
  return fb + d1 * (ctx.q2() / (1.0 - ctx.q2()));
}

} // namespace qplane
