#include "qplane/qcalc.hpp"

#include <algorithm>
#include <cmath>

namespace qplane {

namespace {

// Geometric extrapolation of one end tail from the last trailing terms.
// Returns {bound, growing}: |tail| <= bound unless the terms grow, in which
// case growing = true and bound carries the last magnitude.
struct TailEstimate {
  double bound = 0.0;
  bool growing = false;
};

TailEstimate tail_from_terms(const std::vector<double> &mags) {
  TailEstimate te;
  const size_t n = mags.size();
  if (n < 2)
    return te;
  const double last = mags[n - 1], prev = mags[n - 2];
  if (last == 0.0)
    return te;
  if (prev == 0.0 || last >= prev) {
    te.growing = true;
    te.bound = last;
    return te;
  }
  const double r = last / prev;
  te.bound = last * r / (1.0 - r);
  return te;
}

// Weighted sum of w_j = q^(2j) * term(j) over the window, with tail estimates
// at both ends.  Shared by jackson_integral and pairing_H.
WeightedPairing weighted_sum(const QContext &ctx, const QLattice &lat,
                             const std::function<Complex(int)> &term,
                             DecayClass decay) {
  Complex acc{0.0, 0.0};
  double abs_acc = 0.0;
  const int lo = lat.j_min(), hi = lat.j_max();
  const int ntail = std::min(3, lat.size() / 2);
  std::vector<double> lo_mags, hi_mags;
  for (int j = lo; j <= hi; ++j) {
    const Complex w = lat.point(j) * term(j);
    acc += w;
    abs_acc += std::abs(w);
    if (j - lo < ntail)
      lo_mags.push_back(std::abs(w)); // large-rho end, reversed order below
    if (hi - j < ntail)
      hi_mags.push_back(std::abs(w));
  }
  std::reverse(lo_mags.begin(), lo_mags.end());
  const TailEstimate lo_tail = tail_from_terms(lo_mags);
  const TailEstimate hi_tail = tail_from_terms(hi_mags);
  const double one_minus_q2 = 1.0 - ctx.q2();
  WeightedPairing out;
  out.value = one_minus_q2 * acc;
  out.truncation_estimate = one_minus_q2 * (lo_tail.bound + hi_tail.bound);
  if (lo_tail.growing) {
    const double last = one_minus_q2 * lo_tail.bound;
    if (decay == DecayClass::Unrestricted &&
        last > ctx.series_tol() * std::max(one_minus_q2 * abs_acc, 1e-300))
      throw DivergenceError("weighted sum grows at the rho -> inf end");
    // keep a pessimistic bound so callers see the problem
    out.truncation_estimate = std::max(out.truncation_estimate, last);
  }
  return out;
}

} // namespace

WeightedPairing jackson_integral(const QContext &ctx, const RadialFunction &f) {
  return weighted_sum(
      ctx, f.lattice(), [&](int j) { return f.at(j); }, f.decay_class());
}

WeightedPairing pairing_H(const QContext &ctx, const RadialFunction &f,
                          const RadialFunction &g) {
  if (f.lattice().j_min() != g.lattice().j_min() ||
      f.lattice().j_max() != g.lattice().j_max())
    throw WindowError("pairing_H: windows differ");
  const DecayClass dc = (f.decay_class() == DecayClass::Unrestricted ||
                         g.decay_class() == DecayClass::Unrestricted)
                            ? DecayClass::Unrestricted
                            : DecayClass::Summable;
  return weighted_sum(
      ctx, f.lattice(), [&](int j) { return std::conj(f.at(j)) * g.at(j); },
      dc);
}

RadialFunction d_plus(const QContext &ctx, const RadialFunction &f) {
  const QLattice &lat = f.lattice();
  if (lat.size() < 3)
    throw WindowError("d_plus: window too small");
  QLattice out_lat = lat.shrunk(0, 1);
  std::vector<Complex> s(static_cast<size_t>(out_lat.size()));
  const double c = 1.0 - ctx.q2();
  for (int j = out_lat.j_min(); j <= out_lat.j_max(); ++j)
    s[static_cast<size_t>(j - out_lat.j_min())] =
        (f.at(j) - f.at(j + 1)) / (c * lat.point(j));
  // D+f(0) from the deepest interior points of the result.
  RadialFunction probe(out_lat, s, f.decay_class());
  std::optional<Complex> zl;
  try {
    zl = probe.zero_limit(ctx);
  } catch (const ExtrapolationError &) {
    zl = std::nullopt;
  }
  return RadialFunction(out_lat, std::move(s), f.decay_class(), zl);
}

RadialFunction d_minus(const QContext &ctx, const RadialFunction &f) {
  const QLattice &lat = f.lattice();
  if (lat.size() < 3)
    throw WindowError("d_minus: window too small");
  QLattice out_lat = lat.shrunk(1, 0);
  std::vector<Complex> s(static_cast<size_t>(out_lat.size()));
  const double c = 1.0 - ctx.inv_q2();
  for (int j = out_lat.j_min(); j <= out_lat.j_max(); ++j)
    s[static_cast<size_t>(j - out_lat.j_min())] =
        (f.at(j) - f.at(j - 1)) / (c * lat.point(j));
  return RadialFunction(out_lat, std::move(s), f.decay_class());
}

RadialFunction box(const QContext &ctx, const RadialFunction &f) {
  if (f.lattice().size() < 4)
    throw WindowError("box: window margin must be >= 2 points");
  RadialFunction df = d_plus(ctx, f);
  const QLattice &dlat = df.lattice();
  std::vector<Complex> s(static_cast<size_t>(dlat.size()));
  for (int j = dlat.j_min(); j <= dlat.j_max(); ++j)
    s[static_cast<size_t>(j - dlat.j_min())] = dlat.point(j) * df.at(j);
  RadialFunction rho_df(dlat, std::move(s), f.decay_class());
  return d_minus(ctx, rho_df);
}

RadialFunction box_stencil(const QContext &ctx, const RadialFunction &f) {
  const QLattice &lat = f.lattice();
  if (lat.size() < 4)
    throw WindowError("box_stencil: window margin must be >= 2 points");
  QLattice out_lat = lat.shrunk(1, 1);
  std::vector<Complex> s(static_cast<size_t>(out_lat.size()));
  const double d = ctx.q_minus_inv_q() * ctx.q_minus_inv_q();
  for (int j = out_lat.j_min(); j <= out_lat.j_max(); ++j)
    s[static_cast<size_t>(j - out_lat.j_min())] =
        -(2.0 * f.at(j) - f.at(j + 1) - f.at(j - 1)) / (d * lat.point(j));
  return RadialFunction(out_lat, std::move(s), f.decay_class());
}

Complex delta_pairing(const QContext &ctx, const RadialFunction &f) {
  return f.zero_limit(ctx);
}

WeightedPairing weak_box_pairing(const QContext &ctx, const RadialFunction &g,
                                 const RadialFunction &f) {
  RadialFunction bf = box(ctx, f);
  const QLattice &blat = bf.lattice();
  // restrict g to the surviving window
  if (g.lattice().j_min() > blat.j_min() || g.lattice().j_max() < blat.j_max())
    throw WindowError("weak_box_pairing: g window too small");
  std::vector<Complex> gs(static_cast<size_t>(blat.size()));
  for (int j = blat.j_min(); j <= blat.j_max(); ++j)
    gs[static_cast<size_t>(j - blat.j_min())] = g.at(j);
  RadialFunction gr(blat, std::move(gs), g.decay_class());
  return pairing_H(ctx, gr, bf);
}

RadialFunction log_rho(const QContext &ctx, const QLattice &lat) {
  std::vector<Complex> s(static_cast<size_t>(lat.size()));
  const double c = 2.0 * ctx.ln_q();
  for (int j = lat.j_min(); j <= lat.j_max(); ++j)
    s[static_cast<size_t>(j - lat.j_min())] = Complex{c * j, 0.0};
  return RadialFunction(lat, std::move(s), DecayClass::Unrestricted);
}

double weak_delta_factor(const QContext &ctx) {
  return 2.0 * ctx.q() * ctx.ln_q() / ctx.q_minus_inv_q();
}

} // namespace qplane
