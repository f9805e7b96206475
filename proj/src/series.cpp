#include "qplane/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace qplane::detail {

namespace mp = boost::multiprecision;
using Real50 = mp::number<mp::cpp_dec_float<50>, mp::et_off>;
using Real150 = mp::number<mp::cpp_dec_float<150>, mp::et_off>;
using Real400 = mp::number<mp::cpp_dec_float<400>, mp::et_off>;
using Real1200 = mp::number<mp::cpp_dec_float<1200>, mp::et_off>;
using Real3200 = mp::number<mp::cpp_dec_float<3200>, mp::et_off>;

namespace {

constexpr double kLn10 = 2.302585092994045684;

template <class Real> int digits_of() {
  return static_cast<int>(std::numeric_limits<Real>::digits10);
}
template <> int digits_of<double>() { return 16; }

template <class Real> double to_double(const Real &v) {
  return v.template convert_to<double>();
}
template <> double to_double<double>(const double &v) { return v; }

template <class Real> double ln_abs(const Real &v) {
  if (v == 0)
    return -std::numeric_limits<double>::infinity();
  using std::log;
  return to_double(Real(log(abs(v))));
}
template <> double ln_abs<double>(const double &v) {
  return std::log(std::abs(v));
}

// ---------------------------------------------------------------------------
// templated kernels

// [m] in Real via iterated powers handed in by the caller loop.
template <class Real> struct QIter {
  Real q, inv_q, qk{1}, inv_qk{1};
  int k = 0;
  explicit QIter(const Real &q_) : q(q_), inv_q(Real(1) / q_) {}
  // advance to k+1 and return [k+1]
  Real next_qnum() {
    qk *= q;
    inv_qk *= inv_q;
    ++k;
    return (qk - inv_qk) / (q - inv_q);
  }
};

template <class Real> struct SeriesAcc {
  Real sum{0};
  Real max_abs{0};
  int terms = 0;
  void add(const Real &t) {
    sum += t;
    using std::abs;
    Real a = abs(sum);
    if (a > max_abs)
      max_abs = a;
    ++terms;
  }
};

// J(x) with y = x^2: sum (-1)^k y^k / ([k]!)^2
template <class Real>
void bessel_kernel(const Real &q, const Real &y, double tol, int max_terms,
                   SeriesAcc<Real> &acc, bool &converged) {
  using std::abs;
  QIter<Real> it(q);
  Real t{1};
  Real prev_mag{0};
  converged = false;
  for (int k = 0; k < max_terms; ++k) {
    acc.add(t);
    const Real qn = it.next_qnum();
    Real tn = -t * y / (qn * qn);
    const Real mag = abs(tn);
    if (k > 2 && mag < prev_mag &&
        mag <= Real(tol) * (abs(acc.sum) + Real(1e-300))) {
      converged = true;
      return;
    }
    prev_mag = mag;
    t = tn;
  }
}

// J_s, s >= 0: t_0 = x^s/[s]!, ratio -y/([k][k+s])
template <class Real>
void bessel_order_kernel(const Real &q, int s, const Real &x, double tol,
                         int max_terms, SeriesAcc<Real> &acc, bool &converged) {
  using std::abs;
  const Real y = x * x;
  QIter<Real> low(q), high(q);
  Real t{1};
  for (int m = 1; m <= s; ++m)
    t /= high.next_qnum(); // 1/[s]!
  for (int m = 0; m < s; ++m)
    t *= x; // x^s
  Real prev_mag{0};
  converged = false;
  for (int k = 0; k < max_terms; ++k) {
    acc.add(t);
    const Real a = low.next_qnum();   // [k+1]
    const Real b = high.next_qnum();  // [k+1+s]
    Real tn = -t * y / (a * b);
    const Real mag = abs(tn);
    if (k > 2 && mag < prev_mag &&
        mag <= Real(tol) * (abs(acc.sum) + Real(1e-300))) {
      converged = true;
      return;
    }
    prev_mag = mag;
    t = tn;
  }
}

// Standard Hahn-Exton Jhat_s(y), s >= 0, y = q^a:
//   prefactor (q^{2s+2};q^2)inf/(q^2;q^2)inf = 1/(q^2;q^2)_s
//   terms (-1)^k q^{k(k+1)} y^{2k+s} / ((q^2;q^2)_k (q^{2s+2};q^2)_k)
template <class Real>
void hahn_exton_std_kernel(const Real &q, int s, int a, double tol,
                           int max_terms, SeriesAcc<Real> &acc,
                           bool &converged) {
  using std::abs;
  const Real q2 = q * q;
  // y^2 = q^(2a); y^s = q^(a s): iterated powers
  Real y2{1};
  {
    const Real base = a >= 0 ? q2 : Real(1) / q2;
    for (int i = std::abs(a); i > 0; --i)
      y2 *= base;
  }
  Real t{1};
  {
    const Real base = a * s >= 0 ? q : Real(1) / q;
    for (int i = std::abs(a * s); i > 0; --i)
      t *= base; // y^s
  }
  // 1/(q^2;q^2)_s prefactor
  Real q2m{1};
  for (int m = 1; m <= s; ++m) {
    q2m *= q2;
    t /= (Real(1) - q2m);
  }
  Real q2k{1};        // q^{2k}
  Real q2ks = q2m;    // q^{2k+2s}, starts at q^{2s}
  Real prev_mag{0};
  converged = false;
  for (int k = 0; k < max_terms; ++k) {
    acc.add(t);
    q2k *= q2;
    q2ks *= q2;
    // ratio: -q^{2(k+1)} y^2 / ((1-q^{2(k+1)})(1-q^{2(k+1)+2s}))
    Real tn = -t * q2k * y2 / ((Real(1) - q2k) * (Real(1) - q2ks));
    const Real mag = abs(tn);
    if (k > 2 && mag < prev_mag &&
        mag <= Real(tol) * (abs(acc.sum) + Real(1e-300))) {
      converged = true;
      return;
    }
    prev_mag = mag;
    t = tn;
  }
}

// Correction series of N: sum_{k>=1} (-1)^k y^k h_k / ([k]!)^2,
// h_k = sum_{m<=k} (q^m + q^-m)/[m].
template <class Real>
void neumann_corr_kernel(const Real &q, const Real &y, double tol,
                         int max_terms, SeriesAcc<Real> &acc,
                         bool &converged) {
  using std::abs;
  QIter<Real> it(q);
  Real t{1}, h{0};
  Real prev_mag{0};
  converged = false;
  for (int k = 1; k < max_terms; ++k) {
    const Real qn = it.next_qnum();
    t *= -y / (qn * qn);
    h += (it.qk + it.inv_qk) / qn;
    const Real term = t * h;
    acc.add(term);
    const Real mag = abs(term);
    if (k > 2 && mag < prev_mag &&
        mag <= Real(tol) * (abs(acc.sum) + Real(1e-300))) {
      converged = true;
      return;
    }
    prev_mag = mag;
  }
}

// ---------------------------------------------------------------------------
// a-priori sizing in doubles

struct PeakEstimate {
  double peak_ln = 0.0; // max_k ln|term_k|
  int k_peak = 0;
};

// terms ln t_k = k ln y - 2 ln [k]!  (J-type; order-s and Neumann share the
// same envelope up to O(ln k) factors, absorbed into the guard digits)
PeakEstimate series_peak(const QContext &ctx, double ln_y) {
  PeakEstimate pe;
  double ln_fact = 0.0, ln_t = 0.0;
  for (int k = 1; k < 200000; ++k) {
    ln_fact += ln_q_number(ctx, k);
    ln_t = k * ln_y - 2.0 * ln_fact;
    if (ln_t > pe.peak_ln) {
      pe.peak_ln = ln_t;
      pe.k_peak = k;
    } else if (k > pe.k_peak + 4) {
      break; // envelope is unimodal
    }
  }
  return pe;
}

int tier_for_digits(double digits) {
  if (digits <= 50)
    return 50;
  if (digits <= 150)
    return 150;
  if (digits <= 400)
    return 400;
  if (digits <= 1200)
    return 1200;
  if (digits <= 3200)
    return 3200;
  throw PrecisionError("required precision exceeds the 3200-digit tier");
}

// generic dispatcher: run fn<Real>() for the tier with >= digits
template <class Fn> auto with_tier(int digits, Fn &&fn) {
  switch (tier_for_digits(digits)) {
  case 50:
    return fn(Real50{});
  case 150:
    return fn(Real150{});
  case 400:
    return fn(Real400{});
  case 1200:
    return fn(Real1200{});
  default:
    return fn(Real3200{});
  }
}

template <class Real> Real make_q(const QContext &ctx) {
  return Real(ctx.q());
}

} // namespace

double ln_q_number(const QContext &ctx, int m) {
  // [m] = q^{-|m|}(1 - q^{2|m|}) / (q^{-1} - q), sign handled by caller
  const int n = std::abs(m);
  const double L = -ctx.ln_q();
  return n * L + std::log1p(-std::exp(-2.0 * n * L)) -
         std::log(ctx.inv_q() - ctx.q());
}

namespace {

// shared driver: run kernel in double, escalate on observed cancellation
template <class KernelD, class KernelR>
EvalInfo run_auto(const QContext &ctx, double ln_y_for_peak, KernelD &&kd,
                  KernelR &&kr) {
  EvalInfo out;
  const PeakEstimate pe = series_peak(ctx, ln_y_for_peak);
  const double peak_digits = std::max(0.0, pe.peak_ln / kLn10);
  const bool try_double =
      ctx.mode() == PrecisionMode::Double && peak_digits < 6.0;
  if (try_double) {
    SeriesAcc<double> acc;
    bool conv = false;
    kd(acc, conv);
    const double cancel =
        acc.max_abs / std::max(std::abs(acc.sum), 1e-300);
    if (conv && cancel < 1e6) {
      out.value = acc.sum;
      out.ln_abs_value = std::log(std::abs(acc.sum) + 1e-300);
      out.ln_abs_peak = std::log(acc.max_abs + 1e-300);
      out.terms = acc.terms;
      out.digits_used = 16;
      return out;
    }
  }
  // extended: start from a symmetric-cancellation guess, escalate if the
  // observed loss leaves fewer than 25 clean digits
  double digits = 2.2 * peak_digits + 40.0;
  for (;;) {
    const int used = tier_for_digits(digits);
    EvalInfo r = with_tier(digits, [&](auto tag) {
      using Real = decltype(tag);
      SeriesAcc<Real> acc;
      bool conv = false;
      kr(acc, conv, Real{});
      if (!conv)
        throw PrecisionError("series did not converge within max_terms");
      EvalInfo e;
      e.value = to_double(acc.sum);
      e.ln_abs_value = ln_abs(acc.sum);
      e.ln_abs_peak = ln_abs(acc.max_abs);
      e.terms = acc.terms;
      e.digits_used = digits_of<Real>();
      return e;
    });
    const double lost = (r.ln_abs_peak - r.ln_abs_value) / kLn10;
    if (std::isfinite(r.ln_abs_value) && used - lost >= 25.0)
      return r;
    if (used >= 3200) {
      if (!std::isfinite(r.ln_abs_value))
        throw PrecisionError("series value vanished at the top tier");
      return r; // accept with reduced accuracy; caller sees digits_used
    }
    digits = std::isfinite(lost) ? std::max(digits * 1.6, lost + 60.0)
                                 : digits * 2.0;
  }
}

} // namespace

EvalInfo bessel_j_auto(const QContext &ctx, double x) {
  if (x < 0.0)
    throw DomainError("bessel_j: x must be >= 0");
  if (x == 0.0) {
    EvalInfo e;
    e.value = 1.0;
    e.ln_abs_value = 0.0;
    e.ln_abs_peak = 0.0;
    e.terms = 1;
    return e;
  }
  const double ln_y = 2.0 * std::log(x);
  return run_auto(
      ctx, ln_y,
      [&](SeriesAcc<double> &acc, bool &conv) {
        bessel_kernel<double>(ctx.q(), x * x, ctx.series_tol(),
                              ctx.max_terms(), acc, conv);
      },
      [&](auto &acc, bool &conv, auto tag) {
        using Real = decltype(tag);
        const Real xr(x);
        bessel_kernel<Real>(make_q<Real>(ctx), xr * xr, ctx.series_tol(),
                            ctx.max_terms(), acc, conv);
      });
}

EvalInfo bessel_j_lattice_auto(const QContext &ctx, int n) {
  const double ln_y = 2.0 * (std::log(ctx.mu()) + n * ctx.ln_q());
  return run_auto(
      ctx, ln_y,
      [&](SeriesAcc<double> &acc, bool &conv) {
        const double x = ctx.mu() * std::exp(n * ctx.ln_q());
        bessel_kernel<double>(ctx.q(), x * x, ctx.series_tol(),
                              ctx.max_terms(), acc, conv);
      },
      [&](auto &acc, bool &conv, auto tag) {
        using Real = decltype(tag);
        const Real q = make_q<Real>(ctx);
        Real qn{1};
        const Real base = n >= 0 ? q : Real(1) / q;
        for (int i = std::abs(n); i > 0; --i)
          qn *= base;
        const Real x = q / (Real(1) - q * q) * qn;
        bessel_kernel<Real>(q, x * x, ctx.series_tol(), ctx.max_terms(), acc,
                            conv);
      });
}

EvalInfo bessel_j_order_auto(const QContext &ctx, int s, double x) {
  if (x < 0.0)
    throw DomainError("bessel_j_order: x must be >= 0");
  if (s < 0)
    throw DomainError("bessel_j_order_auto: s must be >= 0 here");
  if (x == 0.0) {
    EvalInfo e;
    e.value = s == 0 ? 1.0 : 0.0;
    e.ln_abs_value = s == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    e.terms = 1;
    return e;
  }
  const double ln_y = 2.0 * std::log(x);
  return run_auto(
      ctx, ln_y,
      [&](SeriesAcc<double> &acc, bool &conv) {
        bessel_order_kernel<double>(ctx.q(), s, x, ctx.series_tol(),
                                    ctx.max_terms(), acc, conv);
      },
      [&](auto &acc, bool &conv, auto tag) {
        using Real = decltype(tag);
        bessel_order_kernel<Real>(make_q<Real>(ctx), s, Real(x),
                                  ctx.series_tol(), ctx.max_terms(), acc,
                                  conv);
      });
}

EvalInfo hahn_exton_std_auto(const QContext &ctx, int s, int a) {
  if (s < 0) {
    // Jhat_{-s}(y) = (-1)^s q^s Jhat_s(q^s y): exponent shift a -> a + |s|
    EvalInfo e = hahn_exton_std_auto(ctx, -s, a + (-s));
    const int ss = -s;
    const double scale = q_power(ctx, ss);
    e.value *= (ss % 2 == 0 ? 1.0 : -1.0) * scale;
    e.ln_abs_value += ss * ctx.ln_q();
    e.ln_abs_peak += ss * ctx.ln_q();
    return e;
  }
  // peak envelope: same q-growth as the J series with effective
  // ln y = 2 a ln q + s-offset; reuse the generic estimator on x = q^a.
  const double ln_y = 2.0 * a * ctx.ln_q();
  return run_auto(
      ctx, ln_y,
      [&](SeriesAcc<double> &acc, bool &conv) {
        hahn_exton_std_kernel<double>(ctx.q(), s, a, ctx.series_tol(),
                                      ctx.max_terms(), acc, conv);
      },
      [&](auto &acc, bool &conv, auto tag) {
        using Real = decltype(tag);
        hahn_exton_std_kernel<Real>(make_q<Real>(ctx), s, a, ctx.series_tol(),
                                    ctx.max_terms(), acc, conv);
      });
}

namespace {

// N(sqrt(y)) assembled at one precision; ln_prho passed separately so the
// lattice path keeps the log exactly linear in j.
template <class Real>
void neumann_assemble(const QContext &ctx, const Real &y, const Real &ln_prho,
                      double c_q, SeriesAcc<Real> &bessel_acc,
                      SeriesAcc<Real> &corr_acc, Real &out, bool &conv,
                      double tol_override = 0.0, int terms_override = 0) {
  const Real q = make_q<Real>(ctx);
  const double tol = tol_override > 0.0 ? tol_override : ctx.series_tol();
  const int cap = terms_override > 0 ? terms_override : ctx.max_terms();
  bool c1 = false, c2 = false;
  bessel_kernel<Real>(q, y, tol, cap, bessel_acc, c1);
  neumann_corr_kernel<Real>(q, y, tol, cap, corr_acc, c2);
  using std::log;
  const Real alpha = (q - Real(1) / q) / (Real(2) * q * log(q));
  out = alpha * bessel_acc.sum * (ln_prho + Real(2) * Real(c_q)) -
        corr_acc.sum / q;
  conv = c1 && c2;
}

} // namespace

GreenEval green_parts_auto(const QContext &ctx, double p, double rho,
                           double c_q, const int *j_hint) {
  if (!(p > 0.0))
    throw DomainError("green: p must be > 0");
  if (!(rho > 0.0) && j_hint == nullptr)
    throw DomainError("neumann: rho must be > 0");
  const double ln_y = j_hint ? std::log(p) + 2.0 * (*j_hint) * ctx.ln_q()
                             : std::log(p * rho);
  const PeakEstimate pe = series_peak(ctx, ln_y);
  const double peak_digits = std::max(0.0, pe.peak_ln / kLn10);
  double digits =
      (ctx.mode() == PrecisionMode::Extended || peak_digits >= 6.0)
          ? 2.2 * peak_digits + 40.0
          : 0.0;
  for (;;) {
    if (digits == 0.0) {
      // double path
      SeriesAcc<double> ba, ca;
      double nv = 0.0;
      bool conv = false;
      const double y = p * rho;
      neumann_assemble<double>(ctx, y, ln_y, c_q, ba, ca, nv, conv);
      const double cancel = std::max(ba.max_abs, ca.max_abs) /
                            std::max(std::abs(nv), 1e-300);
      if (conv && cancel < 1e6) {
        GreenEval g;
        g.bessel.value = ba.sum;
        g.bessel.ln_abs_value = std::log(std::abs(ba.sum) + 1e-300);
        g.bessel.ln_abs_peak = std::log(ba.max_abs + 1e-300);
        g.bessel.terms = ba.terms;
        g.neumann = nv;
        g.ln_abs_neumann = std::log(std::abs(nv) + 1e-300);
        g.digits_used = 16;
        return g;
      }
      digits = 2.2 * peak_digits + 40.0;
      continue;
    }
    const int used = tier_for_digits(digits);
    GreenEval g = with_tier(digits, [&](auto tag) {
      using Real = decltype(tag);
      const Real q = make_q<Real>(ctx);
      Real y;
      Real lnpr;
      if (j_hint) {
        using std::log;
        Real rj{1};
        const Real base = (*j_hint) >= 0 ? q * q : Real(1) / (q * q);
        for (int i = std::abs(*j_hint); i > 0; --i)
          rj *= base;
        y = Real(p) * rj;
        lnpr = log(Real(p)) + Real(2 * (*j_hint)) * log(q);
      } else {
        using std::log;
        y = Real(p) * Real(rho);
        lnpr = log(y);
      }
      SeriesAcc<Real> ba, ca;
      Real nv{0};
      bool conv = false;
      neumann_assemble<Real>(ctx, y, lnpr, c_q, ba, ca, nv, conv);
      if (!conv)
        throw PrecisionError("neumann series did not converge");
      GreenEval ge;
      ge.bessel.value = to_double(ba.sum);
      ge.bessel.ln_abs_value = ln_abs(ba.sum);
      ge.bessel.ln_abs_peak = ln_abs(ba.max_abs);
      ge.bessel.terms = ba.terms;
      ge.bessel.digits_used = digits_of<Real>();
      ge.neumann = to_double(nv);
      ge.ln_abs_neumann = ln_abs(nv);
      ge.digits_used = digits_of<Real>();
      return ge;
    });
    const double lost =
        (std::max(g.bessel.ln_abs_peak, g.bessel.ln_abs_value) -
         std::min(g.bessel.ln_abs_value, g.ln_abs_neumann)) /
        kLn10;
    if (used - lost >= 20.0 || used >= 3200)
      return g;
    digits = std::max(digits * 1.6, lost + 60.0);
  }
}

double residual_homogeneous(const QContext &ctx, HomogeneousKind kind,
                            double p, double c_q, int j) {
  // samples at j-1, j, j+1; deepest rho (j-1) dominates the series budget
  const double ln_y_deep = std::log(p) + 2.0 * (j - 1) * ctx.ln_q();
  const PeakEstimate pe = series_peak(ctx, ln_y_deep);
  double digits = 2.2 * std::max(0.0, pe.peak_ln / kLn10) + 60.0;
  // stencil cancellation: |stencil| ~ (q-1/q)^2 rho_j p |f_j| vs max|f|,
  // worst at small rho where f ~ f(0): add the -ln((q-1/q)^2 rho_j p) budget
  const double ln_stencil_scale =
      2.0 * std::log(ctx.inv_q() - ctx.q()) +
      2.0 * j * ctx.ln_q() + std::log(p);
  digits += std::max(0.0, -ln_stencil_scale / kLn10);
  // Truncate the sample series deep enough that the dropped tail stays
  // below the stencil scale (the stencil cancels max|f| down to
  // (q-1/q)^2 rho_j p |f_j|).
  const double tol_r =
      1e-18 * std::min(1.0, std::exp(std::min(0.0, ln_stencil_scale)));
  const int terms_cap = ctx.max_terms() + 200;
  return with_tier(digits, [&](auto tag) -> double {
    using Real = decltype(tag);
    const Real q = make_q<Real>(ctx);
    const Real pr(p);
    using std::abs;
    using std::log;
    auto sample = [&](int jj) -> Real {
      Real rj{1};
      const Real base = jj >= 0 ? q * q : Real(1) / (q * q);
      for (int i = std::abs(jj); i > 0; --i)
        rj *= base;
      const Real y = pr * rj;
      if (kind == HomogeneousKind::BesselJ) {
        SeriesAcc<Real> acc;
        bool conv = false;
        bessel_kernel<Real>(q, y, tol_r, terms_cap, acc, conv);
        if (!conv)
          throw PrecisionError("residual: bessel series not converged");
        return acc.sum;
      }
      const Real lnpr = log(pr) + Real(2 * jj) * log(q);
      SeriesAcc<Real> ba, ca;
      Real nv{0};
      bool conv = false;
      neumann_assemble<Real>(ctx, y, lnpr, c_q, ba, ca, nv, conv, tol_r,
                             terms_cap);
      if (!conv)
        throw PrecisionError("residual: neumann series not converged");
      return nv;
    };
    const Real fm = sample(j - 1), f0 = sample(j), fp = sample(j + 1);
    Real rho_j{1};
    {
      const Real base = j >= 0 ? q * q : Real(1) / (q * q);
      for (int i = std::abs(j); i > 0; --i)
        rho_j *= base;
    }
    const Real d = (q - Real(1) / q) * (q - Real(1) / q);
    const Real box_f = -(Real(2) * f0 - fp - fm) / (d * rho_j);
    const Real resid = box_f + pr * f0;
    const Real denom = pr * abs(f0);
    if (denom == 0)
      return 0.0;
    return to_double(Real(abs(resid) / denom));
  });
}

} // namespace qplane::detail
