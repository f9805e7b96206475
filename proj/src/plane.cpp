#include "qplane/plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_dec_float.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qplane {

namespace {

using Real50 =
    boost::multiprecision::number<boost::multiprecision::cpp_dec_float<50>,
                                  boost::multiprecision::et_off>;

// Symmetric tridiagonal QL with implicit shifts (and eigenvector
// accumulation).  Run in 50-digit arithmetic the oracle keeps full relative
// accuracy on the exponentially graded sector matrices, where double QR
// loses the small eigenvalues entirely (error ~ eps * ||A||).
template <class Real>
void tridiag_ql(std::vector<Real> &d, std::vector<Real> &e,
                std::vector<std::vector<Real>> &z) {
  using std::abs;
  using std::sqrt;
  const int n = static_cast<int>(d.size());
  e.push_back(Real(0));
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const Real dd = abs(d[m]) + abs(d[m + 1]);
        if (abs(e[m]) <= std::numeric_limits<Real>::epsilon() * dd)
          break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw PrecisionError("tridiag_ql: too many iterations");
        Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
        Real r = sqrt(g * g + Real(1));
        g = d[m] - d[l] + e[l] / (g + (g >= Real(0) ? abs(r) : -abs(r)));
        Real s{1}, c{1}, p{0};
        for (int i = m - 1; i >= l; --i) {
          Real f = s * e[i];
          const Real b = c * e[i];
          r = sqrt(f * f + g * g);
          e[i + 1] = r;
          if (r == Real(0)) {
            d[i + 1] -= p;
            e[m] = Real(0);
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + Real(2) * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z[k][static_cast<size_t>(i + 1)];
            z[k][static_cast<size_t>(i + 1)] =
                s * z[k][static_cast<size_t>(i)] + c * f;
            z[k][static_cast<size_t>(i)] =
                c * z[k][static_cast<size_t>(i)] - s * f;
          }
        }
        if (r == Real(0) && m - 1 >= l)
          continue;
        d[l] -= p;
        e[l] = g;
        e[m] = Real(0);
      }
    } while (m != l);
  }
  e.pop_back();
}

struct Real50Eigen {
  std::vector<double> values;              // unsorted
  std::vector<std::vector<double>> vectors; // column i = vectors[i]
};

Real50Eigen eigensolve_sector_r50(const QContext &ctx, int s, int j_lo,
                                  int j_hi, bool absorb_lo_corner) {
  const int n = j_hi - j_lo + 1;
  const Real50 q(ctx.q());
  auto qpow = [&](int k) {
    Real50 r{1};
    const Real50 base = k >= 0 ? q : Real50(1) / q;
    for (int i = std::abs(k); i > 0; --i)
      r *= base;
    return r;
  };
  std::vector<Real50> d(static_cast<size_t>(n)), e(static_cast<size_t>(n - 1));
  for (int j = j_lo; j <= j_hi; ++j) {
    d[static_cast<size_t>(j - j_lo)] = qpow(2 * (s + j)) + qpow(2 * j);
    if (j < j_hi)
      e[static_cast<size_t>(j - j_lo)] = qpow(s + 2 * j + 1);
  }
  if (absorb_lo_corner) {
    // Absorbing corner at the large-rho edge: every decaying solution of the
    // deep recurrence has c_{j-1}/c_j -> -q^{s+1} (the bounded characteristic
    // root), so the dropped coupling o_{lo-1} c_{lo-1} folds into the corner
    // as -q^{2s+2 j_lo} c_lo.  Plain Dirichlet truncation does not converge
    // for s = 0, where offdiag growth exactly cancels the eigenvector decay.
    d[0] -= qpow(2 * s + 2 * j_lo);
  }
  std::vector<std::vector<Real50>> z(static_cast<size_t>(n),
                                     std::vector<Real50>(
                                         static_cast<size_t>(n), Real50(0)));
  for (int i = 0; i < n; ++i)
    z[static_cast<size_t>(i)][static_cast<size_t>(i)] = Real50(1);
  tridiag_ql<Real50>(d, e, z);
  Real50Eigen out;
  out.values.resize(static_cast<size_t>(n));
  out.vectors.assign(static_cast<size_t>(n),
                     std::vector<double>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i) {
    out.values[static_cast<size_t>(i)] = d[static_cast<size_t>(i)].convert_to<double>();
    for (int k = 0; k < n; ++k)
      out.vectors[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          z[static_cast<size_t>(k)][static_cast<size_t>(i)].convert_to<double>();
  }
  return out;
}

// coefficient window needed around t: geometric on the small-y side,
// super-geometric (q^{a^2}) on the large-y side
int lo_halfwidth(const QContext &ctx, double mass_tol) {
  return static_cast<int>(
             std::ceil(-std::log(mass_tol) / (2.0 * -ctx.ln_q()))) +
         4;
}
int hi_halfwidth(const QContext &ctx, double mass_tol) {
  return static_cast<int>(
             std::ceil(std::sqrt(-std::log(mass_tol) / -ctx.ln_q()))) +
         4;
}

// e_ts coefficient c_j = (-1)^j q^a Jhat_s(q^a), a = t - j, with a memo over
// a and an underflow screen for the super-geometric side.
struct HahnMemo {
  std::map<std::pair<int, int>, double> v; // (s, a) -> Jhat_s(q^a)
};

double ets_coeff(const QContext &ctx, int s, int t, int j, HahnMemo *memo) {
  const int a = t - j;
  if (a < 0) {
    // |c| ~ q^{a^2}: below double range -> exact zero
    const double underflow_a =
        3.0 + std::sqrt(741.0 / -ctx.ln_q() / 1.0);
    if (-a >= static_cast<int>(underflow_a))
      return 0.0;
  }
  double hv;
  if (memo) {
    auto it = memo->v.find({s, a});
    if (it != memo->v.end())
      hv = it->second;
    else {
      hv = detail::hahn_exton_std_auto(ctx, s, a).value;
      memo->v[{s, a}] = hv;
    }
  } else {
    hv = detail::hahn_exton_std_auto(ctx, s, a).value;
  }
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(a * ctx.ln_q()) * hv;
}

} // namespace

SectorMatrix build_sector_matrix(const QContext &ctx,
                                 const DiagonalSector &sector,
                                 const PhaseParams &phases) {
  if (phases.psi != 0.0 || phases.phi != 0.0)
    throw DomainError(
        "build_sector_matrix: nonzero phases unsupported (e_ts assumes 0)");
  if (sector.j_lo >= sector.j_hi)
    throw DomainError("build_sector_matrix: empty window");
  SectorMatrix M;
  M.sector = sector;
  const int n = sector.j_hi - sector.j_lo + 1;
  M.diag.resize(static_cast<size_t>(n));
  M.offdiag.resize(static_cast<size_t>(n - 1));
  for (int j = sector.j_lo; j <= sector.j_hi; ++j) {
    const double a = std::exp(2.0 * (sector.s + j) * ctx.ln_q());
    const double b = std::exp(2.0 * j * ctx.ln_q());
    M.diag[static_cast<size_t>(j - sector.j_lo)] = a + b;
    if (j < sector.j_hi)
      M.offdiag[static_cast<size_t>(j - sector.j_lo)] =
          std::exp((sector.s + 2 * j + 1) * ctx.ln_q());
  }
  return M;
}

SectorMatrix sector_matrix_from_tensor(const QContext &ctx,
                                       const TensorBandOperator &R,
                                       const DiagonalSector &sector) {
  (void)ctx;
  SectorMatrix M;
  M.sector = sector;
  const int n = sector.j_hi - sector.j_lo + 1;
  M.diag.resize(static_cast<size_t>(n), 0.0);
  M.offdiag.resize(static_cast<size_t>(n - 1), 0.0);
  for (int j = sector.j_lo; j <= sector.j_hi; ++j) {
    const int a = sector.s + j, b = j;
    M.diag[static_cast<size_t>(j - sector.j_lo)] = R.coeff(0, 0, a, b).real();
    if (j < sector.j_hi)
      M.offdiag[static_cast<size_t>(j - sector.j_lo)] =
          R.coeff(1, 1, a, b).real();
  }
  return M;
}

std::vector<double> sector_eigenvalues_r50(const QContext &ctx,
                                           const DiagonalSector &sec) {
  const Real50Eigen es =
      eigensolve_sector_r50(ctx, sec.s, sec.j_lo, sec.j_hi, false);
  std::vector<double> v = es.values;
  std::sort(v.begin(), v.end());
  return v;
}

double sector_leakage(const TensorBandOperator &R) {
  double m = 0.0;
  for (const auto &[k, c] : R.bands()) {
    if (k.first == k.second)
      continue;
    for (const Complex &v : c)
      m = std::max(m, std::abs(v));
  }
  return m;
}

double EtsVector::norm() const {
  double s2 = 0.0;
  for (double x : c)
    s2 += x * x;
  return std::sqrt(s2);
}

EtsVector ets_vector(const QContext &ctx, int t, int s, int j_lo, int j_hi,
                     double tail_tol) {
  if (j_lo >= j_hi)
    throw DomainError("ets_vector: empty window");
  EtsVector e;
  e.t = t;
  e.s = s;
  e.j_lo = j_lo;
  e.j_hi = j_hi;
  e.c.resize(static_cast<size_t>(j_hi - j_lo + 1));
  HahnMemo memo;
  for (int j = j_lo; j <= j_hi; ++j)
    e.c[static_cast<size_t>(j - j_lo)] = ets_coeff(ctx, s, t, j, &memo);
  e.tail_lo = std::abs(e.c.front());
  e.tail_hi = std::abs(e.c.back());
  if (e.tail_lo > tail_tol || e.tail_hi > tail_tol)
    throw WindowError("ets_vector: window too small (tails " +
                      std::to_string(e.tail_lo) + ", " +
                      std::to_string(e.tail_hi) + ")");
  return e;
}

double ets_eigen_residual(const QContext &ctx, const EtsVector &e) {
  // rows measured backward-relative: |row residual| / (sum of |row terms|);
  // the raw stencil value at deep rows mixes q^(2j)-sized entries, so a
  // forward-relative measure would only reflect that conditioning.
  const SectorMatrix M =
      build_sector_matrix(ctx, DiagonalSector{e.s, e.j_lo, e.j_hi});
  const double lam = std::exp(2.0 * e.t * ctx.ln_q());
  const int n = M.size();
  double worst = 0.0;
  // edge rows are excluded: they reference coefficients outside the window
  for (int i = 1; i + 1 < n; ++i) {
    double y = M.diag[static_cast<size_t>(i)] * e.c[static_cast<size_t>(i)];
    double scale = std::abs(y) + lam * std::abs(e.c[static_cast<size_t>(i)]);
    if (i > 0) {
      const double v =
          M.offdiag[static_cast<size_t>(i - 1)] * e.c[static_cast<size_t>(i - 1)];
      y += v;
      scale += std::abs(v);
    }
    if (i + 1 < n) {
      const double v =
          M.offdiag[static_cast<size_t>(i)] * e.c[static_cast<size_t>(i + 1)];
      y += v;
      scale += std::abs(v);
    }
    const double r = y - lam * e.c[static_cast<size_t>(i)];
    if (scale > 0.0)
      worst = std::max(worst, std::abs(r) / scale);
  }
  return worst;
}

std::vector<int> resolvable_t(const QContext &ctx, int s, int j_lo, int j_hi,
                              double tail_tol) {
  std::vector<int> ts;
  HahnMemo memo;
  const int hi_w = hi_halfwidth(ctx, 1e-26); // screen: coefficients at the
                                             // j_hi edge decay like q^{a^2}
  for (int t = j_lo; t <= j_hi; ++t) {
    if (j_hi - t < hi_w - 8) {
      // near the small-rho edge: test the actual coefficient
      const double c_hi = std::abs(ets_coeff(ctx, s, t, j_hi, &memo));
      if (c_hi > tail_tol)
        continue;
    }
    const double c_lo = std::abs(ets_coeff(ctx, s, t, j_lo, &memo));
    if (c_lo > tail_tol)
      continue;
    const double c_hi = std::abs(ets_coeff(ctx, s, t, j_hi, &memo));
    if (c_hi > tail_tol)
      continue;
    ts.push_back(t);
  }
  return ts;
}

EigenCheck eigensolve_check(const QContext &ctx, int t, int s,
                            int half_width) {
  int d_lo = lo_halfwidth(ctx, 1e-12);
  int d_hi = hi_halfwidth(ctx, 1e-12);
  if (half_width > 0) {
    d_lo = std::max(d_lo, half_width);
    d_hi = std::max(d_hi, half_width);
  }
  const int lo = t - d_lo, hi = t + d_hi;
  const Real50Eigen es = eigensolve_sector_r50(ctx, s, lo, hi, true);
  const double lam = std::exp(2.0 * t * ctx.ln_q());
  const int n = hi - lo + 1;
  int best = 0;
  double bestgap = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) {
    const double g = std::abs(es.values[static_cast<size_t>(i)] - lam);
    if (g < bestgap) {
      bestgap = g;
      best = i;
    }
  }
  EigenCheck out;
  out.eigenvalue = es.values[static_cast<size_t>(best)];
  out.relative_gap = bestgap / lam;
  const EtsVector e = ets_vector(ctx, t, s, lo, hi, 1.0); // tails informative
  double dot = 0.0, n2 = 0.0;
  for (int i = 0; i < n; ++i) {
    dot += es.vectors[static_cast<size_t>(best)][static_cast<size_t>(i)] *
           e.c[static_cast<size_t>(i)];
    n2 += e.c[static_cast<size_t>(i)] * e.c[static_cast<size_t>(i)];
  }
  out.overlap = std::abs(dot) / std::sqrt(n2);
  return out;
}

// --- PlaneVector -------------------------------------------------------------

PlaneVector::PlaneVector(int L) : L_(L) {
  if (L < 1)
    throw DomainError("PlaneVector: L must be >= 1");
  const size_t n = static_cast<size_t>(2 * L + 1);
  v_.assign(n * n, Complex{0.0, 0.0});
}

Complex &PlaneVector::at(int a, int b) {
  if (a < -L_ || a > L_ || b < -L_ || b > L_)
    throw DomainError("PlaneVector::at: outside grid");
  const size_t n = static_cast<size_t>(2 * L_ + 1);
  return v_[static_cast<size_t>(a + L_) * n + static_cast<size_t>(b + L_)];
}

Complex PlaneVector::at(int a, int b) const {
  if (a < -L_ || a > L_ || b < -L_ || b > L_)
    return {0.0, 0.0};
  const size_t n = static_cast<size_t>(2 * L_ + 1);
  return v_[static_cast<size_t>(a + L_) * n + static_cast<size_t>(b + L_)];
}

double PlaneVector::norm() const {
  double s = 0.0;
  for (const Complex &x : v_)
    s += std::norm(x);
  return std::sqrt(s);
}

PlaneVector PlaneVector::scaled(Complex x) const {
  PlaneVector r(*this);
  for (Complex &y : r.v_)
    y *= x;
  return r;
}

PlaneVector PlaneVector::plus(const PlaneVector &o) const {
  if (o.L_ != L_)
    throw DomainError("PlaneVector::plus: grid mismatch");
  PlaneVector r(*this);
  for (size_t i = 0; i < v_.size(); ++i)
    r.v_[i] += o.v_[i];
  return r;
}

double PlaneVector::sector_mass(int s) const {
  double m = 0.0;
  for (int j = -L_; j <= L_; ++j) {
    const int a = s + j;
    if (a < -L_ || a > L_)
      continue;
    m += std::norm(at(a, j));
  }
  return m;
}

EtsExpansion expand_in_ets(const QContext &ctx, const PlaneVector &v,
                           double tail_tol) {
  EtsExpansion ex;
  const int L = v.L();
  double total2 = 0.0, captured2 = 0.0;
  for (int s = -2 * L; s <= 2 * L; ++s) {
    const int j_lo = std::max(-L, -L - s);
    const int j_hi = std::min(L, L - s);
    if (j_lo >= j_hi)
      continue;
    const double mass = v.sector_mass(s);
    total2 += mass;
    if (mass == 0.0)
      continue;
    HahnMemo memo;
    for (int t : resolvable_t(ctx, s, j_lo, j_hi, tail_tol)) {
      Complex acc{0.0, 0.0};
      for (int j = j_lo; j <= j_hi; ++j)
        acc += ets_coeff(ctx, s, t, j, &memo) * v.at(s + j, j);
      if (std::abs(acc) > 0.0) {
        ex.coeff[{t, s}] = acc;
        captured2 += std::norm(acc);
      }
    }
  }
  ex.unresolved_mass = std::max(0.0, total2 - captured2);
  return ex;
}

PlaneVector reconstruct_from_ets(const QContext &ctx, const EtsExpansion &ex,
                                 int L, double /*tail_tol*/) {
  PlaneVector v(L);
  HahnMemo memo;
  for (const auto &[ts, a] : ex.coeff) {
    const int t = ts.first, s = ts.second;
    const int j_lo = std::max(-L, -L - s);
    const int j_hi = std::min(L, L - s);
    for (int j = j_lo; j <= j_hi; ++j)
      v.at(s + j, j) += a * ets_coeff(ctx, s, t, j, &memo);
  }
  return v;
}

PlaneVector apply_green_plane(const QContext &ctx, const GreenParams &gp,
                              const PlaneVector &v, double mass_tol) {
  EtsExpansion ex = expand_in_ets(ctx, v);
  const double n2 = v.norm() * v.norm();
  if (n2 > 0.0 && ex.unresolved_mass > mass_tol * n2)
    throw ResolutionError(
        "apply_green_plane: unresolved spectral mass fraction " +
        std::to_string(ex.unresolved_mass / n2));
  for (auto &[ts, a] : ex.coeff)
    a *= green_on_lattice(ctx, gp, ts.first);
  return reconstruct_from_ets(ctx, ex, v.L());
}

PlaneVector apply_green_plane_numeric(const QContext &ctx,
                                      const GreenParams &gp,
                                      const PlaneVector &v, double mass_tol) {
  const int L = v.L();
  PlaneVector out(L);
  double total2 = 0.0, captured2 = 0.0;
  const int d_lo = lo_halfwidth(ctx, 1e-12);
  const int d_hi = hi_halfwidth(ctx, 1e-12);
  for (int s = -2 * L; s <= 2 * L; ++s) {
    const int j_lo = std::max(-L, -L - s);
    const int j_hi = std::min(L, L - s);
    if (j_lo >= j_hi)
      continue;
    const double mass = v.sector_mass(s);
    total2 += mass;
    if (mass == 0.0)
      continue;
    for (int t : resolvable_t(ctx, s, j_lo, j_hi)) {
      // balanced window around t keeps the 50-digit QL oracle accurate
      const int wlo = std::max(j_lo, t - d_lo);
      const int whi = std::min(j_hi, t + d_hi);
      const Real50Eigen es = eigensolve_sector_r50(ctx, s, wlo, whi, true);
      const double lam = std::exp(2.0 * t * ctx.ln_q());
      const int n = whi - wlo + 1;
      int best = 0;
      double bestgap = std::numeric_limits<double>::max();
      for (int i = 0; i < n; ++i) {
        const double g = std::abs(es.values[static_cast<size_t>(i)] - lam);
        if (g < bestgap) {
          bestgap = g;
          best = i;
        }
      }
      Complex alpha{0.0, 0.0};
      for (int j = wlo; j <= whi; ++j)
        alpha += es.vectors[static_cast<size_t>(best)]
                           [static_cast<size_t>(j - wlo)] *
                 v.at(s + j, j);
      captured2 += std::norm(alpha);
      const Complex ga = green_on_lattice(ctx, gp, t) * alpha;
      for (int j = wlo; j <= whi; ++j)
        out.at(s + j, j) += ga * es.vectors[static_cast<size_t>(best)]
                                           [static_cast<size_t>(j - wlo)];
    }
  }
  if (total2 > 0.0 && total2 - captured2 > mass_tol * total2)
    throw ResolutionError("apply_green_plane_numeric: unresolved mass");
  return out;
}

namespace {

std::vector<SpectrumRow> spectrum_scan_impl(const QContext &ctx, int s,
                                            int j_lo, int j_hi,
                                            bool parallel) {
  const std::vector<int> ts = resolvable_t(ctx, s, j_lo, j_hi);
  std::vector<SpectrumRow> rows(ts.size());
  std::string err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (size_t i = 0; i < ts.size(); ++i) {
    try {
      const int t = ts[i];
      SpectrumRow r;
      r.t = t;
      const EigenCheck ec = eigensolve_check(ctx, t, s);
      r.eigenvalue = ec.eigenvalue;
      r.overlap = ec.overlap;
      const EtsVector e = ets_vector(ctx, t, s, j_lo, j_hi, 1.0);
      r.residual = ets_eigen_residual(ctx, e);
      rows[i] = r;
    } catch (const std::exception &ex) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (err.empty())
        err = ex.what();
    }
  }
  if (!err.empty())
    throw ResolutionError("spectrum_scan: " + err);
  return rows;
}

} // namespace

std::vector<SpectrumRow> spectrum_scan(const QContext &ctx, int s, int j_lo,
                                       int j_hi) {
  return spectrum_scan_impl(ctx, s, j_lo, j_hi, true);
}

std::vector<SpectrumRow> spectrum_scan_serial(const QContext &ctx, int s,
                                              int j_lo, int j_hi) {
  return spectrum_scan_impl(ctx, s, j_lo, j_hi, false);
}

} // namespace qplane
