#include "qplane/eq2.hpp"

#include <algorithm>
#include <cmath>

#include "qplane/qcalc.hpp"

namespace qplane {

namespace {
constexpr double kTwoPi = 6.283185307179586477;
double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0)
    r += kTwoPi;
  return r;
}
} // namespace

PhaseParams::PhaseParams(double psi_, double phi_)
    : psi(wrap_angle(psi_)), phi(wrap_angle(phi_)) {}

// --- BandOperator -----------------------------------------------------------

BandOperator::BandOperator(int lo, int hi) : lo_(lo), hi_(hi) {
  if (lo >= hi)
    throw DomainError("BandOperator: empty window");
}

BandOperator BandOperator::identity(int lo, int hi) {
  BandOperator I(lo, hi);
  I.set_band(0, std::vector<Complex>(static_cast<size_t>(hi - lo + 1),
                                     Complex{1.0, 0.0}));
  return I;
}

void BandOperator::clip_band(int k, std::vector<Complex> &c) const {
  for (int j = lo_; j <= hi_; ++j)
    if (j + k < lo_ || j + k > hi_)
      c[static_cast<size_t>(j - lo_)] = Complex{0.0, 0.0};
}

void BandOperator::set_band(int k, std::vector<Complex> coeffs) {
  if (coeffs.size() != static_cast<size_t>(size()))
    throw DomainError("BandOperator::set_band: wrong length");
  clip_band(k, coeffs);
  bool nonzero = false;
  for (const Complex &v : coeffs)
    if (v != Complex{0.0, 0.0}) {
      nonzero = true;
      break;
    }
  if (nonzero)
    bands_[k] = std::move(coeffs);
  else
    bands_.erase(k);
}

const std::vector<Complex> *BandOperator::band(int k) const {
  auto it = bands_.find(k);
  return it == bands_.end() ? nullptr : &it->second;
}

Complex BandOperator::entry(int row, int col) const {
  if (row < lo_ || row > hi_ || col < lo_ || col > hi_)
    return {0.0, 0.0};
  const std::vector<Complex> *b = band(row - col);
  return b ? (*b)[static_cast<size_t>(col - lo_)] : Complex{0.0, 0.0};
}

BandOperator BandOperator::operator+(const BandOperator &o) const {
  if (lo_ != o.lo_ || hi_ != o.hi_)
    throw WindowError("BandOperator: window mismatch");
  BandOperator r(lo_, hi_);
  r.bands_ = bands_;
  for (const auto &[k, c] : o.bands_) {
    auto it = r.bands_.find(k);
    if (it == r.bands_.end())
      r.bands_[k] = c;
    else
      for (size_t i = 0; i < c.size(); ++i)
        it->second[i] += c[i];
  }
  return r;
}

BandOperator BandOperator::operator-(const BandOperator &o) const {
  return *this + o.scaled(Complex{-1.0, 0.0});
}

BandOperator BandOperator::scaled(Complex a) const {
  BandOperator r(lo_, hi_);
  r.bands_ = bands_;
  for (auto &[k, c] : r.bands_)
    for (Complex &v : c)
      v *= a;
  return r;
}

BandOperator BandOperator::operator*(const BandOperator &o) const {
  // (this . o) e_j : o shifts first
  if (lo_ != o.lo_ || hi_ != o.hi_)
    throw WindowError("BandOperator: window mismatch");
  BandOperator r(lo_, hi_);
  std::map<int, std::vector<Complex>> acc;
  for (const auto &[kb, cb] : o.bands_)
    for (const auto &[ka, ca] : bands_) {
      const int k = ka + kb;
      auto &dst = acc
                      .try_emplace(k, std::vector<Complex>(
                                          static_cast<size_t>(size()),
                                          Complex{0.0, 0.0}))
                      .first->second;
      for (int j = lo_; j <= hi_; ++j) {
        const int mid = j + kb;
        if (mid < lo_ || mid > hi_)
          continue; // truncated intermediate
        dst[static_cast<size_t>(j - lo_)] +=
            ca[static_cast<size_t>(mid - lo_)] *
            cb[static_cast<size_t>(j - lo_)];
      }
    }
  for (auto &[k, c] : acc)
    r.set_band(k, std::move(c));
  return r;
}

BandOperator BandOperator::adjoint() const {
  BandOperator r(lo_, hi_);
  for (const auto &[k, c] : bands_) {
    std::vector<Complex> a(static_cast<size_t>(size()), Complex{0.0, 0.0});
    // A e_j has c_k(j) at row j+k  =>  A* e_{j+k} has conj at row j
    for (int j = lo_; j <= hi_; ++j) {
      const int src = j + k;
      if (src < lo_ || src > hi_)
        continue;
      a[static_cast<size_t>(src - lo_)] =
          std::conj(c[static_cast<size_t>(j - lo_)]);
    }
    r.set_band(-k, std::move(a));
  }
  return r;
}

std::vector<Complex> BandOperator::apply(const std::vector<Complex> &v) const {
  if (v.size() != static_cast<size_t>(size()))
    throw DomainError("BandOperator::apply: length mismatch");
  std::vector<Complex> out(v.size(), Complex{0.0, 0.0});
  for (const auto &[k, c] : bands_)
    for (int j = lo_; j <= hi_; ++j) {
      const int tgt = j + k;
      if (tgt < lo_ || tgt > hi_)
        continue;
      out[static_cast<size_t>(tgt - lo_)] +=
          c[static_cast<size_t>(j - lo_)] * v[static_cast<size_t>(j - lo_)];
    }
  return out;
}

double BandOperator::interior_abs_max(int margin) const {
  double m = 0.0;
  for (const auto &[k, c] : bands_)
    for (int j = lo_ + margin; j <= hi_ - margin; ++j) {
      const int tgt = j + k;
      if (tgt < lo_ + margin || tgt > hi_ - margin)
        continue;
      m = std::max(m, std::abs(c[static_cast<size_t>(j - lo_)]));
    }
  return m;
}

// --- generators and relations ----------------------------------------------

Generators build_generators(const QContext &ctx, const TruncatedBasis &basis,
                            const PhaseParams &phases) {
  const int lo = -basis.L, hi = basis.L;
  const size_t n = static_cast<size_t>(hi - lo + 1);
  const Complex eips = std::polar(1.0, phases.psi);
  const Complex eiph = std::polar(1.0, phases.phi);

  std::vector<Complex> zd(n), zsd(n), ud(n, eiph), usd(n, std::conj(eiph));
  for (int j = lo; j <= hi; ++j) {
    const double qj = std::exp(j * ctx.ln_q());
    zd[static_cast<size_t>(j - lo)] = eips * qj;
    zsd[static_cast<size_t>(j - lo)] = std::conj(eips) * qj;
  }
  Generators g{BandOperator(lo, hi), BandOperator(lo, hi),
               BandOperator(lo, hi), BandOperator(lo, hi)};
  g.z.set_band(0, std::move(zd));
  g.z_star.set_band(0, std::move(zsd));
  g.u.set_band(1, std::move(ud));
  g.u_star.set_band(-1, std::move(usd));
  return g;
}

double RelationReport::max_relative() const {
  double m = 0.0;
  for (const auto &it : items)
    m = std::max(m, it.scale > 0.0 ? it.deviation / it.scale : it.deviation);
  return m;
}

RelationReport check_relations(const QContext &ctx, const Generators &g,
                               const TruncatedBasis &basis) {
  const Complex q{ctx.q(), 0.0};
  const int margin = std::max(basis.margin, 1);
  RelationReport rep;
  auto add = [&](const std::string &name, const BandOperator &lhs,
                 const BandOperator &rhs) {
    rep.items.push_back({name, (lhs - rhs).interior_abs_max(margin),
                         std::max(lhs.interior_abs_max(margin),
                                  rhs.interior_abs_max(margin))});
  };
  add("z.u - q.u.z", g.z * g.u, (g.u * g.z).scaled(q));
  add("z*.u - q.u.z*", g.z_star * g.u, (g.u * g.z_star).scaled(q));
  add("z.z* - z*.z", g.z * g.z_star, g.z_star * g.z);
  add("u*.u - 1", g.u_star * g.u,
      BandOperator::identity(-basis.L, basis.L));
  return rep;
}

WeightedPairing scalar_product_A(const QContext &ctx, const BandOperator &F,
                                 const BandOperator &G) {
  if (F.lo() != G.lo() || F.hi() != G.hi())
    throw WindowError("scalar_product_A: window mismatch");
  const int lo = F.lo(), hi = F.hi();
  // assemble the diagonal <F e_j, G e_j> and reuse the Jackson machinery
  // (same code path as pairing_H: radial operators reduce bit-for-bit, and
  // the j -> -inf membership check of Eq.-(1) type fires on growth)
  const QLattice lat(ctx, lo, hi);
  std::vector<Complex> dots(static_cast<size_t>(hi - lo + 1));
  for (int j = lo; j <= hi; ++j) {
    Complex dot{0.0, 0.0};
    for (const auto &[k, c] : F.bands()) {
      const std::vector<Complex> *gb = G.band(k);
      if (!gb)
        continue;
      dot += std::conj(c[static_cast<size_t>(j - lo)]) *
             (*gb)[static_cast<size_t>(j - lo)];
    }
    dots[static_cast<size_t>(j - lo)] = dot;
  }
  try {
    return jackson_integral(
        ctx, RadialFunction(lat, std::move(dots), DecayClass::Unrestricted));
  } catch (const DivergenceError &) {
    throw DivergenceError(
        "scalar_product_A: weighted diagonal grows at the j -> -inf edge");
  }
}

// --- TensorBandOperator ------------------------------------------------------

TensorBandOperator::TensorBandOperator(int lo, int hi) : lo_(lo), hi_(hi) {
  if (lo >= hi)
    throw DomainError("TensorBandOperator: empty window");
}

void TensorBandOperator::clip_band(int da, int db,
                                   std::vector<Complex> &c) const {
  for (int a = lo_; a <= hi_; ++a)
    for (int b = lo_; b <= hi_; ++b)
      if (a + da < lo_ || a + da > hi_ || b + db < lo_ || b + db > hi_)
        c[idx(a, b)] = Complex{0.0, 0.0};
}

void TensorBandOperator::set_band(int da, int db, std::vector<Complex> coeffs) {
  if (coeffs.size() != static_cast<size_t>(n()) * static_cast<size_t>(n()))
    throw DomainError("TensorBandOperator::set_band: wrong length");
  clip_band(da, db, coeffs);
  bool nonzero = false;
  for (const Complex &v : coeffs)
    if (v != Complex{0.0, 0.0}) {
      nonzero = true;
      break;
    }
  if (nonzero)
    bands_[{da, db}] = std::move(coeffs);
  else
    bands_.erase({da, db});
}

const std::vector<Complex> *TensorBandOperator::band(int da, int db) const {
  auto it = bands_.find({da, db});
  return it == bands_.end() ? nullptr : &it->second;
}

Complex TensorBandOperator::coeff(int da, int db, int a, int b) const {
  const std::vector<Complex> *c = band(da, db);
  if (!c || a < lo_ || a > hi_ || b < lo_ || b > hi_)
    return {0.0, 0.0};
  return (*c)[idx(a, b)];
}

TensorBandOperator
TensorBandOperator::operator+(const TensorBandOperator &o) const {
  if (lo_ != o.lo_ || hi_ != o.hi_)
    throw WindowError("TensorBandOperator: window mismatch");
  TensorBandOperator r(lo_, hi_);
  r.bands_ = bands_;
  for (const auto &[k, c] : o.bands_) {
    auto it = r.bands_.find(k);
    if (it == r.bands_.end())
      r.bands_[k] = c;
    else
      for (size_t i = 0; i < c.size(); ++i)
        it->second[i] += c[i];
  }
  return r;
}

TensorBandOperator
TensorBandOperator::operator-(const TensorBandOperator &o) const {
  return *this + o.scaled(Complex{-1.0, 0.0});
}

TensorBandOperator TensorBandOperator::scaled(Complex s) const {
  TensorBandOperator r(lo_, hi_);
  r.bands_ = bands_;
  for (auto &[k, c] : r.bands_)
    for (Complex &v : c)
      v *= s;
  return r;
}

TensorBandOperator
TensorBandOperator::operator*(const TensorBandOperator &o) const {
  if (lo_ != o.lo_ || hi_ != o.hi_)
    throw WindowError("TensorBandOperator: window mismatch");
  TensorBandOperator r(lo_, hi_);
  std::map<std::pair<int, int>, std::vector<Complex>> acc;
  const size_t nn = static_cast<size_t>(n()) * static_cast<size_t>(n());
  for (const auto &[kb, cb] : o.bands_)
    for (const auto &[ka, ca] : bands_) {
      const std::pair<int, int> k{ka.first + kb.first, ka.second + kb.second};
      auto &dst =
          acc.try_emplace(k, std::vector<Complex>(nn, Complex{0.0, 0.0}))
              .first->second;
      for (int a = lo_; a <= hi_; ++a)
        for (int b = lo_; b <= hi_; ++b) {
          const int ma = a + kb.first, mb = b + kb.second;
          if (ma < lo_ || ma > hi_ || mb < lo_ || mb > hi_)
            continue;
          dst[idx(a, b)] += ca[idx(ma, mb)] * cb[idx(a, b)];
        }
    }
  for (auto &[k, c] : acc)
    r.set_band(k.first, k.second, std::move(c));
  return r;
}

TensorBandOperator TensorBandOperator::adjoint() const {
  TensorBandOperator r(lo_, hi_);
  for (const auto &[k, c] : bands_) {
    std::vector<Complex> a(c.size(), Complex{0.0, 0.0});
    for (int aa = lo_; aa <= hi_; ++aa)
      for (int bb = lo_; bb <= hi_; ++bb) {
        const int sa = aa + k.first, sb = bb + k.second;
        if (sa < lo_ || sa > hi_ || sb < lo_ || sb > hi_)
          continue;
        a[idx(sa, sb)] = std::conj(c[idx(aa, bb)]);
      }
    r.set_band(-k.first, -k.second, std::move(a));
  }
  return r;
}

double TensorBandOperator::interior_abs_max(int margin) const {
  double m = 0.0;
  for (const auto &[k, c] : bands_)
    for (int a = lo_ + margin; a <= hi_ - margin; ++a)
      for (int b = lo_ + margin; b <= hi_ - margin; ++b) {
        const int ta = a + k.first, tb = b + k.second;
        if (ta < lo_ + margin || ta > hi_ - margin || tb < lo_ + margin ||
            tb > hi_ - margin)
          continue;
        m = std::max(m, std::abs(c[idx(a, b)]));
      }
  return m;
}

TensorBandOperator tensor_product(const BandOperator &A,
                                  const BandOperator &B) {
  if (A.lo() != B.lo() || A.hi() != B.hi())
    throw WindowError("tensor_product: factor windows differ");
  TensorBandOperator r(A.lo(), A.hi());
  const int lo = A.lo(), hi = A.hi();
  const size_t n = static_cast<size_t>(hi - lo + 1);
  for (const auto &[ka, ca] : A.bands())
    for (const auto &[kb, cb] : B.bands()) {
      std::vector<Complex> c(n * n, Complex{0.0, 0.0});
      for (int a = lo; a <= hi; ++a)
        for (int b = lo; b <= hi; ++b)
          c[static_cast<size_t>(a - lo) * n + static_cast<size_t>(b - lo)] =
              ca[static_cast<size_t>(a - lo)] * cb[static_cast<size_t>(b - lo)];
      // accumulate (distinct (ka,kb) pairs are distinct tensor bands)
      r.set_band(ka, kb, std::move(c));
    }
  return r;
}

CoproductOps build_coproduct_ops(const QContext &ctx,
                                 const TruncatedBasis &basis,
                                 const PhaseParams &phases) {
  const Generators g = build_generators(ctx, basis, phases);
  CoproductOps ops{
      tensor_product(g.z, g.u_star) + tensor_product(g.u, g.z),
      TensorBandOperator(-basis.L, basis.L),
      tensor_product(g.u, g.u),
      TensorBandOperator(-basis.L, basis.L),
  };
  ops.Z_star = ops.Z.adjoint();
  ops.V_star = ops.V.adjoint();
  return ops;
}

TensorBandOperator delta_rho(const QContext &ctx, const TruncatedBasis &basis,
                             const PhaseParams &phases) {
  const Generators g = build_generators(ctx, basis, phases);
  const TensorBandOperator t1 =
      tensor_product(g.z * g.z_star, BandOperator::identity(-basis.L, basis.L));
  const TensorBandOperator t2 =
      tensor_product(BandOperator::identity(-basis.L, basis.L), g.z * g.z_star);
  const TensorBandOperator t3 =
      tensor_product(g.u * g.z_star, g.z * g.u);
  const TensorBandOperator t4 =
      tensor_product(g.z * g.u_star, g.u_star * g.z_star);
  return t1 + t2 + t3 + t4;
}

RelationReport check_coproduct_relations(const QContext &ctx,
                                         const CoproductOps &ops,
                                         const TruncatedBasis &basis) {
  const Complex q{ctx.q(), 0.0};
  const int margin = std::max(basis.margin, 1);
  RelationReport rep;
  auto add = [&](const std::string &name, const TensorBandOperator &lhs,
                 const TensorBandOperator &rhs) {
    rep.items.push_back({name, (lhs - rhs).interior_abs_max(margin),
                         std::max(lhs.interior_abs_max(margin),
                                  rhs.interior_abs_max(margin))});
  };
  add("Z.V - q.V.Z", ops.Z * ops.V, (ops.V * ops.Z).scaled(q));
  add("Z*.V - q.V.Z*", ops.Z_star * ops.V, (ops.V * ops.Z_star).scaled(q));
  add("Z.Z* - Z*.Z", ops.Z * ops.Z_star, ops.Z_star * ops.Z);
  return rep;
}

Complex tensor_pairing(const QContext &ctx, const TensorBandOperator &A,
                       const TensorBandOperator &B) {
  if (A.lo() != B.lo() || A.hi() != B.hi())
    throw WindowError("tensor_pairing: window mismatch");
  const int lo = A.lo(), hi = A.hi();
  const size_t n = static_cast<size_t>(hi - lo + 1);
  Complex acc{0.0, 0.0};
  std::vector<double> w(n);
  {
    double q2j = std::exp(2.0 * lo * ctx.ln_q());
    for (size_t i = 0; i < n; ++i) {
      w[i] = q2j;
      q2j *= ctx.q2();
    }
  }
  for (const auto &[k, c] : A.bands()) {
    const std::vector<Complex> *cb = B.band(k.first, k.second);
    if (!cb)
      continue;
    for (int a = lo; a <= hi; ++a)
      for (int b = lo; b <= hi; ++b) {
        const size_t i =
            static_cast<size_t>(a - lo) * n + static_cast<size_t>(b - lo);
        acc += w[static_cast<size_t>(a - lo)] * w[static_cast<size_t>(b - lo)] *
               std::conj(c[i]) * (*cb)[i];
      }
  }
  const double c2 = (1.0 - ctx.q2()) * (1.0 - ctx.q2());
  return c2 * acc;
}

// --- GradedElement ----------------------------------------------------------

GradedElement GradedElement::monomial(int m, int j, RadialFunction g) {
  GradedElement F;
  F.comps_.emplace(Key{m, j}, std::move(g));
  return F;
}

void GradedElement::add_component(int m, int j, const RadialFunction &g) {
  auto it = comps_.find(Key{m, j});
  if (it == comps_.end()) {
    comps_.emplace(Key{m, j}, g);
    return;
  }
  // merge on the window intersection
  const QLattice &la = it->second.lattice();
  const QLattice &lb = g.lattice();
  const int lo = std::max(la.j_min(), lb.j_min());
  const int hi = std::min(la.j_max(), lb.j_max());
  if (lo >= hi)
    throw WindowError("GradedElement::add_component: disjoint windows");
  QLattice lat = la.shrunk(lo - la.j_min(), la.j_max() - hi);
  std::vector<Complex> s(static_cast<size_t>(lat.size()));
  for (int l = lo; l <= hi; ++l)
    s[static_cast<size_t>(l - lo)] = it->second.at(l) + g.at(l);
  comps_.erase(it);
  comps_.emplace(Key{m, j}, RadialFunction(lat, std::move(s),
                                           DecayClass::Summable));
}

GradedElement GradedElement::scaled(Complex a) const {
  GradedElement r;
  for (const auto &[key, g] : comps_) {
    std::vector<Complex> s(static_cast<size_t>(g.lattice().size()));
    for (int l = g.lattice().j_min(); l <= g.lattice().j_max(); ++l)
      s[static_cast<size_t>(l - g.lattice().j_min())] = a * g.at(l);
    r.comps_.emplace(key, RadialFunction(g.lattice(), std::move(s),
                                         g.decay_class()));
  }
  return r;
}

GradedElement GradedElement::plus(const GradedElement &o) const {
  GradedElement r = *this;
  for (const auto &[key, g] : o.comps_)
    r.add_component(key.first, key.second, g);
  return r;
}

GradedElement sigma_twist(const GradedElement &F, double t, int which) {
  GradedElement r;
  for (const auto &[key, g] : F.comps()) {
    const int grade = which == 1 ? sigma1_grade(key.first, key.second)
                                 : sigma2_grade(key.first, key.second);
    const Complex ph = std::polar(1.0, t * grade);
    r = r.plus(GradedElement::monomial(key.first, key.second, g).scaled(ph));
  }
  return r;
}

GradedElement project_B(const GradedElement &F) {
  GradedElement r;
  for (const auto &[key, g] : F.comps())
    if (sigma1_grade(key.first, key.second) == 0)
      r.add_component(key.first, key.second, g);
  return r;
}

GradedElement project_H(const GradedElement &F) {
  GradedElement r;
  for (const auto &[key, g] : F.comps())
    if (key.first == 0 && key.second == 0)
      r.add_component(key.first, key.second, g);
  return r;
}

namespace {

// D^z_+ on the component (m, g): grade m-1; consumes the small-rho edge.
RadialFunction dz_plus_coeff(const QContext &ctx, int m,
                             const RadialFunction &g) {
  const QLattice &lat = g.lattice();
  if (lat.size() < 3)
    throw WindowError("rep_L: radial window exhausted (D^z_+)");
  QLattice out = lat.shrunk(0, 1);
  std::vector<Complex> s(static_cast<size_t>(out.size()));
  if (m >= 1) {
    const double q2m = std::exp(2.0 * m * ctx.ln_q());
    const double c = 1.0 - ctx.q2();
    for (int l = out.j_min(); l <= out.j_max(); ++l)
      s[static_cast<size_t>(l - out.j_min())] =
          (g.at(l) - q2m * g.at(l + 1)) / c;
  } else {
    const double c = 1.0 - ctx.q2();
    for (int l = out.j_min(); l <= out.j_max(); ++l)
      s[static_cast<size_t>(l - out.j_min())] =
          (g.at(l) - g.at(l + 1)) / (c * out.point(l));
  }
  return RadialFunction(out, std::move(s), g.decay_class());
}

// D^{z*}_- on the component (m, g): grade m+1; consumes the large-rho edge.
RadialFunction dzs_minus_coeff(const QContext &ctx, int m,
                               const RadialFunction &g) {
  const QLattice &lat = g.lattice();
  if (lat.size() < 3)
    throw WindowError("rep_L: radial window exhausted (D^{z*}_-)");
  QLattice out = lat.shrunk(1, 0);
  std::vector<Complex> s(static_cast<size_t>(out.size()));
  if (m <= -1) {
    const double q2m = std::exp(2.0 * m * ctx.ln_q());
    const double c = 1.0 - ctx.inv_q2();
    for (int l = out.j_min(); l <= out.j_max(); ++l)
      s[static_cast<size_t>(l - out.j_min())] =
          (g.at(l) - q2m * g.at(l - 1)) / c;
  } else {
    const double c = 1.0 - ctx.inv_q2();
    for (int l = out.j_min(); l <= out.j_max(); ++l)
      s[static_cast<size_t>(l - out.j_min())] =
          (g.at(l) - g.at(l - 1)) / (c * out.point(l));
  }
  return RadialFunction(out, std::move(s), g.decay_class());
}

RadialFunction scaled_rf(const RadialFunction &g, Complex a) {
  std::vector<Complex> s(static_cast<size_t>(g.lattice().size()));
  for (int l = g.lattice().j_min(); l <= g.lattice().j_max(); ++l)
    s[static_cast<size_t>(l - g.lattice().j_min())] = a * g.at(l);
  return RadialFunction(g.lattice(), std::move(s), g.decay_class());
}

} // namespace

GradedElement rep_L(const QContext &ctx, UqGen gen, const GradedElement &F) {
  GradedElement out;
  for (const auto &[key, g] : F.comps()) {
    const int m = key.first, j = key.second;
    switch (gen) {
    case UqGen::P: {
      // i q^{j+1} D^z_+ f u^{j+1}
      const Complex pref = Complex{0.0, 1.0} * std::exp((j + 1) * ctx.ln_q());
      out.add_component(m - 1, j + 1,
                        scaled_rf(dz_plus_coeff(ctx, m, g), pref));
      break;
    }
    case UqGen::PStar: {
      // i q^{j} D^{z*}_- f u^{j-1}
      const Complex pref = Complex{0.0, 1.0} * std::exp(j * ctx.ln_q());
      out.add_component(m + 1, j - 1,
                        scaled_rf(dzs_minus_coeff(ctx, m, g), pref));
      break;
    }
    case UqGen::Kappa:
      out.add_component(m, j,
                        scaled_rf(g, Complex{std::exp((j - m) * ctx.ln_q()), 0.0}));
      break;
    case UqGen::KappaInv:
      out.add_component(m, j,
                        scaled_rf(g, Complex{std::exp((m - j) * ctx.ln_q()), 0.0}));
      break;
    }
  }
  return out;
}

GradedElement casimir_L(const QContext &ctx, const GradedElement &F) {
  return rep_L(ctx, UqGen::KappaInv, rep_L(ctx, UqGen::P, rep_L(ctx, UqGen::PStar, F)))
      .scaled(Complex{-1.0, 0.0});
}

BandOperator realize(const QContext &ctx, const GradedElement &F,
                     const TruncatedBasis &basis, const PhaseParams &phases) {
  const int lo = -basis.L, hi = basis.L;
  BandOperator op(lo, hi);
  std::map<int, std::vector<Complex>> acc;
  for (const auto &[key, g] : F.comps()) {
    const int m = key.first, j = key.second;
    auto &dst = acc
                    .try_emplace(j, std::vector<Complex>(
                                        static_cast<size_t>(hi - lo + 1),
                                        Complex{0.0, 0.0}))
                    .first->second;
    const Complex ph = std::polar(1.0, m * phases.psi + j * phases.phi);
    const int am = std::abs(m);
    for (int a = lo; a <= hi; ++a) {
      const int tgt = a + j;
      if (tgt < lo || tgt > hi)
        continue; // truncated
      if (!g.lattice().contains(tgt))
        throw WindowError("realize: radial coefficient window too small");
      const double qpow = std::exp(am * tgt * ctx.ln_q());
      dst[static_cast<size_t>(a - lo)] += ph * qpow * g.at(tgt);
    }
  }
  for (auto &[k, c] : acc)
    op.set_band(k, std::move(c));
  return op;
}

GradedDiff graded_diff(const GradedElement &A, const GradedElement &B,
                       int margin) {
  GradedDiff d;
  auto scan = [&](const GradedElement &X, const GradedElement &Y, bool diff) {
    for (const auto &[key, g] : X.comps()) {
      const auto it = Y.comps().find(key);
      const int lo = g.lattice().j_min() + margin;
      const int hi = g.lattice().j_max() - margin;
      for (int l = lo; l <= hi; ++l) {
        const Complex a = g.at(l);
        d.scale = std::max(d.scale, std::abs(a));
        if (diff) {
          Complex b{0.0, 0.0};
          if (it != Y.comps().end() && it->second.lattice().contains(l))
            b = it->second.at(l);
          d.abs_diff = std::max(d.abs_diff, std::abs(a - b));
        }
      }
    }
  };
  scan(A, B, true);
  scan(B, A, true);
  // the scale pass above already accumulated both sides
  return d;
}

} // namespace qplane
