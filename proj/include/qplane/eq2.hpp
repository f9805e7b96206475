#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qplane/lattice.hpp"

namespace qplane {

//! Basis window e_{-L}..e_L of l^2(Z) with an interior margin: relation and
//! adjoint claims are exact only on indices at least `margin` away from the
//! window edge (the truncated shift drops the image of e_L).
struct TruncatedBasis {
  int L = 40;
  int margin = 1;
};

//! Classical phase variables psi, phi (stored mod 2pi).
struct PhaseParams {
  PhaseParams(double psi_ = 0.0, double phi_ = 0.0);
  double psi = 0.0;
  double phi = 0.0;
};

//! Banded operator on the windowed basis: A e_j = sum_k c_k(j) e_{j+k}.
//! Entries whose target leaves the window are identically zero (truncation).
class BandOperator {
public:
  BandOperator(int lo, int hi);
  static BandOperator identity(int lo, int hi);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int size() const { return hi_ - lo_ + 1; }

  //! Register band k from per-source coefficients (index j - lo).
  void set_band(int k, std::vector<Complex> coeffs);
  const std::vector<Complex> *band(int k) const;
  const std::map<int, std::vector<Complex>> &bands() const { return bands_; }

  Complex entry(int row, int col) const; // <e_row, A e_col>

  BandOperator operator+(const BandOperator &o) const;
  BandOperator operator-(const BandOperator &o) const;
  BandOperator operator*(const BandOperator &o) const; // composition
  BandOperator scaled(Complex a) const;
  BandOperator adjoint() const;
  std::vector<Complex> apply(const std::vector<Complex> &v) const;

  //! max |entry| over rows and columns in [lo+margin, hi-margin].
  double interior_abs_max(int margin) const;

private:
  int lo_, hi_;
  std::map<int, std::vector<Complex>> bands_;
  void clip_band(int k, std::vector<Complex> &c) const;
};

struct Generators {
  BandOperator z, z_star, u, u_star; // u is the unitary shift upsilon
};

//! z e_j = e^{i psi} q^j e_j; u e_j = e^{i phi} e_{j+1} (truncated at e_L).
Generators build_generators(const QContext &ctx, const TruncatedBasis &basis,
                            const PhaseParams &phases);

struct RelationReport {
  struct Item {
    std::string name;
    double deviation; // interior abs max of LHS - RHS
    double scale;     // interior abs max of the operands
  };
  std::vector<Item> items;
  double max_relative() const;
};

//! z u = q u z, z* u = q u z*, z z* = z* z on the interior.
RelationReport check_relations(const QContext &ctx, const Generators &g,
                               const TruncatedBasis &basis);

//! (F,G)_A = (1-q^2) sum_j q^(2j) <F e_j, G e_j>.  Throws DivergenceError
//! when the weighted diagonal grows at the j -> -inf edge.
WeightedPairing scalar_product_A(const QContext &ctx, const BandOperator &F,
                                 const BandOperator &G);

// --- tensor layer ---------------------------------------------------------

//! Banded operator on the tensor window: A e_{a,b} = sum c(a,b) e_{a+da,b+db}.
class TensorBandOperator {
public:
  TensorBandOperator(int lo, int hi);
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int n() const { return hi_ - lo_ + 1; }

  void set_band(int da, int db, std::vector<Complex> coeffs); // (a,b) row-major
  const std::vector<Complex> *band(int da, int db) const;
  const std::map<std::pair<int, int>, std::vector<Complex>> &bands() const {
    return bands_;
  }
  Complex coeff(int da, int db, int a, int b) const;

  TensorBandOperator operator+(const TensorBandOperator &o) const;
  TensorBandOperator operator-(const TensorBandOperator &o) const;
  TensorBandOperator operator*(const TensorBandOperator &o) const;
  TensorBandOperator scaled(Complex s) const;
  TensorBandOperator adjoint() const;
  double interior_abs_max(int margin) const;

private:
  int lo_, hi_;
  std::map<std::pair<int, int>, std::vector<Complex>> bands_;
  size_t idx(int a, int b) const {
    return static_cast<size_t>(a - lo_) * static_cast<size_t>(n()) +
           static_cast<size_t>(b - lo_);
  }
  void clip_band(int da, int db, std::vector<Complex> &c) const;
};

//! A (x) B on the square window of the factors (factors must share windows).
TensorBandOperator tensor_product(const BandOperator &A, const BandOperator &B);

struct CoproductOps {
  TensorBandOperator Z, Z_star, V, V_star;
};

//! Z = z (x) u^-1 + u (x) z,  V = u (x) u.
CoproductOps build_coproduct_ops(const QContext &ctx,
                                 const TruncatedBasis &basis,
                                 const PhaseParams &phases);

//! R = Delta(rho) = rho(x)1 + 1(x)rho + u z*(x) z u + z u*(x) u* z*,
//! assembled from generator products.
TensorBandOperator delta_rho(const QContext &ctx, const TruncatedBasis &basis,
                             const PhaseParams &phases);

RelationReport check_coproduct_relations(const QContext &ctx,
                                         const CoproductOps &ops,
                                         const TruncatedBasis &basis);

//! (F1 (x) F2, F3 (x) F4)_A computed as the genuine 2-D weighted trace.
Complex tensor_pairing(const QContext &ctx, const TensorBandOperator &A,
                       const TensorBandOperator &B);

// --- graded elements and the U_q(e(2)) representation ----------------------

//! Element of A as a finite sum of homogeneous components z^m g(rho) u^j
//! (z*^{|m|} for m < 0); the radial coefficient lives on its own lattice
//! window, shrunk by the q-shift operators as they consume edges.
class GradedElement {
public:
  using Key = std::pair<int, int>; // (m: z-grade, j: upsilon power)

  GradedElement() = default;
  static GradedElement monomial(int m, int j, RadialFunction g);
  static GradedElement radial(RadialFunction g) {
    return monomial(0, 0, std::move(g));
  }

  const std::map<Key, RadialFunction> &comps() const { return comps_; }
  bool empty() const { return comps_.empty(); }
  void add_component(int m, int j, const RadialFunction &g); // merges

  GradedElement scaled(Complex a) const;
  GradedElement plus(const GradedElement &o) const;

private:
  std::map<Key, RadialFunction> comps_;
};

inline int sigma1_grade(int m, int j) { return m - j; }
inline int sigma2_grade(int m, int /*j*/) { return m; }

//! Twist by sigma_1 or sigma_2 at angle t (componentwise phase).
GradedElement sigma_twist(const GradedElement &F, double t, int which);
GradedElement project_B(const GradedElement &F); // keeps sigma1-grade 0
GradedElement project_H(const GradedElement &F); // keeps m = j = 0

enum class UqGen { P, PStar, Kappa, KappaInv };

//! The representation L of U_q(e(2)):
//!   L(p)  f u^j = i q^{j+1} D^z_+ f  u^{j+1}
//!   L(p*) f u^j = i q^j    D^{z*}_- f u^{j-1}
//!   L(kappa) f u^j = q^j f(q^{-1} z, q z*) u^j
//! Division by z on grade <= 0 realizes as z* rho^{-1} (lattice points > 0).
GradedElement rep_L(const QContext &ctx, UqGen gen, const GradedElement &F);

//! L(C) = -L(kappa^{-1}) L(p) L(p*); restricts to box on radial elements.
GradedElement casimir_L(const QContext &ctx, const GradedElement &F);

//! Matrix realization z^m g(rho) u^j on the windowed basis.
BandOperator realize(const QContext &ctx, const GradedElement &F,
                     const TruncatedBasis &basis, const PhaseParams &phases);

//! max |A - B| over common components/interior samples, and the shared scale.
struct GradedDiff {
  double abs_diff = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? abs_diff / scale : 0.0; }
};
GradedDiff graded_diff(const GradedElement &A, const GradedElement &B,
                       int margin = 0);

} // namespace qplane
