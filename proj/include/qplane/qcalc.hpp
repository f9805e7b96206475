#pragma once
#include "qplane/lattice.hpp"

namespace qplane {

// q-calculus kernel on the q^2-lattice.  All operations are pure; operators
// record how many edge points they consume (results live on the shrunk
// window, never on boundary garbage).

//! Jackson integral (1-q^2) sum_j q^(2j) f(rho_j) over the window.
//! truncation_estimate extrapolates both end tails geometrically; a growing
//! tail at the j -> -inf (rho -> inf) end raises DivergenceError when the
//! function is declared Unrestricted.
WeightedPairing jackson_integral(const QContext &ctx, const RadialFunction &f);

//! Scalar product (f,g)_A = (1-q^2) sum_j q^(2j) conj(f) g on H.
WeightedPairing pairing_H(const QContext &ctx, const RadialFunction &f,
                          const RadialFunction &g);

//! (D+ f)(rho_j) = (f(rho_j) - f(rho_{j+1})) / ((1-q^2) rho_j).
//! Consumes the small-rho edge (output window j_min .. j_max-1).
RadialFunction d_plus(const QContext &ctx, const RadialFunction &f);

//! (D- f)(rho_j) = (f(rho_j) - f(rho_{j-1})) / ((1-q^-2) rho_j).
//! Consumes the large-rho edge (output window j_min+1 .. j_max).
RadialFunction d_minus(const QContext &ctx, const RadialFunction &f);

//! box f = D- ( rho . D+ f ); shrinks the window by one point at each end.
RadialFunction box(const QContext &ctx, const RadialFunction &f);

//! box via the expanded stencil -(2 f_j - f_{j+1} - f_{j-1})/((q-1/q)^2 rho_j).
//! Kept as the independent route for the product-rule consistency check.
RadialFunction box_stencil(const QContext &ctx, const RadialFunction &f);

//! (delta, f)_A = f(0).
Complex delta_pairing(const QContext &ctx, const RadialFunction &f);

//! (g, box f)_A evaluated through pairing_H on the common surviving window.
//! With g = log rho this converges to (2 q ln q)/(q - 1/q) f(0).
WeightedPairing weak_box_pairing(const QContext &ctx, const RadialFunction &g,
                                 const RadialFunction &f);

//! log(rho_j) sampled as (2 ln q) * j — exactly linear in the index.
RadialFunction log_rho(const QContext &ctx, const QLattice &lat);

//! The closed-form factor (2 q ln q)/(q - q^-1) of the weak delta identity.
double weak_delta_factor(const QContext &ctx);

} // namespace qplane
