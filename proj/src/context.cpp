#include "qplane/context.hpp"

namespace qplane {

double q_number(const QContext &ctx, int m) {
  if (m == 0)
    return 0.0;
  // [m] = (q^m - q^-m)/(q - q^-1); odd in m by construction.
  const double qm = q_power(ctx, m);
  return (qm - 1.0 / qm) / ctx.q_minus_inv_q();
}

double q_factorial(const QContext &ctx, int m) {
  if (m < 0)
    throw DomainError("q_factorial: m must be >= 0");
  double acc = 1.0;
  for (int k = 1; k <= m; ++k)
    acc *= q_number(ctx, k);
  return acc;
}

double q_power(const QContext &ctx, int n) {
  const double base = n >= 0 ? ctx.q() : ctx.inv_q();
  int k = n >= 0 ? n : -n;
  double acc = 1.0;
  for (; k > 0; --k)
    acc *= base;
  return acc;
}

} // namespace qplane
