#include "reeftip/rootfind.hpp"

#include <cmath>
#include <stdexcept>

#include "reeftip/params.hpp"

namespace reeftip {

double bisect_root(const ScalarFn& f, double a, double b, double fa, double fb, double ftol,
                   const ScalarFn* df) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0) throw numeric_failure("bisect_root: endpoints do not bracket a root");
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
    if (b - a < 1e-15 * (std::fabs(a) + std::fabs(b) + 1e-30)) break;
  }
  double x = 0.5 * (a + b);
  if (df) {
    for (int it = 0; it < 12; ++it) {
      double fx = f(x);
      if (std::fabs(fx) <= ftol) return x;
      double dfx = (*df)(x);
      if (dfx == 0.0) break;
      double xn = x - fx / dfx;
      if (!(xn > a && xn < b)) break;  // stay inside the bracket
      if (xn == x) break;
      x = xn;
    }
  }
  return x;
}

std::vector<Bracket> scan_sign_changes(const ScalarFn& f, double lo, double hi, int n,
                                       bool log_spaced) {
  std::vector<Bracket> out;
  if (!(hi > lo) || n < 2) return out;
  double la = log_spaced ? std::log(lo) : lo;
  double lb = log_spaced ? std::log(hi) : hi;
  double xprev = lo, fprev = f(lo);
  for (int i = 1; i <= n; ++i) {
    double x = la + (lb - la) * i / n;
    if (log_spaced) x = std::exp(x);
    if (i == n) x = hi;
    double fx = f(x);
    if (fprev == 0.0 || fprev * fx < 0) out.push_back({xprev, x, fprev, fx});
    xprev = x;
    fprev = fx;
  }
  return out;
}

double golden_max(const ScalarFn& f, double a, double b, double xtol) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace reeftip
