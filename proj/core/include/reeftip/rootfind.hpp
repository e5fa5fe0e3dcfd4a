#pragma once

#include <functional>
#include <vector>

namespace reeftip {

using ScalarFn = std::function<double(double)>;

// bisection on a sign-changing bracket, then a few safeguarded Newton steps
// when df is provided; aims for |f| <= ftol at the root
double bisect_root(const ScalarFn& f, double a, double b, double fa, double fb,
                   double ftol = 1e-12, const ScalarFn* df = nullptr);

// sign-change brackets of f on n subintervals of [lo, hi] (log spacing optional)
struct Bracket {
  double a, b, fa, fb;
};
std::vector<Bracket> scan_sign_changes(const ScalarFn& f, double lo, double hi, int n,
                                       bool log_spaced);

// golden-section maximiser of a unimodal function on [a, b]
double golden_max(const ScalarFn& f, double a, double b, double xtol = 1e-12);

}  // namespace reeftip
