#include "reeftip/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reeftip/rootfind.hpp"

namespace reeftip {

namespace {

ReducedStability classify_reduced(double eig, double scale) {
  if (std::fabs(eig) <= 1e-12 * (1.0 + scale)) return ReducedStability::NonHyperbolic;
  return eig < 0 ? ReducedStability::Attracting : ReducedStability::Repelling;
}

// argmax of Pi: golden section, then Newton polish on u = 0
double pi_argmax(const ModelParams& p) {
  if (p.lambda * p.d * p.d >= 1)
    throw invalid_parameter("coral-free geometry requires lambda*d^2 < 1");
  auto pi = [&](double H) { return pi_function(H, p); };
  double H = golden_max(pi, 0.0, H_BIG, 1e-6);
  for (int it = 0; it < 40; ++it) {
    double uH = u_factor(H, p);
    if (std::fabs(uH) < 1e-15) break;
    double step = uH / u_factor_dH(H, p);
    double Hn = H - step;
    if (!(Hn > 0.0 && Hn < H_BIG)) break;
    H = Hn;
    if (std::fabs(step) < 1e-16 * (1.0 + H)) break;
  }
  return H;
}

}  // namespace

double fold_point(double alpha, const ModelParams& p) {
  double gate = p.lambda * p.d * p.d * p.d;
  if (!(alpha > gate))
    throw invalid_parameter("fold_point requires alpha > lambda*d^3");
  auto q = [&](double H) { return q_function(H, alpha, p); };
  double q0 = q(0.0), q1 = q(H_BIG);
  if (!(q0 < 0 && q1 > 0)) throw numeric_failure("fold_point: no bracket on [0, H_big]");
  ScalarFn dq = [&](double H) { return q_function_dH(H, alpha, p); };
  return bisect_root(q, 0.0, H_BIG, q0, q1, ROOT_FTOL, &dq);
}

EquilibriumInfo coexistence_equilibrium(double alpha, const ModelParams& p) {
  if (!(p.beta < 1)) throw invalid_parameter("coexistence equilibrium requires beta < 1");
  double bl = p.beta / p.lambda;
  double disc = (bl + p.d) * (bl + p.d) + 4.0 * bl;
  double H_I = (bl - p.d + std::sqrt(disc)) / (2.0 * (p.d + 1.0));
  double s = feeding_rate(H_I, p);
  double A_I = alpha / s;
  double C_I = 1.0 - p.beta - A_I;

  EquilibriumInfo e;
  e.state = {H_I, A_I, C_I};
  e.branch = BranchId::S02;
  e.relevant = C_I >= 0.0;
  double q = q_function(H_I, alpha, p);
  double w = 1.0 + H_I;
  double eig = (q == 0.0) ? std::numeric_limits<double>::infinity()
                          : -w * w * C_I * v_factor_dH(H_I, p) / q;
  if (std::fabs(q) <= 1e-12 * (1.0 + std::fabs(alpha)))
    e.reduced = ReducedStability::NonHyperbolic;  // fold collision at alpha*
  else
    e.reduced = classify_reduced(eig, 1.0);
  return e;
}

std::vector<EquilibriumInfo> coral_free_equilibria(double alpha, const ModelParams& p) {
  double H_hat = pi_argmax(p);
  double alpha_hat = pi_function(H_hat, p);
  std::vector<EquilibriumInfo> out;
  if (alpha > alpha_hat) return out;

  auto make = [&](double H) {
    EquilibriumInfo e;
    e.state = {H, a_on_sheet(H, alpha, p), 0.0};
    e.branch = BranchId::S02;
    e.relevant = true;
    e.reduced = classify_reduced(v_factor(H, p), p.beta);
    return e;
  };

  if (alpha_hat - alpha < 1e-13 * (1.0 + alpha_hat)) {
    out.push_back(make(H_hat));  // tangency at the maximum of Pi
    return out;
  }

  auto f = [&](double H) { return pi_function(H, p) - alpha; };
  ScalarFn df = [&](double H) { return pi_function_dH(H, p); };
  if (alpha >= p.d) {
    double fa = f(0.0), fb = f(H_hat);
    out.push_back(make(bisect_root(f, 0.0, H_hat, fa, fb, ROOT_FTOL, &df)));
  }
  double fa = f(H_hat), fb = f(H_BIG);
  if (!(fb < 0)) throw numeric_failure("coral_free_equilibria: Pi did not drop below alpha");
  out.push_back(make(bisect_root(f, H_hat, H_BIG, fa, fb, ROOT_FTOL, &df)));
  return out;
}

ThresholdSet threshold_set(const ModelParams& p) {
  if (!(p.beta < 1)) throw invalid_parameter("threshold_set requires beta < 1");
  ThresholdSet t{};
  EquilibriumInfo eI = coexistence_equilibrium(0.0, p);
  t.H_I = eI.state[0];
  double s_I = feeding_rate(t.H_I, p);
  t.alpha_plus = (1.0 - p.beta) * s_I;
  t.alpha_star = fold_alpha(t.H_I, p);
  t.H_hat = pi_argmax(p);
  t.alpha_hat = pi_function(t.H_hat, p);
  if (std::fabs(t.alpha_star - t.alpha_plus) < COINCIDENCE_TOL)
    t.ordering = ThresholdOrdering::Coincident;
  else if (t.alpha_plus < t.alpha_star)
    t.ordering = ThresholdOrdering::PlusHatStar;
  else
    t.ordering = ThresholdOrdering::StarPlusHat;
  return t;
}

LayerStability layer_stability(const State3& y, double alpha, const ModelParams& p) {
  const double tol = 1e-8;
  double H = y[0], A = y[1], C = y[2];
  double s = feeding_rate(std::max(H, 0.0), p);

  LayerStability out{};
  std::complex<double> l1, l2;
  if (std::fabs(H) <= tol && std::fabs(A) <= tol) {
    out.branch = BranchId::S00;
    l1 = -p.lambda * alpha;
    l2 = 1.0 - C;
  } else if (std::fabs(H) <= tol && std::fabs(A - (1.0 - C)) <= tol) {
    out.branch = BranchId::S01;
    l1 = p.lambda * (p.d * A - alpha);
    l2 = -A;
  } else if (std::fabs(s * A - alpha) <= tol &&
             std::fabs(1.0 - A - C - p.lambda * H * s) <= tol) {
    out.branch = BranchId::S02;
    double w = 1.0 + H;
    double tr = (alpha / s) * (p.lambda * H / (w * w) - 1.0);
    double det = p.lambda * alpha * H * q_function(H, alpha, p) / (w * w);
    double disc = tr * tr - 4.0 * det;
    if (disc >= 0) {
      double r = std::sqrt(disc);
      l1 = 0.5 * (tr - r);
      l2 = 0.5 * (tr + r);
    } else {
      double im = 0.5 * std::sqrt(-disc);
      l1 = {0.5 * tr, -im};
      l2 = {0.5 * tr, im};
    }
  } else {
    throw invalid_parameter("layer_stability: point is not on the critical manifold");
  }
  out.eigenvalues = {l1, l2};

  double scale = 1.0 + std::max(std::abs(l1), std::abs(l2));
  bool zero1 = std::fabs(l1.real()) <= 1e-10 * scale;
  bool zero2 = std::fabs(l2.real()) <= 1e-10 * scale;
  if (zero1 || zero2)
    out.classification = LayerClass::NonHyperbolic;
  else if (l1.real() < 0 && l2.real() < 0)
    out.classification = LayerClass::Attracting;
  else
    out.classification = LayerClass::Repelling;  // any unstable fast direction
  return out;
}

EquilibriumSet equilibrium_set(double alpha, const ModelParams& p) {
  EquilibriumSet es;
  es.e0 = {{0.0, 0.0, 0.0}, BranchId::S00, true, ReducedStability::Repelling};
  es.eC = {{0.0, 0.0, 1.0 - p.beta}, BranchId::S00, p.beta < 1, ReducedStability::Attracting};
  es.eA = {{0.0, 1.0, 0.0}, BranchId::S01, true, ReducedStability::Attracting};
  if (p.beta < 1) es.eI = coexistence_equilibrium(alpha, p);
  if (p.lambda * p.d * p.d < 1) {
    auto nc = coral_free_equilibria(alpha, p);
    if (nc.size() == 2) {
      es.enC_r = nc[0];
      es.enC_a = nc[1];
    } else if (nc.size() == 1) {
      es.enC_a = nc[0];
    }
  }
  return es;
}

ReducedFlowRegime reduced_flow_regime(double alpha, const ModelParams& p) {
  if (!(p.lambda * p.d * p.d < 1))
    throw invalid_parameter("reduced_flow_regime requires lambda*d^2 < 1");
  if (!(p.beta < 1)) throw invalid_parameter("reduced_flow_regime requires beta < 1");
  if (!(alpha > p.d)) throw invalid_parameter("reduced_flow_regime requires alpha > d");

  ReducedFlowRegime rf;
  rf.thresholds = threshold_set(p);
  rf.equilibria = equilibrium_set(alpha, p);
  double mn = std::min(rf.thresholds.alpha_plus, rf.thresholds.alpha_star);
  double mx = std::max(rf.thresholds.alpha_plus, rf.thresholds.alpha_star);
  bool plus_first = rf.thresholds.alpha_plus < rf.thresholds.alpha_star;

  if (rf.thresholds.ordering == ThresholdOrdering::Coincident)
    rf.item = std::fabs(alpha - mn) <= COINCIDENCE_TOL ? 0 : (alpha < mn ? 1 : 0);
  else if (std::fabs(alpha - mn) <= COINCIDENCE_TOL)
    rf.item = plus_first ? 2 : 4;
  else if (alpha < mn)
    rf.item = 1;
  else if (alpha < mx - COINCIDENCE_TOL)
    rf.item = plus_first ? 3 : 5;
  else
    rf.item = 0;
  return rf;
}

std::optional<double> bifurcation_curve_lambda(double beta, double d) {
  if (!(beta > 0 && beta < 1)) throw invalid_parameter("bifurcation curve requires beta in (0,1)");
  if (!(d > 0)) throw invalid_parameter("bifurcation curve requires d > 0");

  // H_I on the coincidence curve solves beta*(1+d)*x^2 + (3*beta + 2*beta*d - 1)*x + beta*d = 0;
  // this parametrisation stays regular at beta = 1/2
  double a = beta * (1.0 + d);
  double b = 3.0 * beta + 2.0 * beta * d - 1.0;
  double c = beta * d;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0) return std::nullopt;
  double sq = std::sqrt(disc);
  double qq = -0.5 * (b + (b >= 0 ? sq : -sq));
  double roots[2] = {qq / a, qq != 0.0 ? c / qq : 0.0};

  double denom = 1.0 - 2.0 * beta - 2.0 * beta * d;
  std::optional<double> best;
  for (double x : roots) {
    if (!(x > 0) || !std::isfinite(x)) continue;
    double s = d + x / (1.0 + x);
    double lam = beta / (x * s);
    if (!(lam > 0 && lam < 1)) continue;
    if (lam * d * d >= 1) continue;
    if (denom > 0 && lam < beta * beta / denom) continue;  // admissible-branch selection
    ModelParams p{lam, beta, d, 0.01};
    ThresholdSet t = threshold_set(p);
    if (std::fabs(t.alpha_plus - t.alpha_star) > COINCIDENCE_TOL) continue;
    if (!best || lam < *best) best = lam;
  }
  return best;
}

RampConfig resolve_ramp(const ModelParams& p, RampConfig ramp) {
  ramp.resolved = false;
  ramp.validate();
  ramp.alpha_min_delta = p.d + ramp.delta;
  switch (ramp.alpha_max_rule) {
    case AlphaMaxRule::Explicit:
      ramp.alpha_max_delta = ramp.alpha_max_explicit;
      break;
    case AlphaMaxRule::Plus:
      ramp.alpha_max_delta = threshold_set(p).alpha_plus - ramp.delta;
      break;
    case AlphaMaxRule::MinPlusStar: {
      ThresholdSet t = threshold_set(p);
      ramp.alpha_max_delta = std::min(t.alpha_plus, t.alpha_star) - ramp.delta;
      break;
    }
  }
  ramp.resolved = true;
  ramp.validate();
  return ramp;
}

}  // namespace reeftip
