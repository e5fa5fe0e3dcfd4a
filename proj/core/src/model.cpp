#include "reeftip/model.hpp"

#include <cmath>

namespace reeftip {

double feeding_rate(double H, const ModelParams& p) {
  // total in H except the pole at H = -1, so implicit solvers may probe
  // slightly outside the physical domain without faulting
  return p.d + H / (1.0 + H);
}

double feeding_rate_deriv(double H) {
  double w = 1.0 + H;
  return 1.0 / (w * w);
}

double q_function(double H, double alpha, const ModelParams& p) {
  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  return p.lambda * (H + s * w * w) - alpha / (s * s);
}

double q_function_dH(double H, double alpha, const ModelParams& p) {
  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  return 2.0 * p.lambda * (p.d + 1.0) * w + 2.0 * alpha / (w * w * s * s * s);
}

double pi_function(double H, const ModelParams& p) {
  double s = feeding_rate(H, p);
  return s - p.lambda * H * s * s;
}

double pi_function_dH(double H, const ModelParams& p) {
  double w = 1.0 + H;
  return u_factor(H, p) / (w * w);
}

double u_factor(double H, const ModelParams& p) {
  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  return 1.0 - 2.0 * p.lambda * H * s - p.lambda * s * s * w * w;
}

double u_factor_dH(double H, const ModelParams& p) {
  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  // using 1 + s*(1+H) = (1+d)*(1+H)
  return -2.0 * p.lambda * (s + H / (w * w) + s * (p.d + 1.0) * w);
}

double v_factor(double H, const ModelParams& p) {
  return p.lambda * H * feeding_rate(H, p) - p.beta;
}

double v_factor_dH(double H, const ModelParams& p) {
  return p.lambda * (feeding_rate(H, p) + H * feeding_rate_deriv(H));
}

double fold_alpha(double H, const ModelParams& p) {
  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  return p.lambda * s * s * (H + s * w * w);
}

double a_on_sheet(double H, double alpha, const ModelParams& p) {
  return alpha / feeding_rate(H, p);
}

double c_on_sheet(double H, double alpha, const ModelParams& p) {
  double s = feeding_rate(H, p);
  return 1.0 - alpha / s - p.lambda * H * s;
}

double lambda_drift(double H, double alpha, const ModelParams& p, double r) {
  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  double c = 1.0 - alpha / s - p.lambda * H * s;
  return -w * w * (c * (p.lambda * H * s - p.beta) + r / s);
}

State3 rhs_fast(const State3& y, double alpha, const ModelParams& p) {
  double H = y[0], A = y[1], C = y[2];
  double s = p.d + H / (1.0 + H);
  return {p.lambda * H * (s * A - alpha), A * (1.0 - A - C - p.lambda * H * s),
          p.epsilon * C * (1.0 - p.beta - A - C)};
}

std::array<double, 9> jac_fast(const State3& y, double alpha, const ModelParams& p) {
  double H = y[0], A = y[1], C = y[2];
  double w = 1.0 + H;
  double s = p.d + H / w;
  double sp = 1.0 / (w * w);
  return {
      p.lambda * (s * A - alpha) + p.lambda * H * A * sp,
      p.lambda * H * s,
      0.0,
      -A * p.lambda * (s + H * sp),
      1.0 - 2.0 * A - C - p.lambda * H * s,
      -A,
      0.0,
      -p.epsilon * C,
      p.epsilon * (1.0 - p.beta - A - 2.0 * C),
  };
}

State4 rhs_ramped(const State4& y, const ModelParams& p, double r_eff) {
  State3 y3{y[0], y[1], y[2]};
  State3 f3 = rhs_fast(y3, y[3], p);
  return {f3[0], f3[1], f3[2], p.epsilon * r_eff};
}

std::array<double, 16> jac_ramped(const State4& y, const ModelParams& p, double r_eff) {
  (void)r_eff;
  State3 y3{y[0], y[1], y[2]};
  auto j3 = jac_fast(y3, y[3], p);
  std::array<double, 16> j{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) j[4 * i + k] = j3[3 * i + k];
  j[3] = -p.lambda * y[0];  // d(dH/dt)/d(alpha)
  j[7] = 0.0;
  j[11] = 0.0;
  // alpha row is identically zero: d(alpha)/dt is state-independent
  return j;
}

double rhs_reduced_s02(double H, double alpha, const ModelParams& p) {
  double q = q_function(H, alpha, p);
  double scale = 1.0 + std::fabs(p.lambda * (H + 4.0)) + std::fabs(alpha);
  if (std::fabs(q) < 1e-14 * scale)
    throw numeric_failure("reduced flow is singular at the fold point");
  return lambda_drift(H, alpha, p, 0.0) / q;
}

std::array<double, 2> rhs_desingularized(double H, double alpha, const ModelParams& p, double r) {
  return {lambda_drift(H, alpha, p, r), r * q_function(H, alpha, p)};
}

}  // namespace reeftip
