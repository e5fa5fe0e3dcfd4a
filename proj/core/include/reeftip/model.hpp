#pragma once

#include "reeftip/params.hpp"

namespace reeftip {

inline constexpr double H_BIG = 1e3;  // bracketing cutoff for all H searches

// steady-state per-capita feeding rate s(H) = d + H/(1+H)
double feeding_rate(double H, const ModelParams& p);
double feeding_rate_deriv(double H);  // s'(H) = (1+H)^-2

// Q(H; alpha) = lambda*(H + s*(1+H)^2) - alpha/s^2, zero on the fold curve
double q_function(double H, double alpha, const ModelParams& p);
double q_function_dH(double H, double alpha, const ModelParams& p);

// Pi(H) = s - lambda*H*s^2; coral-free equilibria solve Pi(H) = alpha
double pi_function(double H, const ModelParams& p);
double pi_function_dH(double H, const ModelParams& p);  // = u(H)/(1+H)^2

// u(H) = 1 - 2*lambda*H*s - lambda*s^2*(1+H)^2, strictly decreasing
double u_factor(double H, const ModelParams& p);
double u_factor_dH(double H, const ModelParams& p);

// v(H) = lambda*H*s - beta, strictly increasing; v(H_I) = 0
double v_factor(double H, const ModelParams& p);
double v_factor_dH(double H, const ModelParams& p);

// alpha on the fold curve: Q(H; fold_alpha(H)) = 0
double fold_alpha(double H, const ModelParams& p);

// algal/coral cover on the coexistence sheet S0^2 at (H, alpha)
double a_on_sheet(double H, double alpha, const ModelParams& p);
double c_on_sheet(double H, double alpha, const ModelParams& p);

// Lambda(H, alpha, r) = -(1+H)^2 * [c_on_sheet*(lambda*H*s - beta) + r/s],
// the H-drift of the desingularised system
double lambda_drift(double H, double alpha, const ModelParams& p, double r);

State3 rhs_fast(const State3& y, double alpha, const ModelParams& p);
// row-major 3x3 Jacobian of rhs_fast in (H, A, C)
std::array<double, 9> jac_fast(const State3& y, double alpha, const ModelParams& p);

// fast-chart ramped system: rhs_fast plus d(alpha)/dt = epsilon*r_eff
State4 rhs_ramped(const State4& y, const ModelParams& p, double r_eff);
std::array<double, 16> jac_ramped(const State4& y, const ModelParams& p, double r_eff);

// reduced flow on S0^2: dH/dtau = lambda_drift(.,.,r=0)/Q; singular on the fold
double rhs_reduced_s02(double H, double alpha, const ModelParams& p);

// (dH/ds, dalpha/ds) = (lambda_drift, r*Q)
std::array<double, 2> rhs_desingularized(double H, double alpha, const ModelParams& p, double r);

}  // namespace reeftip
