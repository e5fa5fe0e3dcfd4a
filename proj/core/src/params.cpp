#include "reeftip/params.hpp"

#include <cmath>
#include <sstream>

namespace reeftip {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void warn_range(std::vector<std::string>& w, const char* name, double v, double lo, double hi) {
  if (v < lo || v > hi)
    w.push_back(std::string(name) + "=" + num(v) + " outside considered range [" + num(lo) + ", " +
                num(hi) + "]");
}

}  // namespace

std::vector<std::string> DimensionalParams::validate() const {
  if (!(mu >= 0) || !(m >= 0) || !(f >= 0) || !(d >= 0))
    throw invalid_parameter("dimensional parameters must be nonnegative");
  if (!(rA > 0)) throw invalid_parameter("rA must be positive");
  if (!(rC > 0)) throw invalid_parameter("rC must be positive");
  if (!(lambda0 > 0)) throw invalid_parameter("lambda0 must be positive");

  std::vector<std::string> w;
  if (mu != 0.02) w.push_back("mu=" + num(mu) + " differs from the calibrated value 0.02");
  warn_range(w, "m", m, 0.008, 0.08);
  warn_range(w, "f", f, 0.0, 0.5);
  warn_range(w, "rA", rA, 1.0, 8.0);
  warn_range(w, "rC", rC, 0.02, 0.2);
  if (d != 0.22) w.push_back("d=" + num(d) + " differs from the calibrated value 0.22");
  warn_range(w, "lambda0", lambda0, 0.0, 3.2);
  return w;
}

std::vector<std::string> ModelParams::validate() const {
  if (!(lambda > 0)) throw invalid_parameter("lambda must be positive");
  if (!(beta > 0)) throw invalid_parameter("beta must be positive");
  if (!(d > 0)) throw invalid_parameter("d must be positive");
  if (!(epsilon > 0)) throw invalid_parameter("epsilon must be positive");

  std::vector<std::string> w;
  if (beta >= 1) w.push_back("beta=" + num(beta) + " >= 1: coexistence equilibrium irrelevant");
  if (lambda * d * d >= 1)
    w.push_back("lambda*d^2=" + num(lambda * d * d) + " >= 1: coral-free analysis degenerates");
  warn_range(w, "lambda", lambda, 0.0, 1.0);
  warn_range(w, "beta", beta, 0.04, 1.0);
  warn_range(w, "epsilon", epsilon, 0.0025, 0.01);
  if (epsilon > 0.2)
    w.push_back("epsilon=" + num(epsilon) + " > 0.2: timescale separation assumption is weak");
  return w;
}

std::pair<ModelParams, double> nondimensionalize(const DimensionalParams& p,
                                                 std::vector<std::string>* warnings) {
  auto w = p.validate();
  ModelParams mp;
  mp.lambda = p.lambda0 / p.rA;
  mp.beta = p.m / p.rC;
  mp.d = p.d;
  mp.epsilon = p.rC / p.rA;
  double alpha = (p.mu + p.f) / p.lambda0;
  for (const auto& s : mp.validate()) w.push_back(s);
  if (warnings) *warnings = std::move(w);
  return {mp, alpha};
}

void RampConfig::validate() const {
  if (!(r >= 0)) throw invalid_parameter("ramp rate r must be nonnegative");
  if (!(delta > 0)) throw invalid_parameter("ramp margin delta must be positive");
  if (resolved && !(alpha_min_delta < alpha_max_delta))
    throw invalid_parameter("ramp requires alpha_min_delta < alpha_max_delta");
}

}  // namespace reeftip
