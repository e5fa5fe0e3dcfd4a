#pragma once

#include <cmath>
#include <random>

#include "reeftip/params.hpp"

namespace testutil {

// scenario tuples are quoted (beta, lambda); keep the argument order explicit
inline reeftip::ModelParams mp(double beta, double lambda, double d = 0.22, double eps = 0.01) {
  reeftip::ModelParams p;
  p.beta = beta;
  p.lambda = lambda;
  p.d = d;
  p.epsilon = eps;
  return p;
}

inline double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

}  // namespace testutil
