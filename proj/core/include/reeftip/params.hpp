#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace reeftip {

struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numeric_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// H: fish density, A: algal cover, C: coral cover
using State3 = std::array<double, 3>;
// State3 extended by the fishing effort alpha
using State4 = std::array<double, 4>;

struct DimensionalParams {
  double mu = 0.02;     // fish natural mortality, 1/yr
  double m = 0.04;      // coral mortality, 1/yr
  double f = 0.0;       // fishing mortality, 1/yr
  double rA = 2.0;      // algae growth, 1/yr
  double rC = 0.02;     // coral growth, 1/yr
  double d = 0.22;      // minimum per-capita feeding rate
  double lambda0 = 0.64;  // herbivory rate, 1/yr

  // throws invalid_parameter on hard violations, returns range warnings
  std::vector<std::string> validate() const;
};

struct ModelParams {
  double lambda = 0.2;
  double beta = 0.2;
  double d = 0.22;
  double epsilon = 0.01;

  std::vector<std::string> validate() const;
};

// lambda = lambda0/rA, beta = m/rC, eps = rC/rA, alpha = (mu+f)/lambda0
std::pair<ModelParams, double> nondimensionalize(const DimensionalParams& p,
                                                 std::vector<std::string>* warnings = nullptr);

enum class AlphaMaxRule { MinPlusStar, Plus, Explicit };

// Ramp alpha from d+delta up to a clamp value at slow rate r.
// alpha_min_delta/alpha_max_delta are filled by resolve_ramp (manifold.hpp);
// for Explicit the clamp is alpha_max_explicit verbatim, otherwise the
// threshold selected by the rule minus delta.
struct RampConfig {
  double r = 4e-3;
  double delta = 0.01;
  AlphaMaxRule alpha_max_rule = AlphaMaxRule::MinPlusStar;
  double alpha_max_explicit = 0.0;
  double alpha_min_delta = 0.0;
  double alpha_max_delta = 0.0;
  bool resolved = false;

  void validate() const;
};

}  // namespace reeftip
