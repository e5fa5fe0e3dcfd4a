#pragma once

#include <complex>
#include <optional>

#include "reeftip/model.hpp"
#include "reeftip/params.hpp"

namespace reeftip {

inline constexpr double COINCIDENCE_TOL = 1e-8;  // threshold coincidence detection
inline constexpr double ROOT_FTOL = 1e-12;       // scalar root residual target

enum class BranchId { S00, S01, S02 };
enum class LayerClass { Attracting, Repelling, Saddle, NonHyperbolic };

struct LayerStability {
  BranchId branch;
  std::array<std::complex<double>, 2> eigenvalues;  // fast (H, A) block
  LayerClass classification;
};

enum class ReducedStability { Attracting, Repelling, NonHyperbolic };

struct EquilibriumInfo {
  State3 state{};
  BranchId branch = BranchId::S02;
  bool relevant = true;  // lies in the nonnegative octant
  ReducedStability reduced = ReducedStability::Attracting;
};

struct EquilibriumSet {
  EquilibriumInfo e0, eC, eA;
  std::optional<EquilibriumInfo> eI;
  std::optional<EquilibriumInfo> enC_r, enC_a;
};

// ordering of the three collapse thresholds
enum class ThresholdOrdering {
  PlusHatStar,  // alpha+ < alpha^ < alpha*  (H_I > H^)
  StarPlusHat,  // alpha* < alpha+ < alpha^  (H_I < H^)
  Coincident,   // all three equal within COINCIDENCE_TOL
};

struct ThresholdSet {
  double alpha_plus;  // transcritical collision of e_I with the coral-free state
  double alpha_star;  // fold collision of H_I with H_0
  double alpha_hat;   // saddle-node of the coral-free pair (max of Pi)
  double H_hat;       // argmax of Pi
  double H_I;         // coexistence fish density, independent of alpha
  ThresholdOrdering ordering;
};

// unique root of Q(.; alpha); requires alpha > lambda*d^3
double fold_point(double alpha, const ModelParams& p);

// closed-form coexistence equilibrium; relevant iff C_I >= 0
EquilibriumInfo coexistence_equilibrium(double alpha, const ModelParams& p);

// intersections of S0^2 with {C = 0}, i.e. roots of Pi(H) = alpha;
// 0, 1, or 2 entries sorted by H; requires lambda*d^2 < 1
std::vector<EquilibriumInfo> coral_free_equilibria(double alpha, const ModelParams& p);

ThresholdSet threshold_set(const ModelParams& p);

// layer-problem classification of a point on S0 (residual tolerance 1e-8)
LayerStability layer_stability(const State3& y, double alpha, const ModelParams& p);

// items of the reduced-flow stability proposition:
//   1: alpha < min{alpha+, alpha*}
//   2: alpha = alpha+ < alpha*   (transcritical of H_I and H_nC^a)
//   3: alpha+ < alpha < alpha*   (e_I irrelevant, H_nC^a attracting)
//   4: alpha = alpha* < alpha+   (H_I = H_0 fold)
//   5: alpha* < alpha < alpha+   (H_I repelling on the repelling sheet)
//   0: alpha >= max{alpha+, alpha*} or thresholds coincident (outside 1..5)
struct ReducedFlowRegime {
  int item;
  ThresholdSet thresholds;
  EquilibriumSet equilibria;
};
ReducedFlowRegime reduced_flow_regime(double alpha, const ModelParams& p);

// full equilibrium inventory at fixed alpha with reduced-flow annotations
EquilibriumSet equilibrium_set(double alpha, const ModelParams& p);

// lambda on the coincidence curve alpha+ = alpha* = alpha^ for given (beta, d),
// or nullopt when no admissible branch exists
std::optional<double> bifurcation_curve_lambda(double beta, double d);

// fill alpha_min_delta / alpha_max_delta from the rule and thresholds
RampConfig resolve_ramp(const ModelParams& p, RampConfig ramp);

}  // namespace reeftip
