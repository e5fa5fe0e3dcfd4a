#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "reeftip/manifold.hpp"
#include "reeftip/model.hpp"
#include "reeftip/params.hpp"

namespace reeftip {

// equilibria of the desingularized slow flow on the fold curve
enum class FoldedKind { Node, Focus, Saddle, Degenerate };

struct FoldedSingularity {
  double H_FS = 0.0;
  double alpha_FS = 0.0;
  FoldedKind kind = FoldedKind::Degenerate;
  double trJ = 0.0;
  double detJ = 0.0;
  double Delta = 0.0;  // trJ^2 - 4 detJ
  std::array<std::complex<double>, 2> eigenvalues{};
  std::array<double, 2> E_ss{};  // strong eigendirection, (H, alpha) components, unit
  std::array<double, 2> E_s{};   // weak eigendirection, nodes only
  double mu = 0.0;               // eigenvalue ratio (strong/weak), nodes only
  int sectors = 0;               // floor((mu - 1)/2), nodes only
  bool relevant = false;         // lies on the edge of the attracting sheet (u >= 0)
  bool boundary_warning = false; // within tolerance of a node/focus/saddle transition
};

// all folded singularities at ramp rate r, sorted by H.
// r = 0 returns the two singular-limit points (u = 0 and v = 0 on the fold).
std::vector<FoldedSingularity> find_folded_singularities(const ModelParams& p, double r);

// classify a point that already satisfies Q = 0 and Lambda = 0 (to 1e-10)
FoldedSingularity classify_folded(double H, double alpha, const ModelParams& p, double r);

// d/dr of Delta at r = 0 along the branch rooted at the fold-edge point u = 0
double delta_prime_at_zero(const ModelParams& p);

struct CriticalRateResult {
  bool found = false;
  double r_crit = 0.0;
  FoldedSingularity at{};
};

// smallest r in [1e-12, 0.1] where Delta of the relevant singularity changes sign
CriticalRateResult critical_rate(const ModelParams& p);

enum class RegionLabel { I, II, IIIa, IIIb, Boundary, Excluded };

struct RegionResult {
  RegionLabel label = RegionLabel::Excluded;
  int regime_item = 0;  // reduced-flow regime used for the bistability screen
  std::optional<ThresholdSet> thresholds;
  std::optional<FoldedSingularity> singularity;
};

// parameter-plane region at ramp rate r; bistability screened at alpha = d + delta
RegionResult region_classify(const ModelParams& p, double r, double delta = 0.01);

// true if (H, alpha) lies in the singular funnel of a folded node:
// on the attracting sheet and on the same side of the strong eigendirection
// as the weak-direction approach
bool in_funnel(double H, double alpha, const FoldedSingularity& node, const ModelParams& p);

}  // namespace reeftip
