#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reeftip/folded.hpp"
#include "reeftip/integrate.hpp"
#include "reeftip/manifold.hpp"
#include "reeftip/params.hpp"

namespace reeftip {

enum class OutcomeLabel { Tracked, CanardTipped, JumpTipped, BifurcationTipped, Unresolved };

struct Outcome {
  OutcomeLabel label = OutcomeLabel::Unresolved;
  std::optional<double> tip_tau;    // slow time of the tip-floor crossing
  std::optional<double> tip_alpha;  // alpha at that crossing
  std::optional<double> first_fold_tau;
  std::optional<double> first_fold_alpha;
  int oscillations = 0;    // subthreshold peaks between fold crossing and tip
  double dwell_tau = 0.0;  // slow time spent near the repelling sheet
  double alpha_end = 0.0;
};

struct ExperimentOptions {
  std::optional<State3> y0;  // start state; default is the coexistence point at alpha_min
  double tau_max = 0.0;      // 0 = ramp duration plus a relaxation margin
  double T_c = 3.0;          // dwell threshold separating canard from jump tipping
  double c_tube = 1.0;       // slow-sheet tube half-width is c_tube * sqrt(epsilon)
  double tol_track = 1e-3;
  double H_tip_floor = 1e-6;
};

struct TippingRun {
  Trajectory trajectory;
  Outcome outcome;
  ThresholdSet thresholds;
  RampConfig ramp;  // resolved
};

TippingRun run_tipping_experiment(const ModelParams& p, const RampConfig& ramp,
                                  const IntegratorConfig& cfg = {},
                                  const ExperimentOptions& opts = {});

// slow-time measure of the segment after the first fold crossing that stays
// within c_tube*sqrt(epsilon) of the repelling sheet
double repelling_dwell(const Trajectory& traj, const ModelParams& p, double c_tube = 1.0);

// local maxima of H(tau) with topographic prominence above the threshold,
// counted between the first fold crossing and the tip
int count_subthreshold_oscillations(const Trajectory& traj, double prominence = 1e-8);

// true if the oscillation amplitude |H_peak - H_I| attains its minimum at an
// interior peak (decreasing on approach, growing again before escape)
bool has_interior_amplitude_minimum(const Trajectory& traj, double H_I);

struct SweepCell {
  double beta = 0.0;
  double lambda = 0.0;
  RegionLabel region = RegionLabel::Excluded;
  std::optional<OutcomeLabel> outcome;
  std::optional<double> alpha_FS;
  std::optional<double> mu;
  std::string error;
};

struct SweepResult {
  std::vector<double> betas;
  std::vector<double> lambdas;
  std::vector<SweepCell> cells;  // betas.size() x lambdas.size(), row-major in beta

  const SweepCell& at(std::size_t i_beta, std::size_t j_lambda) const {
    return cells[i_beta * lambdas.size() + j_lambda];
  }
};

// classify (and optionally simulate) every cell of a (beta, lambda) lattice
// at fixed d, epsilon, r; jobs <= 0 reads REEFTIP_JOBS or falls back to the
// hardware thread count
SweepResult sweep_regime_map(const std::vector<double>& betas,
                             const std::vector<double>& lambdas, double d, double epsilon,
                             double r, bool simulate, int jobs = 0,
                             const IntegratorConfig& cfg = {});

struct ResurgenceResult {
  Trajectory trajectory;
  bool tipped = false;
  double reset_tau = 0.0;
  double reset_alpha = 0.0;
  State3 endpoint{};
  State3 target{};
  bool recovered = false;
  double H_max_recovery = 0.0;
};

// ramp until the tip floor is reached, then drop alpha below d and relax;
// recovery is reaching the coexistence state of the reset alpha
ResurgenceResult resurgence_experiment(const ModelParams& p, const RampConfig& ramp,
                                       double reset_alpha, const IntegratorConfig& cfg = {},
                                       const ExperimentOptions& opts = {});

struct LimitCheckRow {
  double eps = 0.0;
  double sup_err = 0.0;
};

struct LimitCheckResult {
  double alpha = 0.0;
  double H_start = 0.0;
  std::vector<LimitCheckRow> rows;  // sorted by eps descending
  bool monotone = false;            // sup_err strictly decreasing with eps
};

// compare the full fast system against the one-dimensional reduced flow on
// the attracting sheet over 20 slow-time units
LimitCheckResult singular_limit_check(const ModelParams& p, double alpha,
                                      const std::vector<double>& eps_list,
                                      const IntegratorConfig& cfg = {});

}  // namespace reeftip
