#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "reeftip/experiments.hpp"
#include "reeftip/io.hpp"

using namespace reeftip;
using testutil::mp;

namespace {

TippingRun run_scenario(const ModelParams& p, double r) {
  RampConfig ramp;
  ramp.r = r;
  return run_tipping_experiment(p, ramp);
}

}  // namespace

TEST_CASE("fast ramps tip through the folded node with a long repelling dwell") {
  TippingRun a = run_scenario(mp(0.18, 0.5), 4e-3);
  CHECK(a.outcome.label == OutcomeLabel::CanardTipped);
  REQUIRE(a.outcome.first_fold_alpha.has_value());
  CHECK(std::fabs(*a.outcome.first_fold_alpha - 0.3143593838896257) < 5e-3);
  CHECK(a.outcome.dwell_tau > 13.0);
  CHECK(a.outcome.dwell_tau < 16.0);
  REQUIRE(a.outcome.tip_tau.has_value());

  TippingRun b = run_scenario(mp(0.2, 0.2), 4e-3);
  CHECK(b.outcome.label == OutcomeLabel::CanardTipped);
  REQUIRE(b.outcome.first_fold_alpha.has_value());
  CHECK(std::fabs(*b.outcome.first_fold_alpha - 0.5005700634) < 5e-3);
  CHECK(b.outcome.dwell_tau > 10.0);
  CHECK(b.outcome.dwell_tau < 13.0);
  CHECK(repelling_dwell(b.trajectory, mp(0.2, 0.2)) ==
        doctest::Approx(b.outcome.dwell_tau).epsilon(1e-12));
}

TEST_CASE("slow ramps track the moving coexistence state") {
  TippingRun c = run_scenario(mp(0.2, 0.2), 3e-6);
  CHECK(c.outcome.label == OutcomeLabel::Tracked);
  CHECK(c.outcome.alpha_end == doctest::Approx(0.6150933784847699).epsilon(1e-12));
  CHECK_FALSE(c.outcome.tip_tau.has_value());
  CHECK(c.outcome.dwell_tau == 0.0);

  TippingRun e = run_scenario(mp(0.3, 0.4), 1e-5);
  CHECK(e.outcome.label == OutcomeLabel::Tracked);
}

TEST_CASE("focus regions tip by direct jump without dwelling") {
  TippingRun d = run_scenario(mp(0.3, 0.4), 4e-3);
  CHECK(d.outcome.label == OutcomeLabel::JumpTipped);
  CHECK(d.outcome.dwell_tau < 3.0);
  REQUIRE(d.outcome.tip_tau.has_value());
  REQUIRE(d.outcome.first_fold_tau.has_value());
}

TEST_CASE("pushing the clamp past the static thresholds tips by bifurcation") {
  ModelParams p = mp(0.4, 0.6);
  RampConfig ramp;
  ramp.r = 1e-5;
  ramp.alpha_max_rule = AlphaMaxRule::Explicit;
  ramp.alpha_max_explicit = 0.49;
  TippingRun f = run_tipping_experiment(p, ramp);

  CHECK(f.outcome.label == OutcomeLabel::BifurcationTipped);
  CHECK(f.outcome.alpha_end == doctest::Approx(0.49).epsilon(1e-12));
  REQUIRE(f.outcome.first_fold_alpha.has_value());
  CHECK(*f.outcome.first_fold_alpha > f.thresholds.alpha_plus);
  CHECK(std::fabs(*f.outcome.first_fold_alpha - f.thresholds.alpha_hat) < 1e-3);
  REQUIRE(f.outcome.tip_tau.has_value());
  CHECK(*f.outcome.tip_tau > 23000.0);
  CHECK(*f.outcome.tip_tau < 24500.0);
}

TEST_CASE("critical rate dichotomy brackets the tipping onset") {
  ModelParams p = mp(0.2, 0.2);
  double r_crit = 4.676837438710992e-06;
  CHECK(run_scenario(p, 0.5 * r_crit).outcome.label == OutcomeLabel::Tracked);
  CHECK(run_scenario(p, 10.0 * r_crit).outcome.label == OutcomeLabel::Tracked);
  TippingRun onset = run_scenario(p, 2e-4);
  CHECK(onset.outcome.label == OutcomeLabel::CanardTipped);
  CHECK(onset.outcome.dwell_tau >= 3.0);
}

TEST_CASE("subthreshold oscillations stay within the sector bound") {
  ModelParams p = mp(0.15, 0.5);
  TippingRun g = run_scenario(p, 4e-3);
  CHECK(g.outcome.label == OutcomeLabel::CanardTipped);
  CHECK(g.outcome.oscillations >= 2);
  CHECK(g.outcome.oscillations <= 9);

  auto sings = find_folded_singularities(p, 4e-3);
  REQUIRE(!sings.empty());
  REQUIRE(sings[0].kind == FoldedKind::Node);
  CHECK(g.outcome.oscillations <= sings[0].sectors);
  CHECK(g.outcome.oscillations ==
        count_subthreshold_oscillations(g.trajectory, 1e-8));
}

TEST_CASE("slow passage keeps a memory of the incoming ring-down") {
  ModelParams p = mp(0.2, 0.4);
  // the cap must clear the folded singularity, so raise it to alpha_plus - delta
  RampConfig ramp;
  ramp.r = 1e-4;
  ramp.alpha_max_rule = AlphaMaxRule::Plus;
  ramp = resolve_ramp(p, ramp);

  ExperimentOptions perturbed;
  State3 eI = coexistence_equilibrium(ramp.alpha_min_delta, p).state;
  perturbed.y0 = State3{eI[0] + 0.05, eI[1], eI[2]};
  TippingRun dh = run_tipping_experiment(p, ramp, {}, perturbed);

  CHECK(dh.outcome.label == OutcomeLabel::CanardTipped);
  REQUIRE(dh.outcome.tip_tau.has_value());
  CHECK(*dh.outcome.tip_tau > 2500.0);
  CHECK(*dh.outcome.tip_tau < 2800.0);
  REQUIRE(dh.outcome.first_fold_alpha.has_value());
  CHECK(std::fabs(*dh.outcome.first_fold_alpha - 0.471885) < 5e-3);
  CHECK(has_interior_amplitude_minimum(dh.trajectory, dh.thresholds.H_I));

  // a cap below the singularity rings down onto the equilibrium and stays there
  RampConfig low;
  low.r = 1e-4;
  low = resolve_ramp(p, low);
  TippingRun flat = run_tipping_experiment(p, low, {}, perturbed);
  CHECK(flat.outcome.label == OutcomeLabel::Tracked);
  CHECK_FALSE(has_interior_amplitude_minimum(flat.trajectory, flat.thresholds.H_I));
}

TEST_CASE("sweep lattice carries regions, outcomes and node data") {
  std::vector<double> betas, lambdas;
  for (int i = 0; i < 6; ++i) {
    betas.push_back(0.1 + 0.8 * i / 5.0);
    lambdas.push_back(0.1 + 0.8 * i / 5.0);
  }
  SweepResult res = sweep_regime_map(betas, lambdas, 0.22, 0.01, 4e-3, true, 2);
  REQUIRE(res.cells.size() == 36);
  REQUIRE(res.betas.size() == 6);

  int consistent = 0, labeled = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const SweepCell& c = res.at(i, j);
      CHECK(c.beta == doctest::Approx(betas[i]).epsilon(1e-15));
      CHECK(c.lambda == doctest::Approx(lambdas[j]).epsilon(1e-15));
      bool is_labeled = c.region == RegionLabel::I || c.region == RegionLabel::II ||
                        c.region == RegionLabel::IIIa || c.region == RegionLabel::IIIb;
      if (!is_labeled || !c.error.empty()) continue;
      REQUIRE(c.outcome.has_value());
      REQUIRE(c.alpha_FS.has_value());
      if (c.region == RegionLabel::I || c.region == RegionLabel::II)
        CHECK(c.mu.has_value());
      ++labeled;
      OutcomeLabel want = (c.region == RegionLabel::I || c.region == RegionLabel::II)
                              ? OutcomeLabel::CanardTipped
                              : (c.region == RegionLabel::IIIa ? OutcomeLabel::JumpTipped
                                                               : OutcomeLabel::Tracked);
      if (*c.outcome == want) ++consistent;
    }
  REQUIRE(labeled > 0);
  CHECK(consistent * 10 >= labeled * 6);  // spot grid, tolerate boundary cells
  CHECK_THROWS_AS(sweep_regime_map({}, lambdas, 0.22, 0.01, 4e-3, false, 1),
                  invalid_parameter);
}

TEST_CASE("dropping the fishing level after collapse regrows the reef") {
  ModelParams p = mp(0.2, 0.2);
  RampConfig ramp;
  ramp.r = 4e-3;
  ResurgenceResult res = resurgence_experiment(p, ramp, 0.01);

  CHECK(res.tipped);
  CHECK(res.recovered);
  CHECK(res.reset_tau > 80.0);
  CHECK(res.reset_tau < 83.0);
  CHECK(res.H_max_recovery > 5.0);
  CHECK(res.H_max_recovery < 5.8);
  State3 target = coexistence_equilibrium(0.01, p).state;
  for (int i = 0; i < 3; ++i) {
    CHECK(res.target[i] == doctest::Approx(target[i]).epsilon(1e-14));
    CHECK(std::fabs(res.endpoint[i] - target[i]) < 1e-6);
  }
  CHECK(res.trajectory.message == "tipped then relaxed at reset alpha");

  CHECK_THROWS_AS(resurgence_experiment(p, ramp, 0.3), invalid_parameter);
  CHECK_THROWS_AS(resurgence_experiment(p, ramp, -0.1), invalid_parameter);

  RampConfig gentle;
  gentle.r = 4e-3;
  gentle.alpha_max_rule = AlphaMaxRule::Explicit;
  gentle.alpha_max_explicit = 0.3;
  ResurgenceResult none = resurgence_experiment(p, gentle, 0.01);
  CHECK_FALSE(none.tipped);
  State3 still = coexistence_equilibrium(0.3, p).state;
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(none.endpoint[i] - still[i]) < 1e-5);
}

TEST_CASE("full dynamics converge to the reduced flow as epsilon shrinks") {
  ModelParams p = mp(0.2, 0.2);
  LimitCheckResult res = singular_limit_check(p, 0.4, {0.01, 0.04, 0.005, 0.02});
  REQUIRE(res.rows.size() == 4);
  CHECK(res.monotone);
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    CHECK(res.rows[i].eps < res.rows[i - 1].eps);  // sorted descending
    CHECK(res.rows[i].sup_err < res.rows[i - 1].sup_err);
  }
  for (const auto& row : res.rows) {
    CHECK(row.sup_err / row.eps > 1.5);
    CHECK(row.sup_err / row.eps < 3.5);
  }
  CHECK(res.H_start == doctest::Approx(2.15362).epsilon(1e-4));

  EquilibriumSet es = equilibrium_set(0.4, p);
  REQUIRE(es.enC_a.has_value());
  CHECK(res.H_start ==
        doctest::Approx(0.5 * (es.eI->state[0] + es.enC_a->state[0])).epsilon(1e-12));

  CHECK_THROWS_AS(singular_limit_check(p, 0.7, {0.01}), invalid_parameter);
  CHECK_THROWS_AS(singular_limit_check(p, 0.4, {}), invalid_parameter);
}

TEST_CASE("tipping runs reject setups without a bistable ramp window") {
  RampConfig still;
  still.r = 0.0;
  CHECK_THROWS_AS(run_tipping_experiment(mp(0.2, 0.2), still), invalid_parameter);
  RampConfig ramp;
  ramp.r = 4e-3;
  CHECK_THROWS_AS(run_tipping_experiment(mp(0.05, 0.9), ramp), invalid_parameter);
  CHECK_THROWS_AS(run_tipping_experiment(mp(1.2, 0.2), ramp), invalid_parameter);
  CHECK_THROWS_AS(repelling_dwell(Trajectory{}, mp(0.2, 0.2)), invalid_parameter);
}
