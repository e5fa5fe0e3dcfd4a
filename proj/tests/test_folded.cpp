#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "reeftip/folded.hpp"
#include "reeftip/manifold.hpp"
#include "reeftip/model.hpp"

using namespace reeftip;
using testutil::mp;
using testutil::rel_err;

TEST_CASE("desingularized equilibria at the benchmark rate") {
  ModelParams p = mp(0.15, 0.5);
  auto sings = find_folded_singularities(p, 4e-3);
  REQUIRE(sings.size() == 2);

  const FoldedSingularity& node = sings[0];
  CHECK(node.kind == FoldedKind::Node);
  CHECK(node.H_FS == doctest::Approx(0.48365771977437388).epsilon(1e-9));
  CHECK(node.alpha_FS == doctest::Approx(0.25123009250557432).epsilon(1e-9));
  CHECK(node.mu == doctest::Approx(19.979156198).epsilon(1e-6));
  CHECK(node.sectors == 9);
  CHECK(node.relevant);
  CHECK(node.trJ < 0.0);
  CHECK(node.detJ > 0.0);
  CHECK(node.Delta > 0.0);

  const FoldedSingularity& saddle = sings[1];
  CHECK(saddle.kind == FoldedKind::Saddle);
  CHECK(saddle.H_FS == doctest::Approx(0.72571541081).epsilon(1e-8));
  CHECK(saddle.alpha_FS == doctest::Approx(0.54018845288).epsilon(1e-8));
  CHECK(saddle.detJ < 0.0);
  CHECK_FALSE(saddle.relevant);
}

TEST_CASE("defining equations vanish at every reported singularity") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> ub(0.08, 0.6), ul(0.15, 0.9);
  for (int it = 0; it < 20; ++it) {
    ModelParams p = mp(ub(rng), ul(rng));
    for (double r : {1e-8, 1e-6, 1e-4}) {
      auto sings = find_folded_singularities(p, r);
      REQUIRE(sings.size() == 2);
      for (const auto& fs : sings) {
        double scale = 1.0 + std::fabs(fs.alpha_FS);
        CHECK(std::fabs(q_function(fs.H_FS, fs.alpha_FS, p)) < 1e-9 * scale);
        CHECK(std::fabs(lambda_drift(fs.H_FS, fs.alpha_FS, p, r)) < 1e-9 * scale);
        FoldedSingularity again = classify_folded(fs.H_FS, fs.alpha_FS, p, r);
        CHECK(again.kind == fs.kind);
      }
      CHECK(sings[0].relevant);
      CHECK_FALSE(sings[1].relevant);
    }
  }
  CHECK_THROWS_AS(classify_folded(1.0, 0.1, mp(0.2, 0.2), 1e-4), invalid_parameter);
}

TEST_CASE("zero rate collapses the singularities onto the threshold points") {
  ModelParams p = mp(0.2, 0.2);
  ThresholdSet t = threshold_set(p);
  auto sings = find_folded_singularities(p, 0.0);
  REQUIRE(sings.size() == 2);
  CHECK(sings[0].H_FS == doctest::Approx(t.H_hat).epsilon(1e-12));
  CHECK(sings[0].alpha_FS == doctest::Approx(t.alpha_hat).epsilon(1e-12));
  CHECK(sings[1].H_FS == doctest::Approx(t.H_I).epsilon(1e-12));
  CHECK(sings[1].alpha_FS == doctest::Approx(t.alpha_star).epsilon(1e-12));
  for (const auto& fs : sings) {
    CHECK(fs.kind == FoldedKind::Degenerate);
    CHECK(fs.detJ == 0.0);
    CHECK_FALSE(fs.boundary_warning);
  }
}

TEST_CASE("node eigenstructure is consistent with the desingularized field") {
  ModelParams p = mp(0.15, 0.5);
  double r = 4e-3;
  auto sings = find_folded_singularities(p, r);
  const FoldedSingularity& node = sings[0];
  REQUIRE(node.kind == FoldedKind::Node);

  double strong = node.eigenvalues[0].real();
  double weak = node.eigenvalues[1].real();
  if (std::fabs(strong) < std::fabs(weak)) std::swap(strong, weak);
  CHECK(node.mu == doctest::Approx(strong / weak).epsilon(1e-12));
  CHECK(node.sectors == static_cast<int>(std::floor((node.mu - 1.0) / 2.0)));
  CHECK(std::hypot(node.E_ss[0], node.E_ss[1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::hypot(node.E_s[0], node.E_s[1]) == doctest::Approx(1.0).epsilon(1e-12));

  // finite-difference Jacobian of the desingularized field at the node
  double h = 1e-6;
  auto field = [&](double H, double a) { return rhs_desingularized(H, a, p, r); };
  double J[4];
  {
    auto fp = field(node.H_FS + h, node.alpha_FS), fm = field(node.H_FS - h, node.alpha_FS);
    J[0] = (fp[0] - fm[0]) / (2 * h);
    J[2] = (fp[1] - fm[1]) / (2 * h);
  }
  {
    auto fp = field(node.H_FS, node.alpha_FS + h), fm = field(node.H_FS, node.alpha_FS - h);
    J[1] = (fp[0] - fm[0]) / (2 * h);
    J[3] = (fp[1] - fm[1]) / (2 * h);
  }
  for (auto [vec, lam] : {std::pair{node.E_ss, strong}, std::pair{node.E_s, weak}}) {
    double Jx = J[0] * vec[0] + J[1] * vec[1];
    double Jy = J[2] * vec[0] + J[3] * vec[1];
    CHECK(std::fabs(Jx - lam * vec[0]) < 1e-4 * (1.0 + std::fabs(lam)));
    CHECK(std::fabs(Jy - lam * vec[1]) < 1e-4 * (1.0 + std::fabs(lam)));
  }
}

TEST_CASE("discriminant derivative at zero rate matches the rate response") {
  ModelParams p = mp(0.2, 0.2);
  double dp0 = delta_prime_at_zero(p);
  CHECK(dp0 == doctest::Approx(-0.2377557526756728).epsilon(1e-9));

  auto delta_rel = [&](double r) {
    for (const auto& fs : find_folded_singularities(p, r))
      if (fs.relevant) return fs.Delta;
    REQUIRE(false);
    return 0.0;
  };
  double d1 = delta_rel(1e-7), d2 = delta_rel(2e-7);
  CHECK(d1 < 0.0);  // focus window right above zero rate
  // second-order slope: Delta grows a strong r^2 term when v(H_hat) is small
  CHECK(rel_err((4.0 * d1 - d2) / 2e-7, dp0) < 1e-3);
  CHECK(delta_rel(4e-3) > 0.0);  // node regime at the benchmark rate
}

TEST_CASE("critical ramp rate splits focus from node") {
  ModelParams p = mp(0.2, 0.2);
  CriticalRateResult res = critical_rate(p);
  REQUIRE(res.found);
  CHECK(res.r_crit == doctest::Approx(4.676837438710992e-06).epsilon(1e-9));
  CHECK(std::fabs(q_function(res.at.H_FS, res.at.alpha_FS, p)) < 1e-8);

  auto kind_at = [&](double r) {
    for (const auto& fs : find_folded_singularities(p, r))
      if (fs.relevant) return fs.kind;
    return FoldedKind::Degenerate;
  };
  CHECK(kind_at(0.9 * res.r_crit) == FoldedKind::Focus);
  CHECK(kind_at(1.1 * res.r_crit) == FoldedKind::Node);
}

TEST_CASE("parameter plane regions at the benchmark points") {
  auto expect = [&](ModelParams p, double r, RegionLabel want, double alpha_fs = -1.0,
                    double tol = 1e-8) {
    RegionResult res = region_classify(p, r);
    CHECK(res.label == want);
    if (alpha_fs > 0) {
      REQUIRE(res.singularity.has_value());
      CHECK(rel_err(res.singularity->alpha_FS, alpha_fs) < tol);
    }
  };
  expect(mp(0.18, 0.5), 4e-3, RegionLabel::I, 0.3143593838896257);
  expect(mp(0.15, 0.5), 4e-3, RegionLabel::I, 0.2512300925055743);
  expect(mp(0.2, 0.2), 4e-3, RegionLabel::II, 0.5005700634, 1e-7);
  expect(mp(0.3, 0.4), 4e-3, RegionLabel::IIIa, 0.482375426863656);
  expect(mp(0.3, 0.4), 1e-5, RegionLabel::IIIb);
  expect(mp(0.4, 0.6), 1e-5, RegionLabel::IIIb, 0.4675581756082701);
  expect(mp(0.2, 0.2), 3e-6, RegionLabel::IIIa, 0.6246583524, 1e-7);

  expect(mp(1.2, 0.2), 4e-3, RegionLabel::Excluded);   // no coexistence state
  expect(mp(0.05, 0.9), 4e-3, RegionLabel::Excluded);  // ramp start not bistable
  auto lc = bifurcation_curve_lambda(0.2, 0.22);
  REQUIRE(lc.has_value());
  expect(mp(0.2, *lc), 4e-3, RegionLabel::Boundary);
}

TEST_CASE("node region shrinks as the ramp slows") {
  auto count_nodes = [&](double r) {
    int n = 0;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) {
        double beta = 0.05 + 0.9 * i / 39.0;
        double lambda = 0.05 + 0.9 * j / 39.0;
        RegionLabel lab = region_classify(mp(beta, lambda), r).label;
        if (lab == RegionLabel::I || lab == RegionLabel::II) ++n;
      }
    return n;
  };
  int fast = count_nodes(4e-3);
  int slow = count_nodes(1e-6);
  CHECK(slow < fast);
}

TEST_CASE("funnel membership respects the sheet and the strong eigendirection") {
  ModelParams p = mp(0.15, 0.5);
  auto sings = find_folded_singularities(p, 4e-3);
  const FoldedSingularity& node = sings[0];
  REQUIRE(node.kind == FoldedKind::Node);

  // repelling side of the fold is never in the funnel
  CHECK_FALSE(in_funnel(node.H_FS, fold_alpha(node.H_FS, p) + 0.05, node, p));
  CHECK_FALSE(in_funnel(-0.1, 0.1, node, p));

  auto side = [&](double h, double a) {
    return node.E_ss[0] * (a - node.alpha_FS) - node.E_ss[1] * (h - node.H_FS);
  };
  double hl = node.H_FS - 0.05, hr = node.H_FS + 0.05;
  double al = fold_alpha(hl, p) - 0.01, ar = fold_alpha(hr, p) - 0.01;
  bool fl = in_funnel(hl, al, node, p), fr = in_funnel(hr, ar, node, p);
  if (side(hl, al) * side(hr, ar) < 0)
    CHECK(fl != fr);
  else
    CHECK(fl == fr);

  CHECK_THROWS_AS(in_funnel(0.5, 0.3, sings[1], p), invalid_parameter);
}
