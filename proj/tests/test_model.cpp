#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "reeftip/manifold.hpp"
#include "reeftip/model.hpp"
#include "reeftip/params.hpp"

using namespace reeftip;
using testutil::mp;
using testutil::rel_err;

namespace {

double fd_central(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("scalar derivative helpers match finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uH(0.05, 6.0), ua(0.1, 0.8), ub(0.08, 0.7),
      ul(0.1, 0.9);
  for (int it = 0; it < 200; ++it) {
    ModelParams p = mp(ub(rng), ul(rng));
    double H = uH(rng), alpha = ua(rng);
    double h = 1e-6 * (1.0 + H);

    double fd_s = fd_central([&](double x) { return feeding_rate(x, p); }, H, h);
    CHECK(rel_err(feeding_rate_deriv(H), fd_s) < 1e-7);

    double fd_q = fd_central([&](double x) { return q_function(x, alpha, p); }, H, h);
    CHECK(std::fabs(q_function_dH(H, alpha, p) - fd_q) <
          1e-6 * (1.0 + std::fabs(fd_q)));

    double fd_pi = fd_central([&](double x) { return pi_function(x, p); }, H, h);
    CHECK(std::fabs(pi_function_dH(H, p) - fd_pi) < 1e-6 * (1.0 + std::fabs(fd_pi)));

    double fd_u = fd_central([&](double x) { return u_factor(x, p); }, H, h);
    CHECK(std::fabs(u_factor_dH(H, p) - fd_u) < 1e-6 * (1.0 + std::fabs(fd_u)));

    double fd_v = fd_central([&](double x) { return v_factor(x, p); }, H, h);
    CHECK(std::fabs(v_factor_dH(H, p) - fd_v) < 1e-6 * (1.0 + std::fabs(fd_v)));
  }
}

TEST_CASE("fold function reference value and inverse") {
  ModelParams p = mp(0.2, 0.2);
  CHECK(q_function(0.0, 0.4, p) == doctest::Approx(-8.220462809917356).epsilon(1e-13));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uH(0.05, 5.0);
  for (int it = 0; it < 100; ++it) {
    double H = uH(rng);
    double a = fold_alpha(H, p);
    CHECK(std::fabs(q_function(H, a, p)) < 1e-12 * (1.0 + a));
  }
}

TEST_CASE("sheet cover functions zero the fast subsystem") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> uH(0.1, 4.0), ua(0.15, 0.7), ub(0.08, 0.7),
      ul(0.1, 0.9);
  for (int it = 0; it < 200; ++it) {
    ModelParams p = mp(ub(rng), ul(rng));
    double H = uH(rng), alpha = ua(rng);
    State3 y{H, a_on_sheet(H, alpha, p), c_on_sheet(H, alpha, p)};
    State3 f = rhs_fast(y, alpha, p);
    CHECK(std::fabs(f[0]) < 1e-12 * (1.0 + std::fabs(H)));
    CHECK(std::fabs(f[1]) < 1e-12);
    double drift = lambda_drift(H, alpha, p, 0.3);
    double w = 1.0 + H;
    double manual = -w * w * (y[2] * v_factor(H, p) + 0.3 / feeding_rate(H, p));
    CHECK(rel_err(drift, manual) < 1e-12);
  }
}

TEST_CASE("fast vector field preserves the invariant faces") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uH(0.0, 4.0), u01(0.0, 1.0), ua(0.1, 0.8);
  ModelParams p = mp(0.2, 0.2);
  for (int it = 0; it < 500; ++it) {
    double alpha = ua(rng);
    State3 base{uH(rng), u01(rng), u01(rng)};

    State3 yH = base;
    yH[0] = 0.0;
    CHECK(rhs_fast(yH, alpha, p)[0] == 0.0);

    State3 yA = base;
    yA[1] = 0.0;
    CHECK(rhs_fast(yA, alpha, p)[1] == 0.0);

    State3 yC = base;
    yC[2] = 0.0;
    CHECK(rhs_fast(yC, alpha, p)[2] == 0.0);

    State3 ys = base;
    ys[2] = 1.0 - ys[1];  // algae plus coral saturate the substrate
    State3 f = rhs_fast(ys, alpha, p);
    CHECK(f[1] + f[2] <= 1e-14);
  }
}

TEST_CASE("analytic fast Jacobian matches finite differences") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> uH(0.05, 4.0), u01(0.02, 0.9), ua(0.1, 0.8),
      ub(0.08, 0.7), ul(0.1, 0.9);
  for (int it = 0; it < 100; ++it) {
    ModelParams p = mp(ub(rng), ul(rng));
    double alpha = ua(rng);
    State3 y{uH(rng), u01(rng), u01(rng)};
    auto J = jac_fast(y, alpha, p);
    for (int col = 0; col < 3; ++col) {
      double h = 1e-7 * (1.0 + std::fabs(y[col]));
      State3 yp = y, ym = y;
      yp[col] += h;
      ym[col] -= h;
      State3 fp = rhs_fast(yp, alpha, p), fm = rhs_fast(ym, alpha, p);
      for (int row = 0; row < 3; ++row) {
        double fd = (fp[row] - fm[row]) / (2.0 * h);
        CHECK(std::fabs(J[3 * row + col] - fd) < 1e-5 * (1.0 + std::fabs(fd)));
      }
    }
  }
}

TEST_CASE("ramped Jacobian covers the fishing column and fixes the rate row") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uH(0.05, 4.0), u01(0.02, 0.9), ua(0.1, 0.8);
  ModelParams p = mp(0.3, 0.4);
  double r_eff = 4e-3;
  for (int it = 0; it < 100; ++it) {
    State4 y{uH(rng), u01(rng), u01(rng), ua(rng)};
    auto J = jac_ramped(y, p, r_eff);
    for (int col = 0; col < 4; ++col) {
      double h = 1e-7 * (1.0 + std::fabs(y[col]));
      State4 yp = y, ym = y;
      yp[col] += h;
      ym[col] -= h;
      State4 fp = rhs_ramped(yp, p, r_eff), fm = rhs_ramped(ym, p, r_eff);
      for (int row = 0; row < 4; ++row) {
        double fd = (fp[row] - fm[row]) / (2.0 * h);
        CHECK(std::fabs(J[4 * row + col] - fd) < 1e-5 * (1.0 + std::fabs(fd)));
      }
    }
    CHECK(J[12] == 0.0);
    CHECK(J[13] == 0.0);
    CHECK(J[14] == 0.0);
    CHECK(J[15] == 0.0);
  }
}

TEST_CASE("reduced flow pushes toward the coexistence point and blows up at the fold") {
  ModelParams p = mp(0.2, 0.2);
  double alpha = 0.4;
  double H0 = fold_point(alpha, p);
  double H_I = coexistence_equilibrium(alpha, p).state[0];
  REQUIRE(H0 < H_I);
  CHECK(rhs_reduced_s02(0.5 * (H0 + H_I), alpha, p) > 0.0);
  CHECK(rhs_reduced_s02(H_I + 0.5, alpha, p) < 0.0);
  CHECK_THROWS_AS(rhs_reduced_s02(H0, alpha, p), numeric_failure);

  auto des = rhs_desingularized(1.0, alpha, p, 4e-3);
  CHECK(rel_err(des[0], lambda_drift(1.0, alpha, p, 4e-3)) < 1e-14);
  CHECK(rel_err(des[1], 4e-3 * q_function(1.0, alpha, p)) < 1e-14);
}

TEST_CASE("dimensional reduction reproduces the scaled parameters") {
  DimensionalParams dp;  // calibrated defaults
  std::vector<std::string> w;
  auto [p, alpha] = nondimensionalize(dp, &w);
  CHECK(p.lambda == doctest::Approx(0.32).epsilon(1e-15));
  CHECK(p.beta == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p.epsilon == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(p.d == 0.22);
  CHECK(alpha == doctest::Approx(0.03125).epsilon(1e-15));
  bool beta_warned = false;
  for (const auto& s : w)
    if (s.find(">= 1") != std::string::npos) beta_warned = true;
  CHECK(beta_warned);

  dp.f = 0.3;
  auto [p2, alpha2] = nondimensionalize(dp);
  (void)p2;
  CHECK(alpha2 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("parameter validation rejects nonpositive values and flags degeneracies") {
  CHECK_THROWS_AS(mp(0.2, 0.0).validate(), invalid_parameter);
  CHECK_THROWS_AS(mp(-0.1, 0.2).validate(), invalid_parameter);
  CHECK_THROWS_AS(mp(0.2, 0.2, -1.0).validate(), invalid_parameter);
  CHECK_THROWS_AS(mp(0.2, 0.2, 0.22, 0.0).validate(), invalid_parameter);

  bool degenerate_warned = false;
  for (const auto& s : mp(0.2, 0.9, 1.2).validate())
    if (s.find("coral-free") != std::string::npos) degenerate_warned = true;
  CHECK(degenerate_warned);

  DimensionalParams dp;
  dp.rA = 0.0;
  CHECK_THROWS_AS(dp.validate(), invalid_parameter);

  RampConfig ramp;
  ramp.r = -1.0;
  CHECK_THROWS_AS(ramp.validate(), invalid_parameter);
  ramp.r = 4e-3;
  ramp.delta = 0.0;
  CHECK_THROWS_AS(ramp.validate(), invalid_parameter);
}
