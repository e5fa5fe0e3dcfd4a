#include "reeftip/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "reeftip/model.hpp"

namespace reeftip {

namespace {

constexpr double DWELL_DTAU = 0.01;

double linf3(const double* a, const double* b) {
  double m = 0;
  for (int i = 0; i < 3; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

std::optional<Event> first_event(const Trajectory& traj, EventKind kind) {
  for (const Event& e : traj.events)
    if (e.kind == kind) return e;
  return std::nullopt;
}

std::vector<double> sample_H_on_grid(const Trajectory& traj, double tau0, double tau1,
                                     double dtau) {
  std::vector<double> h;
  if (!(tau1 > tau0) || !(traj.eps > 0)) return h;
  std::size_t n = static_cast<std::size_t>(std::floor((tau1 - tau0) / dtau)) + 1;
  h.reserve(n);
  for (std::size_t k = 0; k < n; ++k) h.push_back(traj.eval((tau0 + k * dtau) / traj.eps)[0]);
  return h;
}

struct Peak {
  std::size_t idx;
  double height;
  double prominence;
};

std::vector<Peak> find_peaks(const std::vector<double>& h) {
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    if (!(h[i] > h[i - 1] && h[i] > h[i + 1])) continue;
    double left_min = h[i];
    for (std::size_t j = i; j-- > 0;) {
      if (h[j] > h[i]) break;
      left_min = std::min(left_min, h[j]);
    }
    double right_min = h[i];
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      if (h[j] > h[i]) break;
      right_min = std::min(right_min, h[j]);
    }
    peaks.push_back({i, h[i], h[i] - std::max(left_min, right_min)});
  }
  return peaks;
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  if (const char* env = std::getenv("REEFTIP_JOBS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

double repelling_dwell(const Trajectory& traj, const ModelParams& p, double c_tube) {
  if (traj.dim != 4) throw invalid_parameter("repelling_dwell needs a ramped trajectory");
  auto fold = first_event(traj, EventKind::FoldCrossing);
  if (!fold) return 0.0;
  double tau0 = traj.eps * fold->t;
  auto tip = first_event(traj, EventKind::TipFloor);
  double tau1 = tip ? traj.eps * tip->t : traj.eps * traj.t_end();
  if (!(tau1 > tau0)) return 0.0;

  double tube = c_tube * std::sqrt(p.epsilon);
  double dwell = 0.0;
  std::size_t n = static_cast<std::size_t>(std::floor((tau1 - tau0) / DWELL_DTAU)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> y = traj.eval((tau0 + k * DWELL_DTAU) / traj.eps);
    double H = std::max(y[0], 0.0);
    double alpha = y[3];
    double s = feeding_rate(H, p);
    double cs = c_on_sheet(H, alpha, p);
    bool on_repelling = q_function(H, alpha, p) < 0 && cs >= 0 &&
                        std::fabs(y[1] - alpha / s) < tube && std::fabs(y[2] - cs) < tube;
    if (on_repelling) dwell += DWELL_DTAU;
  }
  return dwell;
}

int count_subthreshold_oscillations(const Trajectory& traj, double prominence) {
  auto fold = first_event(traj, EventKind::FoldCrossing);
  auto tip = first_event(traj, EventKind::TipFloor);
  if (!fold || !tip) return 0;
  std::vector<double> h =
      sample_H_on_grid(traj, traj.eps * fold->t, traj.eps * tip->t, DWELL_DTAU);
  int count = 0;
  for (const Peak& pk : find_peaks(h))
    if (pk.prominence > prominence) ++count;
  return count;
}

bool has_interior_amplitude_minimum(const Trajectory& traj, double H_I) {
  auto tip = first_event(traj, EventKind::TipFloor);
  if (!tip) return false;
  // grid fine enough to resolve the fast ringing around the focus
  std::vector<double> h = sample_H_on_grid(traj, 0.0, traj.eps * tip->t, 0.02);
  std::vector<Peak> peaks = find_peaks(h);
  if (peaks.size() < 3) return false;
  std::size_t argmin = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    double amp = std::fabs(peaks[k].height - H_I);
    if (amp < best) {
      best = amp;
      argmin = k;
    }
  }
  return argmin > 0 && argmin + 1 < peaks.size();
}

TippingRun run_tipping_experiment(const ModelParams& p, const RampConfig& ramp_in,
                                  const IntegratorConfig& cfg, const ExperimentOptions& opts) {
  RampConfig ramp = ramp_in.resolved ? ramp_in : resolve_ramp(p, ramp_in);
  if (!(ramp.r > 0)) throw invalid_parameter("tipping experiment requires r > 0");

  ReducedFlowRegime rf = reduced_flow_regime(ramp.alpha_min_delta, p);
  if (rf.item != 1)
    throw invalid_parameter(
        "ramp start is not in the bistable window (coexistence and coral-free state "
        "both attracting)");

  State3 y0 = opts.y0 ? *opts.y0 : rf.equilibria.eI->state;
  double tau_span = ramp.alpha_max_delta - ramp.alpha_min_delta;
  double tau_max = opts.tau_max > 0 ? opts.tau_max : tau_span / ramp.r + 3000.0;
  State4 s0{y0[0], y0[1], y0[2], ramp.alpha_min_delta};

  TippingRun run;
  run.thresholds = rf.thresholds;
  run.ramp = ramp;
  run.trajectory = integrate_ramped(s0, p, ramp.r, ramp.alpha_max_delta,
                                    tau_max / p.epsilon, cfg, false, opts.H_tip_floor);
  const Trajectory& traj = run.trajectory;

  Outcome& o = run.outcome;
  std::size_t last = traj.size() - 1;
  const double* end = traj.state(last);
  o.alpha_end = end[3];
  if (auto tip = first_event(traj, EventKind::TipFloor)) {
    o.tip_tau = traj.eps * tip->t;
    o.tip_alpha = tip->y[3];
  }
  if (auto fold = first_event(traj, EventKind::FoldCrossing)) {
    o.first_fold_tau = traj.eps * fold->t;
    o.first_fold_alpha = fold->y[3];
  }
  o.dwell_tau = repelling_dwell(traj, p, opts.c_tube);
  o.oscillations = count_subthreshold_oscillations(traj, 100.0 * cfg.atol);

  State3 eI_end = coexistence_equilibrium(o.alpha_end, p).state;
  State3 eA{0.0, 1.0, 0.0};
  bool tracked = linf3(end, eI_end.data()) <= opts.tol_track;
  bool tipped = linf3(end, eA.data()) <= opts.tol_track;

  if (tracked) {
    o.label = OutcomeLabel::Tracked;
  } else if (tipped) {
    double alpha_exit = std::min(run.thresholds.alpha_plus, run.thresholds.alpha_hat);
    if (o.alpha_end > alpha_exit)
      o.label = OutcomeLabel::BifurcationTipped;
    else if (o.dwell_tau >= opts.T_c)
      o.label = OutcomeLabel::CanardTipped;
    else
      o.label = OutcomeLabel::JumpTipped;
  } else {
    o.label = OutcomeLabel::Unresolved;
  }
  return run;
}

SweepResult sweep_regime_map(const std::vector<double>& betas,
                             const std::vector<double>& lambdas, double d, double epsilon,
                             double r, bool simulate, int jobs, const IntegratorConfig& cfg) {
  if (betas.empty() || lambdas.empty())
    throw invalid_parameter("sweep_regime_map requires non-empty axes");
  SweepResult res;
  res.betas = betas;
  res.lambdas = lambdas;
  res.cells.resize(betas.size() * lambdas.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= res.cells.size()) return;
      std::size_t i = idx / lambdas.size();
      std::size_t j = idx % lambdas.size();
      SweepCell& cell = res.cells[idx];
      cell.beta = betas[i];
      cell.lambda = lambdas[j];
      ModelParams p{lambdas[j], betas[i], d, epsilon};
      try {
        RegionResult rr = region_classify(p, r);
        cell.region = rr.label;
        if (rr.singularity) {
          cell.alpha_FS = rr.singularity->alpha_FS;
          if (rr.singularity->kind == FoldedKind::Node) cell.mu = rr.singularity->mu;
        }
        bool labeled = rr.label == RegionLabel::I || rr.label == RegionLabel::II ||
                       rr.label == RegionLabel::IIIa || rr.label == RegionLabel::IIIb;
        if (simulate && labeled) {
          RampConfig ramp;
          ramp.r = r;
          ramp.alpha_max_rule = AlphaMaxRule::MinPlusStar;
          cell.outcome = run_tipping_experiment(p, ramp, cfg).outcome.label;
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };

  int n_jobs = std::min<int>(resolve_jobs(jobs), static_cast<int>(res.cells.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < n_jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return res;
}

ResurgenceResult resurgence_experiment(const ModelParams& p, const RampConfig& ramp_in,
                                       double reset_alpha, const IntegratorConfig& cfg,
                                       const ExperimentOptions& opts) {
  if (!(reset_alpha >= 0))
    throw invalid_parameter("resurgence reset alpha must be nonnegative");
  if (reset_alpha >= p.d)
    throw invalid_parameter("resurgence reset alpha must drop below d");

  RampConfig ramp = ramp_in.resolved ? ramp_in : resolve_ramp(p, ramp_in);
  if (!(ramp.r > 0)) throw invalid_parameter("resurgence experiment requires r > 0");
  ReducedFlowRegime rf = reduced_flow_regime(ramp.alpha_min_delta, p);
  if (rf.item != 1)
    throw invalid_parameter("ramp start is not in the bistable window");

  State3 y0 = opts.y0 ? *opts.y0 : rf.equilibria.eI->state;
  double tau_span = ramp.alpha_max_delta - ramp.alpha_min_delta;
  double tau_max = opts.tau_max > 0 ? opts.tau_max : tau_span / ramp.r + 3000.0;
  State4 s0{y0[0], y0[1], y0[2], ramp.alpha_min_delta};

  ResurgenceResult res;
  res.reset_alpha = reset_alpha;
  res.target = coexistence_equilibrium(reset_alpha, p).state;
  res.trajectory = integrate_ramped(s0, p, ramp.r, ramp.alpha_max_delta,
                                    tau_max / p.epsilon, cfg, true, opts.H_tip_floor);
  Trajectory& traj = res.trajectory;

  bool tipped = traj.termination == Termination::TerminalEvent &&
                first_event(traj, EventKind::TipFloor).has_value() &&
                traj.message.find("tip-floor") != std::string::npos;
  res.tipped = tipped;
  if (!tipped) {
    std::size_t last = traj.size() - 1;
    std::copy(traj.state(last), traj.state(last) + 3, res.endpoint.begin());
    return res;  // nothing to reverse
  }

  std::size_t last = traj.size() - 1;
  double t_tip = traj.t[last];
  res.reset_tau = traj.eps * t_tip;
  std::vector<double> yc(traj.state(last), traj.state(last) + 4);
  yc[3] = reset_alpha;

  RhsFn rhs = [p](double, const double* y, double* dy) {
    State4 s{y[0], y[1], y[2], y[3]};
    State4 out = rhs_ramped(s, p, 0.0);
    std::copy(out.begin(), out.end(), dy);
  };
  JacFn jac = [p](double, const double* y, double* J) {
    State4 s{y[0], y[1], y[2], y[3]};
    auto out = jac_ramped(s, p, 0.0);
    std::copy(out.begin(), out.end(), J);
  };
  std::vector<EventSpec> ev = {
      {EventKind::EquilibriumConverged,
       [p](double, const double* y) {
         State4 s{y[0], y[1], y[2], y[3]};
         State4 f = rhs_ramped(s, p, 0.0);
         return std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]) - 1e-10;
       },
       -1, true},
      {EventKind::LeftDomain, [](double, const double* y) { return y[0] - H_BIG; }, +1,
       true}};
  Trajectory relax =
      integrate_stiff(rhs, jac, 4, yc, t_tip, t_tip + 3000.0 / p.epsilon, cfg, ev);

  double t_relax_start = t_tip;
  for (std::size_t i = 1; i < relax.size(); ++i) {
    traj.t.push_back(relax.t[i]);
    traj.y.insert(traj.y.end(), relax.y.begin() + i * 4, relax.y.begin() + (i + 1) * 4);
  }
  traj.events.insert(traj.events.end(), relax.events.begin(), relax.events.end());
  traj.segs.insert(traj.segs.end(), relax.segs.begin(), relax.segs.end());
  traj.termination = relax.termination;
  traj.message = "tipped then relaxed at reset alpha";

  std::size_t end = traj.size() - 1;
  std::copy(traj.state(end), traj.state(end) + 3, res.endpoint.begin());
  res.recovered = linf3(traj.state(end), res.target.data()) <= opts.tol_track;

  double tau_a = traj.eps * t_relax_start;
  double tau_b = traj.eps * traj.t_end();
  for (double tau = tau_a; tau <= tau_b; tau += DWELL_DTAU)
    res.H_max_recovery = std::max(res.H_max_recovery, traj.eval(tau / traj.eps)[0]);
  return res;
}

LimitCheckResult singular_limit_check(const ModelParams& p, double alpha,
                                      const std::vector<double>& eps_list,
                                      const IntegratorConfig& cfg) {
  if (eps_list.empty()) throw invalid_parameter("singular_limit_check needs eps values");
  ReducedFlowRegime rf = reduced_flow_regime(alpha, p);
  if (rf.item != 1 || !rf.equilibria.enC_a)
    throw invalid_parameter("singular_limit_check requires the bistable regime");

  LimitCheckResult res;
  res.alpha = alpha;
  double H_I = rf.equilibria.eI->state[0];
  double H_a = rf.equilibria.enC_a->state[0];
  res.H_start = 0.5 * (H_I + H_a);
  const double tau_end = 20.0;
  const int n_grid = 256;

  // reduced flow on the attracting sheet, slow time
  RhsFn rhs_red = [p, alpha](double, const double* y, double* dy) {
    dy[0] = rhs_reduced_s02(y[0], alpha, p);
  };
  JacFn jac_red = [p, alpha](double, const double* y, double* J) {
    double h = 1e-6 * (1.0 + std::fabs(y[0]));
    J[0] = (rhs_reduced_s02(y[0] + h, alpha, p) - rhs_reduced_s02(y[0] - h, alpha, p)) /
           (2.0 * h);
  };
  Trajectory red = integrate_stiff(rhs_red, jac_red, 1, {res.H_start}, 0.0, tau_end, cfg);

  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<double>());
  for (double eps : eps_sorted) {
    if (!(eps > 0)) throw invalid_parameter("eps values must be positive");
    ModelParams pe = p;
    pe.epsilon = eps;
    State3 y0{res.H_start, a_on_sheet(res.H_start, alpha, pe),
              c_on_sheet(res.H_start, alpha, pe)};
    RhsFn rhs3 = [pe, alpha](double, const double* y, double* dy) {
      State3 s{y[0], y[1], y[2]};
      State3 out = rhs_fast(s, alpha, pe);
      std::copy(out.begin(), out.end(), dy);
    };
    JacFn jac3 = [pe, alpha](double, const double* y, double* J) {
      State3 s{y[0], y[1], y[2]};
      auto out = jac_fast(s, alpha, pe);
      std::copy(out.begin(), out.end(), J);
    };
    Trajectory full = integrate_stiff(rhs3, jac3, 3, {y0[0], y0[1], y0[2]}, 0.0,
                                      tau_end / eps, cfg);

    double sup = 0.0;
    for (int k = 0; k < n_grid; ++k) {
      double tau = tau_end * k / (n_grid - 1);
      double Hf = full.eval(tau / eps)[0];
      double Hr = red.eval(tau)[0];
      sup = std::max(sup, std::fabs(Hf - Hr));
    }
    res.rows.push_back({eps, sup});
  }

  res.monotone = true;
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    if (!(res.rows[i].sup_err < res.rows[i - 1].sup_err)) res.monotone = false;
  return res;
}

}  // namespace reeftip
