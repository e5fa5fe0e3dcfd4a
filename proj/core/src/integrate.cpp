#include "reeftip/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "reeftip/model.hpp"

namespace reeftip {

namespace {

constexpr int MAX_ORDER = 5;
constexpr double MIN_FACTOR = 0.2;
constexpr double MAX_FACTOR = 10.0;
constexpr double EPS = 2.220446049250313e-16;
constexpr double INF = std::numeric_limits<double>::infinity();

// scaled RMS norm used for all step/Newton error controls
double rms_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s / v.size());
}

bool all_finite(const double* v, int n) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

struct LuFactors {
  int n = 0;
  std::vector<double> a;  // factored matrix, row-major
  std::vector<int> piv;

  bool factor(const std::vector<double>& m, int dim) {
    n = dim;
    a = m;
    piv.resize(n);
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::fabs(a[k * n + k]);
      for (int i = k + 1; i < n; ++i) {
        double cand = std::fabs(a[i * n + k]);
        if (cand > best) {
          best = cand;
          p = i;
        }
      }
      piv[k] = p;
      if (best == 0.0 || !std::isfinite(best)) return false;
      if (p != k)
        for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      double inv = 1.0 / a[k * n + k];
      for (int i = k + 1; i < n; ++i) {
        double l = a[i * n + k] * inv;
        a[i * n + k] = l;
        for (int j = k + 1; j < n; ++j) a[i * n + j] -= l * a[k * n + j];
      }
    }
    return true;
  }

  void solve(double* b) const {
    for (int k = 0; k < n; ++k) {
      if (piv[k] != k) std::swap(b[k], b[piv[k]]);
      for (int i = k + 1; i < n; ++i) b[i] -= a[i * n + k] * b[k];
    }
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) b[i] -= a[i * n + j] * b[j];
      b[i] /= a[i * n + i];
    }
  }
};

// R[i][j] built from M[i][j] = (i - 1 - factor*j)/i (i,j >= 1), M[0][:] = 1,
// cumulative products down each column
std::vector<double> compute_R(int order, double factor) {
  int m = order + 1;
  std::vector<double> M(m * m, 0.0);
  for (int j = 0; j < m; ++j) M[j] = 1.0;
  for (int i = 1; i < m; ++i)
    for (int j = 1; j < m; ++j) M[i * m + j] = (i - 1 - factor * j) / i;
  for (int i = 1; i < m; ++i)
    for (int j = 0; j < m; ++j) M[i * m + j] *= M[(i - 1) * m + j];
  return M;
}

// rescale the backward-difference array for a step-size change h -> factor*h
void change_D(std::vector<double>& D, int n, int order, double factor) {
  int m = order + 1;
  std::vector<double> R = compute_R(order, factor);
  std::vector<double> U = compute_R(order, 1.0);
  std::vector<double> RU(m * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      double r = R[i * m + k];
      if (r == 0.0) continue;
      for (int j = 0; j < m; ++j) RU[i * m + j] += r * U[k * m + j];
    }
  std::vector<double> nd(m * n, 0.0);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      double w = RU[k * m + i];
      if (w == 0.0) continue;
      for (int c = 0; c < n; ++c) nd[i * n + c] += w * D[k * n + c];
    }
  std::copy(nd.begin(), nd.end(), D.begin());
}

double select_initial_step(const RhsFn& rhs, double t0, const std::vector<double>& y0,
                           const std::vector<double>& f0, double t_bound, double max_step,
                           double direction, double rtol, double atol) {
  int n = static_cast<int>(y0.size());
  double interval = std::fabs(t_bound - t0);
  if (interval == 0.0) return 0.0;
  std::vector<double> scale(n);
  for (int i = 0; i < n; ++i) scale[i] = atol + std::fabs(y0[i]) * rtol;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = y0[i] / scale[i];
  double d0 = rms_norm(w);
  for (int i = 0; i < n; ++i) w[i] = f0[i] / scale[i];
  double d1 = rms_norm(w);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, interval);

  std::vector<double> y1(n), f1(n);
  for (int i = 0; i < n; ++i) y1[i] = y0[i] + h0 * direction * f0[i];
  rhs(t0 + h0 * direction, y1.data(), f1.data());
  for (int i = 0; i < n; ++i) w[i] = (f1[i] - f0[i]) / scale[i];
  double d2 = rms_norm(w) / h0;

  double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                           : std::pow(0.01 / std::max(d1, d2), 0.5);
  return std::min(std::min(100.0 * h0, h1), std::min(interval, max_step));
}

struct NewtonResult {
  bool converged = false;
  int n_iter = 0;
};

// damped-Newton solve of the implicit BDF stage equation; y and d are in/out
NewtonResult solve_bdf_system(const RhsFn& rhs, double t_new, std::vector<double>& y,
                              std::vector<double>& d, double c, const std::vector<double>& psi,
                              const LuFactors& lu, const std::vector<double>& scale, double tol,
                              int maxiter) {
  int n = static_cast<int>(y.size());
  std::vector<double> f(n), dy(n), w(n);
  NewtonResult res;
  double dy_norm_old = -1.0;
  int k = 0;
  for (k = 0; k < maxiter; ++k) {
    rhs(t_new, y.data(), f.data());
    if (!all_finite(f.data(), n)) break;
    for (int i = 0; i < n; ++i) dy[i] = c * f[i] - psi[i] - d[i];
    lu.solve(dy.data());
    for (int i = 0; i < n; ++i) w[i] = dy[i] / scale[i];
    double dy_norm = rms_norm(w);

    double rate = dy_norm_old >= 0 ? dy_norm / dy_norm_old : -1.0;
    if (rate >= 0 &&
        (rate >= 1.0 || std::pow(rate, maxiter - k) / (1.0 - rate) * dy_norm > tol))
      break;

    for (int i = 0; i < n; ++i) {
      y[i] += dy[i];
      d[i] += dy[i];
    }
    if (dy_norm == 0.0 || (rate >= 0 && rate / (1.0 - rate) * dy_norm < tol)) {
      res.converged = true;
      break;
    }
    dy_norm_old = dy_norm;
  }
  res.n_iter = std::min(k + 1, maxiter);
  return res;
}

class BdfStepper {
 public:
  BdfStepper(const RhsFn& rhs, const JacFn& jac, int n, const std::vector<double>& y0,
             double t0, double t_bound, const IntegratorConfig& cfg)
      : rhs_(rhs), jac_(jac), n_(n), t_(t0), t_bound_(t_bound), cfg_(cfg) {
    direction_ = t_bound >= t0 ? 1.0 : -1.0;
    y_ = y0;
    newton_tol_ = cfg.newton_tol > 0
                      ? cfg.newton_tol
                      : std::max(10.0 * EPS / cfg.rtol, std::min(0.03, std::sqrt(cfg.rtol)));
    maxiter_ = cfg.newton_max_iters;

    std::vector<double> f0(n);
    rhs_(t0, y_.data(), f0.data());
    if (!all_finite(f0.data(), n))
      throw numeric_failure("integrate_stiff: rhs not finite at the initial state");
    h_abs_ = cfg.initial_step > 0
                 ? std::min({cfg.initial_step, std::fabs(t_bound - t0), cfg.max_step})
                 : select_initial_step(rhs_, t0, y_, f0, t_bound, cfg.max_step, direction_,
                                       cfg.rtol, cfg.atol);
    if (h_abs_ <= 0) h_abs_ = std::fabs(t_bound - t0);

    for (int k = 1; k <= MAX_ORDER; ++k) gamma_[k] = gamma_[k - 1] + 1.0 / k;
    const double kappa[MAX_ORDER + 1] = {0.0, -0.1850, -1.0 / 9.0, -0.0823, -0.0415, 0.0};
    for (int k = 0; k <= MAX_ORDER; ++k) {
      alpha_[k] = (1.0 - kappa[k]) * gamma_[k];
      error_const_[k] = kappa[k] * gamma_[k] + 1.0 / (k + 1);
    }

    D_.assign((MAX_ORDER + 3) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      D_[i] = y_[i];
      D_[n + i] = f0[i] * h_abs_ * direction_;
    }
    J_.resize(n * n);
    jac_(t0, y_.data(), J_.data());
  }

  double t() const { return t_; }
  double t_old() const { return t_old_; }
  const std::vector<double>& y() const { return y_; }
  bool finished() const { return t_ == t_bound_; }

  DenseSegment dense() const {
    DenseSegment s;
    s.t0 = t_old_;
    s.t1 = t_;
    s.h = h_abs_ * direction_;
    s.order = order_;
    s.D.assign(D_.begin(), D_.begin() + (order_ + 1) * n_);
    return s;
  }

  bool step(std::string* msg) {
    t_old_ = t_;
    double t = t_;
    double max_step = cfg_.max_step;
    double min_step =
        10.0 * std::fabs(std::nextafter(t, direction_ * INF) - t);
    double h_abs = h_abs_;
    if (h_abs > max_step) {
      change_D(D_, n_, order_, max_step / h_abs);
      n_equal_steps_ = 0;
      h_abs = max_step;
    } else if (h_abs < min_step) {
      change_D(D_, n_, order_, min_step / h_abs);
      n_equal_steps_ = 0;
      h_abs = min_step;
    }

    bool lu_ok = lu_ok_;
    bool current_jac = false;  // analytic Jacobian is re-evaluated on demand
    int order = order_;
    std::vector<double> y_predict(n_), scale(n_), psi(n_), y_new(n_), d(n_);
    double safety = 0.9, error_norm = 0.0, c = 0.0;

    bool step_accepted = false;
    double t_new = t;
    while (!step_accepted) {
      if (h_abs < min_step) {
        if (msg) *msg = "step size underflow";
        return false;
      }
      double h = h_abs * direction_;
      t_new = t + h;
      if (direction_ * (t_new - t_bound_) > 0) {
        t_new = t_bound_;
        change_D(D_, n_, order, std::fabs(t_new - t) / h_abs);
        n_equal_steps_ = 0;
        lu_ok = false;
      }
      h = t_new - t;
      h_abs = std::fabs(h);

      for (int i = 0; i < n_; ++i) {
        double s = 0;
        for (int k = 0; k <= order; ++k) s += D_[k * n_ + i];
        y_predict[i] = s;
        scale[i] = cfg_.atol + cfg_.rtol * std::fabs(y_predict[i]);
      }
      for (int i = 0; i < n_; ++i) {
        double s = 0;
        for (int k = 1; k <= order; ++k) s += D_[k * n_ + i] * gamma_[k];
        psi[i] = s / alpha_[order];
      }
      c = h / alpha_[order];

      bool converged = false;
      int n_iter = maxiter_;
      while (!converged) {
        if (!lu_ok) {
          std::vector<double> m(n_ * n_);
          for (int i = 0; i < n_ * n_; ++i) m[i] = -c * J_[i];
          for (int i = 0; i < n_; ++i) m[i * n_ + i] += 1.0;
          lu_ok = lu_.factor(m, n_);
          if (!lu_ok) {
            if (current_jac) break;
            jac_(t_new, y_predict.data(), J_.data());
            current_jac = true;
            continue;
          }
        }
        y_new = y_predict;
        std::fill(d.begin(), d.end(), 0.0);
        NewtonResult nr = solve_bdf_system(rhs_, t_new, y_new, d, c, psi, lu_, scale,
                                           newton_tol_, maxiter_);
        n_iter = nr.n_iter;
        if (nr.converged) {
          converged = true;
          break;
        }
        if (current_jac) break;
        jac_(t_new, y_predict.data(), J_.data());
        lu_ok = false;
        current_jac = true;
      }

      if (!converged) {
        h_abs *= 0.5;
        change_D(D_, n_, order, 0.5);
        n_equal_steps_ = 0;
        lu_ok = false;
        continue;
      }

      safety = 0.9 * (2.0 * maxiter_ + 1.0) / (2.0 * maxiter_ + n_iter);
      std::vector<double> err(n_);
      for (int i = 0; i < n_; ++i) {
        scale[i] = cfg_.atol + cfg_.rtol * std::fabs(y_new[i]);
        err[i] = error_const_[order] * d[i] / scale[i];
      }
      error_norm = rms_norm(err);
      if (error_norm > 1.0) {
        double factor =
            std::max(MIN_FACTOR, safety * std::pow(error_norm, -1.0 / (order + 1)));
        h_abs *= factor;
        change_D(D_, n_, order, factor);
        n_equal_steps_ = 0;
        // the LU factorisation is deliberately kept here, mirroring the
        // reference implementation
        continue;
      }
      step_accepted = true;
    }

    n_equal_steps_ += 1;
    t_ = t_new;
    y_ = y_new;
    h_abs_ = h_abs;
    lu_ok_ = lu_ok;

    for (int i = 0; i < n_; ++i) {
      D_[(order + 2) * n_ + i] = d[i] - D_[(order + 1) * n_ + i];
      D_[(order + 1) * n_ + i] = d[i];
    }
    for (int k = order; k >= 0; --k)
      for (int i = 0; i < n_; ++i) D_[k * n_ + i] += D_[(k + 1) * n_ + i];

    if (n_equal_steps_ < order + 1) return true;

    double norms[3];
    norms[1] = error_norm;
    if (order > 1) {
      std::vector<double> e(n_);
      for (int i = 0; i < n_; ++i)
        e[i] = error_const_[order - 1] * D_[order * n_ + i] / scale[i];
      norms[0] = rms_norm(e);
    } else {
      norms[0] = INF;
    }
    if (order < MAX_ORDER) {
      std::vector<double> e(n_);
      for (int i = 0; i < n_; ++i)
        e[i] = error_const_[order + 1] * D_[(order + 2) * n_ + i] / scale[i];
      norms[2] = rms_norm(e);
    } else {
      norms[2] = INF;
    }

    double factors[3];
    for (int i = 0; i < 3; ++i)
      factors[i] = norms[i] == 0.0 ? INF : std::pow(norms[i], -1.0 / (order + i));
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (factors[i] > factors[best]) best = i;
    order += best - 1;
    order_ = order;

    double factor = std::min(MAX_FACTOR, safety * *std::max_element(factors, factors + 3));
    h_abs_ *= factor;
    change_D(D_, n_, order, factor);
    n_equal_steps_ = 0;
    lu_ok_ = false;
    return true;
  }

 private:
  RhsFn rhs_;
  JacFn jac_;
  int n_;
  double t_, t_old_ = 0.0, t_bound_, direction_ = 1.0, h_abs_ = 0.0;
  IntegratorConfig cfg_;
  double newton_tol_;
  int maxiter_;
  std::vector<double> y_;
  std::vector<double> D_;
  std::vector<double> J_;
  LuFactors lu_;
  bool lu_ok_ = false;
  int order_ = 1;
  int n_equal_steps_ = 0;
  double gamma_[MAX_ORDER + 1] = {0.0};
  double alpha_[MAX_ORDER + 1] = {0.0};
  double error_const_[MAX_ORDER + 1] = {0.0};
};

std::vector<double> eval_segment(const DenseSegment& s, int dim, double tq) {
  std::vector<double> out(s.D.begin(), s.D.begin() + dim);
  double p = 1.0;
  for (int j = 1; j <= s.order; ++j) {
    double x = (tq - (s.t1 - s.h * (j - 1))) / (s.h * j);
    p *= x;
    for (int i = 0; i < dim; ++i) out[i] += s.D[j * dim + i] * p;
  }
  return out;
}

double locate_event(const EventSpec& spec, const DenseSegment& seg, int dim, double a,
                    double b, double ga, double gb) {
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  for (int it = 0; it < 200 && (b - a) > 4.0 * EPS * std::max(std::fabs(a), std::fabs(b));
       ++it) {
    double m = 0.5 * (a + b);
    std::vector<double> ym = eval_segment(seg, dim, m);
    double gm = spec.g(m, ym.data());
    if ((gm > 0) == (ga > 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return b;
}

}  // namespace

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::AlphaClampHit: return "alpha-clamp-hit";
    case EventKind::FoldCrossing: return "fold-crossing";
    case EventKind::EquilibriumConverged: return "equilibrium-converged";
    case EventKind::LeftDomain: return "left-domain";
    case EventKind::TipFloor: return "tip-floor";
  }
  return "unknown";
}

std::vector<double> Trajectory::eval(double tq) const {
  if (segs.empty()) {
    if (t.empty()) throw numeric_failure("Trajectory::eval on empty trajectory");
    return std::vector<double>(y.begin(), y.begin() + dim);
  }
  if (tq <= segs.front().t0) return eval_segment(segs.front(), dim, segs.front().t0);
  std::size_t lo = 0, hi = segs.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (segs[mid].t1 < tq)
      lo = mid + 1;
    else
      hi = mid;
  }
  double tc = std::min(tq, segs[lo].t1);
  return eval_segment(segs[lo], dim, tc);
}

Trajectory integrate_stiff(const RhsFn& rhs, const JacFn& jac, int n,
                           const std::vector<double>& y0, double t0, double t1,
                           const IntegratorConfig& cfg, const std::vector<EventSpec>& events) {
  if (n <= 0 || static_cast<int>(y0.size()) != n)
    throw invalid_parameter("integrate_stiff: state size mismatch");
  if (!all_finite(y0.data(), n))
    throw invalid_parameter("integrate_stiff: initial state is not finite");
  if (!(cfg.rtol > 0 && cfg.atol > 0))
    throw invalid_parameter("integrate_stiff: tolerances must be positive");

  Trajectory traj;
  traj.dim = n;
  traj.t.push_back(t0);
  traj.y.insert(traj.y.end(), y0.begin(), y0.end());
  if (t1 == t0) return traj;

  BdfStepper stepper(rhs, jac, n, y0, t0, t1, cfg);
  std::vector<double> g_prev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(t0, y0.data());

  double dir = t1 >= t0 ? 1.0 : -1.0;
  long steps = 0;
  while (true) {
    if (steps++ >= cfg.max_steps) {
      traj.termination = Termination::MaxSteps;
      traj.message = "step budget exhausted";
      return traj;
    }
    std::string msg;
    if (!stepper.step(&msg)) {
      traj.termination = Termination::StepUnderflow;
      traj.message = msg;
      return traj;
    }
    if (!all_finite(stepper.y().data(), n)) {
      traj.termination = Termination::NonFinite;
      traj.message = "state became non-finite";
      return traj;
    }

    DenseSegment seg = stepper.dense();
    traj.segs.push_back(seg);
    double ta = stepper.t_old();
    double tb = stepper.t();
    const std::vector<double>& yb = stepper.y();

    struct Hit {
      double te;
      std::size_t idx;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < events.size(); ++i) {
      double gn = events[i].g(tb, yb.data());
      bool up = g_prev[i] <= 0 && gn >= 0;
      bool down = g_prev[i] >= 0 && gn <= 0;
      bool active = events[i].direction > 0 ? up
                    : events[i].direction < 0 ? down
                                              : (up || down);
      // a flat zero is not a crossing
      if (g_prev[i] == 0 && gn == 0) active = false;
      if (active)
        hits.push_back({locate_event(events[i], seg, n, ta, tb, g_prev[i], gn), i});
      g_prev[i] = gn;
    }
    std::sort(hits.begin(), hits.end(),
              [dir](const Hit& a, const Hit& b) { return dir * a.te < dir * b.te; });

    double t_stop = tb;
    bool terminal = false;
    EventKind stop_kind{};
    for (const Hit& h : hits) {
      if (terminal && dir * h.te > dir * t_stop) break;
      std::vector<double> ye = eval_segment(seg, n, h.te);
      traj.events.push_back({events[h.idx].kind, h.te, ye});
      if (!terminal && events[h.idx].terminal) {
        terminal = true;
        t_stop = h.te;
        stop_kind = events[h.idx].kind;
      }
    }

    if (terminal) {
      std::vector<double> ystop = eval_segment(seg, n, t_stop);
      traj.t.push_back(t_stop);
      traj.y.insert(traj.y.end(), ystop.begin(), ystop.end());
      traj.termination = Termination::TerminalEvent;
      traj.message = event_kind_name(stop_kind);
      return traj;
    }

    traj.t.push_back(tb);
    traj.y.insert(traj.y.end(), yb.begin(), yb.end());
    if (stepper.finished()) {
      traj.termination = Termination::ReachedEnd;
      return traj;
    }
  }
}

namespace {

RhsFn make_ramped_rhs(const ModelParams& p, double r_eff) {
  return [p, r_eff](double, const double* y, double* dy) {
    State4 s{y[0], y[1], y[2], y[3]};
    State4 out = rhs_ramped(s, p, r_eff);
    std::copy(out.begin(), out.end(), dy);
  };
}

JacFn make_ramped_jac(const ModelParams& p, double r_eff) {
  return [p, r_eff](double, const double* y, double* J) {
    State4 s{y[0], y[1], y[2], y[3]};
    auto out = jac_ramped(s, p, r_eff);
    std::copy(out.begin(), out.end(), J);
  };
}

EventSpec fold_event(const ModelParams& p) {
  return {EventKind::FoldCrossing,
          [p](double, const double* y) {
            return q_function(std::max(y[0], 0.0), y[3], p);
          },
          0, false};
}

EventSpec tip_event(double floor, bool terminal) {
  return {EventKind::TipFloor, [floor](double, const double* y) { return y[0] - floor; },
          -1, terminal};
}

EventSpec domain_event() {
  return {EventKind::LeftDomain, [](double, const double* y) { return y[0] - H_BIG; }, +1,
          true};
}

EventSpec equilibrium_event(const ModelParams& p) {
  return {EventKind::EquilibriumConverged,
          [p](double, const double* y) {
            State4 s{y[0], y[1], y[2], y[3]};
            State4 f = rhs_ramped(s, p, 0.0);
            return std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]) - 1e-10;
          },
          -1, true};
}

}  // namespace

Trajectory integrate_ramped(const State4& y0, const ModelParams& p, double r,
                            double alpha_clamp, double t_max, const IntegratorConfig& cfg,
                            bool tip_terminal, double tip_floor) {
  if (!(r >= 0)) throw invalid_parameter("integrate_ramped requires r >= 0");
  if (!(t_max > 0)) throw invalid_parameter("integrate_ramped requires t_max > 0");
  std::vector<double> start(y0.begin(), y0.end());

  if (r == 0.0 || y0[3] >= alpha_clamp) {
    Trajectory traj = integrate_stiff(
        make_ramped_rhs(p, 0.0), make_ramped_jac(p, 0.0), 4, start, 0.0, t_max, cfg,
        {fold_event(p), tip_event(tip_floor, tip_terminal), domain_event(),
         equilibrium_event(p)});
    traj.eps = p.epsilon;
    return traj;
  }

  std::vector<EventSpec> ev1 = {
      {EventKind::AlphaClampHit,
       [alpha_clamp](double, const double* y) { return y[3] - alpha_clamp; }, +1, true},
      fold_event(p), tip_event(tip_floor, tip_terminal), domain_event()};
  Trajectory traj = integrate_stiff(make_ramped_rhs(p, r), make_ramped_jac(p, r), 4, start,
                                    0.0, t_max, cfg, ev1);
  traj.eps = p.epsilon;

  bool clamped = traj.termination == Termination::TerminalEvent &&
                 !traj.events.empty() && traj.message == "alpha-clamp-hit";
  if (!clamped) return traj;

  // pin the ramp target exactly: with the ramp frozen the solver then keeps
  // alpha bit-identical for the rest of the run
  std::size_t last = traj.size() - 1;
  traj.y[last * 4 + 3] = alpha_clamp;
  for (auto it = traj.events.rbegin(); it != traj.events.rend(); ++it)
    if (it->kind == EventKind::AlphaClampHit) {
      it->y[3] = alpha_clamp;
      break;
    }
  double t_c = traj.t[last];
  if (t_c >= t_max) return traj;

  std::vector<double> yc(traj.y.begin() + last * 4, traj.y.begin() + (last + 1) * 4);
  Trajectory relax = integrate_stiff(
      make_ramped_rhs(p, 0.0), make_ramped_jac(p, 0.0), 4, yc, t_c, t_max, cfg,
      {fold_event(p), tip_event(tip_floor, tip_terminal), domain_event(),
       equilibrium_event(p)});

  for (std::size_t i = 1; i < relax.size(); ++i) {
    traj.t.push_back(relax.t[i]);
    traj.y.insert(traj.y.end(), relax.y.begin() + i * 4, relax.y.begin() + (i + 1) * 4);
  }
  traj.events.insert(traj.events.end(), relax.events.begin(), relax.events.end());
  traj.segs.insert(traj.segs.end(), relax.segs.begin(), relax.segs.end());
  traj.termination = relax.termination;
  traj.message = relax.message.empty() ? "ramp clamped, relaxed at fixed alpha"
                                       : "clamped then " + relax.message;
  return traj;
}

}  // namespace reeftip
