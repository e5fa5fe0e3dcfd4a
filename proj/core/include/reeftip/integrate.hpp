#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "reeftip/params.hpp"

namespace reeftip {

// dy and J are caller-owned buffers; J is row-major n x n
using RhsFn = std::function<void(double t, const double* y, double* dy)>;
using JacFn = std::function<void(double t, const double* y, double* J)>;

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 chooses automatically
  double newton_tol = 0.0;    // 0 derives the tolerance from rtol
  int newton_max_iters = 4;
  long max_steps = 2000000;
};

enum class EventKind { AlphaClampHit, FoldCrossing, EquilibriumConverged, LeftDomain, TipFloor };

const char* event_kind_name(EventKind kind);

struct Event {
  EventKind kind;
  double t;
  std::vector<double> y;
};

enum class Termination { ReachedEnd, TerminalEvent, MaxSteps, StepUnderflow, NonFinite };

struct EventSpec {
  EventKind kind;
  std::function<double(double t, const double* y)> g;
  int direction = 0;  // +1 up-crossings only, -1 down only, 0 both
  bool terminal = false;
};

// backward-difference polynomial over one accepted step
struct DenseSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  double h = 0.0;  // signed node spacing of the difference array
  int order = 1;
  std::vector<double> D;  // (order + 1) x dim, row-major
};

struct Trajectory {
  int dim = 0;
  double eps = 1.0;  // timescale ratio: tau = eps * t
  std::vector<double> t;
  std::vector<double> y;  // t.size() x dim, row-major
  std::vector<Event> events;
  std::vector<DenseSegment> segs;
  Termination termination = Termination::ReachedEnd;
  std::string message;

  std::size_t size() const { return t.size(); }
  const double* state(std::size_t i) const { return y.data() + i * dim; }
  double tau(std::size_t i) const { return eps * t[i]; }
  double t_end() const { return t.empty() ? 0.0 : t.back(); }

  // evaluate the dense interpolant; tq is clamped to the covered range
  std::vector<double> eval(double tq) const;
};

Trajectory integrate_stiff(const RhsFn& rhs, const JacFn& jac, int n,
                           const std::vector<double>& y0, double t0, double t1,
                           const IntegratorConfig& cfg,
                           const std::vector<EventSpec>& events = {});

// ramped run in fast time: alpha grows at slow rate r until it hits
// alpha_clamp, then the system relaxes at frozen alpha. The clamp value is
// pinned exactly at the phase switch.
Trajectory integrate_ramped(const State4& y0, const ModelParams& p, double r,
                            double alpha_clamp, double t_max, const IntegratorConfig& cfg,
                            bool tip_terminal = true, double tip_floor = 1e-6);

}  // namespace reeftip
