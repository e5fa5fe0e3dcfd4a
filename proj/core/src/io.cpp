#include "reeftip/io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace reeftip {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

const char* outcome_name(OutcomeLabel label) {
  switch (label) {
    case OutcomeLabel::Tracked: return "tracked";
    case OutcomeLabel::CanardTipped: return "canard-tipped";
    case OutcomeLabel::JumpTipped: return "jump-tipped";
    case OutcomeLabel::BifurcationTipped: return "bifurcation-tipped";
    case OutcomeLabel::Unresolved: return "unresolved";
  }
  return "unknown";
}

const char* region_name(RegionLabel label) {
  switch (label) {
    case RegionLabel::I: return "I";
    case RegionLabel::II: return "II";
    case RegionLabel::IIIa: return "IIIa";
    case RegionLabel::IIIb: return "IIIb";
    case RegionLabel::Boundary: return "boundary";
    case RegionLabel::Excluded: return "excluded";
  }
  return "unknown";
}

const char* folded_kind_name(FoldedKind kind) {
  switch (kind) {
    case FoldedKind::Node: return "node";
    case FoldedKind::Focus: return "focus";
    case FoldedKind::Saddle: return "saddle";
    case FoldedKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedEnd: return "reached-end";
    case Termination::TerminalEvent: return "terminal-event";
    case Termination::MaxSteps: return "max-steps";
    case Termination::StepUnderflow: return "step-underflow";
    case Termination::NonFinite: return "non-finite";
  }
  return "unknown";
}

const char* ordering_name(ThresholdOrdering o) {
  switch (o) {
    case ThresholdOrdering::PlusHatStar: return "plus-hat-star";
    case ThresholdOrdering::StarPlusHat: return "star-plus-hat";
    case ThresholdOrdering::Coincident: return "coincident";
  }
  return "unknown";
}

const char* layer_class_name(LayerClass c) {
  switch (c) {
    case LayerClass::Attracting: return "attracting";
    case LayerClass::Repelling: return "repelling";
    case LayerClass::Saddle: return "saddle";
    case LayerClass::NonHyperbolic: return "non-hyperbolic";
  }
  return "unknown";
}

const char* reduced_stability_name(ReducedStability s) {
  switch (s) {
    case ReducedStability::Attracting: return "attracting";
    case ReducedStability::Repelling: return "repelling";
    case ReducedStability::NonHyperbolic: return "non-hyperbolic";
  }
  return "unknown";
}

const char* branch_name(BranchId b) {
  switch (b) {
    case BranchId::S00: return "extinct";
    case BranchId::S01: return "algae-only";
    case BranchId::S02: return "grazed";
  }
  return "unknown";
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  if (traj.dim != 4)
    throw invalid_parameter("write_trajectory_csv expects a ramped trajectory");
  std::ofstream out(path);
  if (!out) throw numeric_failure("cannot open " + path + " for writing");
  out << "t,tau,H,A,C,alpha\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double* y = traj.state(i);
    out << fmt17(traj.t[i]) << ',' << fmt17(traj.tau(i)) << ',' << fmt17(y[0]) << ','
        << fmt17(y[1]) << ',' << fmt17(y[2]) << ',' << fmt17(y[3]) << '\n';
  }
  if (!out) throw numeric_failure("failed while writing " + path);
}

void write_events_json(const std::string& path, const Trajectory& traj) {
  nlohmann::json doc;
  doc["termination"] = termination_name(traj.termination);
  doc["message"] = traj.message;
  doc["events"] = nlohmann::json::array();
  for (const Event& e : traj.events) {
    nlohmann::json je;
    je["kind"] = event_kind_name(e.kind);
    je["t"] = e.t;
    je["tau"] = traj.eps * e.t;
    je["state"] = e.y;
    doc["events"].push_back(je);
  }
  std::ofstream out(path);
  if (!out) throw numeric_failure("cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& res) {
  std::ofstream out(path);
  if (!out) throw numeric_failure("cannot open " + path + " for writing");
  out << "beta,lambda,region,outcome,alpha_FS,mu\n";
  for (const SweepCell& c : res.cells) {
    out << fmt17(c.beta) << ',' << fmt17(c.lambda) << ',' << region_name(c.region) << ','
        << (c.outcome ? outcome_name(*c.outcome) : "") << ','
        << (c.alpha_FS ? fmt17(*c.alpha_FS) : "") << ',' << (c.mu ? fmt17(*c.mu) : "")
        << '\n';
  }
  if (!out) throw numeric_failure("failed while writing " + path);
}

}  // namespace reeftip
