#pragma once

#include <string>

#include "reeftip/experiments.hpp"
#include "reeftip/folded.hpp"
#include "reeftip/integrate.hpp"
#include "reeftip/manifold.hpp"

namespace reeftip {

// full-precision decimal formatting used in all file outputs
std::string fmt17(double x);

const char* outcome_name(OutcomeLabel label);
const char* region_name(RegionLabel label);
const char* folded_kind_name(FoldedKind kind);
const char* termination_name(Termination t);
const char* ordering_name(ThresholdOrdering o);
const char* layer_class_name(LayerClass c);
const char* reduced_stability_name(ReducedStability s);
const char* branch_name(BranchId b);

// columns: t,tau,H,A,C,alpha (ramped 4-state trajectories only)
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// event list sidecar: kind, fast and slow time, state vector
void write_events_json(const std::string& path, const Trajectory& traj);

// columns: beta,lambda,region,outcome,alpha_FS,mu
void write_sweep_csv(const std::string& path, const SweepResult& res);

}  // namespace reeftip
