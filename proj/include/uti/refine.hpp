#pragma once

#include "uti/flow.hpp"
#include "uti/trajectory.hpp"

#include <utility>

namespace uti {

struct RefineOptions {
  double tau_px = 4.0;     // error scale of the confidence falloff
  double mag_floor = 0.5;  // below this |target|, leave the raw flow alone
};

// Trajectory-consistency target for the second-interval flow:
// T = (2/lambda) * f12 + f10. Under constant acceleration this equals
// the true S23.
FlowField refinement_target(const FlowField& f10, const FlowField& f12,
                            double lambda);

// Confidence-weighted blend of the raw composed S23 towards the target:
// w = clamp(cos(s23_raw, T), 0, 1) * exp(-|s23_raw - T| / tau_px).
// Returns the refined field and the per-pixel confidence used.
std::pair<FlowField, ConfidenceMap> refine_s23(const FlowField& f10,
                                               const FlowField& f12,
                                               const FlowField& s23_raw,
                                               double lambda,
                                               const RefineOptions& opts = {});

struct JointOptions {
  int max_iters = 8;
  double tol = 1e-4;
  LambdaOptions lambda_opts;
  RefineOptions refine_opts;
};

// Alternates lambda estimation and S23 refinement until the lambda
// update falls below tol. Starts from compose_s23(f13, f12).
std::pair<LambdaEstimate, FlowField> joint_estimate(
    const FlowField& f10, const FlowField& f12, const FlowField& f13,
    const JointOptions& opts = {});

} // namespace uti
