#pragma once

#include "uti/flow.hpp"
#include "uti/frame.hpp"
#include "uti/trajectory.hpp"

#include <vector>

namespace uti {

// Unnormalized splat accumulator; pixels whose accumulated weight falls
// below w_floor are holes.
struct SplatResult {
  Frame accum;
  ConfidenceMap weight;

  static constexpr double kWeightFloor = 1e-3;
};

// Each source pixel deposits its color at p + flow(p) onto the four
// surrounding integer sites with bilinear weights; out-of-image deposits
// are discarded. Row-major accumulation order, bit-deterministic.
SplatResult forward_splat(const Frame& src, const FlowField& flow);

// accum/weight where weight >= w_floor; hole mask returned alongside.
std::pair<Frame, std::vector<bool>> normalize_splat(
    const SplatResult& splat, double w_floor = SplatResult::kWeightFloor);

// Trajectory anchored at L2 built from flows computed on the reversed
// key-state sequence (L3, L2, L1, L0), all anchored at L2's grid. The
// returned field takes forward-time offsets from t_{L2}: evaluating at
// s gives the displacement of L2's pixels from t_{L2} to t_{L2}+s.
TrajectoryField reversed_trajectory(const FlowField& s01_rev,
                                    const FlowField& s12_rev,
                                    const FlowField& s23_rev, double lambda);

// L2-anchored trajectory approximated from the forward one by pulling
// the coefficient fields onto L2's grid through S12 (used when no
// reversed flows are available).
TrajectoryField derive_backward_trajectory(const TrajectoryField& traj_fwd,
                                           const FlowField& s12);

// Render the frame at time t (L1-origin axis, extended domain): splat
// L1 forward and L2 backward, cross-fill holes, blend by tau = t/t1.
Frame render_intermediate(const KeyStateQuad& quad,
                          const TrajectoryField& traj_fwd,
                          const TrajectoryField& traj_bwd, double t);

// Intra-exposure variant: pair (L0, L1), blend by tau = (t+t0)/t0,
// t in [-t0, 0] on the L1 axis. traj_l0 takes offsets from t_{L0}.
Frame render_intra(const KeyStateQuad& quad, const TrajectoryField& traj_fwd,
                   const TrajectoryField& traj_l0, double t);

// L0-anchored trajectory pulled from the forward one through S01.
TrajectoryField derive_l0_trajectory(const TrajectoryField& traj_fwd,
                                     const FlowField& s01);

} // namespace uti
