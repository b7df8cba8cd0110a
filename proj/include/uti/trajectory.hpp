#pragma once

#include "uti/flow.hpp"
#include "uti/frame.hpp"

#include <optional>
#include <vector>

namespace uti {

struct InsufficientMotionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LambdaOptions {
  double mag_floor = 0.5;   // min |S01+S23| in px for a pixel to count
  double cos_floor = 0.7;   // min direction agreement cos(S12, S01+S23)
  int min_pixels = 100;     // below this -> insufficient motion
  double inlier_band = 0.10; // relative band around lambda for confidence
  bool keep_ratio_map = false;
};

struct LambdaEstimate {
  double lambda = 1.0;
  double t0 = 0.5;
  double t1 = 0.5;
  double confidence = 0.0;      // included pixels with ratio within the band
  double inlier_fraction = 0.0; // included pixels / all pixels
  bool converged = true;
  std::optional<ConfidenceMap> per_pixel_ratio;
};

// Per-pixel quadratic motion model anchored at L1's grid: displacement
// at time t (from t_{L1}) is accel/2 * t^2 + v1 * t. [t_min, t_max] is
// the valid evaluation window on this trajectory's own time axis.
struct TrajectoryField {
  FlowField v1;
  FlowField accel;
  double lambda = 1.0;
  double t_min = 0.0;
  double t_max = 0.0;

  double t0() const { return 1.0 / (1.0 + lambda); }
  double t1() const { return lambda / (1.0 + lambda); }
};

// Interval-ratio recovery: per-pixel ratio of S12 projected onto the
// resultant S01+S23, aggregated by a weighted median (weights = resultant
// magnitude). Throws InsufficientMotionError when too few pixels qualify.
LambdaEstimate estimate_lambda(const FlowField& s01, const FlowField& s12,
                               const FlowField& s23,
                               const LambdaOptions& opts = {});

// accel = (lambda+1)*(S23-S01), v1 = lambda*S01 + (S01+S23)/2.
TrajectoryField fit_trajectory(const FlowField& s01, const FlowField& s23,
                               double lambda);

FlowField eval_displacement(const TrajectoryField& traj, double t);

// Equal-interval quadratic baseline; t normalized to [0,1] over L1->L2.
FlowField qvi_displacement(const FlowField& s01, const FlowField& s12,
                           double t);

// Baseline as a trajectory over real time t in [0, t1]: the normalized
// equal-interval coefficients rescaled so eval_displacement(traj, t)
// equals qvi_displacement(s01, s12, t/t1).
TrajectoryField qvi_trajectory(const FlowField& s01, const FlowField& s12,
                               double t1);

enum class SlotKind { intra, inter };

struct ScheduleEntry {
  double t_global; // from exposure start (t_{L0}), shutter-period units
  double t_l1;     // same instant on the L1-origin axis (t_global - t0)
  SlotKind kind;
};

// Timestamps k/F for k = 0..F-1; intra iff t <= t0 (+1e-12 slack).
std::vector<ScheduleEntry> schedule_timestamps(const ExposureConfig& config,
                                               int upsample_factor);

// Max deviation between the general trajectory at lambda=1 (time-rescaled)
// and the equal-interval baseline, over t in {0, 0.1, ..., 1} and all
// pixels, with S23 := 2*S12 - S01.
double degenerate_check(const FlowField& s01, const FlowField& s12);

} // namespace uti
