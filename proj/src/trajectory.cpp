#include "uti/trajectory.hpp"
#include "uti/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uti {

namespace {

void check_triple(const FlowField& a, const FlowField& b, const FlowField& c) {
  if (!a.same_size(b) || !a.same_size(c))
    throw DimensionError("estimate_lambda: dimension mismatch");
}

} // namespace

LambdaEstimate estimate_lambda(const FlowField& s01, const FlowField& s12,
                               const FlowField& s23,
                               const LambdaOptions& opts) {
  check_triple(s01, s12, s23);

  const std::size_t n = static_cast<std::size_t>(s01.width) * s01.height;
  std::vector<std::pair<double, double>> samples; // (ratio, weight)
  samples.reserve(n);

  ConfidenceMap ratio_map;
  if (opts.keep_ratio_map) ratio_map = ConfidenceMap(s01.width, s01.height);

  for (std::size_t i = 0; i < n; ++i) {
    const double rx = s01.data[2 * i] + s23.data[2 * i];
    const double ry = s01.data[2 * i + 1] + s23.data[2 * i + 1];
    const double rmag = std::hypot(rx, ry);
    if (rmag < opts.mag_floor) continue;

    const double sx = s12.data[2 * i];
    const double sy = s12.data[2 * i + 1];
    const double smag = std::hypot(sx, sy);
    const double proj = (sx * rx + sy * ry) / rmag; // <S12, d>
    if (smag > 0.0 && proj / smag < opts.cos_floor) continue;

    const double r = 2.0 * proj / rmag;
    if (!(r > 0.0) || !std::isfinite(r)) continue;
    samples.emplace_back(r, rmag);
    if (opts.keep_ratio_map) ratio_map.data[i] = r;
  }

  if (samples.size() < static_cast<std::size_t>(opts.min_pixels))
    throw InsufficientMotionError(
        "insufficient motion: " + std::to_string(samples.size()) +
        " usable pixels, need " + std::to_string(opts.min_pixels));

  // Weighted median, deterministic sort-based reduction.
  std::sort(samples.begin(), samples.end());
  double total_w = 0.0;
  for (const auto& [r, w] : samples) total_w += w;
  double acc = 0.0;
  double lambda = samples.back().first;
  for (const auto& [r, w] : samples) {
    acc += w;
    if (acc >= 0.5 * total_w) {
      lambda = r;
      break;
    }
  }

  std::size_t in_band = 0;
  for (const auto& [r, w] : samples)
    if (std::abs(r - lambda) <= opts.inlier_band * lambda) ++in_band;

  LambdaEstimate est;
  est.lambda = lambda;
  est.t0 = 1.0 / (1.0 + lambda);
  est.t1 = lambda / (1.0 + lambda);
  est.confidence = static_cast<double>(in_band) / samples.size();
  est.inlier_fraction = static_cast<double>(samples.size()) / n;
  if (opts.keep_ratio_map) est.per_pixel_ratio = std::move(ratio_map);
  return est;
}

TrajectoryField fit_trajectory(const FlowField& s01, const FlowField& s23,
                               double lambda) {
  if (!s01.same_size(s23))
    throw DimensionError("fit_trajectory: dimension mismatch");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("fit_trajectory: lambda must be positive");

  TrajectoryField traj;
  traj.lambda = lambda;
  traj.accel = FlowField(s01.width, s01.height, s01.anchor);
  traj.v1 = FlowField(s01.width, s01.height, s01.anchor);
  kernels::axpby(lambda + 1.0, s23.data.data(), -(lambda + 1.0),
                 s01.data.data(), traj.accel.data.data(),
                 traj.accel.data.size());
  kernels::axpby(lambda + 0.5, s01.data.data(), 0.5, s23.data.data(),
                 traj.v1.data.data(), traj.v1.data.size());
  traj.t_min = -traj.t0();
  traj.t_max = traj.t1() + traj.t0();
  return traj;
}

FlowField eval_displacement(const TrajectoryField& traj, double t) {
  constexpr double kSlack = 1e-9;
  if (t < traj.t_min - kSlack || t > traj.t_max + kSlack)
    throw std::domain_error("eval_displacement: t=" + std::to_string(t) +
                            " outside [" + std::to_string(traj.t_min) + ", " +
                            std::to_string(traj.t_max) + "]");
  FlowField out(traj.v1.width, traj.v1.height, traj.v1.anchor);
  kernels::axpby(0.5 * t * t, traj.accel.data.data(), t, traj.v1.data.data(),
                 out.data.data(), out.data.size());
  return out;
}

FlowField qvi_displacement(const FlowField& s01, const FlowField& s12,
                           double t) {
  if (!s01.same_size(s12))
    throw DimensionError("qvi_displacement: dimension mismatch");
  FlowField out(s01.width, s01.height, s01.anchor);
  const double c12 = 0.5 * t * t + 0.5 * t; // coefficient of S12
  const double c01 = -0.5 * t * t + 0.5 * t;
  kernels::axpby(c12, s12.data.data(), c01, s01.data.data(),
                 out.data.data(), out.data.size());
  return out;
}

TrajectoryField qvi_trajectory(const FlowField& s01, const FlowField& s12,
                               double t1) {
  if (!s01.same_size(s12))
    throw DimensionError("qvi_trajectory: dimension mismatch");
  if (!(t1 > 0.0)) throw std::invalid_argument("qvi_trajectory: t1 <= 0");

  // (S12-S01)/2 * u^2 + (S12+S01)/2 * u with u = t/t1, as accel/2*t^2 + v*t.
  TrajectoryField traj;
  traj.lambda = t1 / (1.0 - t1);
  traj.accel = FlowField(s01.width, s01.height, s01.anchor);
  traj.v1 = FlowField(s01.width, s01.height, s01.anchor);
  const double inv_t1 = 1.0 / t1;
  kernels::axpby(inv_t1 * inv_t1, s12.data.data(), -inv_t1 * inv_t1,
                 s01.data.data(), traj.accel.data.data(),
                 traj.accel.data.size());
  kernels::axpby(0.5 * inv_t1, s12.data.data(), 0.5 * inv_t1,
                 s01.data.data(), traj.v1.data.data(), traj.v1.data.size());
  const double t0 = 1.0 - t1;
  traj.t_min = -t0;
  traj.t_max = t1 + t0;
  return traj;
}

std::vector<ScheduleEntry> schedule_timestamps(const ExposureConfig& config,
                                               int upsample_factor) {
  if (upsample_factor < 1)
    throw std::invalid_argument("schedule_timestamps: factor must be >= 1");
  std::vector<ScheduleEntry> out;
  out.reserve(upsample_factor);
  for (int k = 0; k < upsample_factor; ++k) {
    double t = static_cast<double>(k) / upsample_factor;
    ScheduleEntry e;
    e.t_global = t;
    e.t_l1 = t - config.t0;
    e.kind = (t <= config.t0 + 1e-12) ? SlotKind::intra : SlotKind::inter;
    out.push_back(e);
  }
  return out;
}

double degenerate_check(const FlowField& s01, const FlowField& s12) {
  if (!s01.same_size(s12))
    throw DimensionError("degenerate_check: dimension mismatch");

  FlowField s23(s01.width, s01.height, s01.anchor);
  kernels::axpby(2.0, s12.data.data(), -1.0, s01.data.data(),
                 s23.data.data(), s23.data.size());
  TrajectoryField traj = fit_trajectory(s01, s23, 1.0);

  const double t1 = 0.5;
  double max_dev = 0.0;
  for (int k = 0; k <= 10; ++k) {
    double t = 0.1 * k;
    FlowField general = eval_displacement(traj, t * t1);
    FlowField baseline = qvi_displacement(s01, s12, t);
    for (std::size_t i = 0; i < general.data.size(); ++i)
      max_dev = std::max(max_dev, std::abs(general.data[i] - baseline.data[i]));
  }
  return max_dev;
}

} // namespace uti
