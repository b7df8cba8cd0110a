#include "uti/synthesis.hpp"
#include "uti/kernels.hpp"

#include <cmath>
#include <deque>

namespace uti {

SplatResult forward_splat(const Frame& src, const FlowField& flow) {
  if (src.width != flow.width || src.height != flow.height)
    throw DimensionError("forward_splat: dimension mismatch");

  SplatResult out;
  out.accum = Frame(src.width, src.height, 0.0);
  out.weight = ConfidenceMap(src.width, src.height, 0.0);

  const int w = src.width, h = src.height;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double tx = x + flow.u(x, y);
      const double ty = y + flow.v(x, y);
      const int x0 = static_cast<int>(std::floor(tx));
      const int y0 = static_cast<int>(std::floor(ty));
      const double fx = tx - x0;
      const double fy = ty - y0;
      const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy),
                             (1 - fx) * fy, fx * fy};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int k = 0; k < 4; ++k) {
        if (xs[k] < 0 || xs[k] >= w || ys[k] < 0 || ys[k] >= h) continue;
        if (wts[k] == 0.0) continue;
        out.weight.at(xs[k], ys[k]) += wts[k];
        for (int c = 0; c < 3; ++c)
          out.accum.at(xs[k], ys[k], c) += wts[k] * src.at(x, y, c);
      }
    }
  return out;
}

std::pair<Frame, std::vector<bool>> normalize_splat(const SplatResult& splat,
                                                    double w_floor) {
  const int w = splat.accum.width, h = splat.accum.height;
  Frame img(w, h, 0.0);
  std::vector<bool> valid(static_cast<std::size_t>(w) * h, false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double wt = splat.weight.at(x, y);
      if (wt >= w_floor) {
        valid[static_cast<std::size_t>(y) * w + x] = true;
        for (int c = 0; c < 3; ++c)
          img.at(x, y, c) = splat.accum.at(x, y, c) / wt;
      }
    }
  return {std::move(img), std::move(valid)};
}

TrajectoryField reversed_trajectory(const FlowField& s01_rev,
                                    const FlowField& s12_rev,
                                    const FlowField& s23_rev, double lambda) {
  if (!s01_rev.same_size(s12_rev) || !s01_rev.same_size(s23_rev))
    throw DimensionError("reversed_trajectory: dimension mismatch");

  // The reversed spacing pattern (t0, t1, t0) is palindromic, so the same
  // lambda applies. Fitting on the reversed axis gives the velocity at L2
  // in reversed time; negate it so callers pass forward-time offsets.
  TrajectoryField traj = fit_trajectory(s01_rev, s23_rev, lambda);
  kernels::scale(-1.0, traj.v1.data.data(), traj.v1.data.data(),
                 traj.v1.data.size());
  traj.t_min = -(traj.t0() + traj.t1());
  traj.t_max = traj.t0();
  return traj;
}

TrajectoryField derive_backward_trajectory(const TrajectoryField& traj_fwd,
                                           const FlowField& s12) {
  FlowField sampler(s12.width, s12.height, Anchor::l2);
  kernels::scale(-1.0, s12.data.data(), sampler.data.data(),
                 sampler.data.size());

  TrajectoryField traj;
  traj.lambda = traj_fwd.lambda;
  traj.accel = backward_warp(traj_fwd.accel, sampler);
  traj.accel.anchor = Anchor::l2;
  FlowField v1_warp = backward_warp(traj_fwd.v1, sampler);
  traj.v1 = FlowField(s12.width, s12.height, Anchor::l2);
  // velocity at L2 = v1 + accel * t1
  kernels::axpby(1.0, v1_warp.data.data(), traj_fwd.t1(),
                 traj.accel.data.data(), traj.v1.data.data(),
                 traj.v1.data.size());
  traj.t_min = -(traj.t0() + traj.t1());
  traj.t_max = traj.t0();
  return traj;
}

TrajectoryField derive_l0_trajectory(const TrajectoryField& traj_fwd,
                                     const FlowField& s01) {
  TrajectoryField traj;
  traj.lambda = traj_fwd.lambda;
  traj.accel = backward_warp(traj_fwd.accel, s01);
  traj.accel.anchor = Anchor::l0;
  FlowField v1_warp = backward_warp(traj_fwd.v1, s01);
  traj.v1 = FlowField(s01.width, s01.height, Anchor::l0);
  // velocity at L0 = v1 - accel * t0
  kernels::axpby(1.0, v1_warp.data.data(), -traj_fwd.t0(),
                 traj.accel.data.data(), traj.v1.data.data(),
                 traj.v1.data.size());
  traj.t_min = 0.0;
  traj.t_max = traj.t0() + traj.t1();
  return traj;
}

namespace {

// Fill invalid pixels from the nearest valid one (4-neighbor grassfire,
// row-major seed order).
void fill_nearest(Frame& img, std::vector<bool>& valid) {
  const int w = img.width, h = img.height;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (valid[static_cast<std::size_t>(y) * w + x]) queue.emplace_back(x, y);
  if (queue.empty() || queue.size() == static_cast<std::size_t>(w) * h) return;

  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
      std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
      if (valid[idx]) continue;
      valid[idx] = true;
      for (int c = 0; c < 3; ++c) img.at(nx, ny, c) = img.at(x, y, c);
      queue.emplace_back(nx, ny);
    }
  }
}

// tau-blend of two splat candidates with cross-filling: where only one
// candidate is valid it wins outright; joint holes get nearest-valid fill.
Frame blend_candidates(Frame a, std::vector<bool> va, Frame b,
                       std::vector<bool> vb, double tau) {
  const int w = a.width, h = a.height;
  Frame out(w, h, 0.0);
  std::vector<bool> valid(static_cast<std::size_t>(w) * h, false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (va[idx] && vb[idx]) {
        for (int c = 0; c < 3; ++c)
          out.at(x, y, c) = (1.0 - tau) * a.at(x, y, c) + tau * b.at(x, y, c);
        valid[idx] = true;
      } else if (va[idx]) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = a.at(x, y, c);
        valid[idx] = true;
      } else if (vb[idx]) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = b.at(x, y, c);
        valid[idx] = true;
      }
    }
  fill_nearest(out, valid);
  kernels::clamp01(out.data.data(), out.data.size());
  return out;
}

} // namespace

Frame render_intermediate(const KeyStateQuad& quad,
                          const TrajectoryField& traj_fwd,
                          const TrajectoryField& traj_bwd, double t) {
  quad.check_dimensions();
  const double t1 = traj_fwd.t1();
  const double tau = std::clamp(t / t1, 0.0, 1.0);

  FlowField flow_fwd = eval_displacement(traj_fwd, t);
  auto splat_fwd = forward_splat(quad.l1, flow_fwd);
  auto [img_a, valid_a] = normalize_splat(splat_fwd);

  if (tau <= 0.0) {
    // Before (or at) L1: the backward trajectory may be out of domain
    // and carries zero blend weight anyway.
    fill_nearest(img_a, valid_a);
    kernels::clamp01(img_a.data.data(), img_a.data.size());
    return img_a;
  }

  FlowField flow_bwd = eval_displacement(traj_bwd, t - t1);
  auto splat_bwd = forward_splat(quad.l2, flow_bwd);
  auto [img_b, valid_b] = normalize_splat(splat_bwd);

  return blend_candidates(std::move(img_a), std::move(valid_a),
                          std::move(img_b), std::move(valid_b), tau);
}

Frame render_intra(const KeyStateQuad& quad, const TrajectoryField& traj_fwd,
                   const TrajectoryField& traj_l0, double t) {
  quad.check_dimensions();
  const double t0 = traj_fwd.t0();
  const double tau = std::clamp((t + t0) / t0, 0.0, 1.0);

  FlowField flow_l0 = eval_displacement(traj_l0, t + t0);
  auto splat_l0 = forward_splat(quad.l0, flow_l0);
  auto [img_a, valid_a] = normalize_splat(splat_l0);

  FlowField flow_l1 = eval_displacement(traj_fwd, t);
  auto splat_l1 = forward_splat(quad.l1, flow_l1);
  auto [img_b, valid_b] = normalize_splat(splat_l1);

  return blend_candidates(std::move(img_a), std::move(valid_a),
                          std::move(img_b), std::move(valid_b), tau);
}

} // namespace uti
