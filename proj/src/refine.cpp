#include "uti/refine.hpp"
#include "uti/kernels.hpp"

#include <cmath>

namespace uti {

FlowField refinement_target(const FlowField& f10, const FlowField& f12,
                            double lambda) {
  if (!f10.same_size(f12))
    throw DimensionError("refinement_target: dimension mismatch");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("refinement_target: lambda must be positive");
  FlowField target(f10.width, f10.height, f10.anchor);
  kernels::axpby(2.0 / lambda, f12.data.data(), 1.0, f10.data.data(),
                 target.data.data(), target.data.size());
  return target;
}

std::pair<FlowField, ConfidenceMap> refine_s23(const FlowField& f10,
                                               const FlowField& f12,
                                               const FlowField& s23_raw,
                                               double lambda,
                                               const RefineOptions& opts) {
  if (!f10.same_size(f12) || !f10.same_size(s23_raw))
    throw DimensionError("refine_s23: dimension mismatch");

  FlowField target = refinement_target(f10, f12, lambda);
  const std::size_t n = static_cast<std::size_t>(s23_raw.width) * s23_raw.height;

  ConfidenceMap conf(s23_raw.width, s23_raw.height);
  std::vector<double> w2(2 * n); // per-component weights for the blend

  for (std::size_t i = 0; i < n; ++i) {
    const double tx = target.data[2 * i], ty = target.data[2 * i + 1];
    const double rx = s23_raw.data[2 * i], ry = s23_raw.data[2 * i + 1];
    const double tmag = std::hypot(tx, ty);

    double w = 0.0;
    if (tmag >= opts.mag_floor) {
      const double rmag = std::hypot(rx, ry);
      const double dx = rx - tx, dy = ry - ty;
      double cosang = 1.0; // identical (incl. raw == target == small) vectors
      if (rmag > 0.0 && tmag > 0.0)
        cosang = (rx * tx + ry * ty) / (rmag * tmag);
      if (dx == 0.0 && dy == 0.0) cosang = 1.0;
      if (cosang < 0.0) cosang = 0.0;
      if (cosang > 1.0) cosang = 1.0;
      w = cosang * std::exp(-std::hypot(dx, dy) / opts.tau_px);
    }
    conf.data[i] = w;
    w2[2 * i] = w;
    w2[2 * i + 1] = w;
  }

  FlowField refined(s23_raw.width, s23_raw.height, s23_raw.anchor);
  refined.span = s23_raw.span;
  kernels::lerp(w2.data(), target.data.data(), s23_raw.data.data(),
                refined.data.data(), refined.data.size());
  return {std::move(refined), std::move(conf)};
}

std::pair<LambdaEstimate, FlowField> joint_estimate(
    const FlowField& f10, const FlowField& f12, const FlowField& f13,
    const JointOptions& opts) {
  auto [s01, s12] = displacements_from_flows(f10, f12);
  FlowField s23 = compose_s23(f13, f12);

  LambdaEstimate est = estimate_lambda(s01, s12, s23, opts.lambda_opts);
  double prev_delta = 0.0;
  bool converged = false;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    auto [refined, conf] = refine_s23(f10, f12, s23, est.lambda, opts.refine_opts);
    s23 = std::move(refined);

    LambdaEstimate next = estimate_lambda(s01, s12, s23, opts.lambda_opts);
    double delta = next.lambda - est.lambda;

    // Damp sign-alternating updates.
    if (iter > 0 && delta * prev_delta < 0.0)
      next.lambda = 0.5 * (next.lambda + est.lambda);

    prev_delta = delta;
    double change = std::abs(next.lambda - est.lambda);
    est = next;
    if (change < opts.tol) {
      converged = true;
      break;
    }
  }
  est.converged = converged;
  est.t0 = 1.0 / (1.0 + est.lambda);
  est.t1 = est.lambda / (1.0 + est.lambda);
  return {est, std::move(s23)};
}

} // namespace uti
