#include "uti/pipeline.hpp"
#include "uti/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace uti {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string padded(int index, const char* suffix) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%06d%s", index, suffix);
  return buf;
}

std::string slot_name(int period, int slot) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%06d_%02d.png", period, slot);
  return buf;
}

struct QuadModel {
  TrajectoryField traj_fwd;
  TrajectoryField traj_bwd;
  TrajectoryField traj_l0;
  LambdaEstimate lambda;
};

QuadModel build_quad_model(const QuadInput& input,
                           const PipelineOptions& opts) {
  auto [s01, s12] = displacements_from_flows(input.f10, input.f12);
  FlowField s23 = compose_s23(input.f13, input.f12);

  QuadModel model;
  if (opts.fixed_lambda) {
    model.lambda.lambda = *opts.fixed_lambda;
    model.lambda.t0 = 1.0 / (1.0 + *opts.fixed_lambda);
    model.lambda.t1 = *opts.fixed_lambda / (1.0 + *opts.fixed_lambda);
    model.lambda.confidence = 1.0;
    model.lambda.inlier_fraction = 1.0;
    if (opts.refine)
      s23 = refine_s23(input.f10, input.f12, s23, model.lambda.lambda,
                       opts.joint.refine_opts)
                .first;
  } else if (opts.refine) {
    auto [est, refined] = joint_estimate(input.f10, input.f12, input.f13,
                                         opts.joint);
    model.lambda = est;
    s23 = std::move(refined);
  } else {
    model.lambda = estimate_lambda(s01, s12, s23, opts.joint.lambda_opts);
  }

  const double lambda = model.lambda.lambda;
  const double t1 = lambda / (1.0 + lambda);

  if (opts.mode == TrajectoryMode::qvi) {
    model.traj_fwd = qvi_trajectory(s01, s12, t1);
    model.traj_bwd = derive_backward_trajectory(model.traj_fwd, s12);
  } else {
    model.traj_fwd = fit_trajectory(s01, s23, lambda);
    if (input.has_reversed()) {
      auto [s01r, s12r] = displacements_from_flows(*input.rf10, *input.rf12);
      FlowField s23r = compose_s23(*input.rf13, *input.rf12);
      if (opts.refine)
        s23r = refine_s23(*input.rf10, *input.rf12, s23r, lambda,
                          opts.joint.refine_opts)
                   .first;
      model.traj_bwd = reversed_trajectory(s01r, s12r, s23r, lambda);
    } else {
      model.traj_bwd = derive_backward_trajectory(model.traj_fwd, s12);
    }
  }
  model.traj_l0 = derive_l0_trajectory(model.traj_fwd, s01);
  return model;
}

} // namespace

PipelineResult interpolate_sequence(const std::vector<QuadInput>& quads,
                                    const PipelineOptions& opts) {
  if (opts.factor < 1)
    throw std::invalid_argument("interpolate_sequence: factor must be >= 1");

  PipelineResult result;
  for (std::size_t q = 0; q < quads.size(); ++q) {
    QuadModel model;
    try {
      quads[q].quad.check_dimensions();
      model = build_quad_model(quads[q], opts);
    } catch (const InsufficientMotionError& e) {
      throw InsufficientMotionError("quad " + std::to_string(q) + ": " +
                                    e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("quad " + std::to_string(q) + ": " + e.what());
    }
    result.lambda_per_quad.push_back(model.lambda);

    ExposureConfig cfg = ExposureConfig::from_t0(model.lambda.t0);
    auto schedule = schedule_timestamps(cfg, opts.factor);

    std::vector<RenderedFrame> rendered(schedule.size());
    parallel_for(schedule.size(), opts.threads, [&](std::size_t k) {
      const auto& entry = schedule[k];
      RenderedFrame rf;
      rf.period = static_cast<int>(q);
      rf.slot = static_cast<int>(k);
      rf.t_abs = static_cast<double>(q) + entry.t_global;
      rf.kind = entry.kind;
      rf.key_state = std::abs(entry.t_global) < 1e-9 ||
                     std::abs(entry.t_global - cfg.t0) < 1e-9;
      if (entry.t_l1 <= 0.0)
        rf.frame = render_intra(quads[q].quad, model.traj_fwd, model.traj_l0,
                                entry.t_l1);
      else
        rf.frame = render_intermediate(quads[q].quad, model.traj_fwd,
                                       model.traj_bwd, entry.t_l1);
      rendered[k] = std::move(rf);
    });
    for (auto& rf : rendered) result.frames.push_back(std::move(rf));
  }
  return result;
}

// --- analytic scene datasets --------------------------------------------

namespace {

// Key-state times of quad q for exposure split t0: L0 = q, L1 = q + t0,
// L2 = q+1, L3 = q+1+t0.
struct QuadTimes {
  double l0, l1, l2, l3;
};

QuadTimes quad_times(int q, double t0) {
  return {static_cast<double>(q), q + t0, static_cast<double>(q + 1),
          q + 1 + t0};
}

} // namespace

std::vector<QuadInput> analytic_quads(const SceneDataset& ds) {
  ds.spec.validate();
  std::vector<QuadInput> quads;
  for (int q = 0; q < ds.periods; ++q) {
    QuadTimes t = quad_times(q, ds.t0);
    QuadInput in;
    in.quad.l0 = gen_scene_frame(ds.spec, t.l0);
    in.quad.l1 = gen_scene_frame(ds.spec, t.l1);
    in.quad.l2 = gen_scene_frame(ds.spec, t.l2);
    in.quad.l3 = gen_scene_frame(ds.spec, t.l3);

    in.f10 = gen_scene_flow(ds.spec, t.l1, t.l0);
    in.f12 = gen_scene_flow(ds.spec, t.l1, t.l2);
    in.f13 = gen_scene_flow(ds.spec, t.l1, t.l3);
    in.f10.anchor = in.f12.anchor = in.f13.anchor = Anchor::l1;

    in.rf10 = gen_scene_flow(ds.spec, t.l2, t.l3);
    in.rf12 = gen_scene_flow(ds.spec, t.l2, t.l1);
    in.rf13 = gen_scene_flow(ds.spec, t.l2, t.l0);
    in.rf10->anchor = in.rf12->anchor = in.rf13->anchor = Anchor::l2;

    quads.push_back(std::move(in));
  }
  return quads;
}

void write_scene_dataset(const SceneDataset& ds, const std::string& dir) {
  ds.spec.validate();
  fs::create_directories(fs::path(dir) / "keystates");
  fs::create_directories(fs::path(dir) / "flows");
  fs::create_directories(fs::path(dir) / "gt");

  ds.spec.to_json_file((fs::path(dir) / "scene.json").string());

  // Key-state pairs for frames 0..periods (the last frame closes the
  // final quad).
  for (int i = 0; i <= ds.periods; ++i) {
    const double start = i;
    save_frame(gen_scene_frame(ds.spec, start),
               (fs::path(dir) / "keystates" / padded(i, "_s.png")).string());
    save_frame(gen_scene_frame(ds.spec, start + ds.t0),
               (fs::path(dir) / "keystates" / padded(i, "_e.png")).string());
  }

  for (int q = 0; q < ds.periods; ++q) {
    QuadTimes t = quad_times(q, ds.t0);
    auto flow_path = [&](const char* tag) {
      return (fs::path(dir) / "flows" / padded(q, tag)).string();
    };
    write_flo(gen_scene_flow(ds.spec, t.l1, t.l0), flow_path("_f10.flo"));
    write_flo(gen_scene_flow(ds.spec, t.l1, t.l2), flow_path("_f12.flo"));
    write_flo(gen_scene_flow(ds.spec, t.l1, t.l3), flow_path("_f13.flo"));
    write_flo(gen_scene_flow(ds.spec, t.l2, t.l3), flow_path("_rf10.flo"));
    write_flo(gen_scene_flow(ds.spec, t.l2, t.l1), flow_path("_rf12.flo"));
    write_flo(gen_scene_flow(ds.spec, t.l2, t.l0), flow_path("_rf13.flo"));
  }

  for (int q = 0; q < ds.periods; ++q)
    for (int k = 0; k < ds.gt_factor; ++k) {
      const double t = q + static_cast<double>(k) / ds.gt_factor;
      save_frame(gen_scene_frame(ds.spec, t),
                 (fs::path(dir) / "gt" / slot_name(q, k)).string());
    }

  json manifest;
  manifest["schema"] = 1;
  manifest["type"] = "scene";
  manifest["t0"] = ds.t0;
  manifest["t1"] = 1.0 - ds.t0;
  manifest["lambda"] = (1.0 - ds.t0) / ds.t0;
  manifest["periods"] = ds.periods;
  manifest["gt_factor"] = ds.gt_factor;
  manifest["width"] = ds.spec.width;
  manifest["height"] = ds.spec.height;
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << "\n";
}

std::vector<QuadInput> load_quads(const std::string& dir, bool want_reversed) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw IoError("missing manifest.json in " + dir);
  json manifest;
  in >> manifest;
  const int periods = manifest.at("periods");

  std::vector<QuadInput> quads;
  const std::string keystates = (fs::path(dir) / "keystates").string();
  for (int q = 0; q < periods; ++q) {
    QuadInput qi;
    qi.quad = import_key_states(keystates, q);
    auto flow_path = [&](const char* tag) {
      return (fs::path(dir) / "flows" / padded(q, tag)).string();
    };
    qi.f10 = read_flo(flow_path("_f10.flo"));
    qi.f12 = read_flo(flow_path("_f12.flo"));
    qi.f13 = read_flo(flow_path("_f13.flo"));
    qi.f10.anchor = qi.f12.anchor = qi.f13.anchor = Anchor::l1;
    if (want_reversed && fs::exists(flow_path("_rf10.flo"))) {
      qi.rf10 = read_flo(flow_path("_rf10.flo"));
      qi.rf12 = read_flo(flow_path("_rf12.flo"));
      qi.rf13 = read_flo(flow_path("_rf13.flo"));
      qi.rf10->anchor = qi.rf12->anchor = qi.rf13->anchor = Anchor::l2;
    }
    quads.push_back(std::move(qi));
  }
  return quads;
}

void write_blur_dataset(const BlurDataset& ds, const std::string& dir,
                        double fps_in) {
  fs::create_directories(fs::path(dir) / "blur");
  fs::create_directories(fs::path(dir) / "gt");
  for (std::size_t k = 0; k < ds.blurry.size(); ++k) {
    const int idx = static_cast<int>(k);
    save_frame(ds.blurry[k],
               (fs::path(dir) / "blur" / padded(idx, ".png")).string());
    save_frame(ds.gt[k].key_start,
               (fs::path(dir) / "gt" / padded(idx, "_s.png")).string());
    save_frame(ds.gt[k].key_end,
               (fs::path(dir) / "gt" / padded(idx, "_e.png")).string());
    for (std::size_t j = 0; j < ds.gt[k].sources.size(); ++j)
      save_frame(ds.gt[k].sources[j],
                 (fs::path(dir) / "gt" / slot_name(idx, static_cast<int>(j)))
                     .string());
  }

  json manifest;
  manifest["schema"] = 1;
  manifest["type"] = "blur";
  manifest["m"] = ds.m;
  manifest["n"] = ds.n;
  manifest["fps_in"] = fps_in;
  manifest["fps_out"] = fps_in / (ds.m + ds.n);
  manifest["lambda_discrete"] = ds.discrete_lambda();
  manifest["count"] = ds.blurry.size();
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << "\n";
}

void write_interp_output(const PipelineResult& result, const std::string& dir,
                         double lambda_used) {
  fs::create_directories(dir);
  json manifest;
  manifest["schema"] = 1;
  manifest["lambda"] = lambda_used;
  manifest["frames"] = json::array();
  for (std::size_t i = 0; i < result.frames.size(); ++i) {
    const auto& rf = result.frames[i];
    std::string name = "out_" + padded(static_cast<int>(i), ".png");
    save_frame(rf.frame, (fs::path(dir) / name).string());
    json entry;
    entry["file"] = name;
    entry["period"] = rf.period;
    entry["slot"] = rf.slot;
    entry["t"] = rf.t_abs;
    entry["kind"] = rf.kind == SlotKind::intra ? "intra" : "inter";
    entry["key_state"] = rf.key_state;
    manifest["frames"].push_back(entry);
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << "\n";
}

} // namespace uti
