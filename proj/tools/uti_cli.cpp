// Command-line front end: synth, scene, estimate, interp, eval, flowviz.
// Exit codes: 0 success, 1 I/O failure, 2 usage/validation error,
// 3 degenerate input (insufficient motion).

#include "uti/kernels.hpp"
#include "uti/metrics.hpp"
#include "uti/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

struct Thresholds {
  uti::LambdaOptions lambda;
  uti::RefineOptions refine;
  int joint_max_iters = 8;
  double joint_tol = 1e-4;
};

// Config file < flags. CLI11 applies flags after this runs, so config
// values just become the new defaults.
Thresholds load_config(const std::string& path) {
  Thresholds t;
  if (path.empty()) return t;
  std::ifstream in(path);
  if (!in) throw uti::IoError("cannot open config " + path);
  json j;
  in >> j;
  auto get = [&](const char* key, auto fallback) {
    using T = decltype(fallback);
    json cur = j;
    std::string k(key);
    auto dot = k.find('.');
    if (dot != std::string::npos) {
      std::string head = k.substr(0, dot);
      if (!cur.contains(head)) return fallback;
      cur = cur[head];
      k = k.substr(dot + 1);
    }
    return cur.contains(k) ? cur[k].get<T>() : fallback;
  };
  t.lambda.mag_floor = get("trajectory.mag_floor", t.lambda.mag_floor);
  t.lambda.cos_floor = get("trajectory.cos_floor", t.lambda.cos_floor);
  t.lambda.min_pixels = get("trajectory.min_pixels", t.lambda.min_pixels);
  t.lambda.inlier_band = get("trajectory.inlier_band", t.lambda.inlier_band);
  t.refine.tau_px = get("refine.tau_px", t.refine.tau_px);
  t.refine.mag_floor = get("refine.mag_floor", t.refine.mag_floor);
  t.joint_max_iters = get("joint.max_iters", t.joint_max_iters);
  t.joint_tol = get("joint.tol", t.joint_tol);
  return t;
}

json lambda_to_json(const uti::LambdaEstimate& est) {
  json j;
  j["schema"] = 1;
  j["lambda"] = est.lambda;
  j["t0"] = est.t0;
  j["t1"] = est.t1;
  j["confidence"] = est.confidence;
  j["inlier_fraction"] = est.inlier_fraction;
  j["converged"] = est.converged;
  return j;
}

std::vector<uti::Frame> load_frame_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<uti::Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(uti::load_frame(f.string()));
  return frames;
}

// Default analytic scene when no spec file is given: three sprites with
// mixed velocity/acceleration, deterministic in the seed.
uti::SceneSpec default_scene(unsigned seed) {
  uti::SceneSpec spec;
  spec.width = 128;
  spec.height = 128;
  spec.background_seed = 7 + seed;
  spec.sprites = {
      {seed + 11, 16.0, {40, 44}, {9, 2}, {4, -1}},
      {seed + 23, 12.0, {88, 80}, {-6, 3}, {-2, 2}},
      {seed + 57, 10.0, {60, 96}, {3, -7}, {1, 3}},
  };
  spec.t_min = -1.5;
  spec.t_max = 3.5;
  return spec;
}

double metric_psnr(const uti::Frame& a, const uti::Frame& b, bool luma) {
  return luma ? uti::psnr_luma(a, b) : uti::psnr(a, b);
}
double metric_ssim(const uti::Frame& a, const uti::Frame& b, bool luma) {
  return luma ? uti::ssim_luma(a, b) : uti::ssim(a, b);
}

json score_group(const std::vector<std::pair<double, double>>& scores) {
  json g;
  g["count"] = scores.size();
  g["frames"] = json::array();
  double psnr_sum = 0, ssim_sum = 0;
  std::size_t finite = 0;
  for (const auto& [p, s] : scores) {
    json f;
    f["psnr"] = std::isinf(p) ? json("inf") : json(p);
    f["ssim"] = s;
    g["frames"].push_back(f);
    if (!std::isinf(p)) {
      psnr_sum += p;
      ++finite;
    }
    ssim_sum += s;
  }
  if (!scores.empty()) {
    g["psnr_mean"] = finite == 0 ? json("inf") : json(psnr_sum / finite);
    if (finite < scores.size())
      g["psnr_mean_note"] = "inf frames excluded from mean";
    g["ssim_mean"] = ssim_sum / scores.size();
  }
  return g;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertain-interval video frame interpolation engine"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 1;
  unsigned seed = 1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--threads", threads, "worker thread cap");
  app.add_option("--seed", seed, "seed for generated test data");

  // synth ------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "average m, drop n (dataset-m-n)");
  std::string synth_in, synth_out;
  int synth_m = 5, synth_n = 5;
  double fps_in = 240.0;
  synth->add_option("--in", synth_in, "high-FPS frame directory")->required();
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--m", synth_m, "frames averaged per period")->required();
  synth->add_option("--n", synth_n, "frames dropped per period")->required();
  synth->add_option("--fps-in", fps_in, "input frame rate");

  // scene ------------------------------------------------------------
  auto* scene = app.add_subcommand("scene", "generate an analytic scene dataset");
  std::string scene_spec_path, scene_out;
  double scene_t0 = 0.7;
  int scene_m = 0, scene_n = 0, scene_periods = 2, scene_factor = 10;
  scene->add_option("--spec", scene_spec_path, "scene spec JSON (default: built-in)");
  scene->add_option("--out", scene_out, "output directory")->required();
  scene->add_option("--t0", scene_t0, "exposure fraction of the period");
  scene->add_option("--m", scene_m, "exposure frames (with --n, sets t0)");
  scene->add_option("--n", scene_n, "gap frames");
  scene->add_option("--periods", scene_periods, "number of shutter periods");
  scene->add_option("--factor", scene_factor, "ground-truth upsample factor");

  // estimate ----------------------------------------------------------
  auto* estimate = app.add_subcommand("estimate", "recover the interval ratio");
  std::vector<std::string> est_flows;
  std::string est_data, est_out;
  int est_index = 0, est_iters = 0;
  double est_lambda_override = 0.0;
  estimate->add_option("--flows", est_flows, "f10.flo f12.flo f13.flo")
      ->expected(3);
  estimate->add_option("--data", est_data, "dataset directory");
  estimate->add_option("--index", est_index, "quad index within --data");
  estimate->add_option("--iters", est_iters, "joint refine iterations");
  estimate->add_option("--lambda", est_lambda_override,
                       "skip estimation, report this ratio");
  estimate->add_option("--out", est_out, "write report here (else stdout)");

  // interp -------------------------------------------------------------
  auto* interp = app.add_subcommand("interp", "render the upsampled sequence");
  std::string interp_data, interp_out, interp_spec;
  int interp_factor = 10, interp_iters = 8, interp_periods = 2;
  double interp_lambda = 0.0, interp_t0 = 0.7;
  bool interp_no_refine = false, interp_qvi = false, interp_analytic = false;
  interp->add_option("--data", interp_data, "dataset directory (scene layout)");
  interp->add_option("--out", interp_out, "output directory")->required();
  interp->add_option("--factor", interp_factor, "upsample factor");
  interp->add_option("--lambda", interp_lambda, "fixed interval ratio (GT mode)");
  interp->add_option("--iters", interp_iters, "joint refine iterations");
  interp->add_flag("--no-refine", interp_no_refine, "skip flow refinement");
  interp->add_flag("--qvi", interp_qvi, "equal-interval baseline trajectories");
  interp->add_flag("--analytic", interp_analytic,
                   "generate inputs from an analytic scene");
  interp->add_option("--spec", interp_spec, "scene spec for --analytic");
  interp->add_option("--t0", interp_t0, "exposure fraction for --analytic");
  interp->add_option("--periods", interp_periods, "periods for --analytic");

  // eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM against ground truth");
  std::string eval_out_dir, eval_gt_dir, eval_report;
  bool eval_luma = false;
  eval->add_option("--out-dir", eval_out_dir, "interp output directory")
      ->required();
  eval->add_option("--gt", eval_gt_dir, "scene dataset directory")->required();
  eval->add_option("--report", eval_report, "write report here (else stdout)");
  eval->add_flag("--luma", eval_luma, "score luma instead of RGB mean");

  // flowviz ----------------------------------------------------------------
  auto* flowviz = app.add_subcommand("flowviz", "color-wheel rendering of a .flo");
  std::string viz_in, viz_out;
  double viz_max_mag = 0.0;
  flowviz->add_option("--in", viz_in, "input .flo")->required();
  flowviz->add_option("--out", viz_out, "output PNG")->required();
  flowviz->add_option("--max-mag", viz_max_mag, "saturation full-scale, px");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    Thresholds th = load_config(config_path);
    uti::JointOptions joint;
    joint.lambda_opts = th.lambda;
    joint.refine_opts = th.refine;
    joint.max_iters = th.joint_max_iters;
    joint.tol = th.joint_tol;

    if (*synth) {
      if (synth_m < 1 || synth_n < 0) {
        std::cerr << "synth: need m >= 1 and n >= 0\n";
        return kExitUsage;
      }
      auto frames = load_frame_dir(synth_in);
      auto ds = uti::synth_blur_dataset(frames, synth_m, synth_n);
      uti::write_blur_dataset(ds, synth_out, fps_in);
      std::cout << "wrote " << ds.blurry.size() << " blurry frames to "
                << synth_out << "\n";
      return kExitOk;
    }

    if (*scene) {
      if (scene_m > 0)
        scene_t0 = uti::ExposureConfig::from_pattern(scene_m, scene_n).t0;
      if (!(scene_t0 > 0.0) || !(scene_t0 < 1.0)) {
        std::cerr << "scene: t0 must be in (0,1)\n";
        return kExitUsage;
      }
      uti::SceneDataset ds;
      ds.spec = scene_spec_path.empty()
                    ? default_scene(seed)
                    : uti::SceneSpec::from_json_file(scene_spec_path);
      ds.t0 = scene_t0;
      ds.periods = scene_periods;
      ds.gt_factor = scene_factor;
      uti::write_scene_dataset(ds, scene_out);
      std::cout << "wrote scene dataset (" << ds.periods << " periods) to "
                << scene_out << "\n";
      return kExitOk;
    }

    if (*estimate) {
      json report;
      if (est_lambda_override > 0.0) {
        uti::LambdaEstimate est;
        est.lambda = est_lambda_override;
        est.t0 = 1.0 / (1.0 + est.lambda);
        est.t1 = est.lambda / (1.0 + est.lambda);
        est.confidence = 1.0;
        est.inlier_fraction = 1.0;
        report = lambda_to_json(est);
        report["mode"] = "override";
      } else {
        uti::FlowField f10, f12, f13;
        if (!est_flows.empty()) {
          f10 = uti::read_flo(est_flows[0]);
          f12 = uti::read_flo(est_flows[1]);
          f13 = uti::read_flo(est_flows[2]);
        } else if (!est_data.empty()) {
          auto quads = uti::load_quads(est_data, false);
          if (est_index < 0 ||
              est_index >= static_cast<int>(quads.size())) {
            std::cerr << "estimate: index out of range\n";
            return kExitUsage;
          }
          f10 = std::move(quads[est_index].f10);
          f12 = std::move(quads[est_index].f12);
          f13 = std::move(quads[est_index].f13);
        } else {
          std::cerr << "estimate: need --flows or --data\n";
          return kExitUsage;
        }
        if (est_iters > 0) {
          uti::JointOptions jo = joint;
          jo.max_iters = est_iters;
          auto [est, refined] = uti::joint_estimate(f10, f12, f13, jo);
          report = lambda_to_json(est);
          report["mode"] = "joint";
        } else {
          auto [s01, s12] = uti::displacements_from_flows(f10, f12);
          auto s23 = uti::compose_s23(f13, f12);
          report = lambda_to_json(uti::estimate_lambda(s01, s12, s23, th.lambda));
          report["mode"] = "single";
        }
      }
      if (est_out.empty()) {
        std::cout << report.dump(2) << "\n";
      } else {
        std::ofstream out(est_out);
        out << report.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (*interp) {
      uti::PipelineOptions opts;
      opts.factor = interp_factor;
      opts.refine = !interp_no_refine;
      opts.mode = interp_qvi ? uti::TrajectoryMode::qvi : uti::TrajectoryMode::uti;
      opts.joint = joint;
      opts.joint.max_iters = interp_iters;
      opts.threads = threads;
      if (interp_lambda > 0.0) opts.fixed_lambda = interp_lambda;
      if (interp_factor < 1) {
        std::cerr << "interp: factor must be >= 1\n";
        return kExitUsage;
      }

      std::vector<uti::QuadInput> quads;
      if (interp_analytic) {
        uti::SceneDataset ds;
        ds.spec = interp_spec.empty()
                      ? default_scene(seed)
                      : uti::SceneSpec::from_json_file(interp_spec);
        ds.t0 = interp_t0;
        ds.periods = interp_periods;
        quads = uti::analytic_quads(ds);
      } else if (!interp_data.empty()) {
        quads = uti::load_quads(interp_data, /*want_reversed=*/true);
      } else {
        std::cerr << "interp: need --data or --analytic\n";
        return kExitUsage;
      }

      try {
        auto result = uti::interpolate_sequence(quads, opts);
        double lambda_used = result.lambda_per_quad.empty()
                                 ? 0.0
                                 : result.lambda_per_quad.front().lambda;
        uti::write_interp_output(result, interp_out, lambda_used);
      } catch (...) {
        std::error_code ec;
        fs::remove_all(interp_out, ec); // no partial output
        throw;
      }
      return kExitOk;
    }

    if (*eval) {
      std::ifstream min(fs::path(eval_out_dir) / "manifest.json");
      if (!min) throw uti::IoError("missing manifest.json in " + eval_out_dir);
      json out_manifest;
      min >> out_manifest;

      std::ifstream gin(fs::path(eval_gt_dir) / "manifest.json");
      if (!gin) throw uti::IoError("missing manifest.json in " + eval_gt_dir);
      json gt_manifest;
      gin >> gt_manifest;
      const int gt_factor = gt_manifest.at("gt_factor");

      std::vector<std::pair<double, double>> deblur, interp_scores;
      for (const auto& entry : out_manifest.at("frames")) {
        const int period = entry.at("period");
        const double t = entry.at("t");
        const double slot_f = (t - period) * gt_factor;
        const int slot = static_cast<int>(std::lround(slot_f));
        if (std::abs(slot_f - slot) > 1e-6 || slot < 0 || slot >= gt_factor) {
          std::cerr << "eval: output timestamp " << t
                    << " not on the ground-truth grid (factor " << gt_factor
                    << ")\n";
          return kExitUsage;
        }
        char gt_name[48];
        std::snprintf(gt_name, sizeof(gt_name), "%06d_%02d.png", period, slot);
        auto gt_path = fs::path(eval_gt_dir) / "gt" / gt_name;
        if (!fs::exists(gt_path)) {
          std::cerr << "eval: missing ground truth " << gt_path << "\n";
          return kExitUsage;
        }
        auto out_frame = uti::load_frame(
            (fs::path(eval_out_dir) / entry.at("file").get<std::string>())
                .string());
        auto gt_frame = uti::load_frame(gt_path.string());
        double p = metric_psnr(out_frame, gt_frame, eval_luma);
        double s = metric_ssim(out_frame, gt_frame, eval_luma);
        if (entry.at("key_state").get<bool>())
          deblur.emplace_back(p, s);
        else
          interp_scores.emplace_back(p, s);
      }

      json report;
      report["schema"] = 1;
      report["space"] = eval_luma ? "luma" : "rgb";
      report["deblurring"] = score_group(deblur);
      report["interpolation"] = score_group(interp_scores);
      if (eval_report.empty()) {
        std::cout << report.dump(2) << "\n";
      } else {
        std::ofstream out(eval_report);
        out << report.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (*flowviz) {
      auto field = uti::read_flo(viz_in);
      uti::save_frame(uti::flow_to_color(field, viz_max_mag), viz_out);
      return kExitOk;
    }
  } catch (const uti::InsufficientMotionError& e) {
    json err;
    err["error"] = "insufficient_motion";
    err["message"] = e.what();
    std::cout << err.dump(2) << "\n";
    return kExitDegenerate;
  } catch (const std::runtime_error& e) {
    // Pipeline errors wrap InsufficientMotionError with quad context.
    if (std::string(e.what()).find("insufficient motion") != std::string::npos) {
      json err;
      err["error"] = "insufficient_motion";
      err["message"] = e.what();
      std::cout << err.dump(2) << "\n";
      return kExitDegenerate;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
