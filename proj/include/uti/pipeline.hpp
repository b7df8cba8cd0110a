#pragma once

#include "uti/flow.hpp"
#include "uti/frame.hpp"
#include "uti/refine.hpp"
#include "uti/simulator.hpp"
#include "uti/synthesis.hpp"
#include "uti/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace uti {

// One period's worth of input: the four key-states plus the three flows
// anchored at L1 (f10, f12, f13) and, optionally, the flows of the
// reversed key-state sequence anchored at L2 (rf10 = f_{2->3},
// rf12 = f_{2->1}, rf13 = f_{2->0}).
struct QuadInput {
  KeyStateQuad quad;
  FlowField f10, f12, f13;
  std::optional<FlowField> rf10, rf12, rf13;

  bool has_reversed() const { return rf10 && rf12 && rf13; }
};

enum class TrajectoryMode {
  uti, // general uncertain-interval quadratic
  qvi  // equal-interval baseline
};

struct PipelineOptions {
  int factor = 10;
  std::optional<double> fixed_lambda; // skip estimation when set
  bool refine = true;
  TrajectoryMode mode = TrajectoryMode::uti;
  JointOptions joint;
  int threads = 1;
};

struct RenderedFrame {
  Frame frame;
  int period = 0;
  int slot = 0;
  double t_abs = 0.0; // absolute time, shutter-period units
  SlotKind kind = SlotKind::intra;
  bool key_state = false; // exposure start/end instant
};

struct PipelineResult {
  std::vector<RenderedFrame> frames;
  std::vector<LambdaEstimate> lambda_per_quad;
};

// Full interpolation pipeline over a stream of quads. Deterministic:
// identical inputs and options produce bit-identical frames for any
// thread count.
PipelineResult interpolate_sequence(const std::vector<QuadInput>& quads,
                                    const PipelineOptions& opts);

// --- Analytic scene datasets -------------------------------------------

struct SceneDataset {
  SceneSpec spec;
  double t0 = 0.7;
  int periods = 2;
  int gt_factor = 10;
};

// Layout written under dir:
//   scene.json, manifest.json
//   keystates/%06d_s.png, %06d_e.png      (one pair per input frame)
//   flows/%06d_{f10,f12,f13,rf10,rf12,rf13}.flo   (one set per quad)
//   gt/%06d_%02d.png                      (period, slot on the k/F grid)
void write_scene_dataset(const SceneDataset& ds, const std::string& dir);

// Quads assembled from a scene-dataset directory (or any directory
// following the same layout with externally produced key-states/flows).
std::vector<QuadInput> load_quads(const std::string& dir, bool want_reversed);

// Exact in-memory quads straight from the scene generator.
std::vector<QuadInput> analytic_quads(const SceneDataset& ds);

// --- Blur datasets (dataset-m-n) ----------------------------------------

// Layout: blur/%06d.png, gt/%06d_s.png, gt/%06d_e.png,
// gt/%06d_%02d.png (the m source frames), manifest.json.
void write_blur_dataset(const BlurDataset& ds, const std::string& dir,
                        double fps_in);

// Output of the interp command: out_%06d.png plus a manifest mapping
// each file to its timestamp and kind.
void write_interp_output(const PipelineResult& result, const std::string& dir,
                         double lambda_used);

} // namespace uti
