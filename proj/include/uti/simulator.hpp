#pragma once

#include "uti/flow.hpp"
#include "uti/frame.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace uti {

// A rigidly translating textured disk on analytic constant-acceleration
// motion: center(t) = x0 + v*t + a*t^2/2 (t in shutter periods).
struct SpriteSpec {
  std::uint32_t seed = 1;
  double radius = 12.0;
  std::array<double, 2> x0{0, 0};
  std::array<double, 2> v{0, 0};
  std::array<double, 2> a{0, 0};

  std::array<double, 2> center(double t) const {
    return {x0[0] + v[0] * t + 0.5 * a[0] * t * t,
            x0[1] + v[1] * t + 0.5 * a[1] * t * t};
  }
};

struct SceneSpec {
  int width = 128;
  int height = 128;
  std::uint32_t background_seed = 7;
  int supersample = 4;
  double t_min = -2.0; // validity window, shutter periods
  double t_max = 4.0;
  std::vector<SpriteSpec> sprites;

  // Sprites must stay at least one radius inside the image over the
  // window (no wraparound-style artifacts).
  void validate() const;

  static SceneSpec from_json_file(const std::string& path);
  void to_json_file(const std::string& path) const;
};

// Deterministic band-limited value noise at continuous coordinates.
double value_noise(std::uint32_t seed, double x, double y);

// Exact frame at any real t; identical t yields bit-identical frames.
Frame gen_scene_frame(const SceneSpec& spec, double t);

// Exact flow of the surface visible at t_from, anchored at the t_from
// grid: sprite pixels carry the sprite's motion, background stays zero.
FlowField gen_scene_flow(const SceneSpec& spec, double t_from, double t_to);

struct BlurPeriodGt {
  Frame key_start;
  Frame key_end;
  std::vector<Frame> sources; // the m averaged frames
};

struct BlurDataset {
  std::vector<Frame> blurry;
  std::vector<BlurPeriodGt> gt;
  int m = 0;
  int n = 0;
  // Key-states sit on the first/last sampled frame, so the discrete
  // exposure spans (m-1)/(m+n) of a period and lambda = (n+1)/(m-1).
  double discrete_lambda() const {
    return static_cast<double>(n + 1) / (m - 1);
  }
};

// Period k averages source frames [k*(m+n), k*(m+n)+m); trailing partial
// periods are dropped. Output count = floor((len-m)/(m+n)) + 1.
BlurDataset synth_blur_dataset(const std::vector<Frame>& frames, int m, int n);

// Mean of frames; exact when all inputs are identical.
Frame average_frames(const std::vector<Frame>& frames);

// Keeps indices 0, g_a+1, g_a+g_b+2, ... (alternating spacings
// g_a+1, g_b+1); needs at least 4 samples' worth of input.
std::vector<Frame> sample_uneven(const std::vector<Frame>& frames, int gap_a,
                                 int gap_b);
std::vector<std::size_t> sample_uneven_indices(std::size_t len, int gap_a,
                                               int gap_b);

} // namespace uti
