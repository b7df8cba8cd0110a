#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uti {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// RGB image in normalized value space [0,1], row-major, 3 channels.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<double> data; // height * width * 3

  Frame() = default;
  Frame(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {
    if (w <= 0 || h <= 0) throw DimensionError("Frame: non-positive dimensions");
  }

  double& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::size_t size() const { return data.size(); }
  bool same_size(const Frame& o) const {
    return width == o.width && height == o.height;
  }
};

// Exposure (t0) / gap (t1) split of a unit shutter period, optionally
// carrying the discrete (m,n) synthesis pattern.
struct ExposureConfig {
  double t0 = 0.5;
  double t1 = 0.5;
  std::optional<std::pair<int, int>> pattern; // (m, n)

  static ExposureConfig from_t0(double t0) {
    if (!(t0 > 0.0) || !(t0 <= 1.0))
      throw std::invalid_argument("ExposureConfig: t0 must be in (0,1]");
    ExposureConfig c;
    c.t0 = t0;
    c.t1 = 1.0 - t0;
    return c;
  }

  static ExposureConfig from_pattern(int m, int n) {
    if (m < 1 || n < 0)
      throw std::invalid_argument("ExposureConfig: need m >= 1, n >= 0");
    ExposureConfig c;
    c.t0 = static_cast<double>(m) / (m + n);
    c.t1 = static_cast<double>(n) / (m + n);
    c.pattern = {m, n};
    return c;
  }

  double lambda() const { return t1 / t0; }
};

// The four instantaneous states around a pair of consecutive input
// frames: exposure start/end of frame 1 (L0, L1) and of frame 2 (L2, L3).
// Times live on the unit shutter-period axis with t_{L0} = 0 and are
// only meaningful once the exposure split is known.
struct KeyStateQuad {
  Frame l0, l1, l2, l3;
  std::array<double, 4> times{0, 0, 0, 0};
  bool times_set = false;

  void set_times(const ExposureConfig& cfg) {
    times = {0.0, cfg.t0, 1.0, 1.0 + cfg.t0};
    times_set = true;
  }

  void check_dimensions() const {
    if (!l0.same_size(l1) || !l0.same_size(l2) || !l0.same_size(l3))
      throw DimensionError("KeyStateQuad: state dimensions differ");
  }
};

// PNG I/O; u8 code v maps to v/255 exactly and back via rounding.
Frame load_frame(const std::string& path);
void save_frame(const Frame& frame, const std::string& path);

// Sharp input: start and end states coincide with the frame itself.
std::pair<Frame, Frame> key_states_identity(const Frame& frame);

// Reads <index>_s.png / <index>_e.png and <index+1>_s.png / <index+1>_e.png
// (zero-padded to 6 digits) from dir and assembles (L0, L1, L2, L3).
KeyStateQuad import_key_states(const std::string& dir, int index);

} // namespace uti
