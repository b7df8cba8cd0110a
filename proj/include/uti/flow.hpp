#pragma once

#include "uti/frame.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace uti {

// Which key-state's pixel grid a field's vectors start from.
enum class Anchor { l0, l1, l2, l3, other };

// Time labels (shutter-period units) a displacement field spans.
struct Span {
  double from = 0.0;
  double to = 0.0;
};

// Dense per-pixel displacement field, pixels, row-major (u, v) interleaved.
struct FlowField {
  int width = 0;
  int height = 0;
  Anchor anchor = Anchor::other;
  Span span;
  std::vector<double> data; // height * width * 2

  FlowField() = default;
  FlowField(int w, int h, Anchor a = Anchor::other)
      : width(w), height(h), anchor(a),
        data(static_cast<std::size_t>(w) * h * 2, 0.0) {
    if (w <= 0 || h <= 0) throw DimensionError("FlowField: non-positive dimensions");
  }

  static FlowField constant(int w, int h, double u, double v,
                            Anchor a = Anchor::l1) {
    FlowField f(w, h, a);
    for (std::size_t i = 0; i < f.data.size(); i += 2) {
      f.data[i] = u;
      f.data[i + 1] = v;
    }
    return f;
  }

  double& u(int x, int y) { return data[(static_cast<std::size_t>(y) * width + x) * 2]; }
  double& v(int x, int y) { return data[(static_cast<std::size_t>(y) * width + x) * 2 + 1]; }
  double u(int x, int y) const { return data[(static_cast<std::size_t>(y) * width + x) * 2]; }
  double v(int x, int y) const { return data[(static_cast<std::size_t>(y) * width + x) * 2 + 1]; }

  bool same_size(const FlowField& o) const {
    return width == o.width && height == o.height;
  }
};

// Per-pixel weights in [0,1].
struct ConfidenceMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ConfidenceMap() = default;
  ConfidenceMap(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Middlebury .flo binary format (float32 payload).
FlowField read_flo(const std::string& path);
void write_flo(const FlowField& field, const std::string& path);

// S12 = f12, S01 = -f10 (both anchored at L1's grid).
std::pair<FlowField, FlowField> displacements_from_flows(const FlowField& f10,
                                                         const FlowField& f12);

// S23 estimate: f13 - f12, anchored at L1's grid.
FlowField compose_s23(const FlowField& f13, const FlowField& f12);

// output(p) = bilinear sample of input at p + sampler_flow(p),
// clamp-to-edge outside the image. sampler_flow is anchored at the
// output (target) grid.
Frame backward_warp(const Frame& input, const FlowField& sampler_flow);
FlowField backward_warp(const FlowField& input, const FlowField& sampler_flow);

// HSV color-wheel rendering; max_mag <= 0 picks the field's
// 99th-percentile magnitude.
Frame flow_to_color(const FlowField& field, double max_mag = 0.0);

void save_confidence_png(const ConfidenceMap& map, const std::string& path);

} // namespace uti
