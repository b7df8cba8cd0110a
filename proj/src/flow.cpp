#include "uti/flow.hpp"
#include "uti/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace uti {

namespace {

constexpr float kFloMagic = 202021.25f;

void check_same_size(const FlowField& a, const FlowField& b, const char* op) {
  if (!a.same_size(b))
    throw DimensionError(std::string(op) + ": dimension mismatch");
}

} // namespace

FlowField read_flo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  float magic = 0.0f;
  std::int32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  if (!in || magic != kFloMagic) throw IoError("bad .flo magic in " + path);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || w <= 0 || h <= 0 ||
      static_cast<std::int64_t>(w) * h > (1 << 28))
    throw IoError("bad .flo dimensions in " + path);

  FlowField field(w, h);
  std::vector<float> payload(static_cast<std::size_t>(w) * h * 2);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * 4));
  if (!in) throw IoError("truncated .flo payload in " + path);
  for (std::size_t i = 0; i < payload.size(); ++i)
    field.data[i] = payload[i];
  return field;
}

void write_flo(const FlowField& field, const std::string& path) {
  for (double v : field.data)
    if (!std::isfinite(v)) throw IoError("non-finite flow, refusing to write " + path);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write " + path);
  std::int32_t w = field.width, h = field.height;
  out.write(reinterpret_cast<const char*>(&kFloMagic), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  std::vector<float> payload(field.data.size());
  for (std::size_t i = 0; i < payload.size(); ++i)
    payload[i] = static_cast<float>(field.data[i]);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * 4));
  if (!out) throw IoError("write failed for " + path);
}

std::pair<FlowField, FlowField> displacements_from_flows(const FlowField& f10,
                                                         const FlowField& f12) {
  check_same_size(f10, f12, "displacements_from_flows");
  if (f10.anchor != f12.anchor)
    throw DimensionError("displacements_from_flows: anchor mismatch");

  FlowField s01(f10.width, f10.height, f10.anchor);
  kernels::scale(-1.0, f10.data.data(), s01.data.data(), s01.data.size());
  s01.span = {f10.span.to, f10.span.from};

  FlowField s12 = f12;
  return {std::move(s01), std::move(s12)};
}

FlowField compose_s23(const FlowField& f13, const FlowField& f12) {
  check_same_size(f13, f12, "compose_s23");
  FlowField s23(f13.width, f13.height, f13.anchor);
  kernels::axpby(1.0, f13.data.data(), -1.0, f12.data.data(),
                 s23.data.data(), s23.data.size());
  s23.span = {f12.span.to, f13.span.to};
  return s23;
}

namespace {

// Bilinear sample with clamp-to-edge; `stride` channels per pixel.
template <int kChannels>
void sample_bilinear(const double* src, int w, int h, double x, double y,
                     double* out) {
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  int x1 = std::min(x0 + 1, w - 1);
  int y1 = std::min(y0 + 1, h - 1);
  double fx = x - x0;
  double fy = y - y0;
  for (int c = 0; c < kChannels; ++c) {
    double v00 = src[(static_cast<std::size_t>(y0) * w + x0) * kChannels + c];
    double v10 = src[(static_cast<std::size_t>(y0) * w + x1) * kChannels + c];
    double v01 = src[(static_cast<std::size_t>(y1) * w + x0) * kChannels + c];
    double v11 = src[(static_cast<std::size_t>(y1) * w + x1) * kChannels + c];
    double top = v00 + fx * (v10 - v00);
    double bot = v01 + fx * (v11 - v01);
    out[c] = top + fy * (bot - top);
  }
}

} // namespace

Frame backward_warp(const Frame& input, const FlowField& sampler_flow) {
  if (input.width != sampler_flow.width || input.height != sampler_flow.height)
    throw DimensionError("backward_warp: dimension mismatch");
  Frame out(input.width, input.height);
  for (int y = 0; y < input.height; ++y)
    for (int x = 0; x < input.width; ++x)
      sample_bilinear<3>(input.data.data(), input.width, input.height,
                         x + sampler_flow.u(x, y), y + sampler_flow.v(x, y),
                         &out.at(x, y, 0));
  return out;
}

FlowField backward_warp(const FlowField& input, const FlowField& sampler_flow) {
  check_same_size(input, sampler_flow, "backward_warp");
  FlowField out(input.width, input.height, input.anchor);
  out.span = input.span;
  for (int y = 0; y < input.height; ++y)
    for (int x = 0; x < input.width; ++x)
      sample_bilinear<2>(input.data.data(), input.width, input.height,
                         x + sampler_flow.u(x, y), y + sampler_flow.v(x, y),
                         &out.u(x, y));
  return out;
}

namespace {

// hue in [0,1) -> RGB at full value, saturation s.
void hsv_wheel(double hue, double sat, double* rgb) {
  double h6 = hue * 6.0;
  int k = static_cast<int>(std::floor(h6)) % 6;
  double f = h6 - std::floor(h6);
  double p = 1.0 - sat;
  double q = 1.0 - sat * f;
  double t = 1.0 - sat * (1.0 - f);
  switch (k) {
    case 0: rgb[0] = 1; rgb[1] = t; rgb[2] = p; break;
    case 1: rgb[0] = q; rgb[1] = 1; rgb[2] = p; break;
    case 2: rgb[0] = p; rgb[1] = 1; rgb[2] = t; break;
    case 3: rgb[0] = p; rgb[1] = q; rgb[2] = 1; break;
    case 4: rgb[0] = t; rgb[1] = p; rgb[2] = 1; break;
    default: rgb[0] = 1; rgb[1] = p; rgb[2] = q; break;
  }
}

} // namespace

Frame flow_to_color(const FlowField& field, double max_mag) {
  const std::size_t n = static_cast<std::size_t>(field.width) * field.height;
  if (max_mag <= 0.0) {
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i)
      mags[i] = std::hypot(field.data[2 * i], field.data[2 * i + 1]);
    std::size_t idx = static_cast<std::size_t>(0.99 * (n - 1));
    std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
    max_mag = mags[idx];
    if (max_mag <= 0.0) max_mag = 1.0;
  }

  Frame out(field.width, field.height);
  for (int y = 0; y < field.height; ++y)
    for (int x = 0; x < field.width; ++x) {
      double u = field.u(x, y), v = field.v(x, y);
      double mag = std::hypot(u, v);
      double sat = std::min(mag / max_mag, 1.0);
      double hue = (std::atan2(v, u) + M_PI) / (2.0 * M_PI);
      if (hue >= 1.0) hue -= 1.0;
      hsv_wheel(hue, sat, &out.at(x, y, 0));
    }
  return out;
}

void save_confidence_png(const ConfidenceMap& map, const std::string& path) {
  Frame img(map.width, map.height);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = map.at(x, y);
  save_frame(img, path);
}

} // namespace uti
