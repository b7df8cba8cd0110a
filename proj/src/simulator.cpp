#include "uti/simulator.hpp"
#include "uti/kernels.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace uti {

namespace {

std::uint32_t hash32(std::uint32_t x) {
  x ^= x >> 16;
  x *= 0x7feb352d;
  x ^= x >> 15;
  x *= 0x846ca68b;
  x ^= x >> 16;
  return x;
}

double lattice_value(std::uint32_t seed, std::int64_t ix, std::int64_t iy) {
  std::uint32_t h = hash32(seed ^ hash32(static_cast<std::uint32_t>(ix) * 0x9e3779b9u ^
                                         static_cast<std::uint32_t>(iy) * 0x85ebca6bu));
  return h * (1.0 / 4294967295.0);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double noise_octave(std::uint32_t seed, double x, double y) {
  double fx = std::floor(x), fy = std::floor(y);
  std::int64_t ix = static_cast<std::int64_t>(fx);
  std::int64_t iy = static_cast<std::int64_t>(fy);
  double tx = smoothstep(x - fx);
  double ty = smoothstep(y - fy);
  double v00 = lattice_value(seed, ix, iy);
  double v10 = lattice_value(seed, ix + 1, iy);
  double v01 = lattice_value(seed, ix, iy + 1);
  double v11 = lattice_value(seed, ix + 1, iy + 1);
  double top = v00 + tx * (v10 - v00);
  double bot = v01 + tx * (v11 - v01);
  return top + ty * (bot - top);
}

} // namespace

double value_noise(std::uint32_t seed, double x, double y) {
  // Three octaves, base wavelength 16 px; band-limited enough that a
  // few-sample supersample resolves it.
  double v = 0.0, amp = 0.5, freq = 1.0 / 16.0;
  for (int o = 0; o < 3; ++o) {
    v += amp * noise_octave(seed + static_cast<std::uint32_t>(o) * 101u,
                            x * freq, y * freq);
    amp *= 0.5;
    freq *= 2.0;
  }
  return v / 0.875; // amplitudes sum to 0.875
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("SceneSpec: non-positive dimensions");
  if (supersample < 1)
    throw std::invalid_argument("SceneSpec: supersample must be >= 1");
  for (const auto& s : sprites) {
    // The motion is quadratic, so endpoints plus the vertex would do;
    // dense sampling of the window is cheap and simpler.
    for (int k = 0; k <= 64; ++k) {
      double t = t_min + (t_max - t_min) * k / 64.0;
      auto c = s.center(t);
      if (c[0] < s.radius || c[0] > width - 1 - s.radius || c[1] < s.radius ||
          c[1] > height - 1 - s.radius)
        throw std::invalid_argument(
            "SceneSpec: sprite leaves the safe region inside the window");
    }
  }
}

Frame gen_scene_frame(const SceneSpec& spec, double t) {
  if (t < spec.t_min || t > spec.t_max)
    throw std::domain_error("gen_scene_frame: t outside validity window");

  Frame out(spec.width, spec.height);
  const int ss = spec.supersample;
  const double inv_ss2 = 1.0 / (ss * ss);

  std::vector<std::array<double, 2>> centers(spec.sprites.size());
  for (std::size_t i = 0; i < spec.sprites.size(); ++i)
    centers[i] = spec.sprites[i].center(t);

  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      double rgb[3] = {0, 0, 0};
      for (int sy = 0; sy < ss; ++sy)
        for (int sx = 0; sx < ss; ++sx) {
          const double px = x + (sx + 0.5) / ss - 0.5;
          const double py = y + (sy + 0.5) / ss - 0.5;

          // topmost sprite containing the sample wins
          int hit = -1;
          for (int i = static_cast<int>(spec.sprites.size()) - 1; i >= 0; --i) {
            const double dx = px - centers[i][0];
            const double dy = py - centers[i][1];
            if (dx * dx + dy * dy <= spec.sprites[i].radius * spec.sprites[i].radius) {
              hit = i;
              break;
            }
          }
          if (hit >= 0) {
            // texture in sprite-local coordinates: rigid translation
            const double lx = px - centers[hit][0];
            const double ly = py - centers[hit][1];
            const std::uint32_t s = spec.sprites[hit].seed;
            rgb[0] += value_noise(s, lx, ly);
            rgb[1] += value_noise(s + 31u, lx, ly);
            rgb[2] += value_noise(s + 67u, lx, ly);
          } else {
            rgb[0] += value_noise(spec.background_seed, px, py);
            rgb[1] += value_noise(spec.background_seed + 31u, px, py);
            rgb[2] += value_noise(spec.background_seed + 67u, px, py);
          }
        }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = rgb[c] * inv_ss2;
    }
  return out;
}

FlowField gen_scene_flow(const SceneSpec& spec, double t_from, double t_to) {
  for (double t : {t_from, t_to})
    if (t < spec.t_min || t > spec.t_max)
      throw std::domain_error("gen_scene_flow: time outside validity window");

  FlowField out(spec.width, spec.height, Anchor::other);
  out.span = {t_from, t_to};

  std::vector<std::array<double, 2>> from(spec.sprites.size());
  std::vector<std::array<double, 2>> delta(spec.sprites.size());
  for (std::size_t i = 0; i < spec.sprites.size(); ++i) {
    from[i] = spec.sprites[i].center(t_from);
    auto to = spec.sprites[i].center(t_to);
    delta[i] = {to[0] - from[i][0], to[1] - from[i][1]};
  }

  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x)
      for (int i = static_cast<int>(spec.sprites.size()) - 1; i >= 0; --i) {
        const double dx = x - from[i][0];
        const double dy = y - from[i][1];
        if (dx * dx + dy * dy <= spec.sprites[i].radius * spec.sprites[i].radius) {
          out.u(x, y) = delta[i][0];
          out.v(x, y) = delta[i][1];
          break;
        }
      }
  return out;
}

Frame average_frames(const std::vector<Frame>& frames) {
  if (frames.empty()) throw std::invalid_argument("average_frames: empty");
  const Frame& first = frames.front();
  for (const auto& f : frames)
    if (!f.same_size(first)) throw DimensionError("average_frames: size mismatch");

  // Extended-precision accumulation per element. The 11 spare mantissa
  // bits make k*x exact for k <= 2048, so identical inputs average to
  // themselves bit-exactly; mixed inputs just gain accuracy.
  const std::size_t n = first.size();
  Frame out(first.width, first.height);
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (const auto& f : frames) acc += f.data[i];
    out.data[i] = static_cast<double>(acc / frames.size());
  }
  return out;
}

BlurDataset synth_blur_dataset(const std::vector<Frame>& frames, int m, int n) {
  // m = 1 would give a zero-length exposure (no key-state pair).
  if (m < 2) throw std::invalid_argument("synth_blur_dataset: m must be >= 2");
  if (n < 0) throw std::invalid_argument("synth_blur_dataset: n must be >= 0");
  if (frames.size() < static_cast<std::size_t>(m))
    throw std::invalid_argument("synth_blur_dataset: sequence shorter than m");

  BlurDataset ds;
  ds.m = m;
  ds.n = n;
  const std::size_t count = (frames.size() - m) / (m + n) + 1;
  ds.blurry.reserve(count);
  ds.gt.reserve(count);

  std::vector<Frame> window;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t base = k * (m + n);
    window.assign(frames.begin() + base, frames.begin() + base + m);
    ds.blurry.push_back(average_frames(window));
    BlurPeriodGt gt;
    gt.key_start = window.front();
    gt.key_end = window.back();
    gt.sources = window;
    ds.gt.push_back(std::move(gt));
  }
  return ds;
}

std::vector<std::size_t> sample_uneven_indices(std::size_t len, int gap_a,
                                               int gap_b) {
  if (gap_a < 0 || gap_b < 0)
    throw std::invalid_argument("sample_uneven: negative gap");
  std::vector<std::size_t> idx;
  std::size_t i = 0;
  bool use_a = true;
  while (i < len) {
    idx.push_back(i);
    i += static_cast<std::size_t>(use_a ? gap_a : gap_b) + 1;
    use_a = !use_a;
  }
  if (idx.size() < 4)
    throw std::invalid_argument("sample_uneven: input too short for 4 samples");
  return idx;
}

std::vector<Frame> sample_uneven(const std::vector<Frame>& frames, int gap_a,
                                 int gap_b) {
  auto idx = sample_uneven_indices(frames.size(), gap_a, gap_b);
  std::vector<Frame> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(frames[i]);
  return out;
}

SceneSpec SceneSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  in >> j;

  SceneSpec spec;
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.background_seed = j.value("background_seed", spec.background_seed);
  spec.supersample = j.value("supersample", spec.supersample);
  spec.t_min = j.value("t_min", spec.t_min);
  spec.t_max = j.value("t_max", spec.t_max);
  for (const auto& js : j.value("sprites", nlohmann::json::array())) {
    SpriteSpec s;
    s.seed = js.value("seed", s.seed);
    s.radius = js.value("radius", s.radius);
    if (js.contains("x0")) s.x0 = {js["x0"][0], js["x0"][1]};
    if (js.contains("v")) s.v = {js["v"][0], js["v"][1]};
    if (js.contains("a")) s.a = {js["a"][0], js["a"][1]};
    spec.sprites.push_back(s);
  }
  spec.validate();
  return spec;
}

void SceneSpec::to_json_file(const std::string& path) const {
  nlohmann::json j;
  j["width"] = width;
  j["height"] = height;
  j["background_seed"] = background_seed;
  j["supersample"] = supersample;
  j["t_min"] = t_min;
  j["t_max"] = t_max;
  j["sprites"] = nlohmann::json::array();
  for (const auto& s : sprites) {
    nlohmann::json js;
    js["seed"] = s.seed;
    js["radius"] = s.radius;
    js["x0"] = {s.x0[0], s.x0[1]};
    js["v"] = {s.v[0], s.v[1]};
    js["a"] = {s.a[0], s.a[1]};
    j["sprites"].push_back(js);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write " + path);
  out << j.dump(2) << "\n";
}

} // namespace uti
