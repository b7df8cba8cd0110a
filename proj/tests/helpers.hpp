#pragma once

#include "uti/flow.hpp"
#include "uti/simulator.hpp"

#include <array>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

// Constant fields for a constant-acceleration particle: velocity v1 at
// L1, acceleration a, exposure split t0 (t1 = 1 - t0).
struct KinematicFields {
  uti::FlowField s01, s12, s23;
  double lambda;
};

inline KinematicFields make_consistent_fields(std::array<double, 2> v1,
                                              std::array<double, 2> a,
                                              double t0, int w = 16,
                                              int h = 16) {
  const double t1 = 1.0 - t0;
  auto disp = [&](double v, double acc, double from, double to) {
    auto pos = [&](double t) { return v * t + 0.5 * acc * t * t; };
    return pos(to) - pos(from);
  };
  KinematicFields f;
  f.s01 = uti::FlowField::constant(w, h, disp(v1[0], a[0], -t0, 0.0),
                                   disp(v1[1], a[1], -t0, 0.0));
  f.s12 = uti::FlowField::constant(w, h, disp(v1[0], a[0], 0.0, t1),
                                   disp(v1[1], a[1], 0.0, t1));
  f.s23 = uti::FlowField::constant(w, h, disp(v1[0], a[0], t1, t1 + t0),
                                   disp(v1[1], a[1], t1, t1 + t0));
  f.lambda = t1 / t0;
  return f;
}

// Matching L1-anchored optical flows (f10, f12, f13) for the same particle.
struct KinematicFlows {
  uti::FlowField f10, f12, f13;
};

inline KinematicFlows make_consistent_flows(std::array<double, 2> v1,
                                            std::array<double, 2> a,
                                            double t0, int w = 16,
                                            int h = 16) {
  auto fields = make_consistent_fields(v1, a, t0, w, h);
  KinematicFlows fl;
  fl.f10 = uti::FlowField(w, h, uti::Anchor::l1);
  for (std::size_t i = 0; i < fl.f10.data.size(); ++i)
    fl.f10.data[i] = -fields.s01.data[i];
  fl.f12 = fields.s12;
  fl.f13 = uti::FlowField(w, h, uti::Anchor::l1);
  for (std::size_t i = 0; i < fl.f13.data.size(); ++i)
    fl.f13.data[i] = fields.s12.data[i] + fields.s23.data[i];
  return fl;
}

// Small moving-sprites scene that stays in bounds over [-1.5, 3.5].
inline uti::SceneSpec test_scene(int size = 128, unsigned seed = 1) {
  uti::SceneSpec spec;
  spec.width = size;
  spec.height = size;
  spec.background_seed = 7 + seed;
  spec.supersample = 4;
  spec.t_min = -1.5;
  spec.t_max = 3.5;
  double s = size / 128.0;
  spec.sprites = {
      {seed + 11, 16.0 * s, {40 * s, 44 * s}, {9 * s, 2 * s}, {4 * s, -1 * s}},
      {seed + 23, 12.0 * s, {88 * s, 80 * s}, {-6 * s, 3 * s}, {-2 * s, 2 * s}},
      {seed + 57, 10.0 * s, {60 * s, 96 * s}, {3 * s, -7 * s}, {1 * s, 3 * s}},
  };
  return spec;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("uti_test_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }

 private:
  std::filesystem::path path_;
};

} // namespace testutil
