#include "uti/frame.hpp"

#include <doctest.h>

#include "helpers.hpp"

#include <fstream>
#include <random>
#include <set>

using namespace uti;

TEST_CASE("u8 endpoint mapping") {
  testutil::TempDir tmp("frames");
  Frame f(2, 1);
  f.at(0, 0, 0) = f.at(0, 0, 1) = f.at(0, 0, 2) = 0.0;
  f.at(1, 0, 0) = f.at(1, 0, 1) = f.at(1, 0, 2) = 1.0;
  save_frame(f, tmp.str() + "/two.png");
  Frame back = load_frame(tmp.str() + "/two.png");
  CHECK(back.data == std::vector<double>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("save/load round-trips any u8-quantized frame exactly") {
  testutil::TempDir tmp("frames");
  std::mt19937 rng(42);
  Frame f(23, 17);
  for (double& v : f.data) v = (rng() % 256) / 255.0;
  save_frame(f, tmp.str() + "/rt.png");
  Frame back = load_frame(tmp.str() + "/rt.png");
  CHECK(back.data == f.data);
}

TEST_CASE("gray ramp produces all 256 distinct codes") {
  testutil::TempDir tmp("frames");
  Frame f(256, 1);
  for (int x = 0; x < 256; ++x)
    for (int c = 0; c < 3; ++c) f.at(x, 0, c) = x / 255.0;
  save_frame(f, tmp.str() + "/ramp.png");
  Frame back = load_frame(tmp.str() + "/ramp.png");
  std::set<double> values;
  for (int x = 0; x < 256; ++x) {
    CHECK(back.at(x, 0, 0) == x / 255.0);
    values.insert(back.at(x, 0, 0));
  }
  CHECK(values.size() == 256);
}

TEST_CASE("load errors") {
  testutil::TempDir tmp("frames");
  CHECK_THROWS_AS(load_frame(tmp.str() + "/nope.png"), IoError);

  std::ofstream junk(tmp.str() + "/junk.png", std::ios::binary);
  junk << "definitely not a png";
  junk.close();
  CHECK_THROWS_AS(load_frame(tmp.str() + "/junk.png"), IoError);
}

TEST_CASE("key_states_identity returns the frame twice") {
  Frame f(4, 4, 0.25);
  auto [start, end] = key_states_identity(f);
  CHECK(start.data == f.data);
  CHECK(end.data == f.data);
}

TEST_CASE("import_key_states assembles a quad and checks dimensions") {
  testutil::TempDir tmp("quad");
  Frame a(8, 6, 0.5);
  save_frame(a, tmp.str() + "/000003_s.png");
  save_frame(a, tmp.str() + "/000003_e.png");
  save_frame(a, tmp.str() + "/000004_s.png");
  save_frame(a, tmp.str() + "/000004_e.png");

  KeyStateQuad quad = import_key_states(tmp.str(), 3);
  CHECK(quad.l0.width == 8);
  CHECK(quad.l3.data == quad.l0.data); // zero-motion quad: identical frames

  // missing next index
  CHECK_THROWS_AS(import_key_states(tmp.str(), 4), IoError);

  // dimension mismatch across the four states
  Frame b(4, 4, 0.5);
  save_frame(b, tmp.str() + "/000004_e.png");
  CHECK_THROWS_AS(import_key_states(tmp.str(), 3), DimensionError);
}

TEST_CASE("ExposureConfig patterns and invariants") {
  auto c = ExposureConfig::from_pattern(9, 1);
  CHECK(c.t0 == doctest::Approx(0.9));
  CHECK(c.lambda() == doctest::Approx(1.0 / 9.0));
  CHECK(c.t0 + c.t1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(ExposureConfig::from_pattern(0, 5));
  CHECK_THROWS(ExposureConfig::from_t0(0.0));
}
