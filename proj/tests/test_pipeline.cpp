#include "uti/pipeline.hpp"

#include <doctest.h>

#include "uti/metrics.hpp"

#include "helpers.hpp"

#include <cmath>
#include <filesystem>

using namespace uti;
namespace fs = std::filesystem;

namespace {

SceneDataset small_dataset(double t0 = 0.7, int periods = 2, int size = 64) {
  SceneDataset ds;
  ds.spec = testutil::test_scene(size);
  ds.t0 = t0;
  ds.periods = periods;
  ds.gt_factor = 5;
  return ds;
}

} // namespace

TEST_CASE("analytic_quads produces self-consistent inputs") {
  auto ds = small_dataset();
  auto quads = analytic_quads(ds);
  REQUIRE(static_cast<int>(quads.size()) == ds.periods);
  const auto& q = quads[0];
  CHECK(q.quad.l1.width == 64);
  CHECK(q.has_reversed());
  CHECK(q.f10.anchor == Anchor::l1);
  // flows agree with the estimator: lambda comes back as t1/t0
  auto [s01, s12] = displacements_from_flows(q.f10, q.f12);
  auto s23 = compose_s23(q.f13, q.f12);
  auto est = estimate_lambda(s01, s12, s23);
  CHECK(est.lambda == doctest::Approx(0.3 / 0.7).epsilon(1e-6));
}

TEST_CASE("interpolate_sequence: counts, times, and key-state flags") {
  auto ds = small_dataset(0.7, 2);
  auto quads = analytic_quads(ds);
  PipelineOptions opts;
  opts.factor = 10;
  opts.fixed_lambda = 0.3 / 0.7;
  auto result = interpolate_sequence(quads, opts);
  REQUIRE(result.frames.size() == 20);
  REQUIRE(result.lambda_per_quad.size() == 2);

  int intra = 0, keys = 0;
  for (const auto& rf : result.frames) {
    intra += rf.kind == SlotKind::intra;
    keys += rf.key_state;
    CHECK(rf.t_abs == doctest::Approx(rf.period + rf.slot / 10.0));
  }
  CHECK(intra == 16); // 8 per period: slots 0..7 satisfy t <= t0 = 0.7
  CHECK(keys == 4);   // slots 0 and 7 each period
  CHECK(result.frames[0].key_state);
  CHECK(result.frames[7].key_state);
  CHECK_FALSE(result.frames[3].key_state);
}

TEST_CASE("interpolated frames track the analytic ground truth") {
  auto ds = small_dataset(0.7, 1);
  ds.gt_factor = 10;
  auto quads = analytic_quads(ds);
  PipelineOptions opts;
  opts.factor = 10;
  auto result = interpolate_sequence(quads, opts);
  double worst = 1e9;
  for (const auto& rf : result.frames) {
    Frame gt = gen_scene_frame(ds.spec, rf.t_abs); // L0 of quad q sits at t=q
    worst = std::min(worst, psnr(rf.frame, gt));
  }
  CHECK(worst > 25.0);
  // estimated lambda is near truth
  CHECK(std::abs(result.lambda_per_quad[0].lambda - 0.3 / 0.7) < 0.02);
}

TEST_CASE("qvi mode runs and differs from uti on uneven exposure") {
  auto ds = small_dataset(0.8, 1);
  auto quads = analytic_quads(ds);
  PipelineOptions uti_opts;
  uti_opts.factor = 5;
  uti_opts.fixed_lambda = 0.25;
  PipelineOptions qvi_opts = uti_opts;
  qvi_opts.mode = TrajectoryMode::qvi;
  auto a = interpolate_sequence(quads, uti_opts);
  auto b = interpolate_sequence(quads, qvi_opts);
  REQUIRE(a.frames.size() == b.frames.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    if (a.frames[i].frame.data != b.frames[i].frame.data) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("thread count does not change the output bits") {
  auto ds = small_dataset(0.6, 1);
  auto quads = analytic_quads(ds);
  PipelineOptions opts;
  opts.factor = 8;
  opts.threads = 1;
  auto ref = interpolate_sequence(quads, opts);
  for (int threads : {2, 5}) {
    opts.threads = threads;
    auto out = interpolate_sequence(quads, opts);
    REQUIRE(out.frames.size() == ref.frames.size());
    for (std::size_t i = 0; i < out.frames.size(); ++i)
      CHECK(out.frames[i].frame.data == ref.frames[i].frame.data);
  }
}

TEST_CASE("static quads raise insufficient motion unless lambda is fixed") {
  QuadInput q;
  Frame flat(32, 32);
  for (double& v : flat.data) v = 0.5;
  q.quad = {flat, flat, flat, flat};
  q.quad.set_times(ExposureConfig::from_t0(0.5));
  q.f10 = FlowField(32, 32, Anchor::l1);
  q.f12 = FlowField(32, 32, Anchor::l1);
  q.f13 = FlowField(32, 32, Anchor::l1);
  PipelineOptions opts;
  opts.factor = 4;
  CHECK_THROWS_AS(interpolate_sequence({q}, opts), InsufficientMotionError);

  opts.fixed_lambda = 1.0;
  auto result = interpolate_sequence({q}, opts);
  REQUIRE(result.frames.size() == 4);
  for (const auto& rf : result.frames) CHECK(rf.frame.data == flat.data);
}

TEST_CASE("scene dataset round-trips through disk") {
  testutil::TempDir tmp("ds");
  auto ds = small_dataset(0.7, 2, 48);
  ds.gt_factor = 4;
  write_scene_dataset(ds, tmp.str());

  CHECK(fs::exists(tmp.path() / "manifest.json"));
  CHECK(fs::exists(tmp.path() / "scene.json"));
  CHECK(fs::exists(tmp.path() / "keystates" / "000000_s.png"));
  CHECK(fs::exists(tmp.path() / "keystates" / "000002_e.png"));
  CHECK(fs::exists(tmp.path() / "flows" / "000000_f13.flo"));
  CHECK(fs::exists(tmp.path() / "flows" / "000001_rf12.flo"));
  CHECK(fs::exists(tmp.path() / "gt" / "000001_03.png"));

  auto quads = load_quads(tmp.str(), true);
  REQUIRE(quads.size() == 2);
  CHECK(quads[0].has_reversed());
  CHECK(quads[0].quad.l1.width == 48);

  // the loaded flows still support lambda recovery (u8/float32 rounding)
  auto [s01, s12] = displacements_from_flows(quads[0].f10, quads[0].f12);
  auto s23 = compose_s23(quads[0].f13, quads[0].f12);
  auto est = estimate_lambda(s01, s12, s23);
  CHECK(std::abs(est.lambda - 0.3 / 0.7) < 1e-3);

  auto no_rev = load_quads(tmp.str(), false);
  CHECK_FALSE(no_rev[0].has_reversed());
}

TEST_CASE("interp output directory layout") {
  testutil::TempDir tmp("out");
  auto ds = small_dataset(0.7, 1, 48);
  auto quads = analytic_quads(ds);
  PipelineOptions opts;
  opts.factor = 4;
  opts.fixed_lambda = 0.3 / 0.7;
  auto result = interpolate_sequence(quads, opts);
  write_interp_output(result, tmp.str(), 0.3 / 0.7);
  CHECK(fs::exists(tmp.path() / "manifest.json"));
  int count = 0;
  for (auto& e : fs::directory_iterator(tmp.path()))
    count += e.path().extension() == ".png";
  CHECK(count == 4);
}

TEST_CASE("blur dataset directory layout") {
  testutil::TempDir tmp("blur");
  std::vector<Frame> frames;
  for (int i = 0; i < 25; ++i) frames.push_back(gen_scene_frame(
      testutil::test_scene(32), i * 0.05));
  auto ds = synth_blur_dataset(frames, 6, 4);
  write_blur_dataset(ds, tmp.str(), 240.0);
  CHECK(fs::exists(tmp.path() / "manifest.json"));
  CHECK(fs::exists(tmp.path() / "blur" / "000000.png"));
  CHECK(fs::exists(tmp.path() / "gt" / "000001_s.png"));
  CHECK(fs::exists(tmp.path() / "gt" / "000001_e.png"));
  CHECK(fs::exists(tmp.path() / "gt" / "000001_05.png"));
}
