#include "uti/trajectory.hpp"

#include <doctest.h>

#include "helpers.hpp"

#include <cmath>
#include <random>

using namespace uti;

TEST_CASE("estimate_lambda recovers t1/t0 on consistent constant fields") {
  // closed-form fixture: v1=(10,0), a=(4,0), t0=0.7 -> S01=(6.02,0),
  // S12=(3.18,0), S23=(8.82,0), lambda=3/7
  auto f = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
  CHECK(f.s01.u(0, 0) == doctest::Approx(6.02).epsilon(1e-12));
  CHECK(f.s12.u(0, 0) == doctest::Approx(3.18).epsilon(1e-12));
  CHECK(f.s23.u(0, 0) == doctest::Approx(8.82).epsilon(1e-12));

  auto est = estimate_lambda(f.s01, f.s12, f.s23);
  CHECK(est.lambda == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  CHECK(est.t0 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(est.t1 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(est.confidence == doctest::Approx(1.0));
  CHECK(est.inlier_fraction == doctest::Approx(1.0));
}

TEST_CASE("estimate_lambda: random kinematics, mixed directions") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> vel(-12.0, 12.0);
  std::uniform_real_distribution<double> acc(-4.0, 4.0);
  std::uniform_real_distribution<double> split(0.15, 0.85);
  for (int trial = 0; trial < 50; ++trial) {
    double t0 = split(rng);
    double vx = vel(rng), vy = vel(rng);
    // keep motion well above the magnitude floor
    if (std::abs(vx) < 4.0) vx = vx < 0 ? vx - 4.0 : vx + 4.0;
    auto f = testutil::make_consistent_fields({vx, vy}, {acc(rng), acc(rng)}, t0);
    auto est = estimate_lambda(f.s01, f.s12, f.s23);
    CHECK(est.lambda == doctest::Approx((1.0 - t0) / t0).epsilon(1e-9));
  }
}

TEST_CASE("estimate_lambda: weighted median resists outliers") {
  auto f = testutil::make_consistent_fields({10, 0}, {0, 0}, 0.5, 32, 32);
  // corrupt a sixth of the pixels with a wild second displacement
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 5; ++x) f.s12.u(x, y) = 40.0;
  auto est = estimate_lambda(f.s01, f.s12, f.s23);
  CHECK(est.lambda == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.confidence < 1.0);
}

TEST_CASE("estimate_lambda exclusions and failure modes") {
  LambdaOptions opts;

  SUBCASE("all-static field throws insufficient motion") {
    FlowField zero(16, 16);
    CHECK_THROWS_AS(estimate_lambda(zero, zero, zero, opts),
                    InsufficientMotionError);
  }

  SUBCASE("sub-floor magnitudes are excluded") {
    // resultant magnitude 0.4 px < 0.5 everywhere
    auto s01 = FlowField::constant(16, 16, 0.2, 0);
    auto s23 = FlowField::constant(16, 16, 0.2, 0);
    auto s12 = FlowField::constant(16, 16, 0.2, 0);
    CHECK_THROWS_AS(estimate_lambda(s01, s12, s23, opts),
                    InsufficientMotionError);
  }

  SUBCASE("direction disagreement beyond cos_floor is excluded") {
    auto s01 = FlowField::constant(16, 16, 6, 0);
    auto s23 = FlowField::constant(16, 16, 6, 0);
    auto s12 = FlowField::constant(16, 16, 0, 5); // orthogonal to resultant
    CHECK_THROWS_AS(estimate_lambda(s01, s12, s23, opts),
                    InsufficientMotionError);
  }

  SUBCASE("min_pixels boundary") {
    auto f = testutil::make_consistent_fields({10, 0}, {0, 0}, 0.5, 16, 16);
    // keep exactly 99 moving pixels
    int moving = 0;
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        if (moving < 99) {
          ++moving;
          continue;
        }
        f.s01.u(x, y) = f.s12.u(x, y) = f.s23.u(x, y) = 0.0;
      }
    CHECK_THROWS_AS(estimate_lambda(f.s01, f.s12, f.s23, opts),
                    InsufficientMotionError);
  }

  SUBCASE("per-pixel ratio map on request") {
    auto f = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
    opts.keep_ratio_map = true;
    auto est = estimate_lambda(f.s01, f.s12, f.s23, opts);
    REQUIRE(est.per_pixel_ratio.has_value());
    CHECK(est.per_pixel_ratio->at(3, 3) ==
          doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  }
}

TEST_CASE("fit_trajectory inverts the displacement equations") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> vel(-10.0, 10.0);
  std::uniform_real_distribution<double> acc(-5.0, 5.0);
  std::uniform_real_distribution<double> split(0.1, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    double t0 = split(rng);
    std::array<double, 2> v1{vel(rng), vel(rng)}, a{acc(rng), acc(rng)};
    auto f = testutil::make_consistent_fields(v1, a, t0, 4, 4);
    auto traj = fit_trajectory(f.s01, f.s23, f.lambda);
    CHECK(traj.v1.u(0, 0) == doctest::Approx(v1[0]).epsilon(1e-10));
    CHECK(traj.v1.v(0, 0) == doctest::Approx(v1[1]).epsilon(1e-10));
    CHECK(traj.accel.u(0, 0) == doctest::Approx(a[0]).epsilon(1e-10));
    CHECK(traj.accel.v(0, 0) == doctest::Approx(a[1]).epsilon(1e-10));
    CHECK(traj.t_min == doctest::Approx(-t0));
    CHECK(traj.t_max == doctest::Approx(1.0));
    // reproducing the inputs closes the loop
    auto d01 = eval_displacement(traj, 0.0); // trivially zero
    for (double v : d01.data) CHECK(v == 0.0);
    auto d12 = eval_displacement(traj, traj.t1());
    CHECK(d12.u(1, 1) == doctest::Approx(f.s12.u(1, 1)).epsilon(1e-9));
    CHECK(d12.v(1, 1) == doctest::Approx(f.s12.v(1, 1)).epsilon(1e-9));
  }
}

TEST_CASE("eval_displacement matches the closed-form position curve") {
  auto f = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
  auto traj = fit_trajectory(f.s01, f.s23, f.lambda);
  // p(t) = 10 t + 2 t^2; at t=0.15: 1.545
  auto d = eval_displacement(traj, 0.15);
  CHECK(d.u(0, 0) == doctest::Approx(1.545).epsilon(1e-12));
  CHECK(d.v(0, 0) == doctest::Approx(0.0));

  CHECK_THROWS(eval_displacement(traj, traj.t_max + 0.2));
  CHECK_THROWS(eval_displacement(traj, traj.t_min - 0.2));
  CHECK_NOTHROW(eval_displacement(traj, traj.t_max));
  CHECK_NOTHROW(eval_displacement(traj, traj.t_min));
}

TEST_CASE("qvi_displacement endpoints and midpoint") {
  auto s01 = FlowField::constant(4, 4, 2, 0);
  auto s12 = FlowField::constant(4, 4, 6, 0);
  auto d0 = qvi_displacement(s01, s12, 0.0);
  for (double v : d0.data) CHECK(v == 0.0);
  auto d1 = qvi_displacement(s01, s12, 1.0);
  CHECK(d1.u(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
  // u=1/2: c12=(0.25+0.5)/2=0.375, c01=(0.5-0.25)/2=0.125
  auto dm = qvi_displacement(s01, s12, 0.5);
  CHECK(dm.u(0, 0) == doctest::Approx(0.375 * 6 + 0.125 * 2).epsilon(1e-12));
}

TEST_CASE("qvi_trajectory reproduces qvi_displacement over real time") {
  auto s01 = FlowField::constant(4, 4, 3, -1);
  auto s12 = FlowField::constant(4, 4, 5, 2);
  double t1 = 0.3;
  auto traj = qvi_trajectory(s01, s12, t1);
  CHECK(traj.lambda == doctest::Approx(t1 / (1 - t1)).epsilon(1e-12));
  for (double u : {0.0, 0.25, 0.6, 1.0}) {
    auto a = eval_displacement(traj, u * t1);
    auto b = qvi_displacement(s01, s12, u);
    CHECK(a.u(2, 2) == doctest::Approx(b.u(2, 2)).epsilon(1e-12));
    CHECK(a.v(2, 2) == doctest::Approx(b.v(2, 2)).epsilon(1e-12));
  }
}

TEST_CASE("degenerate_check vanishes when the intervals are equal") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    FlowField s01(8, 8), s12(8, 8);
    for (double& v : s01.data) v = dist(rng);
    for (double& v : s12.data) v = dist(rng);
    CHECK(degenerate_check(s01, s12) <= 1e-9);
  }
}

TEST_CASE("schedule_timestamps counts and kinds") {
  SUBCASE("6:4 at factor 10 -> 7 intra + 3 inter") {
    auto sched = schedule_timestamps(ExposureConfig::from_pattern(6, 4), 10);
    REQUIRE(sched.size() == 10);
    int intra = 0;
    for (const auto& e : sched) intra += e.kind == SlotKind::intra;
    CHECK(intra == 7);
    CHECK(sched[0].t_global == 0.0);
    CHECK(sched[0].t_l1 == doctest::Approx(-0.6));
    CHECK(sched[7].kind == SlotKind::inter);
    CHECK(sched[9].t_global == doctest::Approx(0.9));
  }
  SUBCASE("5:5 at factor 10 -> 6 intra + 4 inter") {
    auto sched = schedule_timestamps(ExposureConfig::from_t0(0.5), 10);
    int intra = 0;
    for (const auto& e : sched) intra += e.kind == SlotKind::intra;
    CHECK(intra == 6);
  }
  SUBCASE("9:1 at factor 10 -> all intra") {
    auto sched = schedule_timestamps(ExposureConfig::from_pattern(9, 1), 10);
    int intra = 0;
    for (const auto& e : sched) intra += e.kind == SlotKind::intra;
    CHECK(intra == 10);
  }
  SUBCASE("factor 1 -> the exposure start only") {
    auto sched = schedule_timestamps(ExposureConfig::from_t0(0.7), 1);
    REQUIRE(sched.size() == 1);
    CHECK(sched[0].t_global == 0.0);
    CHECK(sched[0].kind == SlotKind::intra);
  }
}
