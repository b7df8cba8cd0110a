#include "uti/refine.hpp"

#include <doctest.h>

#include "helpers.hpp"

#include <cmath>
#include <random>

using namespace uti;

TEST_CASE("refinement_target equals the true S23 on consistent flows") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> vel(-10.0, 10.0);
  std::uniform_real_distribution<double> acc(-5.0, 5.0);
  std::uniform_real_distribution<double> split(0.1, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    double t0 = split(rng);
    std::array<double, 2> v1{vel(rng), vel(rng)}, a{acc(rng), acc(rng)};
    auto fields = testutil::make_consistent_fields(v1, a, t0, 4, 4);
    auto flows = testutil::make_consistent_flows(v1, a, t0, 4, 4);
    auto target = refinement_target(flows.f10, flows.f12, fields.lambda);
    for (std::size_t i = 0; i < target.data.size(); ++i)
      CHECK(target.data[i] ==
            doctest::Approx(fields.s23.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("refine_s23 is an identity when raw already matches the target") {
  auto fields = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
  auto flows = testutil::make_consistent_flows({10, 0}, {4, 0}, 0.7);
  auto [refined, conf] =
      refine_s23(flows.f10, flows.f12, fields.s23, fields.lambda);
  for (std::size_t i = 0; i < refined.data.size(); ++i)
    CHECK(refined.data[i] == doctest::Approx(fields.s23.data[i]).epsilon(1e-12));
  CHECK(conf.at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("refine_s23 pulls a corrupted raw field towards the target") {
  auto fields = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
  auto flows = testutil::make_consistent_flows({10, 0}, {4, 0}, 0.7);
  FlowField raw = fields.s23;
  raw.u(5, 5) += 2.0; // moderate error: partial pull
  raw.u(6, 6) = -raw.u(6, 6); // direction flip: w = 0, left alone
  auto [refined, conf] =
      refine_s23(flows.f10, flows.f12, raw, fields.lambda);

  double truth = fields.s23.u(5, 5);
  CHECK(std::abs(refined.u(5, 5) - truth) < std::abs(raw.u(5, 5) - truth));
  CHECK(conf.at(5, 5) > 0.0);
  CHECK(conf.at(5, 5) < 1.0);

  CHECK(refined.u(6, 6) == raw.u(6, 6));
  CHECK(conf.at(6, 6) == 0.0);
}

TEST_CASE("refine_s23 leaves near-static pixels untouched") {
  // target magnitude under mag_floor
  auto f10 = FlowField::constant(8, 8, 0.1, 0);
  auto f12 = FlowField::constant(8, 8, 0.05, 0);
  auto raw = FlowField::constant(8, 8, 7.0, 0);
  auto [refined, conf] = refine_s23(f10, f12, raw, 1.0);
  CHECK(refined.u(0, 0) == 7.0);
}

TEST_CASE("refine_s23 fixed points and contraction") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> noise(-3.0, 3.0);
  auto fields = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
  auto flows = testutil::make_consistent_flows({10, 0}, {4, 0}, 0.7);

  // the target itself passes through unchanged
  auto [fixed, cf] =
      refine_s23(flows.f10, flows.f12, fields.s23, fields.lambda);
  for (std::size_t i = 0; i < fixed.data.size(); ++i)
    CHECK(std::abs(fixed.data[i] - fields.s23.data[i]) <= 1e-12);

  // repeated application never moves away from the target
  FlowField raw = fields.s23;
  for (double& v : raw.data) v += noise(rng);
  auto dist = [&](const FlowField& f) {
    double worst = 0;
    for (std::size_t i = 0; i < f.data.size(); ++i)
      worst = std::max(worst, std::abs(f.data[i] - fields.s23.data[i]));
    return worst;
  };
  double prev = dist(raw);
  for (int iter = 0; iter < 8; ++iter) {
    raw = refine_s23(flows.f10, flows.f12, raw, fields.lambda).first;
    double cur = dist(raw);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("joint_estimate converges on clean flows") {
  auto flows = testutil::make_consistent_flows({10, 0}, {4, 0}, 0.7);
  auto [est, s23] = joint_estimate(flows.f10, flows.f12, flows.f13);
  CHECK(est.converged);
  CHECK(est.lambda == doctest::Approx(3.0 / 7.0).epsilon(1e-6));
  auto fields = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7);
  CHECK(s23.u(3, 3) == doctest::Approx(fields.s23.u(3, 3)).epsilon(1e-6));
}

TEST_CASE("joint_estimate improves a noisy composed field") {
  std::mt19937 rng(41);
  std::normal_distribution<double> noise(0.0, 0.4);
  auto flows = testutil::make_consistent_flows({10, 0}, {4, 0}, 0.7, 32, 32);
  FlowField f13 = flows.f13;
  for (double& v : f13.data) v += noise(rng);

  auto raw = compose_s23(f13, flows.f12);
  auto [est, refined] = joint_estimate(flows.f10, flows.f12, f13);

  auto fields = testutil::make_consistent_fields({10, 0}, {4, 0}, 0.7, 32, 32);
  auto err = [&](const FlowField& f) {
    double s = 0;
    for (std::size_t i = 0; i < f.data.size(); ++i)
      s += std::abs(f.data[i] - fields.s23.data[i]);
    return s / f.data.size();
  };
  CHECK(err(refined) < err(raw));
  CHECK(std::abs(est.lambda - 3.0 / 7.0) < 0.05);
}

TEST_CASE("joint_estimate propagates insufficient motion") {
  FlowField zero(16, 16, Anchor::l1);
  CHECK_THROWS_AS(joint_estimate(zero, zero, zero), InsufficientMotionError);
}
