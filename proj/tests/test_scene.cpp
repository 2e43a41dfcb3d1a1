// cfisac: cell-free ISAC drone detection simulator
// Copyright (C) 2026 The cfisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "cfisac/scene.hpp"
#include "test_support.hpp"

using namespace cfisac;

TEST_CASE("array response examples") {
  const CVec a = array_response(0.0, 0.0, 2);
  CHECK(std::abs(a[0] - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(a[1] - cplx(1, 0)) < 1e-15);

  const CVec b = array_response(kPi / 2, 0.0, 4);
  const double expect[] = {1, -1, 1, -1};
  for (int m = 0; m < 4; ++m) CHECK(std::abs(b[m] - cplx(expect[m], 0)) < 1e-12);

  // sin(pi/6) cos(pi/3) = 1/4, phase step pi/4
  const CVec c = array_response(kPi / 6, kPi / 3, 3);
  for (int m = 0; m < 3; ++m) {
    const cplx ref = std::exp(cplx(0, m * kPi / 4));
    CHECK(std::abs(c[m] - ref) < 1e-12);
  }

  CHECK_THROWS_AS(array_response(0.1, 0.2, 0), std::invalid_argument);
}

TEST_CASE("array response entries are unit modulus") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int t = 0; t < 50; ++t) {
    const int M = 1 + t % 17;
    const CVec a = array_response(ang(g), ang(g) / 2, M);
    CHECK(std::abs(a[0] - cplx(1, 0)) < 1e-15);
    CHECK(a.squaredNorm() == doctest::Approx(M).epsilon(1e-12));
    for (int m = 0; m < M; ++m) CHECK(std::abs(a[m]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("angles from geometry") {
  const Vec3 ap(10, -5, 20);
  const auto up = direction_angles(ap, Vec3(10, -5, 120));
  CHECK(up.elevation == doctest::Approx(kPi / 2).epsilon(1e-15));

  // Round trip: a target on the ray recovers the angles.
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> az(-kPi + 1e-3, kPi - 1e-3), el(-1.5, 1.5), dist(1, 500);
  for (int t = 0; t < 100; ++t) {
    const double a = az(g), e = el(g), d = dist(g);
    const Vec3 target = ap + d * Vec3(std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e));
    const auto got = direction_angles(ap, target);
    CHECK(std::abs(got.azimuth - a) < 1e-9);
    CHECK(std::abs(got.elevation - e) < 1e-9);
  }
  CHECK_THROWS_AS(direction_angles(ap, ap), std::domain_error);
}

TEST_CASE("target above a transmit AP has elevation pi/2") {
  auto cfg = testing::small_config();
  cfg.geometry.grid_side = 1; // single point at the origin
  cfg.geometry.tx_aps = {Vec3(0, 0, 20), Vec3(100, 0, 20)};
  const Scene scene = build_scene(cfg, 1);
  const auto ang = scene.angles(0);
  CHECK(ang.tx_elevation[0] == doctest::Approx(kPi / 2));
}

TEST_CASE("noise power from thermal floor") {
  RfConfig rf;
  const double dbm = -174.0 + 10.0 * std::log10(20e6) + 7.0;
  const double oracle = 1e-3 * std::pow(10.0, dbm / 10.0);
  CHECK(noise_power_w(rf) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(noise_power_w(rf) == doctest::Approx(3.99e-13).epsilon(0.01));
}

TEST_CASE("bistatic gain follows the radar equation") {
  const double lambda = 0.15, rcs = 0.01;
  const double g1 = bistatic_gain(lambda, rcs, 100, 80);
  const double oracle = lambda * lambda * rcs / (std::pow(4 * kPi, 3) * 100.0 * 100.0 * 80.0 * 80.0);
  CHECK(g1 == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(bistatic_gain(lambda, rcs, 200, 80) == doctest::Approx(g1 / 4).epsilon(1e-12));
  CHECK(bistatic_gain(lambda, rcs, 100, 160) == doctest::Approx(g1 / 4).epsilon(1e-12));
  double prev = g1;
  for (double d = 110; d < 1000; d += 10) {
    const double gd = bistatic_gain(lambda, rcs, d, 80);
    CHECK(gd <= prev);
    CHECK(bistatic_gain(lambda, rcs, 100, d) <= g1);
    prev = gd;
  }
}

TEST_CASE("scene channels") {
  const auto cfg = testing::small_config();
  const Scene scene = build_scene(cfg, 5);
  const auto& geo = scene.geometry();
  CHECK(geo.S() == 9);
  CHECK(geo.K() == 2);
  const int M = geo.antennas_per_ap;

  for (std::size_t s = 0; s < geo.S(); ++s) {
    const auto ch = scene.channels(s);
    const auto ang = scene.angles(s);
    CHECK(ch.target_channel.size() == static_cast<Eigen::Index>(geo.L()) * M);
    for (std::size_t l = 0; l < geo.L(); ++l) {
      const CVec a = array_response(ang.tx_azimuth[l], ang.tx_elevation[l], M);
      const CVec block = ch.target_channel.segment(static_cast<Eigen::Index>(l) * M, M);
      CHECK((block.conjugate() - a).norm() == 0.0);
    }
    for (std::size_t r = 0; r < geo.R(); ++r)
      for (std::size_t l = 0; l < geo.L(); ++l) {
        const double dt = (geo.tx_aps[l] - geo.sensing_points[s]).norm();
        const double dr = (geo.rx_aps[r] - geo.sensing_points[s]).norm();
        CHECK(ch.sensing_gains(r, l) ==
              doctest::Approx(bistatic_gain(wavelength(cfg.rf), cfg.rf.rcs_m2, dt, dr)).epsilon(1e-14));
      }
    CHECK(ch.noise_power > 0);
  }
}

TEST_CASE("scene is deterministic in the seed") {
  const auto cfg = testing::small_config();
  const Scene a = build_scene(cfg, 42), b = build_scene(cfg, 42), c = build_scene(cfg, 43);
  for (std::size_t k = 0; k < a.geometry().K(); ++k) {
    CHECK((a.ue_channels()[k] - b.ue_channels()[k]).norm() == 0.0);
    CHECK(a.geometry().ues[k] == b.geometry().ues[k]);
  }
  CHECK((a.ue_channels()[0] - c.ue_channels()[0]).norm() > 0.0);
  const auto ca = a.channels(4), cb = b.channels(4);
  CHECK((ca.sensing_gains - cb.sensing_gains).norm() == 0.0);
  CHECK((ca.target_channel - cb.target_channel).norm() == 0.0);
}

TEST_CASE("UEs inside their area with log-distance path loss") {
  const auto cfg = testing::small_config();
  const Scene scene = build_scene(cfg, 9);
  for (const auto& ue : scene.geometry().ues) {
    CHECK(std::abs(ue.x()) <= cfg.geometry.ue_area_side_m / 2);
    CHECK(std::abs(ue.y()) <= cfg.geometry.ue_area_side_m / 2);
    CHECK(ue.z() == cfg.geometry.ue_height_m);
  }
  const double ref = std::pow(10.0, -(30.5 + 36.7 * 2.0) / 10.0); // 100 m
  CHECK(ue_path_gain(cfg.rf, 100.0) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("co-located AP and sensing point is a domain error") {
  auto cfg = testing::small_config();
  cfg.geometry.grid_side = 1;
  cfg.geometry.target_altitude_m = 20;
  cfg.geometry.tx_aps = {Vec3(0, 0, 20), Vec3(100, 0, 20)};
  CHECK_THROWS_AS(build_scene(cfg, 1), std::domain_error);
}

TEST_CASE("altitude change moves every sensing point") {
  const auto cfg = testing::small_config();
  const Scene scene = build_scene(cfg, 2);
  const Scene high = scene.with_altitude(250);
  for (std::size_t s = 0; s < high.geometry().S(); ++s) {
    CHECK(high.geometry().sensing_points[s].z() == 250);
    CHECK(high.geometry().sensing_points[s].x() == scene.geometry().sensing_points[s].x());
  }
  CHECK((high.channels(0).sensing_gains.array() < scene.channels(0).sensing_gains.array()).all());
}

TEST_CASE("RCS draws are unit-power circular Gaussian") {
  const auto a = draw_rcs(17, 100, 1000);
  CHECK(a.alpha.size() == 100000);
  const double power = a.alpha.squaredNorm() / a.alpha.size();
  const cplx mean = a.alpha.mean();
  CHECK(power >= 0.99);
  CHECK(power <= 1.01);
  CHECK(std::abs(mean) < 0.02);
  const auto b = draw_rcs(17, 100, 1000);
  CHECK((a.alpha - b.alpha).norm() == 0.0);
  CHECK_THROWS_AS(draw_rcs(1, 0, 3), std::invalid_argument);
}
