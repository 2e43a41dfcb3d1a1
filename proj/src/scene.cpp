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

#include "cfisac/scene.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "cfisac/rng.hpp"

namespace cfisac {

CVec array_response(double azimuth, double elevation, int antennas) {
  if (antennas < 1) throw std::invalid_argument("array_response: antenna count must be >= 1");
  if (!std::isfinite(azimuth) || !std::isfinite(elevation))
    throw std::invalid_argument("array_response: angles must be finite");
  const double phase = kPi * std::sin(azimuth) * std::cos(elevation);
  CVec a(antennas);
  for (int m = 0; m < antennas; ++m) a[m] = std::polar(1.0, m * phase);
  return a;
}

Angles direction_angles(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double horizontal = std::hypot(d.x(), d.y());
  if (horizontal == 0.0 && d.z() == 0.0) throw std::domain_error("direction_angles: coincident points");
  return {std::atan2(d.y(), d.x()), std::atan2(d.z(), horizontal)};
}

double wavelength(const RfConfig& rf) { return kSpeedOfLight / rf.carrier_hz; }

double noise_power_w(const RfConfig& rf) {
  const double dbm = -174.0 + 10.0 * std::log10(rf.bandwidth_hz) + rf.noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double ue_path_gain(const RfConfig& rf, double distance_m) {
  const double d = std::max(distance_m, rf.path_loss_ref_m);
  const double pl_db = rf.path_loss_ref_db + 10.0 * rf.path_loss_exponent * std::log10(d / rf.path_loss_ref_m);
  return std::pow(10.0, -pl_db / 10.0);
}

double bistatic_gain(double wavelength_m, double rcs_m2, double tx_distance_m, double rx_distance_m) {
  if (tx_distance_m <= 0.0 || rx_distance_m <= 0.0)
    throw std::domain_error("bistatic_gain: distances must be positive");
  const double four_pi_cubed = std::pow(4.0 * kPi, 3);
  return wavelength_m * wavelength_m * rcs_m2 /
         (four_pi_cubed * tx_distance_m * tx_distance_m * rx_distance_m * rx_distance_m);
}

std::vector<Vec3> sensing_grid(const GeometryConfig& g) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(g.grid_side) * g.grid_side);
  const double cell = g.sensing_area_side_m / g.grid_side;
  const double origin = -0.5 * g.sensing_area_side_m + 0.5 * cell;
  for (int iy = 0; iy < g.grid_side; ++iy)
    for (int ix = 0; ix < g.grid_side; ++ix)
      pts.emplace_back(origin + ix * cell, origin + iy * cell, g.target_altitude_m);
  return pts;
}

Scene::Scene(ScenarioConfig config, NetworkGeometry geometry, std::vector<CVec> ue_channels)
    : config_(std::move(config)),
      geometry_(std::move(geometry)),
      ue_channels_(std::move(ue_channels)),
      noise_power_(noise_power_w(config_.rf)) {}

SteeringAngles Scene::angles(std::size_t point) const {
  const Vec3& target = geometry_.sensing_points.at(point);
  const auto L = static_cast<Eigen::Index>(geometry_.L());
  const auto R = static_cast<Eigen::Index>(geometry_.R());
  SteeringAngles out{RVec(L), RVec(L), RVec(R), RVec(R)};
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto a = direction_angles(geometry_.tx_aps[l], target);
    out.tx_azimuth[l] = a.azimuth;
    out.tx_elevation[l] = a.elevation;
  }
  for (Eigen::Index r = 0; r < R; ++r) {
    const auto a = direction_angles(target, geometry_.rx_aps[r]);
    out.rx_azimuth[r] = a.azimuth;
    out.rx_elevation[r] = a.elevation;
  }
  return out;
}

ChannelSet Scene::channels(std::size_t point) const {
  const Vec3& target = geometry_.sensing_points.at(point);
  const int M = geometry_.antennas_per_ap;
  const auto L = geometry_.L();
  const auto R = geometry_.R();
  const auto ang = angles(point);

  ChannelSet ch;
  ch.ue_channels = ue_channels_;
  ch.noise_power = noise_power_;
  ch.target_channel.resize(static_cast<Eigen::Index>(L) * M);
  for (std::size_t l = 0; l < L; ++l)
    ch.target_channel.segment(static_cast<Eigen::Index>(l) * M, M) =
        array_response(ang.tx_azimuth[l], ang.tx_elevation[l], M).conjugate();

  const double lambda = wavelength(config_.rf);
  ch.sensing_gains.resize(R, L);
  for (std::size_t r = 0; r < R; ++r) {
    const double dr = (geometry_.rx_aps[r] - target).norm();
    for (std::size_t l = 0; l < L; ++l) {
      const double dt = (geometry_.tx_aps[l] - target).norm();
      ch.sensing_gains(r, l) = bistatic_gain(lambda, config_.rf.rcs_m2, dt, dr);
    }
  }
  return ch;
}

Scene Scene::with_altitude(double altitude_m) const {
  ScenarioConfig cfg = config_;
  cfg.geometry.target_altitude_m = altitude_m;
  NetworkGeometry geo = geometry_;
  for (auto& p : geo.sensing_points) p.z() = altitude_m;
  return Scene(std::move(cfg), std::move(geo), ue_channels_);
}

Scene build_scene(const ScenarioConfig& config, std::uint64_t seed) {
  require_valid(config);
  const auto& g = config.geometry;

  NetworkGeometry geo;
  geo.tx_aps = g.tx_aps;
  geo.rx_aps = g.rx_aps;
  geo.antennas_per_ap = g.antennas_per_ap;
  geo.sensing_points = sensing_grid(g);

  auto place = make_engine(seed, {tag(Stream::UePlacement)});
  std::uniform_real_distribution<double> coord(-0.5 * g.ue_area_side_m, 0.5 * g.ue_area_side_m);
  for (int k = 0; k < g.num_ues; ++k) {
    const double x = coord(place);
    const double y = coord(place);
    geo.ues.emplace_back(x, y, g.ue_height_m);
  }

  // Degenerate placements are reported here rather than at first use.
  for (const auto& p : geo.sensing_points) {
    for (const auto& ap : geo.tx_aps)
      if ((ap - p).norm() == 0.0) throw std::domain_error("build_scene: transmit AP co-located with a sensing point");
    for (const auto& ap : geo.rx_aps)
      if ((ap - p).norm() == 0.0) throw std::domain_error("build_scene: receive AP co-located with a sensing point");
  }

  const int M = g.antennas_per_ap;
  const auto L = static_cast<Eigen::Index>(geo.L());
  auto fading = make_engine(seed, {tag(Stream::UeFading)});
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::vector<CVec> ue_channels;
  for (const auto& ue : geo.ues) {
    CVec h(L * M);
    for (Eigen::Index l = 0; l < L; ++l) {
      const double d = (geo.tx_aps[l] - ue).norm();
      if (d == 0.0) throw std::domain_error("build_scene: UE co-located with a transmit AP");
      const double amp = std::sqrt(ue_path_gain(config.rf, d));
      for (int m = 0; m < M; ++m) {
        const double re = gauss(fading);
        const double im = gauss(fading);
        h[l * M + m] = amp * cplx(re, im);
      }
    }
    ue_channels.push_back(std::move(h));
  }
  return Scene(config, std::move(geo), std::move(ue_channels));
}

RcsRealization draw_rcs(std::uint64_t seed, std::size_t R, std::size_t L) {
  if (R < 1 || L < 1) throw std::invalid_argument("draw_rcs: R and L must be >= 1");
  auto eng = make_engine(seed, {tag(Stream::Rcs)});
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  RcsRealization out{CVec(static_cast<Eigen::Index>(R * L))};
  for (Eigen::Index i = 0; i < out.alpha.size(); ++i) {
    const double re = gauss(eng);
    const double im = gauss(eng);
    out.alpha[i] = cplx(re, im);
  }
  return out;
}

} // namespace cfisac
