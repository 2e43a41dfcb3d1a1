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

#pragma once

#include <cstdint>
#include <vector>

#include "cfisac/config.hpp"
#include "cfisac/types.hpp"

namespace cfisac {

struct NetworkGeometry {
  std::vector<Vec3> tx_aps;
  std::vector<Vec3> rx_aps;
  std::vector<Vec3> ues;
  std::vector<Vec3> sensing_points;
  int antennas_per_ap = 1;

  std::size_t L() const { return tx_aps.size(); }
  std::size_t R() const { return rx_aps.size(); }
  std::size_t K() const { return ues.size(); }
  std::size_t S() const { return sensing_points.size(); }
};

// Angles toward one sensing point. Transmit angles are measured from each
// transmit AP to the target, receive angles from the target to each
// receive AP. Azimuth in (-pi, pi], elevation in [-pi/2, pi/2].
struct SteeringAngles {
  RVec tx_azimuth;
  RVec tx_elevation;
  RVec rx_azimuth;
  RVec rx_elevation;
};

// Channels for one sensing point. ue_channels[k] and target_channel are
// the vectors h with the downlink gain toward the receiver given by h^H w;
// hence target_channel holds the conjugated array responses so that its
// conjugate, block l, equals a(azimuth_l, elevation_l).
struct ChannelSet {
  std::vector<CVec> ue_channels;
  CVec target_channel;
  RMat sensing_gains; // R x L, bistatic two-hop gain with mean RCS folded in
  double noise_power = 0.0;
};

struct RcsRealization {
  CVec alpha; // length R*L, receiver-major: index r*L + l
};

struct Angles {
  double azimuth;
  double elevation;
};

// Half-wavelength ULA response; entry m is exp(j m pi sin(az) cos(el)).
CVec array_response(double azimuth, double elevation, int antennas);

// Azimuth/elevation of the displacement to - from. Throws std::domain_error
// when the two points coincide.
Angles direction_angles(const Vec3& from, const Vec3& to);

double wavelength(const RfConfig& rf);

// Thermal noise k_B T0 B F: -174 dBm/Hz + 10 log10(B) + NF, in watts.
double noise_power_w(const RfConfig& rf);

// Log-distance large-scale gain (linear, <= 1 for d >= d0 with PL0 >= 0).
double ue_path_gain(const RfConfig& rf, double distance_m);

// lambda^2 sigma / ((4 pi)^3 d_t^2 d_r^2).
double bistatic_gain(double wavelength_m, double rcs_m2, double tx_distance_m, double rx_distance_m);

// The immutable part of a scenario: geometry and the UE channels, which do
// not depend on the sensing point. Per-point channels come from at().
class Scene {
public:
  Scene(ScenarioConfig config, NetworkGeometry geometry, std::vector<CVec> ue_channels);

  const ScenarioConfig& config() const { return config_; }
  const NetworkGeometry& geometry() const { return geometry_; }
  const std::vector<CVec>& ue_channels() const { return ue_channels_; }
  double noise_power() const { return noise_power_; }

  SteeringAngles angles(std::size_t point) const;
  ChannelSet channels(std::size_t point) const;

  // Same scene with the sensing grid moved to another altitude; UE channels
  // are kept so altitude sweeps compare like with like.
  Scene with_altitude(double altitude_m) const;

private:
  ScenarioConfig config_;
  NetworkGeometry geometry_;
  std::vector<CVec> ue_channels_;
  double noise_power_;
};

// Uniform lattice of cell centres over the sensing square at the altitude.
std::vector<Vec3> sensing_grid(const GeometryConfig& g);

// Deterministic in (config, seed). UE positions uniform over the UE area,
// UE channels i.i.d. Rayleigh per antenna with log-distance path loss.
Scene build_scene(const ScenarioConfig& config, std::uint64_t seed);

RcsRealization draw_rcs(std::uint64_t seed, std::size_t R, std::size_t L);

} // namespace cfisac
