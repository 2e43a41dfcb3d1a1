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

#include <vector>

#include "cfisac/scene.hpp"
#include "cfisac/types.hpp"

namespace cfisac {

// Centralized unit-norm precoders. w[0] is the sensing (MRT) precoder,
// w[k] for k = 1..K the RZF precoder of UE k. Per-AP slices are the
// consecutive length-M blocks of each w[k].
struct PrecoderSet {
  std::vector<CVec> w;
  int antennas_per_ap = 1;
  double rzf_regularizer = 0.0;

  std::size_t K() const { return w.empty() ? 0 : w.size() - 1; }
  std::size_t L() const { return w.empty() ? 0 : static_cast<std::size_t>(w[0].size() / antennas_per_ap); }
  auto slice(std::size_t k, std::size_t l) const {
    return w[k].segment(static_cast<Eigen::Index>(l) * antennas_per_ap, antennas_per_ap);
  }
  double slice_norm2(std::size_t k, std::size_t l) const { return slice(k, l).squaredNorm(); }
};

// rho[0] is the sensing power, rho[k] the power of UE k (watts per symbol).
struct PowerAllocation {
  RVec rho;
  double rho_max = 1.0;
};

// w_k = normalize((sum_j h_j h_j^H + reg I)^{-1} h_k). Throws NumericalError
// when the regularized Gram matrix is singular (only possible with reg = 0).
std::vector<CVec> rzf_precoders(const std::vector<CVec>& ue_channels, double regularizer);

// w_0 = h_0 / ||h_0||. Throws std::invalid_argument when h_0 = 0.
CVec mrt_sensing_precoder(const CVec& target_channel);

double default_rzf_regularizer(std::size_t K, double noise_power, double rho_max);

PrecoderSet make_precoders(const ChannelSet& channels, int antennas_per_ap, double regularizer);

// P_l = sum_k rho_k ||w_{k,l}||^2.
double per_ap_power(const PrecoderSet& precoders, const PowerAllocation& powers, std::size_t l);

// SINR of UE k (1-based). Interference from the other UEs and from the
// sensing beam; sigma^2 from the channel set.
double ue_sinr(const ChannelSet& channels, const PrecoderSet& precoders, const PowerAllocation& powers,
               std::size_t k);

} // namespace cfisac
