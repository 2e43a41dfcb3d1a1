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

#include "cfisac/precoding.hpp"

#include <cmath>
#include <stdexcept>

namespace cfisac {

std::vector<CVec> rzf_precoders(const std::vector<CVec>& ue_channels, double regularizer) {
  if (ue_channels.empty()) return {};
  if (regularizer < 0.0 || !std::isfinite(regularizer))
    throw std::invalid_argument("rzf_precoders: regularizer must be finite and non-negative");
  const auto n = ue_channels.front().size();
  const auto K = static_cast<Eigen::Index>(ue_channels.size());
  CMat H(n, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (ue_channels[k].size() != n) throw std::invalid_argument("rzf_precoders: channel length mismatch");
    H.col(k) = ue_channels[k];
  }
  CMat gram = H * H.adjoint();
  gram.diagonal().array() += regularizer;

  Eigen::LDLT<CMat> ldlt(gram);
  const auto d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-13 * std::max(d.maxCoeff(), 1e-300))
    throw NumericalError("rzf_precoders: regularized Gram matrix is singular");
  const CMat Wbar = ldlt.solve(H);

  std::vector<CVec> out;
  out.reserve(ue_channels.size());
  for (Eigen::Index k = 0; k < K; ++k) {
    const double norm = Wbar.col(k).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("rzf_precoders: degenerate precoder");
    out.emplace_back(Wbar.col(k) / norm);
  }
  return out;
}

CVec mrt_sensing_precoder(const CVec& target_channel) {
  const double norm = target_channel.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("mrt_sensing_precoder: zero target channel");
  return target_channel / norm;
}

double default_rzf_regularizer(std::size_t K, double noise_power, double rho_max) {
  return static_cast<double>(K) * noise_power / rho_max;
}

PrecoderSet make_precoders(const ChannelSet& channels, int antennas_per_ap, double regularizer) {
  PrecoderSet p;
  p.antennas_per_ap = antennas_per_ap;
  p.rzf_regularizer = regularizer;
  p.w.push_back(mrt_sensing_precoder(channels.target_channel));
  for (auto& w : rzf_precoders(channels.ue_channels, regularizer)) p.w.push_back(std::move(w));
  return p;
}

double per_ap_power(const PrecoderSet& precoders, const PowerAllocation& powers, std::size_t l) {
  if (l >= precoders.L()) throw std::out_of_range("per_ap_power: AP index out of range");
  double total = 0.0;
  for (std::size_t k = 0; k < precoders.w.size(); ++k) total += powers.rho[k] * precoders.slice_norm2(k, l);
  return total;
}

double ue_sinr(const ChannelSet& channels, const PrecoderSet& precoders, const PowerAllocation& powers,
               std::size_t k) {
  if (k < 1 || k > precoders.K()) throw std::out_of_range("ue_sinr: UE index out of range");
  const CVec& h = channels.ue_channels[k - 1];
  double interference = channels.noise_power;
  double desired = 0.0;
  for (std::size_t j = 0; j < precoders.w.size(); ++j) {
    const double g = std::norm(h.dot(precoders.w[j])); // |h^H w_j|^2
    if (j == k)
      desired = powers.rho[j] * g;
    else
      interference += powers.rho[j] * g;
  }
  return desired / interference;
}

} // namespace cfisac
