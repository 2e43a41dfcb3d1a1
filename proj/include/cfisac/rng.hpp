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
#include <initializer_list>
#include <random>

namespace cfisac {

// Purpose tags for deterministic sub-stream derivation. Values are part of
// the reproducibility contract; never renumber.
enum class Stream : std::uint64_t {
  UePlacement = 1,
  UeFading = 2,
  Rcs = 3,
  Calibration = 4,
  FalseAlarm = 5,
  Detection = 6,
  Instance = 7,
};

// Builds an engine from a master seed and a path of sub-stream indices.
// Every 64-bit word (master seed first, then each path element) is split
// into its low and high 32-bit halves and fed to std::seed_seq in order.
// Identical (master, path) pairs therefore produce identical streams
// independently of thread count or evaluation order.
std::mt19937_64 make_engine(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Derives a child seed; used to hand a whole subtree to another component.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

} // namespace cfisac
