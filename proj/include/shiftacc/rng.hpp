// Copyright 2026 The shiftacc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHIFTACC_RNG_HPP
#define SHIFTACC_RNG_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace shiftacc {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection
/// on 128-bit counters. Output for a given (counter, key) never changes.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Sequential draws from the Philox stream addressed by (seed, tag, index).
/// The 128-bit counter is {index lo, index hi, block, tag} and the key is the
/// 64-bit seed, so streams for different indices never overlap and adding
/// rows to a dataset leaves earlier rows untouched.
///
/// uniform(): 53 bits from two consecutive words, mapped to the open
/// interval (0, 1). normal(): Box-Muller on two uniforms; both outputs are
/// used, the second one cached.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint32_t tag, std::uint64_t index);

  double uniform();
  double normal();

 private:
  std::uint32_t next_word();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Deterministic Fisher-Yates permutation of [0, n) drawn from the stream
/// (seed, tag, 0).
std::vector<Eigen::Index> permutation(Eigen::Index n, std::uint64_t seed, std::uint32_t tag);

}  // namespace shiftacc

#endif  // SHIFTACC_RNG_HPP
