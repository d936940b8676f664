// core/include/msdgp/rng.h

// Copyright 2026  msdgp authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MSDGP_RNG_H_
#define MSDGP_RNG_H_

#include <array>
#include <cstdint>

#include "msdgp/tensor.h"

namespace msdgp {

// Philox4x32-10 block function: 128-bit counter, 64-bit key, four 32-bit
// outputs per block. Counter-based, so any block is addressable directly.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4> &counter,
                                   const std::array<uint32_t, 2> &key);

// Deterministic random stream over Philox4x32-10.
//
// Layout: key = seed (two 32-bit words); counter words c2,c3 carry the
// stream id and c0,c1 the block index, so streams with distinct ids are
// disjoint slices of the same keyed generator. split(i) derives a child
// whose stream id is a SplitMix64 hash of (parent id, i); children are
//
//   - reproducible: same seed + same split path => same draws,
//   - independent of the parent's consumption position.
//
// Uniform doubles take the top 53 bits of a 64-bit draw; normals use the
// Box-Muller transform (second value cached). Results are identical across
// runs on a given platform for a fixed seed.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed, uint64_t stream_id = 0);

  uint32_t next_u32();
  uint64_t next_u64();
  double next_double();  // uniform on [0, 1)
  double next_normal();  // standard normal
  // Uniform integer in [0, n); n must be positive.
  uint64_t next_below(uint64_t n);

  RandomStream split(uint64_t child) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t block_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// i.i.d. standard normal draws in row-major order; deterministic for a
// fixed stream state.
Tensor gaussian_sample(const Shape &shape, RandomStream &rng);

}  // namespace msdgp

#endif  // MSDGP_RNG_H_
