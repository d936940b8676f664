// core/src/rng.cc

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

#include "msdgp/rng.h"

#include <cmath>

#include "msdgp/error.h"

namespace msdgp {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t *hi, uint32_t *lo) {
  uint64_t p = static_cast<uint64_t>(a) * static_cast<uint64_t>(b);
  *hi = static_cast<uint32_t>(p >> 32);
  *lo = static_cast<uint32_t>(p);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4> &counter,
                                   const std::array<uint32_t, 2> &key) {
  std::array<uint32_t, 4> c = counter;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], &hi0, &lo0);
    mulhilo(kPhiloxM1, c[2], &hi1, &lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

RandomStream::RandomStream(uint64_t seed, uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

void RandomStream::refill() {
  std::array<uint32_t, 4> counter = {
      static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
      static_cast<uint32_t>(stream_id_), static_cast<uint32_t>(stream_id_ >> 32)};
  std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                 static_cast<uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32(counter, key);
  ++block_;
  buffer_pos_ = 0;
}

uint32_t RandomStream::next_u32() {
  if (buffer_pos_ >= 4) refill();
  return buffer_[static_cast<size_t>(buffer_pos_++)];
}

uint64_t RandomStream::next_u64() {
  uint64_t lo = next_u32();
  uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0, 1] so the log is finite.
  double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  double u2 = next_double();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

uint64_t RandomStream::next_below(uint64_t n) {
  if (n == 0) throw IndexOutOfRange("next_below(0)");
  // Modulo bias is < 2^-40 for every n used here (n << 2^24).
  return next_u64() % n;
}

RandomStream RandomStream::split(uint64_t child) const {
  uint64_t id = splitmix64(stream_id_ ^ splitmix64(child + 0x51ED2701u));
  return RandomStream(seed_, id);
}

Tensor gaussian_sample(const Shape &shape, RandomStream &rng) {
  int64_t n = shape_numel(shape);
  std::vector<double> data(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) data[static_cast<size_t>(i)] = rng.next_normal();
  return Tensor(shape, std::move(data));
}

}  // namespace msdgp
