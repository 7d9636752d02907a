// Copyright 2026 The mssgas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <openssl/rand.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace mssgas {

using BigInt = boost::multiprecision::cpp_int;

inline unsigned bit_length(const BigInt& v) {
  return v.is_zero() ? 0u : static_cast<unsigned>(boost::multiprecision::msb(v)) + 1u;
}

// Source of randomness for every sampling step. The system variant draws
// from the OpenSSL CSPRNG; the seeded variant is a Mersenne Twister and
// exists only for reproducible tests and demos. Never deal real secrets
// from a seeded source.
//
// Satisfies UniformRandomBitGenerator so it can drive <random> and
// <algorithm> facilities directly.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  static RandomSource seeded(std::uint64_t seed) {
    RandomSource r;
    r.engine_.emplace(seed);
    return r;
  }

  static RandomSource system() { return RandomSource{}; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  bool is_seeded() const noexcept { return engine_.has_value(); }

  result_type operator()() {
    if (engine_) return (*engine_)();
    result_type out = 0;
    if (RAND_bytes(reinterpret_cast<unsigned char*>(&out), sizeof(out)) != 1) {
      throw std::runtime_error("system random source failed");
    }
    return out;
  }

  /// Uniform integer with `count` random bits.
  BigInt bits(unsigned count) {
    BigInt out = 0;
    unsigned filled = 0;
    while (filled < count) {
      out <<= 64;
      out |= (*this)();
      filled += 64;
    }
    if (filled > count) out >>= (filled - count);
    return out;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  BigInt below(const BigInt& bound) {
    if (bound <= 0) throw std::invalid_argument("RandomSource::below: empty range");
    const unsigned width = bit_length(bound - 1);
    if (width == 0) return 0;
    for (;;) {
      BigInt candidate = bits(width);
      if (candidate < bound) return candidate;
    }
  }

  /// Uniform integer in [lo, hi].
  BigInt between(const BigInt& lo, const BigInt& hi) {
    return lo + below(hi - lo + 1);
  }

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return lo + static_cast<std::uint64_t>(below(BigInt(hi - lo) + 1));
  }

 private:
  RandomSource() = default;

  std::optional<std::mt19937_64> engine_;
};

}  // namespace mssgas
