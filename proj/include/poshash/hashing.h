// Copyright 2026 The PosHashEmb Authors.
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

#ifndef POSHASH_HASHING_H_
#define POSHASH_HASHING_H_

#include <cstdint>
#include <string_view>
#include <vector>

namespace poshash {

// Carter-Wegman universal hash ((a * x + b) mod p) mod m over the Mersenne
// prime p = 2^61 - 1.
struct UniversalHash {
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

  std::uint64_t a = 1;
  std::uint64_t b = 0;
  std::uint64_t m = 1;

  std::uint64_t operator()(std::uint64_t x) const {
    return (mod_prime(static_cast<unsigned __int128>(a) * x + b)) % m;
  }

  static std::uint64_t mod_prime(unsigned __int128 v) {
    // Two folds bring a < 2^123 product below 2p, one subtraction finishes.
    std::uint64_t r = static_cast<std::uint64_t>(v & kPrime) +
                      static_cast<std::uint64_t>(v >> 61);
    r = (r & kPrime) + (r >> 61);
    return r >= kPrime ? r - kPrime : r;
  }

  friend bool operator==(const UniversalHash&, const UniversalHash&) = default;
};

// Draws a and b from a generator seeded by `seed`. Throws ConfigError on
// m == 0.
UniversalHash new_hash(std::uint64_t seed, std::uint64_t m);

// Bucket of key x; x must be below UniversalHash::kPrime.
inline std::uint64_t hash(const UniversalHash& f, std::uint64_t x) {
  return f(x);
}

// Role tags for hash-function seed derivation. All node-bucket schemes share
// one family so that methods compared in the same run see the same mapping.
inline constexpr std::string_view kNodeBucketHashTag = "node-bucket";
inline constexpr std::string_view kDenseEncodingHashTag = "dense-encoding";

// h independent functions with range m, seeded from (seed, tag, index).
std::vector<UniversalHash> make_hash_family(std::uint64_t seed,
                                            std::string_view tag,
                                            std::size_t count,
                                            std::uint64_t m);

}  // namespace poshash

#endif  // POSHASH_HASHING_H_
