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

#include "poshash/hashing.h"

#include "poshash/errors.h"
#include "poshash/random.h"

namespace poshash {

UniversalHash new_hash(std::uint64_t seed, std::uint64_t m) {
  if (m == 0) throw ConfigError("hash range must be at least 1");
  Rng rng(seed);
  UniversalHash f;
  f.a = 1 + uniform_below(rng, UniversalHash::kPrime - 1);
  f.b = uniform_below(rng, UniversalHash::kPrime);
  f.m = m;
  return f;
}

std::vector<UniversalHash> make_hash_family(std::uint64_t seed,
                                            std::string_view tag,
                                            std::size_t count,
                                            std::uint64_t m) {
  std::vector<UniversalHash> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(new_hash(derive_seed(seed, tag, j), m));
  }
  return out;
}

}  // namespace poshash
