/*
 * Copyright 2026 The Povex Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POVEX_HASH_H_
#define POVEX_HASH_H_

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include "absl/strings/string_view.h"

namespace povex {

// FNV-1a 64. Used for dataset digests and config fingerprints; results must be
// stable across runs and platforms, which std::hash does not promise.
class Fnv1a64 {
 public:
  Fnv1a64& Bytes(const void* data, size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a64& U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      const unsigned char byte = static_cast<unsigned char>(v >> (8 * i));
      Bytes(&byte, 1);
    }
    return *this;
  }
  // Canonical bits: all NaNs and both zeros hash the same.
  Fnv1a64& F64(double v) {
    if (v != v) return U64(0x7ff8000000000000ULL);
    if (v == 0.0) return U64(0);
    return U64(std::bit_cast<uint64_t>(v));
  }
  Fnv1a64& Str(absl::string_view s) {
    U64(s.size());
    return Bytes(s.data(), s.size());
  }
  uint64_t digest() const { return state_; }

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string HexDigest(uint64_t value);

// splitmix64 finalizer: a bijective avalanche mix.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a sub-seed from a master seed and a tuple of coordinates. The value
// depends only on its inputs, never on scheduling.
constexpr uint64_t DeriveSeed(uint64_t master,
                              std::initializer_list<uint64_t> coordinates) {
  uint64_t h = Mix64(master);
  for (const uint64_t c : coordinates) h = Mix64(h ^ c);
  return h;
}

}  // namespace povex

#endif  // POVEX_HASH_H_
