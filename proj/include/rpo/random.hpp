// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace rpo {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over the bytes of `label`.
constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic random stream.
///
/// A stream is identified by a 64-bit key. The key of a derived stream is
///
///     child = mix64(mix64(parent ^ hash_label(label)) + 0x9e3779b97f4a7c15 * (index + 1))
///
/// so it depends only on the parent's key, never on how many numbers the
/// parent has already produced. For a fixed (parent, label) distinct indices
/// map to distinct keys because the outer mix64 is a bijection. Numbers are
/// drawn from xoshiro256** whose state is filled by SplitMix64 seeded with
/// the key.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key);

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  RandomStream derive(std::string_view label, std::uint64_t index) const;

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
};

inline RandomStream derive_stream(const RandomStream& parent, std::string_view label,
                                  std::uint64_t index) {
  return parent.derive(label, index);
}

}  // namespace rpo
