#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "jtight/vertex_set.hpp"

namespace jtight {

/// SipHash-2-4 keyed by a 128-bit key derived from (seed, label). Used both
/// as the edge coin of H^k(n,p) and for the random orders over j- and k-sets.
class KeyedHash {
 public:
  KeyedHash(std::uint64_t seed, std::string_view label);

  std::uint64_t operator()(const VertexSet& s) const;

  /// Hash mapped to [0, 1) with 53 bits of resolution.
  double unit(const VertexSet& s) const;

  friend bool operator==(const KeyedHash&, const KeyedHash&) = default;

 private:
  std::array<unsigned char, 16> key_{};
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent-looking child seed from (parent, stream).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

}  // namespace jtight
