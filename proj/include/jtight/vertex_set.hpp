#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace jtight {

using Vertex = std::uint32_t;

/// Largest supported uniformity k.
inline constexpr std::size_t kMaxUniformity = 16;

/// A set of at most kMaxUniformity vertices stored in canonical (strictly
/// increasing) order. Used for j-sets, k-sets and (k-j)-sets alike.
class VertexSet {
 public:
  VertexSet() = default;

  VertexSet(std::initializer_list<Vertex> vertices) {
    if (vertices.size() > kMaxUniformity) throw std::length_error("VertexSet: too many vertices");
    for (Vertex v : vertices) v_[size_++] = v;
    canonicalize();
  }

  /// Builds from arbitrary order; duplicates are rejected.
  static VertexSet from_unsorted(std::span<const Vertex> vertices) {
    if (vertices.size() > kMaxUniformity) throw std::length_error("VertexSet: too many vertices");
    VertexSet s;
    for (Vertex v : vertices) s.v_[s.size_++] = v;
    s.canonicalize();
    return s;
  }

  /// Builds from vertices already in strictly increasing order.
  static VertexSet from_sorted(std::span<const Vertex> vertices) {
    assert(vertices.size() <= kMaxUniformity);
    VertexSet s;
    for (Vertex v : vertices) s.v_[s.size_++] = v;
    assert(s.is_canonical());
    return s;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const Vertex* begin() const { return v_.data(); }
  const Vertex* end() const { return v_.data() + size_; }
  const Vertex* data() const { return v_.data(); }
  Vertex operator[](std::size_t i) const { return v_[i]; }
  std::span<const Vertex> span() const { return {v_.data(), size_}; }

  bool contains(Vertex x) const { return std::binary_search(begin(), end(), x); }

  bool contains_all(const VertexSet& other) const {
    return std::includes(begin(), end(), other.begin(), other.end());
  }

  bool disjoint(const VertexSet& other) const {
    std::size_t a = 0, b = 0;
    while (a < size_ && b < other.size_) {
      if (v_[a] == other.v_[b]) return false;
      if (v_[a] < other.v_[b]) ++a; else ++b;
    }
    return true;
  }

  VertexSet united(const VertexSet& other) const {
    VertexSet out;
    auto last = std::set_union(begin(), end(), other.begin(), other.end(), out.v_.begin());
    if (static_cast<std::size_t>(last - out.v_.begin()) > kMaxUniformity) {
      throw std::length_error("VertexSet: union too large");
    }
    out.size_ = static_cast<std::uint8_t>(last - out.v_.begin());
    return out;
  }

  VertexSet minus(const VertexSet& other) const {
    VertexSet out;
    auto last = std::set_difference(begin(), end(), other.begin(), other.end(), out.v_.begin());
    out.size_ = static_cast<std::uint8_t>(last - out.v_.begin());
    return out;
  }

  VertexSet intersected(const VertexSet& other) const {
    VertexSet out;
    auto last = std::set_intersection(begin(), end(), other.begin(), other.end(), out.v_.begin());
    out.size_ = static_cast<std::uint8_t>(last - out.v_.begin());
    return out;
  }

  bool is_canonical() const {
    for (std::size_t i = 1; i < size_; ++i) {
      if (v_[i - 1] >= v_[i]) return false;
    }
    return true;
  }

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }

  /// Lexicographic order on the sorted vertex sequences.
  friend bool operator<(const VertexSet& a, const VertexSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  template <typename H>
  friend H AbslHashValue(H h, const VertexSet& s) {
    return H::combine(H::combine_contiguous(std::move(h), s.data(), s.size()), s.size());
  }

  std::vector<Vertex> to_vector() const { return {begin(), end()}; }

 private:
  void canonicalize() {
    std::sort(v_.begin(), v_.begin() + size_);
    if (std::adjacent_find(v_.begin(), v_.begin() + size_) != v_.begin() + size_) {
      throw std::invalid_argument("VertexSet: duplicate vertex");
    }
  }

  std::array<Vertex, kMaxUniformity> v_{};
  std::uint8_t size_ = 0;
};

using KSet = VertexSet;
using JSet = VertexSet;

std::ostream& operator<<(std::ostream& os, const VertexSet& s);

/// Calls fn(std::span<const std::size_t>) for every m-subset of {0..size-1},
/// as increasing index tuples in lexicographic order. Stops early when fn
/// returns false.
template <typename Fn>
void for_each_index_combination(std::size_t size, std::size_t m, Fn&& fn) {
  if (m > size) return;
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    if (!fn(std::span<const std::size_t>(idx))) return;
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == size - m + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t q = i; q < m; ++q) idx[q] = idx[q - 1] + 1;
  }
}

/// Calls fn(const VertexSet&) for every m-subset of `pool` (pool sorted
/// ascending gives canonical subsets directly). Stops early when fn returns false.
template <typename Fn>
void for_each_subset(std::span<const Vertex> pool, std::size_t m, Fn&& fn) {
  std::array<Vertex, kMaxUniformity> buf{};
  for_each_index_combination(pool.size(), m, [&](std::span<const std::size_t> idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) buf[i] = pool[idx[i]];
    return fn(VertexSet::from_unsorted(std::span<const Vertex>(buf.data(), idx.size())));
  });
}

}  // namespace jtight
