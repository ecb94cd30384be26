#pragma once

#include <cstddef>
#include <vector>

#include "jtight/vertex_set.hpp"

namespace jtight {

/// A j-tight path given by its vertex sequence. Edge i (0-based) is the
/// window of k consecutive vertices starting at position i*(k-j).
class JTightPath {
 public:
  JTightPath(int k, int j, std::vector<Vertex> vertices);

  int k() const { return k_; }
  int j() const { return j_; }
  std::size_t length() const { return length_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  /// The window edges e_1..e_l in path order.
  std::vector<KSet> edges() const;
  KSet edge(std::size_t i) const;

  /// Last j vertices (the j-set a continuation would attach to).
  JSet last_jset() const;

 private:
  int k_;
  int j_;
  std::size_t length_;
  std::vector<Vertex> vertices_;
};

/// Number of vertices of a j-tight path of length `length`: (k-j)*length + j.
std::size_t path_vertex_count(int k, int j, std::size_t length);

}  // namespace jtight
