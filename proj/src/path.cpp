#include "jtight/path.hpp"

#include <algorithm>
#include <stdexcept>

namespace jtight {

std::size_t path_vertex_count(int k, int j, std::size_t length) {
  if (j < 1 || j >= k) throw std::invalid_argument("need 1 <= j <= k-1");
  return static_cast<std::size_t>(k - j) * length + static_cast<std::size_t>(j);
}

JTightPath::JTightPath(int k, int j, std::vector<Vertex> vertices)
    : k_(k), j_(j), length_(0), vertices_(std::move(vertices)) {
  if (j < 1 || j >= k || k > static_cast<int>(kMaxUniformity)) {
    throw std::invalid_argument("JTightPath: need 1 <= j <= k-1 <= 15");
  }
  const std::size_t step = static_cast<std::size_t>(k - j);
  if (vertices_.size() < static_cast<std::size_t>(j) || (vertices_.size() - j) % step != 0) {
    throw std::invalid_argument("JTightPath: vertex count is not (k-j)*l + j");
  }
  length_ = (vertices_.size() - j) / step;
  std::vector<Vertex> sorted = vertices_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("JTightPath: vertices must be distinct");
  }
}

KSet JTightPath::edge(std::size_t i) const {
  if (i >= length_) throw std::out_of_range("JTightPath::edge");
  const std::size_t start = i * static_cast<std::size_t>(k_ - j_);
  return KSet::from_unsorted(std::span<const Vertex>(vertices_.data() + start, static_cast<std::size_t>(k_)));
}

std::vector<KSet> JTightPath::edges() const {
  std::vector<KSet> out;
  out.reserve(length_);
  for (std::size_t i = 0; i < length_; ++i) out.push_back(edge(i));
  return out;
}

JSet JTightPath::last_jset() const {
  return JSet::from_unsorted(
      std::span<const Vertex>(vertices_.data() + vertices_.size() - j_, static_cast<std::size_t>(j_)));
}

}  // namespace jtight
