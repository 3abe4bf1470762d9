#ifndef HDG_GRAPH_HPP
#define HDG_GRAPH_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hdg/profile.hpp"

namespace hdg {

/// Undirected simple graph on nodes 0..n-1.
class Graph {
 public:
  Graph() = default;
  /// Throws std::invalid_argument on self-loops or out-of-range endpoints.
  /// Duplicate edges are merged.
  Graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  static Graph ring(std::size_t n);
  static Graph complete(std::size_t n);

  std::size_t size() const noexcept { return adjacency_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }
  /// Each edge once, with first < second, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  /// |N_i(x)|: neighbors of i playing x in a.
  std::size_t neighbors_playing(std::size_t i, const ActionProfile& a, int x) const;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace hdg

#endif  // HDG_GRAPH_HPP
