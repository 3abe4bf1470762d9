#include "hdg/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace hdg {

Graph::Graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) : adjacency_(n) {
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("graph edge endpoint out of range");
    if (u == v) throw std::invalid_argument("graph self-loop at node " + std::to_string(u + 1));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
}

Graph Graph::ring(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  if (n == 2) e.emplace_back(0, 1);
  if (n >= 3) {
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  }
  return Graph(n, e);
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Graph(n, e);
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    for (std::size_t j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t Graph::neighbors_playing(std::size_t i, const ActionProfile& a, int x) const {
  std::size_t k = 0;
  for (std::size_t j : adjacency_.at(i)) k += a[j] == x ? 1 : 0;
  return k;
}

}  // namespace hdg
