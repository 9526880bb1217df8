#include "carto/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace carto {

BipartiteGraph::BipartiteGraph(std::vector<std::string> leftNames, std::vector<std::string> rightNames,
                               std::vector<std::pair<int, int>> edges)
    : names_{std::move(leftNames), std::move(rightNames)}, edges_(std::move(edges)) {
  const int nl = numNodes(Side::Left);
  const int nr = numNodes(Side::Right);
  for (const auto& [l, r] : edges_) {
    if (l < 0 || l >= nl || r < 0 || r >= nr) {
      throw std::out_of_range("edge (" + std::to_string(l) + ", " + std::to_string(r) + ") outside the graph");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  adjacency_[0].assign(nl, {});
  adjacency_[1].assign(nr, {});
  for (const auto& [l, r] : edges_) {
    adjacency_[0][l].push_back(r);
    adjacency_[1][r].push_back(l);
  }
}

}  // namespace carto
