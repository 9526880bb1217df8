#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace carto {

enum class Side : std::uint8_t { Left = 0, Right = 1 };

inline constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
inline constexpr int sideIndex(Side s) { return static_cast<int>(s); }

/// Simple unweighted bipartite graph. LEFT nodes are documents, RIGHT nodes
/// are terms or metadata values. Edges are stored once as (left, right) and
/// deduplicated on construction, so document vectors are binary.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::vector<std::string> leftNames, std::vector<std::string> rightNames,
                 std::vector<std::pair<int, int>> edges);

  int numNodes(Side s) const { return static_cast<int>(names_[sideIndex(s)].size()); }
  int numNodes() const { return numNodes(Side::Left) + numNodes(Side::Right); }
  std::int64_t numEdges() const { return static_cast<std::int64_t>(edges_.size()); }

  std::span<const int> neighbors(Side s, int node) const { return adjacency_[sideIndex(s)][node]; }
  int degree(Side s, int node) const { return static_cast<int>(adjacency_[sideIndex(s)][node].size()); }
  const std::string& name(Side s, int node) const { return names_[sideIndex(s)][node]; }
  const std::vector<std::string>& names(Side s) const { return names_[sideIndex(s)]; }

  /// Sorted (left, right) pairs.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  std::vector<std::string> names_[2];
  std::vector<std::vector<int>> adjacency_[2];
  std::vector<std::pair<int, int>> edges_;
};

}  // namespace carto
