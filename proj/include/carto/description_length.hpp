#pragma once

#include "carto/graph.hpp"
#include "carto/partition.hpp"

namespace carto {

/// Components of the microcanonical nested degree-corrected description
/// length, all in nats.
struct DescriptionLengthTerms {
  double edgePlacement = 0.0;  // ln P(A | k, e, b) for the simple bipartite graph
  double degrees = 0.0;        // uniform degree-sequence prior per level-1 block
  double blockEdges = 0.0;     // multigraph counts of every block graph
  double partitions = 0.0;     // partition priors of every level

  double total() const { return edgePlacement + degrees + blockEdges + partitions; }
};

DescriptionLengthTerms descriptionLengthTerms(const BipartiteGraph& graph, const NestedPartition& partition);

inline double descriptionLength(const BipartiteGraph& graph, const NestedPartition& partition) {
  return descriptionLengthTerms(graph, partition).total();
}

/// Prior of a partition of `items` things into `blocks` non-empty blocks,
/// without the -sum ln n_r! part.
double partitionPriorBase(std::int64_t items, std::int64_t blocks);

}  // namespace carto
