#pragma once

#include <cstdint>
#include <vector>

#include "carto/partition.hpp"

namespace carto {

/// Edge counts from the nodes of `block` to the opposite-side blocks of
/// `targetLevel` (level 0: individual nodes).
std::vector<std::int64_t> blockEdgeCounts(const BlockHierarchy& h, BlockId block, int targetLevel);

/// p_b(t) = e_{b,t} / e_b. Throws std::invalid_argument for a block without
/// edges.
std::vector<double> usage(const BlockHierarchy& h, BlockId block, int targetLevel = 1);

/// Lowest block with the same members as `block`, so that duplicated levels
/// collapse onto their first occurrence.
BlockId collapsedBlock(const NestedPartition& p, BlockId block);
/// Superblocks of `block` on the collapsed view, nearest first, ending at
/// the side's root.
std::vector<BlockId> ladder(const NestedPartition& p, BlockId block);
/// Subblocks of `block` on the collapsed view; empty at level 1.
std::vector<BlockId> subblocks(const NestedPartition& p, BlockId block);

/// (1/|ladder|) Σ_{+} p ln(p / p₊), with 0 ln 0 = 0.
double specificityValue(double p, const std::vector<double>& ladderP);
/// (1/|children|) Σ_{-} (1/|ladder|) Σ_{+} ln(p₋ / p₊); -inf when a child
/// has p₋ = 0.
double commonalityRawValue(const std::vector<double>& childP, const std::vector<double>& ladderP);
/// Mean child p times the raw value, with 0 · (-inf) = 0.
double commonalityValue(const std::vector<double>& childP, const std::vector<double>& ladderP);

/// Measures of one block over every opposite-side target of `targetLevel`
/// (1: level-1 blocks, 0: terms or metadata values). A root has no
/// specificity; its commonality uses the root itself as the ladder.
struct BlockMeasures {
  BlockId block;
  int targetLevel = 1;
  std::vector<double> usage;
  std::vector<double> specificity;     // empty for a root
  std::vector<double> commonalityRaw;  // empty for level-1 blocks
  std::vector<double> commonality;
};

BlockMeasures measureBlock(const BlockHierarchy& h, BlockId block, int targetLevel = 1);

std::vector<double> nestedSpecificity(const BlockHierarchy& h, BlockId block, int targetLevel = 1);
std::vector<double> nestedCommonalityRaw(const BlockHierarchy& h, BlockId block, int targetLevel = 1);
std::vector<double> nestedCommonality(const BlockHierarchy& h, BlockId block, int targetLevel = 1);

/// Level-0 measures of `block` plus the level-1 block of every target node.
struct TermMeasures {
  BlockMeasures values;
  std::vector<int> group;
};

TermMeasures termLevelMeasures(const BlockHierarchy& h, BlockId block);

/// LEFT nodes linked to at least one node of the RIGHT block `period`.
std::vector<char> periodDocuments(const BlockHierarchy& h, BlockId period);

/// |domain ∩ period| / |period| over the documents of a chained hierarchy.
double prevalence(const BlockHierarchy& h, BlockId domain, BlockId period);

struct ShiftRow {
  BlockId domain;
  double prevalenceA = 0.0;
  double prevalenceB = 0.0;
  double shift = 0.0;       // prevalenceB - prevalenceA
  double colorScore = 0.0;  // shift / max |shift| over the domains of the level
};

/// Shift of every domain at every level from period A to period B.
std::vector<ShiftRow> prevalenceShift(const BlockHierarchy& h, BlockId periodA, BlockId periodB);

}  // namespace carto
