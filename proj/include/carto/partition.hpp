#pragma once

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "carto/graph.hpp"

namespace carto {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class BlockKind : char { Domain = 'D', Topic = 'T', Period = 'P', Meta = 'M' };

BlockKind parseBlockKind(char c);

/// Internal block address: side, level (>= 1) and 0-based canonical index.
/// Level 0 addresses graph nodes.
struct BlockId {
  Side side = Side::Left;
  int level = 1;
  int index = 0;

  auto operator<=>(const BlockId&) const = default;
};

/// Rendered block name "L{level}{kind}{index}" with a 1-based index.
struct BlockRef {
  BlockKind kind = BlockKind::Domain;
  int level = 1;
  int index = 1;

  auto operator<=>(const BlockRef&) const = default;
};

std::string blockCode(const BlockRef& ref);
BlockRef parseBlockCode(std::string_view code);

/// One level of a nested partition: for each side, the map from items of the
/// level below (graph nodes at level 1) to compact block ids.
using LevelAssignment = std::array<std::vector<int>, 2>;

/// Hierarchy of side-pure partitions. Block ids are compact per level and
/// side; the top level holds at most one block per side.
class NestedPartition {
 public:
  NestedPartition() = default;
  NestedPartition(int nodesLeft, int nodesRight, std::vector<LevelAssignment> levels);

  int numLevels() const { return static_cast<int>(levels_.size()); }
  int numNodes(Side s) const { return nodes_[sideIndex(s)]; }

  /// Blocks at `level`; level 0 counts graph nodes.
  int numBlocks(int level, Side s) const;
  int numBlocks(int level) const { return numBlocks(level, Side::Left) + numBlocks(level, Side::Right); }

  /// Assignment of level-(level-1) items to level-`level` blocks.
  const std::vector<int>& assignment(int level, Side s) const;
  int parentOf(BlockId item) const;

  /// Block at `toLevel` containing block/node `from` (from.level <= toLevel).
  int ancestorIndex(BlockId from, int toLevel) const;

  /// Node -> block map at `level` (identity at level 0).
  std::vector<int> nodeMembership(int level, Side s) const;
  /// Node counts per block at `level`.
  std::vector<int> blockSizes(int level, Side s) const;

  bool contains(BlockId id) const;
  /// True when the side's partition at `level` (>= 2) maps blocks one-to-one.
  bool isIdentityLevel(int level, Side s) const;

  const std::vector<LevelAssignment>& levels() const { return levels_; }

  bool operator==(const NestedPartition&) const = default;

 private:
  std::array<int, 2> nodes_{0, 0};
  std::vector<LevelAssignment> levels_;
  std::vector<std::array<int, 2>> counts_;
};

/// Relabel blocks so that, per level and side, ids follow (node count
/// descending, smallest member node ascending). Sides switched off in
/// `sides` keep their labels.
NestedPartition canonicalize(const NestedPartition& partition, std::array<bool, 2> sides = {true, true});

/// Copy of `partition` with an identity level inserted as level `level`
/// (2 <= level <= L); the old level `level` moves up by one.
NestedPartition insertIdentityLevel(const NestedPartition& partition, int level);
/// Copy of `partition` without level `level` (>= 2); the level above maps
/// the items of the removed level through it.
NestedPartition removeLevel(const NestedPartition& partition, int level);

std::vector<BlockId> ancestors(const NestedPartition& partition, BlockId block);
std::vector<BlockId> children(const NestedPartition& partition, BlockId block);

/// Edge counts between LEFT blocks at `levelLeft` and RIGHT blocks at
/// `levelRight`; level 0 addresses raw nodes.
CountMatrix crossMatrix(const BipartiteGraph& graph, const NestedPartition& partition, int levelLeft,
                        int levelRight);

/// Levels kept for side `s` once consecutive identical partitions are
/// dropped. Level 1 is always kept.
std::vector<int> collapsedLevels(const NestedPartition& partition, Side s);

/// A fitted hierarchy bound to its graph and naming scheme.
struct BlockHierarchy {
  std::shared_ptr<const BipartiteGraph> graph;
  NestedPartition partition;
  BlockKind leftKind = BlockKind::Domain;
  BlockKind rightKind = BlockKind::Topic;
  /// Per-level offset for LEFT indices (index 0 = level 1). Empty means
  /// "number of RIGHT blocks at that level", so domain indices start after
  /// the highest topic index.
  std::vector<int> leftCodeOffset;

  int codeOffset(int level) const;
  BlockRef ref(BlockId id) const;
  std::string code(BlockId id) const { return blockCode(ref(id)); }
  /// Throws std::invalid_argument for codes naming no block of this hierarchy.
  BlockId resolve(const BlockRef& ref) const;
  BlockId resolve(std::string_view code) const { return resolve(parseBlockCode(code)); }
  BlockKind kindOf(Side s) const { return s == Side::Left ? leftKind : rightKind; }
};

}  // namespace carto
