#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "carto/graph.hpp"
#include "carto/partition.hpp"

namespace carto {

/// Mutable nested block state with cached block statistics and incremental
/// description-length deltas.
///
/// Blocks live in fixed slots per level and side; a slot is active while it
/// has at least one item. An item at level l is a graph node (l == 1) or an
/// active slot of level l-1. Moves at level l never touch level l-1 and
/// propagate edge counts upward until the ancestors of source and target
/// coincide. A block created by a move takes the source block's parent;
/// a block emptied by a move disappears, and so do ancestors left without
/// children. The top level is fixed.
///
/// Isolated level-1 nodes of a non-frozen side share one dedicated block
/// that is never a move target; they never move. Frozen sides never move.
class BlockState {
 public:
  static constexpr int kFresh = -1;

  BlockState(std::shared_ptr<const BipartiteGraph> graph, const NestedPartition& partition,
             std::array<bool, 2> frozen = {false, false});

  const BipartiteGraph& graph() const { return *graph_; }
  const std::shared_ptr<const BipartiteGraph>& graphPtr() const { return graph_; }
  int numLevels() const { return static_cast<int>(levels_.size()); }
  bool frozen(Side s) const { return frozen_[sideIndex(s)]; }

  /// Active blocks at `level` (level 0: nodes).
  int numBlocks(int level, Side s) const;
  int numBlocks(int level) const { return numBlocks(level, Side::Left) + numBlocks(level, Side::Right); }
  std::span<const int> activeBlocks(int level, Side s) const { return side(level, s).active; }
  std::span<const int> members(int level, Side s, int block) const { return side(level, s).members[block]; }
  int blockOf(int level, Side s, int item) const { return side(level, s).assign[item]; }
  int blockSize(int level, Side s, int block) const { return side(level, s).count[block]; }
  std::int64_t blockDegree(int level, Side s, int block) const { return side(level, s).degree[block]; }
  /// Edge count between block `a` on side `s` and block `o` on the other side.
  int edgeCount(int level, Side s, int a, int o) const;
  int isolatedBlock(Side s) const { return isolated_[sideIndex(s)]; }
  bool isIsolatedNode(Side s, int node) const { return graph_->degree(s, node) == 0; }
  bool hasFreeSlot(int level, Side s) const { return !side(level, s).freeSlots.empty(); }

  /// Items at `level` that may move (both sides unless frozen).
  std::vector<int> movableItems(int level, Side s) const;
  /// Edge counts from `item` to opposite-side blocks of `level`.
  std::vector<std::pair<int, int>> itemEdges(int level, Side s, int item) const;
  /// Nonzero edge counts from `block` to opposite-side blocks of `level`.
  std::vector<std::pair<int, int>> blockRow(int level, Side s, int block) const;

  double sigma() const { return sigma_; }
  /// Recompute the description length from the assignments alone.
  double scratchSigma() const;
  /// Replace the running total with a from-scratch recomputation.
  void resyncSigma() { sigma_ = scratchSigma(); }

  /// Description-length change of moving `item` at `level` to `target`
  /// (an active block, or kFresh). Does not change the state.
  double moveDelta(int level, Side s, int item, int target) const;
  void move(int level, Side s, int item, int target);

  /// Description-length change of moving every item of block `from` into `to`.
  double mergeDelta(int level, Side s, int from, int to) const;
  void merge(int level, Side s, int from, int to);

  /// Compact partition (ids ordered by slot).
  NestedPartition partition() const;

 private:
  struct SideData {
    std::vector<int> assign;
    std::vector<int> count;
    std::vector<std::int64_t> degree;
    std::vector<int> active;
    std::vector<int> activePos;
    std::vector<int> freeSlots;
    std::vector<std::vector<int>> members;
    std::vector<int> memberPos;
  };
  struct Level {
    std::array<SideData, 2> sides;
    Eigen::MatrixXi cross;
  };
  struct Change;

  SideData& side(int level, Side s) { return levels_[level - 1].sides[sideIndex(s)]; }
  const SideData& side(int level, Side s) const { return levels_[level - 1].sides[sideIndex(s)]; }
  int& entry(int level, Side s, int a, int o);

  void checkMove(int level, Side s, int item, int target) const;
  int resolveTarget(int level, Side s, int target) const;
  double transferDelta(int level, Side s, int from, int to, int itemCount,
                       const std::vector<std::pair<int, int>>& w) const;
  void transferApply(int level, Side s, int from, int to, const std::vector<std::pair<int, int>>& w);
  double rowTerm(int level, Side s, int block, int countAfter, std::int64_t degreeAfter,
                 const std::vector<std::pair<int, int>>* w, int sign, bool fullRow) const;
  std::vector<std::pair<int, int>> liftEdges(int level, Side s, const std::vector<std::pair<int, int>>& w) const;
  void attach(int level, Side s, int item, int block);
  void detach(int level, Side s, int item);

  std::shared_ptr<const BipartiteGraph> graph_;
  std::array<bool, 2> frozen_;
  std::array<int, 2> isolated_{-1, -1};
  std::vector<Level> levels_;
  double sigma_ = 0.0;
  mutable std::vector<int> scratch_;
};

}  // namespace carto
