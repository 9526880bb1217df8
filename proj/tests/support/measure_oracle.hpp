#pragma once

// Test-only block measures computed from node sets of a raw hierarchy.

#include <map>
#include <optional>
#include <set>

#include "oracle.hpp"

namespace oracle {

/// Nodes of `side` inside raw block `block` at `level` (level 0: the node).
std::set<int> members(const Hierarchy& h, int side, int level, int block);

/// Fractions of the block's edge endpoints per raw opposite block of
/// `targetLevel`; empty when the block has no edges.
std::map<int, double> usage(const Graph& g, const Hierarchy& h, int side, int level, int block, int targetLevel);

struct Measures {
  std::optional<double> specificity;
  std::optional<double> commonalityRaw;
  std::optional<double> commonality;
};

/// Values for the raw opposite target `target` at `targetLevel`. Levels
/// whose node-set partition repeats the level below are skipped; a root
/// serves as its own ladder for commonality.
Measures measures(const Graph& g, const Hierarchy& h, int side, int level, int block, int targetLevel, int target);

}  // namespace oracle
