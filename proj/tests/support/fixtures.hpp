#pragma once

// Hand-built hierarchies with hand-derived measure values.

#include <utility>
#include <vector>

#include "carto/partition.hpp"

namespace fixtures {

carto::BlockHierarchy toy(int docs, int terms, const std::vector<std::pair<int, int>>& edges,
                          std::vector<carto::LevelAssignment> levels);

carto::LevelAssignment lv(std::vector<int> left, std::vector<int> right);

/// Edges from `doc` to terms [from, to).
void link(std::vector<std::pair<int, int>>& edges, int doc, int from, int to);

/// Two documents, topics T1 = {t0, t1} and T2 = {t2..t5}; d0 splits its
/// edges evenly, the corpus uses T1 for a quarter of its edges. Specificity
/// of d0's domain for T1 is 0.5 ln 2.
carto::BlockHierarchy specificityToy();

/// Level-2 domain {c0, c1} with T1 shares 0.4 and 0.2 under a root at 0.3.
carto::BlockHierarchy commonalityToy();

/// Level-2 domain whose second child never uses T1.
carto::BlockHierarchy missingTopicToy();

}  // namespace fixtures
