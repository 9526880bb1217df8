#include "carto/block_state.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "carto/description_length.hpp"
#include "carto/numeric.hpp"

namespace carto {

BlockState::BlockState(std::shared_ptr<const BipartiteGraph> graph, const NestedPartition& partition,
                       std::array<bool, 2> frozen)
    : graph_(std::move(graph)), frozen_(frozen) {
  if (!graph_) throw std::invalid_argument("block state needs a graph");
  const int nl = graph_->numNodes(Side::Left);
  const int nr = graph_->numNodes(Side::Right);
  if (partition.numNodes(Side::Left) != nl || partition.numNodes(Side::Right) != nr) {
    throw std::invalid_argument("partition does not match the graph");
  }
  const int L = partition.numLevels();
  levels_.resize(L);
  for (int l = 1; l <= L; ++l) {
    for (int s = 0; s < 2; ++s) {
      const int cap = s == 0 ? nl : nr;
      SideData& sd = levels_[l - 1].sides[s];
      sd.assign.assign(cap, -1);
      sd.count.assign(cap, 0);
      sd.degree.assign(cap, 0);
      sd.activePos.assign(cap, -1);
      sd.members.assign(cap, {});
      sd.memberPos.assign(cap, -1);
      const auto& a = partition.assignment(l, static_cast<Side>(s));
      for (int i = 0; i < static_cast<int>(a.size()); ++i) attach(l, static_cast<Side>(s), i, a[i]);
      for (int b = 0; b < cap; ++b) {
        if (sd.count[b] > 0) {
          sd.activePos[b] = static_cast<int>(sd.active.size());
          sd.active.push_back(b);
        }
      }
      for (int b = cap - 1; b >= 0; --b) {
        if (sd.count[b] == 0) sd.freeSlots.push_back(b);
      }
    }
    levels_[l - 1].cross = Eigen::MatrixXi::Zero(nl, nr);
    const auto ml = partition.nodeMembership(l, Side::Left);
    const auto mr = partition.nodeMembership(l, Side::Right);
    auto& level = levels_[l - 1];
    for (const auto& [u, v] : graph_->edges()) {
      level.cross(ml[u], mr[v]) += 1;
      level.sides[0].degree[ml[u]] += 1;
      level.sides[1].degree[mr[v]] += 1;
    }
  }

  for (int s = 0; s < 2; ++s) {
    const Side sd = static_cast<Side>(s);
    if (frozen_[s]) continue;
    int block = -1;
    for (int v = 0; v < graph_->numNodes(sd); ++v) {
      if (graph_->degree(sd, v) != 0) continue;
      const int b = side(1, sd).assign[v];
      if (block >= 0 && b != block) throw std::invalid_argument("isolated nodes must share one block");
      block = b;
    }
    if (block >= 0) {
      for (int v : side(1, sd).members[block]) {
        if (graph_->degree(sd, v) != 0) throw std::invalid_argument("isolated block holds connected nodes");
      }
    }
    isolated_[s] = block;
  }
  scratch_.assign(std::max(nl, nr), 0);
  sigma_ = scratchSigma();
}

int BlockState::numBlocks(int level, Side s) const {
  if (level == 0) return graph_->numNodes(s);
  return static_cast<int>(side(level, s).active.size());
}

int& BlockState::entry(int level, Side s, int a, int o) {
  auto& m = levels_[level - 1].cross;
  return s == Side::Left ? m(a, o) : m(o, a);
}

int BlockState::edgeCount(int level, Side s, int a, int o) const {
  const auto& m = levels_[level - 1].cross;
  return s == Side::Left ? m(a, o) : m(o, a);
}

void BlockState::attach(int level, Side s, int item, int block) {
  SideData& sd = side(level, s);
  sd.assign[item] = block;
  sd.memberPos[item] = static_cast<int>(sd.members[block].size());
  sd.members[block].push_back(item);
  ++sd.count[block];
}

void BlockState::detach(int level, Side s, int item) {
  SideData& sd = side(level, s);
  const int block = sd.assign[item];
  auto& list = sd.members[block];
  const int pos = sd.memberPos[item];
  const int last = list.back();
  list[pos] = last;
  sd.memberPos[last] = pos;
  list.pop_back();
  sd.memberPos[item] = -1;
  sd.assign[item] = -1;
  --sd.count[block];
}

std::vector<int> BlockState::movableItems(int level, Side s) const {
  std::vector<int> items;
  if (frozen(s) || level < 1 || level >= numLevels()) return items;
  if (level == 1) {
    for (int v = 0; v < graph_->numNodes(s); ++v) {
      if (!isIsolatedNode(s, v)) items.push_back(v);
    }
  } else {
    const auto act = activeBlocks(level - 1, s);
    items.assign(act.begin(), act.end());
    std::sort(items.begin(), items.end());
  }
  return items;
}

std::vector<std::pair<int, int>> BlockState::itemEdges(int level, Side s, int item) const {
  const Side o = opposite(s);
  const auto& oppAssign = side(level, o).assign;
  std::vector<int> touched;
  auto add = [&](int block, int c) {
    if (scratch_[block] == 0) touched.push_back(block);
    scratch_[block] += c;
  };
  if (level == 1) {
    for (int u : graph_->neighbors(s, item)) add(oppAssign[u], 1);
  } else {
    for (int ob : activeBlocks(level - 1, o)) {
      const int c = edgeCount(level - 1, s, item, ob);
      if (c != 0) add(oppAssign[ob], c);
    }
  }
  std::vector<std::pair<int, int>> w;
  w.reserve(touched.size());
  for (int b : touched) {
    w.emplace_back(b, scratch_[b]);
    scratch_[b] = 0;
  }
  return w;
}

std::vector<std::pair<int, int>> BlockState::blockRow(int level, Side s, int block) const {
  const Side o = opposite(s);
  std::vector<std::pair<int, int>> row;
  if (level == 1 && side(1, s).degree[block] < numBlocks(1, o)) {
    const auto& oppAssign = side(1, o).assign;
    std::vector<int> touched;
    for (int v : side(1, s).members[block]) {
      for (int u : graph_->neighbors(s, v)) {
        const int b = oppAssign[u];
        if (scratch_[b] == 0) touched.push_back(b);
        ++scratch_[b];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int b : touched) {
      row.emplace_back(b, scratch_[b]);
      scratch_[b] = 0;
    }
    return row;
  }
  for (int b : activeBlocks(level, o)) {
    const int c = edgeCount(level, s, block, b);
    if (c != 0) row.emplace_back(b, c);
  }
  return row;
}

std::vector<std::pair<int, int>> BlockState::liftEdges(int level, Side s,
                                                       const std::vector<std::pair<int, int>>& w) const {
  const auto& up = side(level + 1, opposite(s)).assign;
  std::vector<int> touched;
  for (const auto& [b, c] : w) {
    const int p = up[b];
    if (scratch_[p] == 0) touched.push_back(p);
    scratch_[p] += c;
  }
  std::vector<std::pair<int, int>> out;
  out.reserve(touched.size());
  for (int p : touched) {
    out.emplace_back(p, scratch_[p]);
    scratch_[p] = 0;
  }
  return out;
}

double BlockState::rowTerm(int level, Side s, int block, int countAfter, std::int64_t degreeAfter,
                           const std::vector<std::pair<int, int>>* w, int sign, bool fullRow) const {
  double value = -lnFactorial(countAfter);
  if (level == 1) {
    value += lnFactorial(degreeAfter) + lnBinom(countAfter + degreeAfter - 1, degreeAfter);
    if (w != nullptr) {
      for (const auto& [o, c] : *w) value -= lnFactorial(edgeCount(level, s, block, o) + sign * c);
    }
    return value;
  }
  const SideData& opp = side(level, opposite(s));
  const std::int64_t n = countAfter;
  if (fullRow) {
    if (w != nullptr && sign != 0) {
      for (const auto& [o, c] : *w) scratch_[o] = sign * c;
    }
    for (int o : opp.active) {
      const std::int64_t m = edgeCount(level, s, block, o) + scratch_[o];
      value += lnBinom(n * opp.count[o] + m - 1, m);
    }
    if (w != nullptr && sign != 0) {
      for (const auto& [o, c] : *w) scratch_[o] = 0;
    }
  } else if (w != nullptr) {
    for (const auto& [o, c] : *w) {
      const std::int64_t m = edgeCount(level, s, block, o) + sign * c;
      value += lnBinom(n * opp.count[o] + m - 1, m);
    }
  }
  return value;
}

double BlockState::transferDelta(int level, Side s, int from, int to, int itemCount,
                                 const std::vector<std::pair<int, int>>& w) const {
  const int L = numLevels();
  std::int64_t d = 0;
  for (const auto& [o, c] : w) d += c;

  std::vector<int> blockChange(L + 1, 0);
  double delta = 0.0;
  int a = from;
  int b = to;
  int dnA = -itemCount;
  int dnB = itemCount;
  auto wl = w;
  for (int l = level;; ++l) {
    const SideData& sd = side(l, s);
    int nextDnA = 0;
    int nextDnB = 0;
    if (a == b) {
      const int dn = dnA + dnB;
      const int n = sd.count[a];
      if (dn != 0) {
        delta += rowTerm(l, s, a, n + dn, sd.degree[a], nullptr, 0, true) -
                 rowTerm(l, s, a, n, sd.degree[a], nullptr, 0, true);
      }
      const int change = static_cast<int>(n + dn > 0) - static_cast<int>(n > 0);
      blockChange[l] += change;
      nextDnA = change;
    } else {
      const int na = sd.count[a];
      const int nb = sd.count[b];
      const bool fullA = l > 1 && dnA != 0;
      const bool fullB = l > 1 && dnB != 0;
      delta += rowTerm(l, s, a, na + dnA, sd.degree[a] - d, &wl, -1, fullA) -
               rowTerm(l, s, a, na, sd.degree[a], &wl, 0, fullA);
      delta += rowTerm(l, s, b, nb + dnB, sd.degree[b] + d, &wl, +1, fullB) -
               rowTerm(l, s, b, nb, sd.degree[b], &wl, 0, fullB);
      const bool aEmptied = na > 0 && na + dnA == 0;
      const bool bActivated = nb == 0 && nb + dnB > 0;
      blockChange[l] += static_cast<int>(bActivated) - static_cast<int>(aEmptied);
      nextDnA = aEmptied ? -1 : 0;
      nextDnB = bActivated ? 1 : 0;
    }
    if (l == L) break;
    const auto& up = side(l + 1, s).assign;
    const int pa = up[a];
    const int pb = (a != b && sd.count[b] == 0) ? pa : up[b];
    const bool edgesMove = a != b && pa != pb;
    if (!edgesMove && nextDnA + nextDnB == 0) break;
    if (edgesMove) wl = liftEdges(l, s, wl);
    a = pa;
    b = pb;
    dnA = nextDnA;
    dnB = nextDnB;
  }

  for (int l = 1; l <= L; ++l) {
    if (blockChange[l] == 0 && blockChange[l - 1] == 0) continue;
    const std::int64_t itemsBefore = numBlocks(l - 1);
    const std::int64_t blocksBefore = numBlocks(l);
    delta += partitionPriorBase(itemsBefore + blockChange[l - 1], blocksBefore + blockChange[l]) -
             partitionPriorBase(itemsBefore, blocksBefore);
  }
  if (blockChange[L] != 0) {
    const std::int64_t E = graph_->numEdges();
    const std::int64_t T = numBlocks(L);
    const std::int64_t T2 = T + blockChange[L];
    delta += lnBinom(T2 * (T2 + 1) / 2 + E - 1, E) - lnBinom(T * (T + 1) / 2 + E - 1, E);
  }
  return delta;
}

void BlockState::transferApply(int level, Side s, int from, int to, const std::vector<std::pair<int, int>>& w) {
  const int L = numLevels();
  std::int64_t d = 0;
  for (const auto& [o, c] : w) d += c;

  int a = from;
  int b = to;
  bool edgesMove = true;
  auto wl = w;
  for (int l = level;; ++l) {
    SideData& sd = side(l, s);
    if (edgesMove) {
      for (const auto& [o, c] : wl) {
        entry(l, s, a, o) -= c;
        entry(l, s, b, o) += c;
      }
      sd.degree[a] -= d;
      sd.degree[b] += d;
    }
    const bool aEmptied = sd.activePos[a] >= 0 && sd.count[a] == 0;
    const bool bActivated = sd.activePos[b] < 0 && sd.count[b] > 0;
    if (bActivated) {
      sd.activePos[b] = static_cast<int>(sd.active.size());
      sd.active.push_back(b);
      auto it = std::find(sd.freeSlots.rbegin(), sd.freeSlots.rend(), b);
      sd.freeSlots.erase(std::next(it).base());
    }
    if (aEmptied) {
      const int pos = sd.activePos[a];
      const int last = sd.active.back();
      sd.active[pos] = last;
      sd.activePos[last] = pos;
      sd.active.pop_back();
      sd.activePos[a] = -1;
      sd.freeSlots.push_back(a);
    }
    if (l == L) break;
    const int pa = side(l + 1, s).assign[a];
    const int pb = bActivated ? pa : side(l + 1, s).assign[b];
    if (bActivated) attach(l + 1, s, b, pa);
    if (aEmptied) detach(l + 1, s, a);
    const bool nextEdges = edgesMove && pa != pb;
    if (!nextEdges && !aEmptied && !bActivated) break;
    if (nextEdges) wl = liftEdges(l, s, wl);
    edgesMove = nextEdges;
    a = pa;
    b = pb;
  }
}

void BlockState::checkMove(int level, Side s, int item, int target) const {
  if (level < 1 || level >= numLevels()) {
    throw std::invalid_argument("moves are allowed on levels 1.." + std::to_string(numLevels() - 1));
  }
  if (frozen(s)) throw std::invalid_argument("side is frozen");
  const SideData& sd = side(level, s);
  if (item < 0 || item >= static_cast<int>(sd.assign.size()) || sd.assign[item] < 0) {
    throw std::invalid_argument("unknown item " + std::to_string(item));
  }
  if (level == 1 && isIsolatedNode(s, item)) throw std::invalid_argument("isolated nodes never move");
  if (target == kFresh) {
    if (sd.freeSlots.empty()) throw std::invalid_argument("no free block slot");
    return;
  }
  if (target < 0 || target >= static_cast<int>(sd.count.size()) || sd.activePos[target] < 0) {
    throw std::invalid_argument("unknown target block " + std::to_string(target));
  }
  if (level == 1 && target == isolated_[sideIndex(s)]) {
    throw std::invalid_argument("the isolated block is not a move target");
  }
}

int BlockState::resolveTarget(int level, Side s, int target) const {
  return target == kFresh ? side(level, s).freeSlots.back() : target;
}

double BlockState::moveDelta(int level, Side s, int item, int target) const {
  checkMove(level, s, item, target);
  const int from = side(level, s).assign[item];
  const int to = resolveTarget(level, s, target);
  if (to == from) return 0.0;
  return transferDelta(level, s, from, to, 1, itemEdges(level, s, item));
}

void BlockState::move(int level, Side s, int item, int target) {
  checkMove(level, s, item, target);
  const int from = side(level, s).assign[item];
  const int to = resolveTarget(level, s, target);
  if (to == from) return;
  const auto w = itemEdges(level, s, item);
  const double delta = transferDelta(level, s, from, to, 1, w);
  detach(level, s, item);
  attach(level, s, item, to);
  transferApply(level, s, from, to, w);
  sigma_ += delta;
}

double BlockState::mergeDelta(int level, Side s, int from, int to) const {
  if (from == to) return 0.0;
  if (level < 1 || level >= numLevels()) throw std::invalid_argument("merges are not allowed on the top level");
  if (frozen(s)) throw std::invalid_argument("side is frozen");
  const SideData& sd = side(level, s);
  for (int b : {from, to}) {
    if (b < 0 || b >= static_cast<int>(sd.count.size()) || sd.activePos[b] < 0) {
      throw std::invalid_argument("unknown block " + std::to_string(b));
    }
    if (level == 1 && b == isolated_[sideIndex(s)]) throw std::invalid_argument("the isolated block never merges");
  }
  return transferDelta(level, s, from, to, side(level, s).count[from], blockRow(level, s, from));
}

void BlockState::merge(int level, Side s, int from, int to) {
  if (from == to) return;
  const double delta = mergeDelta(level, s, from, to);
  const auto row = blockRow(level, s, from);
  const std::vector<int> items = side(level, s).members[from];
  for (int item : items) {
    detach(level, s, item);
    attach(level, s, item, to);
  }
  transferApply(level, s, from, to, row);
  sigma_ += delta;
}

NestedPartition BlockState::partition() const {
  const int L = numLevels();
  std::vector<LevelAssignment> out(L);
  for (int s = 0; s < 2; ++s) {
    const Side sd = static_cast<Side>(s);
    std::vector<int> prevSlots(graph_->numNodes(sd));
    std::iota(prevSlots.begin(), prevSlots.end(), 0);
    for (int l = 1; l <= L; ++l) {
      const SideData& data = side(l, sd);
      std::vector<int> slots(data.active.begin(), data.active.end());
      std::sort(slots.begin(), slots.end());
      std::vector<int> compact(data.count.size(), -1);
      for (int i = 0; i < static_cast<int>(slots.size()); ++i) compact[slots[i]] = i;
      auto& a = out[l - 1][s];
      a.resize(prevSlots.size());
      for (std::size_t i = 0; i < prevSlots.size(); ++i) a[i] = compact[data.assign[prevSlots[i]]];
      prevSlots = std::move(slots);
    }
  }
  return NestedPartition(graph_->numNodes(Side::Left), graph_->numNodes(Side::Right), std::move(out));
}

double BlockState::scratchSigma() const { return descriptionLength(*graph_, partition()); }

}  // namespace carto
