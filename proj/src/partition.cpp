#include "carto/partition.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

namespace carto {

BlockKind parseBlockKind(char c) {
  switch (c) {
    case 'D': return BlockKind::Domain;
    case 'T': return BlockKind::Topic;
    case 'P': return BlockKind::Period;
    case 'M': return BlockKind::Meta;
    default: throw std::invalid_argument(std::string("unknown block kind '") + c + "'");
  }
}

std::string blockCode(const BlockRef& ref) {
  return "L" + std::to_string(ref.level) + static_cast<char>(ref.kind) + std::to_string(ref.index);
}

BlockRef parseBlockCode(std::string_view code) {
  auto fail = [&] { return std::invalid_argument("malformed block code '" + std::string(code) + "'"); };
  if (code.size() < 4 || code.front() != 'L') throw fail();
  const char* begin = code.data() + 1;
  const char* end = code.data() + code.size();
  BlockRef ref;
  auto [p, ec] = std::from_chars(begin, end, ref.level);
  if (ec != std::errc() || p == begin || p == end || ref.level < 1) throw fail();
  try {
    ref.kind = parseBlockKind(*p);
  } catch (const std::invalid_argument&) {
    throw fail();
  }
  const char* digits = p + 1;
  auto [q, ec2] = std::from_chars(digits, end, ref.index);
  if (ec2 != std::errc() || q != end || q == digits || ref.index < 1) throw fail();
  return ref;
}

NestedPartition::NestedPartition(int nodesLeft, int nodesRight, std::vector<LevelAssignment> levels)
    : nodes_{nodesLeft, nodesRight}, levels_(std::move(levels)) {
  if (levels_.empty()) {
    throw std::invalid_argument("nested partition needs at least one level");
  }
  std::array<int, 2> below = nodes_;
  counts_.reserve(levels_.size());
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    std::array<int, 2> count{0, 0};
    for (int s = 0; s < 2; ++s) {
      const auto& a = levels_[l][s];
      if (static_cast<int>(a.size()) != below[s]) {
        throw std::invalid_argument("level " + std::to_string(l + 1) + " assigns " + std::to_string(a.size()) +
                                    " items, expected " + std::to_string(below[s]));
      }
      std::vector<char> used;
      for (int b : a) {
        if (b < 0) throw std::invalid_argument("negative block id at level " + std::to_string(l + 1));
        if (b >= static_cast<int>(used.size())) used.resize(b + 1, 0);
        used[b] = 1;
      }
      if (std::find(used.begin(), used.end(), 0) != used.end()) {
        throw std::invalid_argument("block ids at level " + std::to_string(l + 1) + " are not compact");
      }
      count[s] = static_cast<int>(used.size());
    }
    counts_.push_back(count);
    below = count;
  }
  const auto& top = counts_.back();
  if (top[0] > 1 || top[1] > 1) {
    throw std::invalid_argument("top level must hold at most one block per side");
  }
}

int NestedPartition::numBlocks(int level, Side s) const {
  if (level == 0) return nodes_[sideIndex(s)];
  if (level < 0 || level > numLevels()) throw std::out_of_range("level " + std::to_string(level));
  return counts_[level - 1][sideIndex(s)];
}

const std::vector<int>& NestedPartition::assignment(int level, Side s) const {
  if (level < 1 || level > numLevels()) throw std::out_of_range("level " + std::to_string(level));
  return levels_[level - 1][sideIndex(s)];
}

int NestedPartition::parentOf(BlockId item) const { return assignment(item.level + 1, item.side)[item.index]; }

bool NestedPartition::contains(BlockId id) const {
  return id.level >= 0 && id.level <= numLevels() && id.index >= 0 && id.index < numBlocks(id.level, id.side);
}

int NestedPartition::ancestorIndex(BlockId from, int toLevel) const {
  if (!contains(from) || toLevel < from.level || toLevel > numLevels()) {
    throw std::out_of_range("invalid ancestor query");
  }
  int idx = from.index;
  for (int l = from.level + 1; l <= toLevel; ++l) idx = levels_[l - 1][sideIndex(from.side)][idx];
  return idx;
}

std::vector<int> NestedPartition::nodeMembership(int level, Side s) const {
  std::vector<int> m(nodes_[sideIndex(s)]);
  std::iota(m.begin(), m.end(), 0);
  for (int l = 1; l <= level; ++l) {
    const auto& a = assignment(l, s);
    for (int& b : m) b = a[b];
  }
  return m;
}

std::vector<int> NestedPartition::blockSizes(int level, Side s) const {
  std::vector<int> sizes(numBlocks(level, s), 0);
  for (int b : nodeMembership(level, s)) ++sizes[b];
  return sizes;
}

bool NestedPartition::isIdentityLevel(int level, Side s) const {
  return level >= 2 && numBlocks(level, s) == numBlocks(level - 1, s);
}

NestedPartition canonicalize(const NestedPartition& partition, std::array<bool, 2> sides) {
  const int L = partition.numLevels();
  std::vector<LevelAssignment> out(L);
  for (int s = 0; s < 2; ++s) {
    const Side side = static_cast<Side>(s);
    if (!sides[s]) {
      for (int l = 1; l <= L; ++l) out[l - 1][s] = partition.assignment(l, side);
      continue;
    }
    std::vector<int> prevPerm(partition.numNodes(side));
    std::iota(prevPerm.begin(), prevPerm.end(), 0);
    for (int l = 1; l <= L; ++l) {
      const int B = partition.numBlocks(l, side);
      const auto membership = partition.nodeMembership(l, side);
      std::vector<int> size(B, 0);
      std::vector<int> first(B, -1);
      for (int v = 0; v < static_cast<int>(membership.size()); ++v) {
        const int b = membership[v];
        ++size[b];
        if (first[b] < 0) first[b] = v;
      }
      std::vector<int> order(B);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (size[a] != size[b]) return size[a] > size[b];
        return first[a] < first[b];
      });
      std::vector<int> perm(B);
      for (int i = 0; i < B; ++i) perm[order[i]] = i;

      const auto& a = partition.assignment(l, side);
      auto& na = out[l - 1][s];
      na.assign(a.size(), 0);
      for (std::size_t i = 0; i < a.size(); ++i) na[prevPerm[i]] = perm[a[i]];
      prevPerm = std::move(perm);
    }
  }
  return NestedPartition(partition.numNodes(Side::Left), partition.numNodes(Side::Right), std::move(out));
}

NestedPartition insertIdentityLevel(const NestedPartition& partition, int level) {
  if (level < 2 || level > partition.numLevels()) throw std::out_of_range("cannot insert level " + std::to_string(level));
  auto levels = partition.levels();
  LevelAssignment identity;
  for (int s = 0; s < 2; ++s) {
    identity[s].resize(partition.numBlocks(level - 1, static_cast<Side>(s)));
    std::iota(identity[s].begin(), identity[s].end(), 0);
  }
  levels.insert(levels.begin() + (level - 1), std::move(identity));
  return NestedPartition(partition.numNodes(Side::Left), partition.numNodes(Side::Right), std::move(levels));
}

NestedPartition removeLevel(const NestedPartition& partition, int level) {
  if (level < 2 || level > partition.numLevels()) throw std::out_of_range("cannot remove level " + std::to_string(level));
  auto levels = partition.levels();
  if (level < partition.numLevels()) {
    for (int s = 0; s < 2; ++s) {
      const auto& removed = levels[level - 1][s];
      std::vector<int> composed(removed.size());
      for (std::size_t i = 0; i < removed.size(); ++i) composed[i] = levels[level][s][removed[i]];
      levels[level][s] = std::move(composed);
    }
  }
  levels.erase(levels.begin() + (level - 1));
  return NestedPartition(partition.numNodes(Side::Left), partition.numNodes(Side::Right), std::move(levels));
}

std::vector<BlockId> ancestors(const NestedPartition& partition, BlockId block) {
  if (block.level < 1 || !partition.contains(block)) throw std::out_of_range("unknown block");
  std::vector<BlockId> out;
  int idx = block.index;
  for (int l = block.level + 1; l <= partition.numLevels(); ++l) {
    idx = partition.assignment(l, block.side)[idx];
    out.push_back({block.side, l, idx});
  }
  return out;
}

std::vector<BlockId> children(const NestedPartition& partition, BlockId block) {
  if (block.level < 1 || !partition.contains(block)) throw std::out_of_range("unknown block");
  std::vector<BlockId> out;
  if (block.level == 1) return out;
  const auto& a = partition.assignment(block.level, block.side);
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (a[i] == block.index) out.push_back({block.side, block.level - 1, i});
  }
  return out;
}

CountMatrix crossMatrix(const BipartiteGraph& graph, const NestedPartition& partition, int levelLeft,
                        int levelRight) {
  const auto ml = partition.nodeMembership(levelLeft, Side::Left);
  const auto mr = partition.nodeMembership(levelRight, Side::Right);
  CountMatrix m = CountMatrix::Zero(partition.numBlocks(levelLeft, Side::Left), partition.numBlocks(levelRight, Side::Right));
  for (const auto& [l, r] : graph.edges()) m(ml[l], mr[r]) += 1;
  return m;
}

std::vector<int> collapsedLevels(const NestedPartition& partition, Side s) {
  std::vector<int> kept{1};
  for (int l = 2; l <= partition.numLevels(); ++l) {
    if (!partition.isIdentityLevel(l, s)) kept.push_back(l);
  }
  return kept;
}

int BlockHierarchy::codeOffset(int level) const {
  if (!leftCodeOffset.empty()) return leftCodeOffset.at(level - 1);
  return partition.numBlocks(level, Side::Right);
}

BlockRef BlockHierarchy::ref(BlockId id) const {
  if (id.level < 1 || !partition.contains(id)) throw std::out_of_range("unknown block");
  const int index = id.side == Side::Right ? id.index + 1 : codeOffset(id.level) + id.index + 1;
  return {kindOf(id.side), id.level, index};
}

BlockId BlockHierarchy::resolve(const BlockRef& ref) const {
  BlockId id;
  id.level = ref.level;
  if (ref.kind == rightKind) {
    id.side = Side::Right;
    id.index = ref.index - 1;
  } else if (ref.kind == leftKind) {
    id.side = Side::Left;
    if (ref.level >= 1 && ref.level <= partition.numLevels()) id.index = ref.index - 1 - codeOffset(ref.level);
    else id.index = -1;
  } else {
    throw std::invalid_argument("block " + blockCode(ref) + ": kind not present in this model");
  }
  if (id.level < 1 || !partition.contains(id)) {
    throw std::invalid_argument("unknown block " + blockCode(ref));
  }
  return id;
}

}  // namespace carto
