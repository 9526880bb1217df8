#include "carto/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carto {
namespace {

constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

void requireBlock(const NestedPartition& p, BlockId block) {
  if (block.level < 1 || !p.contains(block)) throw std::invalid_argument("unknown block");
}

double ratioLog(double p, double ancestor) {
  if (ancestor <= 0.0) throw std::logic_error("usage is positive where a superblock's usage is zero");
  return std::log(p / ancestor);
}

std::vector<std::vector<double>> usages(const BlockHierarchy& h, const std::vector<BlockId>& blocks, int targetLevel) {
  std::vector<std::vector<double>> out;
  for (const auto& b : blocks) out.push_back(usage(h, b, targetLevel));
  return out;
}

}  // namespace

std::vector<std::int64_t> blockEdgeCounts(const BlockHierarchy& h, BlockId block, int targetLevel) {
  const NestedPartition& p = h.partition;
  requireBlock(p, block);
  if (targetLevel < 0 || targetLevel > p.numLevels()) throw std::invalid_argument("target level out of range");
  const Side o = opposite(block.side);
  const auto source = p.nodeMembership(block.level, block.side);
  const auto target = p.nodeMembership(targetLevel, o);
  std::vector<std::int64_t> counts(p.numBlocks(targetLevel, o), 0);
  for (int u = 0; u < static_cast<int>(source.size()); ++u) {
    if (source[u] != block.index) continue;
    for (int v : h.graph->neighbors(block.side, u)) ++counts[target[v]];
  }
  return counts;
}

std::vector<double> usage(const BlockHierarchy& h, BlockId block, int targetLevel) {
  const auto counts = blockEdgeCounts(h, block, targetLevel);
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("block " + h.code(block) + " has no edges");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return p;
}

BlockId collapsedBlock(const NestedPartition& p, BlockId block) {
  requireBlock(p, block);
  while (block.level > 1 && p.isIdentityLevel(block.level, block.side)) {
    const auto& a = p.assignment(block.level, block.side);
    block.index = static_cast<int>(std::find(a.begin(), a.end(), block.index) - a.begin());
    --block.level;
  }
  return block;
}

std::vector<BlockId> ladder(const NestedPartition& p, BlockId block) {
  const BlockId b = collapsedBlock(p, block);
  const auto kept = collapsedLevels(p, b.side);
  std::vector<BlockId> out;
  for (const auto& a : ancestors(p, b)) {
    if (std::binary_search(kept.begin(), kept.end(), a.level)) out.push_back(a);
  }
  return out;
}

std::vector<BlockId> subblocks(const NestedPartition& p, BlockId block) {
  const BlockId b = collapsedBlock(p, block);
  return children(p, b);
}

double specificityValue(double p, const std::vector<double>& ladderP) {
  if (ladderP.empty()) throw std::invalid_argument("specificity needs at least one superblock");
  if (p == 0.0) return 0.0;
  double sum = 0.0;
  for (double a : ladderP) sum += p * ratioLog(p, a);
  return sum / static_cast<double>(ladderP.size());
}

double commonalityRawValue(const std::vector<double>& childP, const std::vector<double>& ladderP) {
  if (childP.empty()) throw std::invalid_argument("commonality needs subblocks");
  if (ladderP.empty()) throw std::invalid_argument("commonality needs at least one superblock");
  double sum = 0.0;
  for (double c : childP) {
    if (c == 0.0) return kMinusInfinity;
    double inner = 0.0;
    for (double a : ladderP) inner += ratioLog(c, a);
    sum += inner / static_cast<double>(ladderP.size());
  }
  return sum / static_cast<double>(childP.size());
}

double commonalityValue(const std::vector<double>& childP, const std::vector<double>& ladderP) {
  const double raw = commonalityRawValue(childP, ladderP);
  double mean = 0.0;
  for (double c : childP) mean += c;
  mean /= static_cast<double>(childP.size());
  return mean == 0.0 ? 0.0 : mean * raw;
}

BlockMeasures measureBlock(const BlockHierarchy& h, BlockId block, int targetLevel) {
  BlockMeasures m;
  m.block = block;
  m.targetLevel = targetLevel;
  m.usage = usage(h, block, targetLevel);
  auto up = usages(h, ladder(h.partition, block), targetLevel);
  const std::size_t T = m.usage.size();
  auto column = [&](const std::vector<std::vector<double>>& rows, std::size_t t, std::vector<double>& out) {
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][t];
  };
  if (up.empty()) {
    up.push_back(m.usage);  // a root compares its subblocks with itself
  } else {
    std::vector<double> ladderP(up.size());
    m.specificity.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      column(up, t, ladderP);
      m.specificity[t] = specificityValue(m.usage[t], ladderP);
    }
  }
  std::vector<double> ladderP(up.size());
  std::vector<BlockId> kids;
  for (const auto& c : subblocks(h.partition, block)) {
    const auto counts = blockEdgeCounts(h, c, 0);
    if (std::any_of(counts.begin(), counts.end(), [](std::int64_t x) { return x > 0; })) kids.push_back(c);
  }
  if (kids.empty()) return m;
  const auto down = usages(h, kids, targetLevel);
  std::vector<double> childP(down.size());
  m.commonalityRaw.resize(T);
  m.commonality.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    column(up, t, ladderP);
    column(down, t, childP);
    m.commonalityRaw[t] = commonalityRawValue(childP, ladderP);
    m.commonality[t] = commonalityValue(childP, ladderP);
  }
  return m;
}

std::vector<double> nestedSpecificity(const BlockHierarchy& h, BlockId block, int targetLevel) {
  auto m = measureBlock(h, block, targetLevel);
  if (m.specificity.empty()) throw std::invalid_argument("block " + h.code(block) + " has no superblock");
  return m.specificity;
}

std::vector<double> nestedCommonalityRaw(const BlockHierarchy& h, BlockId block, int targetLevel) {
  auto m = measureBlock(h, block, targetLevel);
  if (m.commonalityRaw.empty()) throw std::invalid_argument("block " + h.code(block) + " has no subblocks");
  return m.commonalityRaw;
}

std::vector<double> nestedCommonality(const BlockHierarchy& h, BlockId block, int targetLevel) {
  auto m = measureBlock(h, block, targetLevel);
  if (m.commonality.empty()) throw std::invalid_argument("block " + h.code(block) + " has no subblocks");
  return m.commonality;
}

TermMeasures termLevelMeasures(const BlockHierarchy& h, BlockId block) {
  TermMeasures out;
  out.values = measureBlock(h, block, 0);
  out.group = h.partition.nodeMembership(1, opposite(block.side));
  return out;
}

std::vector<char> periodDocuments(const BlockHierarchy& h, BlockId period) {
  requireBlock(h.partition, period);
  if (period.side != Side::Right) throw std::invalid_argument("periods are metadata blocks");
  const auto membership = h.partition.nodeMembership(period.level, Side::Right);
  std::vector<char> in(h.graph->numNodes(Side::Left), 0);
  for (int v = 0; v < static_cast<int>(membership.size()); ++v) {
    if (membership[v] != period.index) continue;
    for (int u : h.graph->neighbors(Side::Right, v)) in[u] = 1;
  }
  return in;
}

double prevalence(const BlockHierarchy& h, BlockId domain, BlockId period) {
  requireBlock(h.partition, domain);
  if (domain.side != Side::Left) throw std::invalid_argument("domains are document blocks");
  const auto in = periodDocuments(h, period);
  const auto membership = h.partition.nodeMembership(domain.level, Side::Left);
  int total = 0;
  int inside = 0;
  for (std::size_t u = 0; u < in.size(); ++u) {
    if (!in[u]) continue;
    ++total;
    inside += membership[u] == domain.index;
  }
  if (total == 0) throw std::invalid_argument("period " + h.code(period) + " has no documents");
  return static_cast<double>(inside) / total;
}

std::vector<ShiftRow> prevalenceShift(const BlockHierarchy& h, BlockId periodA, BlockId periodB) {
  if (periodA == periodB) throw std::invalid_argument("a shift needs two distinct periods");
  const auto inA = periodDocuments(h, periodA);
  const auto inB = periodDocuments(h, periodB);
  const auto sizeA = std::count(inA.begin(), inA.end(), 1);
  const auto sizeB = std::count(inB.begin(), inB.end(), 1);
  if (sizeA == 0) throw std::invalid_argument("period " + h.code(periodA) + " has no documents");
  if (sizeB == 0) throw std::invalid_argument("period " + h.code(periodB) + " has no documents");
  std::vector<ShiftRow> rows;
  for (int l = 1; l <= h.partition.numLevels(); ++l) {
    const int B = h.partition.numBlocks(l, Side::Left);
    const auto membership = h.partition.nodeMembership(l, Side::Left);
    std::vector<std::int64_t> a(B, 0), b(B, 0);
    for (std::size_t u = 0; u < membership.size(); ++u) {
      a[membership[u]] += inA[u];
      b[membership[u]] += inB[u];
    }
    double largest = 0.0;
    const std::size_t first = rows.size();
    for (int d = 0; d < B; ++d) {
      ShiftRow r;
      r.domain = {Side::Left, l, d};
      r.prevalenceA = static_cast<double>(a[d]) / static_cast<double>(sizeA);
      r.prevalenceB = static_cast<double>(b[d]) / static_cast<double>(sizeB);
      r.shift = r.prevalenceB - r.prevalenceA;
      largest = std::max(largest, std::abs(r.shift));
      rows.push_back(r);
    }
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].colorScore = largest > 0.0 ? rows[i].shift / largest : 0.0;
  }
  return rows;
}

}  // namespace carto
