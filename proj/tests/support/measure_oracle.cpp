#include "measure_oracle.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {
namespace {

const double kMinusInf = -std::numeric_limits<double>::infinity();

int nodeCount(const Graph& g, int side) { return side == 0 ? g.nl : g.nr; }

int blockOf(const Hierarchy& h, int side, int level, int node) {
  int b = node;
  for (int l = 1; l <= level; ++l) b = h[l - 1][side].at(b);
  return b;
}

std::set<std::set<int>> partitionAt(const Graph& g, const Hierarchy& h, int side, int level) {
  std::map<int, std::set<int>> groups;
  for (int v = 0; v < nodeCount(g, side); ++v) groups[blockOf(h, side, level, v)].insert(v);
  std::set<std::set<int>> out;
  for (auto& [b, nodes] : groups) out.insert(nodes);
  return out;
}

bool repeatsBelow(const Graph& g, const Hierarchy& h, int side, int level) {
  return level >= 2 && partitionAt(g, h, side, level) == partitionAt(g, h, side, level - 1);
}

}  // namespace

std::set<int> members(const Hierarchy& h, int side, int level, int block) {
  std::set<int> out;
  const int n = static_cast<int>(h[0][side].size());
  for (int v = 0; v < n; ++v) {
    if (blockOf(h, side, level, v) == block) out.insert(v);
  }
  return out;
}

std::map<int, double> usage(const Graph& g, const Hierarchy& h, int side, int level, int block, int targetLevel) {
  const std::set<int> nodes = members(h, side, level, block);
  std::map<int, double> counts;
  double total = 0;
  for (auto [u, v] : g.edges) {
    const int mine = side == 0 ? u : v;
    const int other = side == 0 ? v : u;
    if (!nodes.count(mine)) continue;
    counts[blockOf(h, 1 - side, targetLevel, other)] += 1;
    total += 1;
  }
  for (auto& [t, c] : counts) c /= total;
  return counts;
}

Measures measures(const Graph& g, const Hierarchy& h, int side, int level, int block, int targetLevel, int target) {
  const int L = static_cast<int>(h.size());
  const std::set<int> nodes = members(h, side, level, block);
  const int any = *nodes.begin();
  int base = level;
  while (repeatsBelow(g, h, side, base)) --base;

  auto p = [&](int lvl, int blk) {
    const auto u = usage(g, h, side, lvl, blk, targetLevel);
    auto it = u.find(target);
    return it == u.end() ? 0.0 : it->second;
  };
  std::vector<double> up;
  for (int l = base + 1; l <= L; ++l) {
    if (!repeatsBelow(g, h, side, l)) up.push_back(p(l, blockOf(h, side, l, any)));
  }
  const double own = p(base, blockOf(h, side, base, any));

  Measures m;
  if (!up.empty()) {
    double s = 0;
    for (double a : up) s += own == 0 ? 0.0 : own * std::log(own / a);
    m.specificity = s / up.size();
  }
  if (base == 1) return m;
  if (up.empty()) up.push_back(own);

  std::set<int> kids;
  for (int v : nodes) kids.insert(blockOf(h, side, base - 1, v));
  std::vector<double> childP;
  for (int c : kids) {
    if (usage(g, h, side, base - 1, c, targetLevel).empty()) continue;
    childP.push_back(p(base - 1, c));
  }
  if (childP.empty()) return m;
  double raw = 0;
  double mean = 0;
  bool missing = false;
  for (double c : childP) {
    mean += c / childP.size();
    if (c == 0) {
      missing = true;
      continue;
    }
    double inner = 0;
    for (double a : up) inner += std::log(c / a);
    raw += inner / up.size() / childP.size();
  }
  m.commonalityRaw = missing ? kMinusInf : raw;
  m.commonality = mean == 0 ? 0.0 : mean * *m.commonalityRaw;
  return m;
}

}  // namespace oracle
