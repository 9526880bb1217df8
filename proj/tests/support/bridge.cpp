#include "bridge.hpp"

#include <map>
#include <set>
#include <string>

namespace bridge {

std::shared_ptr<const carto::BipartiteGraph> toGraph(const oracle::Graph& g) {
  std::vector<std::string> left, right;
  for (int i = 0; i < g.nl; ++i) left.push_back("d" + std::to_string(i));
  for (int i = 0; i < g.nr; ++i) right.push_back("t" + std::to_string(i));
  return std::make_shared<const carto::BipartiteGraph>(left, right, g.edges);
}

oracle::Graph toOracle(const carto::BipartiteGraph& g) {
  oracle::Graph o;
  o.nl = g.numNodes(carto::Side::Left);
  o.nr = g.numNodes(carto::Side::Right);
  o.edges = g.edges();
  return o;
}

carto::NestedPartition toPartition(const oracle::Graph& g, const oracle::Hierarchy& h) {
  std::vector<carto::LevelAssignment> levels(h.size());
  for (int s = 0; s < 2; ++s) {
    std::vector<int> items;
    for (int v = 0; v < (s == 0 ? g.nl : g.nr); ++v) items.push_back(v);
    for (std::size_t l = 0; l < h.size(); ++l) {
      std::set<int> ids;
      for (int item : items) ids.insert(h[l][s].at(item));
      std::map<int, int> compact;
      for (int id : ids) compact.emplace(id, static_cast<int>(compact.size()));
      auto& a = levels[l][s];
      for (int item : items) a.push_back(compact.at(h[l][s].at(item)));
      items.assign(ids.begin(), ids.end());
    }
  }
  return carto::NestedPartition(g.nl, g.nr, std::move(levels));
}

oracle::Hierarchy toHierarchy(const carto::NestedPartition& p) {
  oracle::Hierarchy h(p.numLevels());
  for (int l = 1; l <= p.numLevels(); ++l) {
    for (int s = 0; s < 2; ++s) {
      const auto& a = p.assignment(l, static_cast<carto::Side>(s));
      for (int i = 0; i < static_cast<int>(a.size()); ++i) h[l - 1][s][i] = a[i];
    }
  }
  return h;
}

}  // namespace bridge
