#include "fixtures.hpp"

#include <memory>
#include <string>

namespace fixtures {

using namespace carto;

BlockHierarchy toy(int docs, int terms, const std::vector<std::pair<int, int>>& edges, std::vector<LevelAssignment> levels) {
  std::vector<std::string> left, right;
  for (int i = 0; i < docs; ++i) left.push_back("d" + std::to_string(i));
  for (int i = 0; i < terms; ++i) right.push_back("t" + std::to_string(i));
  BlockHierarchy h;
  h.graph = std::make_shared<const BipartiteGraph>(left, right, edges);
  h.partition = NestedPartition(docs, terms, std::move(levels));
  return h;
}

LevelAssignment lv(std::vector<int> left, std::vector<int> right) { return {std::move(left), std::move(right)}; }

void link(std::vector<std::pair<int, int>>& edges, int doc, int from, int to) {
  for (int t = from; t < to; ++t) edges.emplace_back(doc, t);
}

BlockHierarchy specificityToy() {
  std::vector<std::pair<int, int>> e;
  link(e, 0, 0, 4);
  link(e, 1, 2, 6);
  return toy(2, 6, e, {lv({0, 1}, {0, 0, 1, 1, 1, 1}), lv({0, 0}, {0, 0})});
}

BlockHierarchy commonalityToy() {
  std::vector<std::pair<int, int>> e;
  link(e, 0, 0, 4);
  link(e, 0, 4, 10);
  link(e, 1, 0, 2);
  link(e, 1, 4, 12);
  link(e, 2, 0, 3);
  link(e, 2, 4, 11);
  std::vector<int> topics(12, 1);
  for (int t = 0; t < 4; ++t) topics[t] = 0;
  return toy(3, 12, e, {lv({0, 1, 2}, topics), lv({0, 0, 1}, {0, 0}), lv({0, 0}, {0})});
}

BlockHierarchy missingTopicToy() {
  std::vector<std::pair<int, int>> e;
  link(e, 0, 0, 2);
  link(e, 0, 2, 4);
  link(e, 1, 2, 4);
  link(e, 2, 0, 4);
  return toy(3, 4, e, {lv({0, 1, 2}, {0, 0, 1, 1}), lv({0, 0, 1}, {0, 0}), lv({0, 0}, {0})});
}

}  // namespace fixtures
