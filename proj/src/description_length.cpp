#include "carto/description_length.hpp"

#include <cmath>

#include "carto/numeric.hpp"

namespace carto {

double partitionPriorBase(std::int64_t items, std::int64_t blocks) {
  if (items == 0) return 0.0;
  return std::log(static_cast<double>(items)) + lnBinom(items - 1, blocks - 1) + lnFactorial(items);
}

DescriptionLengthTerms descriptionLengthTerms(const BipartiteGraph& graph, const NestedPartition& partition) {
  DescriptionLengthTerms dl;
  const int L = partition.numLevels();
  const std::int64_t E = graph.numEdges();

  const CountMatrix m1 = crossMatrix(graph, partition, 1, 1);
  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> eLeft = m1.rowwise().sum();
  const Eigen::Matrix<std::int64_t, 1, Eigen::Dynamic> eRight = m1.colwise().sum();
  const auto nLeft = partition.blockSizes(1, Side::Left);
  const auto nRight = partition.blockSizes(1, Side::Right);

  for (Eigen::Index r = 0; r < eLeft.size(); ++r) {
    dl.edgePlacement += lnFactorial(eLeft(r));
    dl.degrees += lnBinom(nLeft[r] + eLeft(r) - 1, eLeft(r));
  }
  for (Eigen::Index r = 0; r < eRight.size(); ++r) {
    dl.edgePlacement += lnFactorial(eRight(r));
    dl.degrees += lnBinom(nRight[r] + eRight(r) - 1, eRight(r));
  }
  dl.edgePlacement -= m1.unaryExpr([](std::int64_t x) { return lnFactorial(x); }).sum();
  for (int s = 0; s < 2; ++s) {
    const Side side = static_cast<Side>(s);
    for (int v = 0; v < graph.numNodes(side); ++v) dl.edgePlacement -= lnFactorial(graph.degree(side, v));
  }

  for (int l = 1; l < L; ++l) {
    const CountMatrix groups = crossMatrix(graph, partition, l + 1, l + 1);
    std::vector<std::int64_t> nl(partition.numBlocks(l + 1, Side::Left), 0);
    std::vector<std::int64_t> nr(partition.numBlocks(l + 1, Side::Right), 0);
    for (int b : partition.assignment(l + 1, Side::Left)) ++nl[b];
    for (int b : partition.assignment(l + 1, Side::Right)) ++nr[b];
    for (Eigen::Index r = 0; r < groups.rows(); ++r) {
      for (Eigen::Index c = 0; c < groups.cols(); ++c) {
        dl.blockEdges += lnBinom(nl[r] * nr[c] + groups(r, c) - 1, groups(r, c));
      }
    }
  }
  const std::int64_t T = partition.numBlocks(L);
  dl.blockEdges += lnBinom(T * (T + 1) / 2 + E - 1, E);

  for (int l = 1; l <= L; ++l) {
    dl.partitions += partitionPriorBase(partition.numBlocks(l - 1), partition.numBlocks(l));
    for (int s = 0; s < 2; ++s) {
      std::vector<std::int64_t> n(partition.numBlocks(l, static_cast<Side>(s)), 0);
      for (int b : partition.assignment(l, static_cast<Side>(s))) ++n[b];
      for (auto x : n) dl.partitions -= lnFactorial(x);
    }
  }
  return dl;
}

}  // namespace carto
