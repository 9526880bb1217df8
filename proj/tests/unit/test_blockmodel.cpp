#include <doctest.h>

#include <cmath>
#include <random>

#include "bridge.hpp"
#include "carto/block_state.hpp"
#include "carto/description_length.hpp"
#include "oracle.hpp"

using namespace carto;

namespace {

// Every legal single-item move of `state`, checked against the oracle.
int checkAllMoves(const oracle::Graph& g, const oracle::Hierarchy& h) {
  const auto graph = bridge::toGraph(g);
  const auto partition = bridge::toPartition(g, h);
  const oracle::Hierarchy base = bridge::toHierarchy(partition);
  const double before = oracle::descriptionLength(g, base);
  BlockState state(graph, partition);
  REQUIRE(state.sigma() == doctest::Approx(before).epsilon(1e-12));
  int checked = 0;
  for (int level = 1; level < state.numLevels(); ++level) {
    for (int s = 0; s < 2; ++s) {
      const Side side = static_cast<Side>(s);
      for (int item : state.movableItems(level, side)) {
        std::vector<int> targets(state.activeBlocks(level, side).begin(), state.activeBlocks(level, side).end());
        if (state.hasFreeSlot(level, side)) targets.push_back(BlockState::kFresh);
        for (int t : targets) {
          if (level == 1 && t == state.isolatedBlock(side)) continue;
          const double delta = state.moveDelta(level, side, item, t);
          const double expected =
              oracle::descriptionLength(g, oracle::applyMove(base, level, s, item, t)) - before;
          CHECK(std::abs(delta - expected) < 1e-9);
          ++checked;
        }
      }
    }
  }
  return checked;
}

}  // namespace

TEST_CASE("description length matches the first-principles oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::randomGraph(rng, 8);
    const auto h = oracle::randomHierarchy(rng, g);
    const auto graph = bridge::toGraph(g);
    const auto partition = bridge::toPartition(g, h);
    CHECK(descriptionLength(*graph, partition) ==
          doctest::Approx(oracle::descriptionLength(g, h)).epsilon(1e-12));
  }
}

TEST_CASE("single edge graph in one block per side") {
  oracle::Graph g{1, 1, {{0, 0}}};
  const oracle::Hierarchy h{{oracle::Level{std::map<int, int>{{0, 0}}, std::map<int, int>{{0, 0}}}}};
  const auto graph = bridge::toGraph(g);
  const auto partition = bridge::toPartition(g, h);
  const double closed = descriptionLength(*graph, partition);
  CHECK(closed == doctest::Approx(oracle::descriptionLength(g, h)).epsilon(1e-14));
  // S0 = 0, Ldeg = 0, top ln C(3, 1) = ln 3, partition ln 2 + ln C(1, 1) + ln 2!
  CHECK(closed == doctest::Approx(std::log(3.0) + 2 * std::log(2.0)).epsilon(1e-14));
  const auto best = oracle::exhaustiveTwoLevel(g);
  CHECK(best.minimum == doctest::Approx(closed).epsilon(1e-14));
}

TEST_CASE("planted bicliques beat the merged partition") {
  constexpr int kGroups = 3;
  constexpr int kSize = 4;
  oracle::Graph g{kGroups * kSize, kGroups * kSize, {}};
  using M = std::map<int, int>;
  oracle::Hierarchy planted(2);
  oracle::Hierarchy merged(1);
  for (int v = 0; v < kGroups * kSize; ++v) {
    for (int w = 0; w < kGroups * kSize; ++w) {
      if (v / kSize == w / kSize) g.edges.emplace_back(v, w);
    }
    for (int s = 0; s < 2; ++s) {
      planted[0][s][v] = v / kSize;
      planted[1][s][v / kSize] = 0;
      merged[0][s][v] = 0;
    }
  }
  const auto graph = bridge::toGraph(g);
  const double sp = descriptionLength(*graph, bridge::toPartition(g, planted));
  const double sm = descriptionLength(*graph, bridge::toPartition(g, merged));
  CHECK(sp < sm);
  CHECK(sp == doctest::Approx(oracle::descriptionLength(g, planted)).epsilon(1e-12));
}

TEST_CASE("exhaustive minimum is no worse than any two-level candidate") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::randomGraph(rng, 7);
    const double best = oracle::exhaustiveTwoLevel(g).minimum;
    auto h = oracle::randomHierarchy(rng, g);
    if (h.size() <= 2) CHECK(best <= oracle::descriptionLength(g, h) + 1e-12);
  }
}

TEST_CASE("description length ignores block labels") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::randomGraph(rng, 8);
    const auto h = oracle::randomHierarchy(rng, g);
    const auto graph = bridge::toGraph(g);
    const auto p = bridge::toPartition(g, h);
    CHECK(descriptionLength(*graph, canonicalize(p)) == doctest::Approx(descriptionLength(*graph, p)).epsilon(1e-13));
  }
}

TEST_CASE("move deltas agree with scratch recomputation") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::randomGraph(rng, 8);
    checked += checkAllMoves(g, oracle::randomHierarchy(rng, g));
  }
  CHECK(checked > 1000);
}

TEST_CASE("identity move has zero delta") {
  std::mt19937_64 rng(9);
  const auto g = oracle::randomGraph(rng, 8);
  BlockState state(bridge::toGraph(g), bridge::toPartition(g, oracle::randomHierarchy(rng, g)));
  if (state.numLevels() > 1) {
    for (int item : state.movableItems(1, Side::Left)) {
      CHECK(state.moveDelta(1, Side::Left, item, state.blockOf(1, Side::Left, item)) == 0.0);
    }
  }
}

TEST_CASE("moving the last member removes the block") {
  oracle::Graph g{3, 2, {{0, 0}, {1, 0}, {1, 1}, {2, 1}}};
  using M = std::map<int, int>;
  const oracle::Hierarchy h{{M{{0, 0}, {1, 0}, {2, 1}}, M{{0, 0}, {1, 1}}}, {M{{0, 0}, {1, 0}}, M{{0, 0}, {1, 0}}}};
  BlockState state(bridge::toGraph(g), bridge::toPartition(g, h));
  CHECK(state.numBlocks(1, Side::Left) == 2);
  const double delta = state.moveDelta(1, Side::Left, 2, 0);
  const double expected = oracle::descriptionLength(g, oracle::applyMove(h, 1, 0, 2, 0)) - oracle::descriptionLength(g, h);
  CHECK(delta == doctest::Approx(expected).epsilon(1e-12));
  state.move(1, Side::Left, 2, 0);
  CHECK(state.numBlocks(1, Side::Left) == 1);
  CHECK(state.sigma() == doctest::Approx(state.scratchSigma()).epsilon(1e-12));
}

TEST_CASE("applied moves and merges keep the running total exact") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = oracle::randomGraph(rng, 8);
    BlockState state(bridge::toGraph(g), bridge::toPartition(g, oracle::randomHierarchy(rng, g)));
    for (int step = 0; step < 20 && state.numLevels() > 1; ++step) {
      std::uniform_int_distribution<int> lv(1, state.numLevels() - 1);
      const int level = lv(rng);
      const Side side = static_cast<Side>(rng() % 2);
      auto items = state.movableItems(level, side);
      if (items.empty()) continue;
      std::vector<int> targets;
      for (int b : state.activeBlocks(level, side)) {
        if (!(level == 1 && b == state.isolatedBlock(side))) targets.push_back(b);
      }
      if (rng() % 3 == 0 && targets.size() >= 2) {
        const int from = targets[rng() % targets.size()];
        const int to = targets[rng() % targets.size()];
        const double before = state.sigma();
        const double predicted = state.mergeDelta(level, side, from, to);
        state.merge(level, side, from, to);
        CHECK(state.sigma() - before == doctest::Approx(predicted).epsilon(1e-12));
      } else {
        if (state.hasFreeSlot(level, side)) targets.push_back(BlockState::kFresh);
        if (targets.empty()) continue;
        const int item = items[rng() % items.size()];
        state.move(level, side, item, targets[rng() % targets.size()]);
      }
      CHECK(std::abs(state.sigma() - state.scratchSigma()) < 1e-9);
      const auto og = bridge::toOracle(state.graph());
      CHECK(std::abs(state.sigma() - oracle::descriptionLength(og, bridge::toHierarchy(state.partition()))) < 1e-9);
    }
  }
}

TEST_CASE("illegal moves are rejected") {
  oracle::Graph g{3, 2, {{0, 0}, {1, 1}}};
  using M = std::map<int, int>;
  const oracle::Hierarchy h{{M{{0, 0}, {1, 1}, {2, 2}}, M{{0, 0}, {1, 1}}}, {M{{0, 0}, {1, 0}, {2, 0}}, M{{0, 0}, {1, 0}}}};
  BlockState state(bridge::toGraph(g), bridge::toPartition(g, h));
  CHECK_THROWS(state.moveDelta(1, Side::Left, 2, 0));                // isolated node
  CHECK_THROWS(state.moveDelta(1, Side::Left, 0, state.isolatedBlock(Side::Left)));
  CHECK_THROWS(state.moveDelta(2, Side::Left, 0, 0));                // top level
  CHECK_THROWS(state.moveDelta(1, Side::Left, 0, 7));                // unknown block
  BlockState frozen(bridge::toGraph(g), bridge::toPartition(g, h), {true, false});
  CHECK_THROWS(frozen.moveDelta(1, Side::Left, 0, 1));
}
