#include <doctest.h>

#include <random>
#include <set>

#include "carto/block_state.hpp"
#include "carto/chained.hpp"
#include "carto/description_length.hpp"
#include "synthetic.hpp"

using namespace carto;

namespace {

struct Fixture {
  Corpus corpus;
  Model model;
  Model chain;
};

FitConfig quick() {
  FitConfig c;
  c.seeds = 4;
  return c;
}

const Fixture& eras() {
  static const Fixture f = [] {
    std::mt19937_64 rng(500);
    Fixture f;
    f.corpus = buildCorpus(synthetic::eraCorpus(rng).documents, CorpusConfig{});
    f.model = fitModel(f.corpus, quick(), 3);
    f.chain = chainFit(f.model, f.corpus, "year", quick(), 3);
    return f;
  }();
  return f;
}

std::set<std::string> ids(const Corpus& c) {
  std::set<std::string> out;
  for (const auto& d : c.documents) out.insert(d.id);
  return out;
}

}  // namespace

TEST_CASE("chaining leaves the document hierarchy untouched") {
  const Fixture& f = eras();
  const NestedPartition& dp = f.model.partition();
  const NestedPartition& cp = f.chain.partition();
  REQUIRE(cp.numLevels() == dp.numLevels());
  for (int l = 1; l <= dp.numLevels(); ++l) CHECK(cp.assignment(l, Side::Left) == dp.assignment(l, Side::Left));
  CHECK(f.chain.kind == "chained");
  CHECK(f.chain.hierarchy.rightKind == BlockKind::Period);
  CHECK(f.chain.parentHash == modelHash(f.model));
  CHECK(f.chain.sigma == doctest::Approx(descriptionLength(f.chain.graph(), cp)).epsilon(1e-12));
  for (int l = 1; l <= dp.numLevels(); ++l) {
    CHECK(f.chain.hierarchy.codeOffset(l) == f.model.hierarchy.codeOffset(l));
  }
}

TEST_CASE("chained artifacts round trip") {
  const Fixture& f = eras();
  const auto j = modelToJson(f.chain);
  const Model back = modelFromJson(j);
  CHECK(back.partition() == f.chain.partition());
  CHECK(back.dimension == "year");
  CHECK(back.parentHash == f.chain.parentHash);
  CHECK(modelToJson(back).dump() == j.dump());
  CHECK(modelToJson(chainFit(f.model, f.corpus, "year", quick(), 3)).dump() == j.dump());
}

TEST_CASE("metadata moves in a frozen state match recomputation") {
  const Fixture& f = eras();
  auto graph = f.chain.hierarchy.graph;
  BlockState state(graph, f.chain.partition(), {true, false});
  CHECK(state.movableItems(1, Side::Left).empty());
  for (int l = 1; l < state.numLevels(); ++l) {
    for (int item : state.movableItems(l, Side::Right)) {
      std::vector<int> targets(state.activeBlocks(l, Side::Right).begin(), state.activeBlocks(l, Side::Right).end());
      if (state.hasFreeSlot(l, Side::Right)) targets.push_back(BlockState::kFresh);
      for (int t : targets) {
        if (l == 1 && t == state.isolatedBlock(Side::Right)) continue;
        const double delta = state.moveDelta(l, Side::Right, item, t);
        BlockState copy = state;
        copy.move(l, Side::Right, item, t);
        CHECK(delta == doctest::Approx(copy.scratchSigma() - state.scratchSigma()).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("a single metadata value yields one block per level") {
  const Fixture& f = eras();
  Corpus one = f.corpus;
  for (auto& d : one.documents) d.meta["venue"] = {"same"};
  const Model chain = chainFit(f.model, one, "venue", quick(), 1);
  CHECK(chain.hierarchy.rightKind == BlockKind::Meta);
  for (int l = 1; l <= chain.partition().numLevels(); ++l) CHECK(chain.partition().numBlocks(l, Side::Right) == 1);
}

TEST_CASE("chaining rejects foreign documents") {
  const Fixture& f = eras();
  Corpus extra = f.corpus;
  extra.documents.push_back(extra.documents.front());
  extra.documents.back().id = "stranger";
  CHECK_THROWS_AS(chainFit(f.model, extra, "year", quick(), 1), std::invalid_argument);
  CHECK_THROWS_AS(chainFit(f.chain, f.corpus, "year", quick(), 1), std::invalid_argument);
}

TEST_CASE("documents without the dimension stay isolated") {
  const Fixture& f = eras();
  Corpus partial = f.corpus;
  partial.documents[0].meta.erase("year");
  const Model chain = chainFit(f.model, partial, "year", quick(), 1);
  CHECK(chain.graph().degree(Side::Left, 0) == 0);
  CHECK(chain.warnings.size() == 1);
  CHECK(chain.partition().assignment(1, Side::Left) == f.model.partition().assignment(1, Side::Left));
}

TEST_CASE("restricting to the top domain keeps every document") {
  const Fixture& f = eras();
  const NestedPartition& p = f.model.partition();
  const std::string top = f.model.hierarchy.code({Side::Left, p.numLevels(), 0});
  const Corpus sub = restrictCorpus(f.corpus, f.model, {}, {top});
  CHECK(ids(sub) == ids(f.corpus));
  CHECK(sub.selector == top);
  const Model again = chainFit(f.model, sub, "year", quick(), 3);
  CHECK(again.partition() == f.chain.partition());
}

TEST_CASE("domain and period selections intersect") {
  const Fixture& f = eras();
  const NestedPartition& dp = f.model.partition();
  const NestedPartition& cp = f.chain.partition();
  const BipartiteGraph& cg = f.chain.graph();
  for (int level = 1; level < dp.numLevels(); ++level) {
    const auto docBlock = dp.nodeMembership(level, Side::Left);
    const auto yearBlock = cp.nodeMembership(level, Side::Right);
    for (int d = 0; d < dp.numBlocks(level, Side::Left); ++d) {
      for (int y = 0; y < cp.numBlocks(level, Side::Right); ++y) {
        int expected = 0;
        for (int u = 0; u < cg.numNodes(Side::Left); ++u) {
          bool inPeriod = false;
          for (int v : cg.neighbors(Side::Left, u)) inPeriod = inPeriod || yearBlock[v] == y;
          expected += docBlock[u] == d && inPeriod;
        }
        const std::vector<std::string> selectors{f.model.hierarchy.code({Side::Left, level, d}),
                                                 f.chain.hierarchy.code({Side::Right, level, y})};
        if (expected == 0) {
          CHECK_THROWS_AS(restrictCorpus(f.corpus, f.model, {f.chain}, selectors), std::invalid_argument);
        } else {
          CHECK(restrictCorpus(f.corpus, f.model, {f.chain}, selectors).documents.size() ==
                static_cast<std::size_t>(expected));
        }
      }
    }
  }
}

TEST_CASE("disjoint domains give an empty-selection error with counts") {
  const Fixture& f = eras();
  const NestedPartition& p = f.model.partition();
  REQUIRE(p.numBlocks(1, Side::Left) >= 2);
  const std::string a = f.model.hierarchy.code({Side::Left, 1, 0});
  const std::string b = f.model.hierarchy.code({Side::Left, 1, 1});
  try {
    restrictCorpus(f.corpus, f.model, {}, {a, b});
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find(a + ": ") != std::string::npos);
    CHECK(what.find(b + ": ") != std::string::npos);
  }
  CHECK_THROWS_AS(restrictCorpus(f.corpus, f.model, {}, {"L9D99"}), std::invalid_argument);
  CHECK_THROWS_AS(restrictCorpus(f.corpus, f.model, {}, {"L1P1"}), std::invalid_argument);
}

TEST_CASE("chains of another model are refused") {
  const Fixture& f = eras();
  const Model other = fitModel(f.corpus, quick(), 99);
  const Model foreign = chainFit(other, f.corpus, "year", quick(), 1);
  if (modelHash(other) != modelHash(f.model)) {
    const std::string period = foreign.hierarchy.code({Side::Right, 1, 0});
    CHECK_THROWS_AS(restrictCorpus(f.corpus, f.model, {foreign}, {period}), std::invalid_argument);
  }
}

TEST_CASE("default metadata kinds") {
  CHECK(defaultMetaKind("year") == BlockKind::Period);
  CHECK(defaultMetaKind("date") == BlockKind::Period);
  CHECK(defaultMetaKind("authors") == BlockKind::Meta);
}
