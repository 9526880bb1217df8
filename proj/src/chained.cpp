#include "carto/chained.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace carto {

BlockKind defaultMetaKind(const std::string& dimension) {
  static const std::set<std::string> timeLike{"year", "years", "date", "period", "time"};
  return timeLike.count(dimension) ? BlockKind::Period : BlockKind::Meta;
}

Model chainFit(const Model& domainModel, const Corpus& corpus, const std::string& dimension, const FitConfig& config,
               std::uint64_t seed, std::optional<BlockKind> kind) {
  if (domainModel.chained()) throw std::invalid_argument("chaining needs a domain-topic model");
  const BipartiteGraph byCorpus = buildDocMetaGraph(corpus, dimension);
  const auto& docs = domainModel.graph().names(Side::Left);
  std::unordered_map<std::string, int> modelIndex;
  for (int i = 0; i < static_cast<int>(docs.size()); ++i) modelIndex.emplace(docs[i], i);
  std::vector<int> toModel(corpus.documents.size());
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    auto it = modelIndex.find(corpus.documents[i].id);
    if (it == modelIndex.end()) {
      throw std::invalid_argument("document '" + corpus.documents[i].id + "' is not part of the domain model");
    }
    toModel[i] = it->second;
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& [u, v] : byCorpus.edges()) edges.emplace_back(toModel[u], v);
  auto graph = std::make_shared<const BipartiteGraph>(docs, byCorpus.names(Side::Right), std::move(edges));

  const NestedPartition& dp = domainModel.partition();
  std::vector<std::vector<int>> leftLevels;
  for (int l = 1; l <= dp.numLevels(); ++l) leftLevels.push_back(dp.assignment(l, Side::Left));
  FitResult fit = fitChained(graph, leftLevels, config, seed);

  Model m;
  m.kind = "chained";
  m.dimension = dimension;
  m.hierarchy.graph = graph;
  m.hierarchy.partition = std::move(fit.partition);
  m.hierarchy.leftKind = domainModel.hierarchy.leftKind;
  m.hierarchy.rightKind = kind.value_or(defaultMetaKind(dimension));
  if (m.hierarchy.rightKind == m.hierarchy.leftKind) throw std::invalid_argument("metadata kind clashes with documents");
  for (int l = 1; l <= dp.numLevels(); ++l) m.hierarchy.leftCodeOffset.push_back(domainModel.hierarchy.codeOffset(l));
  m.sigma = fit.sigma;
  m.seed = seed;
  m.config = config;
  m.corpusHash = corpusHash(corpus);
  m.parentHash = modelHash(domainModel);
  m.parentConfigHash = configHash(domainModel.config);
  m.warnings = std::move(fit.warnings);
  int isolated = 0;
  for (int v = 0; v < graph->numNodes(Side::Left); ++v) isolated += graph->degree(Side::Left, v) == 0;
  if (isolated > 0) {
    m.warnings.push_back(std::to_string(isolated) + " documents have no '" + dimension + "' value");
  }
  return m;
}

std::vector<int> blockDocuments(const Corpus& corpus, const Model& model, BlockId block) {
  const NestedPartition& p = model.partition();
  const BipartiteGraph& g = model.graph();
  if (block.level < 1 || !p.contains(block)) throw std::invalid_argument("unknown block");
  std::unordered_map<std::string, int> corpusIndex;
  for (int i = 0; i < static_cast<int>(corpus.documents.size()); ++i) corpusIndex.emplace(corpus.documents[i].id, i);
  std::vector<char> in(g.numNodes(Side::Left), 0);
  const auto membership = p.nodeMembership(block.level, block.side);
  for (int v = 0; v < static_cast<int>(membership.size()); ++v) {
    if (membership[v] != block.index) continue;
    if (block.side == Side::Left) {
      in[v] = 1;
    } else {
      for (int u : g.neighbors(Side::Right, v)) in[u] = 1;
    }
  }
  std::vector<int> out;
  for (int u = 0; u < g.numNodes(Side::Left); ++u) {
    if (!in[u]) continue;
    auto it = corpusIndex.find(g.name(Side::Left, u));
    if (it != corpusIndex.end()) out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Corpus restrictCorpus(const Corpus& corpus, const Model& domainModel, const std::vector<Model>& chains,
                      const std::vector<std::string>& selectors) {
  if (selectors.empty()) throw std::invalid_argument("no block selected");
  const std::string parent = modelHash(domainModel);
  std::vector<char> all(corpus.documents.size(), 1);
  std::vector<char> any(corpus.documents.size(), 0);
  bool anySelector = false;
  std::string selector;
  std::string counts;
  for (const auto& code : selectors) {
    const BlockRef ref = parseBlockCode(code);
    const Model* source = nullptr;
    if (ref.kind == domainModel.hierarchy.leftKind || ref.kind == domainModel.hierarchy.rightKind) {
      source = &domainModel;
    } else {
      for (const auto& c : chains) {
        if (c.hierarchy.rightKind != ref.kind) continue;
        if (source != nullptr) throw std::invalid_argument("several chains provide " + code);
        if (c.parentHash != parent) throw std::invalid_argument("chain over '" + c.dimension + "' belongs to another model");
        source = &c;
      }
    }
    if (source == nullptr) throw std::invalid_argument("no model provides block " + code);
    const BlockId id = source->hierarchy.resolve(ref);
    const auto docs = blockDocuments(corpus, *source, id);
    counts += (counts.empty() ? "" : ", ") + code + ": " + std::to_string(docs.size());
    selector += (selector.empty() ? "" : ",") + code;
    std::vector<char> member(corpus.documents.size(), 0);
    for (int d : docs) member[d] = 1;
    if (id.side == Side::Left) {
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = all[i] && member[i];
    } else {
      anySelector = true;
      for (std::size_t i = 0; i < any.size(); ++i) any[i] = any[i] || member[i];
    }
  }
  std::vector<int> keep;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] && (!anySelector || any[i])) keep.push_back(static_cast<int>(i));
  }
  if (keep.empty()) throw std::invalid_argument("selection is empty (" + counts + ")");
  return subsetCorpus(corpus, keep, selector);
}

}  // namespace carto
