#include "carto/model.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "carto/hash.hpp"

namespace carto {
namespace {

nlohmann::json sideStats(const BipartiteGraph& graph, const NestedPartition& p, int level, Side s) {
  const auto membership = p.nodeMembership(level, s);
  std::vector<int> n(p.numBlocks(level, s), 0);
  std::vector<std::int64_t> e(p.numBlocks(level, s), 0);
  for (int v = 0; v < static_cast<int>(membership.size()); ++v) {
    ++n[membership[v]];
    e[membership[v]] += graph.degree(s, v);
  }
  return {{"n", n}, {"e", e}};
}

std::string kindString(BlockKind k) { return std::string(1, static_cast<char>(k)); }

BlockKind kindFromJson(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  if (s.size() != 1) throw std::invalid_argument("block kind must be one letter");
  return parseBlockKind(s[0]);
}

}  // namespace

nlohmann::json fitConfigToJson(const FitConfig& c) {
  return {{"seeds", c.seeds},
          {"sigmaShrink", c.sigmaShrink},
          {"patience", c.patience},
          {"epsilonExplore", c.epsilonExplore},
          {"greedy", c.greedy},
          {"betaSchedule", c.betaSchedule},
          {"mergeCandidates", c.mergeCandidates},
          {"sweepsPerShrink", c.sweepsPerShrink},
          {"maxPasses", c.maxPasses}};
}

FitConfig fitConfigFromJson(const nlohmann::json& j, FitConfig c) {
  if (!j.is_object()) throw std::invalid_argument("fit config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "seeds") c.seeds = value.get<int>();
    else if (key == "sigmaShrink") c.sigmaShrink = value.get<double>();
    else if (key == "patience") c.patience = value.get<int>();
    else if (key == "epsilonExplore") c.epsilonExplore = value.get<double>();
    else if (key == "greedy") c.greedy = value.get<bool>();
    else if (key == "betaSchedule") c.betaSchedule = value.get<std::vector<double>>();
    else if (key == "mergeCandidates") c.mergeCandidates = value.get<int>();
    else if (key == "sweepsPerShrink") c.sweepsPerShrink = value.get<int>();
    else if (key == "maxPasses") c.maxPasses = value.get<int>();
    else if (key == "threads") c.threads = value.get<int>();
    else throw std::invalid_argument("unknown fit config key '" + key + "'");
  }
  c.validate();
  return c;
}

std::string configHash(const FitConfig& config) { return sha256Hex(fitConfigToJson(config).dump()); }

Model fitModel(const Corpus& corpus, const FitConfig& config, std::uint64_t seed) {
  auto graph = std::make_shared<const BipartiteGraph>(buildDocTermGraph(corpus));
  FitResult fit = fitHierarchy(graph, config, seed);
  Model m;
  m.hierarchy.graph = graph;
  m.hierarchy.partition = std::move(fit.partition);
  m.sigma = fit.sigma;
  m.seed = seed;
  m.config = config;
  m.corpusHash = corpusHash(corpus);
  m.warnings = std::move(fit.warnings);
  return m;
}

nlohmann::json modelToJson(const Model& m) {
  const BipartiteGraph& g = m.graph();
  const NestedPartition& p = m.partition();
  nlohmann::json adjacency = nlohmann::json::array();
  for (int v = 0; v < g.numNodes(Side::Left); ++v) {
    const auto nb = g.neighbors(Side::Left, v);
    adjacency.push_back(std::vector<int>(nb.begin(), nb.end()));
  }
  nlohmann::json levels = nlohmann::json::array();
  for (int l = 1; l <= p.numLevels(); ++l) {
    levels.push_back({{"left", p.assignment(l, Side::Left)},
                      {"right", p.assignment(l, Side::Right)},
                      {"stats",
                       {{"left", sideStats(g, p, l, Side::Left)}, {"right", sideStats(g, p, l, Side::Right)}}}});
  }
  const auto terms = descriptionLengthTerms(g, p);
  nlohmann::json j = {{"format", "carto-model"},
                      {"version", kModelVersion},
                      {"kind", m.kind},
                      {"seed", m.seed},
                      {"config", fitConfigToJson(m.config)},
                      {"configHash", configHash(m.config)},
                      {"upstream", {{"corpus", m.corpusHash}}},
                      {"kinds", {{"left", kindString(m.hierarchy.leftKind)}, {"right", kindString(m.hierarchy.rightKind)}}},
                      {"graph", {{"left", g.names(Side::Left)}, {"right", g.names(Side::Right)}, {"adjacency", adjacency}}},
                      {"levels", levels},
                      {"descriptionLength", m.sigma},
                      {"descriptionLengthTerms",
                       {{"edgePlacement", terms.edgePlacement},
                        {"degrees", terms.degrees},
                        {"blockEdges", terms.blockEdges},
                        {"partitions", terms.partitions}}}};
  if (m.chained()) {
    j["dimension"] = m.dimension;
    j["upstream"]["model"] = m.parentHash;
    j["upstream"]["modelConfigHash"] = m.parentConfigHash;
  }
  if (!m.hierarchy.leftCodeOffset.empty()) j["leftCodeOffset"] = m.hierarchy.leftCodeOffset;
  j["hash"] = contentHash(j);
  return j;
}

Model modelFromJson(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "carto-model") throw std::invalid_argument("not a model artifact");
  const int version = j.value("version", 0);
  if (version != kModelVersion) {
    throw std::invalid_argument("model artifact version " + std::to_string(version) + " is not supported (expected " +
                                std::to_string(kModelVersion) + ")");
  }
  if (j.value("hash", std::string()) != contentHash(j)) throw std::invalid_argument("model artifact hash mismatch");

  Model m;
  m.kind = j.at("kind").get<std::string>();
  if (m.kind != "domain-topic" && m.kind != "chained") throw std::invalid_argument("unknown model kind " + m.kind);
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config = fitConfigFromJson(j.at("config"));
  if (configHash(m.config) != j.at("configHash").get<std::string>()) {
    throw std::invalid_argument("model config hash mismatch");
  }
  m.corpusHash = j.at("upstream").at("corpus").get<std::string>();
  if (m.chained()) {
    m.dimension = j.at("dimension").get<std::string>();
    m.parentHash = j.at("upstream").at("model").get<std::string>();
    m.parentConfigHash = j.at("upstream").at("modelConfigHash").get<std::string>();
  }
  m.hierarchy.leftKind = kindFromJson(j.at("kinds").at("left"));
  m.hierarchy.rightKind = kindFromJson(j.at("kinds").at("right"));
  if (j.contains("leftCodeOffset")) m.hierarchy.leftCodeOffset = j.at("leftCodeOffset").get<std::vector<int>>();

  const auto& gj = j.at("graph");
  auto left = gj.at("left").get<std::vector<std::string>>();
  auto right = gj.at("right").get<std::vector<std::string>>();
  const auto& adjacency = gj.at("adjacency");
  if (adjacency.size() != left.size()) throw std::invalid_argument("adjacency size does not match the documents");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < adjacency.size(); ++u) {
    for (int v : adjacency[u].get<std::vector<int>>()) edges.emplace_back(static_cast<int>(u), v);
  }
  auto graph = std::make_shared<const BipartiteGraph>(std::move(left), std::move(right), std::move(edges));

  std::vector<LevelAssignment> levels;
  for (const auto& lj : j.at("levels")) {
    levels.push_back({lj.at("left").get<std::vector<int>>(), lj.at("right").get<std::vector<int>>()});
  }
  NestedPartition p(graph->numNodes(Side::Left), graph->numNodes(Side::Right), std::move(levels));
  for (int l = 1; l <= p.numLevels(); ++l) {
    const auto& stats = j.at("levels")[l - 1].at("stats");
    if (stats.at("left") != sideStats(*graph, p, l, Side::Left) ||
        stats.at("right") != sideStats(*graph, p, l, Side::Right)) {
      throw std::invalid_argument("block statistics at level " + std::to_string(l) +
                                  " do not match the assignments");
    }
  }
  if (!m.hierarchy.leftCodeOffset.empty() && static_cast<int>(m.hierarchy.leftCodeOffset.size()) != p.numLevels()) {
    throw std::invalid_argument("leftCodeOffset must have one entry per level");
  }
  m.sigma = j.at("descriptionLength").get<double>();
  const double recomputed = descriptionLength(*graph, p);
  if (std::abs(recomputed - m.sigma) > 1e-9 * std::max(1.0, std::abs(m.sigma))) {
    throw std::invalid_argument("stored description length does not match the assignments");
  }
  m.hierarchy.graph = std::move(graph);
  m.hierarchy.partition = std::move(p);
  return m;
}

std::string modelHash(const Model& model) { return modelToJson(model).at("hash").get<std::string>(); }

void writeJson(const nlohmann::json& j, const std::string& path) {
  const std::string text = j.dump(1) + "\n";
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

nlohmann::json readJson(const std::string& path) {
  if (path == "-") return nlohmann::json::parse(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return nlohmann::json::parse(in);
}

}  // namespace carto
