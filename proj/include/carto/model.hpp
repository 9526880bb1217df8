#pragma once

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "carto/corpus.hpp"
#include "carto/description_length.hpp"
#include "carto/fit.hpp"
#include "carto/partition.hpp"

namespace carto {

inline constexpr int kModelVersion = 1;

/// A fitted hierarchy with the provenance needed to reproduce it.
struct Model {
  std::string kind = "domain-topic";  // or "chained"
  std::string dimension;              // chained models only
  BlockHierarchy hierarchy;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  FitConfig config;
  std::string corpusHash;
  std::string parentHash;        // chained: hash of the domain-topic model
  std::string parentConfigHash;  // chained: config hash of the domain-topic model
  std::vector<std::string> warnings;

  const BipartiteGraph& graph() const { return *hierarchy.graph; }
  const NestedPartition& partition() const { return hierarchy.partition; }
  bool chained() const { return kind == "chained"; }
};

nlohmann::json fitConfigToJson(const FitConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
FitConfig fitConfigFromJson(const nlohmann::json& j, FitConfig base = {});
std::string configHash(const FitConfig& config);

/// Domain-topic fit of the corpus' document-term graph.
Model fitModel(const Corpus& corpus, const FitConfig& config, std::uint64_t seed);

nlohmann::json modelToJson(const Model& model);
/// Rebuilds the graph and hierarchy and checks the stored block statistics,
/// description length and hash. Throws std::invalid_argument on mismatch.
Model modelFromJson(const nlohmann::json& j);
std::string modelHash(const Model& model);

/// Pretty JSON text with a trailing newline; "-" means stdout/stdin.
void writeJson(const nlohmann::json& j, const std::string& path);
nlohmann::json readJson(const std::string& path);

}  // namespace carto
