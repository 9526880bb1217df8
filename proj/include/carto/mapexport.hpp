#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carto/corpus.hpp"
#include "carto/model.hpp"

namespace carto {

inline constexpr int kMapVersion = 1;

struct MapBlock {
  std::string code;
  std::string side;  // doc, term or meta
  int level = 1;
  std::string parentCode;  // empty for the roots
  int size = 0;            // member nodes
  double defaultRelevance = 0.0;
  std::vector<std::string> topMembers;  // term and meta blocks: most linked members first

  bool operator==(const MapBlock&) const = default;
};

struct MapDocument {
  std::string id;
  std::string title;
  std::string url;
  std::string level1DomainCode;
  std::string histogramValue;

  bool operator==(const MapDocument&) const = default;
};

struct MapHistogram {
  std::string dimensionName;
  std::vector<std::string> orderedBins;
  std::map<std::string, std::vector<std::int64_t>> perLevel1Domain;
  std::vector<std::int64_t> corpusTotals;

  bool operator==(const MapHistogram&) const = default;
};

struct MapBundle {
  std::string kind = "domain-topic";  // or "domain-chained"
  std::string dimension;              // chained bundles only
  std::string configHash;
  std::string modelHash;
  std::string chainHash;
  std::string corpusHash;
  std::string generatedAt;
  int numDocuments = 0;
  int numTargets = 0;
  std::int64_t numEdges = 0;
  std::vector<MapBlock> blocks;
  std::vector<std::string> rowCodes;     // level-1 doc blocks
  std::vector<std::string> columnCodes;  // level-1 term or meta blocks
  std::vector<std::vector<std::int64_t>> level1Matrix;
  std::optional<std::vector<MapDocument>> documents;
  std::optional<MapHistogram> histogram;

  bool operator==(const MapBundle&) const = default;
};

/// Documents of a doc block over N; edge endpoints of a term or meta block
/// over E.
double defaultRelevance(const BlockHierarchy& h, BlockId block);

/// Intensity of every opposite-side block for the level-1 block `selected`:
/// e_{b,sel} / e_b aggregated over the level-1 descendants of b, divided by
/// the largest value of its level. All zero when `selected` has no edges.
std::map<std::string, double> recolorMatrix(const MapBundle& bundle, const std::string& selected);

struct ExportOptions {
  std::string histogramDimension;  // empty: no histogram
  bool includeDocuments = true;
};

/// Bundle of a domain-topic model, or of a domain-chained model when `chain`
/// is given. `corpus` is required for documents and the histogram.
MapBundle buildBundle(const Model& model, const Model* chain, const Corpus* corpus, const ExportOptions& options);

nlohmann::json bundleToJson(const MapBundle& bundle);
MapBundle bundleFromJson(const nlohmann::json& j);

/// Problems found in a bundle; empty when it reconciles.
std::vector<std::string> validateBundle(const MapBundle& bundle);

/// Writes outDir/map.json and returns its path.
std::string exportMap(const Model& model, const Model* chain, const Corpus* corpus, const ExportOptions& options,
                      const std::string& outDir);

/// Static file server over `dir`.
class MapServer {
 public:
  /// Binds immediately; port 0 picks a free port. Throws std::runtime_error
  /// for a missing directory or a busy port.
  MapServer(const std::string& dir, const std::string& host, int port);
  ~MapServer();
  MapServer(const MapServer&) = delete;
  MapServer& operator=(const MapServer&) = delete;

  int port() const { return port_; }
  /// Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace carto
