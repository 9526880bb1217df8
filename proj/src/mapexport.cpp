#include "carto/mapexport.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <numeric>
#include <set>
#include <stdexcept>

namespace carto {
namespace {

constexpr int kTopMembers = 10;
const char* const kMissingBin = "(none)";

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(epoch));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool numeric(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> orderBins(std::set<std::string> values) {
  const bool hasMissing = values.erase(kMissingBin) > 0;
  std::vector<std::string> bins(values.begin(), values.end());
  double x = 0.0;
  if (std::all_of(bins.begin(), bins.end(), [&](const std::string& s) { return numeric(s, x); })) {
    std::stable_sort(bins.begin(), bins.end(), [](const std::string& a, const std::string& b) {
      double va = 0.0, vb = 0.0;
      numeric(a, va);
      numeric(b, vb);
      return va < vb;
    });
  }
  if (hasMissing) bins.push_back(kMissingBin);
  return bins;
}

std::string binOf(const Corpus* corpus, const std::string& id, const std::string& dimension) {
  const int d = corpus->findDocument(id);
  if (d < 0) return kMissingBin;
  const auto& meta = corpus->documents[d].meta;
  auto it = meta.find(dimension);
  if (it == meta.end() || it->second.empty()) return kMissingBin;
  return it->second.front();
}

std::vector<std::string> topMembers(const BlockHierarchy& h, BlockId block) {
  const auto membership = h.partition.nodeMembership(block.level, block.side);
  std::vector<int> nodes;
  for (int v = 0; v < static_cast<int>(membership.size()); ++v) {
    if (membership[v] == block.index) nodes.push_back(v);
  }
  std::stable_sort(nodes.begin(), nodes.end(),
                   [&](int a, int b) { return h.graph->degree(block.side, a) > h.graph->degree(block.side, b); });
  if (static_cast<int>(nodes.size()) > kTopMembers) nodes.resize(kTopMembers);
  std::vector<std::string> out;
  for (int v : nodes) out.push_back(h.graph->name(block.side, v));
  return out;
}

}  // namespace

double defaultRelevance(const BlockHierarchy& h, BlockId block) {
  const auto membership = h.partition.nodeMembership(block.level, block.side);
  if (block.side == Side::Left) {
    const auto n = std::count(membership.begin(), membership.end(), block.index);
    return membership.empty() ? 0.0 : static_cast<double>(n) / membership.size();
  }
  const std::int64_t edges = h.graph->numEdges();
  if (edges == 0) return 0.0;
  std::int64_t endpoints = 0;
  for (int v = 0; v < static_cast<int>(membership.size()); ++v) {
    if (membership[v] == block.index) endpoints += h.graph->degree(Side::Right, v);
  }
  return static_cast<double>(endpoints) / edges;
}

std::map<std::string, double> recolorMatrix(const MapBundle& bundle, const std::string& selected) {
  const auto& rows = bundle.rowCodes;
  const auto& cols = bundle.columnCodes;
  const auto r = std::find(rows.begin(), rows.end(), selected);
  const auto c = std::find(cols.begin(), cols.end(), selected);
  if (r == rows.end() && c == cols.end()) {
    throw std::invalid_argument(selected + " is not a level-1 block of this map");
  }
  const bool docSelected = r != rows.end();
  const int sel = docSelected ? static_cast<int>(r - rows.begin()) : static_cast<int>(c - cols.begin());
  const auto& targets = docSelected ? cols : rows;

  std::map<std::string, const MapBlock*> byCode;
  for (const auto& b : bundle.blocks) byCode[b.code] = &b;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> totals;  // code -> (e_{b,sel}, e_b)
  for (int i = 0; i < static_cast<int>(targets.size()); ++i) {
    std::int64_t withSel = 0, all = 0;
    for (int k = 0; k < static_cast<int>((docSelected ? rows : cols).size()); ++k) {
      const std::int64_t e = docSelected ? bundle.level1Matrix[k][i] : bundle.level1Matrix[i][k];
      all += e;
      if (k == sel) withSel = e;
    }
    for (std::string code = targets[i]; !code.empty(); code = byCode.at(code)->parentCode) {
      totals[code].first += withSel;
      totals[code].second += all;
    }
  }
  std::map<std::string, double> out;
  std::map<int, double> levelMax;
  for (const auto& [code, t] : totals) {
    const double v = t.second == 0 ? 0.0 : static_cast<double>(t.first) / t.second;
    out[code] = v;
    double& m = levelMax[byCode.at(code)->level];
    m = std::max(m, v);
  }
  for (auto& [code, v] : out) {
    const double m = levelMax[byCode.at(code)->level];
    v = m > 0.0 ? v / m : 0.0;
  }
  return out;
}

MapBundle buildBundle(const Model& model, const Model* chain, const Corpus* corpus, const ExportOptions& options) {
  if (model.chained()) throw std::invalid_argument("export needs the domain-topic model, not a chained model");
  if (chain) {
    if (!chain->chained()) throw std::invalid_argument("the chain artifact is not a chained model");
    if (chain->parentHash != modelHash(model)) {
      throw std::invalid_argument("chain over '" + chain->dimension + "' belongs to another model");
    }
  }
  if (corpus && corpusHash(*corpus) != model.corpusHash) {
    throw std::invalid_argument("corpus does not match the model (corpus hash differs)");
  }
  if (!corpus && (options.includeDocuments || !options.histogramDimension.empty())) {
    throw std::invalid_argument("documents and histogram need the corpus");
  }
  const BlockHierarchy& h = chain ? chain->hierarchy : model.hierarchy;
  const NestedPartition& p = h.partition;
  const int L = p.numLevels();

  MapBundle b;
  b.kind = chain ? "domain-chained" : "domain-topic";
  if (chain) b.dimension = chain->dimension;
  b.configHash = configHash(model.config);
  b.modelHash = modelHash(model);
  if (chain) b.chainHash = modelHash(*chain);
  b.corpusHash = model.corpusHash;
  b.generatedAt = timestamp();
  b.numDocuments = h.graph->numNodes(Side::Left);
  b.numTargets = h.graph->numNodes(Side::Right);
  b.numEdges = h.graph->numEdges();

  for (int l = 1; l <= L; ++l) {
    for (Side s : {Side::Left, Side::Right}) {
      const auto sizes = p.blockSizes(l, s);
      for (int i = 0; i < p.numBlocks(l, s); ++i) {
        const BlockId id{s, l, i};
        MapBlock m;
        m.code = h.code(id);
        m.side = s == Side::Left ? "doc" : chain ? "meta" : "term";
        m.level = l;
        if (l < L) m.parentCode = h.code({s, l + 1, p.parentOf(id)});
        m.size = sizes[i];
        m.defaultRelevance = defaultRelevance(h, id);
        if (s == Side::Right) m.topMembers = topMembers(h, id);
        b.blocks.push_back(std::move(m));
      }
    }
  }
  for (int i = 0; i < p.numBlocks(1, Side::Left); ++i) b.rowCodes.push_back(h.code({Side::Left, 1, i}));
  for (int i = 0; i < p.numBlocks(1, Side::Right); ++i) b.columnCodes.push_back(h.code({Side::Right, 1, i}));
  const CountMatrix cross = crossMatrix(*h.graph, p, 1, 1);
  b.level1Matrix.assign(cross.rows(), std::vector<std::int64_t>(cross.cols()));
  for (int i = 0; i < cross.rows(); ++i) {
    for (int j = 0; j < cross.cols(); ++j) b.level1Matrix[i][j] = cross(i, j);
  }

  const auto domainOf = p.nodeMembership(1, Side::Left);
  const std::string& dim = options.histogramDimension;
  if (!dim.empty()) {
    const auto dims = corpus->dimensions();
    if (std::find(dims.begin(), dims.end(), dim) == dims.end()) {
      std::string list;
      for (const auto& d : dims) list += (list.empty() ? "" : ", ") + d;
      throw std::invalid_argument("unknown dimension '" + dim + "'; available: " + list);
    }
    std::vector<std::string> values;
    for (int v = 0; v < b.numDocuments; ++v) values.push_back(binOf(corpus, h.graph->name(Side::Left, v), dim));
    MapHistogram hist;
    hist.dimensionName = dim;
    hist.orderedBins = orderBins({values.begin(), values.end()});
    std::map<std::string, int> binIndex;
    for (int i = 0; i < static_cast<int>(hist.orderedBins.size()); ++i) binIndex[hist.orderedBins[i]] = i;
    const std::vector<std::int64_t> zero(hist.orderedBins.size(), 0);
    for (const auto& code : b.rowCodes) hist.perLevel1Domain[code] = zero;
    hist.corpusTotals = zero;
    for (int v = 0; v < b.numDocuments; ++v) {
      const int bin = binIndex.at(values[v]);
      ++hist.perLevel1Domain[b.rowCodes[domainOf[v]]][bin];
      ++hist.corpusTotals[bin];
    }
    b.histogram = std::move(hist);
  }
  if (options.includeDocuments) {
    std::vector<MapDocument> docs;
    for (int v = 0; v < b.numDocuments; ++v) {
      MapDocument d;
      d.id = h.graph->name(Side::Left, v);
      const int k = corpus->findDocument(d.id);
      if (k >= 0) {
        d.title = corpus->documents[k].title;
        d.url = corpus->documents[k].url;
      }
      d.level1DomainCode = b.rowCodes[domainOf[v]];
      if (!dim.empty()) d.histogramValue = binOf(corpus, d.id, dim);
      docs.push_back(std::move(d));
    }
    b.documents = std::move(docs);
  }
  return b;
}

nlohmann::json bundleToJson(const MapBundle& b) {
  using nlohmann::json;
  json meta = {{"configHash", b.configHash}, {"modelHash", b.modelHash},     {"corpusHash", b.corpusHash},
               {"generatedAt", b.generatedAt}, {"documents", b.numDocuments}, {"targets", b.numTargets},
               {"edges", b.numEdges}};
  if (!b.chainHash.empty()) meta["chainHash"] = b.chainHash;
  if (!b.dimension.empty()) meta["dimension"] = b.dimension;
  json blocks = json::array();
  for (const auto& m : b.blocks) {
    json j = {{"code", m.code},
              {"side", m.side},
              {"level", m.level},
              {"parentCode", m.parentCode.empty() ? json(nullptr) : json(m.parentCode)},
              {"size", m.size},
              {"defaultRelevance", m.defaultRelevance}};
    if (m.side != "doc") j["topMembers"] = m.topMembers;
    blocks.push_back(std::move(j));
  }
  json out = {{"format", "carto-map"},
              {"version", kMapVersion},
              {"kind", b.kind},
              {"meta", meta},
              {"blocks", blocks},
              {"level1Matrix", {{"rows", b.rowCodes}, {"columns", b.columnCodes}, {"counts", b.level1Matrix}}}};
  if (b.documents) {
    json docs = json::array();
    for (const auto& d : *b.documents) {
      json j = {{"id", d.id}, {"title", d.title}, {"url", d.url}, {"level1DomainCode", d.level1DomainCode}};
      if (b.histogram) j["histogramValue"] = d.histogramValue;
      docs.push_back(std::move(j));
    }
    out["documents"] = std::move(docs);
  }
  if (b.histogram) {
    out["histogram"] = {{"dimensionName", b.histogram->dimensionName},
                        {"orderedBins", b.histogram->orderedBins},
                        {"perLevel1Domain", b.histogram->perLevel1Domain},
                        {"corpusTotals", b.histogram->corpusTotals}};
  }
  return out;
}

MapBundle bundleFromJson(const nlohmann::json& j) {
  if (j.value("format", "") != "carto-map") throw std::invalid_argument("not a map bundle");
  const int version = j.at("version").get<int>();
  if (version != kMapVersion) {
    throw std::invalid_argument("map bundle version " + std::to_string(version) + " is not supported (expected " +
                                std::to_string(kMapVersion) + ")");
  }
  MapBundle b;
  b.kind = j.at("kind").get<std::string>();
  const auto& meta = j.at("meta");
  b.configHash = meta.at("configHash").get<std::string>();
  b.modelHash = meta.at("modelHash").get<std::string>();
  b.chainHash = meta.value("chainHash", "");
  b.dimension = meta.value("dimension", "");
  b.corpusHash = meta.at("corpusHash").get<std::string>();
  b.generatedAt = meta.at("generatedAt").get<std::string>();
  b.numDocuments = meta.at("documents").get<int>();
  b.numTargets = meta.at("targets").get<int>();
  b.numEdges = meta.at("edges").get<std::int64_t>();
  for (const auto& x : j.at("blocks")) {
    MapBlock m;
    m.code = x.at("code").get<std::string>();
    m.side = x.at("side").get<std::string>();
    m.level = x.at("level").get<int>();
    if (!x.at("parentCode").is_null()) m.parentCode = x.at("parentCode").get<std::string>();
    m.size = x.at("size").get<int>();
    m.defaultRelevance = x.at("defaultRelevance").get<double>();
    if (x.contains("topMembers")) m.topMembers = x.at("topMembers").get<std::vector<std::string>>();
    b.blocks.push_back(std::move(m));
  }
  const auto& mat = j.at("level1Matrix");
  b.rowCodes = mat.at("rows").get<std::vector<std::string>>();
  b.columnCodes = mat.at("columns").get<std::vector<std::string>>();
  b.level1Matrix = mat.at("counts").get<std::vector<std::vector<std::int64_t>>>();
  if (j.contains("histogram")) {
    const auto& x = j.at("histogram");
    MapHistogram hist;
    hist.dimensionName = x.at("dimensionName").get<std::string>();
    hist.orderedBins = x.at("orderedBins").get<std::vector<std::string>>();
    hist.perLevel1Domain = x.at("perLevel1Domain").get<std::map<std::string, std::vector<std::int64_t>>>();
    hist.corpusTotals = x.at("corpusTotals").get<std::vector<std::int64_t>>();
    b.histogram = std::move(hist);
  }
  if (j.contains("documents")) {
    std::vector<MapDocument> docs;
    for (const auto& x : j.at("documents")) {
      docs.push_back({x.at("id").get<std::string>(), x.at("title").get<std::string>(), x.at("url").get<std::string>(),
                      x.at("level1DomainCode").get<std::string>(), x.value("histogramValue", "")});
    }
    b.documents = std::move(docs);
  }
  return b;
}

std::vector<std::string> validateBundle(const MapBundle& b) {
  std::vector<std::string> problems;
  auto fail = [&](std::string msg) { problems.push_back(std::move(msg)); };
  if (b.kind != "domain-topic" && b.kind != "domain-chained") fail("unknown kind '" + b.kind + "'");
  const std::string target = b.kind == "domain-chained" ? "meta" : "term";

  std::map<std::string, const MapBlock*> byCode;
  int top = 0;
  for (const auto& m : b.blocks) {
    if (!byCode.emplace(m.code, &m).second) fail("duplicate block " + m.code);
    top = std::max(top, m.level);
    if (m.side != "doc" && m.side != target) fail(m.code + ": side '" + m.side + "' does not belong in a " + b.kind + " map");
    if (!(m.defaultRelevance >= 0.0 && m.defaultRelevance <= 1.0 + 1e-12)) fail(m.code + ": relevance outside [0, 1]");
  }
  std::map<std::string, std::int64_t> childSizes;
  std::map<std::string, int> roots;
  for (const auto& m : b.blocks) {
    if (m.level == top) {
      if (!m.parentCode.empty()) fail(m.code + ": top-level block has a parent");
      ++roots[m.side];
      const int expected = m.side == "doc" ? b.numDocuments : b.numTargets;
      if (m.size != expected) fail(m.code + ": root size " + std::to_string(m.size) + " != " + std::to_string(expected));
      continue;
    }
    auto it = byCode.find(m.parentCode);
    if (m.parentCode.empty() || it == byCode.end()) {
      fail(m.code + ": missing parent");
      continue;
    }
    const MapBlock& parent = *it->second;
    if (parent.side != m.side || parent.level != m.level + 1) fail(m.code + ": parent " + parent.code + " is not one level up on its side");
    childSizes[parent.code] += m.size;
  }
  for (const auto& [side, n] : roots) {
    if (n != 1) fail(std::to_string(n) + " roots on side " + side);
  }
  for (const auto& m : b.blocks) {
    if (m.level > 1 && childSizes[m.code] != m.size) fail(m.code + ": children sizes do not sum to the block size");
  }

  auto level1 = [&](const std::string& side) {
    std::vector<std::string> codes;
    for (const auto& m : b.blocks) {
      if (m.level == 1 && m.side == side) codes.push_back(m.code);
    }
    return codes;
  };
  if (b.rowCodes != level1("doc")) fail("matrix rows do not list the level-1 doc blocks");
  if (b.columnCodes != level1(target)) fail("matrix columns do not list the level-1 " + target + " blocks");
  std::int64_t total = 0;
  bool shaped = b.level1Matrix.size() == b.rowCodes.size();
  for (const auto& row : b.level1Matrix) {
    shaped = shaped && row.size() == b.columnCodes.size();
    for (auto e : row) {
      if (e < 0) fail("negative matrix entry");
      total += e;
    }
  }
  if (!shaped) fail("matrix shape does not match its codes");
  if (total != b.numEdges) fail("matrix sums to " + std::to_string(total) + ", expected " + std::to_string(b.numEdges));

  if (b.histogram) {
    const auto& hist = *b.histogram;
    const std::size_t bins = hist.orderedBins.size();
    std::vector<std::int64_t> sums(bins, 0);
    if (hist.corpusTotals.size() != bins) fail("histogram totals do not match the bins");
    for (const auto& code : b.rowCodes) {
      auto it = hist.perLevel1Domain.find(code);
      if (it == hist.perLevel1Domain.end() || it->second.size() != bins) {
        fail("histogram lacks domain " + code);
        continue;
      }
      const std::int64_t n = std::accumulate(it->second.begin(), it->second.end(), std::int64_t{0});
      if (byCode.count(code) && n != byCode.at(code)->size) fail("histogram counts of " + code + " do not sum to its size");
      for (std::size_t i = 0; i < bins; ++i) sums[i] += it->second[i];
    }
    if (hist.perLevel1Domain.size() != b.rowCodes.size()) fail("histogram lists unknown domains");
    if (sums != hist.corpusTotals) fail("histogram totals differ from the per-domain counts");
  }
  if (b.documents) {
    if (static_cast<int>(b.documents->size()) != b.numDocuments) fail("document list does not cover every document");
    std::map<std::string, int> perDomain;
    for (const auto& d : *b.documents) ++perDomain[d.level1DomainCode];
    for (const auto& [code, n] : perDomain) {
      auto it = byCode.find(code);
      if (it == byCode.end() || it->second->side != "doc" || it->second->level != 1) {
        fail("document domain " + code + " is not a level-1 doc block");
      } else if (it->second->size != n) {
        fail(code + ": document list holds " + std::to_string(n) + " members, size is " + std::to_string(it->second->size));
      }
    }
  }
  return problems;
}

std::string exportMap(const Model& model, const Model* chain, const Corpus* corpus, const ExportOptions& options,
                      const std::string& outDir) {
  const MapBundle bundle = buildBundle(model, chain, corpus, options);
  std::filesystem::create_directories(outDir);
  const std::string path = (std::filesystem::path(outDir) / "map.json").string();
  writeJson(bundleToJson(bundle), path);
  return path;
}

}  // namespace carto
