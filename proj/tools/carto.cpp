#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "carto/chained.hpp"
#include "carto/hash.hpp"
#include "carto/mapexport.hpp"
#include "carto/measures.hpp"
#include "carto/model.hpp"
#include "carto/report.hpp"

using namespace carto;
using nlohmann::json;

namespace {

void logEvent(const std::string& command, json fields) {
  json j = {{"event", "run"}, {"command", command}};
  j.update(fields);
  std::cerr << j.dump() << "\n";
}

std::uint64_t resolveSeed(std::optional<std::uint64_t>& seed) {
  if (!seed) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
  return *seed;
}

std::string readText(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeText(const std::string& text, const std::string& path) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v < 0 ? "-Infinity" : "Infinity";
  return v;
}

std::string csvNumber(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Model loadModel(const std::string& path) { return modelFromJson(readJson(path)); }

Model loadChain(const std::string& path, const Model* parent) {
  Model c = loadModel(path);
  if (!c.chained()) throw std::invalid_argument("'" + path + "' is not a chained model");
  if (parent && c.parentHash != modelHash(*parent)) {
    throw std::invalid_argument("chain '" + path + "' belongs to another model (parent hash mismatch)");
  }
  return c;
}

void addFitOptions(CLI::App* sub, FitConfig& c) {
  sub->add_option("--chains", c.seeds, "Independent search chains; the best is kept")->capture_default_str();
  sub->add_option("--patience", c.patience, "Refinement passes without improvement before stopping")->capture_default_str();
  sub->add_option("--epsilon", c.epsilonExplore, "Probability of a uniform move proposal")->capture_default_str();
  sub->add_option("--sigma-shrink", c.sigmaShrink, "Block-count divisor per agglomeration step")->capture_default_str();
  sub->add_option("--merge-candidates", c.mergeCandidates, "Sampled merge targets per block")->capture_default_str();
  sub->add_option("--sweeps-per-shrink", c.sweepsPerShrink, "Sweeps after each agglomeration step")->capture_default_str();
  sub->add_option("--max-passes", c.maxPasses, "Hard cap on refinement passes")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: CARTO_THREADS or all cores)")->capture_default_str();
}

struct Validation {
  json artifacts = json::array();
  std::vector<std::string> problems;
};

Validation validateArtifacts(const std::vector<std::string>& paths) {
  Validation v;
  std::map<std::string, std::string> corpora;  // hash -> path
  std::map<std::string, std::string> models;
  std::vector<std::pair<std::string, Corpus>> corpusList;
  std::vector<std::pair<std::string, Model>> modelList;
  std::vector<std::pair<std::string, MapBundle>> maps;
  for (const auto& path : paths) {
    json entry = {{"path", path}};
    try {
      const json j = readJson(path);
      const std::string format = j.value("format", "");
      entry["format"] = format;
      if (format == "carto-corpus") {
        Corpus c = corpusFromJson(j);
        entry["hash"] = corpusHash(c);
        corpora[corpusHash(c)] = path;
        corpusList.emplace_back(path, std::move(c));
      } else if (format == "carto-model") {
        Model m = modelFromJson(j);
        entry["hash"] = modelHash(m);
        entry["kind"] = m.kind;
        models[modelHash(m)] = path;
        modelList.emplace_back(path, std::move(m));
      } else if (format == "carto-map") {
        MapBundle b = bundleFromJson(j);
        for (const auto& p : validateBundle(b)) v.problems.push_back(path + ": " + p);
        maps.emplace_back(path, std::move(b));
      } else {
        throw std::invalid_argument("unknown artifact format '" + format + "'");
      }
      entry["status"] = "ok";
    } catch (const std::exception& e) {
      entry["status"] = "invalid";
      v.problems.push_back(path + ": " + e.what());
    }
    v.artifacts.push_back(std::move(entry));
  }
  auto link = [&](const std::string& path, const std::string& what, const std::string& hash,
                  const std::map<std::string, std::string>& known, bool anySupplied) {
    if (hash.empty()) return;
    if (known.count(hash)) return;
    if (anySupplied) v.problems.push_back(path + ": upstream " + what + " " + hash.substr(0, 12) + " is not among the supplied artifacts");
  };
  for (const auto& [path, c] : corpusList) {
    if (!c.selector.empty()) link(path, "corpus", c.source, corpora, false);
  }
  for (const auto& [path, m] : modelList) {
    link(path, "corpus", m.corpusHash, corpora, !corpora.empty());
    if (m.chained()) {
      bool domainSupplied = false;
      for (const auto& [p2, other] : modelList) domainSupplied = domainSupplied || !other.chained();
      link(path, "model", m.parentHash, models, domainSupplied);
    }
  }
  for (const auto& [path, b] : maps) {
    link(path, "model", b.modelHash, models, !models.empty());
    link(path, "chain", b.chainHash, models, !b.chainHash.empty() && models.size() > 1);
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carto: domain-topic maps of document corpora"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  std::optional<std::uint64_t> seed;
  std::string output = "-";
  app.add_option("--seed", seed, "Random seed; generated and logged when omitted");
  app.add_option("-o,--output", output, "Output file ('-' for stdout) or directory for export");

  std::function<void()> action;
  std::string command;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  // ingest
  std::string input = "-";
  CorpusConfig corpusConfig;
  bool keepCase = false;
  bool noBigrams = false;
  {
    CLI::App* s = sub("ingest", "Build a corpus artifact from JSONL documents");
    s->add_option("-i,--input", input, "JSONL file, one document per line ('-' for stdin)")->capture_default_str();
    s->add_flag("--keep-case", keepCase, "Do not lowercase tokens");
    s->add_option("--joiners", corpusConfig.tokenizer.joiners, "Characters kept inside tokens")->capture_default_str();
    s->add_flag("--no-bigrams", noBigrams, "Skip bigram detection");
    s->add_option("--bigram-delta", corpusConfig.bigrams.delta, "Discount in the bigram score")->capture_default_str();
    s->add_option("--bigram-min-count", corpusConfig.bigrams.minCount, "Minimum bigram count")->capture_default_str();
    s->add_option("--bigram-threshold", corpusConfig.bigrams.threshold, "Minimum bigram score")->capture_default_str();
    s->add_option("--min-df", corpusConfig.minDf, "Keep terms in at least this many documents")->capture_default_str();
    s->add_option("--max-df", corpusConfig.maxDf, "Keep terms in at most this fraction of documents")->capture_default_str();
    s->callback([&] {
      command = "ingest";
      action = [&] {
        corpusConfig.tokenizer.lowercase = !keepCase;
        corpusConfig.bigrams.enabled = !noBigrams;
        const std::string text = readText(input);
        std::istringstream in(text);
        const Corpus c = buildCorpus(readJsonl(in), corpusConfig, sha256Hex(text));
        for (const auto& w : c.warnings) std::cerr << json{{"event", "warning"}, {"message", w}}.dump() << "\n";
        writeJson(corpusToJson(c), output);
        logEvent("ingest", {{"configHash", sha256Hex(corpusConfig.toJson().dump())},
                            {"documents", c.documents.size()},
                            {"terms", c.vocabulary.size()},
                            {"corpusHash", corpusHash(c)}});
      };
    });
  }

  // fit
  std::string corpusPath = "-";
  FitConfig fitConfig;
  {
    CLI::App* s = sub("fit", "Fit the domain-topic model of a corpus");
    s->add_option("-c,--corpus", corpusPath, "Corpus artifact ('-' for stdin)")->capture_default_str();
    addFitOptions(s, fitConfig);
    s->callback([&] {
      command = "fit";
      action = [&] {
        const std::uint64_t sd = resolveSeed(seed);
        logEvent("fit", {{"seed", sd}, {"configHash", configHash(fitConfig)}});
        const Corpus c = corpusFromJson(readJson(corpusPath));
        const Model m = fitModel(c, fitConfig, sd);
        for (const auto& w : m.warnings) std::cerr << json{{"event", "warning"}, {"message", w}}.dump() << "\n";
        writeJson(modelToJson(m), output);
        logEvent("fit", {{"seed", sd}, {"configHash", configHash(fitConfig)}, {"levels", m.partition().numLevels()},
                         {"sigma", m.sigma}, {"modelHash", modelHash(m)}});
      };
    });
  }

  // chain
  std::string modelPath;
  std::string dimension;
  std::string kindCode;
  {
    CLI::App* s = sub("chain", "Fit a metadata dimension against the frozen document hierarchy");
    s->add_option("-m,--model", modelPath, "Domain-topic model artifact")->required();
    s->add_option("-c,--corpus", corpusPath, "Corpus artifact holding the metadata")->required();
    s->add_option("-d,--dimension", dimension, "Metadata dimension, e.g. year")->required();
    s->add_option("--kind", kindCode, "Block kind letter (P or M); derived from the dimension by default");
    addFitOptions(s, fitConfig);
    s->callback([&] {
      command = "chain";
      action = [&] {
        const std::uint64_t sd = resolveSeed(seed);
        logEvent("chain", {{"seed", sd}, {"configHash", configHash(fitConfig)}, {"dimension", dimension}});
        const Model m = loadModel(modelPath);
        const Corpus c = corpusFromJson(readJson(corpusPath));
        std::optional<BlockKind> kind;
        if (!kindCode.empty()) {
          if (kindCode.size() != 1) throw std::invalid_argument("--kind takes a single letter");
          kind = parseBlockKind(kindCode[0]);
        }
        const Model chain = chainFit(m, c, dimension, fitConfig, sd, kind);
        for (const auto& w : chain.warnings) std::cerr << json{{"event", "warning"}, {"message", w}}.dump() << "\n";
        writeJson(modelToJson(chain), output);
        logEvent("chain", {{"seed", sd}, {"configHash", configHash(fitConfig)}, {"levels", chain.partition().numLevels()},
                           {"sigma", chain.sigma}, {"modelHash", modelHash(chain)}});
      };
    });
  }

  // measure
  std::string chainPath;
  std::string blockCodeArg;
  int targetLevel = 1;
  std::string format = "json";
  {
    CLI::App* s = sub("measure", "Usage, specificity and commonality of one block");
    s->add_option("-m,--model", modelPath, "Domain-topic model artifact")->required();
    s->add_option("--chain", chainPath, "Chained model; targets become its metadata blocks");
    s->add_option("-b,--block", blockCodeArg, "Block code, e.g. L3D44 or L2P1")->required();
    s->add_option("--target-level", targetLevel, "1: level-1 blocks, 0: individual terms or values")
        ->check(CLI::Range(0, 1))
        ->capture_default_str();
    s->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    s->callback([&] {
      command = "measure";
      action = [&] {
        const Model m = loadModel(modelPath);
        std::optional<Model> chain;
        if (!chainPath.empty()) chain = loadChain(chainPath, &m);
        const BlockHierarchy& h = chain ? chain->hierarchy : m.hierarchy;
        logEvent("measure", {{"seed", m.seed}, {"configHash", configHash(m.config)}, {"block", blockCodeArg}});
        const BlockId id = h.resolve(blockCodeArg);
        const BlockMeasures bm = measureBlock(h, id, targetLevel);
        const Side target = opposite(id.side);
        auto targetCode = [&](int t) { return targetLevel == 1 ? h.code({target, 1, t}) : h.graph->name(target, t); };
        if (format == "csv") {
          std::ostringstream os;
          os << "blockCode,targetCode,usage,specificity,commonalityRaw,commonality\n";
          for (int t = 0; t < static_cast<int>(bm.usage.size()); ++t) {
            os << blockCodeArg << "," << targetCode(t) << "," << csvNumber(bm.usage[t]) << ","
               << (bm.specificity.empty() ? "" : csvNumber(bm.specificity[t])) << ","
               << (bm.commonalityRaw.empty() ? "" : csvNumber(bm.commonalityRaw[t])) << ","
               << (bm.commonality.empty() ? "" : csvNumber(bm.commonality[t])) << "\n";
          }
          writeText(os.str(), output);
          return;
        }
        json rows = json::array();
        for (int t = 0; t < static_cast<int>(bm.usage.size()); ++t) {
          rows.push_back({{"blockCode", blockCodeArg},
                          {"targetCode", targetCode(t)},
                          {"usage", number(bm.usage[t])},
                          {"specificity", bm.specificity.empty() ? json(nullptr) : number(bm.specificity[t])},
                          {"commonalityRaw", bm.commonalityRaw.empty() ? json(nullptr) : number(bm.commonalityRaw[t])},
                          {"commonality", bm.commonality.empty() ? json(nullptr) : number(bm.commonality[t])}});
        }
        writeJson({{"format", "carto-measures"}, {"version", 1}, {"block", blockCodeArg}, {"targetLevel", targetLevel},
                   {"rows", rows}},
                  output);
      };
    });
  }

  // table
  {
    CLI::App* s = sub("table", "Domain-topic table of a block with subblocks");
    s->add_option("-m,--model", modelPath, "Domain-topic model artifact")->required();
    s->add_option("--chain", chainPath, "Chained model; targets become its metadata blocks");
    s->add_option("-b,--block,--domain", blockCodeArg, "Focus block code (level 2 or above)")->required();
    s->add_option("--format", format, "md, csv or json")->check(CLI::IsMember({"md", "csv", "json"}));
    s->callback([&] {
      command = "table";
      action = [&] {
        const Model m = loadModel(modelPath);
        std::optional<Model> chain;
        if (!chainPath.empty()) chain = loadChain(chainPath, &m);
        const BlockHierarchy& h = chain ? chain->hierarchy : m.hierarchy;
        logEvent("table", {{"seed", m.seed}, {"configHash", configHash(m.config)}, {"block", blockCodeArg}});
        const Table t = domainTopicTable(h, h.resolve(blockCodeArg));
        if (format == "md") writeText(tableMarkdown(t), output);
        else if (format == "csv") writeText(tableCsv(t), output);
        else writeJson(tableJson(t), output);
      };
    });
  }

  // shift
  std::vector<std::string> periods;
  int onlyLevel = 0;
  {
    CLI::App* s = sub("shift", "Prevalence shift of every domain between two periods");
    s->add_option("-m,--model", modelPath, "Domain-topic model artifact (checked against the chain)");
    s->add_option("--chain", chainPath, "Chained model over a time-like dimension")->required();
    s->add_option("--periods", periods, "Two period codes, e.g. L2P1,L2P2")->delimiter(',')->expected(2)->required();
    s->add_option("--level", onlyLevel, "Only domains of this level (0: all)");
    s->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->callback([&] {
      command = "shift";
      action = [&] {
        std::optional<Model> m;
        if (!modelPath.empty()) m = loadModel(modelPath);
        const Model chain = loadChain(chainPath, m ? &*m : nullptr);
        const BlockHierarchy& h = chain.hierarchy;
        logEvent("shift", {{"seed", chain.seed}, {"configHash", configHash(chain.config)}, {"periods", periods}});
        const auto rows = prevalenceShift(h, h.resolve(periods[0]), h.resolve(periods[1]));
        if (format == "csv") {
          std::ostringstream os;
          os << "domainCode,level,prevalenceA,prevalenceB,shift,colorScore\n";
          for (const auto& r : rows) {
            if (onlyLevel && r.domain.level != onlyLevel) continue;
            os << h.code(r.domain) << "," << r.domain.level << "," << csvNumber(r.prevalenceA) << ","
               << csvNumber(r.prevalenceB) << "," << csvNumber(r.shift) << "," << csvNumber(r.colorScore) << "\n";
          }
          writeText(os.str(), output);
          return;
        }
        json out = json::array();
        for (const auto& r : rows) {
          if (onlyLevel && r.domain.level != onlyLevel) continue;
          out.push_back({{"domainCode", h.code(r.domain)},
                         {"level", r.domain.level},
                         {"prevalenceA", r.prevalenceA},
                         {"prevalenceB", r.prevalenceB},
                         {"shift", r.shift},
                         {"colorScore", r.colorScore}});
        }
        writeJson({{"format", "carto-shift"}, {"version", 1}, {"periodA", periods[0]}, {"periodB", periods[1]},
                   {"rows", out}},
                  output);
      };
    });
  }

  // subcorpus
  std::vector<std::string> chainPaths;
  std::vector<std::string> selectors;
  {
    CLI::App* s = sub("subcorpus", "Documents inside the selected domain and metadata blocks");
    s->add_option("-c,--corpus", corpusPath, "Corpus artifact")->required();
    s->add_option("-m,--model", modelPath, "Domain-topic model artifact")->required();
    s->add_option("--chain", chainPaths, "Chained models resolving metadata codes");
    s->add_option("--domain,--block", selectors, "Block codes; domains intersect, metadata blocks unite")->required();
    s->callback([&] {
      command = "subcorpus";
      action = [&] {
        const Model m = loadModel(modelPath);
        std::vector<Model> chains;
        for (const auto& p : chainPaths) chains.push_back(loadChain(p, &m));
        logEvent("subcorpus", {{"seed", m.seed}, {"configHash", configHash(m.config)}, {"selectors", selectors}});
        const Corpus c = restrictCorpus(corpusFromJson(readJson(corpusPath)), m, chains, selectors);
        writeJson(corpusToJson(c), output);
        logEvent("subcorpus", {{"documents", c.documents.size()}, {"corpusHash", corpusHash(c)}});
      };
    });
  }

  // export
  std::string histogram;
  bool noDocuments = false;
  {
    CLI::App* s = sub("export", "Write map.json for the interactive map");
    s->add_option("-m,--model", modelPath, "Domain-topic model artifact")->required();
    s->add_option("-c,--corpus", corpusPath, "Corpus artifact (titles, URLs, histogram)");
    s->add_option("--chain", chainPath, "Chained model replacing the term side");
    s->add_option("--histogram", histogram, "Metadata dimension for the histogram");
    s->add_flag("--no-documents", noDocuments, "Omit the document list and titles");
    s->callback([&] {
      command = "export";
      action = [&] {
        if (output == "-") throw std::invalid_argument("export needs an output directory (-o DIR)");
        const Model m = loadModel(modelPath);
        std::optional<Model> chain;
        if (!chainPath.empty()) chain = loadChain(chainPath, &m);
        std::optional<Corpus> corpus;
        if (s->count("--corpus")) corpus = corpusFromJson(readJson(corpusPath));
        logEvent("export", {{"seed", m.seed}, {"configHash", configHash(m.config)}});
        ExportOptions o;
        o.histogramDimension = histogram;
        o.includeDocuments = !noDocuments;
        const std::string path = exportMap(m, chain ? &*chain : nullptr, corpus ? &*corpus : nullptr, o, output);
        logEvent("export", {{"path", path}});
      };
    });
  }

  // serve
  std::string dir = ".";
  std::string host = "127.0.0.1";
  int port = 8000;
  {
    CLI::App* s = sub("serve", "Serve an exported map directory over HTTP");
    s->add_option("--dir", dir, "Directory holding map.json")->capture_default_str();
    s->add_option("--host", host, "Interface to bind")->capture_default_str();
    s->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
    s->callback([&] {
      command = "serve";
      action = [&] {
        MapServer server(dir, host, port);
        logEvent("serve", {{"url", "http://" + host + ":" + std::to_string(server.port()) + "/map.json"}});
        server.run();
      };
    });
  }

  // validate
  std::vector<std::string> artifacts;
  {
    CLI::App* s = sub("validate", "Check artifacts and the hash links between them");
    s->add_option("artifacts", artifacts, "Corpus, model, chain and map files")->required();
    s->callback([&] {
      command = "validate";
      action = [&] {
        const Validation v = validateArtifacts(artifacts);
        writeJson({{"artifacts", v.artifacts}, {"problems", v.problems}}, output);
        logEvent("validate", {{"artifacts", artifacts.size()}, {"problems", v.problems.size()}});
        if (!v.problems.empty()) throw std::runtime_error(std::to_string(v.problems.size()) + " problem(s): " + v.problems.front());
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", e.what()}, {"kind", "usage"}}.dump() << "\n";
    return 2;
  }
  try {
    action();
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"command", command}}.dump() << "\n";
    return 1;
  }
  return 0;
}
