#pragma once

#include <json.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carto/graph.hpp"

namespace carto {

/// Raw input document.
struct Document {
  std::string id;
  std::string title;
  std::string text;
  std::string url;
  std::map<std::string, std::vector<std::string>> meta;
};

struct TokenizerConfig {
  bool lowercase = true;
  std::string joiners = "-/";  // kept inside a token when flanked by alphanumerics
};

/// Alphanumeric runs of the UTF-8 `text`, lowercased; no stemming and no
/// stop-word removal.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

struct BigramConfig {
  bool enabled = true;
  double delta = 5.0;
  std::int64_t minCount = 5;
  double threshold = 1e-4;
};

using Bigram = std::pair<std::string, std::string>;

/// Adjacent pairs with (count(a,b) - delta) / (count(a) count(b)) above the
/// threshold and count(a,b) >= minCount.
std::set<Bigram> extractBigrams(const std::vector<std::vector<std::string>>& documents, const BigramConfig& config);

/// Greedy left-to-right, non-overlapping replacement of bigrams by "a_b".
std::vector<std::string> joinBigrams(const std::vector<std::string>& tokens, const std::set<Bigram>& bigrams);

struct CorpusConfig {
  TokenizerConfig tokenizer;
  BigramConfig bigrams;
  std::int64_t minDf = 1;  // keep terms in at least this many documents
  double maxDf = 1.0;      // keep terms in at most this fraction of documents

  nlohmann::json toJson() const;
  static CorpusConfig fromJson(const nlohmann::json& j);
};

/// Document after indexing: its sorted set of vocabulary ids.
struct IndexedDocument {
  std::string id;
  std::string title;
  std::string url;
  std::vector<int> terms;
  std::map<std::string, std::vector<std::string>> meta;
};

struct Corpus {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<IndexedDocument> documents;
  CorpusConfig config;
  std::string source;    // hash of the input, or of the parent corpus for sub-corpora
  std::string selector;  // how a sub-corpus was selected; empty otherwise
  std::vector<std::string> warnings;

  std::vector<std::string> dimensions() const;
  /// Index of document `id`, or -1.
  int findDocument(std::string_view id) const;
};

/// Parse one JSON document per non-empty line.
std::vector<Document> readJsonl(std::istream& in);
Document documentFromJson(const nlohmann::json& j);

/// Tokenize, detect and join bigrams, and index every document. Throws on
/// duplicate or empty ids.
Corpus buildCorpus(const std::vector<Document>& documents, const CorpusConfig& config, std::string source = {});

/// Documents on the LEFT, terms used by at least one document on the RIGHT
/// (vocabulary order). Empty documents stay as isolated nodes.
BipartiteGraph buildDocTermGraph(const Corpus& corpus);

/// Documents on the LEFT, distinct values of `dimension` on the RIGHT in
/// sorted order. Documents lacking the dimension are isolated.
BipartiteGraph buildDocMetaGraph(const Corpus& corpus, const std::string& dimension);

/// Documents kept in their original order; vocabulary restricted to the
/// terms they use.
Corpus subsetCorpus(const Corpus& corpus, const std::vector<int>& documents, std::string selector);

nlohmann::json corpusToJson(const Corpus& corpus);
/// Throws when the embedded hash does not match the content.
Corpus corpusFromJson(const nlohmann::json& j);
std::string corpusHash(const Corpus& corpus);

}  // namespace carto
