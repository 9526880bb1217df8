#include "carto/corpus.hpp"

#include <algorithm>
#include <locale>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "carto/hash.hpp"

namespace carto {
namespace {

struct CharClass {
  const std::ctype<wchar_t>* facet = nullptr;
  std::locale locale;

  CharClass() {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        locale = std::locale(name);
        facet = &std::use_facet<std::ctype<wchar_t>>(locale);
        return;
      } catch (const std::runtime_error&) {
      }
    }
  }

  bool alnum(char32_t c) const {
    if (c < 0x80) return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (facet) return facet->is(std::ctype_base::alnum, static_cast<wchar_t>(c));
    // without a Unicode locale: punctuation and space blocks separate, the rest are letters
    return !(c <= 0xbf || c == 0xd7 || c == 0xf7 || (c >= 0x2000 && c <= 0x2bff) || (c >= 0x3000 && c <= 0x303f) ||
             (c >= 0xfe30 && c <= 0xfe4f) || (c >= 0xff00 && c <= 0xff0f));
  }

  char32_t lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    if (facet) return static_cast<char32_t>(facet->tolower(static_cast<wchar_t>(c)));
    return c;
  }
};

const CharClass& charClass() {
  static const CharClass cc;
  return cc;
}

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decode one code point at `i`, advancing it; malformed input yields kInvalid.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i++]);
  if (b0 < 0x80) return b0;
  int extra = 0;
  char32_t c = 0;
  if ((b0 & 0xe0) == 0xc0) {
    extra = 1;
    c = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    extra = 2;
    c = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    extra = 3;
    c = b0 & 0x07;
  } else {
    return kInvalid;
  }
  for (int k = 0; k < extra; ++k) {
    if (i >= s.size()) return kInvalid;
    const auto b = static_cast<unsigned char>(s[i]);
    if ((b & 0xc0) != 0x80) return kInvalid;
    c = (c << 6) | (b & 0x3f);
    ++i;
  }
  return c > 0x10ffff ? kInvalid : c;
}

void encode(char32_t c, std::string& out) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
  }
}

nlohmann::json metaToJson(const std::map<std::string, std::vector<std::string>>& meta) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

std::map<std::string, std::vector<std::string>> metaFromJson(const nlohmann::json& j) {
  std::map<std::string, std::vector<std::string>> meta;
  if (j.is_null()) return meta;
  if (!j.is_object()) throw std::invalid_argument("meta must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k.empty()) throw std::invalid_argument("meta dimension names must be nonempty");
    auto& values = meta[k];
    if (v.is_array()) {
      for (const auto& x : v) values.push_back(x.is_string() ? x.get<std::string>() : x.dump());
    } else if (v.is_string()) {
      values.push_back(v.get<std::string>());
    } else if (!v.is_null()) {
      values.push_back(v.dump());
    }
  }
  return meta;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  const CharClass& cc = charClass();
  std::vector<std::string> tokens;
  std::string current;
  char32_t pending = 0;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
    pending = 0;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = decode(text, i);
    if (c != kInvalid && cc.alnum(c)) {
      if (pending != 0) encode(pending, current);
      pending = 0;
      encode(config.lowercase ? cc.lower(c) : c, current);
    } else if (c < 0x80 && !current.empty() && pending == 0 &&
               config.joiners.find(static_cast<char>(c)) != std::string::npos) {
      pending = c;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::set<Bigram> extractBigrams(const std::vector<std::vector<std::string>>& documents, const BigramConfig& config) {
  if (config.delta < 0) throw std::invalid_argument("bigram delta must be non-negative");
  std::unordered_map<std::string, std::int64_t> unigram;
  std::unordered_map<std::string, std::int64_t> pairs;
  for (const auto& doc : documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      ++unigram[doc[i]];
      if (i + 1 < doc.size()) ++pairs[doc[i] + '\0' + doc[i + 1]];
    }
  }
  std::set<Bigram> out;
  for (const auto& [key, count] : pairs) {
    if (count < config.minCount) continue;
    const auto split = key.find('\0');
    std::string a = key.substr(0, split);
    std::string b = key.substr(split + 1);
    const double score =
        (static_cast<double>(count) - config.delta) / (static_cast<double>(unigram[a]) * static_cast<double>(unigram[b]));
    if (score > config.threshold) out.emplace(std::move(a), std::move(b));
  }
  return out;
}

std::vector<std::string> joinBigrams(const std::vector<std::string>& tokens, const std::set<Bigram>& bigrams) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size();) {
    if (i + 1 < tokens.size() && bigrams.count({tokens[i], tokens[i + 1]})) {
      out.push_back(tokens[i] + "_" + tokens[i + 1]);
      i += 2;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

nlohmann::json CorpusConfig::toJson() const {
  return {{"tokenizer", {{"lowercase", tokenizer.lowercase}, {"joiners", tokenizer.joiners}}},
          {"bigrams",
           {{"enabled", bigrams.enabled},
            {"delta", bigrams.delta},
            {"minCount", bigrams.minCount},
            {"threshold", bigrams.threshold}}},
          {"minDf", minDf},
          {"maxDf", maxDf}};
}

CorpusConfig CorpusConfig::fromJson(const nlohmann::json& j) {
  CorpusConfig c;
  const auto& t = j.at("tokenizer");
  c.tokenizer.lowercase = t.at("lowercase").get<bool>();
  c.tokenizer.joiners = t.at("joiners").get<std::string>();
  const auto& b = j.at("bigrams");
  c.bigrams.enabled = b.at("enabled").get<bool>();
  c.bigrams.delta = b.at("delta").get<double>();
  c.bigrams.minCount = b.at("minCount").get<std::int64_t>();
  c.bigrams.threshold = b.at("threshold").get<double>();
  c.minDf = j.at("minDf").get<std::int64_t>();
  c.maxDf = j.at("maxDf").get<double>();
  return c;
}

std::vector<std::string> Corpus::dimensions() const {
  std::set<std::string> dims;
  for (const auto& d : documents) {
    for (const auto& [k, v] : d.meta) dims.insert(k);
  }
  return {dims.begin(), dims.end()};
}

int Corpus::findDocument(std::string_view id) const {
  for (int i = 0; i < static_cast<int>(documents.size()); ++i) {
    if (documents[i].id == id) return i;
  }
  return -1;
}

Document documentFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("document must be a JSON object");
  Document d;
  const auto& id = j.at("id");
  d.id = id.is_string() ? id.get<std::string>() : id.dump();
  d.title = j.value("title", std::string());
  d.text = j.value("text", std::string());
  d.url = j.value("url", std::string());
  if (j.contains("meta")) d.meta = metaFromJson(j.at("meta"));
  return d;
}

std::vector<Document> readJsonl(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(documentFromJson(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return docs;
}

Corpus buildCorpus(const std::vector<Document>& documents, const CorpusConfig& config, std::string source) {
  if (config.minDf < 1) throw std::invalid_argument("minDf must be at least 1");
  if (!(config.maxDf > 0.0 && config.maxDf <= 1.0)) throw std::invalid_argument("maxDf must lie in (0, 1]");
  Corpus corpus;
  corpus.config = config;
  corpus.source = std::move(source);

  std::set<std::string> ids;
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(documents.size());
  for (const auto& d : documents) {
    if (d.id.empty()) throw std::invalid_argument("document without id");
    if (!ids.insert(d.id).second) throw std::invalid_argument("duplicate document id '" + d.id + "'");
    for (const auto& [k, v] : d.meta) {
      if (k.empty()) throw std::invalid_argument("document '" + d.id + "' has an empty meta dimension name");
    }
    tokens.push_back(tokenize(d.text, config.tokenizer));
  }
  if (config.bigrams.enabled) {
    const auto bigrams = extractBigrams(tokens, config.bigrams);
    if (!bigrams.empty()) {
      for (auto& t : tokens) t = joinBigrams(t, bigrams);
    }
  }

  std::vector<std::set<std::string>> termSets(tokens.size());
  std::map<std::string, std::int64_t> df;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    termSets[i].insert(tokens[i].begin(), tokens[i].end());
    for (const auto& t : termSets[i]) ++df[t];
  }
  const double maxDocs = config.maxDf * static_cast<double>(documents.size());
  std::map<std::string, int> index;
  for (const auto& [term, count] : df) {
    if (count < config.minDf || static_cast<double>(count) > maxDocs) continue;
    index.emplace(term, static_cast<int>(corpus.vocabulary.size()));
    corpus.vocabulary.push_back(term);
  }
  for (std::size_t i = 0; i < documents.size(); ++i) {
    IndexedDocument doc;
    doc.id = documents[i].id;
    doc.title = documents[i].title;
    doc.url = documents[i].url;
    doc.meta = documents[i].meta;
    for (const auto& t : termSets[i]) {
      auto it = index.find(t);
      if (it != index.end()) doc.terms.push_back(it->second);
    }
    std::sort(doc.terms.begin(), doc.terms.end());
    if (doc.terms.empty()) corpus.warnings.push_back("document '" + doc.id + "' has no terms");
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

BipartiteGraph buildDocTermGraph(const Corpus& corpus) {
  if (corpus.documents.empty()) throw std::invalid_argument("corpus has no documents");
  std::vector<int> used(corpus.vocabulary.size(), -1);
  for (const auto& d : corpus.documents) {
    for (int t : d.terms) used[t] = 0;
  }
  std::vector<std::string> right;
  for (std::size_t t = 0; t < used.size(); ++t) {
    if (used[t] == 0) {
      used[t] = static_cast<int>(right.size());
      right.push_back(corpus.vocabulary[t]);
    }
  }
  std::vector<std::string> left;
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    left.push_back(corpus.documents[i].id);
    for (int t : corpus.documents[i].terms) edges.emplace_back(static_cast<int>(i), used[t]);
  }
  return BipartiteGraph(std::move(left), std::move(right), std::move(edges));
}

BipartiteGraph buildDocMetaGraph(const Corpus& corpus, const std::string& dimension) {
  std::set<std::string> values;
  bool present = false;
  for (const auto& d : corpus.documents) {
    auto it = d.meta.find(dimension);
    if (it == d.meta.end()) continue;
    present = true;
    values.insert(it->second.begin(), it->second.end());
  }
  if (!present) {
    std::string available;
    for (const auto& dim : corpus.dimensions()) available += (available.empty() ? "" : ", ") + dim;
    throw std::invalid_argument("unknown dimension '" + dimension + "'; available: " +
                                (available.empty() ? "none" : available));
  }
  std::vector<std::string> right(values.begin(), values.end());
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(right.size()); ++i) index[right[i]] = i;
  std::vector<std::string> left;
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto& d = corpus.documents[i];
    left.push_back(d.id);
    auto it = d.meta.find(dimension);
    if (it == d.meta.end()) continue;
    for (const auto& v : it->second) edges.emplace_back(static_cast<int>(i), index.at(v));
  }
  return BipartiteGraph(std::move(left), std::move(right), std::move(edges));
}

Corpus subsetCorpus(const Corpus& corpus, const std::vector<int>& documents, std::string selector) {
  std::vector<int> sorted = documents;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Corpus out;
  out.config = corpus.config;
  out.source = corpusHash(corpus);
  out.selector = std::move(selector);
  std::vector<int> remap(corpus.vocabulary.size(), -1);
  for (int i : sorted) {
    for (int t : corpus.documents.at(i).terms) remap[t] = 0;
  }
  for (std::size_t t = 0; t < remap.size(); ++t) {
    if (remap[t] == 0) {
      remap[t] = static_cast<int>(out.vocabulary.size());
      out.vocabulary.push_back(corpus.vocabulary[t]);
    }
  }
  for (int i : sorted) {
    IndexedDocument d = corpus.documents[i];
    for (int& t : d.terms) t = remap[t];
    out.documents.push_back(std::move(d));
  }
  return out;
}

nlohmann::json corpusToJson(const Corpus& corpus) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : corpus.documents) {
    docs.push_back({{"id", d.id}, {"title", d.title}, {"url", d.url}, {"terms", d.terms}, {"meta", metaToJson(d.meta)}});
  }
  nlohmann::json j = {{"format", "carto-corpus"},
                      {"version", 1},
                      {"config", corpus.config.toJson()},
                      {"source", corpus.source},
                      {"selector", corpus.selector},
                      {"vocabulary", corpus.vocabulary},
                      {"documents", std::move(docs)}};
  j["hash"] = contentHash(j);
  return j;
}

Corpus corpusFromJson(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "carto-corpus") throw std::invalid_argument("not a corpus artifact");
  if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported corpus artifact version");
  if (j.value("hash", std::string()) != contentHash(j)) throw std::invalid_argument("corpus artifact hash mismatch");
  Corpus c;
  c.config = CorpusConfig::fromJson(j.at("config"));
  c.source = j.at("source").get<std::string>();
  c.selector = j.at("selector").get<std::string>();
  c.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  for (const auto& d : j.at("documents")) {
    IndexedDocument doc;
    doc.id = d.at("id").get<std::string>();
    doc.title = d.at("title").get<std::string>();
    doc.url = d.at("url").get<std::string>();
    doc.terms = d.at("terms").get<std::vector<int>>();
    for (int t : doc.terms) {
      if (t < 0 || t >= static_cast<int>(c.vocabulary.size())) throw std::invalid_argument("term id out of range");
    }
    doc.meta = metaFromJson(d.at("meta"));
    c.documents.push_back(std::move(doc));
  }
  return c;
}

std::string corpusHash(const Corpus& corpus) { return corpusToJson(corpus).at("hash").get<std::string>(); }

}  // namespace carto
