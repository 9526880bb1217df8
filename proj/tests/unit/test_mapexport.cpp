#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "carto/chained.hpp"
#include "carto/mapexport.hpp"
#include "synthetic.hpp"

#include <httplib.h>

using namespace carto;

namespace {

LevelAssignment lv(std::vector<int> left, std::vector<int> right) { return {std::move(left), std::move(right)}; }

// Domains A = {d0, d1}, B = {d2, d3}, C = {d4} (no edges); topics T1 = {t0,
// t1}, T2 = {t2, t3}, T3 = {t4, t5}; level 2 joins B with C and T1 with T2.
Model toyModel(std::vector<int> docs = {0, 0, 1, 1, 2}, std::vector<int> docs2 = {0, 1, 1}) {
  std::vector<std::pair<int, int>> e = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 4}, {2, 2}, {2, 3}, {2, 4}, {3, 5}};
  Model m;
  m.hierarchy.graph = std::make_shared<const BipartiteGraph>(
      std::vector<std::string>{"d0", "d1", "d2", "d3", "d4"},
      std::vector<std::string>{"t0", "t1", "t2", "t3", "t4", "t5"}, e);
  m.hierarchy.partition =
      NestedPartition(5, 6, {lv(std::move(docs), {0, 0, 1, 1, 2, 2}), lv(std::move(docs2), {0, 0, 1}), lv({0, 0}, {0, 0})});
  return m;
}

ExportOptions bare() {
  ExportOptions o;
  o.includeDocuments = false;
  return o;
}

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

std::filesystem::path scratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("carto_mapexport_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("default relevance by hand count") {
  const Model m = toyModel();
  const BlockHierarchy& h = m.hierarchy;
  CHECK(defaultRelevance(h, {Side::Left, 3, 0}) == 1.0);
  CHECK(defaultRelevance(h, {Side::Left, 1, 0}) == doctest::Approx(0.4));
  CHECK(defaultRelevance(h, {Side::Left, 1, 2}) == doctest::Approx(0.2));
  CHECK(defaultRelevance(h, {Side::Left, 2, 1}) == doctest::Approx(0.6));
  CHECK(defaultRelevance(h, {Side::Right, 1, 0}) == doctest::Approx(3.0 / 9));
  CHECK(defaultRelevance(h, {Side::Right, 1, 1}) == doctest::Approx(3.0 / 9));
  CHECK(defaultRelevance(h, {Side::Right, 2, 0}) == doctest::Approx(6.0 / 9));
  CHECK(defaultRelevance(h, {Side::Right, 3, 0}) == 1.0);

  std::vector<std::pair<int, int>> e = {{0, 0}, {1, 1}};
  BlockHierarchy two;
  two.graph = std::make_shared<const BipartiteGraph>(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"x", "y"}, e);
  two.partition = NestedPartition(2, 2, {lv({0, 1}, {0, 1}), lv({0, 0}, {0, 0})});
  CHECK(defaultRelevance(two, {Side::Left, 1, 0}) == 0.5);
  CHECK(defaultRelevance(two, {Side::Left, 1, 1}) == 0.5);
}

TEST_CASE("recoloring intensities by hand count") {
  const Model m = toyModel();
  const BlockHierarchy& h = m.hierarchy;
  const MapBundle b = buildBundle(m, nullptr, nullptr, bare());
  CHECK(validateBundle(b).empty());
  auto code = [&](Side s, int l, int i) { return h.code({s, l, i}); };

  const auto byTopic = recolorMatrix(b, code(Side::Right, 1, 1));
  CHECK(byTopic.size() == 3 + 2 + 1);
  CHECK(byTopic.at(code(Side::Left, 1, 0)) == doctest::Approx(0.4));
  CHECK(byTopic.at(code(Side::Left, 1, 1)) == doctest::Approx(1.0));
  CHECK(byTopic.at(code(Side::Left, 1, 2)) == 0.0);
  // B and C pool to 2 of 4 edges, A uses 1 of 5
  CHECK(byTopic.at(code(Side::Left, 2, 0)) == doctest::Approx(0.4));
  CHECK(byTopic.at(code(Side::Left, 2, 1)) == doctest::Approx(1.0));
  CHECK(byTopic.at(code(Side::Left, 3, 0)) == doctest::Approx(1.0));

  const auto byDomain = recolorMatrix(b, code(Side::Left, 1, 0));
  CHECK(byDomain.at(code(Side::Right, 1, 0)) == doctest::Approx(1.0));
  CHECK(byDomain.at(code(Side::Right, 1, 1)) == doctest::Approx(1.0 / 3));
  CHECK(byDomain.at(code(Side::Right, 1, 2)) == doctest::Approx(1.0 / 3));
  // parent of T1 and T2 aggregates 4 of 6 edges, not the children's max
  CHECK(byDomain.at(code(Side::Right, 2, 0)) == doctest::Approx(1.0));
  CHECK(byDomain.at(code(Side::Right, 2, 1)) == doctest::Approx(0.5));

  const auto empty = recolorMatrix(b, code(Side::Left, 1, 2));
  for (const auto& [c, v] : empty) CHECK(v == 0.0);
  CHECK(empty.size() == 3 + 2 + 1);

  CHECK_THROWS_AS(recolorMatrix(b, code(Side::Left, 2, 0)), std::invalid_argument);
}

TEST_CASE("recoloring ignores block labels") {
  const Model m = toyModel();
  const Model swapped = toyModel({1, 1, 0, 0, 2}, {0, 1, 0});
  const MapBundle b = buildBundle(m, nullptr, nullptr, bare());
  const MapBundle s = buildBundle(swapped, nullptr, nullptr, bare());
  CHECK(validateBundle(s).empty());
  auto rename = [&](const std::string& c) {
    const BlockId id = swapped.hierarchy.resolve(c);
    if (id.side == Side::Right || id.level == 3) return c;
    if (id.level == 1 && id.index < 2) return m.hierarchy.code({Side::Left, 1, 1 - id.index});
    if (id.level == 2 && id.index < 2) return m.hierarchy.code({Side::Left, 2, 1 - id.index});
    return c;
  };
  for (const auto& sel : b.columnCodes) {
    const auto expect = recolorMatrix(b, sel);
    std::map<std::string, double> got;
    for (const auto& [c, v] : recolorMatrix(s, sel)) got[rename(c)] = v;
    CHECK(got == expect);
  }
  std::map<std::string, double> got;
  for (const auto& [c, v] : recolorMatrix(s, swapped.hierarchy.code({Side::Left, 1, 1}))) got[rename(c)] = v;
  CHECK(got == recolorMatrix(b, m.hierarchy.code({Side::Left, 1, 0})));
}

TEST_CASE("bundle of a fitted model") {
  const Fixture& f = eras();
  ExportOptions o;
  o.histogramDimension = "year";
  const MapBundle b = buildBundle(f.model, nullptr, &f.corpus, o);
  CHECK(validateBundle(b).empty());
  CHECK(b.kind == "domain-topic");
  CHECK(b.numDocuments == static_cast<int>(f.corpus.documents.size()));

  std::int64_t total = 0;
  for (const auto& row : b.level1Matrix) {
    for (auto e : row) total += e;
  }
  CHECK(total == f.model.graph().numEdges());

  REQUIRE(b.histogram);
  CHECK(b.histogram->orderedBins == std::vector<std::string>{"2001", "2002", "2003", "2004", "2005", "2006"});
  std::map<std::string, std::int64_t> perYear;
  for (const auto& d : f.corpus.documents) ++perYear[d.meta.at("year").front()];
  for (std::size_t i = 0; i < b.histogram->orderedBins.size(); ++i) {
    CHECK(b.histogram->corpusTotals[i] == perYear[b.histogram->orderedBins[i]]);
  }
  const auto domainOf = f.model.partition().nodeMembership(1, Side::Left);
  std::map<std::string, std::map<std::string, std::int64_t>> perDomain;
  for (int v = 0; v < static_cast<int>(domainOf.size()); ++v) {
    const auto& doc = f.corpus.documents[f.corpus.findDocument(f.model.graph().name(Side::Left, v))];
    ++perDomain[f.model.hierarchy.code({Side::Left, 1, domainOf[v]})][doc.meta.at("year").front()];
  }
  for (const auto& [code, counts] : b.histogram->perLevel1Domain) {
    for (std::size_t i = 0; i < counts.size(); ++i) CHECK(counts[i] == perDomain[code][b.histogram->orderedBins[i]]);
  }

  REQUIRE(b.documents);
  CHECK(b.documents->front().title == "Document " + b.documents->front().id);
  CHECK(bundleFromJson(bundleToJson(b)) == b);
  CHECK(bundleFromJson(nlohmann::json::parse(bundleToJson(b).dump())) == b);
}

TEST_CASE("bundles without documents carry no titles") {
  const Fixture& f = eras();
  const MapBundle b = buildBundle(f.model, nullptr, &f.corpus, bare());
  const auto j = bundleToJson(b);
  CHECK_FALSE(j.contains("documents"));
  CHECK_FALSE(j.contains("histogram"));
  CHECK(j.dump().find("Document ") == std::string::npos);
  CHECK(validateBundle(b).empty());
}

TEST_CASE("domain-chained bundle") {
  const Fixture& f = eras();
  ExportOptions o;
  o.histogramDimension = "year";
  const MapBundle b = buildBundle(f.model, &f.chain, &f.corpus, o);
  CHECK(b.kind == "domain-chained");
  CHECK(b.dimension == "year");
  CHECK(validateBundle(b).empty());
  for (const auto& m : b.blocks) CHECK((m.side == "doc" || m.side == "meta"));
  CHECK(static_cast<int>(b.columnCodes.size()) == f.chain.partition().numBlocks(1, Side::Right));
  CHECK(b.numEdges == f.chain.graph().numEdges());
  CHECK(b.rowCodes == buildBundle(f.model, nullptr, nullptr, bare()).rowCodes);

  Model foreign = f.chain;
  foreign.parentHash = std::string(64, '0');
  CHECK_THROWS_WITH_AS(buildBundle(f.model, &foreign, &f.corpus, o), doctest::Contains("another model"),
                       std::invalid_argument);
  CHECK_THROWS_AS(buildBundle(f.chain, nullptr, &f.corpus, o), std::invalid_argument);
  o.histogramDimension = "venue";
  CHECK_THROWS_WITH_AS(buildBundle(f.model, nullptr, &f.corpus, o), doctest::Contains("available: year"),
                       std::invalid_argument);
}

TEST_CASE("histogram bins sort numerically and keep a bin for missing values") {
  std::vector<Document> docs;
  const std::vector<std::string> values = {"10", "9", "", "9", "100"};
  for (int i = 0; i < 5; ++i) {
    Document d;
    d.id = "n" + std::to_string(i);
    d.text = "alpha beta gamma " + std::string(i % 2 ? "delta" : "omega");
    if (!values[i].empty()) d.meta["n"] = {values[i]};
    docs.push_back(d);
  }
  const Corpus c = buildCorpus(docs, CorpusConfig{});
  const Model m = fitModel(c, quick(), 1);
  ExportOptions o;
  o.histogramDimension = "n";
  const MapBundle b = buildBundle(m, nullptr, &c, o);
  REQUIRE(b.histogram);
  CHECK(b.histogram->orderedBins == std::vector<std::string>{"9", "10", "100", "(none)"});
  CHECK(b.histogram->corpusTotals == std::vector<std::int64_t>{2, 1, 1, 1});
  CHECK(validateBundle(b).empty());
  CHECK((*b.documents)[2].histogramValue == "(none)");
}

TEST_CASE("validator reports inconsistencies") {
  const MapBundle good = buildBundle(toyModel(), nullptr, nullptr, bare());
  MapBundle b = good;
  b.level1Matrix[0][0] += 1;
  CHECK_FALSE(validateBundle(b).empty());
  b = good;
  b.blocks[0].size += 1;
  CHECK_FALSE(validateBundle(b).empty());
  b = good;
  b.blocks[0].parentCode = "L9D1";
  CHECK_FALSE(validateBundle(b).empty());
  b = good;
  b.blocks[0].side = "meta";
  CHECK_FALSE(validateBundle(b).empty());

  auto j = bundleToJson(good);
  j["version"] = 2;
  CHECK_THROWS_WITH_AS(bundleFromJson(j), doctest::Contains("version 2"), std::invalid_argument);
}

TEST_CASE("export writes map.json with a reproducible timestamp") {
  const Fixture& f = eras();
  const auto dir = scratchDir("export");
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  const std::string path = exportMap(f.model, nullptr, &f.corpus, ExportOptions{}, dir.string());
  const std::string first = slurp(path);
  exportMap(f.model, nullptr, &f.corpus, ExportOptions{}, dir.string());
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(slurp(path) == first);
  const MapBundle b = bundleFromJson(nlohmann::json::parse(first));
  CHECK(b.generatedAt == "1970-01-01T00:00:00Z");
  CHECK(b.modelHash == modelHash(f.model));
  CHECK(b.configHash == configHash(f.model.config));
}

TEST_CASE("static server") {
  const auto dir = scratchDir("serve");
  const std::string bytes = bundleToJson(buildBundle(toyModel(), nullptr, nullptr, bare())).dump(2);
  std::ofstream(dir / "map.json", std::ios::binary) << bytes;
  std::ofstream(dir / "index.html") << "<html></html>";

  MapServer server(dir.string(), "127.0.0.1", 0);
  std::thread loop([&] { server.run(); });
  httplib::Client client("127.0.0.1", server.port());
  for (int attempt = 0; attempt < 100 && !client.Get("/index.html"); ++attempt) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  auto res = client.Get("/map.json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == bytes);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  res = client.Get("/index.html");
  REQUIRE(res);
  CHECK(res->get_header_value("Content-Type") == "text/html");
  res = client.Get("/missing");
  REQUIRE(res);
  CHECK(res->status == 404);

  std::vector<std::string> bodies(8);
  std::vector<std::thread> readers;
  for (int i = 0; i < 8; ++i) {
    readers.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", server.port());
      if (auto r = c.Get("/map.json")) bodies[i] = r->body;
    });
  }
  for (auto& t : readers) t.join();
  for (const auto& body : bodies) CHECK(body == bytes);

  CHECK_THROWS_AS(MapServer(dir.string(), "127.0.0.1", server.port()), std::runtime_error);
  server.stop();
  loop.join();
  CHECK_THROWS_AS(MapServer((dir / "nope").string(), "127.0.0.1", 0), std::runtime_error);
}
