#include "carto/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "carto/measures.hpp"

namespace carto {
namespace {

std::vector<int> descending(const std::vector<double>& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  return order;
}

double positiveSum(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) {
    if (v > 0.0) sum += v;
  }
  return sum;
}

int documentCount(const BlockHierarchy& h, BlockId b) {
  if (b.side == Side::Left) return h.partition.blockSizes(b.level, Side::Left)[b.index];
  const auto docs = periodDocuments(h, b);
  return static_cast<int>(std::count(docs.begin(), docs.end(), 1));
}

TableRow makeRow(const BlockHierarchy& h, BlockId block, bool common, bool withTerms) {
  TableRow row;
  row.code = h.code(block);
  row.level = block.level;
  row.measure = common ? "commonality" : "specificity";
  row.nodes = h.partition.blockSizes(block.level, block.side)[block.index];
  row.documents = documentCount(h, block);
  const auto counts = blockEdgeCounts(h, block, 0);
  if (std::all_of(counts.begin(), counts.end(), [](std::int64_t c) { return c == 0; })) {
    row.notice = "block has no edges";
    return row;
  }
  const BlockMeasures m = measureBlock(h, block, 1);
  const auto& values = common ? m.commonality : m.specificity;
  const auto picked = selectTopics(values);
  if (picked.empty()) {
    row.notice = "no positive " + row.measure;
    return row;
  }
  const Side target = opposite(block.side);
  std::vector<double> termValues;
  std::vector<int> group;
  if (withTerms) {
    const TermMeasures tm = termLevelMeasures(h, block);
    termValues = common ? tm.values.commonality : tm.values.specificity;
    group = tm.group;
  }
  for (int t : picked) {
    TableTopic topic;
    topic.code = h.code({target, 1, t});
    topic.value = values[t];
    topic.share = percentShare(values[t], values);
    if (withTerms) {
      std::vector<int> members;
      std::vector<double> within;
      for (int v = 0; v < static_cast<int>(group.size()); ++v) {
        if (group[v] != t) continue;
        members.push_back(v);
        within.push_back(termValues[v]);
      }
      for (int i : selectTerms(within)) {
        topic.terms.push_back({h.graph->name(target, members[i]), within[i], percentShare(within[i], within)});
      }
    }
    row.topics.push_back(std::move(topic));
  }
  return row;
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

nlohmann::json rowJson(const TableRow& r) {
  nlohmann::json topics = nlohmann::json::array();
  for (const auto& t : r.topics) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& w : t.terms) terms.push_back({{"term", w.term}, {"value", w.value}, {"share", w.share}});
    topics.push_back({{"code", t.code}, {"value", t.value}, {"share", t.share}, {"terms", terms}});
  }
  nlohmann::json j = {{"code", r.code},         {"level", r.level},   {"measure", r.measure},
                      {"nodes", r.nodes},       {"documents", r.documents}, {"label", r.label},
                      {"topics", topics}};
  if (!r.notice.empty()) j["notice"] = r.notice;
  return j;
}

}  // namespace

std::vector<int> selectTopics(const std::vector<double>& values) {
  const double half = 0.5 * positiveSum(values);
  std::vector<int> out;
  if (half <= 0.0) return out;
  double sum = 0.0;
  for (int i : descending(values)) {
    if (!(values[i] > 0.0)) break;
    out.push_back(i);
    sum += values[i];
    if (sum >= half) break;
  }
  return out;
}

std::vector<int> selectTerms(const std::vector<double>& values) {
  std::vector<int> out;
  if (values.empty()) return out;
  const double top = *std::max_element(values.begin(), values.end());
  if (!(top > 0.0)) return out;
  for (int i : descending(values)) {
    if (values[i] > 0.5 * top) out.push_back(i);
  }
  return out;
}

double percentShare(double value, const std::vector<double>& values) {
  const double total = positiveSum(values);
  if (!(value > 0.0) || total <= 0.0) return 0.0;
  return 100.0 * value / total;
}

long long displayPercent(double percent) { return static_cast<long long>(std::floor(percent + 0.5)); }

Table domainTopicTable(const BlockHierarchy& h, BlockId focus) {
  if (focus.level < 1 || !h.partition.contains(focus)) throw std::invalid_argument("unknown block");
  const BlockId base = collapsedBlock(h.partition, focus);
  if (base.level == 1) {
    throw std::invalid_argument(h.code(focus) + " is a level-1 block without subblocks; list its specific topics with `measure`");
  }
  const bool withTerms = h.kindOf(opposite(focus.side)) == BlockKind::Topic;
  Table table;
  table.header = makeRow(h, focus, true, withTerms);
  for (const auto& child : subblocks(h.partition, focus)) {
    const bool common = collapsedBlock(h.partition, child).level > 1;
    table.rows.push_back(makeRow(h, child, common, withTerms));
  }
  return table;
}

std::string tableMarkdown(const Table& table) {
  std::ostringstream os;
  auto cell = [](const TableRow& r) {
    if (r.topics.empty()) return r.notice.empty() ? std::string("-") : "_" + r.notice + "_";
    std::string s;
    for (const auto& t : r.topics) {
      if (!s.empty()) s += "<br>";
      s += t.code + " (" + std::to_string(displayPercent(t.share)) + "%)";
      std::string terms;
      for (const auto& w : t.terms) {
        terms += (terms.empty() ? "" : ", ") + w.term + " (" + std::to_string(displayPercent(w.share)) + "%)";
      }
      if (!terms.empty()) s += ": " + terms;
    }
    return s;
  };
  const TableRow& h = table.header;
  os << "## " << h.code << " (N=" << h.documents << ")\n\n";
  os << "| Block | N | Measure | Topics |\n|---|---|---|---|\n";
  os << "| **" << h.code << "** | " << h.documents << " | " << h.measure << " | " << cell(h) << " |\n";
  for (const auto& r : table.rows) {
    os << "| " << r.code << " | " << r.documents << " | " << r.measure << " | " << cell(r) << " |\n";
  }
  return os.str();
}

std::string tableCsv(const Table& table) {
  std::ostringstream os;
  os << "row,level,measure,documents,topic,topicValue,topicShare,term,termValue,termShare\n";
  auto emit = [&](const TableRow& r) {
    const std::string prefix = csvField(r.code) + "," + std::to_string(r.level) + "," + r.measure + "," +
                               std::to_string(r.documents) + ",";
    if (r.topics.empty()) os << prefix << ",,,,,\n";
    for (const auto& t : r.topics) {
      const std::string topic = prefix + csvField(t.code) + "," + number(t.value) + "," + number(t.share) + ",";
      if (t.terms.empty()) os << topic << ",,\n";
      for (const auto& w : t.terms) {
        os << topic << csvField(w.term) << "," << number(w.value) << "," << number(w.share) << "\n";
      }
    }
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
  return os.str();
}

nlohmann::json tableJson(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) rows.push_back(rowJson(r));
  return {{"format", "carto-table"}, {"version", 1}, {"header", rowJson(table.header)}, {"rows", rows}};
}

}  // namespace carto
