#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "carto/partition.hpp"

namespace carto {

/// Indices of the shortest descending prefix whose sum reaches half the sum
/// of the positive values. Ties keep index order; non-positive and -inf
/// values are never selected. Empty when no value is positive.
std::vector<int> selectTopics(const std::vector<double>& values);

/// Indices with a value above half the largest value, descending. Empty when
/// the largest value is not positive.
std::vector<int> selectTerms(const std::vector<double>& values);

/// 100 * value / (sum of the positive values).
double percentShare(double value, const std::vector<double>& values);
/// Half-up rounding for display.
long long displayPercent(double percent);

struct TableTerm {
  std::string term;
  double value = 0.0;
  double share = 0.0;  // percent of the positive term values within the topic
};

struct TableTopic {
  std::string code;
  double value = 0.0;
  double share = 0.0;
  std::vector<TableTerm> terms;
};

struct TableRow {
  std::string code;
  int level = 0;
  std::string measure;  // "commonality" or "specificity"
  int nodes = 0;
  int documents = 0;
  std::vector<TableTopic> topics;
  std::string notice;
  std::string label;  // left for analysts
};

struct Table {
  TableRow header;
  std::vector<TableRow> rows;
};

/// Common topics of `focus` (level >= 2) followed by one row per subblock:
/// common topics for subblocks above level 1, specific topics for level-1
/// subblocks. Targets are the opposite level-1 blocks; term lists appear
/// when those are topics.
Table domainTopicTable(const BlockHierarchy& h, BlockId focus);

std::string tableMarkdown(const Table& table);
std::string tableCsv(const Table& table);
nlohmann::json tableJson(const Table& table);

}  // namespace carto
