#pragma once

// Synthetic planted-structure inputs.

#include <random>
#include <string>
#include <vector>

#include "carto/corpus.hpp"
#include "oracle.hpp"

namespace synthetic {

struct Planted {
  oracle::Graph graph;
  std::vector<int> docGroup;   // per left node
  std::vector<int> termGroup;  // per right node; -1 for stop-words
};

/// `groups` document groups over disjoint vocabularies of `termsPerGroup`
/// terms; each document uses each of its group's terms with probability
/// `density` (at least one term). Stop-words, appended last, occur in every
/// document.
Planted plantedGroups(std::mt19937_64& rng, int groups, int docsPerGroup, int termsPerGroup, double density,
                      int stopWords = 0);

struct EraSpec {
  std::vector<int> domainSizes{14, 12, 10, 14, 12, 10};  // first half: era 0, second half: era 1
  int yearsPerEra = 3;
  int firstYear = 2001;
  int domainWords = 20;
  int eraWords = 15;
  int stopWords = 5;
  double density = 0.35;
};

struct EraCorpus {
  std::vector<carto::Document> documents;
  std::vector<int> domain;  // planted level-1 domain per document
  std::vector<int> era;
  std::vector<std::string> stopWords;
};

/// Two eras of disjoint vocabulary. Each domain has its own words, each era
/// shares extra words among its domains, and stop-words occur everywhere.
/// Years are uniform within the era; text is the chosen words in random
/// order with light punctuation.
EraCorpus eraCorpus(std::mt19937_64& rng, const EraSpec& spec = {});

}  // namespace synthetic
