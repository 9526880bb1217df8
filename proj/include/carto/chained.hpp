#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carto/corpus.hpp"
#include "carto/model.hpp"

namespace carto {

/// Period blocks for time-like dimensions, generic metadata blocks otherwise.
BlockKind defaultMetaKind(const std::string& dimension);

/// Cluster the values of `dimension` with the document hierarchy of
/// `domainModel` frozen at every level. Documents of the model missing from
/// the corpus, or lacking the dimension, stay as isolated nodes.
Model chainFit(const Model& domainModel, const Corpus& corpus, const std::string& dimension, const FitConfig& config,
               std::uint64_t seed, std::optional<BlockKind> kind = std::nullopt);

/// Documents (corpus indices) of a domain block of `model`, or of the
/// documents linked to a metadata block of a chained model.
std::vector<int> blockDocuments(const Corpus& corpus, const Model& model, BlockId block);

/// Sub-corpus of the documents lying in every selected domain block and in
/// at least one selected metadata block. Codes resolve against the domain
/// model (domain kind) or the chain with the matching metadata kind.
Corpus restrictCorpus(const Corpus& corpus, const Model& domainModel, const std::vector<Model>& chains,
                      const std::vector<std::string>& selectors);

}  // namespace carto
