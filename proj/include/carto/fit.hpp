#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "carto/block_state.hpp"
#include "carto/graph.hpp"
#include "carto/partition.hpp"

namespace carto {

/// Search settings for description-length minimization.
struct FitConfig {
  int seeds = 10;
  double sigmaShrink = 2.0;     // block-count divisor per agglomeration step
  int patience = 10;            // refinement passes without improvement before stopping
  double epsilonExplore = 0.1;  // probability of a uniform proposal
  bool greedy = true;           // accept only improving moves
  std::vector<double> betaSchedule;  // inverse temperatures of the first refinement passes when not greedy
  int mergeCandidates = 10;     // sampled merge targets per block
  int sweepsPerShrink = 4;      // refinement sweeps after each agglomeration step
  int maxPasses = 1000;         // hard cap on refinement passes
  int threads = 0;              // 0: CARTO_THREADS or hardware concurrency

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

using Rng = std::mt19937_64;

/// Random generator for chain `index` of a run seeded with `seed`.
Rng chainRng(std::uint64_t seed, int index);

/// One visit of every movable item at `level` in random order, accepting
/// improving moves (infinite `beta`) or by the Metropolis rule. Returns true
/// when the description length dropped by more than the tolerance.
bool sweep(BlockState& state, int level, const FitConfig& config, Rng& rng,
           double beta = std::numeric_limits<double>::infinity());

/// Proposal used by sweeps: an active block of the item's side, or
/// BlockState::kFresh.
int proposeTarget(const BlockState& state, int level, Side s, int item, double epsilon, Rng& rng);

struct FitResult {
  NestedPartition partition;  // canonical
  double sigma = 0.0;
  int bestChain = 0;
  std::vector<double> chainSigmas;
  std::vector<std::string> warnings;
};

/// Level-0..L search over both sides. Zero-edge graphs give the trivial
/// single-level state.
FitResult fitHierarchy(std::shared_ptr<const BipartiteGraph> graph, const FitConfig& config, std::uint64_t seed);

/// Fit the RIGHT side while LEFT assignments stay fixed to `leftLevels`
/// (one assignment per level, level 1 first, top holding one block).
FitResult fitChained(std::shared_ptr<const BipartiteGraph> graph, const std::vector<std::vector<int>>& leftLevels,
                     const FitConfig& config, std::uint64_t seed);

/// Number of worker threads for `chains` independent chains.
int fitThreads(const FitConfig& config, int chains);

}  // namespace carto
