#include "carto/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "carto/description_length.hpp"
#include "carto/numeric.hpp"

namespace carto {

void FitConfig::validate() const {
  if (seeds < 1) throw std::invalid_argument("seeds must be at least 1");
  if (!(sigmaShrink > 1.0)) throw std::invalid_argument("sigmaShrink must exceed 1");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
  if (!(epsilonExplore >= 0.0 && epsilonExplore <= 1.0)) throw std::invalid_argument("epsilonExplore must lie in [0, 1]");
  if (!greedy && betaSchedule.empty()) throw std::invalid_argument("non-greedy search needs a betaSchedule");
  for (double b : betaSchedule) {
    if (!(b > 0.0)) throw std::invalid_argument("betaSchedule entries must be positive");
  }
  if (mergeCandidates < 1) throw std::invalid_argument("mergeCandidates must be at least 1");
  if (sweepsPerShrink < 0) throw std::invalid_argument("sweepsPerShrink must be non-negative");
  if (maxPasses < 1) throw std::invalid_argument("maxPasses must be at least 1");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

Rng chainRng(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

int fitThreads(const FitConfig& config, int chains) {
  int n = config.threads;
  if (n == 0) {
    if (const char* env = std::getenv("CARTO_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(1, chains));
}

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int uniformIndex(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

// Uniform choice among non-isolated active blocks, plus a fresh block when
// a slot is free.
int uniformTarget(const BlockState& state, int level, Side s, Rng& rng) {
  const auto act = state.activeBlocks(level, s);
  const int iso = level == 1 ? state.isolatedBlock(s) : -1;
  const int usable = static_cast<int>(act.size()) - (iso >= 0 ? 1 : 0);
  const int choices = usable + (state.hasFreeSlot(level, s) ? 1 : 0);
  if (choices == 0) return BlockState::kFresh;
  int k = uniformIndex(rng, choices);
  if (k == usable) return BlockState::kFresh;
  for (int b : act) {
    if (b == iso) continue;
    if (k-- == 0) return b;
  }
  return BlockState::kFresh;
}

}  // namespace

int proposeTarget(const BlockState& state, int level, Side s, int item, double epsilon, Rng& rng) {
  if (uniform01(rng) < epsilon) return uniformTarget(state, level, s, rng);
  const Side o = opposite(s);
  int neighborBlock = -1;
  if (level == 1) {
    const auto nb = state.graph().neighbors(s, item);
    if (!nb.empty()) neighborBlock = state.blockOf(1, o, nb[uniformIndex(rng, static_cast<int>(nb.size()))]);
  } else {
    const auto w = state.itemEdges(level, s, item);
    std::int64_t total = 0;
    for (const auto& [b, c] : w) total += c;
    if (total > 0) {
      std::int64_t x = std::uniform_int_distribution<std::int64_t>(0, total - 1)(rng);
      for (const auto& [b, c] : w) {
        if (x < c) {
          neighborBlock = b;
          break;
        }
        x -= c;
      }
    }
  }
  if (neighborBlock < 0) return uniformTarget(state, level, s, rng);

  const auto act = state.activeBlocks(level, s);
  const int iso = level == 1 ? state.isolatedBlock(s) : -1;
  const int usable = static_cast<int>(act.size()) - (iso >= 0 ? 1 : 0);
  const double smooth = epsilon * usable;
  const double column = static_cast<double>(state.blockDegree(level, o, neighborBlock));
  double x = uniform01(rng) * (column + smooth);
  if (x < smooth) return uniformTarget(state, level, s, rng);
  x -= smooth;
  int last = -1;
  for (int b : act) {
    const int c = state.edgeCount(level, s, b, neighborBlock);
    if (c == 0) continue;
    last = b;
    x -= c;
    if (x < 0) return b;
  }
  return last >= 0 ? last : uniformTarget(state, level, s, rng);
}

bool sweep(BlockState& state, int level, const FitConfig& config, Rng& rng, double beta) {
  if (level < 1 || level >= state.numLevels()) return false;
  const double start = state.sigma();
  std::vector<std::pair<int, int>> items;
  for (int s = 0; s < 2; ++s) {
    for (int item : state.movableItems(level, static_cast<Side>(s))) items.emplace_back(s, item);
  }
  std::shuffle(items.begin(), items.end(), rng);
  const bool greedy = std::isinf(beta);
  for (const auto& [si, item] : items) {
    const Side s = static_cast<Side>(si);
    const int current = state.blockOf(level, s, item);
    const int target = proposeTarget(state, level, s, item, config.epsilonExplore, rng);
    if (target == current) continue;
    if (target == BlockState::kFresh && (!state.hasFreeSlot(level, s) || state.blockSize(level, s, current) == 1)) {
      continue;
    }
    const double delta = state.moveDelta(level, s, item, target);
    const bool accept = greedy ? delta < -kDlTolerance : (delta <= 0.0 || uniform01(rng) < std::exp(-beta * delta));
    if (accept) state.move(level, s, item, target);
  }
  return state.sigma() < start - kDlTolerance;
}

namespace {

// Level-1 assignment with every connected node alone and the isolated
// nodes together in the last block.
std::vector<int> singletons(const BipartiteGraph& graph, Side s) {
  std::vector<int> a(graph.numNodes(s));
  int next = 0;
  for (int v = 0; v < graph.numNodes(s); ++v) {
    if (graph.degree(s, v) > 0) a[v] = next++;
  }
  for (int v = 0; v < graph.numNodes(s); ++v) {
    if (graph.degree(s, v) == 0) a[v] = next;
  }
  return a;
}

int countBlocks(const std::vector<int>& a) { return a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1; }

class Search {
 public:
  Search(std::shared_ptr<const BipartiteGraph> graph, const FitConfig& config, Rng& rng, std::array<bool, 2> frozen)
      : graph_(std::move(graph)), config_(config), rng_(rng), frozen_(frozen) {}

  BlockState& state() { return *state_; }

  void reset(const NestedPartition& p) { state_ = std::make_unique<BlockState>(graph_, p, frozen_); }

  std::vector<int> movableBlocks(int level, Side s) const {
    std::vector<int> out;
    if (frozen_[sideIndex(s)]) return out;
    const int iso = level == 1 ? state_->isolatedBlock(s) : -1;
    for (int b : state_->activeBlocks(level, s)) {
      if (b != iso) out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Random merge partner for `block`: the proposal target of a random member.
  int mergePartner(int level, Side s, int block) {
    const auto members = state_->members(level, s, block);
    const int item = members[uniformIndex(rng_, static_cast<int>(members.size()))];
    const int t = proposeTarget(*state_, level, s, item, config_.epsilonExplore, rng_);
    if (t == BlockState::kFresh || t == block) return -1;
    return t;
  }

  // Shrink the number of blocks at `level` by sigmaShrink per step, with
  // sweeps in between, and keep the best state seen.
  void agglomerate(int level) {
    double bestSigma = state_->sigma();
    NestedPartition best = state_->partition();
    struct Candidate {
      double delta;
      int side;
      int from;
      int to;
    };
    for (;;) {
      int total = 0;
      int minimal = 0;
      std::array<std::vector<int>, 2> blocks;
      for (int s = 0; s < 2; ++s) {
        blocks[s] = movableBlocks(level, static_cast<Side>(s));
        total += static_cast<int>(blocks[s].size());
        minimal += blocks[s].empty() ? 0 : 1;
      }
      if (total <= minimal) break;
      const int keep = std::max(minimal, static_cast<int>(std::floor(total / config_.sigmaShrink)));
      const int wanted = std::max(1, total - keep);

      std::vector<Candidate> candidates;
      for (int s = 0; s < 2; ++s) {
        const Side side = static_cast<Side>(s);
        for (int r : blocks[s]) {
          Candidate best{std::numeric_limits<double>::infinity(), s, r, -1};
          for (int k = 0; k < config_.mergeCandidates; ++k) {
            const int t = mergePartner(level, side, r);
            if (t < 0) continue;
            const double d = state_->mergeDelta(level, side, r, t);
            if (d < best.delta) best = {d, s, r, t};
          }
          if (best.to >= 0) candidates.push_back(best);
        }
      }
      if (candidates.empty()) break;
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const Candidate& a, const Candidate& b) { return a.delta < b.delta; });

      std::array<std::vector<int>, 2> parent;
      for (int s = 0; s < 2; ++s) {
        parent[s].resize(graph_->numNodes(static_cast<Side>(s)));
        std::iota(parent[s].begin(), parent[s].end(), 0);
      }
      auto find = [&](int s, int x) {
        while (parent[s][x] != x) x = parent[s][x] = parent[s][parent[s][x]];
        return x;
      };
      int done = 0;
      for (const auto& c : candidates) {
        const int a = find(c.side, c.from);
        const int b = find(c.side, c.to);
        if (a == b) continue;
        state_->merge(level, static_cast<Side>(c.side), a, b);
        parent[c.side][a] = b;
        if (++done >= wanted) break;
      }
      if (done == 0) break;
      for (int i = 0; i < config_.sweepsPerShrink; ++i) {
        if (!sweep(*state_, level, config_, rng_)) break;
      }
      if (state_->sigma() < bestSigma - kDlTolerance) {
        bestSigma = state_->sigma();
        best = state_->partition();
      }
    }
    reset(best);
  }

  // Greedy merges proposed once per block.
  void mergePass(int level) {
    for (int s = 0; s < 2; ++s) {
      const Side side = static_cast<Side>(s);
      auto blocks = movableBlocks(level, side);
      std::shuffle(blocks.begin(), blocks.end(), rng_);
      for (int r : blocks) {
        if (state_->blockSize(level, side, r) == 0) continue;
        const int t = mergePartner(level, side, r);
        if (t < 0) continue;
        if (state_->mergeDelta(level, side, r, t) < -kDlTolerance) state_->merge(level, side, r, t);
      }
    }
  }

  // Edges of `item` to the finest opposite units below `level`, each weighted
  // by the inverse degree of the unit.
  std::vector<std::pair<int, double>> profile(int level, Side s, int item) const {
    std::vector<std::pair<int, double>> out;
    const Side o = opposite(s);
    if (level == 1) {
      for (int u : graph_->neighbors(s, item)) out.emplace_back(u, 1.0 / graph_->degree(o, u));
      return out;
    }
    for (int ob : state_->activeBlocks(level - 1, o)) {
      const int c = state_->edgeCount(level - 1, s, item, ob);
      if (c != 0) out.emplace_back(ob, double(c) / state_->blockDegree(level - 1, o, ob));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static double cosine(const std::vector<std::pair<int, double>>& a, const std::vector<std::pair<int, double>>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, c] : a) na += c * c;
    for (const auto& [k, c] : b) nb += c * c;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i].first < b[j].first) ++i;
      else if (b[j].first < a[i].first) ++j;
      else dot += a[i++].second * b[j++].second;
    }
    return na > 0.0 && nb > 0.0 ? dot / std::sqrt(na * nb) : 0.0;
  }

  struct Undo {
    Side side;
    int item;
    int from;
  };

  void logMove(std::vector<Undo>& log, int level, Side s, int item, int target) {
    log.push_back({s, item, state_->blockOf(level, s, item)});
    state_->move(level, s, item, target);
  }

  // Greedy exchange of the members of blocks x and y; neither is emptied.
  bool polish(std::vector<Undo>& log, int level, Side s, int x, int y, const std::vector<int>& items) {
    bool any = false;
    for (int round = 0; round < 3; ++round) {
      bool moved = false;
      for (int item : items) {
        const int cur = state_->blockOf(level, s, item);
        if (state_->blockSize(level, s, cur) == 1) continue;
        const int other = cur == x ? y : x;
        if (state_->moveDelta(level, s, item, other) < -kDlTolerance) {
          logMove(log, level, s, item, other);
          moved = true;
        }
      }
      if (!moved) break;
      any = true;
    }
    return any;
  }

  // Splits block r around a random member and its least similar peer, then
  // splits the opposite block tied most evenly to both halves along the same
  // line. Undone unless Σ ends below `baseline`.
  bool splitBlock(int level, Side side, int r, double baseline) {
    std::vector<Undo> log;
    const auto span = state_->members(level, side, r);
    std::vector<int> items(span.begin(), span.end());
    std::sort(items.begin(), items.end());
    std::vector<std::vector<std::pair<int, double>>> profiles;
    for (int item : items) profiles.push_back(profile(level, side, item));
    const std::size_t a = uniformIndex(rng_, static_cast<int>(items.size()));
    std::vector<double> simA(items.size());
    std::size_t b = a == 0 ? 1 : 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      simA[i] = cosine(profiles[a], profiles[i]);
      if (i != a && simA[i] < simA[b]) b = i;
    }
    logMove(log, level, side, items[a], BlockState::kFresh);
    const int f = state_->blockOf(level, side, items[a]);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i == a || i == b) continue;
      if (simA[i] > cosine(profiles[b], profiles[i])) logMove(log, level, side, items[i], f);
    }
    polish(log, level, side, r, f, items);
    const std::size_t oneSided = log.size();
    const double oneSidedSigma = state_->sigma();

    const Side o = opposite(side);
    const int iso = level == 1 ? state_->isolatedBlock(o) : -1;
    int best = -1;
    int bestTie = 0;
    if (!frozen_[sideIndex(o)] && state_->hasFreeSlot(level, o)) {
      for (int ob : state_->activeBlocks(level, o)) {
        if (ob == iso || state_->blockSize(level, o, ob) < 2) continue;
        const int tie = std::min(state_->edgeCount(level, side, r, ob), state_->edgeCount(level, side, f, ob));
        if (tie > bestTie || (tie == bestTie && best >= 0 && ob < best)) {
          best = ob;
          bestTie = tie;
        }
      }
    }
    if (best >= 0) {
      const auto ospan = state_->members(level, o, best);
      std::vector<int> oitems(ospan.begin(), ospan.end());
      std::sort(oitems.begin(), oitems.end());
      const double degR = static_cast<double>(state_->blockDegree(level, side, r));
      const double degF = static_cast<double>(state_->blockDegree(level, side, f));
      std::vector<int> toF;
      for (int item : oitems) {
        int er = 0, ef = 0;
        for (const auto& [blk, c] : state_->itemEdges(level, o, item)) {
          if (blk == r) er = c;
          if (blk == f) ef = c;
        }
        if (ef * degR > er * degF) toF.push_back(item);
      }
      if (!toF.empty() && toF.size() < oitems.size()) {
        logMove(log, level, o, toF[0], BlockState::kFresh);
        const int g = state_->blockOf(level, o, toF[0]);
        for (std::size_t i = 1; i < toF.size(); ++i) logMove(log, level, o, toF[i], g);
        for (int round = 0; round < 4; ++round) {
          const bool a1 = polish(log, level, o, best, g, oitems);
          const bool a2 = polish(log, level, side, r, f, items);
          if (!a1 && !a2) break;
        }
      }
    }
    auto undoTo = [&](std::size_t size) {
      for (; log.size() > size; log.pop_back()) state_->move(level, log.back().side, log.back().item, log.back().from);
    };
    if (state_->sigma() >= oneSidedSigma - kDlTolerance) undoTo(oneSided);
    if (state_->sigma() < baseline - kDlTolerance) return true;
    undoTo(0);
    return false;
  }

  // Merges r with a proposed partner and splits the union afresh.
  void mergeSplit(int level, Side side, int r) {
    const int t = mergePartner(level, side, r);
    if (t < 0 || state_->blockSize(level, side, t) + state_->blockSize(level, side, r) < 3) return;
    const double before = state_->sigma();
    const NestedPartition saved = state_->partition();
    state_->merge(level, side, t, r);
    if (!splitBlock(level, side, r, before)) reset(saved);
  }

  void splitPass(int level) {
    for (int s = 0; s < 2; ++s) {
      const Side side = static_cast<Side>(s);
      auto blocks = movableBlocks(level, side);
      std::shuffle(blocks.begin(), blocks.end(), rng_);
      for (int r : blocks) {
        if (state_->blockSize(level, side, r) < 1) continue;
        if (!state_->hasFreeSlot(level, side)) break;
        if (state_->blockSize(level, side, r) >= 2 && splitBlock(level, side, r, state_->sigma())) continue;
        if (level > 1) mergeSplit(level, side, r);
      }
    }
  }

  // Bottom-up then top-down sweeps until `patience` passes bring nothing.
  void refine() {
    const int L = state_->numLevels();
    if (L < 2) return;
    double bestSigma = state_->sigma();
    NestedPartition best = state_->partition();
    int idle = 0;
    for (int pass = 0; idle < config_.patience && pass < config_.maxPasses; ++pass) {
      const double beta = !config_.greedy && pass < static_cast<int>(config_.betaSchedule.size())
                              ? config_.betaSchedule[pass]
                              : std::numeric_limits<double>::infinity();
      for (int l = 1; l < L; ++l) sweep(*state_, l, config_, rng_, beta);
      for (int l = L - 1; l >= 1; --l) sweep(*state_, l, config_, rng_, beta);
      if (std::isinf(beta)) {
        for (int l = 1; l < L; ++l) {
          mergePass(l);
          splitPass(l);
        }
      }
      if (state_->sigma() < bestSigma - kDlTolerance) {
        bestSigma = state_->sigma();
        best = state_->partition();
        idle = 0;
      } else {
        ++idle;
      }
    }
    if (state_->sigma() > bestSigma + kDlTolerance) reset(best);
  }

 private:
  std::shared_ptr<const BipartiteGraph> graph_;
  const FitConfig& config_;
  Rng& rng_;
  std::array<bool, 2> frozen_;
  std::unique_ptr<BlockState> state_;
};

// Drop identity levels (including a redundant top) while that lowers Σ.
NestedPartition dropRedundantLevels(const BipartiteGraph& graph, NestedPartition p) {
  double sigma = descriptionLength(graph, p);
  for (int l = p.numLevels(); l >= 2; --l) {
    if (l > p.numLevels()) continue;
    if (!p.isIdentityLevel(l, Side::Left) || !p.isIdentityLevel(l, Side::Right)) continue;
    NestedPartition q = removeLevel(p, l);
    const double sq = descriptionLength(graph, q);
    if (sq < sigma - kDlTolerance) {
      p = std::move(q);
      sigma = sq;
    }
  }
  return p;
}

struct ChainOutcome {
  NestedPartition partition;
  double sigma = 0.0;
};

template <class Chain>
FitResult runChains(const FitConfig& config, const BipartiteGraph& graph, Chain chain) {
  const int n = config.seeds;
  std::vector<ChainOutcome> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        outcomes[i] = chain(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = fitThreads(config, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  FitResult result;
  for (int i = 0; i < n; ++i) {
    result.chainSigmas.push_back(outcomes[i].sigma);
    if (i == 0 || outcomes[i].sigma < outcomes[result.bestChain].sigma - kDlTolerance) result.bestChain = i;
  }
  result.partition = std::move(outcomes[result.bestChain].partition);
  result.sigma = descriptionLength(graph, result.partition);
  return result;
}

}  // namespace

FitResult fitHierarchy(std::shared_ptr<const BipartiteGraph> graph, const FitConfig& config, std::uint64_t seed) {
  config.validate();
  if (!graph || graph->numNodes() == 0) throw std::invalid_argument("cannot fit an empty graph");
  const int nl = graph->numNodes(Side::Left);
  const int nr = graph->numNodes(Side::Right);
  if (graph->numEdges() == 0) {
    LevelAssignment level{std::vector<int>(nl, 0), std::vector<int>(nr, 0)};
    FitResult result;
    result.partition = NestedPartition(nl, nr, {level});
    result.sigma = descriptionLength(*graph, result.partition);
    result.chainSigmas.assign(config.seeds, result.sigma);
    result.warnings.push_back("graph has no edges; returning one block per side");
    return result;
  }

  LevelAssignment level1{singletons(*graph, Side::Left), singletons(*graph, Side::Right)};
  LevelAssignment top{std::vector<int>(countBlocks(level1[0]), 0), std::vector<int>(countBlocks(level1[1]), 0)};
  const NestedPartition initial(nl, nr, {level1, top});

  auto chain = [&](int index) {
    Rng rng = chainRng(seed, index);
    Search search(graph, config, rng, {false, false});
    search.reset(initial);
    search.agglomerate(1);
    for (;;) {
      const double start = search.state().sigma();
      for (;;) {
        BlockState& st = search.state();
        const int L = st.numLevels();
        if (st.numBlocks(L - 1, Side::Left) <= 1 && st.numBlocks(L - 1, Side::Right) <= 1) break;
        const double before = st.sigma();
        const NestedPartition saved = st.partition();
        search.reset(insertIdentityLevel(saved, L));
        search.agglomerate(L);
        if (search.state().sigma() < before - kDlTolerance) continue;
        search.reset(saved);
        break;
      }
      search.refine();
      if (search.state().sigma() >= start - kDlTolerance) break;
    }
    NestedPartition p = canonicalize(dropRedundantLevels(*graph, search.state().partition()));
    const double sigma = descriptionLength(*graph, p);
    return ChainOutcome{std::move(p), sigma};
  };
  return runChains(config, *graph, chain);
}

FitResult fitChained(std::shared_ptr<const BipartiteGraph> graph, const std::vector<std::vector<int>>& leftLevels,
                     const FitConfig& config, std::uint64_t seed) {
  config.validate();
  if (!graph) throw std::invalid_argument("chained fit needs a graph");
  if (leftLevels.empty()) throw std::invalid_argument("chained fit needs the document hierarchy");
  const int nl = graph->numNodes(Side::Left);
  const int nr = graph->numNodes(Side::Right);
  const int L = static_cast<int>(leftLevels.size());

  std::vector<LevelAssignment> levels(L);
  std::vector<int> right = singletons(*graph, Side::Right);
  for (int l = 1; l <= L; ++l) {
    levels[l - 1][0] = leftLevels[l - 1];
    if (l == L) {
      levels[l - 1][1].assign(countBlocks(right), 0);
    } else if (l == 1) {
      levels[l - 1][1] = right;
    } else {
      levels[l - 1][1].resize(countBlocks(right));
      std::iota(levels[l - 1][1].begin(), levels[l - 1][1].end(), 0);
    }
  }
  FitResult result;
  if (L == 1 || graph->numEdges() == 0) {
    if (graph->numEdges() == 0) result.warnings.push_back("metadata graph has no edges; one metadata block");
    for (int l = 1; l <= L; ++l) levels[l - 1][1].assign(l == 1 ? nr : (nr > 0 ? 1 : 0), 0);
    result.partition = NestedPartition(nl, nr, levels);
    result.sigma = descriptionLength(*graph, result.partition);
    result.chainSigmas.assign(config.seeds, result.sigma);
    return result;
  }

  const NestedPartition initial(nl, nr, levels);
  auto chain = [&](int index) {
    Rng rng = chainRng(seed, index);
    Search search(graph, config, rng, {true, false});
    search.reset(initial);
    for (int l = 1; l < L; ++l) search.agglomerate(l);
    search.refine();
    NestedPartition p = canonicalize(search.state().partition(), {false, true});
    const double sigma = descriptionLength(*graph, p);
    return ChainOutcome{std::move(p), sigma};
  };
  return runChains(config, *graph, chain);
}

}  // namespace carto
