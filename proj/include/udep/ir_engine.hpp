#ifndef UDEP_IR_ENGINE_HPP
#define UDEP_IR_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "udep/embeddings.hpp"
#include "udep/iornn.hpp"
#include "udep/kbest_io.hpp"
#include "udep/types.hpp"
#include "udep/vocab.hpp"
#include "udep/weights.hpp"

namespace udep {

struct RerankerConfig {
  int dim = 50;
  int iters = 5;
  double lr = 0.1;
  int word_dim = 50;
  int pos_dim = 10;
  int cap_dim = 5;
};

struct PhaseConfig {
  int max_len = 15;
  int iterations = 1;
  int k = 10;
  int iters_mst = 1;  // 1 = MaxEnc, 10 = MinEnc
  RerankerConfig reranker;
  uint64_t seed = 1;
  int threads = 1;
  bool warm_start = false;  // reuse the previous iteration's models as init
};

struct ManifestRecord {
  int phase = 0;
  int iteration = 0;  // 0 marks a phase's starting treebank
  uint64_t checksum = 0;
  std::optional<double> mean_logprob;  // mean reranker logprob of selected trees
  std::optional<double> dda;           // vs gold, when gold is available
  bool fixed_point = false;
  double wall_seconds = 0;  // logged to the run log, never to the manifest file
  std::string treebank_file;
};

struct IterationResult {
  Treebank next;
  WeightModel parser;
  IornnParams reranker;
  KBestSet kbest;
  ManifestRecord record;
};

// One IR step: train P and R on D (fresh models unless warm-started),
// generate the per-sentence k-best neighborhood, select each sentence's
// reranker argmax. The output covers exactly D's sentences in order.
IterationResult ir_iteration(const Treebank& D, const Vocabulary& vocab,
                             const PhaseConfig& cfg,
                             const EmbeddingTable* embeddings = nullptr,
                             const Treebank* gold = nullptr,
                             const WeightModel* warm_parser = nullptr,
                             const IornnParams* warm_reranker = nullptr);

struct PhaseResult {
  Treebank treebank;
  WeightModel parser;
  IornnParams reranker;
  int last_iteration = 0;
  bool fixed_point = false;
  bool halted = false;  // iteration budget exhausted before the phase ended
};

// Runs up to cfg.iterations IR iterations starting from D_start, stopping
// early at a treebank fixed point. `sentences` must be exactly D_start's
// sentence sequence. `first_iteration`/`iteration_budget` support resuming
// and staged runs; `sink` sees every completed iteration.
PhaseResult run_phase(const Treebank& D_start, const std::vector<Sentence>& sentences,
                      const PhaseConfig& cfg, const Vocabulary& vocab,
                      const EmbeddingTable* embeddings = nullptr,
                      const Treebank* gold = nullptr, int first_iteration = 1,
                      int iteration_budget = 0,
                      const std::function<void(const IterationResult&)>& sink = {});

// Test-set decoding with the final models: k-best parse then rerank.
Treebank parse_final(const WeightModel& parser, const IornnParams& reranker,
                     const Vocabulary& vocab, const std::vector<Sentence>& sentences,
                     int k, int threads = 1);

// Phase 1 at base.max_len, then one phase per length up to final_max_len.
// Phase 1 runs phase1_iterations, later phases one iteration each.
std::vector<PhaseConfig> default_schedule(const PhaseConfig& base, int final_max_len = 25,
                                          int phase1_iterations = 100);

struct MpirOptions {
  std::vector<PhaseConfig> schedule;
  int phase0_iters = 10;
  double phase0_smoothing = 0.1;
  int vocab_min_count = 3;
  std::string out_dir;          // empty: keep everything in memory
  std::string embeddings_path;  // empty: random word vectors
  bool resume = true;
  int halt_after_iterations = 0;  // stop cleanly after N iterations this run
  std::map<std::string, std::string> config_echo;  // manifest header lines
};

struct MpirResult {
  Treebank treebank;
  WeightModel parser;
  IornnParams reranker;
  Vocabulary vocab;
  bool halted_early = false;
};

// The full pipeline: DMV phase 0 on the shortest slice, iterated reranking
// per phase, previous-phase models generating each next phase's starting
// treebank. Gold trees in `corpus`, when present, are used only for DDA
// logging.
MpirResult run_mpir(const Treebank& corpus, const MpirOptions& opts);

}  // namespace udep

#endif  // UDEP_IR_ENGINE_HPP
