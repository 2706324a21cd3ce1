#ifndef UDEP_DMV_HPP
#define UDEP_DMV_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "udep/types.hpp"

namespace udep {

// Dependency Model with Valence over POS tags. Valence is binary: 0 while a
// head has not yet taken a dependent on a side, 1 afterwards.
struct DmvParams {
  std::vector<std::string> pos;  // id -> tag
  std::unordered_map<std::string, int> pos_ids;

  // choose[dir][h * P + d] = P(dep tag d | head tag h, dir)
  std::vector<double> choose[2];
  // stop[dir][h * 2 + v] = P(stop | head tag h, dir, valence v)
  std::vector<double> stop[2];
  // root[h] = P(root tag h)
  std::vector<double> root;

  int num_pos() const { return static_cast<int>(pos.size()); }
  int pos_id(const std::string& tag) const {
    auto it = pos_ids.find(tag);
    return it == pos_ids.end() ? -1 : it->second;
  }
  int add_pos(const std::string& tag);

  // Log probabilities with uniform backoff for tags unseen at training time
  // (id -1) and 0.5 stop backoff.
  double choose_lp(int head, Dir dir, int dep) const;
  double stop_lp(int head, Dir dir, int valence, bool do_stop) const;
  double root_lp(int head) const;

  void check_normalized(double tol = 1e-9) const;

  void save(const std::string& path) const;
  static DmvParams load(const std::string& path);
};

// p_choose proportional to summed 1/distance co-occurrence counts (with the
// same additive smoothing used in re-estimation), p_stop = 0.5 everywhere,
// p_root smoothed-uniform over observed tags.
DmvParams harmonic_init(const std::vector<Sentence>& sentences, double smoothing = 0.1);

// Exact max-probability projective single-root tree under the DMV.
std::pair<DepTree, double> viterbi_parse_dmv(const DmvParams& params, const Sentence& s);

// Direct generative score of a fixed tree (used by tests and the M-step
// optimality invariant); independent of the chart decoder.
double dmv_tree_logprob(const DmvParams& params, const Sentence& s, const DepTree& t);

// Closed-form relative-frequency re-estimation with additive smoothing.
// The tag inventory is carried over from `inventory`.
DmvParams reestimate_dmv(const std::vector<Sentence>& sentences,
                         const std::vector<DepTree>& trees,
                         const DmvParams& inventory, double smoothing);

// Alternates corpus Viterbi decoding and re-estimation. The corpus
// log-probability of iteration i (under the params entering that iteration)
// is appended to *logprob_log when given.
DmvParams hard_em_train(const std::vector<Sentence>& sentences, const DmvParams& init,
                        int iters, double smoothing = 0.1,
                        std::vector<double>* logprob_log = nullptr, int threads = 1);

Treebank annotate(const DmvParams& params, const std::vector<Sentence>& sentences,
                  int threads = 1);

// Synthetic corpus generation: head-outward sampling from a DMV, with word
// surfaces drawn from a small per-tag lexicon. Sentences longer than max_len
// are rejected and resampled.
struct SynthOptions {
  int max_len = 10;
  int lexicon_size = 25;
  uint64_t seed = 1;
};
Treebank sample_treebank(const DmvParams& params, int count, const SynthOptions& opts);

}  // namespace udep

#endif  // UDEP_DMV_HPP
