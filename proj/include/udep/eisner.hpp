#ifndef UDEP_EISNER_HPP
#define UDEP_EISNER_HPP

#include <utility>
#include <vector>

#include "udep/features.hpp"
#include "udep/types.hpp"
#include "udep/weights.hpp"

namespace udep {

struct KBestList {
  Sentence sentence;
  // Ordered by score descending; exact score ties are ordered by the head
  // vector, lexicographically ascending. Candidates are pairwise distinct.
  std::vector<std::pair<DepTree, double>> candidates;

  int size() const { return static_cast<int>(candidates.size()); }
};

// Exact top-k projective single-root trees under the arc+sibling factored
// score. Returns fewer than k only when fewer distinct trees exist.
KBestList parse_kbest(const WeightModel& model, const FeatureExtractor& fx,
                      const Sentence& s, int k);

// 1-best shortcut used by the trainer.
DepTree parse_best(const WeightModel& model, const FeatureExtractor& fx,
                   const Sentence& s);

}  // namespace udep

#endif  // UDEP_EISNER_HPP
