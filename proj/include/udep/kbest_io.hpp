#ifndef UDEP_KBEST_IO_HPP
#define UDEP_KBEST_IO_HPP

#include <string>
#include <vector>

#include "udep/eisner.hpp"

namespace udep {

// One k-best list per training sentence, in corpus order.
struct KBestSet {
  std::vector<KBestList> lists;

  int size() const { return static_cast<int>(lists.size()); }
};

// File format: each candidate is a CoNLL block preceded by
//   #cand=i/K   (i = 1-based rank, K = number of candidates for the sentence)
//   #score=...
// A candidate with i == 1 starts a new sentence.
void write_kbest(const KBestSet& set, const std::string& path);
KBestSet read_kbest(const std::string& path);

}  // namespace udep

#endif  // UDEP_KBEST_IO_HPP
