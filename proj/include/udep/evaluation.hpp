#ifndef UDEP_EVALUATION_HPP
#define UDEP_EVALUATION_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "udep/types.hpp"

namespace udep {

// Tokens whose gold POS is in `exclude_pos` are dropped from all counts.
struct EvalOptions {
  std::set<std::string> exclude_pos;
};

// Directed dependency accuracy: fraction of counted tokens whose predicted
// head equals the gold head. ROOT (head 0) is a valid head.
double dda(const Treebank& gold, const Treebank& pred, const EvalOptions& opts = {});

// DDA restricted to sentences of length <= cap. Errors if no sentence
// qualifies (empty denominator).
double dda_at(const Treebank& gold, const Treebank& pred, int cap,
              const EvalOptions& opts = {});

struct DistanceBinStats {
  std::string label;
  long gold_arcs = 0;
  long pred_arcs = 0;
  long correct = 0;  // arcs correct in both (same head => same distance bin)
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Precision/recall over binned |head - dep| distance. `bins` lists the
// distances given their own bin; the last entry is open-ended (>=). ROOT
// attachments form a dedicated bin.
std::vector<DistanceBinStats> head_distance_report(
    const Treebank& gold, const Treebank& pred,
    const std::vector<int>& bins = {1, 2, 3, 4, 5, 6, 7}, const EvalOptions& opts = {});

struct PosAccuracy {
  std::string pos;
  long correct = 0;
  long total = 0;
  double accuracy = 0;
};

// Correct-head accuracy per dependent POS, sorted by tag frequency
// descending (ties by tag name).
std::vector<PosAccuracy> pos_accuracy_report(const Treebank& gold, const Treebank& pred,
                                             const EvalOptions& opts = {});

struct EvalReport {
  double dda = 0;
  std::map<int, double> dda_at;
  std::vector<DistanceBinStats> distance_bins;
  std::vector<PosAccuracy> pos_accuracy;
};

EvalReport build_report(const Treebank& gold, const Treebank& pred,
                        const std::vector<int>& caps = {},
                        const EvalOptions& opts = {});

std::string report_tsv(const EvalReport& report);
std::string report_json(const EvalReport& report);

}  // namespace udep

#endif  // UDEP_EVALUATION_HPP
