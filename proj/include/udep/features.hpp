#ifndef UDEP_FEATURES_HPP
#define UDEP_FEATURES_HPP

#include <cstdint>
#include <vector>

#include "udep/types.hpp"
#include "udep/vocab.hpp"

namespace udep {

constexpr int kFeatureBits = 22;
constexpr uint32_t kFeatureSpace = 1u << kFeatureBits;
constexpr uint32_t kFeatureMask = kFeatureSpace - 1;

enum class PartKind { kArc, kSibling };

// A scored fragment of a tree: a head-dependent arc, or an arc together with
// the dependent's adjacent inner sibling on the same side (sib = -1 when the
// dependent is the innermost on its side).
struct FeaturePart {
  PartKind kind = PartKind::kArc;
  int head = 0;
  int dep = 0;
  int sib = -1;

  static FeaturePart arc(int h, int d) { return {PartKind::kArc, h, d, -1}; }
  static FeaturePart sibling(int h, int d, int s) { return {PartKind::kSibling, h, d, s}; }
};

// Second-order MST-style template set over POS tags and vocabulary-mapped
// norm strings, with direction/distance-bucket conjunctions. Ids are hashed
// into the 2^22 feature space with a fixed seed.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const Vocabulary& vocab) : vocab_(&vocab) {}

  std::vector<uint32_t> extract(const Sentence& s, const FeaturePart& part) const;
  void extract(const Sentence& s, const FeaturePart& part, std::vector<uint32_t>* out) const;

  const Vocabulary& vocab() const { return *vocab_; }

 private:
  const Vocabulary* vocab_;
};

// All parts of a full tree: one ARC and one SIBLING part per token
// (including the ROOT arc, whose sibling slot is always empty).
std::vector<FeaturePart> tree_parts(const DepTree& t);

}  // namespace udep

#endif  // UDEP_FEATURES_HPP
