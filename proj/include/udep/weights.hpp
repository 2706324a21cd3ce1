#ifndef UDEP_WEIGHTS_HPP
#define UDEP_WEIGHTS_HPP

#include <string>
#include <vector>

#include "udep/features.hpp"
#include "udep/types.hpp"

namespace udep {

struct WeightModel {
  std::string template_version = "arcsib-v1";
  int feature_bits = kFeatureBits;
  std::vector<double> weights;   // raw (final perceptron state)
  std::vector<double> averaged;  // averaged-perceptron weights
  bool averaged_finalized = false;

  WeightModel() : weights(kFeatureSpace, 0.0) {}

  // Decoding and scoring use the averaged weights once finalized.
  const std::vector<double>& active() const {
    return averaged_finalized ? averaged : weights;
  }

  double score_ids(const std::vector<uint32_t>& ids) const {
    const auto& w = active();
    double s = 0;
    for (uint32_t id : ids) s += w[id];
    return s;
  }

  // Text format: `featureid<TAB>weight` lines under a version header.
  // Binary format: the same header line followed by packed id/weight pairs.
  // load() recognizes either.
  void save(const std::string& path, bool binary = false) const;
  static WeightModel load(const std::string& path);
};

// Sum of part scores over all parts of the tree. Matches the chart decoder's
// internal scores up to floating-point summation order.
double score_tree(const WeightModel& model, const FeatureExtractor& fx,
                  const Sentence& s, const DepTree& t);

double score_part(const WeightModel& model, const FeatureExtractor& fx,
                  const Sentence& s, const FeaturePart& part);

}  // namespace udep

#endif  // UDEP_WEIGHTS_HPP
