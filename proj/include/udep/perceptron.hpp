#ifndef UDEP_PERCEPTRON_HPP
#define UDEP_PERCEPTRON_HPP

#include <cstdint>
#include <vector>

#include "udep/features.hpp"
#include "udep/types.hpp"
#include "udep/weights.hpp"

namespace udep {

// Averaged structured perceptron with 1-best decoding as the constraint
// generator. Sentences are shuffled per epoch from the given seed. Throws if
// any gold tree is missing or non-projective, identifying the sentence.
// `warm` seeds the raw weights from a previous model's scoring weights.
WeightModel train_parser(const Treebank& tb, const FeatureExtractor& fx,
                         int iters_mst, uint64_t seed,
                         std::vector<int>* mistakes_per_epoch = nullptr,
                         const WeightModel* warm = nullptr);

}  // namespace udep

#endif  // UDEP_PERCEPTRON_HPP
