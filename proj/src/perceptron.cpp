#include "udep/perceptron.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "udep/eisner.hpp"
#include "udep/rng.hpp"

namespace udep {

WeightModel train_parser(const Treebank& tb, const FeatureExtractor& fx,
                         int iters_mst, uint64_t seed,
                         std::vector<int>* mistakes_per_epoch,
                         const WeightModel* warm) {
  if (iters_mst < 1) throw std::invalid_argument("train_parser: iters_MST must be >= 1");
  if (tb.size() == 0) throw std::invalid_argument("train_parser: empty treebank");
  for (int i = 0; i < tb.size(); ++i) {
    const auto& e = tb.entries[i];
    if (!e.tree.has_value()) {
      throw std::runtime_error("train_parser: sentence " + std::to_string(i) +
                               " has no gold tree");
    }
    if (!is_valid_tree(*e.tree) || e.tree->size() != e.sentence.size()) {
      throw std::runtime_error("train_parser: sentence " + std::to_string(i) +
                               " has a non-projective or invalid gold tree");
    }
  }

  WeightModel model;
  if (warm) model.weights = warm->active();
  std::vector<double> totals(kFeatureSpace, 0.0);
  std::vector<int64_t> last(kFeatureSpace, 0);
  int64_t t = 1;
  auto bump = [&](uint32_t id, double delta) {
    totals[id] += static_cast<double>(t - last[id]) * model.weights[id];
    last[id] = t;
    model.weights[id] += delta;
  };

  std::vector<int> order(tb.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<uint32_t> ids;
  for (int epoch = 0; epoch < iters_mst; ++epoch) {
    auto rng = make_rng(derive_seed(seed, 0x5u, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    int mistakes = 0;
    for (int idx : order) {
      const Sentence& s = tb.entries[idx].sentence;
      const DepTree& gold = *tb.entries[idx].tree;
      DepTree pred = parse_best(model, fx, s);
      if (!(pred == gold)) {
        ++mistakes;
        for (const auto& part : tree_parts(gold)) {
          ids.clear();
          fx.extract(s, part, &ids);
          for (uint32_t id : ids) bump(id, 1.0);
        }
        for (const auto& part : tree_parts(pred)) {
          ids.clear();
          fx.extract(s, part, &ids);
          for (uint32_t id : ids) bump(id, -1.0);
        }
      }
      ++t;
    }
    if (mistakes_per_epoch) mistakes_per_epoch->push_back(mistakes);
  }

  model.averaged.assign(kFeatureSpace, 0.0);
  const double steps = static_cast<double>(t - 1);
  for (uint32_t id = 0; id < kFeatureSpace; ++id) {
    double total = totals[id] + static_cast<double>(t - last[id]) * model.weights[id];
    if (total != 0.0) model.averaged[id] = total / steps;
  }
  model.averaged_finalized = true;
  return model;
}

}  // namespace udep
