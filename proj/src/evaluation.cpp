#include "udep/evaluation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace udep {

namespace {

void check_aligned(const Treebank& gold, const Treebank& pred) {
  if (gold.size() != pred.size()) {
    throw std::runtime_error("treebank size mismatch: gold " + std::to_string(gold.size()) +
                             " vs pred " + std::to_string(pred.size()));
  }
  for (int i = 0; i < gold.size(); ++i) {
    if (gold.entries[i].sentence.size() != pred.entries[i].sentence.size()) {
      throw std::runtime_error("sentence mismatch at index " + std::to_string(i));
    }
    if (!gold.entries[i].tree.has_value() || !pred.entries[i].tree.has_value()) {
      throw std::runtime_error("missing tree at index " + std::to_string(i));
    }
  }
}

bool counted(const Entry& gold_e, int pos, const EvalOptions& opts) {
  return opts.exclude_pos.empty() ||
         opts.exclude_pos.count(gold_e.sentence.at(pos).pos) == 0;
}

}  // namespace

double dda(const Treebank& gold, const Treebank& pred, const EvalOptions& opts) {
  check_aligned(gold, pred);
  long correct = 0, total = 0;
  for (int i = 0; i < gold.size(); ++i) {
    const auto& g = *gold.entries[i].tree;
    const auto& p = *pred.entries[i].tree;
    for (int d = 1; d <= g.size(); ++d) {
      if (!counted(gold.entries[i], d, opts)) continue;
      ++total;
      if (g.head(d) == p.head(d)) ++correct;
    }
  }
  if (total == 0) throw std::runtime_error("dda: no tokens to score");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double dda_at(const Treebank& gold, const Treebank& pred, int cap, const EvalOptions& opts) {
  check_aligned(gold, pred);
  Treebank g2, p2;
  for (int i = 0; i < gold.size(); ++i) {
    if (gold.entries[i].sentence.size() <= cap) {
      g2.entries.push_back(gold.entries[i]);
      p2.entries.push_back(pred.entries[i]);
    }
  }
  if (g2.size() == 0) {
    throw std::runtime_error("dda_at: no sentences of length <= " + std::to_string(cap));
  }
  return dda(g2, p2, opts);
}

std::vector<DistanceBinStats> head_distance_report(const Treebank& gold,
                                                   const Treebank& pred,
                                                   const std::vector<int>& bins,
                                                   const EvalOptions& opts) {
  check_aligned(gold, pred);
  if (bins.empty()) throw std::invalid_argument("head_distance_report: empty bin list");
  // bin index: 0..bins.size()-1 for distances, bins.size() for ROOT arcs.
  const int root_bin = static_cast<int>(bins.size());
  auto bin_of = [&](int head, int dep) {
    if (head == 0) return root_bin;
    int dist = std::abs(head - dep);
    for (size_t b = 0; b + 1 < bins.size(); ++b) {
      if (dist <= bins[b]) return static_cast<int>(b);
    }
    return static_cast<int>(bins.size()) - 1;
  };

  std::vector<DistanceBinStats> stats(bins.size() + 1);
  for (size_t b = 0; b < bins.size(); ++b) {
    bool last = (b + 1 == bins.size());
    stats[b].label = last ? (">=" + std::to_string(bins[b])) : std::to_string(bins[b]);
  }
  stats[root_bin].label = "ROOT";

  for (int i = 0; i < gold.size(); ++i) {
    const auto& g = *gold.entries[i].tree;
    const auto& p = *pred.entries[i].tree;
    for (int d = 1; d <= g.size(); ++d) {
      if (!counted(gold.entries[i], d, opts)) continue;
      int gb = bin_of(g.head(d), d);
      int pb = bin_of(p.head(d), d);
      ++stats[gb].gold_arcs;
      ++stats[pb].pred_arcs;
      if (g.head(d) == p.head(d)) ++stats[gb].correct;
    }
  }
  for (auto& s : stats) {
    s.precision = s.pred_arcs > 0 ? static_cast<double>(s.correct) / s.pred_arcs : 0.0;
    s.recall = s.gold_arcs > 0 ? static_cast<double>(s.correct) / s.gold_arcs : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
  }
  return stats;
}

std::vector<PosAccuracy> pos_accuracy_report(const Treebank& gold, const Treebank& pred,
                                             const EvalOptions& opts) {
  check_aligned(gold, pred);
  std::map<std::string, PosAccuracy> by_pos;
  for (int i = 0; i < gold.size(); ++i) {
    const auto& g = *gold.entries[i].tree;
    const auto& p = *pred.entries[i].tree;
    for (int d = 1; d <= g.size(); ++d) {
      if (!counted(gold.entries[i], d, opts)) continue;
      const std::string& tag = gold.entries[i].sentence.at(d).pos;
      auto& acc = by_pos[tag];
      acc.pos = tag;
      ++acc.total;
      if (g.head(d) == p.head(d)) ++acc.correct;
    }
  }
  std::vector<PosAccuracy> out;
  out.reserve(by_pos.size());
  for (auto& [tag, acc] : by_pos) {
    acc.accuracy = acc.total > 0 ? static_cast<double>(acc.correct) / acc.total : 0.0;
    out.push_back(acc);
  }
  std::sort(out.begin(), out.end(), [](const PosAccuracy& a, const PosAccuracy& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.pos < b.pos;
  });
  return out;
}

EvalReport build_report(const Treebank& gold, const Treebank& pred,
                        const std::vector<int>& caps, const EvalOptions& opts) {
  EvalReport report;
  report.dda = dda(gold, pred, opts);
  for (int cap : caps) report.dda_at[cap] = dda_at(gold, pred, cap, opts);
  report.distance_bins = head_distance_report(gold, pred, {1, 2, 3, 4, 5, 6, 7}, opts);
  report.pos_accuracy = pos_accuracy_report(gold, pred, opts);
  return report;
}

std::string report_tsv(const EvalReport& report) {
  std::ostringstream out;
  out << "dda\t" << report.dda << '\n';
  for (const auto& [cap, v] : report.dda_at) {
    out << "dda@" << cap << '\t' << v << '\n';
  }
  out << "bin\tprecision\trecall\tf1\tgold_arcs\tpred_arcs\n";
  for (const auto& b : report.distance_bins) {
    out << b.label << '\t' << b.precision << '\t' << b.recall << '\t' << b.f1 << '\t'
        << b.gold_arcs << '\t' << b.pred_arcs << '\n';
  }
  out << "pos\taccuracy\tcorrect\ttotal\n";
  for (const auto& p : report.pos_accuracy) {
    out << p.pos << '\t' << p.accuracy << '\t' << p.correct << '\t' << p.total << '\n';
  }
  return out.str();
}

std::string report_json(const EvalReport& report) {
  nlohmann::json j;
  j["dda"] = report.dda;
  for (const auto& [cap, v] : report.dda_at) {
    j["dda_at"][std::to_string(cap)] = v;
  }
  j["head_distance_bins"] = nlohmann::json::array();
  for (const auto& b : report.distance_bins) {
    j["head_distance_bins"].push_back({{"bin", b.label},
                                       {"precision", b.precision},
                                       {"recall", b.recall},
                                       {"f1", b.f1},
                                       {"gold_arcs", b.gold_arcs},
                                       {"pred_arcs", b.pred_arcs}});
  }
  j["pos_accuracy"] = nlohmann::json::array();
  for (const auto& p : report.pos_accuracy) {
    j["pos_accuracy"].push_back({{"pos", p.pos},
                                 {"accuracy", p.accuracy},
                                 {"correct", p.correct},
                                 {"total", p.total}});
  }
  return j.dump(2);
}

}  // namespace udep
