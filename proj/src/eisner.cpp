#include "udep/eisner.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace udep {

// Second-order sibling decomposition after McDonald & Pereira: incomplete
// items are built either from the dependent's inner triangle (first child)
// or from a sibling-pair span plus the previous incomplete item. Every tree
// has exactly one derivation, so k-best lists over derivations are k-best
// lists over trees.
//
// Each chart cell keeps up to k candidates; a candidate carries the head
// assignment of the positions its span covers, so candidates order totally
// by (score desc, assignment lex asc) and cell-level pruning under that
// order is globally exact, ties included.

namespace {

struct Cand {
  double score = 0;
  std::vector<int> heads;  // heads of the cell's covered positions, in order
};

using CandList = std::vector<Cand>;

// Worse-than for a max-heap: higher score first, then lexicographically
// smaller assignment first.
bool cand_worse(const Cand& a, const Cand& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.heads > b.heads;
}

enum ArcSlot { kNoArc = 0, kFront, kMid, kBack };

struct Instance {
  const CandList* a = nullptr;
  const CandList* b = nullptr;  // null for unary rules
  double bonus = 0;
  ArcSlot slot = kNoArc;
  int arc_head = -1;
};

struct HeapItem {
  Cand cand;
  int inst, ia, ib;
};

struct HeapWorse {
  bool operator()(const HeapItem& x, const HeapItem& y) const {
    if (x.cand.score != y.cand.score || x.cand.heads != y.cand.heads) {
      return cand_worse(x.cand, y.cand);
    }
    if (x.inst != y.inst) return x.inst > y.inst;
    if (x.ia != y.ia) return x.ia > y.ia;
    return x.ib > y.ib;
  }
};

Cand combine(const Instance& inst, int ia, int ib) {
  const Cand& a = (*inst.a)[ia];
  Cand out;
  out.score = inst.bonus + a.score;
  size_t total = a.heads.size() + (inst.slot != kNoArc ? 1 : 0);
  if (inst.b) {
    out.score += (*inst.b)[ib].score;
    total += (*inst.b)[ib].heads.size();
  }
  out.heads.reserve(total);
  if (inst.slot == kFront) out.heads.push_back(inst.arc_head);
  out.heads.insert(out.heads.end(), a.heads.begin(), a.heads.end());
  if (inst.slot == kMid) out.heads.push_back(inst.arc_head);
  if (inst.b) {
    const Cand& b = (*inst.b)[ib];
    out.heads.insert(out.heads.end(), b.heads.begin(), b.heads.end());
  }
  if (inst.slot == kBack) out.heads.push_back(inst.arc_head);
  return out;
}

// Lazy k-best merge over all rule instances of one cell.
CandList build_cell(const std::vector<Instance>& insts, int k) {
  std::priority_queue<HeapItem, std::vector<HeapItem>, HeapWorse> heap;
  std::unordered_set<uint64_t> seen;
  auto push = [&](int i, int ia, int ib) {
    const Instance& inst = insts[i];
    if (ia >= static_cast<int>(inst.a->size())) return;
    if (inst.b && ib >= static_cast<int>(inst.b->size())) return;
    if (!inst.b && ib > 0) return;
    uint64_t key = (static_cast<uint64_t>(i) << 40) | (static_cast<uint64_t>(ia) << 20) |
                   static_cast<uint64_t>(ib);
    if (!seen.insert(key).second) return;
    heap.push(HeapItem{combine(inst, ia, ib), i, ia, ib});
  };
  for (int i = 0; i < static_cast<int>(insts.size()); ++i) push(i, 0, 0);
  CandList out;
  out.reserve(k);
  while (static_cast<int>(out.size()) < k && !heap.empty()) {
    HeapItem top = heap.top();
    heap.pop();
    out.push_back(std::move(top.cand));
    push(top.inst, top.ia + 1, top.ib);
    push(top.inst, top.ia, top.ib + 1);
  }
  return out;
}

struct Chart {
  int n, k;
  std::vector<CandList> cr, cl, ir, il, sib;

  Chart(int n_, int k_) : n(n_), k(k_) {
    size_t m = static_cast<size_t>(n + 1) * (n + 1);
    cr.resize(m);
    cl.resize(m);
    ir.resize(m);
    il.resize(m);
    sib.resize(m);
  }
  size_t at(int i, int j) const { return static_cast<size_t>(i) * (n + 1) + j; }
};

}  // namespace

KBestList parse_kbest(const WeightModel& model, const FeatureExtractor& fx,
                      const Sentence& s, int k) {
  if (k < 1) throw std::invalid_argument("parse_kbest: k must be >= 1");
  const int n = s.size();
  if (n < 1) throw std::invalid_argument("parse_kbest: empty sentence");

  // Precomputed first-order arc scores; sibling scores are computed at
  // instance creation (each triple is needed exactly once).
  std::vector<double> arc(static_cast<size_t>(n + 1) * (n + 1), 0.0);
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) {
      if (d == h) continue;
      arc[static_cast<size_t>(h) * (n + 1) + d] =
          score_part(model, fx, s, FeaturePart::arc(h, d));
    }
  }
  auto arc_score = [&](int h, int d) { return arc[static_cast<size_t>(h) * (n + 1) + d]; };
  auto sib_score = [&](int h, int d, int sb) {
    return score_part(model, fx, s, FeaturePart::sibling(h, d, sb));
  };

  Chart c(n, k);
  for (int i = 1; i <= n; ++i) {
    c.cr[c.at(i, i)] = {Cand{0.0, {}}};
    c.cl[c.at(i, i)] = {Cand{0.0, {}}};
  }

  std::vector<Instance> insts;
  for (int w = 1; w < n; ++w) {
    // Incomplete items.
    for (int i = 1; i + w <= n; ++i) {
      int j = i + w;
      // IR[i][j]: arc i->j, covering i+1..j.
      insts.clear();
      insts.push_back(Instance{&c.cl[c.at(i + 1, j)], nullptr,
                               arc_score(i, j) + sib_score(i, j, -1), kBack, i});
      for (int sb = i + 1; sb < j; ++sb) {
        insts.push_back(Instance{&c.ir[c.at(i, sb)], &c.sib[c.at(sb, j)],
                                 arc_score(i, j) + sib_score(i, j, sb), kBack, i});
      }
      c.ir[c.at(i, j)] = build_cell(insts, k);

      // IL[i][j]: arc j->i, covering i..j-1.
      insts.clear();
      insts.push_back(Instance{&c.cr[c.at(i, j - 1)], nullptr,
                               arc_score(j, i) + sib_score(j, i, -1), kFront, j});
      for (int sb = i + 1; sb < j; ++sb) {
        insts.push_back(Instance{&c.sib[c.at(i, sb)], &c.il[c.at(sb, j)],
                                 arc_score(j, i) + sib_score(j, i, sb), kFront, j});
      }
      c.il[c.at(i, j)] = build_cell(insts, k);
    }
    // Sibling spans: S[i][j] covers i+1..j-1, i and j pending siblings.
    for (int i = 1; i + w <= n; ++i) {
      int j = i + w;
      insts.clear();
      for (int m = i; m < j; ++m) {
        insts.push_back(Instance{&c.cr[c.at(i, m)], &c.cl[c.at(m + 1, j)], 0.0, kNoArc, -1});
      }
      c.sib[c.at(i, j)] = build_cell(insts, k);
    }
    // Complete items.
    for (int i = 1; i + w <= n; ++i) {
      int j = i + w;
      insts.clear();
      for (int d = i + 1; d <= j; ++d) {
        insts.push_back(Instance{&c.ir[c.at(i, d)], &c.cr[c.at(d, j)], 0.0, kNoArc, -1});
      }
      c.cr[c.at(i, j)] = build_cell(insts, k);

      insts.clear();
      for (int d = i; d < j; ++d) {
        insts.push_back(Instance{&c.cl[c.at(i, d)], &c.il[c.at(d, j)], 0.0, kNoArc, -1});
      }
      c.cl[c.at(i, j)] = build_cell(insts, k);
    }
  }

  // Final combine: single ROOT dependent r.
  insts.clear();
  for (int r = 1; r <= n; ++r) {
    insts.push_back(Instance{&c.cl[c.at(1, r)], &c.cr[c.at(r, n)],
                             arc_score(0, r) + sib_score(0, r, -1), kMid, 0});
  }
  CandList trees = build_cell(insts, k);

  KBestList out;
  out.sentence = s;
  out.candidates.reserve(trees.size());
  for (auto& cand : trees) {
    DepTree t;
    t.heads = std::move(cand.heads);
    out.candidates.emplace_back(std::move(t), cand.score);
  }
  return out;
}

DepTree parse_best(const WeightModel& model, const FeatureExtractor& fx,
                   const Sentence& s) {
  return parse_kbest(model, fx, s, 1).candidates.front().first;
}

}  // namespace udep
