#include "udep/dmv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "udep/parallel.hpp"
#include "udep/rng.hpp"

namespace udep {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0 ? std::log(p) : kNegInf; }

std::string fmt_prob(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", p);
  return buf;
}
}  // namespace

// Callers register the full tag inventory first and size the probability
// tables afterwards; the row-major choose layout cannot survive in-place
// growth.
int DmvParams::add_pos(const std::string& tag) {
  auto it = pos_ids.find(tag);
  if (it != pos_ids.end()) return it->second;
  int id = num_pos();
  pos_ids[tag] = id;
  pos.push_back(tag);
  return id;
}

double DmvParams::choose_lp(int head, Dir dir, int dep) const {
  const int P = num_pos();
  if (P == 0) return kNegInf;
  if (head < 0 || dep < 0) return -std::log(static_cast<double>(P));
  return safe_log(choose[dir][static_cast<size_t>(head) * P + dep]);
}

double DmvParams::stop_lp(int head, Dir dir, int valence, bool do_stop) const {
  double p = 0.5;
  if (head >= 0) p = stop[dir][static_cast<size_t>(head) * 2 + (valence > 0 ? 1 : 0)];
  return safe_log(do_stop ? p : 1.0 - p);
}

double DmvParams::root_lp(int head) const {
  const int P = num_pos();
  if (P == 0) return kNegInf;
  if (head < 0) return -std::log(static_cast<double>(P));
  return safe_log(root[head]);
}

void DmvParams::check_normalized(double tol) const {
  const int P = num_pos();
  double rsum = 0;
  for (double p : root) rsum += p;
  if (std::abs(rsum - 1.0) > tol) throw std::runtime_error("p_root not normalized");
  for (int dir = 0; dir < 2; ++dir) {
    for (int h = 0; h < P; ++h) {
      double sum = 0;
      for (int d = 0; d < P; ++d) sum += choose[dir][static_cast<size_t>(h) * P + d];
      if (std::abs(sum - 1.0) > tol) {
        throw std::runtime_error("p_choose context not normalized: " + pos[h]);
      }
      for (int v = 0; v < 2; ++v) {
        double p = stop[dir][static_cast<size_t>(h) * 2 + v];
        if (p < 0.0 || p > 1.0) throw std::runtime_error("p_stop out of [0,1]");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Initialization and re-estimation

DmvParams harmonic_init(const std::vector<Sentence>& sentences, double smoothing) {
  if (sentences.empty()) throw std::invalid_argument("harmonic_init: empty corpus");
  DmvParams params;
  for (const auto& s : sentences) {
    for (const auto& tok : s.tokens) params.add_pos(tok.pos);
  }
  const int P = params.num_pos();
  std::vector<double> cnt[2];
  cnt[0].assign(static_cast<size_t>(P) * P, 0.0);
  cnt[1].assign(static_cast<size_t>(P) * P, 0.0);
  for (const auto& s : sentences) {
    const int n = s.size();
    for (int h = 1; h <= n; ++h) {
      int hp = params.pos_id(s.at(h).pos);
      for (int d = 1; d <= n; ++d) {
        if (d == h) continue;
        int dp = params.pos_id(s.at(d).pos);
        Dir dir = d < h ? kLeft : kRight;
        cnt[dir][static_cast<size_t>(hp) * P + dp] += 1.0 / std::abs(h - d);
      }
    }
  }
  for (int dir = 0; dir < 2; ++dir) {
    params.choose[dir].assign(static_cast<size_t>(P) * P, 0.0);
    for (int h = 0; h < P; ++h) {
      double sum = 0;
      for (int d = 0; d < P; ++d) sum += cnt[dir][static_cast<size_t>(h) * P + d] + smoothing;
      for (int d = 0; d < P; ++d) {
        params.choose[dir][static_cast<size_t>(h) * P + d] =
            (cnt[dir][static_cast<size_t>(h) * P + d] + smoothing) / sum;
      }
    }
    params.stop[dir].assign(static_cast<size_t>(P) * 2, 0.5);
  }
  params.root.assign(P, 1.0 / P);
  return params;
}

DmvParams reestimate_dmv(const std::vector<Sentence>& sentences,
                         const std::vector<DepTree>& trees,
                         const DmvParams& inventory, double smoothing) {
  if (sentences.size() != trees.size()) {
    throw std::invalid_argument("reestimate_dmv: corpus/treebank size mismatch");
  }
  DmvParams params;
  params.pos = inventory.pos;
  params.pos_ids = inventory.pos_ids;
  const int P = params.num_pos();
  std::vector<double> ccnt[2], scnt[2], ncnt[2];
  for (int dir = 0; dir < 2; ++dir) {
    ccnt[dir].assign(static_cast<size_t>(P) * P, 0.0);   // choose counts
    scnt[dir].assign(static_cast<size_t>(P) * 2, 0.0);   // stop counts
    ncnt[dir].assign(static_cast<size_t>(P) * 2, 0.0);   // continue counts
  }
  std::vector<double> rcnt(P, 0.0);

  for (size_t i = 0; i < sentences.size(); ++i) {
    const Sentence& s = sentences[i];
    const DepTree& t = trees[i];
    const int n = s.size();
    for (int d = 1; d <= n; ++d) {
      int h = t.head(d);
      int dp = params.pos_id(s.at(d).pos);
      if (h == 0) {
        rcnt[dp] += 1;
        continue;
      }
      int hp = params.pos_id(s.at(h).pos);
      Dir dir = d < h ? kLeft : kRight;
      ccnt[dir][static_cast<size_t>(hp) * P + dp] += 1;
    }
    for (int h = 1; h <= n; ++h) {
      int hp = params.pos_id(s.at(h).pos);
      int ndeps[2] = {0, 0};
      for (int d = 1; d <= n; ++d) {
        if (t.head(d) == h) ++ndeps[d < h ? kLeft : kRight];
      }
      for (int dir = 0; dir < 2; ++dir) {
        int m = ndeps[dir];
        if (m == 0) {
          scnt[dir][static_cast<size_t>(hp) * 2 + 0] += 1;
        } else {
          ncnt[dir][static_cast<size_t>(hp) * 2 + 0] += 1;
          ncnt[dir][static_cast<size_t>(hp) * 2 + 1] += m - 1;
          scnt[dir][static_cast<size_t>(hp) * 2 + 1] += 1;
        }
      }
    }
  }

  double rsum = 0;
  for (int p = 0; p < P; ++p) rsum += rcnt[p] + smoothing;
  params.root.assign(P, 0.0);
  for (int p = 0; p < P; ++p) params.root[p] = (rcnt[p] + smoothing) / rsum;
  for (int dir = 0; dir < 2; ++dir) {
    params.choose[dir].assign(static_cast<size_t>(P) * P, 0.0);
    params.stop[dir].assign(static_cast<size_t>(P) * 2, 0.0);
    for (int h = 0; h < P; ++h) {
      double sum = 0;
      for (int d = 0; d < P; ++d) sum += ccnt[dir][static_cast<size_t>(h) * P + d] + smoothing;
      for (int d = 0; d < P; ++d) {
        params.choose[dir][static_cast<size_t>(h) * P + d] =
            (ccnt[dir][static_cast<size_t>(h) * P + d] + smoothing) / sum;
      }
      for (int v = 0; v < 2; ++v) {
        double st = scnt[dir][static_cast<size_t>(h) * 2 + v];
        double co = ncnt[dir][static_cast<size_t>(h) * 2 + v];
        params.stop[dir][static_cast<size_t>(h) * 2 + v] =
            (st + smoothing) / (st + co + 2 * smoothing);
      }
    }
  }
  return params;
}

// ---------------------------------------------------------------------------
// Viterbi decoding
//
// First-order Eisner chart with the DMV stop/continue factors attached to the
// rules that consume each half-constituent:
//   IR[h][d]: arc h->d. Adds continue(h,R,adj), choose(d|h,R) and d's LEFT
//             stop (d's left triangle is complete at this point).
//   IL[d][h]: arc h->d with d<h; symmetric, closes d's RIGHT side.
//   CR[h][e] = IR[h][d] + CR[d][e]: closes d's RIGHT side.
//   CL[b][h] = CL[b][d] + IL[d][h]: closes d's LEFT side.
//   root:     p_root(r) plus both of r's stop factors.
// Ties are broken by scanning splits and root positions left to right and
// keeping the first maximum.

namespace {

struct DmvChart {
  int n;
  std::vector<double> cr, cl, ir, il;
  std::vector<int> bp_cr, bp_cl, bp_ir, bp_il;

  explicit DmvChart(int n_) : n(n_) {
    size_t m = static_cast<size_t>(n + 1) * (n + 1);
    cr.assign(m, kNegInf);
    cl.assign(m, kNegInf);
    ir.assign(m, kNegInf);
    il.assign(m, kNegInf);
    bp_cr.assign(m, -1);
    bp_cl.assign(m, -1);
    bp_ir.assign(m, -1);
    bp_il.assign(m, -1);
  }
  size_t at(int i, int j) const { return static_cast<size_t>(i) * (n + 1) + j; }
};

void recover_cr(const DmvChart& c, int h, int e, DepTree* t);
void recover_cl(const DmvChart& c, int b, int h, DepTree* t);

void recover_ir(const DmvChart& c, int h, int d, DepTree* t) {
  t->heads[d - 1] = h;
  int k = c.bp_ir[c.at(h, d)];
  recover_cr(c, h, k, t);
  recover_cl(c, k + 1, d, t);
}

void recover_il(const DmvChart& c, int d, int h, DepTree* t) {
  t->heads[d - 1] = h;
  int k = c.bp_il[c.at(d, h)];
  recover_cr(c, d, k, t);
  recover_cl(c, k + 1, h, t);
}

void recover_cr(const DmvChart& c, int h, int e, DepTree* t) {
  if (e == h) return;
  int d = c.bp_cr[c.at(h, e)];
  recover_ir(c, h, d, t);
  recover_cr(c, d, e, t);
}

void recover_cl(const DmvChart& c, int b, int h, DepTree* t) {
  if (b == h) return;
  int d = c.bp_cl[c.at(b, h)];
  recover_cl(c, b, d, t);
  recover_il(c, d, h, t);
}

}  // namespace

std::pair<DepTree, double> viterbi_parse_dmv(const DmvParams& params, const Sentence& s) {
  const int n = s.size();
  if (n < 1) throw std::invalid_argument("viterbi_parse_dmv: empty sentence");
  std::vector<int> tag(n + 1, -1);
  for (int i = 1; i <= n; ++i) tag[i] = params.pos_id(s.at(i).pos);

  DmvChart c(n);
  for (int i = 1; i <= n; ++i) {
    c.cr[c.at(i, i)] = 0.0;
    c.cl[c.at(i, i)] = 0.0;
  }

  for (int w = 1; w < n; ++w) {
    for (int i = 1; i + w <= n; ++i) {
      int j = i + w;
      // IR[i][j]: arc i->j.
      {
        double choose = params.choose_lp(tag[i], kRight, tag[j]);
        double best = kNegInf;
        int bk = -1;
        for (int k = i; k < j; ++k) {
          double v = c.cr[c.at(i, k)] + c.cl[c.at(k + 1, j)] +
                     params.stop_lp(tag[i], kRight, k > i ? 1 : 0, false) + choose +
                     params.stop_lp(tag[j], kLeft, k + 1 < j ? 1 : 0, true);
          if (v > best) {
            best = v;
            bk = k;
          }
        }
        c.ir[c.at(i, j)] = best;
        c.bp_ir[c.at(i, j)] = bk;
      }
      // IL[i][j]: arc j->i.
      {
        double choose = params.choose_lp(tag[j], kLeft, tag[i]);
        double best = kNegInf;
        int bk = -1;
        for (int k = i; k < j; ++k) {
          double v = c.cr[c.at(i, k)] + c.cl[c.at(k + 1, j)] +
                     params.stop_lp(tag[j], kLeft, k + 1 < j ? 1 : 0, false) + choose +
                     params.stop_lp(tag[i], kRight, k > i ? 1 : 0, true);
          if (v > best) {
            best = v;
            bk = k;
          }
        }
        c.il[c.at(i, j)] = best;
        c.bp_il[c.at(i, j)] = bk;
      }
      // CR[i][j] = IR[i][d] + CR[d][j], closing d's right side.
      {
        double best = kNegInf;
        int bd = -1;
        for (int d = i + 1; d <= j; ++d) {
          double v = c.ir[c.at(i, d)] + c.cr[c.at(d, j)] +
                     params.stop_lp(tag[d], kRight, j > d ? 1 : 0, true);
          if (v > best) {
            best = v;
            bd = d;
          }
        }
        c.cr[c.at(i, j)] = best;
        c.bp_cr[c.at(i, j)] = bd;
      }
      // CL[i][j] = CL[i][d] + IL[d][j], closing d's left side.
      {
        double best = kNegInf;
        int bd = -1;
        for (int d = i; d < j; ++d) {
          double v = c.cl[c.at(i, d)] + c.il[c.at(d, j)] +
                     params.stop_lp(tag[d], kLeft, d > i ? 1 : 0, true);
          if (v > best) {
            best = v;
            bd = d;
          }
        }
        c.cl[c.at(i, j)] = best;
        c.bp_cl[c.at(i, j)] = bd;
      }
    }
  }

  double best = kNegInf;
  int broot = -1;
  for (int r = 1; r <= n; ++r) {
    double v = params.root_lp(tag[r]) + c.cl[c.at(1, r)] + c.cr[c.at(r, n)] +
               params.stop_lp(tag[r], kLeft, r > 1 ? 1 : 0, true) +
               params.stop_lp(tag[r], kRight, n > r ? 1 : 0, true);
    if (v > best) {
      best = v;
      broot = r;
    }
  }

  DepTree t;
  t.heads.assign(n, -1);
  t.heads[broot - 1] = 0;
  recover_cl(c, 1, broot, &t);
  recover_cr(c, broot, n, &t);
  return {t, best};
}

double dmv_tree_logprob(const DmvParams& params, const Sentence& s, const DepTree& t) {
  const int n = s.size();
  double lp = 0;
  for (int d = 1; d <= n; ++d) {
    if (t.head(d) == 0) lp += params.root_lp(params.pos_id(s.at(d).pos));
  }
  for (int h = 1; h <= n; ++h) {
    int hp = params.pos_id(s.at(h).pos);
    for (int dir = 0; dir < 2; ++dir) {
      // Dependents on this side, nearest first.
      std::vector<int> deps;
      if (dir == kLeft) {
        for (int d = h - 1; d >= 1; --d)
          if (t.head(d) == h) deps.push_back(d);
      } else {
        for (int d = h + 1; d <= n; ++d)
          if (t.head(d) == h) deps.push_back(d);
      }
      for (size_t i = 0; i < deps.size(); ++i) {
        lp += params.stop_lp(hp, static_cast<Dir>(dir), i == 0 ? 0 : 1, false);
        lp += params.choose_lp(hp, static_cast<Dir>(dir), params.pos_id(s.at(deps[i]).pos));
      }
      lp += params.stop_lp(hp, static_cast<Dir>(dir), deps.empty() ? 0 : 1, true);
    }
  }
  return lp;
}

DmvParams hard_em_train(const std::vector<Sentence>& sentences, const DmvParams& init,
                        int iters, double smoothing, std::vector<double>* logprob_log,
                        int threads) {
  if (iters < 1) throw std::invalid_argument("hard_em_train: iters must be >= 1");
  DmvParams params = init;
  std::vector<DepTree> trees(sentences.size());
  std::vector<double> lps(sentences.size());
  for (int it = 0; it < iters; ++it) {
    parallel_for(static_cast<int>(sentences.size()), threads, [&](int i) {
      auto [tree, lp] = viterbi_parse_dmv(params, sentences[i]);
      trees[i] = std::move(tree);
      lps[i] = lp;
    });
    double total = 0;
    for (double lp : lps) total += lp;
    if (logprob_log) logprob_log->push_back(total);
    params = reestimate_dmv(sentences, trees, params, smoothing);
  }
  return params;
}

Treebank annotate(const DmvParams& params, const std::vector<Sentence>& sentences,
                  int threads) {
  Treebank tb;
  tb.entries.resize(sentences.size());
  parallel_for(static_cast<int>(sentences.size()), threads, [&](int i) {
    tb.entries[i].sentence = sentences[i];
    tb.entries[i].tree = viterbi_parse_dmv(params, sentences[i]).first;
  });
  return tb;
}

// ---------------------------------------------------------------------------
// Serialization: one `context<TAB>outcome<TAB>prob` line per table cell.

void DmvParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int P = num_pos();
  for (int p = 0; p < P; ++p) {
    out << "root\t" << pos[p] << '\t' << fmt_prob(root[p]) << '\n';
  }
  const char* dn[2] = {"L", "R"};
  for (int dir = 0; dir < 2; ++dir) {
    for (int h = 0; h < P; ++h) {
      for (int d = 0; d < P; ++d) {
        out << "choose:" << pos[h] << ':' << dn[dir] << '\t' << pos[d] << '\t'
            << fmt_prob(choose[dir][static_cast<size_t>(h) * P + d]) << '\n';
      }
      for (int v = 0; v < 2; ++v) {
        out << "stop:" << pos[h] << ':' << dn[dir] << ':' << v << "\tSTOP\t"
            << fmt_prob(stop[dir][static_cast<size_t>(h) * 2 + v]) << '\n';
      }
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

DmvParams DmvParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open DMV params file: " + path);
  // First pass: collect the tag inventory in order of first appearance so
  // tables can be sized before filling.
  struct Row {
    std::string context, outcome;
    double prob;
  };
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  DmvParams params;
  auto split_context = [&](const std::string& ctx) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      size_t colon = ctx.find(':', start);
      if (colon == std::string::npos) {
        parts.push_back(ctx.substr(start));
        break;
      }
      parts.push_back(ctx.substr(start, colon - start));
      start = colon + 1;
    }
    return parts;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Row r;
    std::string prob_s;
    if (!std::getline(ls, r.context, '\t') || !std::getline(ls, r.outcome, '\t') ||
        !std::getline(ls, prob_s, '\t')) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed params line");
    }
    r.prob = std::stod(prob_s);
    auto parts = split_context(r.context);
    if (parts[0] == "root") {
      params.add_pos(r.outcome);
    } else if (parts[0] == "choose" || parts[0] == "stop") {
      params.add_pos(parts[1]);
      if (parts[0] == "choose") params.add_pos(r.outcome);
    } else {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown context '" +
                               r.context + "'");
    }
    rows.push_back(std::move(r));
  }
  const int P = params.num_pos();
  for (int dir = 0; dir < 2; ++dir) {
    params.choose[dir].assign(static_cast<size_t>(P) * P, 0.0);
    params.stop[dir].assign(static_cast<size_t>(P) * 2, 0.5);
  }
  params.root.assign(P, 0.0);
  for (const auto& r : rows) {
    auto parts = split_context(r.context);
    if (parts[0] == "root") {
      params.root[params.pos_id(r.outcome)] = r.prob;
    } else if (parts[0] == "choose") {
      Dir dir = parts[2] == "L" ? kLeft : kRight;
      params.choose[dir][static_cast<size_t>(params.pos_id(parts[1])) * P +
                         params.pos_id(r.outcome)] = r.prob;
    } else {
      Dir dir = parts[2] == "L" ? kLeft : kRight;
      params.stop[dir][static_cast<size_t>(params.pos_id(parts[1])) * 2 +
                       std::stoi(parts[3])] = r.prob;
    }
  }
  return params;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

namespace {

struct SynthNode {
  int tag;
  std::string surface;
  std::vector<int> left, right;  // child node ids, nearest first
};

// Samples one tree; returns false if the token budget was exceeded.
bool sample_node(const DmvParams& params, std::mt19937_64& rng, int tag,
                 std::vector<SynthNode>& nodes, int node_id, int budget,
                 const SynthOptions& opts) {
  const int P = params.num_pos();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Zipf-like word choice within the tag's lexicon.
  auto sample_word = [&](int t) {
    double z = 0;
    for (int k = 0; k < opts.lexicon_size; ++k) z += 1.0 / (k + 1);
    double u = unit(rng) * z, acc = 0;
    int k = 0;
    for (; k < opts.lexicon_size; ++k) {
      acc += 1.0 / (k + 1);
      if (u <= acc) break;
    }
    if (k >= opts.lexicon_size) k = opts.lexicon_size - 1;
    std::string w;
    for (char ch : params.pos[t]) w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    w += std::to_string(k);
    if (k % 5 == 0 && !w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
  };
  auto sample_tag = [&](int head, Dir dir) {
    double u = unit(rng), acc = 0;
    for (int d = 0; d < P; ++d) {
      acc += params.choose[dir][static_cast<size_t>(head) * P + d];
      if (u <= acc) return d;
    }
    return P - 1;
  };

  nodes[node_id].tag = tag;
  nodes[node_id].surface = sample_word(tag);
  for (int dir = 0; dir < 2; ++dir) {
    int v = 0;
    while (true) {
      double p_stop = params.stop[dir][static_cast<size_t>(tag) * 2 + (v > 0 ? 1 : 0)];
      if (unit(rng) <= p_stop) break;
      if (static_cast<int>(nodes.size()) >= budget) return false;
      int child_tag = sample_tag(tag, static_cast<Dir>(dir));
      nodes.push_back(SynthNode{});
      int child_id = static_cast<int>(nodes.size()) - 1;
      (dir == kLeft ? nodes[node_id].left : nodes[node_id].right).push_back(child_id);
      if (!sample_node(params, rng, child_tag, nodes, child_id, budget, opts)) return false;
      ++v;
    }
  }
  return true;
}

// In-order walk: left subtrees outermost first, the node, then right
// subtrees nearest first. Fills `order` with node ids in surface order.
void inorder(const std::vector<SynthNode>& nodes, int id, std::vector<int>* order) {
  for (auto it = nodes[id].left.rbegin(); it != nodes[id].left.rend(); ++it) {
    inorder(nodes, *it, order);
  }
  order->push_back(id);
  for (int child : nodes[id].right) inorder(nodes, child, order);
}

}  // namespace

Treebank sample_treebank(const DmvParams& params, int count, const SynthOptions& opts) {
  if (count < 0) throw std::invalid_argument("sample_treebank: negative count");
  params.check_normalized(1e-6);
  std::mt19937_64 rng(make_rng(opts.seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int P = params.num_pos();
  Treebank tb;
  tb.entries.reserve(count);
  const int budget = std::max(opts.max_len * 4, opts.max_len + 4);
  while (static_cast<int>(tb.entries.size()) < count) {
    // Root tag.
    double u = unit(rng), acc = 0;
    int root_tag = P - 1;
    for (int p = 0; p < P; ++p) {
      acc += params.root[p];
      if (u <= acc) {
        root_tag = p;
        break;
      }
    }
    std::vector<SynthNode> nodes;
    nodes.push_back(SynthNode{});
    if (!sample_node(params, rng, root_tag, nodes, 0, budget, opts)) continue;
    if (static_cast<int>(nodes.size()) > opts.max_len) continue;

    Sentence s;
    std::vector<int> position(nodes.size(), 0);
    std::vector<int> order;
    inorder(nodes, 0, &order);
    for (size_t i = 0; i < order.size(); ++i) position[order[i]] = static_cast<int>(i) + 1;
    DepTree t;
    t.heads.assign(nodes.size(), 0);
    for (size_t id = 0; id < nodes.size(); ++id) {
      for (int child : nodes[id].left) t.heads[position[child] - 1] = position[id];
      for (int child : nodes[id].right) t.heads[position[child] - 1] = position[id];
    }
    t.heads[position[0] - 1] = 0;
    for (int id : order) {
      s.tokens.push_back(Token::make(nodes[id].surface, params.pos[nodes[id].tag]));
    }
    check_tree(t, s.size());
    tb.entries.push_back(Entry{std::move(s), std::move(t)});
  }
  return tb;
}

}  // namespace udep
