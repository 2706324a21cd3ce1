#include "udep/iornn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "udep/parallel.hpp"
#include "udep/rng.hpp"

namespace udep {

namespace {

// Flat parameter layout. Order matters for serialization compatibility.
struct Layout {
  int dim, dw, dp, dc, V, P;
  int64_t ew, ep, ec, win, bin, oroot;
  int64_t wdir[2], udir[2], bdir[2], vdir[2];
  int64_t tmat, cvec, wsm, bsm;
  int64_t total;

  Layout(const IornnConfig& cfg, int vocab_size, int pos_size)
      : dim(cfg.dim), dw(cfg.word_dim), dp(cfg.pos_dim), dc(cfg.cap_dim),
        V(vocab_size), P(pos_size) {
    int64_t o = 0;
    auto take = [&o](int64_t count) {
      int64_t at = o;
      o += count;
      return at;
    };
    ew = take(static_cast<int64_t>(V) * dw);
    ep = take(static_cast<int64_t>(P) * dp);
    ec = take(static_cast<int64_t>(kNumCapClasses) * dc);
    win = take(static_cast<int64_t>(dim) * (dw + dp + dc));
    bin = take(dim);
    oroot = take(dim);
    for (int d = 0; d < 2; ++d) wdir[d] = take(static_cast<int64_t>(dim) * dim);
    for (int d = 0; d < 2; ++d) udir[d] = take(static_cast<int64_t>(dim) * dim);
    for (int d = 0; d < 2; ++d) bdir[d] = take(dim);
    for (int d = 0; d < 2; ++d) vdir[d] = take(static_cast<int64_t>(dim) * dim);
    tmat = take(static_cast<int64_t>(dim) * dim);
    cvec = take(dim);
    wsm = take(static_cast<int64_t>(V) * dim);
    bsm = take(V);
    total = o;
  }
};

Layout layout_of(const IornnParams& p) { return Layout(p.cfg, p.vocab_size, p.pos_size); }

}  // namespace

IornnParams::CMatMap IornnParams::word_emb() const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.ew, l.V, l.dw);
}
IornnParams::CMatMap IornnParams::pos_emb() const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.ep, l.P, l.dp);
}
IornnParams::CMatMap IornnParams::cap_emb() const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.ec, kNumCapClasses, l.dc);
}
IornnParams::CMatMap IornnParams::inner_w() const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.win, l.dim, l.dw + l.dp + l.dc);
}
IornnParams::CVecMap IornnParams::inner_b() const {
  Layout l = layout_of(*this);
  return CVecMap(theta.data() + l.bin, l.dim);
}
IornnParams::CVecMap IornnParams::root_outer() const {
  Layout l = layout_of(*this);
  return CVecMap(theta.data() + l.oroot, l.dim);
}
IornnParams::CMatMap IornnParams::partial_w(Dir d) const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.wdir[d], l.dim, l.dim);
}
IornnParams::CMatMap IornnParams::partial_u(Dir d) const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.udir[d], l.dim, l.dim);
}
IornnParams::CVecMap IornnParams::partial_b(Dir d) const {
  Layout l = layout_of(*this);
  return CVecMap(theta.data() + l.bdir[d], l.dim);
}
IornnParams::CMatMap IornnParams::outer_v(Dir d) const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.vdir[d], l.dim, l.dim);
}
IornnParams::CMatMap IornnParams::outer_t() const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.tmat, l.dim, l.dim);
}
IornnParams::CVecMap IornnParams::outer_b() const {
  Layout l = layout_of(*this);
  return CVecMap(theta.data() + l.cvec, l.dim);
}
IornnParams::CMatMap IornnParams::softmax_w() const {
  Layout l = layout_of(*this);
  return CMatMap(theta.data() + l.wsm, l.V, l.dim);
}
IornnParams::CVecMap IornnParams::softmax_b() const {
  Layout l = layout_of(*this);
  return CVecMap(theta.data() + l.bsm, l.V);
}

std::vector<ParamBlock> IornnParams::blocks() const {
  Layout l = layout_of(*this);
  std::vector<ParamBlock> out;
  out.push_back({"word_emb", l.ew, static_cast<int64_t>(l.V) * l.dw});
  out.push_back({"pos_emb", l.ep, static_cast<int64_t>(l.P) * l.dp});
  out.push_back({"cap_emb", l.ec, static_cast<int64_t>(kNumCapClasses) * l.dc});
  out.push_back({"inner_w", l.win, static_cast<int64_t>(l.dim) * (l.dw + l.dp + l.dc)});
  out.push_back({"inner_b", l.bin, l.dim});
  out.push_back({"root_outer", l.oroot, l.dim});
  out.push_back({"partial_w_left", l.wdir[0], static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"partial_w_right", l.wdir[1], static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"partial_u_left", l.udir[0], static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"partial_u_right", l.udir[1], static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"partial_b_left", l.bdir[0], l.dim});
  out.push_back({"partial_b_right", l.bdir[1], l.dim});
  out.push_back({"outer_v_left", l.vdir[0], static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"outer_v_right", l.vdir[1], static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"outer_t", l.tmat, static_cast<int64_t>(l.dim) * l.dim});
  out.push_back({"outer_b", l.cvec, l.dim});
  out.push_back({"softmax_w", l.wsm, static_cast<int64_t>(l.V) * l.dim});
  out.push_back({"softmax_b", l.bsm, l.V});
  return out;
}

IornnParams IornnParams::init(const Vocabulary& vocab, const IornnConfig& cfg,
                              const EmbeddingTable* embeddings) {
  if (cfg.dim < 1 || cfg.iters < 1) {
    throw std::invalid_argument("iornn: dim and iters must be >= 1");
  }
  IornnParams p;
  p.cfg = cfg;
  p.vocab_size = vocab.num_words();
  p.pos_size = vocab.num_pos();
  p.vocab_hash = vocab.hash();
  Layout l(cfg, p.vocab_size, p.pos_size);
  p.theta.resize(l.total);
  auto rng = make_rng(derive_seed(cfg.seed, 0x10));
  std::uniform_real_distribution<double> unif(-0.01, 0.01);
  for (int64_t i = 0; i < l.total; ++i) p.theta[i] = unif(rng);
  if (embeddings) {
    if (embeddings->dim != cfg.word_dim) {
      throw std::runtime_error("embedding file dimension " + std::to_string(embeddings->dim) +
                               " does not match expected d_w = " + std::to_string(cfg.word_dim));
    }
    MatMap ew(p.theta.data() + l.ew, l.V, l.dw);
    for (int id = 0; id < p.vocab_size; ++id) {
      auto it = embeddings->vectors.find(vocab.words[id]);
      if (it == embeddings->vectors.end()) continue;
      for (int j = 0; j < l.dw; ++j) ew(id, j) = it->second[j];
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Event decomposition

namespace {

struct EventPlan {
  GenEvent ev;
  int dep_pos;            // -1 for EOC
  std::vector<int> sibs;  // previously generated siblings, nearest first
};

void plan_head(const Vocabulary& vocab, const Sentence& s, const DepTree& t, int h,
               std::vector<EventPlan>* out) {
  const int n = s.size();
  std::vector<int> deps[2];
  for (int d = h - 1; d >= 1; --d)
    if (t.head(d) == h) deps[kLeft].push_back(d);
  for (int d = h + 1; d <= n; ++d)
    if (t.head(d) == h) deps[kRight].push_back(d);

  for (int dir = 0; dir < 2; ++dir) {
    std::vector<int> seen;
    for (size_t i = 0; i < deps[dir].size(); ++i) {
      int d = deps[dir][i];
      out->push_back(EventPlan{GenEvent{vocab.word_id(s.at(d).norm), h,
                                        static_cast<Dir>(dir), static_cast<int>(i) + 1},
                               d, seen});
      seen.push_back(d);
    }
    out->push_back(EventPlan{GenEvent{Vocabulary::kEocId, h, static_cast<Dir>(dir),
                                      static_cast<int>(deps[dir].size()) + 1},
                             -1, seen});
  }
  // Children in surface order.
  for (auto it = deps[kLeft].rbegin(); it != deps[kLeft].rend(); ++it) {
    plan_head(vocab, s, t, *it, out);
  }
  for (int d : deps[kRight]) plan_head(vocab, s, t, d, out);
}

std::vector<EventPlan> plan_events(const Vocabulary& vocab, const Sentence& s,
                                   const DepTree& t) {
  check_tree(t, s.size());
  std::vector<EventPlan> out;
  int root = 0;
  for (int d = 1; d <= s.size(); ++d) {
    if (t.head(d) == 0) root = d;
  }
  out.push_back(EventPlan{GenEvent{vocab.word_id(s.at(root).norm), 0, kRight, 1}, root, {}});
  out.push_back(EventPlan{GenEvent{Vocabulary::kEocId, 0, kRight, 2}, -1, {root}});
  plan_head(vocab, s, t, root, &out);
  return out;
}

}  // namespace

std::vector<GenEvent> decompose_tree(const Vocabulary& vocab, const Sentence& s,
                                     const DepTree& t) {
  std::vector<GenEvent> out;
  for (const auto& p : plan_events(vocab, s, t)) out.push_back(p.ev);
  return out;
}

// ---------------------------------------------------------------------------
// Forward / backward

Eigen::VectorXd inner_repr(const IornnParams& p, const Vocabulary& vocab, const Token& tok) {
  Layout l = layout_of(p);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(l.dw + l.dp + l.dc);
  x.head(l.dw) = p.word_emb().row(vocab.word_id(tok.norm)).transpose();
  int pid = vocab.pos_id(tok.pos);
  if (pid >= 0) x.segment(l.dw, l.dp) = p.pos_emb().row(pid).transpose();
  x.segment(l.dw + l.dp, l.dc) =
      p.cap_emb().row(static_cast<int>(tok.cap)).transpose();
  return (p.inner_w() * x + p.inner_b()).array().tanh().matrix();
}

ContextState make_context(const IornnParams& p, const Eigen::VectorXd& outer,
                          const std::vector<Eigen::VectorXd>& sibling_inners, Dir dir) {
  ContextState ctx;
  ctx.outer = outer;
  ctx.generated_sibling_inners = sibling_inners;
  Eigen::VectorXd pool = Eigen::VectorXd::Zero(p.cfg.dim);
  if (!sibling_inners.empty()) {
    for (const auto& v : sibling_inners) pool += v;
    pool /= static_cast<double>(sibling_inners.size());
  }
  ctx.partial_outer =
      (p.partial_w(dir) * outer + p.partial_u(dir) * pool + p.partial_b(dir))
          .array()
          .tanh()
          .matrix();
  return ctx;
}

Eigen::VectorXd outcome_distribution(const IornnParams& p,
                                     const Eigen::VectorXd& partial_outer) {
  Eigen::VectorXd logits = p.softmax_w() * partial_outer + p.softmax_b();
  double m = logits.maxCoeff();
  Eigen::VectorXd exps = (logits.array() - m).exp();
  return exps / exps.sum();
}

namespace {

struct Tape {
  std::vector<Eigen::VectorXd> x;      // per position, embedding concat
  std::vector<Eigen::VectorXd> inner;  // per position
  std::vector<Eigen::VectorXd> outer;  // per position
  std::vector<Eigen::VectorXd> obar;   // per event
  std::vector<Eigen::VectorXd> pool;   // per event
  std::vector<Eigen::VectorXd> probs;  // per event
};

double forward(const IornnParams& p, const Vocabulary& vocab, const Sentence& s,
               const std::vector<EventPlan>& plan, Tape* tape) {
  Layout l = layout_of(p);
  const int n = s.size();
  tape->x.assign(n + 1, Eigen::VectorXd());
  tape->inner.assign(n + 1, Eigen::VectorXd());
  tape->outer.assign(n + 1, Eigen::VectorXd());
  tape->obar.assign(plan.size(), Eigen::VectorXd());
  tape->pool.assign(plan.size(), Eigen::VectorXd());
  tape->probs.assign(plan.size(), Eigen::VectorXd());

  for (int u = 1; u <= n; ++u) {
    const Token& tok = s.at(u);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(l.dw + l.dp + l.dc);
    x.head(l.dw) = p.word_emb().row(vocab.word_id(tok.norm)).transpose();
    int pid = vocab.pos_id(tok.pos);
    if (pid >= 0) x.segment(l.dw, l.dp) = p.pos_emb().row(pid).transpose();
    x.segment(l.dw + l.dp, l.dc) = p.cap_emb().row(static_cast<int>(tok.cap)).transpose();
    tape->x[u] = std::move(x);
    tape->inner[u] = (p.inner_w() * tape->x[u] + p.inner_b()).array().tanh().matrix();
  }

  double nll = 0;
  for (size_t e = 0; e < plan.size(); ++e) {
    const EventPlan& ep = plan[e];
    const Eigen::VectorXd o_head =
        ep.ev.head == 0 ? Eigen::VectorXd(p.root_outer()) : tape->outer[ep.ev.head];
    Eigen::VectorXd pool = Eigen::VectorXd::Zero(l.dim);
    if (!ep.sibs.empty()) {
      for (int sib : ep.sibs) pool += tape->inner[sib];
      pool /= static_cast<double>(ep.sibs.size());
    }
    Eigen::VectorXd obar = (p.partial_w(ep.ev.dir) * o_head +
                            p.partial_u(ep.ev.dir) * pool + p.partial_b(ep.ev.dir))
                               .array()
                               .tanh()
                               .matrix();
    Eigen::VectorXd logits = p.softmax_w() * obar + p.softmax_b();
    double m = logits.maxCoeff();
    double lse = m + std::log((logits.array() - m).exp().sum());
    nll -= logits[ep.ev.target] - lse;
    Eigen::VectorXd probs = ((logits.array() - lse).exp()).matrix();
    if (ep.dep_pos >= 0) {
      tape->outer[ep.dep_pos] = (p.outer_v(ep.ev.dir) * obar +
                                 p.outer_t() * tape->inner[ep.dep_pos] + p.outer_b())
                                    .array()
                                    .tanh()
                                    .matrix();
    }
    tape->obar[e] = std::move(obar);
    tape->pool[e] = std::move(pool);
    tape->probs[e] = std::move(probs);
  }
  return nll;
}

void backward(const IornnParams& p, const Vocabulary& vocab, const Sentence& s,
              const std::vector<EventPlan>& plan, const Tape& tape,
              Eigen::VectorXd* grad) {
  Layout l = layout_of(p);
  const int n = s.size();
  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  MatMap g_ew(grad->data() + l.ew, l.V, l.dw);
  MatMap g_ep(grad->data() + l.ep, l.P, l.dp);
  MatMap g_ec(grad->data() + l.ec, kNumCapClasses, l.dc);
  MatMap g_win(grad->data() + l.win, l.dim, l.dw + l.dp + l.dc);
  VecMap g_bin(grad->data() + l.bin, l.dim);
  VecMap g_oroot(grad->data() + l.oroot, l.dim);
  MatMap g_wsm(grad->data() + l.wsm, l.V, l.dim);
  VecMap g_bsm(grad->data() + l.bsm, l.V);
  MatMap g_tmat(grad->data() + l.tmat, l.dim, l.dim);
  VecMap g_cvec(grad->data() + l.cvec, l.dim);

  std::vector<Eigen::VectorXd> d_inner(n + 1, Eigen::VectorXd::Zero(l.dim));
  std::vector<Eigen::VectorXd> d_outer(n + 1, Eigen::VectorXd::Zero(l.dim));

  for (size_t ei = plan.size(); ei-- > 0;) {
    const EventPlan& ep = plan[ei];
    Dir dir = ep.ev.dir;
    MatMap g_w(grad->data() + l.wdir[dir], l.dim, l.dim);
    MatMap g_u(grad->data() + l.udir[dir], l.dim, l.dim);
    VecMap g_b(grad->data() + l.bdir[dir], l.dim);
    MatMap g_v(grad->data() + l.vdir[dir], l.dim, l.dim);

    const Eigen::VectorXd& obar = tape.obar[ei];
    Eigen::VectorXd dlogits = tape.probs[ei];
    dlogits[ep.ev.target] -= 1.0;
    g_wsm.noalias() += dlogits * obar.transpose();
    g_bsm += dlogits;
    Eigen::VectorXd dobar = p.softmax_w().transpose() * dlogits;

    if (ep.dep_pos >= 0) {
      const Eigen::VectorXd& o_dep = tape.outer[ep.dep_pos];
      Eigen::VectorXd dy =
          ((1.0 - o_dep.array().square()) * d_outer[ep.dep_pos].array()).matrix();
      g_v.noalias() += dy * obar.transpose();
      g_tmat.noalias() += dy * tape.inner[ep.dep_pos].transpose();
      g_cvec += dy;
      dobar.noalias() += p.outer_v(dir).transpose() * dy;
      d_inner[ep.dep_pos].noalias() += p.outer_t().transpose() * dy;
    }

    Eigen::VectorXd dz = ((1.0 - obar.array().square()) * dobar.array()).matrix();
    const Eigen::VectorXd o_head =
        ep.ev.head == 0 ? Eigen::VectorXd(p.root_outer()) : tape.outer[ep.ev.head];
    g_w.noalias() += dz * o_head.transpose();
    g_u.noalias() += dz * tape.pool[ei].transpose();
    g_b += dz;
    if (ep.ev.head == 0) {
      g_oroot.noalias() += p.partial_w(dir).transpose() * dz;
    } else {
      d_outer[ep.ev.head].noalias() += p.partial_w(dir).transpose() * dz;
    }
    if (!ep.sibs.empty()) {
      Eigen::VectorXd dpool =
          (p.partial_u(dir).transpose() * dz) / static_cast<double>(ep.sibs.size());
      for (int sib : ep.sibs) d_inner[sib] += dpool;
    }
  }

  for (int u = 1; u <= n; ++u) {
    Eigen::VectorXd dx =
        ((1.0 - tape.inner[u].array().square()) * d_inner[u].array()).matrix();
    g_win.noalias() += dx * tape.x[u].transpose();
    g_bin += dx;
    Eigen::VectorXd de = p.inner_w().transpose() * dx;
    const Token& tok = s.at(u);
    g_ew.row(vocab.word_id(tok.norm)) += de.head(l.dw).transpose();
    int pid = vocab.pos_id(tok.pos);
    if (pid >= 0) g_ep.row(pid) += de.segment(l.dw, l.dp).transpose();
    g_ec.row(static_cast<int>(tok.cap)) += de.segment(l.dw + l.dp, l.dc).transpose();
  }
}

}  // namespace

double tree_logprob(const IornnParams& p, const Vocabulary& vocab, const Sentence& s,
                    const DepTree& t) {
  Tape tape;
  return -forward(p, vocab, s, plan_events(vocab, s, t), &tape);
}

double tree_nll_grad(const IornnParams& p, const Vocabulary& vocab, const Sentence& s,
                     const DepTree& t, Eigen::VectorXd* grad) {
  if (grad->size() != p.theta.size()) {
    throw std::invalid_argument("tree_nll_grad: gradient buffer size mismatch");
  }
  auto plan = plan_events(vocab, s, t);
  Tape tape;
  double nll = forward(p, vocab, s, plan, &tape);
  backward(p, vocab, s, plan, tape, grad);
  return nll;
}

IornnParams train_iornn(const Treebank& tb, const Vocabulary& vocab,
                        const IornnConfig& cfg, const EmbeddingTable* embeddings,
                        std::vector<double>* epoch_nll, const IornnParams* warm) {
  for (int i = 0; i < tb.size(); ++i) {
    if (!tb.entries[i].tree.has_value()) {
      throw std::runtime_error("train_iornn: sentence " + std::to_string(i) +
                               " has no tree");
    }
  }
  IornnParams p = IornnParams::init(vocab, cfg, embeddings);
  if (warm) {
    if (warm->theta.size() != p.theta.size()) {
      throw std::runtime_error("train_iornn: warm-start parameter shape mismatch");
    }
    p.theta = warm->theta;
  }
  std::vector<int> order(tb.size());
  std::iota(order.begin(), order.end(), 0);
  const int threads = std::max(1, cfg.threads);

  std::vector<Eigen::VectorXd> grads(threads, Eigen::VectorXd::Zero(p.theta.size()));
  std::vector<double> nlls(threads, 0.0);
  // Exploding gradients through the outer-representation chains are tamed by
  // rescaling each tree's gradient to the configured norm ceiling.
  auto clip = [&](Eigen::VectorXd& g) {
    if (cfg.clip_norm <= 0) return;
    double norm = g.norm();
    if (norm > cfg.clip_norm) g *= cfg.clip_norm / norm;
  };
  for (int epoch = 0; epoch < cfg.iters; ++epoch) {
    auto rng = make_rng(derive_seed(cfg.seed, 0x11, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    if (threads == 1) {
      Eigen::VectorXd& grad = grads[0];
      for (int idx : order) {
        grad.setZero();
        total += tree_nll_grad(p, vocab, tb.entries[idx].sentence,
                               *tb.entries[idx].tree, &grad);
        clip(grad);
        p.theta -= cfg.lr * grad;
      }
    } else {
      // Data-parallel batches: one tree per worker shard, gradients applied
      // together in shard order after the group joins.
      for (size_t base = 0; base < order.size(); base += threads) {
        int group = static_cast<int>(
            std::min(static_cast<size_t>(threads), order.size() - base));
        parallel_for(group, threads, [&](int g) {
          grads[g].setZero();
          int idx = order[base + g];
          nlls[g] = tree_nll_grad(p, vocab, tb.entries[idx].sentence,
                                  *tb.entries[idx].tree, &grads[g]);
          clip(grads[g]);
        });
        for (int g = 0; g < group; ++g) {
          p.theta -= cfg.lr * grads[g];
          total += nlls[g];
        }
      }
    }
    if (epoch_nll) epoch_nll->push_back(total);
  }
  return p;
}

int rerank_index(const IornnParams& p, const Vocabulary& vocab, const KBestList& kb,
                 double* logprob) {
  if (kb.candidates.empty()) throw std::invalid_argument("rerank: empty k-best list");
  int best = 0;
  double best_lp = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kb.size(); ++i) {
    double lp = tree_logprob(p, vocab, kb.sentence, kb.candidates[i].first);
    if (lp > best_lp) {
      best_lp = lp;
      best = i;
    }
  }
  if (logprob) *logprob = best_lp;
  return best;
}

std::pair<DepTree, double> rerank(const IornnParams& p, const Vocabulary& vocab,
                                  const KBestList& kb) {
  double lp = 0;
  int idx = rerank_index(p, vocab, kb, &lp);
  return {kb.candidates[idx].first, lp};
}

// ---------------------------------------------------------------------------
// Serialization: text header followed by the raw parameter vector.

void IornnParams::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "IORNN v1\n";
  out << cfg.dim << ' ' << cfg.word_dim << ' ' << cfg.pos_dim << ' ' << cfg.cap_dim
      << ' ' << vocab_size << ' ' << pos_size << '\n';
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(vocab_hash));
  out << "vocab_hash " << hex << '\n';
  out << "params " << theta.size() << '\n';
  out.write(reinterpret_cast<const char*>(theta.data()),
            static_cast<std::streamsize>(theta.size() * sizeof(double)));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

IornnParams IornnParams::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open IORNN params file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "IORNN v1") {
    throw std::runtime_error(path + ": not an IORNN v1 file");
  }
  IornnParams p;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated header");
  {
    std::istringstream ls(line);
    if (!(ls >> p.cfg.dim >> p.cfg.word_dim >> p.cfg.pos_dim >> p.cfg.cap_dim >>
          p.vocab_size >> p.pos_size)) {
      throw std::runtime_error(path + ": malformed dimension line");
    }
  }
  if (!std::getline(in, line) || line.rfind("vocab_hash ", 0) != 0) {
    throw std::runtime_error(path + ": missing vocab_hash line");
  }
  p.vocab_hash = std::stoull(line.substr(11), nullptr, 16);
  if (!std::getline(in, line) || line.rfind("params ", 0) != 0) {
    throw std::runtime_error(path + ": missing params line");
  }
  int64_t count = std::stoll(line.substr(7));
  Layout l(p.cfg, p.vocab_size, p.pos_size);
  if (count != l.total) {
    throw std::runtime_error(path + ": parameter count does not match dimensions");
  }
  p.theta.resize(count);
  in.read(reinterpret_cast<char*>(p.theta.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": truncated parameter data");
  return p;
}

}  // namespace udep
