#ifndef UDEP_IORNN_HPP
#define UDEP_IORNN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "udep/eisner.hpp"
#include "udep/embeddings.hpp"
#include "udep/types.hpp"
#include "udep/vocab.hpp"

namespace udep {

struct IornnConfig {
  int dim = 50;       // inner/outer representation size
  int word_dim = 50;  // must match the embedding file when one is given
  int pos_dim = 10;
  int cap_dim = 5;
  int iters = 5;
  double lr = 0.1;
  double clip_norm = 5.0;  // per-tree gradient norm ceiling; 0 disables
  uint64_t seed = 1;
  int threads = 1;
};

// One step of the top-down generative story: the head at `head` emits
// `target` (a word id, or EOC) as its sibling_index-th dependent on `dir`.
struct GenEvent {
  int target = 0;
  int head = 0;
  Dir dir = kRight;
  int sibling_index = 1;

  bool is_eoc() const { return target == Vocabulary::kEocId; }
};

// Head-outward event order: per head, left dependents inside-out then
// LEFT-EOC, right dependents inside-out then RIGHT-EOC; heads themselves are
// visited depth-first with children in surface order. ROOT emits exactly one
// dependent and one EOC, both on its right.
std::vector<GenEvent> decompose_tree(const Vocabulary& vocab, const Sentence& s,
                                     const DepTree& t);

// The conditioning state used to generate one dependent.
struct ContextState {
  Eigen::VectorXd outer;                                // o of the head
  Eigen::VectorXd partial_outer;                        // \bar o for the next dependent
  std::vector<Eigen::VectorXd> generated_sibling_inners;  // nearest first
};

struct ParamBlock {
  std::string name;
  int64_t offset;
  int64_t size;
};

// All parameters live in one flat vector; the named blocks map into it.
class IornnParams {
 public:
  IornnConfig cfg;
  int vocab_size = 0;
  int pos_size = 0;
  uint64_t vocab_hash = 0;
  Eigen::VectorXd theta;

  static IornnParams init(const Vocabulary& vocab, const IornnConfig& cfg,
                          const EmbeddingTable* embeddings = nullptr);

  std::vector<ParamBlock> blocks() const;
  int64_t num_params() const { return theta.size(); }

  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using CMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using CVecMap = Eigen::Map<const Eigen::VectorXd>;

  CMatMap word_emb() const;         // vocab_size x word_dim
  CMatMap pos_emb() const;          // pos_size x pos_dim
  CMatMap cap_emb() const;          // 5 x cap_dim
  CMatMap inner_w() const;          // dim x (word+pos+cap)
  CVecMap inner_b() const;
  CVecMap root_outer() const;       // dim
  CMatMap partial_w(Dir d) const;   // dim x dim   (outer -> partial outer)
  CMatMap partial_u(Dir d) const;   // dim x dim   (sibling pool -> partial outer)
  CVecMap partial_b(Dir d) const;
  CMatMap outer_v(Dir d) const;     // dim x dim   (partial outer -> outer)
  CMatMap outer_t() const;          // dim x dim   (inner -> outer)
  CVecMap outer_b() const;
  CMatMap softmax_w() const;        // vocab_size x dim
  CVecMap softmax_b() const;

  void save(const std::string& path) const;
  static IornnParams load(const std::string& path);
};

// Inner representation of one token (word, POS and capitalization features).
Eigen::VectorXd inner_repr(const IornnParams& p, const Vocabulary& vocab, const Token& tok);

// Partial outer state for the next dependent of a head whose outer
// representation is `outer`, given the previously generated sibling inners
// (nearest first; the pool of an empty list is the zero vector).
ContextState make_context(const IornnParams& p, const Eigen::VectorXd& outer,
                          const std::vector<Eigen::VectorXd>& sibling_inners, Dir dir);

// Softmax over the outcome space (all word ids plus EOC) for one context.
Eigen::VectorXd outcome_distribution(const IornnParams& p,
                                     const Eigen::VectorXd& partial_outer);

// Sum of per-event log softmax probabilities; always finite.
double tree_logprob(const IornnParams& p, const Vocabulary& vocab, const Sentence& s,
                    const DepTree& t);

// NLL of one tree plus its gradient (accumulated into *grad, which must be
// zero-initialized to theta's size). Exposed for the finite-difference tests.
double tree_nll_grad(const IornnParams& p, const Vocabulary& vocab, const Sentence& s,
                     const DepTree& t, Eigen::VectorXd* grad);

// SGD over tree NLL, minibatch of one tree, per-epoch shuffling from the
// seed. Word vectors come from `embeddings` when given (missing words get
// seeded random vectors). Per-epoch training NLL is appended to *epoch_nll.
// `warm` continues from a parameter vector of identical shape.
IornnParams train_iornn(const Treebank& tb, const Vocabulary& vocab,
                        const IornnConfig& cfg, const EmbeddingTable* embeddings = nullptr,
                        std::vector<double>* epoch_nll = nullptr,
                        const IornnParams* warm = nullptr);

// Generative reranking: the candidate with the highest tree_logprob, ties
// broken by earlier k-best rank.
std::pair<DepTree, double> rerank(const IornnParams& p, const Vocabulary& vocab,
                                  const KBestList& kb);
int rerank_index(const IornnParams& p, const Vocabulary& vocab, const KBestList& kb,
                 double* logprob = nullptr);

}  // namespace udep

#endif  // UDEP_IORNN_HPP
