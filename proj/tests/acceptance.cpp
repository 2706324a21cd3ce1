// Acceptance suite: one pass/fail line per criterion. Criteria 7-9 drive the
// command-line tool end to end; the rest use the library directly.
//
// Usage: udep_acceptance <path-to-udep-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "udep/conll.hpp"
#include "udep/dmv.hpp"
#include "udep/eisner.hpp"
#include "udep/evaluation.hpp"
#include "udep/iornn.hpp"
#include "udep/ir_engine.hpp"
#include "udep/perceptron.hpp"
#include "udep/rng.hpp"
#include "udep/vocab.hpp"
#include "udep/weights.hpp"

using namespace udep;

namespace {

int failures = 0;
std::string cli_path;
std::string work_dir;

void report(int criterion, bool pass, const std::string& what, double seconds,
            const std::string& detail) {
  std::printf("criterion %2d: %s  %s (%.1fs%s%s)\n", criterion, pass ? "PASS" : "FAIL",
              what.c_str(), seconds, detail.empty() ? "" : "; ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run_criterion(int criterion, const std::string& what,
                   const std::function<bool(std::string*)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(&detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(criterion, pass, what, secs, detail);
}

std::string data_path(const std::string& name) {
  return std::string(UDEP_DATA_DIR) + "/" + name;
}
std::string wpath(const std::string& name) { return work_dir + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  std::string cmd = "\"" + cli_path + "\" " + args + " >> \"" + wpath("cli.log") +
                    "\" 2>&1";
  return std::system(cmd.c_str());
}

const std::vector<std::string> kTags = {"A", "B", "C", "D"};
const std::vector<std::string> kWords = {"alpha", "beta", "Gamma", "delta0", "eps"};

Vocabulary shared_vocab() {
  std::vector<Sentence> corpus;
  for (int r = 0; r < 3; ++r) {
    Sentence s;
    for (size_t i = 0; i < kWords.size(); ++i) {
      s.tokens.push_back(Token::make(kWords[i], kTags[i % kTags.size()]));
    }
    corpus.push_back(std::move(s));
  }
  return build_vocab(corpus, 3);
}

WeightModel random_model(std::mt19937_64& rng) {
  WeightModel m;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& w : m.weights) w = unif(rng);
  return m;
}

DmvParams random_dmv(std::mt19937_64& rng) {
  DmvParams p;
  for (const auto& t : kTags) p.add_pos(t);
  const int P = p.num_pos();
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int dir = 0; dir < 2; ++dir) {
    p.choose[dir].assign(P * P, 0.0);
    p.stop[dir].assign(P * 2, 0.0);
    for (int h = 0; h < P; ++h) {
      double sum = 0;
      for (int d = 0; d < P; ++d) {
        p.choose[dir][h * P + d] = unit(rng);
        sum += p.choose[dir][h * P + d];
      }
      for (int d = 0; d < P; ++d) p.choose[dir][h * P + d] /= sum;
      for (int v = 0; v < 2; ++v) p.stop[dir][h * 2 + v] = 0.2 + 0.6 * unit(rng);
    }
  }
  p.root.assign(P, 0.0);
  double sum = 0;
  for (int h = 0; h < P; ++h) {
    p.root[h] = unit(rng);
    sum += p.root[h];
  }
  for (int h = 0; h < P; ++h) p.root[h] /= sum;
  return p;
}

// Parsed manifest rows keyed by (phase, iteration): the dda column.
std::map<std::pair<int, int>, std::string> manifest_dda(const std::string& path) {
  std::map<std::pair<int, int>, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string phase, iter, file, checksum, mean_lp, dda_s, fixed;
    std::getline(ls, phase, '\t');
    std::getline(ls, iter, '\t');
    std::getline(ls, file, '\t');
    std::getline(ls, checksum, '\t');
    std::getline(ls, mean_lp, '\t');
    std::getline(ls, dda_s, '\t');
    std::getline(ls, fixed, '\t');
    out[{std::stoi(phase), std::stoi(iter)}] = dda_s;
  }
  return out;
}

void write_mpir_config(const std::string& path, const std::string& corpus) {
  std::ofstream out(path);
  out << "corpus = " << corpus << "\n"
      << "k = 10\n"
      << "iters_mst = 1\n"  // MaxEnc
      << "dim = 50\n"
      << "iters_iornn = 5\n"
      << "lr = 0.1\n"
      << "phase1_max_len = 10\n"
      << "final_max_len = 10\n"
      << "phase1_iterations = 1\n"
      << "phase0_iters = 10\n"
      << "min_count = 3\n"
      << "seed = 777\n";
}

// --------------------------------------------------------------------------

bool crit1_kbest_exactness(std::string* detail) {
  Vocabulary vocab = shared_vocab();
  FeatureExtractor fx(vocab);
  auto rng = make_rng(20250810);
  int checked = 0;
  for (int trial = 0; trial < 210; ++trial) {
    std::uniform_int_distribution<int> len(1, 6);
    int n = len(rng);
    Sentence s = oracle::random_sentence(n, rng, kTags, kWords);
    WeightModel m = random_model(rng);
    KBestList kb = parse_kbest(m, fx, s, 10);
    auto want = oracle::brute_force_kbest(m, fx, s, 10);
    if (kb.size() != static_cast<int>(want.size())) {
      *detail = "list size mismatch at trial " + std::to_string(trial);
      return false;
    }
    for (int i = 0; i < kb.size(); ++i) {
      if (std::abs(kb.candidates[i].second - want[i].second) > 1e-9 ||
          !(kb.candidates[i].first == want[i].first)) {
        *detail = "candidate " + std::to_string(i) + " mismatch at trial " +
                  std::to_string(trial);
        return false;
      }
    }
    ++checked;
  }
  *detail = std::to_string(checked) + " sentences";
  return true;
}

bool crit2_dmv_optimality(std::string* detail) {
  auto rng = make_rng(424242);
  int checked = 0;
  for (int trial = 0; trial < 210; ++trial) {
    DmvParams params = random_dmv(rng);
    std::uniform_int_distribution<int> len(1, 6);
    int n = len(rng);
    Sentence s = oracle::random_sentence(n, rng, kTags, kWords);
    auto [tree, lp] = viterbi_parse_dmv(params, s);
    auto [btree, blp] = oracle::brute_force_dmv_best(params, s);
    if (std::abs(lp - blp) > 1e-9 ||
        std::abs(dmv_tree_logprob(params, s, tree) - lp) > 1e-9) {
      *detail = "mismatch at trial " + std::to_string(trial);
      return false;
    }
    ++checked;
  }
  *detail = std::to_string(checked) + " (params, sentence) pairs";
  return true;
}

bool crit3_hard_em_monotone(std::string* detail) {
  Treebank tiny = read_conll(data_path("tiny.conll"));
  auto sentences = sentences_of(tiny);
  std::vector<double> log;
  hard_em_train(sentences, harmonic_init(sentences), 12, 0.1, &log);
  for (size_t i = 1; i < log.size(); ++i) {
    if (log[i] < log[i - 1] - 1e-9) {
      *detail = "decrease at iteration " + std::to_string(i + 1);
      return false;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%zu iterations, L1=%.3f Lend=%.3f", log.size(),
                log.front(), log.back());
  *detail = buf;
  return true;
}

bool crit4_gradient_check(std::string* detail) {
  Vocabulary vocab = shared_vocab();
  IornnConfig cfg;
  cfg.dim = 10;
  cfg.word_dim = 8;
  cfg.pos_dim = 4;
  cfg.cap_dim = 3;
  auto rng = make_rng(777001);
  const double h = 1e-5;
  double worst = 0;
  std::string worst_block;
  for (int trial = 0; trial < 4; ++trial) {
    std::uniform_int_distribution<int> len(1, 5);
    int n = len(rng);
    Sentence s = oracle::random_sentence(n, rng, kTags, kWords);
    DepTree t = oracle::random_projective_tree(n, rng);
    IornnParams p = IornnParams::init(vocab, cfg);
    {
      auto prng = make_rng(9000 + trial);
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      for (int64_t i = 0; i < p.theta.size(); ++i) p.theta[i] = unif(prng);
    }
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.theta.size());
    tree_nll_grad(p, vocab, s, t, &grad);
    for (const auto& block : p.blocks()) {
      for (int64_t i = block.offset; i < block.offset + block.size; ++i) {
        double saved = p.theta[i];
        p.theta[i] = saved + h;
        double up = -tree_logprob(p, vocab, s, t);
        p.theta[i] = saved - h;
        double dn = -tree_logprob(p, vocab, s, t);
        p.theta[i] = saved;
        double numeric = (up - dn) / (2 * h);
        double rel = std::abs(grad[i] - numeric) /
                     std::max(1e-3, std::abs(grad[i]) + std::abs(numeric));
        if (rel > worst) {
          worst = rel;
          worst_block = block.name;
        }
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e (block %s)", worst,
                worst_block.c_str());
  *detail = buf;
  return worst <= 1e-4;
}

bool crit5_softmax_normalization(std::string* detail) {
  Vocabulary vocab = shared_vocab();
  IornnConfig cfg;
  cfg.dim = 12;
  cfg.word_dim = 8;
  cfg.pos_dim = 4;
  cfg.cap_dim = 3;
  IornnParams p = IornnParams::init(vocab, cfg);
  auto rng = make_rng(31337);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  // Random contexts: random head outers combined with random sibling inner
  // sets through the real partial-outer path.
  Sentence s = oracle::random_sentence(6, rng, kTags, kWords);
  std::vector<Eigen::VectorXd> inners;
  for (int i = 1; i <= 6; ++i) inners.push_back(inner_repr(p, vocab, s.at(i)));
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd outer(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) outer[i] = unif(rng);
    std::uniform_int_distribution<int> nsib(0, 4);
    std::vector<Eigen::VectorXd> sibs;
    int m = nsib(rng);
    std::uniform_int_distribution<size_t> pick(0, inners.size() - 1);
    for (int i = 0; i < m; ++i) sibs.push_back(inners[pick(rng)]);
    Dir dir = trial % 2 == 0 ? kLeft : kRight;
    ContextState ctx = make_context(p, outer, sibs, dir);
    double sum = outcome_distribution(p, ctx.partial_outer).sum();
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "1000 contexts, max |sum-1| = %.2e", worst);
  *detail = buf;
  return worst <= 1e-6;
}

bool crit6_selection_oracle(std::string* detail) {
  DmvParams grammar = DmvParams::load(data_path("synth_grammar.dmv"));
  SynthOptions sopts;
  sopts.max_len = 8;
  sopts.lexicon_size = 10;
  sopts.seed = 555;
  Treebank D = sample_treebank(grammar, 20, sopts);
  Vocabulary vocab = build_vocab(sentences_of(D), 1);
  PhaseConfig cfg;
  cfg.k = 10;
  cfg.iters_mst = 1;
  cfg.reranker.dim = 20;
  cfg.reranker.word_dim = 10;
  cfg.reranker.pos_dim = 5;
  cfg.reranker.cap_dim = 3;
  cfg.reranker.iters = 5;
  cfg.seed = 4242;
  IterationResult res = ir_iteration(D, vocab, cfg);
  for (int i = 0; i < D.size(); ++i) {
    const KBestList& list = res.kbest.lists[i];
    int best = -1;
    double best_lp = -1e300;
    for (int j = 0; j < list.size(); ++j) {
      double lp = tree_logprob(res.reranker, vocab, list.sentence, list.candidates[j].first);
      if (lp > best_lp) {
        best_lp = lp;
        best = j;
      }
    }
    if (!(*res.next.entries[i].tree == list.candidates[best].first)) {
      *detail = "selection differs from exhaustive rescoring at sentence " +
                std::to_string(i);
      return false;
    }
  }
  *detail = "20 sentences, k=10";
  return true;
}

// Criterion 7 state shared with 8 and 9.
std::string synth_corpus_file, run_a_dir;

bool crit7_synthetic_recovery(std::string* detail) {
  synth_corpus_file = wpath("synth_corpus.conll");
  if (run_cli("synth --grammar \"" + data_path("synth_grammar.dmv") +
              "\" --count 2000 --seed 12345 --max-len 10 --lexicon-size 25 --out \"" +
              synth_corpus_file + "\"") != 0) {
    *detail = "synth command failed";
    return false;
  }
  Treebank corpus = read_conll(synth_corpus_file);
  if (corpus.size() != 2000 || !corpus.all_annotated()) {
    *detail = "synth corpus malformed";
    return false;
  }
  std::string cfg = wpath("mpir.cfg");
  write_mpir_config(cfg, synth_corpus_file);
  run_a_dir = wpath("run_a");
  std::filesystem::remove_all(run_a_dir);
  if (run_cli("mpir --config \"" + cfg + "\" --out-dir \"" + run_a_dir + "\"") != 0) {
    *detail = "mpir command failed";
    return false;
  }
  auto dda_rows = manifest_dda(run_a_dir + "/manifest.tsv");
  if (!dda_rows.count({1, 0}) || !dda_rows.count({1, 1})) {
    *detail = "manifest is missing phase-0 or iteration-1 records";
    return false;
  }
  double p0 = std::stod(dda_rows[{1, 0}]);
  double ir1 = std::stod(dda_rows[{1, 1}]);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "phase-0 DDA %.4f, after 1 IR iteration %.4f", p0, ir1);
  *detail = buf;
  return p0 >= 0.60 && ir1 >= p0 - 0.02;
}

bool crit8_embedding_ablation(std::string* detail) {
  if (synth_corpus_file.empty()) {
    *detail = "criterion 7 did not run";
    return false;
  }
  // A format-correct random embedding file for part of the corpus vocabulary.
  std::string emb_file = wpath("random_embeddings.txt");
  {
    Treebank corpus = read_conll(synth_corpus_file);
    Vocabulary vocab = build_vocab(sentences_of(corpus), 3);
    std::ofstream out(emb_file);
    auto rng = make_rng(999);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (int id = Vocabulary::kNumReserved; id < vocab.num_words(); ++id) {
      if (id % 3 == 0) continue;  // leave some words uncovered
      out << vocab.words[id];
      for (int j = 0; j < 50; ++j) out << ' ' << unif(rng);
      out << '\n';
    }
  }
  std::string cfg = wpath("mpir.cfg");
  std::string run_b = wpath("run_emb");
  std::filesystem::remove_all(run_b);
  if (run_cli("mpir --config \"" + cfg + "\" --out-dir \"" + run_b +
              "\" --embeddings \"" + emb_file + "\"") != 0) {
    *detail = "mpir with embeddings failed";
    return false;
  }
  std::string man_a = slurp(run_a_dir + "/manifest.tsv");
  std::string man_b = slurp(run_b + "/manifest.tsv");
  bool a_none = man_a.find("#cfg embeddings=none") != std::string::npos;
  bool b_named = man_b.find("#cfg embeddings=" + emb_file) != std::string::npos;
  bool both_finished = std::filesystem::exists(run_a_dir + "/treebank_final.conll") &&
                       std::filesystem::exists(run_b + "/treebank_final.conll");
  auto rows = manifest_dda(run_b + "/manifest.tsv");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "wo/ and w/ embeddings completed; w/ DDA %.4f",
                rows.count({1, 1}) ? std::stod(rows[{1, 1}]) : -1.0);
  *detail = buf;
  return a_none && b_named && both_finished;
}

bool crit9_determinism(std::string* detail) {
  if (run_a_dir.empty()) {
    *detail = "criterion 7 did not run";
    return false;
  }
  std::string cfg = wpath("mpir.cfg");
  std::string run_c = wpath("run_repeat");
  std::filesystem::remove_all(run_c);
  if (run_cli("mpir --config \"" + cfg + "\" --out-dir \"" + run_c + "\"") != 0) {
    *detail = "repeat run failed";
    return false;
  }
  bool manifests = slurp(run_a_dir + "/manifest.tsv") == slurp(run_c + "/manifest.tsv");
  bool treebanks = slurp(run_a_dir + "/treebank_final.conll") ==
                   slurp(run_c + "/treebank_final.conll");
  *detail = std::string("manifest ") + (manifests ? "identical" : "DIFFERS") +
            ", final treebank " + (treebanks ? "identical" : "DIFFERS");
  return manifests && treebanks;
}

bool crit10_roundtrip_and_metrics(std::string* detail) {
  auto rng = make_rng(1010);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> len(1, 9), count(1, 4);
    Treebank tb;
    int m = count(rng);
    for (int i = 0; i < m; ++i) {
      int n = len(rng);
      Entry e;
      e.sentence = oracle::random_sentence(n, rng, kTags, kWords);
      e.tree = oracle::random_projective_tree(n, rng);
      tb.entries.push_back(std::move(e));
    }
    std::ostringstream first;
    write_conll_stream(tb, first);
    std::istringstream mid(first.str());
    Treebank back = read_conll_stream(mid, "roundtrip");
    std::ostringstream second;
    write_conll_stream(back, second);
    if (first.str() != second.str()) {
      *detail = "round-trip bytes differ at trial " + std::to_string(trial);
      return false;
    }
    if (std::abs(dda(tb, tb) - 1.0) > 0 ||
        std::abs(dda_at(tb, tb, 1000) - dda(tb, tb)) > 0) {
      *detail = "metric sanity failed at trial " + std::to_string(trial);
      return false;
    }
  }
  *detail = "1000 treebanks";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: udep_acceptance <path-to-udep-cli>\n");
    return 2;
  }
  cli_path = argv[1];
  work_dir = UDEP_TEST_TMP;
  std::filesystem::remove_all(work_dir);
  std::filesystem::create_directories(work_dir);

  run_criterion(1, "k-best exactness vs brute force (n<=6, k=10)", crit1_kbest_exactness);
  run_criterion(2, "DMV Viterbi optimality vs exhaustive enumeration", crit2_dmv_optimality);
  run_criterion(3, "hard-EM corpus log-probability is non-decreasing", crit3_hard_em_monotone);
  run_criterion(4, "IORNN analytic vs finite-difference gradients", crit4_gradient_check);
  run_criterion(5, "softmax outcome normalization", crit5_softmax_normalization);
  run_criterion(6, "iterated-reranking selection equals rescoring argmax", crit6_selection_oracle);
  run_criterion(7, "synthetic-grammar recovery through phase 0 and one IR iteration", crit7_synthetic_recovery);
  run_criterion(8, "embedding ablation: both modes run and are recorded", crit8_embedding_ablation);
  run_criterion(9, "bitwise determinism of repeated single-threaded runs", crit9_determinism);
  run_criterion(10, "CoNLL round-trip and metric sanity", crit10_roundtrip_and_metrics);

  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
