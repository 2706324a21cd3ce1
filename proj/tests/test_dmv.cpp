#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracle.hpp"
#include "udep/conll.hpp"
#include "udep/dmv.hpp"
#include "udep/rng.hpp"

using namespace udep;

namespace {

Sentence tag_sentence(std::initializer_list<const char*> tags) {
  Sentence s;
  int i = 0;
  for (const char* t : tags) {
    s.tokens.push_back(Token::make("w" + std::to_string(i++), t));
  }
  return s;
}

// Random normalized DMV over the given tags.
DmvParams random_dmv(const std::vector<std::string>& tags, std::mt19937_64& rng) {
  DmvParams p;
  for (const auto& t : tags) p.add_pos(t);
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
      for (int v = 0; v < 2; ++v) {
        p.stop[dir][h * 2 + v] = 0.2 + 0.6 * unit(rng);
      }
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

std::string data_path(const std::string& name) {
  return std::string(UDEP_DATA_DIR) + "/" + name;
}
std::string tmp_path(const std::string& name) {
  std::filesystem::create_directories(UDEP_TEST_TMP);
  return std::string(UDEP_TEST_TMP) + "/" + name;
}

}  // namespace

TEST_CASE("harmonic init normalizes and covers observed tags") {
  std::vector<Sentence> corpus = {tag_sentence({"DT", "NN"})};
  DmvParams p = harmonic_init(corpus);
  p.check_normalized(1e-9);
  int nn = p.pos_id("NN"), dt = p.pos_id("DT");
  REQUIRE(nn >= 0);
  REQUIRE(dt >= 0);
  CHECK(p.choose[kLeft][nn * p.num_pos() + dt] > 0.0);
  double sum = 0;
  for (int d = 0; d < p.num_pos(); ++d) sum += p.choose[kLeft][nn * p.num_pos() + d];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  // Single 1-token sentence: root mass 1 on that tag.
  DmvParams single = harmonic_init({tag_sentence({"VB"})});
  CHECK(single.root[single.pos_id("VB")] == doctest::Approx(1.0));
}

TEST_CASE("harmonic init matches hand-computed 1/distance table") {
  // One sentence A B C. For head B: left counts {A: 1/1}; right counts {C: 1/1}.
  // For head A: right counts {B: 1, C: 1/2}. Additive smoothing 0.1, P = 3.
  std::vector<Sentence> corpus = {tag_sentence({"A", "B", "C"})};
  const double alpha = 0.1;
  DmvParams p = harmonic_init(corpus, alpha);
  const int P = 3;
  int a = p.pos_id("A"), b = p.pos_id("B"), c = p.pos_id("C");
  auto choose = [&](Dir dir, int h, int d) { return p.choose[dir][h * P + d]; };
  double zA = (1.0 + alpha) + (0.5 + alpha) + alpha;  // B, C, A outcomes for head A right
  CHECK(choose(kRight, a, b) == doctest::Approx((1.0 + alpha) / zA).epsilon(1e-12));
  CHECK(choose(kRight, a, c) == doctest::Approx((0.5 + alpha) / zA).epsilon(1e-12));
  CHECK(choose(kRight, a, a) == doctest::Approx(alpha / zA).epsilon(1e-12));
  double zBleft = (1.0 + alpha) + 2 * alpha;
  CHECK(choose(kLeft, b, a) == doctest::Approx((1.0 + alpha) / zBleft).epsilon(1e-12));
  // Neutral stop prior.
  CHECK(p.stop[kLeft][b * 2 + 0] == doctest::Approx(0.5));
  // Uniform root over 3 observed tags.
  CHECK(p.root[a] == doctest::Approx(1.0 / 3));
}

TEST_CASE("viterbi decode: single token") {
  auto rng = make_rng(17);
  DmvParams p = random_dmv({"A", "B"}, rng);
  Sentence s = tag_sentence({"A"});
  auto [tree, lp] = viterbi_parse_dmv(p, s);
  CHECK(tree.heads == std::vector<int>{0});
  int a = p.pos_id("A");
  double expect = std::log(p.root[a]) + std::log(p.stop[kLeft][a * 2 + 0]) +
                  std::log(p.stop[kRight][a * 2 + 0]);
  CHECK(lp == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("viterbi decode: two tokens against exhaustive scoring") {
  auto rng = make_rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    DmvParams p = random_dmv({"A", "B", "C"}, rng);
    Sentence s = tag_sentence({"A", "B"});
    auto [tree, lp] = viterbi_parse_dmv(p, s);
    auto [btree, blp] = oracle::brute_force_dmv_best(p, s);
    CHECK(lp == doctest::Approx(blp).epsilon(1e-9));
    CHECK(dmv_tree_logprob(p, s, tree) == doctest::Approx(lp).epsilon(1e-9));
  }
}

TEST_CASE("viterbi decode optimal up to n=6") {
  auto rng = make_rng(29);
  std::vector<std::string> tags = {"A", "B", "C", "D"};
  for (int trial = 0; trial < 30; ++trial) {
    DmvParams p = random_dmv(tags, rng);
    std::uniform_int_distribution<int> len(1, 6);
    int n = len(rng);
    std::vector<const char*> ts;
    Sentence s;
    std::uniform_int_distribution<size_t> pick(0, tags.size() - 1);
    for (int i = 0; i < n; ++i) s.tokens.push_back(Token::make("w", tags[pick(rng)]));
    auto [tree, lp] = viterbi_parse_dmv(p, s);
    auto [btree, blp] = oracle::brute_force_dmv_best(p, s);
    CHECK(lp == doctest::Approx(blp).epsilon(1e-9));
    CHECK(is_valid_tree(tree));
    // The decoder's reported score must equal the direct generative score.
    CHECK(dmv_tree_logprob(p, s, tree) == doctest::Approx(lp).epsilon(1e-9));
  }
}

TEST_CASE("hard-EM single iteration equals reestimation of the initial decode") {
  Treebank tiny = read_conll(data_path("tiny.conll"));
  auto sentences = sentences_of(tiny);
  DmvParams init = harmonic_init(sentences);
  DmvParams one = hard_em_train(sentences, init, 1);

  std::vector<DepTree> trees;
  for (const auto& s : sentences) trees.push_back(viterbi_parse_dmv(init, s).first);
  DmvParams manual = reestimate_dmv(sentences, trees, init, 0.1);
  for (int dir = 0; dir < 2; ++dir) {
    for (size_t i = 0; i < manual.choose[dir].size(); ++i) {
      CHECK(one.choose[dir][i] == doctest::Approx(manual.choose[dir][i]).epsilon(1e-12));
    }
    for (size_t i = 0; i < manual.stop[dir].size(); ++i) {
      CHECK(one.stop[dir][i] == doctest::Approx(manual.stop[dir][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("hard-EM objective is monotone on the tiny corpus") {
  Treebank tiny = read_conll(data_path("tiny.conll"));
  auto sentences = sentences_of(tiny);
  DmvParams init = harmonic_init(sentences);
  std::vector<double> log;
  DmvParams final_params = hard_em_train(sentences, init, 12, 0.1, &log);
  REQUIRE(log.size() == 12);
  for (size_t i = 1; i < log.size(); ++i) {
    CHECK(log[i] >= log[i - 1] - 1e-9);
  }
  final_params.check_normalized(1e-9);
}

TEST_CASE("M-step cannot decrease the likelihood of the decoded treebank") {
  Treebank tiny = read_conll(data_path("tiny.conll"));
  auto sentences = sentences_of(tiny);
  DmvParams params = harmonic_init(sentences);
  for (int it = 0; it < 6; ++it) {
    std::vector<DepTree> trees;
    for (const auto& s : sentences) trees.push_back(viterbi_parse_dmv(params, s).first);
    DmvParams next = reestimate_dmv(sentences, trees, params, 0.1);
    double before = 0, after = 0;
    for (size_t i = 0; i < sentences.size(); ++i) {
      before += dmv_tree_logprob(params, sentences[i], trees[i]);
      after += dmv_tree_logprob(next, sentences[i], trees[i]);
    }
    CHECK(after >= before - 1e-9);
    params = next;
  }
}

TEST_CASE("annotate is deterministic and order preserving") {
  Treebank tiny = read_conll(data_path("tiny.conll"));
  auto sentences = sentences_of(tiny);
  DmvParams params = hard_em_train(sentences, harmonic_init(sentences), 3);
  CHECK(annotate(params, {}).size() == 0);
  Treebank a = annotate(params, sentences);
  Treebank b = annotate(params, sentences, 2);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK(is_valid_tree(*a.entries[i].tree));
    CHECK(*a.entries[i].tree == *b.entries[i].tree);
    CHECK(a.entries[i].sentence.size() == sentences[i].size());
  }
}

TEST_CASE("dmv params save/load round trip") {
  auto rng = make_rng(37);
  DmvParams p = random_dmv({"N", "V", "P"}, rng);
  std::string path = tmp_path("dmv.params");
  p.save(path);
  DmvParams q = DmvParams::load(path);
  REQUIRE(q.num_pos() == p.num_pos());
  for (const auto& tag : p.pos) {
    int a = p.pos_id(tag), b = q.pos_id(tag);
    CHECK(q.root[b] == doctest::Approx(p.root[a]).epsilon(1e-15));
    for (int dir = 0; dir < 2; ++dir) {
      for (const auto& dep : p.pos) {
        CHECK(q.choose[dir][b * q.num_pos() + q.pos_id(dep)] ==
              doctest::Approx(p.choose[dir][a * p.num_pos() + p.pos_id(dep)]).epsilon(1e-15));
      }
      for (int v = 0; v < 2; ++v) {
        CHECK(q.stop[dir][b * 2 + v] == doctest::Approx(p.stop[dir][a * 2 + v]).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("synthetic sampling yields valid deterministic treebanks") {
  auto rng = make_rng(41);
  DmvParams p = random_dmv({"N", "V", "D"}, rng);
  SynthOptions opts;
  opts.max_len = 8;
  opts.lexicon_size = 5;
  opts.seed = 99;
  Treebank a = sample_treebank(p, 50, opts);
  Treebank b = sample_treebank(p, 50, opts);
  REQUIRE(a.size() == 50);
  CHECK(treebank_checksum(a) == treebank_checksum(b));
  for (const auto& e : a.entries) {
    REQUIRE(e.tree.has_value());
    CHECK(is_valid_tree(*e.tree));
    CHECK(e.sentence.size() <= opts.max_len);
    CHECK(e.tree->size() == e.sentence.size());
  }
  CHECK(sample_treebank(p, 0, opts).size() == 0);
}
