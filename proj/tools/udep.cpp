// Command-line front end: phase0, parse, rerank, mpir, eval, synth.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "udep/config.hpp"
#include "udep/conll.hpp"
#include "udep/dmv.hpp"
#include "udep/eisner.hpp"
#include "udep/evaluation.hpp"
#include "udep/iornn.hpp"
#include "udep/ir_engine.hpp"
#include "udep/kbest_io.hpp"
#include "udep/parallel.hpp"
#include "udep/vocab.hpp"
#include "udep/weights.hpp"

namespace {

using namespace udep;

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error(what + " not found: " + path);
  }
}

int cmd_phase0(const std::string& corpus_path, int iters, double smoothing, int max_len,
               const std::string& out_params, const std::string& out_treebank,
               int threads) {
  require_file(corpus_path, "corpus");
  Treebank corpus = read_conll(corpus_path);
  if (max_len > 0) corpus = filter_by_length(corpus, max_len);
  auto sentences = sentences_of(corpus);
  if (sentences.empty()) throw std::runtime_error("corpus is empty after filtering");
  DmvParams init = harmonic_init(sentences, smoothing);
  std::vector<double> log;
  DmvParams params = hard_em_train(sentences, init, iters, smoothing, &log, threads);
  for (size_t i = 0; i < log.size(); ++i) {
    std::fprintf(stderr, "iter %zu: corpus logprob %.6f\n", i + 1, log[i]);
  }
  params.save(out_params);
  if (!out_treebank.empty()) {
    write_conll(annotate(params, sentences, threads), out_treebank);
  }
  return 0;
}

int cmd_parse(const std::string& model_path, const std::string& vocab_path,
              const std::string& input_path, int k, const std::string& output_path,
              int threads) {
  require_file(model_path, "model");
  require_file(vocab_path, "vocabulary");
  require_file(input_path, "input");
  WeightModel model = WeightModel::load(model_path);
  Vocabulary vocab = Vocabulary::load(vocab_path);
  FeatureExtractor fx(vocab);
  Treebank input = read_conll(input_path);
  KBestSet set;
  set.lists.resize(input.size());
  parallel_for(input.size(), threads, [&](int i) {
    set.lists[i] = parse_kbest(model, fx, input.entries[i].sentence, k);
  });
  write_kbest(set, output_path);
  return 0;
}

int cmd_rerank(const std::string& model_path, const std::string& vocab_path,
               const std::string& kbest_path, const std::string& output_path,
               int threads) {
  require_file(model_path, "model");
  require_file(vocab_path, "vocabulary");
  require_file(kbest_path, "k-best file");
  IornnParams params = IornnParams::load(model_path);
  Vocabulary vocab = Vocabulary::load(vocab_path);
  if (vocab.hash() != params.vocab_hash) {
    throw std::runtime_error("vocabulary does not match the model's vocab hash");
  }
  KBestSet set = read_kbest(kbest_path);
  Treebank out;
  out.entries.resize(set.size());
  parallel_for(set.size(), threads, [&](int i) {
    out.entries[i] = Entry{set.lists[i].sentence, rerank(params, vocab, set.lists[i]).first};
  });
  write_conll(out, output_path);
  return 0;
}

struct MpirCli {
  std::string config_path, corpus, out_dir, embeddings, enc = "max";
  uint64_t seed = 1;
  int threads = 1;
  int halt_after = 0;
  bool no_resume = false;
  bool enc_given = false, seed_given = false, threads_given = false;
};

int cmd_mpir(const MpirCli& cli) {
  static const std::set<std::string> keys = {
      "corpus",       "out_dir",          "embeddings",       "seed",
      "threads",      "k",                "iters_mst",        "dim",
      "iters_iornn",  "lr",               "word_dim",         "pos_dim",
      "cap_dim",      "phase1_max_len",   "final_max_len",    "phase1_iterations",
      "phase0_iters", "smoothing",        "min_count",        "halt_after",
      "warm_start"};
  std::map<std::string, std::string> file_cfg;
  if (!cli.config_path.empty()) {
    file_cfg = parse_config_file(cli.config_path, keys);
  }
  auto get = [&](const std::string& key, const std::string& dflt) {
    auto it = file_cfg.find(key);
    return it == file_cfg.end() ? dflt : it->second;
  };

  std::string corpus_path = !cli.corpus.empty() ? cli.corpus : get("corpus", "");
  std::string out_dir = !cli.out_dir.empty() ? cli.out_dir : get("out_dir", "");
  std::string embeddings =
      !cli.embeddings.empty() ? cli.embeddings : get("embeddings", "");
  if (corpus_path.empty()) throw std::runtime_error("mpir: no corpus given");
  if (out_dir.empty()) throw std::runtime_error("mpir: no out_dir given");
  require_file(corpus_path, "corpus");
  if (!embeddings.empty()) require_file(embeddings, "embedding file");

  PhaseConfig base;
  base.max_len = std::stoi(get("phase1_max_len", "15"));
  base.k = std::stoi(get("k", "10"));
  base.iters_mst = std::stoi(get("iters_mst", "1"));
  if (cli.enc_given) base.iters_mst = cli.enc == "min" ? 10 : 1;
  base.reranker.dim = std::stoi(get("dim", "50"));
  base.reranker.iters = std::stoi(get("iters_iornn", "5"));
  base.reranker.lr = std::stod(get("lr", "0.1"));
  base.reranker.word_dim = std::stoi(get("word_dim", "50"));
  base.reranker.pos_dim = std::stoi(get("pos_dim", "10"));
  base.reranker.cap_dim = std::stoi(get("cap_dim", "5"));
  base.seed = cli.seed_given ? cli.seed : std::stoull(get("seed", "1"));
  base.threads = cli.threads_given ? cli.threads : std::stoi(get("threads", "1"));
  base.warm_start = std::stoi(get("warm_start", "0")) != 0;

  int final_max_len = std::stoi(get("final_max_len", "25"));
  int phase1_iterations = std::stoi(get("phase1_iterations", "100"));

  MpirOptions opts;
  opts.schedule = default_schedule(base, final_max_len, phase1_iterations);
  opts.phase0_iters = std::stoi(get("phase0_iters", "10"));
  opts.phase0_smoothing = std::stod(get("smoothing", "0.1"));
  opts.vocab_min_count = std::stoi(get("min_count", "3"));
  opts.out_dir = out_dir;
  opts.embeddings_path = embeddings;
  opts.resume = !cli.no_resume;
  opts.halt_after_iterations =
      cli.halt_after > 0 ? cli.halt_after : std::stoi(get("halt_after", "0"));

  auto echo = [&](const std::string& k, const std::string& v) {
    opts.config_echo[k] = v;
  };
  echo("corpus", corpus_path);
  echo("embeddings", embeddings.empty() ? "none" : embeddings);
  echo("k", std::to_string(base.k));
  echo("iters_mst", std::to_string(base.iters_mst));
  echo("dim", std::to_string(base.reranker.dim));
  echo("iters_iornn", std::to_string(base.reranker.iters));
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", base.reranker.lr);
    echo("lr", buf);
  }
  echo("word_dim", std::to_string(base.reranker.word_dim));
  echo("pos_dim", std::to_string(base.reranker.pos_dim));
  echo("cap_dim", std::to_string(base.reranker.cap_dim));
  echo("phase1_max_len", std::to_string(base.max_len));
  echo("final_max_len", std::to_string(final_max_len));
  echo("phase1_iterations", std::to_string(phase1_iterations));
  echo("phase0_iters", std::to_string(opts.phase0_iters));
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", opts.phase0_smoothing);
    echo("smoothing", buf);
  }
  echo("min_count", std::to_string(opts.vocab_min_count));
  echo("seed", std::to_string(base.seed));
  echo("warm_start", base.warm_start ? "1" : "0");

  Treebank corpus = read_conll(corpus_path);
  MpirResult result = run_mpir(corpus, opts);
  if (result.halted_early) {
    std::fprintf(stderr, "halted after the configured iteration budget; "
                         "re-run with the same out_dir to resume\n");
  } else {
    std::fprintf(stderr, "done: final treebank %s/treebank_final.conll\n",
                 out_dir.c_str());
  }
  return 0;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path,
             std::optional<int> cap, const std::string& exclude_pos,
             const std::string& json_path, bool full_report) {
  require_file(gold_path, "gold file");
  require_file(pred_path, "prediction file");
  Treebank gold = read_conll(gold_path);
  Treebank pred = read_conll(pred_path);
  EvalOptions opts;
  if (!exclude_pos.empty()) {
    std::istringstream ls(exclude_pos);
    std::string tag;
    while (std::getline(ls, tag, ',')) {
      if (!tag.empty()) opts.exclude_pos.insert(tag);
    }
  }
  std::vector<int> caps;
  if (cap) caps.push_back(*cap);
  if (full_report || !json_path.empty()) {
    EvalReport report = build_report(gold, pred, caps, opts);
    if (!json_path.empty()) {
      std::ofstream out(json_path);
      if (!out) throw std::runtime_error("cannot open for writing: " + json_path);
      out << report_json(report) << '\n';
    }
    std::cout << report_tsv(report);
  } else {
    std::printf("dda\t%.6f\n", dda(gold, pred, opts));
    if (cap) std::printf("dda@%d\t%.6f\n", *cap, dda_at(gold, pred, *cap, opts));
  }
  return 0;
}

int cmd_synth(const std::string& grammar_path, int count, uint64_t seed, int max_len,
              int lexicon_size, const std::string& out_path) {
  require_file(grammar_path, "grammar");
  DmvParams params = DmvParams::load(grammar_path);
  SynthOptions opts;
  opts.max_len = max_len;
  opts.lexicon_size = lexicon_size;
  opts.seed = seed;
  write_conll(sample_treebank(params, count, opts), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised dependency parsing via multi-phase iterated reranking"};
  app.require_subcommand(1);

  // phase0
  std::string p0_corpus, p0_out_params, p0_out_tb;
  int p0_iters = 10, p0_max_len = 0, p0_threads = 1;
  double p0_smoothing = 0.1;
  auto* phase0 = app.add_subcommand("phase0", "DMV hard-EM initializer");
  phase0->add_option("--corpus", p0_corpus, "CoNLL corpus")->required();
  phase0->add_option("--iters", p0_iters, "hard-EM iterations")
      ->check(CLI::Range(1, 1000000));
  phase0->add_option("--smoothing", p0_smoothing, "additive smoothing")
      ->check(CLI::PositiveNumber);
  phase0->add_option("--max-len", p0_max_len, "keep sentences up to this length");
  phase0->add_option("--out-params", p0_out_params, "DMV params output")->required();
  phase0->add_option("--out-treebank", p0_out_tb, "Viterbi annotation output");
  phase0->add_option("--threads", p0_threads, "decode threads");

  // parse
  std::string pa_model, pa_vocab, pa_input, pa_output;
  int pa_k = 10, pa_threads = 1;
  auto* parse = app.add_subcommand("parse", "k-best parsing with a trained model");
  parse->add_option("--model", pa_model, "weight model")->required();
  parse->add_option("--vocab", pa_vocab, "vocabulary file")->required();
  parse->add_option("--k", pa_k, "list size")->check(CLI::Range(1, 100000));
  parse->add_option("--input", pa_input, "CoNLL input")->required();
  parse->add_option("--output-kbest", pa_output, "k-best output")->required();
  parse->add_option("--threads", pa_threads, "decode threads");

  // rerank
  std::string rr_model, rr_vocab, rr_kbest, rr_output;
  int rr_threads = 1;
  auto* rrank = app.add_subcommand("rerank", "select candidates with an IORNN model");
  rrank->add_option("--model", rr_model, "IORNN params")->required();
  rrank->add_option("--vocab", rr_vocab, "vocabulary file")->required();
  rrank->add_option("--kbest", rr_kbest, "k-best input")->required();
  rrank->add_option("--output", rr_output, "CoNLL output")->required();
  rrank->add_option("--threads", rr_threads, "threads");

  // mpir
  MpirCli mc;
  auto* mpir = app.add_subcommand("mpir", "full multi-phase iterated reranking run");
  mpir->add_option("--config", mc.config_path, "key = value config file");
  mpir->add_option("--corpus", mc.corpus, "CoNLL corpus (overrides config)");
  mpir->add_option("--out-dir", mc.out_dir, "output directory (overrides config)");
  mpir->add_option("--embeddings", mc.embeddings, "embedding file (overrides config)");
  mpir->add_option("--enc", mc.enc, "max (iters_MST=1) or min (iters_MST=10)")
      ->check(CLI::IsMember({"max", "min"}));
  mpir->add_option("--seed", mc.seed, "master seed");
  mpir->add_option("--threads", mc.threads, "sentence-level fan-out");
  mpir->add_option("--halt-after", mc.halt_after,
                   "stop cleanly after N iterations this run (resume later)");
  mpir->add_flag("--no-resume", mc.no_resume, "fail instead of resuming an existing run");

  // eval
  std::string ev_gold, ev_pred, ev_exclude, ev_json;
  std::optional<int> ev_cap;
  bool ev_full = false;
  int ev_cap_raw = -1;
  auto* eval = app.add_subcommand("eval", "directed dependency accuracy and reports");
  eval->add_option("--gold", ev_gold, "gold CoNLL")->required();
  eval->add_option("--pred", ev_pred, "predicted CoNLL")->required();
  eval->add_option("--cap", ev_cap_raw, "also report DDA at this length cap");
  eval->add_option("--exclude-pos", ev_exclude, "comma-separated POS tags to skip");
  eval->add_option("--json", ev_json, "write the full report as JSON");
  eval->add_flag("--full", ev_full, "print distance and POS reports");

  // synth
  std::string sy_grammar, sy_out;
  int sy_count = 0, sy_max_len = 10, sy_lexicon = 25;
  uint64_t sy_seed = 1;
  auto* synth = app.add_subcommand("synth", "sample a corpus from a DMV params file");
  synth->add_option("--grammar", sy_grammar, "DMV params file")->required();
  synth->add_option("--count", sy_count, "number of sentences")
      ->check(CLI::NonNegativeNumber)
      ->required();
  synth->add_option("--seed", sy_seed, "sampler seed");
  synth->add_option("--max-len", sy_max_len, "rejection cap on length")
      ->check(CLI::Range(1, 10000));
  synth->add_option("--lexicon-size", sy_lexicon, "words per POS tag")
      ->check(CLI::Range(1, 1000000));
  synth->add_option("--out", sy_out, "CoNLL output (with gold trees)")->required();

  CLI11_PARSE(app, argc, argv);
  mc.enc_given = mpir->count("--enc") > 0;
  mc.seed_given = mpir->count("--seed") > 0;
  mc.threads_given = mpir->count("--threads") > 0;

  try {
    if (*phase0) {
      return cmd_phase0(p0_corpus, p0_iters, p0_smoothing, p0_max_len, p0_out_params,
                        p0_out_tb, p0_threads);
    }
    if (*parse) {
      return cmd_parse(pa_model, pa_vocab, pa_input, pa_k, pa_output, pa_threads);
    }
    if (*rrank) {
      return cmd_rerank(rr_model, rr_vocab, rr_kbest, rr_output, rr_threads);
    }
    if (*mpir) return cmd_mpir(mc);
    if (*eval) {
      if (ev_cap_raw >= 0) ev_cap = ev_cap_raw;
      return cmd_eval(ev_gold, ev_pred, ev_cap, ev_exclude, ev_json, ev_full);
    }
    if (*synth) {
      return cmd_synth(sy_grammar, sy_count, sy_seed, sy_max_len, sy_lexicon, sy_out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
