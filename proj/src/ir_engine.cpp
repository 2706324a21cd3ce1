#include "udep/ir_engine.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "udep/conll.hpp"
#include "udep/dmv.hpp"
#include "udep/eisner.hpp"
#include "udep/evaluation.hpp"
#include "udep/parallel.hpp"
#include "udep/perceptron.hpp"
#include "udep/rng.hpp"

namespace udep {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_checksum(uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool same_trees(const Treebank& a, const Treebank& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (a.entries[i].tree.has_value() != b.entries[i].tree.has_value()) return false;
    if (a.entries[i].tree.has_value() && !(*a.entries[i].tree == *b.entries[i].tree)) {
      return false;
    }
  }
  return true;
}

IornnConfig reranker_config(const PhaseConfig& cfg, uint64_t seed) {
  IornnConfig rc;
  rc.dim = cfg.reranker.dim;
  rc.word_dim = cfg.reranker.word_dim;
  rc.pos_dim = cfg.reranker.pos_dim;
  rc.cap_dim = cfg.reranker.cap_dim;
  rc.iters = cfg.reranker.iters;
  rc.lr = cfg.reranker.lr;
  rc.seed = seed;
  rc.threads = cfg.threads;
  return rc;
}

[[noreturn]] void stage_fail(const std::string& stage, const std::exception& e) {
  throw std::runtime_error("ir_iteration stage [" + stage + "]: " + e.what());
}

}  // namespace

IterationResult ir_iteration(const Treebank& D, const Vocabulary& vocab,
                             const PhaseConfig& cfg, const EmbeddingTable* embeddings,
                             const Treebank* gold, const WeightModel* warm_parser,
                             const IornnParams* warm_reranker) {
  if (D.size() == 0) throw std::invalid_argument("ir_iteration: empty treebank");
  if (cfg.k < 1) throw std::invalid_argument("ir_iteration: k must be >= 1");
  auto start = std::chrono::steady_clock::now();

  IterationResult res;
  FeatureExtractor fx(vocab);
  try {
    res.parser = train_parser(D, fx, cfg.iters_mst, derive_seed(cfg.seed, 0x21), nullptr,
                              cfg.warm_start ? warm_parser : nullptr);
  } catch (const std::exception& e) {
    stage_fail("train-parser", e);
  }
  try {
    res.kbest.lists.resize(D.size());
    parallel_for(D.size(), cfg.threads, [&](int i) {
      res.kbest.lists[i] = parse_kbest(res.parser, fx, D.entries[i].sentence, cfg.k);
    });
  } catch (const std::exception& e) {
    stage_fail("kbest", e);
  }
  try {
    res.reranker = train_iornn(D, vocab, reranker_config(cfg, derive_seed(cfg.seed, 0x22)),
                               embeddings, nullptr, cfg.warm_start ? warm_reranker : nullptr);
  } catch (const std::exception& e) {
    stage_fail("train-reranker", e);
  }
  try {
    res.next.entries.resize(D.size());
    std::vector<double> lps(D.size());
    parallel_for(D.size(), cfg.threads, [&](int i) {
      double lp = 0;
      int pick = rerank_index(res.reranker, vocab, res.kbest.lists[i], &lp);
      res.next.entries[i] =
          Entry{D.entries[i].sentence, res.kbest.lists[i].candidates[pick].first};
      lps[i] = lp;
    });
    double total = 0;
    for (double lp : lps) total += lp;
    res.record.mean_logprob = total / D.size();
  } catch (const std::exception& e) {
    stage_fail("select", e);
  }

  res.record.checksum = treebank_checksum(res.next);
  if (gold) {
    res.record.dda = dda(*gold, res.next);
  }
  res.record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

PhaseResult run_phase(const Treebank& D_start, const std::vector<Sentence>& sentences,
                      const PhaseConfig& cfg, const Vocabulary& vocab,
                      const EmbeddingTable* embeddings, const Treebank* gold,
                      int first_iteration, int iteration_budget,
                      const std::function<void(const IterationResult&)>& sink) {
  if (cfg.iterations < 1) throw std::invalid_argument("run_phase: iterations must be >= 1");
  if (static_cast<int>(sentences.size()) != D_start.size()) {
    throw std::invalid_argument("run_phase: starting treebank does not cover the phase's sentences");
  }
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].size() != D_start.entries[i].sentence.size()) {
      throw std::invalid_argument("run_phase: sentence " + std::to_string(i) +
                                  " differs from the starting treebank");
    }
  }

  PhaseResult pr;
  pr.treebank = D_start;
  Treebank cur = D_start;
  std::optional<WeightModel> last_parser;
  std::optional<IornnParams> last_reranker;
  int executed = 0;
  for (int iter = first_iteration; iter <= cfg.iterations; ++iter) {
    if (iteration_budget > 0 && executed >= iteration_budget) {
      pr.halted = true;
      break;
    }
    PhaseConfig itcfg = cfg;
    itcfg.seed = derive_seed(cfg.seed, 0x20, static_cast<uint64_t>(iter));
    IterationResult res =
        ir_iteration(cur, vocab, itcfg, embeddings, gold,
                     last_parser ? &*last_parser : nullptr,
                     last_reranker ? &*last_reranker : nullptr);
    res.record.iteration = iter;
    res.record.fixed_point = same_trees(res.next, cur);
    ++executed;
    pr.last_iteration = iter;
    pr.fixed_point = res.record.fixed_point;
    if (sink) sink(res);
    cur = std::move(res.next);
    last_parser = std::move(res.parser);
    last_reranker = std::move(res.reranker);
    if (pr.fixed_point) break;
  }
  pr.treebank = std::move(cur);
  if (last_parser) pr.parser = std::move(*last_parser);
  if (last_reranker) pr.reranker = std::move(*last_reranker);
  return pr;
}

Treebank parse_final(const WeightModel& parser, const IornnParams& reranker,
                     const Vocabulary& vocab, const std::vector<Sentence>& sentences,
                     int k, int threads) {
  FeatureExtractor fx(vocab);
  Treebank out;
  out.entries.resize(sentences.size());
  parallel_for(static_cast<int>(sentences.size()), threads, [&](int i) {
    KBestList kb = parse_kbest(parser, fx, sentences[i], k);
    out.entries[i] = Entry{sentences[i], rerank(reranker, vocab, kb).first};
  });
  return out;
}

std::vector<PhaseConfig> default_schedule(const PhaseConfig& base, int final_max_len,
                                          int phase1_iterations) {
  if (final_max_len < base.max_len) {
    throw std::invalid_argument("default_schedule: final_max_len below phase-1 length");
  }
  std::vector<PhaseConfig> out;
  PhaseConfig p1 = base;
  p1.iterations = phase1_iterations;
  p1.seed = derive_seed(base.seed, 0x30, 1);
  out.push_back(p1);
  for (int len = base.max_len + 1; len <= final_max_len; ++len) {
    PhaseConfig p = base;
    p.max_len = len;
    p.iterations = 1;
    p.seed = derive_seed(base.seed, 0x30, static_cast<uint64_t>(out.size() + 1));
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run directory: manifest, per-iteration checkpoints, resume.

namespace {

class RunDir {
 public:
  RunDir(const std::string& dir, const std::map<std::string, std::string>& echo,
         bool resume)
      : dir_(dir) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    const std::string mpath = manifest_path();
    if (std::filesystem::exists(mpath)) {
      if (!resume) {
        throw std::runtime_error("manifest already exists (resume disabled): " + mpath);
      }
      parse_manifest(mpath, echo);
      manifest_.open(mpath, std::ios::app);
    } else {
      manifest_.open(mpath);
      manifest_ << "#udep-mpir-manifest v1\n";
      for (const auto& [k, v] : echo) {
        manifest_ << "#cfg " << k << '=' << v << '\n';
      }
      manifest_ << "#columns phase\titeration\ttreebank_file\tchecksum\tmean_logprob\tdda\tfixed_point\n";
      manifest_.flush();
    }
    if (!manifest_) throw std::runtime_error("cannot open manifest: " + mpath);
    log_.open(dir_ + "/run.log", std::ios::app);
  }

  bool enabled() const { return !dir_.empty(); }

  std::string manifest_path() const { return dir_ + "/manifest.tsv"; }
  std::string tb_path(int phase, int iter) const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "tb_p%02d_i%03d.conll", phase, iter);
    return buf;
  }
  std::string parser_path(int phase) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "parser_p%02d.model", phase);
    return dir_ + "/" + buf;
  }
  std::string reranker_path(int phase) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "reranker_p%02d.model", phase);
    return dir_ + "/" + buf;
  }

  bool has(int phase, int iter) const { return records_.count({phase, iter}) != 0; }
  int last_iteration(int phase) const {
    int best = -1;
    for (const auto& [key, rec] : records_) {
      if (key.first == phase) best = std::max(best, key.second);
    }
    return best;
  }
  bool fixed_point_reached(int phase) const {
    for (const auto& [key, rec] : records_) {
      if (key.first == phase && rec.fixed_point) return true;
    }
    return false;
  }

  Treebank load_tb(int phase, int iter) const {
    return read_conll(dir_ + "/" + tb_path(phase, iter));
  }

  void append(const ManifestRecord& rec, const Treebank& tb) {
    if (!enabled()) return;
    write_conll(tb, dir_ + "/" + rec.treebank_file);
    manifest_ << rec.phase << '\t' << rec.iteration << '\t' << rec.treebank_file << '\t'
              << fmt_checksum(rec.checksum) << '\t'
              << (rec.mean_logprob ? fmt17(*rec.mean_logprob) : std::string("NA")) << '\t'
              << (rec.dda ? fmt17(*rec.dda) : std::string("NA")) << '\t'
              << (rec.fixed_point ? 1 : 0) << '\n';
    manifest_.flush();
    records_[{rec.phase, rec.iteration}] = rec;
  }

  void log(const std::string& line) {
    if (!enabled()) return;
    log_ << line << '\n';
    log_.flush();
  }

 private:
  void parse_manifest(const std::string& path,
                      const std::map<std::string, std::string>& echo) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read manifest: " + path);
    std::string line;
    std::map<std::string, std::string> seen_echo;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (line.rfind("#cfg ", 0) == 0) {
          std::string kv = line.substr(5);
          size_t eq = kv.find('=');
          if (eq != std::string::npos) seen_echo[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        continue;
      }
      std::istringstream ls(line);
      ManifestRecord rec;
      std::string checksum, mean_lp, dda_s, fixed;
      std::string phase_s, iter_s;
      if (!std::getline(ls, phase_s, '\t') || !std::getline(ls, iter_s, '\t') ||
          !std::getline(ls, rec.treebank_file, '\t') || !std::getline(ls, checksum, '\t') ||
          !std::getline(ls, mean_lp, '\t') || !std::getline(ls, dda_s, '\t') ||
          !std::getline(ls, fixed, '\t')) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed manifest record");
      }
      rec.phase = std::stoi(phase_s);
      rec.iteration = std::stoi(iter_s);
      rec.checksum = std::stoull(checksum, nullptr, 16);
      if (mean_lp != "NA") rec.mean_logprob = std::stod(mean_lp);
      if (dda_s != "NA") rec.dda = std::stod(dda_s);
      rec.fixed_point = fixed == "1";
      if (!std::filesystem::exists(dir_ + "/" + rec.treebank_file)) {
        throw std::runtime_error("manifest names a missing treebank: " + rec.treebank_file);
      }
      records_[{rec.phase, rec.iteration}] = rec;
    }
    if (seen_echo != echo) {
      throw std::runtime_error("manifest config does not match the requested run; "
                               "use a fresh output directory");
    }
  }

  std::string dir_;
  std::ofstream manifest_, log_;
  std::map<std::pair<int, int>, ManifestRecord> records_;
};

}  // namespace

MpirResult run_mpir(const Treebank& corpus, const MpirOptions& opts) {
  const auto& schedule = opts.schedule;
  if (schedule.empty()) throw std::invalid_argument("run_mpir: empty phase schedule");
  for (size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].max_len <= schedule[i - 1].max_len) {
      throw std::invalid_argument("run_mpir: schedule lengths must be strictly increasing");
    }
  }
  const int threads = schedule[0].threads;
  const bool gold_available = corpus.size() > 0 && corpus.all_annotated();

  RunDir run(opts.out_dir, opts.config_echo, opts.resume);

  // Phase sentence slices; nesting is guaranteed by the increasing caps but
  // verified anyway, since the curriculum hand-off relies on it.
  std::vector<Treebank> slices;
  for (size_t pi = 0; pi < schedule.size(); ++pi) {
    Treebank slice = filter_by_length(corpus, schedule[pi].max_len);
    if (slice.size() == 0) {
      throw std::runtime_error("phase " + std::to_string(pi + 1) +
                               ": empty sentence set (max_len " +
                               std::to_string(schedule[pi].max_len) + ")");
    }
    if (pi > 0 && slice.size() < slices.back().size()) {
      throw std::runtime_error("phase " + std::to_string(pi + 1) +
                               ": sentence set does not contain the previous phase's");
    }
    slices.push_back(std::move(slice));
  }

  MpirResult result;
  result.vocab = build_vocab(sentences_of(corpus), opts.vocab_min_count);
  if (run.enabled()) result.vocab.save(opts.out_dir + "/vocab.tsv");

  std::optional<EmbeddingTable> embeddings;
  if (!opts.embeddings_path.empty()) {
    embeddings = load_embeddings(opts.embeddings_path);
  }
  const EmbeddingTable* emb = embeddings ? &*embeddings : nullptr;

  int budget_left = opts.halt_after_iterations;  // <= 0: unlimited
  const bool budgeted = opts.halt_after_iterations > 0;
  bool halted = false;

  // Phase 0: DMV hard-EM on the shortest slice, decoding it into D1.
  Treebank D;
  {
    const auto& slice = slices[0];
    if (run.enabled() && run.has(1, 0)) {
      D = run.load_tb(1, 0);
    } else {
      auto s0 = sentences_of(slice);
      auto t0 = std::chrono::steady_clock::now();
      DmvParams init = harmonic_init(s0, opts.phase0_smoothing);
      std::vector<double> em_log;
      DmvParams dmv = hard_em_train(s0, init, opts.phase0_iters, opts.phase0_smoothing,
                                    &em_log, threads);
      D = annotate(dmv, s0, threads);
      double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ManifestRecord rec;
      rec.phase = 1;
      rec.iteration = 0;
      rec.checksum = treebank_checksum(D);
      rec.treebank_file = run.tb_path(1, 0);
      if (gold_available) rec.dda = dda(slices[0], D);
      if (run.enabled()) {
        dmv.save(opts.out_dir + "/dmv_phase0.params");
        run.append(rec, D);
        std::ostringstream msg;
        msg << "phase 0: hard-EM iters=" << opts.phase0_iters << " wall=" << wall << "s";
        for (size_t i = 0; i < em_log.size(); ++i) msg << " L" << (i + 1) << "=" << em_log[i];
        run.log(msg.str());
      }
    }
  }

  bool have_models = false;
  for (size_t pi = 1; pi <= schedule.size() && !halted; ++pi) {
    PhaseConfig cfg = schedule[pi - 1];
    const Treebank& slice = slices[pi - 1];
    const Treebank* gold = gold_available ? &slice : nullptr;
    const int phase = static_cast<int>(pi);

    // Starting treebank for phases after the first: previous phase's models
    // annotate-and-rerank the enlarged slice.
    if (phase > 1) {
      if (run.enabled() && run.has(phase, 0)) {
        D = run.load_tb(phase, 0);
      } else {
        auto t0 = std::chrono::steady_clock::now();
        D = parse_final(result.parser, result.reranker, result.vocab,
                        sentences_of(slice), cfg.k, threads);
        ManifestRecord rec;
        rec.phase = phase;
        rec.iteration = 0;
        rec.checksum = treebank_checksum(D);
        rec.treebank_file = run.tb_path(phase, 0);
        if (gold) rec.dda = dda(*gold, D);
        run.append(rec, D);
        run.log("phase " + std::to_string(phase) + " handoff: wall=" +
                std::to_string(std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count()) +
                "s");
      }
    }

    // Resume bookkeeping within the phase.
    int done = run.enabled() ? std::max(0, run.last_iteration(phase)) : 0;
    bool complete =
        run.enabled() && (done >= cfg.iterations || run.fixed_point_reached(phase));
    if (complete) {
      D = run.load_tb(phase, done);
      result.parser = WeightModel::load(run.parser_path(phase));
      result.reranker = IornnParams::load(run.reranker_path(phase));
      have_models = true;
      continue;
    }
    if (done > 0) D = run.load_tb(phase, done);

    if (budgeted && budget_left <= 0) {
      halted = true;
      break;
    }

    auto sink = [&](const IterationResult& res) {
      ManifestRecord rec = res.record;
      rec.phase = phase;
      rec.treebank_file = run.tb_path(phase, rec.iteration);
      if (run.enabled()) {
        res.parser.save(run.parser_path(phase));
        res.reranker.save(run.reranker_path(phase));
        run.append(rec, res.next);
        std::ostringstream msg;
        msg << "phase " << phase << " iter " << rec.iteration
            << ": wall=" << rec.wall_seconds << "s";
        if (rec.mean_logprob) msg << " mean_lp=" << *rec.mean_logprob;
        if (rec.dda) msg << " dda=" << *rec.dda;
        if (rec.fixed_point) msg << " fixed-point";
        run.log(msg.str());
      }
    };

    PhaseResult pr = run_phase(D, sentences_of(slice), cfg, result.vocab, emb, gold,
                               done + 1, budgeted ? budget_left : 0, sink);
    if (pr.last_iteration >= done + 1) {
      result.parser = std::move(pr.parser);
      result.reranker = std::move(pr.reranker);
      have_models = true;
      budget_left -= pr.last_iteration - done;
    }
    D = std::move(pr.treebank);
    if (pr.halted) halted = true;
  }

  result.treebank = std::move(D);
  result.halted_early = halted;
  if (!halted && run.enabled()) {
    write_conll(result.treebank, opts.out_dir + "/treebank_final.conll");
    if (have_models) {
      result.parser.save(opts.out_dir + "/parser_final.model");
      result.reranker.save(opts.out_dir + "/reranker_final.model");
    }
  }
  return result;
}

}  // namespace udep
