#include "udep/vocab.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace udep {

namespace {
const char* kReservedForms[Vocabulary::kNumReserved] = {"<unk>", "<root>", "<eoc>"};
}

Vocabulary build_vocab(const std::vector<Sentence>& sentences, int min_count) {
  if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");
  Vocabulary v;
  for (int i = 0; i < Vocabulary::kNumReserved; ++i) {
    v.words.push_back(kReservedForms[i]);
    v.counts.push_back(0);
    v.word_ids[kReservedForms[i]] = i;
  }
  // First pass: raw counts and POS inventory in first-occurrence order.
  std::unordered_map<std::string, int64_t> raw;
  std::vector<std::string> order;
  for (const auto& s : sentences) {
    for (const auto& tok : s.tokens) {
      auto [it, inserted] = raw.try_emplace(tok.norm, 0);
      if (inserted) order.push_back(tok.norm);
      ++it->second;
      if (!v.pos_ids.count(tok.pos)) {
        v.pos_ids[tok.pos] = v.num_pos();
        v.pos_tags.push_back(tok.pos);
      }
    }
  }
  for (const auto& w : order) {
    int64_t c = raw[w];
    if (c >= min_count) {
      v.word_ids[w] = v.num_words();
      v.words.push_back(w);
      v.counts.push_back(c);
    }
  }
  return v;
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  for (int id = 0; id < num_words(); ++id) {
    out << words[id] << '\t' << id << '\t' << counts[id] << '\n';
  }
  out << "#pos\n";
  for (int id = 0; id < num_pos(); ++id) {
    out << pos_tags[id] << '\t' << id << '\n';
  }
  return out.str();
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << serialize();
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  Vocabulary v;
  std::string line;
  int line_no = 0;
  bool in_pos = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "#pos") {
      in_pos = true;
      continue;
    }
    std::istringstream ls(line);
    std::string form, id_s, count_s;
    if (!std::getline(ls, form, '\t') || !std::getline(ls, id_s, '\t')) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed vocabulary line");
    }
    if (in_pos) {
      int id = std::stoi(id_s);
      if (id != v.num_pos()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": POS ids out of order");
      }
      v.pos_ids[form] = id;
      v.pos_tags.push_back(form);
    } else {
      if (!std::getline(ls, count_s, '\t')) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing count column");
      }
      int id = std::stoi(id_s);
      if (id != v.num_words()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": word ids out of order");
      }
      v.word_ids[form] = id;
      v.words.push_back(form);
      v.counts.push_back(std::stoll(count_s));
    }
  }
  if (v.num_words() < kNumReserved) {
    throw std::runtime_error(path + ": vocabulary missing reserved entries");
  }
  return v;
}

uint64_t Vocabulary::hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : serialize()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace udep
