#include "udep/kbest_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "udep/conll.hpp"

namespace udep {

void write_kbest(const KBestSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (const auto& list : set.lists) {
    const int total = list.size();
    for (int i = 0; i < total; ++i) {
      const auto& [tree, score] = list.candidates[i];
      out << "#cand=" << (i + 1) << '/' << total << '\n';
      std::snprintf(buf, sizeof(buf), "%.17g", score);
      out << "#score=" << buf << '\n';
      Treebank one;
      one.entries.push_back(Entry{list.sentence, tree});
      write_conll_stream(one, out);
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

KBestSet read_kbest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open k-best file: " + path);
  KBestSet set;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#cand=", 0) != 0) fail("expected #cand= marker");
    int rank = 0, total = 0;
    if (std::sscanf(line.c_str(), "#cand=%d/%d", &rank, &total) != 2) {
      fail("malformed #cand marker");
    }
    if (!std::getline(in, line)) fail("missing #score line");
    ++line_no;
    if (line.rfind("#score=", 0) != 0) fail("expected #score= marker");
    double score = std::stod(line.substr(7));
    // Collect the CoNLL block.
    std::ostringstream block;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) break;
      block << line << '\n';
    }
    block << '\n';
    std::istringstream bs(block.str());
    Treebank one = read_conll_stream(bs, path + "#cand");
    if (one.size() != 1 || !one.entries[0].tree.has_value()) {
      fail("candidate block must hold exactly one annotated sentence");
    }
    if (rank == 1) {
      KBestList list;
      list.sentence = one.entries[0].sentence;
      set.lists.push_back(std::move(list));
    }
    if (set.lists.empty()) fail("first candidate must have rank 1");
    set.lists.back().candidates.emplace_back(std::move(*one.entries[0].tree), score);
  }
  return set;
}

}  // namespace udep
