#include "udep/conll.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace udep {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

[[noreturn]] void fail(const std::string& name, int line_no, const std::string& msg) {
  throw std::runtime_error(name + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

Treebank read_conll_stream(std::istream& in, const std::string& name) {
  Treebank tb;
  Sentence sent;
  std::vector<int> heads;
  bool heads_present = false;
  bool block_open = false;
  int line_no = 0;

  auto flush_block = [&](int at_line) {
    if (!block_open) return;
    Entry e;
    e.sentence = std::move(sent);
    if (heads_present) {
      DepTree t;
      t.heads = std::move(heads);
      try {
        check_tree(t, e.sentence.size());
      } catch (const std::exception& ex) {
        fail(name, at_line, std::string("invalid tree: ") + ex.what());
      }
      e.tree = std::move(t);
    }
    tb.entries.push_back(std::move(e));
    sent = Sentence{};
    heads.clear();
    heads_present = false;
    block_open = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!block_open) fail(name, line_no, "consecutive blank lines");
      flush_block(line_no);
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 4) {
      fail(name, line_no,
           "expected 4 tab-separated columns, got " + std::to_string(cols.size()));
    }
    int id = 0;
    try {
      id = std::stoi(cols[0]);
    } catch (...) {
      fail(name, line_no, "non-integer ID '" + cols[0] + "'");
    }
    if (id != sent.size() + 1) {
      fail(name, line_no, "ID " + cols[0] + " out of sequence (expected " +
                              std::to_string(sent.size() + 1) + ")");
    }
    if (cols[1].empty()) fail(name, line_no, "empty FORM");
    if (cols[2].empty()) fail(name, line_no, "empty POS");

    const bool unannotated = (cols[3] == "_");
    if (!block_open) {
      block_open = true;
      heads_present = !unannotated;
    } else if (heads_present == unannotated) {
      fail(name, line_no, "mixed annotated and '_' HEAD values within a block");
    }
    if (!unannotated) {
      int h = 0;
      size_t consumed = 0;
      try {
        h = std::stoi(cols[3], &consumed);
      } catch (...) {
        fail(name, line_no, "non-integer HEAD '" + cols[3] + "'");
      }
      if (consumed != cols[3].size()) {
        fail(name, line_no, "non-integer HEAD '" + cols[3] + "'");
      }
      heads.push_back(h);
    }
    sent.tokens.push_back(Token::make(cols[1], cols[2]));
  }
  flush_block(line_no);
  return tb;
}

Treebank read_conll(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CoNLL file: " + path);
  return read_conll_stream(in, path);
}

void write_conll_stream(const Treebank& tb, std::ostream& out) {
  for (const auto& e : tb.entries) {
    const int n = e.sentence.size();
    for (int i = 1; i <= n; ++i) {
      const Token& tok = e.sentence.at(i);
      out << i << '\t' << tok.surface << '\t' << tok.pos << '\t';
      if (e.tree.has_value()) {
        out << e.tree->head(i);
      } else {
        out << '_';
      }
      out << '\n';
    }
    out << '\n';
  }
}

void write_conll(const Treebank& tb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_conll_stream(tb, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace udep
