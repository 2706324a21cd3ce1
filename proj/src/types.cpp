#include "udep/types.hpp"

#include <cctype>
#include <stdexcept>

namespace udep {

std::string normalize_word(const std::string& surface) {
  std::string out;
  out.reserve(surface.size());
  for (unsigned char ch : surface) {
    if (ch >= '0' && ch <= '9') {
      out.push_back('0');
    } else if (ch < 0x80) {
      out.push_back(static_cast<char>(std::tolower(ch)));
    } else {
      out.push_back(static_cast<char>(ch));
    }
  }
  return out;
}

CapClass cap_class(const std::string& surface) {
  int letters = 0, upper = 0;
  bool first_letter_upper = false;
  bool rest_lower = true;
  for (unsigned char ch : surface) {
    if (ch < 0x80 && std::isalpha(ch)) {
      bool is_upper = std::isupper(ch) != 0;
      if (letters == 0) {
        first_letter_upper = is_upper;
      } else if (is_upper) {
        rest_lower = false;
      }
      ++letters;
      if (is_upper) ++upper;
    }
  }
  if (letters == 0) return CapClass::kNoLetters;
  if (upper == 0) return CapClass::kAllLower;
  if (upper == letters && letters >= 2) return CapClass::kAllUpper;
  if (first_letter_upper && rest_lower) return CapClass::kFirstUpper;
  return CapClass::kMixed;
}

std::string cap_class_name(CapClass c) {
  switch (c) {
    case CapClass::kAllLower: return "ALL_LOWER";
    case CapClass::kFirstUpper: return "FIRST_UPPER";
    case CapClass::kAllUpper: return "ALL_UPPER";
    case CapClass::kMixed: return "MIXED";
    case CapClass::kNoLetters: return "NO_LETTERS";
  }
  return "?";
}

Token Token::make(std::string surface, std::string pos) {
  Token t;
  t.norm = normalize_word(surface);
  t.cap = cap_class(surface);
  t.surface = std::move(surface);
  t.pos = std::move(pos);
  return t;
}

bool is_single_root(const DepTree& t) {
  int roots = 0;
  for (int h : t.heads) {
    if (h == 0) ++roots;
  }
  return roots == 1;
}

bool is_acyclic_spanning(const DepTree& t) {
  const int n = t.size();
  for (int i = 1; i <= n; ++i) {
    if (t.head(i) < 0 || t.head(i) > n) return false;
  }
  // Every token must reach ROOT by following heads.
  for (int i = 1; i <= n; ++i) {
    int cur = i, steps = 0;
    while (cur != 0) {
      cur = t.head(cur);
      if (++steps > n) return false;
    }
  }
  return true;
}

namespace {

bool is_ancestor(const DepTree& t, int anc, int node) {
  int cur = node;
  const int n = t.size();
  for (int steps = 0; steps <= n; ++steps) {
    if (cur == anc) return true;
    if (cur == 0) return false;
    cur = t.head(cur);
  }
  return false;
}

}  // namespace

bool is_projective(const DepTree& t) {
  const int n = t.size();
  for (int d = 1; d <= n; ++d) {
    int h = t.head(d);
    if (h == 0) continue;
    int lo = std::min(h, d), hi = std::max(h, d);
    for (int m = lo + 1; m < hi; ++m) {
      if (!is_ancestor(t, h, m)) return false;
    }
  }
  return true;
}

bool is_valid_tree(const DepTree& t) {
  return t.size() >= 1 && is_single_root(t) && is_acyclic_spanning(t) &&
         is_projective(t);
}

void check_tree(const DepTree& t, int sentence_len) {
  if (t.size() != sentence_len) {
    throw std::runtime_error("tree length " + std::to_string(t.size()) +
                             " does not match sentence length " +
                             std::to_string(sentence_len));
  }
  if (!is_single_root(t)) throw std::runtime_error("tree is not single-rooted");
  if (!is_acyclic_spanning(t)) throw std::runtime_error("tree has a cycle or out-of-range head");
  if (!is_projective(t)) throw std::runtime_error("tree is not projective");
}

bool Treebank::all_annotated() const {
  for (const auto& e : entries) {
    if (!e.tree.has_value()) return false;
  }
  return true;
}

Treebank filter_by_length(const Treebank& tb, int max_len) {
  if (max_len < 1) throw std::invalid_argument("filter_by_length: max_len must be >= 1");
  Treebank out;
  for (const auto& e : tb.entries) {
    if (e.sentence.size() <= max_len) out.entries.push_back(e);
  }
  return out;
}

std::vector<Sentence> sentences_of(const Treebank& tb) {
  std::vector<Sentence> out;
  out.reserve(tb.entries.size());
  for (const auto& e : tb.entries) out.push_back(e.sentence);
  return out;
}

uint64_t treebank_checksum(const Treebank& tb) {
  uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  feed(static_cast<uint64_t>(tb.entries.size()));
  for (const auto& e : tb.entries) {
    feed(static_cast<uint64_t>(e.sentence.size()));
    if (e.tree.has_value()) {
      for (int hd : e.tree->heads) feed(static_cast<uint64_t>(hd) + 1);
    } else {
      feed(0);
    }
  }
  return h;
}

}  // namespace udep
