#ifndef UDEP_TYPES_HPP
#define UDEP_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace udep {

// Attachment direction of a dependent relative to its head.
enum Dir { kLeft = 0, kRight = 1 };

// Capitalization category of a raw word form. Only ASCII letters are
// classified; anything else counts as a non-letter.
enum class CapClass {
  kAllLower = 0,
  kFirstUpper = 1,
  kAllUpper = 2,
  kMixed = 3,
  kNoLetters = 4,
};
constexpr int kNumCapClasses = 5;

// Digits -> '0', ASCII letters lowercased. Idempotent.
std::string normalize_word(const std::string& surface);
CapClass cap_class(const std::string& surface);
std::string cap_class_name(CapClass c);

struct Token {
  std::string surface;
  std::string norm;
  std::string pos;
  CapClass cap = CapClass::kNoLetters;

  static Token make(std::string surface, std::string pos);
};

// Positions are 1-based; position 0 is the implicit ROOT and is never stored.
struct Sentence {
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  const Token& at(int pos) const { return tokens[pos - 1]; }
};

// heads[i-1] is the head position of token i, in [0, n]; 0 means ROOT.
struct DepTree {
  std::vector<int> heads;

  int size() const { return static_cast<int>(heads.size()); }
  int head(int pos) const { return heads[pos - 1]; }
  bool operator==(const DepTree&) const = default;
};

bool is_single_root(const DepTree& t);
bool is_acyclic_spanning(const DepTree& t);
bool is_projective(const DepTree& t);
bool is_valid_tree(const DepTree& t);
// Throws std::runtime_error on any violated tree invariant.
void check_tree(const DepTree& t, int sentence_len);

struct Entry {
  Sentence sentence;
  std::optional<DepTree> tree;
};

struct Treebank {
  std::vector<Entry> entries;

  int size() const { return static_cast<int>(entries.size()); }
  bool all_annotated() const;
};

Treebank filter_by_length(const Treebank& tb, int max_len);
std::vector<Sentence> sentences_of(const Treebank& tb);

// FNV-1a over sentence lengths and head vectors; used for run manifests.
uint64_t treebank_checksum(const Treebank& tb);

}  // namespace udep

#endif  // UDEP_TYPES_HPP
