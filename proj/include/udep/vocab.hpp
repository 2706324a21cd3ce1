#ifndef UDEP_VOCAB_HPP
#define UDEP_VOCAB_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "udep/types.hpp"

namespace udep {

// Word ids are dense and 0-based. The first three ids are reserved; any
// norm string below the count threshold maps to kUnknownId.
struct Vocabulary {
  static constexpr int kUnknownId = 0;
  static constexpr int kRootId = 1;
  static constexpr int kEocId = 2;
  static constexpr int kNumReserved = 3;

  std::vector<std::string> words;     // id -> norm string ("<unk>" etc. for reserved)
  std::vector<int64_t> counts;        // id -> training count (0 for reserved)
  std::unordered_map<std::string, int> word_ids;
  std::vector<std::string> pos_tags;  // id -> POS
  std::unordered_map<std::string, int> pos_ids;

  int num_words() const { return static_cast<int>(words.size()); }
  int num_pos() const { return static_cast<int>(pos_tags.size()); }

  int word_id(const std::string& norm) const {
    auto it = word_ids.find(norm);
    return it == word_ids.end() ? kUnknownId : it->second;
  }
  int pos_id(const std::string& pos) const {
    auto it = pos_ids.find(pos);
    return it == pos_ids.end() ? -1 : it->second;
  }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);
  std::string serialize() const;

  // FNV-1a over the serialized form; stored in model headers so a model
  // can reject a foreign vocabulary.
  uint64_t hash() const;
};

Vocabulary build_vocab(const std::vector<Sentence>& sentences, int min_count = 3);

}  // namespace udep

#endif  // UDEP_VOCAB_HPP
