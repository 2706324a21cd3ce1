#ifndef UDEP_EMBEDDINGS_HPP
#define UDEP_EMBEDDINGS_HPP

#include <string>
#include <unordered_map>
#include <vector>

namespace udep {

// Plain-text embedding dump: one token per line, `word v1 v2 ... vd`,
// space-separated. The dimension is taken from the first line.
struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  bool has(const std::string& word) const { return vectors.count(word) != 0; }
};

EmbeddingTable load_embeddings(const std::string& path);

}  // namespace udep

#endif  // UDEP_EMBEDDINGS_HPP
