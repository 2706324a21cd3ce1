#include "udep/embeddings.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace udep {

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  EmbeddingTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> vec;
    double v;
    while (ls >> v) vec.push_back(v);
    if (vec.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": embedding line has no values");
    }
    if (table.dim == 0) {
      table.dim = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != table.dim) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": inconsistent embedding dimension (" +
                               std::to_string(vec.size()) + " vs " +
                               std::to_string(table.dim) + ")");
    }
    table.vectors[word] = std::move(vec);
  }
  return table;
}

}  // namespace udep
