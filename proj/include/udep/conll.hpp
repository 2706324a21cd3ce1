#ifndef UDEP_CONLL_HPP
#define UDEP_CONLL_HPP

#include <iosfwd>
#include <string>

#include "udep/types.hpp"

namespace udep {

// Four tab-separated columns per token line: ID, FORM, POS, HEAD.
// Blocks are separated by exactly one blank line. HEAD '_' marks an
// unannotated sentence (the whole block must then use '_').
Treebank read_conll(const std::string& path);
Treebank read_conll_stream(std::istream& in, const std::string& name);

void write_conll(const Treebank& tb, const std::string& path);
void write_conll_stream(const Treebank& tb, std::ostream& out);

}  // namespace udep

#endif  // UDEP_CONLL_HPP
