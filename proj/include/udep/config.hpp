#ifndef UDEP_CONFIG_HPP
#define UDEP_CONFIG_HPP

#include <map>
#include <set>
#include <string>

namespace udep {

// `key = value` lines, '#' starts a comment, blank lines ignored.
// Unknown keys are rejected.
std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     const std::set<std::string>& allowed);
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& name,
                                                     const std::set<std::string>& allowed);

}  // namespace udep

#endif  // UDEP_CONFIG_HPP
