#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftlab::cli {

using KeyValues = std::map<std::string, std::string>;

struct ConfigFile {
  KeyValues top;
  std::map<std::string, KeyValues> sections;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// key = value lines, '#' comments, [section] headers. Section names must be
/// in `allowed_sections`; duplicate keys in one scope are rejected.
ConfigFile parse_config(const std::string& text, const std::string& origin,
                        const std::vector<std::string>& allowed_sections);
ConfigFile load_config(const std::string& path, const std::vector<std::string>& allowed_sections);

/// Top-level keys overlaid by the keys of `section`.
KeyValues merged(const ConfigFile& file, const std::string& section);

}  // namespace driftlab::cli
