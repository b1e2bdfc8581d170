#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace driftlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile parse_config(const std::string& text, const std::string& origin,
                        const std::vector<std::string>& allowed_sections) {
  ConfigFile file;
  KeyValues* scope = &file.top;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (std::find(allowed_sections.begin(), allowed_sections.end(), name) == allowed_sections.end())
        fail("unknown section '" + name + "'");
      if (file.sections.contains(name)) fail("duplicate section '" + name + "'");
      scope = &file.sections[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (scope->contains(key)) fail("duplicate key '" + key + "'");
    (*scope)[key] = value;
  }
  return file;
}

ConfigFile load_config(const std::string& path, const std::vector<std::string>& allowed_sections) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path, allowed_sections);
}

KeyValues merged(const ConfigFile& file, const std::string& section) {
  KeyValues out = file.top;
  if (auto it = file.sections.find(section); it != file.sections.end())
    for (const auto& [k, v] : it->second) out[k] = v;
  return out;
}

}  // namespace driftlab::cli
