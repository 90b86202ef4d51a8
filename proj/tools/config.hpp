#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tlp::cli {

// Flat sectioned key-value config. '#' starts a comment, keys are unique per
// section, section and key order are preserved for the manifest echo.
struct IniSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;

  const std::string* get(const std::string& key) const;
};

struct Ini {
  std::vector<IniSection> sections;

  const IniSection* find(const std::string& name) const;
  bool has(const std::string& section, const std::string& key) const;

  // required lookups throw config_error naming section and key
  const std::string& need(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
};

Ini parse_ini(std::istream& in, const std::string& origin);

// strict scalar parsing; errors carry the offending text and location
double to_double(const std::string& v, const std::string& where);
int to_int(const std::string& v, const std::string& where);
std::uint64_t to_u64(const std::string& v, const std::string& where);
bool to_bool(const std::string& v, const std::string& where);

// comma-separated list, items trimmed, empties rejected
std::vector<std::string> to_list(const std::string& v, const std::string& where);

// "0..5" or "0,1,2,5"
std::vector<int> to_horizons(const std::string& v, const std::string& where);

// "0:0.1, 1:0.3" horizon->value pairs
std::map<int, double> to_irf_map(const std::string& v, const std::string& where);

// rejects sections and keys outside the documented schema
void validate_schema(const Ini& ini);

}  // namespace tlp::cli
