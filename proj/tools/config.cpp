#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <set>

#include "taylorlp/errors.hpp"

namespace tlp::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::string* IniSection::get(const std::string& key) const {
  for (const auto& [k, v] : kv)
    if (k == key) return &v;
  return nullptr;
}

const IniSection* Ini::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

bool Ini::has(const std::string& section, const std::string& key) const {
  const IniSection* s = find(section);
  return s && s->get(key);
}

const std::string& Ini::need(const std::string& section, const std::string& key) const {
  const IniSection* s = find(section);
  if (!s) throw config_error("config: missing section [" + section + "]");
  const std::string* v = s->get(key);
  if (!v) throw config_error("config: [" + section + "] missing key '" + key + "'");
  return *v;
}

std::string Ini::get_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  const IniSection* s = find(section);
  if (!s) return fallback;
  const std::string* v = s->get(key);
  return v ? *v : fallback;
}

Ini parse_ini(std::istream& in, const std::string& origin) {
  Ini ini;
  std::string line;
  int lineno = 0;
  IniSection* cur = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error(where + ": unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw config_error(where + ": empty section name");
      if (ini.find(name)) throw config_error(where + ": duplicate section [" + name + "]");
      ini.sections.push_back({name, {}});
      cur = &ini.sections.back();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(where + ": expected 'key = value', got '" + line + "'");
    if (!cur) throw config_error(where + ": key outside any section");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error(where + ": empty key");
    if (cur->get(key))
      throw config_error(where + ": duplicate key '" + key + "' in [" + cur->name + "]");
    cur->kv.emplace_back(std::move(key), std::move(val));
  }
  return ini;
}

double to_double(const std::string& v, const std::string& where) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw config_error(where + ": not a number: '" + v + "'");
  return out;
}

int to_int(const std::string& v, const std::string& where) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw config_error(where + ": not an integer: '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& v, const std::string& where) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw config_error(where + ": not an unsigned integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const std::string& where) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw config_error(where + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v, const std::string& where) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    std::string item =
        trim(comma == std::string::npos ? v.substr(pos) : v.substr(pos, comma - pos));
    if (item.empty()) throw config_error(where + ": empty list item in '" + v + "'");
    out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw config_error(where + ": empty list");
  return out;
}

std::vector<int> to_horizons(const std::string& v, const std::string& where) {
  auto dots = v.find("..");
  if (dots != std::string::npos) {
    int lo = to_int(trim(v.substr(0, dots)), where);
    int hi = to_int(trim(v.substr(dots + 2)), where);
    if (hi < lo) throw config_error(where + ": horizon range '" + v + "' is reversed");
    std::vector<int> out;
    for (int h = lo; h <= hi; ++h) out.push_back(h);
    return out;
  }
  std::vector<int> out;
  for (const auto& item : to_list(v, where)) out.push_back(to_int(item, where));
  return out;
}

std::map<int, double> to_irf_map(const std::string& v, const std::string& where) {
  std::map<int, double> out;
  for (const auto& item : to_list(v, where)) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw config_error(where + ": expected horizon:value, got '" + item + "'");
    int h = to_int(trim(item.substr(0, colon)), where);
    double b = to_double(trim(item.substr(colon + 1)), where);
    if (!out.emplace(h, b).second)
      throw config_error(where + ": duplicate horizon " + std::to_string(h));
  }
  return out;
}

void validate_schema(const Ini& ini) {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"input", {"panel", "regions"}},
      {"taylor",
       {"interest_rate", "gdp_growth", "gdp_growth_forecast", "inflation",
        "inflation_forecast", "reserves_change", "min_obs", "min_years", "kind"}},
      {"lp", {"horizons", "ci_level", "lagged_outcome", "growth_control", "labor_conditions"}},
      {"analysis", {"run"}},
      {"regimed", {"eta", "state", "outcomes", "allow_all_outcomes"}},
      {"signsplit", {"outcomes", "allow_all_outcomes"}},
      {"regions", {"outcomes", "allow_all_outcomes"}},
      {"dgp",
       {"n_countries", "n_years", "rule_noise_sd", "outcome_noise_sd", "missing_rate", "seed",
        "true_irf", "taylor_alphas", "regime_beta_low", "regime_beta_high", "state_gap"}},
      {"plot", {"input", "title"}},
  };
  for (const auto& s : ini.sections) {
    if (s.name.rfind("outcome.", 0) == 0) {
      const std::string tag = s.name.substr(8);
      if (tag.empty() ||
          tag.find_first_not_of(
              "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
              std::string::npos)
        throw config_error("config: outcome name '" + tag +
                           "' must be non-empty [A-Za-z0-9_] (it names output files)");
      for (const auto& [k, v] : s.kv)
        if (k != "women" && k != "men")
          throw config_error("config: [" + s.name + "] unknown key '" + k + "'");
      continue;
    }
    auto it = schema.find(s.name);
    if (it == schema.end()) throw config_error("config: unknown section [" + s.name + "]");
    for (const auto& [k, v] : s.kv)
      if (!it->second.count(k))
        throw config_error("config: [" + s.name + "] unknown key '" + k + "'");
  }
}

}  // namespace tlp::cli
