#include "taylorlp/panel.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "taylorlp/errors.hpp"

namespace tlp::panel {

double missing() { return std::numeric_limits<double>::quiet_NaN(); }

const char* region_code(Region r) {
  switch (r) {
    case Region::EDA: return "EDA";
    case Region::EDE: return "EDE";
    case Region::LAC: return "LAC";
    case Region::SSA: return "SSA";
  }
  return "?";
}

Region parse_region(const std::string& code) {
  if (code == "EDA") return Region::EDA;
  if (code == "EDE") return Region::EDE;
  if (code == "LAC") return Region::LAC;
  if (code == "SSA") return Region::SSA;
  throw data_error("unknown region code: " + code);
}

namespace {

// One CSV record, RFC 4180 quoting. Handles embedded commas and "" escapes;
// that is all the corpus needs.
std::vector<std::string> split_csv(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty())
        throw data_error("csv line " + std::to_string(lineno) + ": stray quote");
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw data_error("csv line " + std::to_string(lineno) + ": unterminated quote");
  out.push_back(std::move(field));
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q += c;
  }
  q += '"';
  return q;
}

bool is_missing_token(const std::string& s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan";
}

double parse_real(const std::string& s, int lineno, const std::string& col) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw data_error("csv line " + std::to_string(lineno) + ", column " + col +
                     ": cannot parse real value '" + s + "'");
  return v;
}

int parse_year(const std::string& s, int lineno) {
  int v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw data_error("csv line " + std::to_string(lineno) + ": cannot parse year '" + s + "'");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

PanelDataset::PanelDataset(std::vector<std::pair<std::string, int>> keys,
                           std::vector<Variable> variables,
                           std::vector<std::vector<double>> columns) {
  const int n = static_cast<int>(keys.size());
  if (columns.size() != variables.size())
    throw data_error("panel construction: column count does not match variable count");
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (static_cast<int>(columns[j].size()) != n)
      throw data_error("panel construction: column '" + variables[j].name +
                       "' has wrong length");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (keys[a].first != keys[b].first) return keys[a].first < keys[b].first;
    return keys[a].second < keys[b].second;
  });

  years_.resize(n);
  std::vector<std::string> countries(n);
  columns_.assign(variables.size(), std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    countries[i] = keys[order[i]].first;
    years_[i] = keys[order[i]].second;
    for (std::size_t j = 0; j < columns.size(); ++j) columns_[j][i] = columns[j][order[i]];
  }
  for (int i = 1; i < n; ++i)
    if (countries[i] == countries[i - 1] && years_[i] == years_[i - 1])
      throw data_error("duplicate (country, year) pair: (" + countries[i] + ", " +
                       std::to_string(years_[i]) + ")");

  variables_ = std::move(variables);
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    if (!var_index_.emplace(variables_[j].name, static_cast<int>(j)).second)
      throw data_error("duplicate variable name: " + variables_[j].name);
  }

  group_index_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0 || countries[i] != countries[i - 1])
      groups_.push_back({countries[i], i, i + 1});
    else
      groups_.back().end = i + 1;
    group_index_[i] = static_cast<int>(groups_.size()) - 1;
  }
}

void PanelDataset::rebuild_index() {
  var_index_.clear();
  for (std::size_t j = 0; j < variables_.size(); ++j)
    var_index_.emplace(variables_[j].name, static_cast<int>(j));
}

int PanelDataset::column_index(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) throw data_error("unknown variable: " + name);
  return it->second;
}

bool PanelDataset::has_variable(const std::string& name) const {
  return var_index_.count(name) > 0;
}

const std::vector<double>& PanelDataset::column(const std::string& name) const {
  return columns_[column_index(name)];
}

int PanelDataset::find_row(const std::string& country, int year) const {
  auto it = std::lower_bound(groups_.begin(), groups_.end(), country,
                             [](const CountryGroup& g, const std::string& c) { return g.id < c; });
  if (it == groups_.end() || it->id != country) return -1;
  auto yb = years_.begin() + it->begin;
  auto ye = years_.begin() + it->end;
  auto yi = std::lower_bound(yb, ye, year);
  if (yi == ye || *yi != year) return -1;
  return static_cast<int>(yi - years_.begin());
}

PanelDataset PanelDataset::with_column(const std::string& name, std::vector<double> values,
                                       const std::string& unit) const {
  if (var_index_.count(name))
    throw data_error("variable already exists: " + name);
  if (static_cast<int>(values.size()) != n_rows())
    throw data_error("with_column: wrong length for " + name);
  PanelDataset out = *this;
  out.variables_.push_back({name, unit});
  out.columns_.push_back(std::move(values));
  out.rebuild_index();
  return out;
}

PanelDataset PanelDataset::drop_column(const std::string& name) const {
  int j = column_index(name);
  PanelDataset out = *this;
  out.variables_.erase(out.variables_.begin() + j);
  out.columns_.erase(out.columns_.begin() + j);
  out.rebuild_index();
  return out;
}

std::vector<double> PanelDataset::lag_series(const std::string& var, int k) const {
  if (k < 1) throw data_error("lag order must be >= 1");
  const auto& col = columns_[column_index(var)];
  std::vector<double> out(n_rows(), missing());
  for (const auto& g : groups_) {
    for (int i = g.begin; i < g.end; ++i) {
      int want = years_[i] - k;
      auto yb = years_.begin() + g.begin;
      auto ye = years_.begin() + g.end;
      auto yi = std::lower_bound(yb, ye, want);
      if (yi != ye && *yi == want) out[i] = col[yi - years_.begin()];
    }
  }
  return out;
}

std::vector<double> PanelDataset::lead_series(const std::string& var, int h) const {
  if (h < 0) throw data_error("lead order must be >= 0");
  const auto& col = columns_[column_index(var)];
  if (h == 0) return col;
  std::vector<double> out(n_rows(), missing());
  for (const auto& g : groups_) {
    for (int i = g.begin; i < g.end; ++i) {
      int want = years_[i] + h;
      auto yb = years_.begin() + g.begin;
      auto ye = years_.begin() + g.end;
      auto yi = std::lower_bound(yb, ye, want);
      if (yi != ye && *yi == want) out[i] = col[yi - years_.begin()];
    }
  }
  return out;
}

std::vector<double> PanelDataset::diff_series(const std::string& var) const {
  const auto& col = columns_[column_index(var)];
  std::vector<double> prev = lag_series(var, 1);
  std::vector<double> out(n_rows(), missing());
  for (int i = 0; i < n_rows(); ++i) out[i] = col[i] - prev[i];
  return out;
}

std::string PanelDataset::lag_name(const std::string& var, int k) {
  return var + "_lag" + std::to_string(k);
}
std::string PanelDataset::lead_name(const std::string& var, int h) {
  return var + "_lead" + std::to_string(h);
}
std::string PanelDataset::diff_name(const std::string& var) { return var + "_diff"; }

PanelDataset PanelDataset::lag(const std::string& var, int k) const {
  return with_column(lag_name(var, k), lag_series(var, k));
}
PanelDataset PanelDataset::lead(const std::string& var, int h) const {
  return with_column(lead_name(var, h), lead_series(var, h));
}
PanelDataset PanelDataset::diff(const std::string& var) const {
  return with_column(diff_name(var), diff_series(var));
}

PanelDataset PanelDataset::gender_gap(const std::string& women, const std::string& men,
                                      const std::string& out) const {
  const auto& w = columns_[column_index(women)];
  const auto& m = columns_[column_index(men)];
  std::vector<double> gap(n_rows());
  for (int i = 0; i < n_rows(); ++i) gap[i] = w[i] - m[i];
  return with_column(out, std::move(gap));
}

PanelDataset PanelDataset::subset_rows(const std::vector<int>& rows) const {
  std::vector<std::pair<std::string, int>> keys;
  keys.reserve(rows.size());
  std::vector<std::vector<double>> cols(columns_.size());
  for (auto& c : cols) c.reserve(rows.size());
  for (int r : rows) {
    keys.emplace_back(country_of(r), years_[r]);
    for (std::size_t j = 0; j < columns_.size(); ++j) cols[j].push_back(columns_[j][r]);
  }
  PanelDataset out(std::move(keys), variables_, std::move(cols));
  out.regions_ = regions_;
  return out;
}

PanelDataset PanelDataset::filter_min_years(const std::string& var, int min_years) const {
  if (min_years < 1) throw data_error("filter_min_years: min_years must be >= 1");
  const auto& col = columns_[column_index(var)];
  std::vector<int> keep;
  for (const auto& g : groups_) {
    int count = 0;
    for (int i = g.begin; i < g.end; ++i)
      if (!is_missing(col[i])) ++count;
    if (count >= min_years)
      for (int i = g.begin; i < g.end; ++i) keep.push_back(i);
  }
  if (keep.empty())
    throw data_error("filter_min_years: no country has " + std::to_string(min_years) +
                     " observed years of " + var);
  return subset_rows(keep);
}

PanelDataset PanelDataset::subset_region(Region r) const {
  std::string missing_regions;
  std::vector<int> keep;
  for (const auto& g : groups_) {
    auto it = regions_.find(g.id);
    if (it == regions_.end()) {
      if (!missing_regions.empty()) missing_regions += ", ";
      missing_regions += g.id;
      continue;
    }
    if (it->second == r)
      for (int i = g.begin; i < g.end; ++i) keep.push_back(i);
  }
  if (!missing_regions.empty())
    throw data_error("countries without region assignment: " + missing_regions);
  if (keep.empty())
    throw data_error(std::string("region subset is empty: ") + region_code(r));
  return subset_rows(keep);
}

PanelDataset PanelDataset::load_csv(std::istream& in, const CsvSchema* schema) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line, 1);

  int country_col = -1, year_col = -1;
  std::vector<int> real_cols;
  std::vector<Variable> vars;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j];
    if (name == "country") {
      if (country_col >= 0) throw data_error("csv: duplicate country column");
      country_col = static_cast<int>(j);
      continue;
    }
    if (name == "year") {
      if (year_col >= 0) throw data_error("csv: duplicate year column");
      year_col = static_cast<int>(j);
      continue;
    }
    if (schema) {
      auto it = schema->find(name);
      if (it != schema->end() && it->second == ParseKind::skip) continue;
    }
    real_cols.push_back(static_cast<int>(j));
    vars.push_back({name, ""});
  }
  if (country_col < 0) throw data_error("csv: missing country column");
  if (year_col < 0) throw data_error("csv: missing year column");
  for (std::size_t a = 0; a < vars.size(); ++a)
    for (std::size_t b = a + 1; b < vars.size(); ++b)
      if (vars[a].name == vars[b].name)
        throw data_error("csv: duplicate column name: " + vars[a].name);

  std::vector<std::pair<std::string, int>> keys;
  std::vector<std::vector<double>> cols(vars.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line, lineno);
    if (fields.size() != header.size())
      throw data_error("csv line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    const std::string& country = fields[country_col];
    if (country.empty())
      throw data_error("csv line " + std::to_string(lineno) + ": empty country");
    keys.emplace_back(country, parse_year(fields[year_col], lineno));
    for (std::size_t j = 0; j < real_cols.size(); ++j) {
      const std::string& tok = fields[real_cols[j]];
      cols[j].push_back(is_missing_token(tok) ? missing()
                                              : parse_real(tok, lineno, vars[j].name));
    }
  }
  return PanelDataset(std::move(keys), std::move(vars), std::move(cols));
}

void PanelDataset::serialize(std::ostream& out) const {
  out << "country,year";
  for (const auto& v : variables_) out << ',' << csv_quote(v.name);
  out << '\n';
  for (int i = 0; i < n_rows(); ++i) {
    out << csv_quote(country_of(i)) << ',' << years_[i];
    for (const auto& col : columns_) {
      out << ',';
      if (!is_missing(col[i])) out << format_real(col[i]);
    }
    out << '\n';
  }
}

std::string PanelDataset::serialize() const {
  std::ostringstream ss;
  serialize(ss);
  return ss.str();
}

std::map<std::string, Region> load_regions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("regions: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line, 1);
  if (header.size() != 2 || header[0] != "country" || header[1] != "region")
    throw data_error("regions: header must be country,region");
  std::map<std::string, Region> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line, lineno);
    if (fields.size() != 2)
      throw data_error("regions line " + std::to_string(lineno) + ": expected 2 fields");
    if (!out.emplace(fields[0], parse_region(fields[1])).second)
      throw data_error("regions line " + std::to_string(lineno) + ": duplicate country " +
                       fields[0]);
  }
  return out;
}

}  // namespace tlp::panel
