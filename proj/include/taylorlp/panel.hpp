#pragma once

#include <cmath>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tlp::panel {

inline bool is_missing(double x) { return std::isnan(x); }
double missing();

enum class Region { EDA, EDE, LAC, SSA };
const char* region_code(Region r);
Region parse_region(const std::string& code);

struct Variable {
  std::string name;
  std::string unit;  // free text, empty when unknown
};

enum class ParseKind { real, skip };

// Optional per-column parse overrides for load_csv. Columns not listed are
// parsed as reals; skip drops the column entirely.
using CsvSchema = std::map<std::string, ParseKind>;

// Country-year panel, column oriented. Rows are always sorted by
// (country, year), the (country, year) key is unique, and every variable
// column has exactly one slot per row (NaN = missing).
class PanelDataset {
 public:
  struct CountryGroup {
    std::string id;
    int begin = 0;  // half-open row range [begin, end)
    int end = 0;
  };

  PanelDataset() = default;

  // Programmatic construction: rows as (country, year) keys plus columns.
  // Sorts rows, checks key uniqueness.
  PanelDataset(std::vector<std::pair<std::string, int>> keys,
               std::vector<Variable> variables,
               std::vector<std::vector<double>> columns);

  static PanelDataset load_csv(std::istream& in, const CsvSchema* schema = nullptr);
  void serialize(std::ostream& out) const;
  std::string serialize() const;

  int n_rows() const { return static_cast<int>(years_.size()); }
  int n_countries() const { return static_cast<int>(groups_.size()); }
  const std::vector<CountryGroup>& groups() const { return groups_; }
  const std::string& country_of(int row) const { return groups_[group_index_[row]].id; }
  int group_of(int row) const { return group_index_[row]; }
  int year_of(int row) const { return years_[row]; }
  int find_row(const std::string& country, int year) const;  // -1 when absent

  const std::vector<Variable>& variables() const { return variables_; }
  bool has_variable(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;

  PanelDataset with_column(const std::string& name, std::vector<double> values,
                           const std::string& unit = "") const;
  PanelDataset drop_column(const std::string& name) const;

  // Calendar-aligned transforms. A gap year yields missing, never a
  // positional shift, and nothing crosses a country boundary. Each returns a
  // copy with the derived column appended.
  PanelDataset lag(const std::string& var, int k = 1) const;
  PanelDataset lead(const std::string& var, int h = 1) const;
  PanelDataset diff(const std::string& var) const;

  // Aligned series without materializing a new dataset.
  std::vector<double> lag_series(const std::string& var, int k = 1) const;
  std::vector<double> lead_series(const std::string& var, int h = 1) const;
  std::vector<double> diff_series(const std::string& var) const;

  // out = women - men, missing when either side is.
  PanelDataset gender_gap(const std::string& women, const std::string& men,
                          const std::string& out) const;

  // Keep countries with at least min_years non-missing values of var.
  PanelDataset filter_min_years(const std::string& var, int min_years = 5) const;

  void set_regions(std::map<std::string, Region> regions) { regions_ = std::move(regions); }
  const std::map<std::string, Region>& regions() const { return regions_; }
  PanelDataset subset_region(Region r) const;

  static std::string lag_name(const std::string& var, int k);
  static std::string lead_name(const std::string& var, int h);
  static std::string diff_name(const std::string& var);

 private:
  void rebuild_index();
  int column_index(const std::string& name) const;  // throws when unknown
  PanelDataset subset_rows(const std::vector<int>& rows) const;

  std::vector<int> years_;
  std::vector<int> group_index_;  // row -> groups_ position
  std::vector<CountryGroup> groups_;
  std::vector<Variable> variables_;
  std::vector<std::vector<double>> columns_;  // one per variable, n_rows each
  std::map<std::string, int> var_index_;
  std::map<std::string, Region> regions_;
};

// Sidecar mapping "country,region" with codes EDA/EDE/LAC/SSA.
std::map<std::string, Region> load_regions(std::istream& in);

}  // namespace tlp::panel
