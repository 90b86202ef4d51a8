#pragma once

#include <string>
#include <vector>

#include "taylorlp/panel.hpp"
#include "taylorlp/shocks.hpp"

namespace tlp::test {

// ShockSeries straight from a panel column (already-standardized values).
inline shocks::ShockSeries series_from_column(const panel::PanelDataset& p,
                                              const std::string& var) {
  shocks::ShockSeries s;
  s.interpretation = "test_column";
  const auto& col = p.column(var);
  for (const auto& g : p.groups()) {
    shocks::CountryShocks cs;
    cs.country = g.id;
    cs.sd = 1.0;
    for (int i = g.begin; i < g.end; ++i)
      if (!panel::is_missing(col[i])) cs.obs.push_back({p.year_of(i), col[i], col[i]});
    if (!cs.obs.empty()) s.countries.push_back(std::move(cs));
  }
  return s;
}

// Cheap deterministic panel builder: one call per column-major value list.
struct PanelSpec {
  std::vector<std::pair<std::string, int>> keys;
  std::vector<panel::Variable> vars;
  std::vector<std::vector<double>> cols;

  PanelSpec& row(const std::string& c, int y) {
    keys.emplace_back(c, y);
    return *this;
  }
  PanelSpec& col(const std::string& name, std::vector<double> v) {
    vars.push_back({name, ""});
    cols.push_back(std::move(v));
    return *this;
  }
  panel::PanelDataset build() { return panel::PanelDataset(keys, vars, cols); }
};

}  // namespace tlp::test
