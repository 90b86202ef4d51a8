#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taylorlp/panel.hpp"
#include "taylorlp/shocks.hpp"

namespace tlp::synth {

// Sharp two-group regime plant: the first half of the countries responds
// with beta_low, the rest with beta_high, and their planted state levels sit
// state_gap apart.
struct RegimeSplit {
  std::map<int, double> beta_low;
  std::map<int, double> beta_high;
  double state_gap = 4.0;
};

struct DgpConfig {
  int n_countries = 8;
  int n_years = 100;
  // a0 const, a1 forecast growth, a2 forecast inflation, a3 lagged growth,
  // a4 lagged inflation, a5 lagged reserves change, a6 lagged rate
  std::array<double, 7> taylor_alphas = {1.352, -0.0344, 0.125, 0.0253,
                                         0.0204, -0.00730, -0.185};
  std::map<int, double> true_irf = {{0, 0.1}, {1, 0.3}, {2, 0.5},
                                    {3, 0.4}, {4, 0.2}, {5, 0.0}};
  double rule_noise_sd = 0.01;
  double outcome_noise_sd = 0.5;
  double missing_rate = 0.0;
  std::optional<RegimeSplit> regime_split;
  std::uint64_t seed = 1;

  void validate() const;
  int max_horizon() const;
};

struct ShockTruth {
  int year;
  double raw;
  double standardized;
};

// Exactly what was planted: drawn rule innovations (standardized by each
// country's in-sample n-1 sd), effects, and the regime assignment.
struct GroundTruth {
  std::map<std::string, std::vector<ShockTruth>> shocks;  // in-sample years
  std::map<std::string, double> country_effect;
  std::map<int, double> year_effect;
  std::map<std::string, double> state_value;
  std::map<std::string, int> regime_of;  // 0 low, 1 high; only under regime_split

  shocks::ShockSeries shock_series() const;
  std::string to_json(const DgpConfig& cfg) const;
};

// Panel columns emitted: i, g, g_forecast, pi, pi_forecast, f, y_women,
// y_men. Women carry the planted shock response, men none, so the gap
// inherits the women's path. Same seed, byte-identical output.
std::pair<panel::PanelDataset, GroundTruth> generate_panel(const DgpConfig& cfg);

// Column bindings matching generate_panel's output.
shocks::TaylorSpec default_taylor_spec();

}  // namespace tlp::synth
