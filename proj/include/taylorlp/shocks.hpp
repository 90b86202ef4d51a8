#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "taylorlp/panel.hpp"
#include "taylorlp/regress.hpp"

namespace tlp::shocks {

// Kernels take an execution policy; Serial is the reference the parallel
// path is tested against (results must be identical, not just close).
enum class Exec { Serial, Parallel };

struct TaylorSpec {
  std::string interest_rate;
  std::string gdp_growth;
  std::string gdp_growth_forecast;
  std::string inflation;
  std::string inflation_forecast;
  std::string reserves_change;
  int min_obs = 8;

  void validate(const panel::PanelDataset& p) const;
};

// baseline regresses the rate change on one-step-ahead forecasts plus lagged
// realizations; forecast_error swaps the forecast terms for one-step-ahead
// forecast errors (realization minus forecast).
enum class ShockKind { baseline, forecast_error };

struct SkipInfo {
  std::string country;
  std::string reason;
};

struct CountryFit {
  std::string country;
  regress::RegressionFit fit;
};

struct TaylorFits {
  std::vector<CountryFit> fits;  // panel country order
  std::vector<SkipInfo> skipped;
  ShockKind kind = ShockKind::baseline;
};

TaylorFits estimate_taylor(const panel::PanelDataset& p, const TaylorSpec& spec,
                           ShockKind kind = ShockKind::baseline,
                           Exec exec = Exec::Parallel);

struct ShockObs {
  int year;
  double raw;
  double standardized;
};

struct CountryShocks {
  std::string country;
  std::vector<ShockObs> obs;  // years ascending
  double sd = 0.0;            // n-1 sample sd of raw residuals
};

struct ShockSeries {
  std::vector<CountryShocks> countries;  // country order
  std::string interpretation;
  int total_obs() const;
  // standardized values aligned to the panel's rows, NaN where absent
  std::vector<double> aligned_to(const panel::PanelDataset& p) const;
};

struct StandardizeResult {
  ShockSeries series;
  std::vector<SkipInfo> skipped;
};

// Per-country scaling of rule residuals by the country's own n-1 sample sd.
// The residual mean is not re-subtracted. Countries whose rule fit is exact
// (no residual variance to scale by) are rejected with a diagnostic.
StandardizeResult extract_standardized_shocks(const TaylorFits& fits);

// Same scaling for a free-standing series; throws when n < 2 or sd == 0.
std::vector<double> standardize_series(const std::vector<double>& raw);

struct ShockResult {
  TaylorFits fits;
  ShockSeries series;
  std::vector<SkipInfo> skipped;  // rule-stage and scaling-stage skips combined
};

ShockResult identify_shocks(const panel::PanelDataset& p, const TaylorSpec& spec,
                            ShockKind kind = ShockKind::baseline,
                            Exec exec = Exec::Parallel);

void write_shock_csv(std::ostream& out, const ShockSeries& s);

struct CoefficientRow {
  std::string label;
  double coef = 0.0;
  double se = 0.0;   // clustered by country
  int stars = 0;     // 1/2/3 at the 10/5/1% levels, two-sided normal
};

struct PooledTaylor {
  regress::RegressionFit fit;
  Eigen::MatrixXd clustered_cov;
  std::vector<CoefficientRow> table;  // fixed display order
  bool time_dummies = false;
  int n_countries = 0;
};

// One pooled rule with country fixed effects (optionally year dummies)
// instead of country-by-country fits; for diagnostics, not identification.
PooledTaylor pooled_taylor_fe(const panel::PanelDataset& p, const TaylorSpec& spec,
                              bool time_dummies);

std::string format_rule_table(const std::vector<PooledTaylor>& fits);

}  // namespace tlp::shocks
