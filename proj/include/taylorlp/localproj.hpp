#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "taylorlp/panel.hpp"
#include "taylorlp/regress.hpp"
#include "taylorlp/shocks.hpp"

namespace tlp::lp {

using shocks::Exec;

struct FeFlags {
  bool country = true;
  bool time = true;
};

// One impulse-response estimation problem. The shock always enters once,
// lagged one year; controls enter lagged one year as well. Inference is
// clustered by country.
struct LPSpec {
  std::string outcome;
  std::vector<int> horizons = {0, 1, 2, 3, 4, 5};
  std::vector<std::string> controls;
  bool include_lagged_outcome = true;
  FeFlags fe;
  std::string cluster_by = "country";
  double ci_level = 0.90;

  void validate() const;
};

struct HorizonEstimate {
  int horizon = 0;
  double beta = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_obs = 0;
  int n_countries = 0;
};

struct ImpulseResponse {
  std::string label;
  std::vector<int> requested_horizons;
  std::vector<HorizonEstimate> points;  // horizons that could be estimated
  std::vector<std::pair<int, std::string>> absent;  // horizon, reason

  const HorizonEstimate* at(int horizon) const;
};

ImpulseResponse estimate_lp(const panel::PanelDataset& p, const shocks::ShockSeries& shock,
                            const LPSpec& spec, Exec exec = Exec::Parallel,
                            std::map<int, regress::RegressionFit>* keep_fits = nullptr);

// Logistic weight G(z) = exp(-eta z) / (1 + exp(-eta z)), computed on the
// numerically safe branch. Decreasing in z: deeply negative states get
// weight ~1, high states ~0, G(0) = 1/2.
double transition_weight(double z, double eta);

// Cross-country standardization (mean 0, n-1 sd 1) of a country-level state.
std::map<std::string, double> normalize_state(const std::map<std::string, double>& x);

enum class RegimeMode { smooth_state, sign_dummy };

struct TransitionConfig {
  RegimeMode mode = RegimeMode::smooth_state;
  double eta = 1.5;
  // country -> raw state level (e.g. average growth); smooth_state only
  std::map<std::string, double> state_values;
};

// Two paths from one regression per horizon. smooth_state splits the lagged
// shock into G- and (1-G)-weighted parts (labels low_state / high_state);
// sign_dummy splits on the sign of the lagged shock (tightening / easing,
// zero goes to the easing side). A regime with no weighted observations at
// some horizon is reported absent there, the other is still estimated.
struct RegimePair {
  ImpulseResponse first;   // low_state or tightening
  ImpulseResponse second;  // high_state or easing
};

RegimePair estimate_lp_regimed(const panel::PanelDataset& p, const shocks::ShockSeries& shock,
                               const LPSpec& spec, const TransitionConfig& t,
                               Exec exec = Exec::Parallel,
                               std::map<int, regress::RegressionFit>* keep_fits = nullptr);

struct IrfRow {
  std::string label;
  HorizonEstimate e;
};

struct IrfTable {
  std::vector<IrfRow> rows;  // label-major, horizons ascending
};

// Long-format merge; inputs must share the requested horizon range and carry
// distinct labels. Absent horizons are simply omitted.
IrfTable build_irf_table(const std::vector<ImpulseResponse>& irfs);

void write_irf_csv(std::ostream& out, const IrfTable& t);
IrfTable read_irf_csv(std::istream& in);
std::string irf_table_json(const IrfTable& t);

}  // namespace tlp::lp
