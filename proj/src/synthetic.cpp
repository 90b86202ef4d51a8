#include "taylorlp/synthetic.hpp"

#include <cmath>
#include <json.hpp>

#include "taylorlp/errors.hpp"
#include "taylorlp/rng.hpp"

namespace tlp::synth {

namespace {
// AR(1) persistence and marginal moments for the exogenous block
constexpr double kRho = 0.5;
constexpr double kGrowthMean = 3.03, kGrowthSd = 5.04;
constexpr double kInflMean = 5.67, kInflSd = 6.0;
constexpr double kReservesMean = 7.36, kReservesSd = 10.0;
constexpr double kForecastNoiseSd = 1.0;
constexpr double kCountryEffectSd = 1.0;
constexpr double kYearEffectSd = 0.5;
constexpr int kFirstYear = 2000;
constexpr int kWarmup = 8;

double innov_sd(double marginal_sd) { return marginal_sd * std::sqrt(1.0 - kRho * kRho); }

std::string country_name(int idx) {
  std::string s = std::to_string(idx + 1);
  while (s.size() < 3) s = "0" + s;
  return "C" + s;
}
}  // namespace

int DgpConfig::max_horizon() const {
  int h = 0;
  for (const auto& [k, v] : true_irf) h = std::max(h, k);
  if (regime_split) {
    for (const auto& [k, v] : regime_split->beta_low) h = std::max(h, k);
    for (const auto& [k, v] : regime_split->beta_high) h = std::max(h, k);
  }
  return h;
}

void DgpConfig::validate() const {
  if (n_countries < 2) throw config_error("dgp: n_countries must be >= 2");
  if (n_years < 8 + max_horizon())
    throw config_error("dgp: n_years must be >= 8 + max horizon (" +
                       std::to_string(8 + max_horizon()) + ")");
  if (true_irf.empty()) throw config_error("dgp: true_irf is empty");
  for (const auto& [h, v] : true_irf)
    if (h < 0) throw config_error("dgp: negative horizon in true_irf");
  if (!(rule_noise_sd >= 0.0)) throw config_error("dgp: rule_noise_sd must be >= 0");
  if (!(outcome_noise_sd >= 0.0)) throw config_error("dgp: outcome_noise_sd must be >= 0");
  if (!(missing_rate >= 0.0 && missing_rate < 0.5))
    throw config_error("dgp: missing_rate must lie in [0, 0.5)");
  const double a6 = taylor_alphas[6];
  if (!(a6 > -2.0 && a6 < 0.0))
    throw config_error("dgp: taylor_alphas[6] must lie in (-2, 0) so the rate is stationary");
  if (regime_split) {
    if (regime_split->beta_low.empty() || regime_split->beta_high.empty())
      throw config_error("dgp: regime_split paths must be non-empty");
    for (const auto& m : {regime_split->beta_low, regime_split->beta_high})
      for (const auto& [h, v] : m)
        if (h < 0) throw config_error("dgp: negative horizon in regime_split");
    if (!(regime_split->state_gap > 0.0))
      throw config_error("dgp: regime_split state_gap must be > 0");
  }
}

shocks::ShockSeries GroundTruth::shock_series() const {
  shocks::ShockSeries s;
  s.interpretation = "ground_truth_rule_innovation";
  for (const auto& [c, obs] : shocks) {
    shocks::CountryShocks cs;
    cs.country = c;
    double sd = 0.0;
    for (const auto& o : obs) {
      cs.obs.push_back({o.year, o.raw, o.standardized});
      if (o.standardized != 0.0) sd = o.raw / o.standardized;
    }
    cs.sd = sd;
    s.countries.push_back(std::move(cs));
  }
  return s;
}

std::string GroundTruth::to_json(const DgpConfig& cfg) const {
  nlohmann::ordered_json j;
  j["config"]["n_countries"] = cfg.n_countries;
  j["config"]["n_years"] = cfg.n_years;
  j["config"]["taylor_alphas"] = cfg.taylor_alphas;
  j["config"]["true_irf"] = nlohmann::ordered_json::object();
  for (const auto& [h, v] : cfg.true_irf) j["config"]["true_irf"][std::to_string(h)] = v;
  j["config"]["rule_noise_sd"] = cfg.rule_noise_sd;
  j["config"]["outcome_noise_sd"] = cfg.outcome_noise_sd;
  j["config"]["missing_rate"] = cfg.missing_rate;
  j["config"]["seed"] = cfg.seed;
  if (cfg.regime_split) {
    for (const auto& [h, v] : cfg.regime_split->beta_low)
      j["config"]["regime_split"]["beta_low"][std::to_string(h)] = v;
    for (const auto& [h, v] : cfg.regime_split->beta_high)
      j["config"]["regime_split"]["beta_high"][std::to_string(h)] = v;
    j["config"]["regime_split"]["state_gap"] = cfg.regime_split->state_gap;
  }
  j["country_effect"] = country_effect;
  j["year_effect"] = nlohmann::ordered_json::object();
  for (const auto& [y, v] : year_effect) j["year_effect"][std::to_string(y)] = v;
  j["state_value"] = state_value;
  if (!regime_of.empty()) j["regime_of"] = regime_of;
  j["shocks"] = nlohmann::ordered_json::object();
  for (const auto& [c, obs] : shocks) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& o : obs)
      arr.push_back({{"year", o.year}, {"raw", o.raw}, {"standardized", o.standardized}});
    j["shocks"][c] = std::move(arr);
  }
  return j.dump(2) + "\n";
}

shocks::TaylorSpec default_taylor_spec() {
  shocks::TaylorSpec s;
  s.interest_rate = "i";
  s.gdp_growth = "g";
  s.gdp_growth_forecast = "g_forecast";
  s.inflation = "pi";
  s.inflation_forecast = "pi_forecast";
  s.reserves_change = "f";
  return s;
}

std::pair<panel::PanelDataset, GroundTruth> generate_panel(const DgpConfig& cfg) {
  cfg.validate();
  const int hmax = cfg.max_horizon();
  const int burn = kWarmup + hmax + 2;
  const int t0 = kFirstYear;
  const int last = t0 + cfg.n_years - 1;
  const int gen_first = t0 - burn;
  // exogenous paths run one year past the sample so the rule sees its
  // one-step-ahead forecasts at the last in-sample year
  const int gen_last = last + 1;
  const int span = gen_last - gen_first + 1;

  const auto& a = cfg.taylor_alphas;
  const double rate_mean =
      -(a[0] + (a[1] + a[3]) * kGrowthMean + (a[2] + a[4]) * kInflMean + a[5] * kReservesMean) /
      a[6];

  Rng rng(cfg.seed);
  GroundTruth truth;

  // year effects first, one per in-sample year
  for (int y = t0; y <= last; ++y) truth.year_effect[y] = rng.normal(0.0, kYearEffectSd);

  std::vector<std::pair<std::string, int>> keys;
  const std::vector<std::string> var_names = {"i",  "g", "g_forecast", "pi",
                                              "pi_forecast", "f", "y_women", "y_men"};
  std::vector<std::vector<double>> cols(var_names.size());

  for (int ci = 0; ci < cfg.n_countries; ++ci) {
    const std::string cname = country_name(ci);
    const double lambda = rng.normal(0.0, kCountryEffectSd);
    truth.country_effect[cname] = lambda;

    const bool low_group = ci < (cfg.n_countries + 1) / 2;
    if (cfg.regime_split) {
      truth.regime_of[cname] = low_group ? 0 : 1;
      truth.state_value[cname] =
          low_group ? -cfg.regime_split->state_gap / 2.0 : cfg.regime_split->state_gap / 2.0;
    } else {
      truth.state_value[cname] = 0.0;
    }

    // pass 1: exogenous block and rule innovations, year-major, fixed order
    std::vector<double> g(span), gf(span), pi(span), pif(span), f(span), eps(span);
    double gp = kGrowthMean, pip = kInflMean, fp = kReservesMean;
    for (int k = 0; k < span; ++k) {
      const double eg = rng.normal(0.0, innov_sd(kGrowthSd));
      const double epi = rng.normal(0.0, innov_sd(kInflSd));
      const double ef = rng.normal(0.0, innov_sd(kReservesSd));
      const double ngf = rng.normal(0.0, kForecastNoiseSd);
      const double npif = rng.normal(0.0, kForecastNoiseSd);
      eps[k] = rng.normal(0.0, cfg.rule_noise_sd);
      g[k] = kGrowthMean + kRho * (gp - kGrowthMean) + eg;
      pi[k] = kInflMean + kRho * (pip - kInflMean) + epi;
      f[k] = kReservesMean + kRho * (fp - kReservesMean) + ef;
      gf[k] = g[k] + ngf;
      pif[k] = pi[k] + npif;
      gp = g[k];
      pip = pi[k];
      fp = f[k];
    }

    // rate recursion; k indexes gen_first + k
    std::vector<double> rate(span);
    rate[0] = rate_mean;
    for (int k = 1; k + 1 < span; ++k) {
      const double d = a[0] + a[1] * gf[k + 1] + a[2] * pif[k + 1] + a[3] * g[k - 1] +
                       a[4] * pi[k - 1] + a[5] * f[k - 1] + a[6] * rate[k - 1] + eps[k];
      rate[k] = rate[k - 1] + d;
    }
    // the extra forecast-target year carries no rate observation
    rate[span - 1] = panel::missing();

    // standardize by the in-sample n-1 sd; burn-in draws get the same scale
    const int is_begin = t0 - gen_first;
    const int is_count = cfg.n_years;
    double mean = 0.0;
    for (int k = 0; k < is_count; ++k) mean += eps[is_begin + k];
    mean /= is_count;
    double ss = 0.0;
    for (int k = 0; k < is_count; ++k) {
      const double d = eps[is_begin + k] - mean;
      ss += d * d;
    }
    const double eps_sd = std::sqrt(ss / (is_count - 1));
    std::vector<double> eps_std(span, 0.0);
    if (eps_sd > 0.0)
      for (int k = 0; k < span; ++k) eps_std[k] = eps[k] / eps_sd;

    const std::map<int, double>* resp = &cfg.true_irf;
    if (cfg.regime_split)
      resp = low_group ? &cfg.regime_split->beta_low : &cfg.regime_split->beta_high;

    // pass 2: outcome noise, then assemble in-sample rows
    auto& sh = truth.shocks[cname];
    for (int y = t0; y <= last; ++y) {
      const int k = y - gen_first;
      const double vw = rng.normal(0.0, cfg.outcome_noise_sd);
      const double vm = rng.normal(0.0, cfg.outcome_noise_sd);
      double shock_part = 0.0;
      for (const auto& [h, b] : *resp) shock_part += b * eps_std[k - 1 - h];
      const double theta = truth.year_effect[y];
      const double yw = lambda + theta + shock_part + vw;
      const double ym = 0.5 * lambda + theta + vm;

      keys.emplace_back(cname, y);
      cols[0].push_back(rate[k]);
      cols[1].push_back(g[k]);
      cols[2].push_back(gf[k]);
      cols[3].push_back(pi[k]);
      cols[4].push_back(pif[k]);
      cols[5].push_back(f[k]);
      cols[6].push_back(yw);
      cols[7].push_back(ym);
      sh.push_back({y, eps[k], eps_std[k]});
    }
  }

  // thinning pass: row-major over in-sample rows, registry column order
  if (cfg.missing_rate > 0.0) {
    for (std::size_t r = 0; r < keys.size(); ++r)
      for (auto& col : cols)
        if (rng.bernoulli(cfg.missing_rate)) col[r] = panel::missing();
  }

  std::vector<panel::Variable> vars;
  for (const auto& n : var_names) vars.push_back({n, ""});
  panel::PanelDataset p(std::move(keys), std::move(vars), std::move(cols));
  return {std::move(p), std::move(truth)};
}

}  // namespace tlp::synth
