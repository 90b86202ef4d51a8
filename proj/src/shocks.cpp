#include "taylorlp/shocks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "taylorlp/errors.hpp"

namespace tlp::shocks {

void TaylorSpec::validate(const panel::PanelDataset& p) const {
  const std::vector<std::pair<const char*, const std::string*>> cols = {
      {"interest_rate", &interest_rate},
      {"gdp_growth", &gdp_growth},
      {"gdp_growth_forecast", &gdp_growth_forecast},
      {"inflation", &inflation},
      {"inflation_forecast", &inflation_forecast},
      {"reserves_change", &reserves_change},
  };
  for (const auto& [role, name] : cols) {
    if (name->empty()) throw config_error(std::string("taylor spec: ") + role + " not set");
    if (!p.has_variable(*name))
      throw config_error(std::string("taylor spec: ") + role + " column '" + *name +
                         "' not in panel");
  }
  for (std::size_t a = 0; a < cols.size(); ++a)
    for (std::size_t b = a + 1; b < cols.size(); ++b)
      if (*cols[a].second == *cols[b].second)
        throw config_error(std::string("taylor spec: ") + cols[a].first + " and " +
                           cols[b].first + " bind the same column '" + *cols[a].second + "'");
  if (min_obs < 8)
    throw config_error("taylor spec: min_obs must be at least 8, got " +
                       std::to_string(min_obs));
}

namespace {

struct RuleColumns {
  std::vector<double> dy;  // change in the rate
  std::vector<std::vector<double>> x;
  std::vector<std::string> labels;
};

RuleColumns build_rule_columns(const panel::PanelDataset& p, const TaylorSpec& spec,
                               ShockKind kind) {
  RuleColumns rc;
  rc.dy = p.diff_series(spec.interest_rate);
  if (kind == ShockKind::baseline) {
    rc.x.push_back(p.lead_series(spec.gdp_growth_forecast, 1));
    rc.x.push_back(p.lead_series(spec.inflation_forecast, 1));
    rc.labels.push_back(spec.gdp_growth_forecast + "_lead1");
    rc.labels.push_back(spec.inflation_forecast + "_lead1");
  } else {
    const auto& g = p.column(spec.gdp_growth);
    const auto& gf = p.column(spec.gdp_growth_forecast);
    const auto& pi = p.column(spec.inflation);
    const auto& pif = p.column(spec.inflation_forecast);
    std::vector<double> ge(p.n_rows()), pie(p.n_rows());
    for (int i = 0; i < p.n_rows(); ++i) {
      ge[i] = g[i] - gf[i];
      pie[i] = pi[i] - pif[i];
    }
    auto tmp = p.with_column("__fe_g", std::move(ge)).with_column("__fe_pi", std::move(pie));
    rc.x.push_back(tmp.lead_series("__fe_g", 1));
    rc.x.push_back(tmp.lead_series("__fe_pi", 1));
    rc.labels.push_back(spec.gdp_growth + "_surprise_lead1");
    rc.labels.push_back(spec.inflation + "_surprise_lead1");
  }
  rc.x.push_back(p.lag_series(spec.gdp_growth, 1));
  rc.x.push_back(p.lag_series(spec.inflation, 1));
  rc.x.push_back(p.lag_series(spec.reserves_change, 1));
  rc.x.push_back(p.lag_series(spec.interest_rate, 1));
  rc.labels.push_back(spec.gdp_growth + "_lag1");
  rc.labels.push_back(spec.inflation + "_lag1");
  rc.labels.push_back(spec.reserves_change + "_lag1");
  rc.labels.push_back(spec.interest_rate + "_lag1");
  return rc;
}

struct CountryOutcome {
  bool fitted = false;
  regress::RegressionFit fit;
  std::string skip_reason;
};

CountryOutcome fit_country(const panel::PanelDataset& p, const RuleColumns& rc,
                           const panel::PanelDataset::CountryGroup& g, int min_obs) {
  CountryOutcome out;
  std::vector<int> rows;
  for (int i = g.begin; i < g.end; ++i) {
    if (panel::is_missing(rc.dy[i])) continue;
    bool ok = true;
    for (const auto& c : rc.x)
      if (panel::is_missing(c[i])) {
        ok = false;
        break;
      }
    if (ok) rows.push_back(i);
  }
  if (static_cast<int>(rows.size()) < min_obs) {
    out.skip_reason = "insufficient observations (" + std::to_string(rows.size()) + " < " +
                      std::to_string(min_obs) + ")";
    return out;
  }
  const int n = static_cast<int>(rows.size());
  const int px = static_cast<int>(rc.x.size());
  regress::DesignMatrix d;
  d.X.resize(n, px);
  d.column_labels = rc.labels;
  Eigen::VectorXd y(n);
  d.row_keys.reserve(n);
  for (int i = 0; i < n; ++i) {
    y(i) = rc.dy[rows[i]];
    for (int j = 0; j < px; ++j) d.X(i, j) = rc.x[j][rows[i]];
    d.row_keys.push_back({g.id, p.year_of(rows[i])});
  }
  try {
    out.fit = regress::ols(d, y, true);
    out.fitted = true;
  } catch (const Error& e) {
    out.skip_reason = e.what();
  }
  return out;
}

}  // namespace

TaylorFits estimate_taylor(const panel::PanelDataset& p, const TaylorSpec& spec,
                           ShockKind kind, Exec exec) {
  spec.validate(p);
  const RuleColumns rc = build_rule_columns(p, spec, kind);
  const auto& groups = p.groups();
  const int G = static_cast<int>(groups.size());
  std::vector<CountryOutcome> results(G);

  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int gi = 0; gi < G; ++gi) results[gi] = fit_country(p, rc, groups[gi], spec.min_obs);

  TaylorFits out;
  out.kind = kind;
  for (int gi = 0; gi < G; ++gi) {
    if (results[gi].fitted)
      out.fits.push_back({groups[gi].id, std::move(results[gi].fit)});
    else
      out.skipped.push_back({groups[gi].id, results[gi].skip_reason});
  }
  return out;
}

std::vector<double> standardize_series(const std::vector<double>& raw) {
  const int n = static_cast<int>(raw.size());
  if (n < 2) throw estimation_error("standardize_series: need at least 2 values");
  double mean = 0.0;
  for (double v : raw) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : raw) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0.0)) throw estimation_error("standardize_series: zero variance");
  std::vector<double> out(raw.size());
  for (int i = 0; i < n; ++i) out[i] = raw[i] / sd;
  return out;
}

StandardizeResult extract_standardized_shocks(const TaylorFits& fits) {
  StandardizeResult out;
  out.series.interpretation = fits.kind == ShockKind::baseline
                                  ? "taylor_rule_residual"
                                  : "forecast_error_rule_residual";
  for (const auto& cf : fits.fits) {
    const auto& r = cf.fit.residuals;
    const int n = static_cast<int>(r.size());
    if (n < 2) {
      out.skipped.push_back({cf.country, "fewer than 2 residuals"});
      continue;
    }
    const double mean = r.mean();
    const double sd = std::sqrt((r.array() - mean).square().sum() / (n - 1));
    // relative floor: an exact rule fit leaves only rounding noise behind
    Eigen::VectorXd dep = cf.fit.fitted + cf.fit.residuals;
    const double dep_sd = std::sqrt((dep.array() - dep.mean()).square().sum() / (n - 1));
    if (!(sd > 1e-8 * std::max(dep_sd, 1e-300))) {
      out.skipped.push_back({cf.country, "zero residual variance (rule fits exactly)"});
      continue;
    }
    CountryShocks cs;
    cs.country = cf.country;
    cs.sd = sd;
    cs.obs.reserve(n);
    for (int i = 0; i < n; ++i)
      cs.obs.push_back({cf.fit.row_keys[i].year, r(i), r(i) / sd});
    std::sort(cs.obs.begin(), cs.obs.end(),
              [](const ShockObs& a, const ShockObs& b) { return a.year < b.year; });
    out.series.countries.push_back(std::move(cs));
  }
  return out;
}

ShockResult identify_shocks(const panel::PanelDataset& p, const TaylorSpec& spec,
                            ShockKind kind, Exec exec) {
  ShockResult out;
  out.fits = estimate_taylor(p, spec, kind, exec);
  auto std_res = extract_standardized_shocks(out.fits);
  out.series = std::move(std_res.series);
  out.skipped = out.fits.skipped;
  out.skipped.insert(out.skipped.end(), std_res.skipped.begin(), std_res.skipped.end());
  return out;
}

int ShockSeries::total_obs() const {
  int n = 0;
  for (const auto& c : countries) n += static_cast<int>(c.obs.size());
  return n;
}

std::vector<double> ShockSeries::aligned_to(const panel::PanelDataset& p) const {
  std::vector<double> out(p.n_rows(), panel::missing());
  for (const auto& c : countries) {
    for (const auto& o : c.obs) {
      int r = p.find_row(c.country, o.year);
      if (r >= 0) out[r] = o.standardized;
    }
  }
  return out;
}

namespace {
std::string format_g17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}
std::string format_g(double v, int prec) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, prec);
  return std::string(buf, res.ptr);
}
}  // namespace

void write_shock_csv(std::ostream& out, const ShockSeries& s) {
  out << "country,year,raw_residual,standardized_shock\n";
  for (const auto& c : s.countries)
    for (const auto& o : c.obs)
      out << c.country << ',' << o.year << ',' << format_g17(o.raw) << ','
          << format_g17(o.standardized) << '\n';
}

PooledTaylor pooled_taylor_fe(const panel::PanelDataset& p, const TaylorSpec& spec,
                              bool time_dummies) {
  spec.validate(p);
  RuleColumns rc = build_rule_columns(p, spec, ShockKind::baseline);
  auto work = p.with_column("__dy", rc.dy);
  std::vector<std::string> xnames;
  for (std::size_t j = 0; j < rc.x.size(); ++j) {
    std::string nm = "__x" + std::to_string(j);
    work = work.with_column(nm, rc.x[j]);
    xnames.push_back(nm);
  }
  regress::WithinOptions opt;
  opt.country_fe = true;
  opt.time_fe = time_dummies;
  regress::WithinDesign wd;
  PooledTaylor out;
  out.fit = regress::fit_within(work, "__dy", xnames, opt, &wd);
  out.clustered_cov = regress::cluster_robust_cov(out.fit, wd.clusters);
  out.time_dummies = time_dummies;
  out.n_countries = wd.n_countries;

  // display order: realization lags interleaved with forecasts, reserves, rate
  static const char* kLabels[] = {
      "Lagged GDP growth",          "Forecasted GDP growth",
      "Lagged inflation rate",      "Forecasted inflation rate",
      "Lagged changes in reserves", "Lagged nominal interest rate",
  };
  // rc.x order: gf_lead, pif_lead, g_lag, pi_lag, f_lag, i_lag
  static const int kSource[] = {2, 0, 3, 1, 4, 5};
  const double z10 = regress::normal_quantile(0.95);
  const double z5 = regress::normal_quantile(0.975);
  const double z1 = regress::normal_quantile(0.995);
  for (int r = 0; r < 6; ++r) {
    int j = kSource[r];
    CoefficientRow row;
    row.label = kLabels[r];
    row.coef = out.fit.coefficients(j);
    row.se = std::sqrt(out.clustered_cov(j, j));
    const double z = std::abs(row.coef / row.se);
    row.stars = z > z1 ? 3 : z > z5 ? 2 : z > z10 ? 1 : 0;
    out.table.push_back(row);
  }
  return out;
}

std::string format_rule_table(const std::vector<PooledTaylor>& fits) {
  std::ostringstream os;
  os << "Dependent variable: change in nominal interest rate\n";
  auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  const std::size_t label_w = 30, col_w = 16;
  std::string head = pad("", label_w);
  for (std::size_t c = 0; c < fits.size(); ++c)
    head += pad("(" + std::to_string(c + 1) + ")", col_w);
  os << head << '\n';
  for (int r = 0; r < 6; ++r) {
    std::string line1 = pad(fits[0].table[r].label, label_w);
    std::string line2 = pad("", label_w);
    for (const auto& f : fits) {
      const auto& row = f.table[r];
      line1 += pad(format_g(row.coef, 3) + std::string(row.stars, '*'), col_w);
      line2 += pad("(" + format_g(row.se, 3) + ")", col_w);
    }
    os << line1 << '\n' << line2 << '\n';
  }
  std::string td = pad("Time dummies", label_w);
  std::string obs = pad("Observations", label_w);
  std::string cty = pad("Countries", label_w);
  for (const auto& f : fits) {
    td += pad(f.time_dummies ? "Yes" : "No", col_w);
    obs += pad(std::to_string(f.fit.n_obs), col_w);
    cty += pad(std::to_string(f.n_countries), col_w);
  }
  os << td << '\n' << obs << '\n' << cty << '\n';
  return os.str();
}

}  // namespace tlp::shocks
