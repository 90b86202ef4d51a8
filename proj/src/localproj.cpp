#include "taylorlp/localproj.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "taylorlp/errors.hpp"

namespace tlp::lp {

void LPSpec::validate() const {
  if (outcome.empty()) throw config_error("lp spec: outcome not set");
  if (horizons.empty()) throw config_error("lp spec: empty horizon list");
  std::set<int> seen;
  for (int h : horizons) {
    if (h < 0 || h > 10)
      throw config_error("lp spec: horizon " + std::to_string(h) + " outside [0, 10]");
    if (!seen.insert(h).second)
      throw config_error("lp spec: duplicate horizon " + std::to_string(h));
  }
  std::set<std::string> cseen;
  for (const auto& c : controls) {
    if (c == outcome) throw config_error("lp spec: control equals outcome: " + c);
    if (!cseen.insert(c).second) throw config_error("lp spec: duplicate control: " + c);
  }
  if (cluster_by != "country")
    throw config_error("lp spec: unsupported cluster_by '" + cluster_by + "'");
  if (!(ci_level > 0.0 && ci_level < 1.0))
    throw config_error("lp spec: ci_level must lie in (0,1)");
}

const HorizonEstimate* ImpulseResponse::at(int horizon) const {
  for (const auto& p : points)
    if (p.horizon == horizon) return &p;
  return nullptr;
}

namespace {

struct Workspace {
  panel::PanelDataset work;
  std::vector<std::string> xvars;
  std::vector<int> horizons;           // sorted
  std::vector<std::string> y_names;    // per horizon
};

Workspace prepare(const panel::PanelDataset& p, const shocks::ShockSeries& shock,
                  const LPSpec& spec) {
  Workspace ws;
  ws.work = p.with_column("__shock", shock.aligned_to(p)).lag("__shock", 1);
  ws.xvars = {"__shock_lag1"};
  if (spec.include_lagged_outcome) {
    ws.work = ws.work.lag(spec.outcome, 1);
    ws.xvars.push_back(panel::PanelDataset::lag_name(spec.outcome, 1));
  }
  for (const auto& c : spec.controls) {
    ws.work = ws.work.lag(c, 1);
    ws.xvars.push_back(panel::PanelDataset::lag_name(c, 1));
  }

  ws.horizons = spec.horizons;
  std::sort(ws.horizons.begin(), ws.horizons.end());
  for (int h : ws.horizons) {
    if (h == 0) {
      ws.y_names.push_back(spec.outcome);
    } else {
      std::string nm = "__lead" + std::to_string(h);
      ws.work = ws.work.with_column(nm, ws.work.lead_series(spec.outcome, h));
      ws.y_names.push_back(nm);
    }
  }
  return ws;
}

struct HorizonOutcome {
  bool ok = false;
  HorizonEstimate est;
  std::string reason;
  regress::RegressionFit fit;
};

HorizonOutcome run_horizon(const Workspace& ws, int hi, const LPSpec& spec,
                           const std::string& coef_col) {
  HorizonOutcome out;
  try {
    regress::WithinOptions opt{spec.fe.country, spec.fe.time};
    regress::WithinDesign wd = regress::within_twoway(ws.work, ws.y_names[hi], ws.xvars, opt);
    regress::RegressionFit fit =
        regress::ols(wd.design, wd.y, wd.use_intercept, wd.absorbed_groups);
    Eigen::MatrixXd cov = regress::cluster_robust_cov(fit, wd.clusters);
    auto it = std::find(fit.column_labels.begin(), fit.column_labels.end(), coef_col);
    int j = static_cast<int>(it - fit.column_labels.begin());
    regress::Interval ci = regress::confidence_interval(fit, cov, j, spec.ci_level);
    out.est = {ws.horizons[hi], fit.coefficients(j), std::sqrt(cov(j, j)),
               ci.lo,           ci.hi,               fit.n_obs,
               wd.n_countries};
    out.fit = std::move(fit);
    out.ok = true;
  } catch (const Error& e) {
    out.reason = e.what();
  }
  return out;
}

}  // namespace

ImpulseResponse estimate_lp(const panel::PanelDataset& p, const shocks::ShockSeries& shock,
                            const LPSpec& spec, Exec exec,
                            std::map<int, regress::RegressionFit>* keep_fits) {
  spec.validate();
  Workspace ws = prepare(p, shock, spec);
  const int nh = static_cast<int>(ws.horizons.size());
  std::vector<HorizonOutcome> results(nh);

  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int i = 0; i < nh; ++i) results[i] = run_horizon(ws, i, spec, "__shock_lag1");

  ImpulseResponse irf;
  irf.label = spec.outcome;
  irf.requested_horizons = ws.horizons;
  for (int i = 0; i < nh; ++i) {
    if (results[i].ok) {
      irf.points.push_back(results[i].est);
      if (keep_fits) (*keep_fits)[ws.horizons[i]] = std::move(results[i].fit);
    } else {
      irf.absent.emplace_back(ws.horizons[i], results[i].reason);
    }
  }
  if (irf.points.empty())
    throw estimation_error("estimate_lp: no horizon could be estimated (first failure: " +
                           irf.absent.front().second + ")");
  return irf;
}

double transition_weight(double z, double eta) {
  if (!std::isfinite(z)) throw estimation_error("transition_weight: non-finite z");
  if (!std::isfinite(eta) || !(eta > 0.0))
    throw estimation_error("transition_weight: eta must be positive and finite");
  const double a = eta * z;
  if (a >= 0.0) {
    const double u = std::exp(-a);
    return u / (1.0 + u);
  }
  const double u = std::exp(a);
  return 1.0 / (1.0 + u);
}

std::map<std::string, double> normalize_state(const std::map<std::string, double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw estimation_error("normalize_state: need at least 2 countries");
  double mean = 0.0;
  for (const auto& [c, v] : x) {
    if (!std::isfinite(v))
      throw estimation_error("normalize_state: non-finite state for " + c);
    mean += v;
  }
  mean /= n;
  double ss = 0.0;
  for (const auto& [c, v] : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0.0)) throw estimation_error("normalize_state: state has zero variance");
  std::map<std::string, double> z;
  for (const auto& [c, v] : x) z[c] = (v - mean) / sd;
  return z;
}

namespace {

struct RegimeOutcome {
  bool ok_a = false, ok_b = false;
  HorizonEstimate est_a, est_b;
  std::string reason_a, reason_b;
  regress::RegressionFit fit;
  bool have_fit = false;
};

RegimeOutcome run_regime_horizon(const Workspace& ws, int hi, const LPSpec& spec) {
  RegimeOutcome out;
  const int h = ws.horizons[hi];
  regress::WithinDesign wd;
  try {
    regress::WithinOptions opt{spec.fe.country, spec.fe.time};
    wd = regress::within_twoway(ws.work, ws.y_names[hi], ws.xvars, opt);
  } catch (const Error& e) {
    out.reason_a = out.reason_b = e.what();
    return out;
  }

  auto col_of = [&](const std::string& nm) {
    return static_cast<int>(std::find(wd.design.column_labels.begin(),
                                      wd.design.column_labels.end(), nm) -
                            wd.design.column_labels.begin());
  };
  const int ca = col_of("__regime_a");
  const int cb = col_of("__regime_b");
  const bool zero_a = (wd.design.X.col(ca).array() == 0.0).all();
  const bool zero_b = (wd.design.X.col(cb).array() == 0.0).all();
  if (zero_a && zero_b) {
    out.reason_a = out.reason_b =
        "no shock variation in sample at horizon " + std::to_string(h);
    return out;
  }

  regress::DesignMatrix d = wd.design;
  if (zero_a || zero_b) {
    const int drop = zero_a ? ca : cb;
    Eigen::MatrixXd X2(d.X.rows(), d.X.cols() - 1);
    std::vector<std::string> labels2;
    for (int j = 0, k = 0; j < d.X.cols(); ++j) {
      if (j == drop) continue;
      X2.col(k) = d.X.col(j);
      labels2.push_back(d.column_labels[j]);
      ++k;
    }
    d.X = std::move(X2);
    d.column_labels = std::move(labels2);
  }

  try {
    regress::RegressionFit fit = regress::ols(d, wd.y, wd.use_intercept, wd.absorbed_groups);
    Eigen::MatrixXd cov = regress::cluster_robust_cov(fit, wd.clusters);
    auto fill = [&](const std::string& nm, HorizonEstimate& est) {
      auto it = std::find(fit.column_labels.begin(), fit.column_labels.end(), nm);
      int j = static_cast<int>(it - fit.column_labels.begin());
      regress::Interval ci = regress::confidence_interval(fit, cov, j, spec.ci_level);
      est = {h,     fit.coefficients(j), std::sqrt(cov(j, j)), ci.lo, ci.hi,
             fit.n_obs, wd.n_countries};
    };
    if (zero_a)
      out.reason_a = "regime empty at horizon " + std::to_string(h) +
                     ": no positively-weighted shock observations";
    else {
      fill("__regime_a", out.est_a);
      out.ok_a = true;
    }
    if (zero_b)
      out.reason_b = "regime empty at horizon " + std::to_string(h) +
                     ": no complementary-weighted shock observations";
    else {
      fill("__regime_b", out.est_b);
      out.ok_b = true;
    }
    out.fit = std::move(fit);
    out.have_fit = true;
  } catch (const Error& e) {
    out.reason_a = out.reason_b = e.what();
    out.ok_a = out.ok_b = false;
  }
  return out;
}

}  // namespace

RegimePair estimate_lp_regimed(const panel::PanelDataset& p, const shocks::ShockSeries& shock,
                               const LPSpec& spec, const TransitionConfig& t, Exec exec,
                               std::map<int, regress::RegressionFit>* keep_fits) {
  spec.validate();

  panel::PanelDataset base = p.with_column("__shock", shock.aligned_to(p)).lag("__shock", 1);
  const auto& s = base.column("__shock_lag1");
  std::vector<double> a(base.n_rows(), panel::missing()), b(base.n_rows(), panel::missing());

  if (t.mode == RegimeMode::smooth_state) {
    std::map<std::string, double> z = normalize_state(t.state_values);
    std::set<std::string> offenders;
    for (int i = 0; i < base.n_rows(); ++i) {
      if (panel::is_missing(s[i])) continue;
      auto it = z.find(base.country_of(i));
      if (it == z.end()) {
        offenders.insert(base.country_of(i));
        continue;
      }
      const double g = transition_weight(it->second, t.eta);
      a[i] = s[i] * g;
      b[i] = s[i] * (1.0 - g);
    }
    if (!offenders.empty()) {
      std::string msg;
      for (const auto& c : offenders) msg += (msg.empty() ? "" : ", ") + c;
      throw estimation_error("estimate_lp_regimed: countries missing state value: " + msg);
    }
  } else {
    for (int i = 0; i < base.n_rows(); ++i) {
      if (panel::is_missing(s[i])) continue;
      if (s[i] > 0.0) {
        a[i] = s[i];
        b[i] = 0.0;
      } else {
        a[i] = 0.0;
        b[i] = s[i];
      }
    }
  }

  Workspace ws;
  ws.work = base.with_column("__regime_a", std::move(a)).with_column("__regime_b", std::move(b));
  ws.xvars = {"__regime_a", "__regime_b"};
  if (spec.include_lagged_outcome) {
    ws.work = ws.work.lag(spec.outcome, 1);
    ws.xvars.push_back(panel::PanelDataset::lag_name(spec.outcome, 1));
  }
  for (const auto& c : spec.controls) {
    ws.work = ws.work.lag(c, 1);
    ws.xvars.push_back(panel::PanelDataset::lag_name(c, 1));
  }
  ws.horizons = spec.horizons;
  std::sort(ws.horizons.begin(), ws.horizons.end());
  for (int h : ws.horizons) {
    if (h == 0) {
      ws.y_names.push_back(spec.outcome);
    } else {
      std::string nm = "__lead" + std::to_string(h);
      ws.work = ws.work.with_column(nm, ws.work.lead_series(spec.outcome, h));
      ws.y_names.push_back(nm);
    }
  }

  const int nh = static_cast<int>(ws.horizons.size());
  std::vector<RegimeOutcome> results(nh);
  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int i = 0; i < nh; ++i) results[i] = run_regime_horizon(ws, i, spec);

  RegimePair out;
  const bool smooth = t.mode == RegimeMode::smooth_state;
  out.first.label = smooth ? "low_state" : "tightening";
  out.second.label = smooth ? "high_state" : "easing";
  out.first.requested_horizons = ws.horizons;
  out.second.requested_horizons = ws.horizons;
  for (int i = 0; i < nh; ++i) {
    if (results[i].ok_a)
      out.first.points.push_back(results[i].est_a);
    else
      out.first.absent.emplace_back(ws.horizons[i], results[i].reason_a);
    if (results[i].ok_b)
      out.second.points.push_back(results[i].est_b);
    else
      out.second.absent.emplace_back(ws.horizons[i], results[i].reason_b);
    if (keep_fits && results[i].have_fit)
      (*keep_fits)[ws.horizons[i]] = std::move(results[i].fit);
  }
  if (out.first.points.empty() && out.second.points.empty())
    throw estimation_error("estimate_lp_regimed: no horizon could be estimated (first failure: " +
                           out.first.absent.front().second + ")");
  return out;
}

IrfTable build_irf_table(const std::vector<ImpulseResponse>& irfs) {
  if (irfs.empty()) throw estimation_error("build_irf_table: no impulse responses");
  std::set<std::string> labels;
  for (const auto& irf : irfs) {
    if (irf.label.empty()) throw estimation_error("build_irf_table: empty label");
    if (irf.label.find_first_of(",\"\n") != std::string::npos)
      throw estimation_error("build_irf_table: label not CSV-safe: " + irf.label);
    if (!labels.insert(irf.label).second)
      throw estimation_error("build_irf_table: duplicate label: " + irf.label);
    if (irf.requested_horizons != irfs.front().requested_horizons)
      throw estimation_error("build_irf_table: horizon ranges differ between '" +
                             irfs.front().label + "' and '" + irf.label + "'");
  }
  IrfTable t;
  for (const auto& irf : irfs)
    for (const auto& pt : irf.points) t.rows.push_back({irf.label, pt});
  return t;
}

namespace {
std::string g17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}
double parse_double_tok(const std::string& s, const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw data_error(std::string("irf csv: bad ") + what + " value '" + s + "'");
  return v;
}
int parse_int_tok(const std::string& s, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw data_error(std::string("irf csv: bad ") + what + " value '" + s + "'");
  return v;
}
}  // namespace

void write_irf_csv(std::ostream& out, const IrfTable& t) {
  out << "label,horizon,beta,se,ci_low,ci_high,n_obs,n_countries\n";
  for (const auto& r : t.rows)
    out << r.label << ',' << r.e.horizon << ',' << g17(r.e.beta) << ',' << g17(r.e.se) << ','
        << g17(r.e.ci_low) << ',' << g17(r.e.ci_high) << ',' << r.e.n_obs << ','
        << r.e.n_countries << '\n';
}

IrfTable read_irf_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("irf csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "label,horizon,beta,se,ci_low,ci_high,n_obs,n_countries")
    throw data_error("irf csv: unexpected header: " + line);
  IrfTable t;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 8) throw data_error("irf csv: expected 8 fields, got line: " + line);
    IrfRow r;
    r.label = f[0];
    r.e.horizon = parse_int_tok(f[1], "horizon");
    r.e.beta = parse_double_tok(f[2], "beta");
    r.e.se = parse_double_tok(f[3], "se");
    r.e.ci_low = parse_double_tok(f[4], "ci_low");
    r.e.ci_high = parse_double_tok(f[5], "ci_high");
    r.e.n_obs = parse_int_tok(f[6], "n_obs");
    r.e.n_countries = parse_int_tok(f[7], "n_countries");
    t.rows.push_back(std::move(r));
  }
  if (t.rows.empty()) throw data_error("irf csv: no rows");
  return t;
}

std::string irf_table_json(const IrfTable& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json o;
    o["label"] = r.label;
    o["horizon"] = r.e.horizon;
    o["beta"] = r.e.beta;
    o["se"] = r.e.se;
    o["ci_low"] = r.e.ci_low;
    o["ci_high"] = r.e.ci_high;
    o["n_obs"] = r.e.n_obs;
    o["n_countries"] = r.e.n_countries;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace tlp::lp
