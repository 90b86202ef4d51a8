#include "taylorlp/regress.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "taylorlp/errors.hpp"

namespace tlp::regress {

RegressionFit ols(const DesignMatrix& design, const Eigen::VectorXd& y, bool intercept,
                  int absorbed_groups) {
  const int n = static_cast<int>(design.X.rows());
  if (y.size() != n) throw estimation_error("ols: y length does not match design rows");
  if (!design.X.allFinite() || !y.allFinite())
    throw estimation_error("ols: non-finite value in design or outcome");

  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  if (intercept) {
    X.resize(n, design.X.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(design.X.cols()) = design.X;
    labels.push_back("const");
    labels.insert(labels.end(), design.column_labels.begin(), design.column_labels.end());
  } else {
    X = design.X;
    labels = design.column_labels;
  }
  const int p = static_cast<int>(X.cols());
  if (p == 0) throw estimation_error("ols: empty design");
  if (n < p)
    throw estimation_error("ols: insufficient observations (n=" + std::to_string(n) +
                           ", p=" + std::to_string(p) + ")");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  if (!(sv(0) > 0) || sv(p - 1) < tol) {
    std::string cols;
    for (int k = 0; k < p; ++k) {
      if (sv(k) >= tol && sv(0) > 0) continue;
      double vmax = svd.matrixV().col(k).cwiseAbs().maxCoeff();
      for (int j = 0; j < p; ++j) {
        if (std::abs(svd.matrixV()(j, k)) > 0.25 * vmax) {
          if (!cols.empty()) cols += ", ";
          cols += labels[j];
        }
      }
    }
    throw estimation_error("ols: rank-deficient design; dependent columns: " + cols);
  }

  RegressionFit fit;
  fit.coefficients = svd.solve(y);
  fit.fitted = X * fit.coefficients;
  fit.residuals = y - fit.fitted;
  fit.n_obs = n;
  fit.df_resid = n - p - absorbed_groups;
  fit.column_labels = std::move(labels);
  fit.row_keys = design.row_keys;
  fit.design = std::move(X);

  const double rss = fit.residuals.squaredNorm();
  if (fit.df_resid > 0) {
    fit.sigma2 = rss / fit.df_resid;
  } else {
    fit.sigma2 = std::numeric_limits<double>::quiet_NaN();
  }
  Eigen::VectorXd inv_sv2 = sv.array().square().inverse();
  Eigen::MatrixXd xtx_inv =
      svd.matrixV() * inv_sv2.asDiagonal() * svd.matrixV().transpose();
  fit.covariance = fit.sigma2 * xtx_inv;
  return fit;
}

WithinDesign within_twoway(const panel::PanelDataset& p, const std::string& y_var,
                           const std::vector<std::string>& x_vars, const WithinOptions& opt) {
  const auto& ycol = p.column(y_var);
  std::vector<const std::vector<double>*> xcols;
  xcols.reserve(x_vars.size());
  for (const auto& v : x_vars) xcols.push_back(&p.column(v));

  std::vector<int> rows;
  for (int i = 0; i < p.n_rows(); ++i) {
    if (panel::is_missing(ycol[i])) continue;
    bool ok = true;
    for (const auto* c : xcols)
      if (panel::is_missing((*c)[i])) {
        ok = false;
        break;
      }
    if (ok) rows.push_back(i);
  }
  if (rows.empty()) throw estimation_error("within_twoway: empty estimation sample");
  const int n = static_cast<int>(rows.size());

  std::vector<int> years;
  if (opt.time_fe) {
    std::set<int> uniq;
    for (int r : rows) uniq.insert(p.year_of(r));
    years.assign(uniq.begin(), uniq.end());
    years.erase(years.begin());  // earliest year is the baseline
  }

  const int px = static_cast<int>(x_vars.size());
  const int pd = static_cast<int>(years.size());

  WithinDesign w;
  w.design.X.resize(n, px + pd);
  w.y.resize(n);
  w.design.column_labels = x_vars;
  for (int yr : years) w.design.column_labels.push_back("year_" + std::to_string(yr));
  w.design.row_keys.reserve(n);
  w.clusters.reserve(n);

  for (int i = 0; i < n; ++i) {
    int r = rows[i];
    w.y(i) = ycol[r];
    for (int j = 0; j < px; ++j) w.design.X(i, j) = (*xcols[j])[r];
    for (int j = 0; j < pd; ++j) w.design.X(i, px + j) = p.year_of(r) == years[j] ? 1.0 : 0.0;
    w.design.row_keys.push_back({p.country_of(r), p.year_of(r)});
    w.clusters.push_back(p.country_of(r));
  }

  // group extents over retained rows; panel rows are country-contiguous
  std::vector<std::pair<int, int>> spans;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && w.clusters[j] == w.clusters[i]) ++j;
    spans.emplace_back(i, j);
    i = j;
  }
  w.n_countries = static_cast<int>(spans.size());
  for (const auto& [b, e] : spans)
    if (e - b == 1) w.singleton_countries.push_back(w.clusters[b]);
  {
    std::map<int, int> year_counts;
    for (int i = 0; i < n; ++i) ++year_counts[w.design.row_keys[i].year];
    for (const auto& [yr, c] : year_counts)
      if (c == 1) w.singleton_years.push_back(yr);
  }

  if (opt.country_fe) {
    for (const auto& [b, e] : spans) {
      const double len = e - b;
      double ym = w.y.segment(b, e - b).mean();
      w.y.segment(b, e - b).array() -= ym;
      for (int j = 0; j < px + pd; ++j) {
        double m = w.design.X.col(j).segment(b, e - b).sum() / len;
        w.design.X.col(j).segment(b, e - b).array() -= m;
      }
    }
    w.absorbed_groups = w.n_countries;
    w.use_intercept = false;
  } else {
    w.absorbed_groups = 0;
    w.use_intercept = true;
  }
  return w;
}

RegressionFit fit_within(const panel::PanelDataset& p, const std::string& y_var,
                         const std::vector<std::string>& x_vars, const WithinOptions& opt,
                         WithinDesign* keep_design) {
  WithinDesign w = within_twoway(p, y_var, x_vars, opt);
  RegressionFit fit = ols(w.design, w.y, w.use_intercept, w.absorbed_groups);
  if (keep_design) *keep_design = std::move(w);
  return fit;
}

Eigen::MatrixXd cluster_robust_cov(const RegressionFit& fit,
                                   const std::vector<std::string>& clusters) {
  const int n = fit.n_obs;
  if (static_cast<int>(clusters.size()) != n)
    throw estimation_error("cluster_robust_cov: cluster labels do not match rows");
  const int p = static_cast<int>(fit.design.cols());

  // first-occurrence grouping keeps the accumulation order independent of
  // how the clusters happen to be named
  std::vector<std::vector<int>> groups;
  std::map<std::string, int> gid;
  for (int i = 0; i < n; ++i) {
    auto [it, inserted] = gid.emplace(clusters[i], static_cast<int>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  const int G = static_cast<int>(groups.size());
  if (G < 2) throw estimation_error("cluster_robust_cov: need at least 2 clusters, got " +
                                    std::to_string(G));

  Eigen::MatrixXd xtx = fit.design.transpose() * fit.design;
  Eigen::MatrixXd bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (const auto& idx : groups) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(p);
    for (int i : idx) s += fit.design.row(i).transpose() * fit.residuals(i);
    meat += s * s.transpose();
  }

  const int p_eff = fit.n_obs - fit.df_resid;
  const double q = (static_cast<double>(G) / (G - 1.0)) *
                   ((n - 1.0) / static_cast<double>(n - p_eff));
  Eigen::MatrixXd cov = q * bread * meat * bread;
  return 0.5 * (cov + cov.transpose());
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw estimation_error("normal_quantile: p must lie in (0,1)");
  static const boost::math::normal_distribution<double> nd(0.0, 1.0);
  return boost::math::quantile(nd, p);
}

Interval confidence_interval(double coef, double se, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw estimation_error("confidence_interval: level must lie in (0,1)");
  if (!(se >= 0.0) || !std::isfinite(se))
    throw estimation_error("confidence_interval: invalid standard error");
  const double q = normal_quantile(0.5 + level / 2.0);
  return {coef - q * se, coef + q * se};
}

Interval confidence_interval(const RegressionFit& fit, const Eigen::MatrixXd& cov, int j,
                             double level) {
  if (j < 0 || j >= fit.coefficients.size())
    throw estimation_error("confidence_interval: coefficient index out of range");
  const double v = cov(j, j);
  if (!(v >= 0.0) || !std::isfinite(v))
    throw estimation_error("confidence_interval: negative or non-finite variance");
  return confidence_interval(fit.coefficients(j), std::sqrt(v), level);
}

}  // namespace tlp::regress
