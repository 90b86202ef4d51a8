#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "taylorlp/panel.hpp"

namespace tlp::regress {

struct RowKey {
  std::string country;
  int year = 0;
};

struct DesignMatrix {
  Eigen::MatrixXd X;
  std::vector<std::string> column_labels;
  std::vector<RowKey> row_keys;
};

struct RegressionFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  Eigen::MatrixXd covariance;  // classical sigma2 * (X'X)^-1, NaN entries when df_resid == 0
  double sigma2 = 0.0;
  int n_obs = 0;
  int df_resid = 0;
  std::vector<std::string> column_labels;
  std::vector<RowKey> row_keys;
  Eigen::MatrixXd design;  // kept so sandwich covariances can be formed later
};

// Least squares through an SVD. intercept=true prepends a "const" column.
// absorbed_groups counts parameters soaked up by a prior demeaning step and
// only affects df_resid. Throws on n < p and on rank deficiency (naming the
// dependent columns).
RegressionFit ols(const DesignMatrix& design, const Eigen::VectorXd& y, bool intercept,
                  int absorbed_groups = 0);

struct WithinOptions {
  bool country_fe = true;
  bool time_fe = true;
};

// Design for a two-way fixed-effects regression: listwise-complete rows,
// country effects removed by within-demeaning, time effects as explicit year
// dummies (earliest retained year dropped). With country_fe off the caller
// should fit with an intercept instead (use_intercept says so).
struct WithinDesign {
  DesignMatrix design;
  Eigen::VectorXd y;
  int absorbed_groups = 0;
  bool use_intercept = false;
  int n_countries = 0;
  std::vector<std::string> clusters;  // country of each retained row
  std::vector<std::string> singleton_countries;  // one retained row; kept, flagged
  std::vector<int> singleton_years;
};

WithinDesign within_twoway(const panel::PanelDataset& p, const std::string& y_var,
                           const std::vector<std::string>& x_vars,
                           const WithinOptions& opt = {});

// One-call convenience: build the within design and fit it.
RegressionFit fit_within(const panel::PanelDataset& p, const std::string& y_var,
                         const std::vector<std::string>& x_vars, const WithinOptions& opt,
                         WithinDesign* keep_design = nullptr);

// CR1 sandwich: bread * (sum_g X_g'e_g e_g'X_g) * bread, scaled by
// G/(G-1) * (n-1)/(n-p) with p = n_obs - df_resid. With every row its own
// cluster this reduces to HC1.
Eigen::MatrixXd cluster_robust_cov(const RegressionFit& fit,
                                   const std::vector<std::string>& clusters);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

double normal_quantile(double p);

// Two-sided normal interval at the given level, e.g. 0.90 -> +/- 1.6449 se.
Interval confidence_interval(double coef, double se, double level);
Interval confidence_interval(const RegressionFit& fit, const Eigen::MatrixXd& cov, int j,
                             double level);

}  // namespace tlp::regress
