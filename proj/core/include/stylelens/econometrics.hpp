#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylelens/common.hpp"

namespace stylelens::econ {

/// Raised when the design cannot identify a coefficient: a regressor is
/// absorbed by the fixed effects, or collinear columns must not be dropped.
class IdentificationError : public ValidationError {
 public:
  IdentificationError(std::string what, std::vector<std::string> columns)
      : ValidationError(std::move(what)), columns_(std::move(columns)) {}
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

/// Raised when the multinomial likelihood is unbounded for some class.
class SeparationError : public Error {
 public:
  SeparationError(std::string what, int label) : Error(std::move(what)), label_(label) {}
  int label() const { return label_; }

 private:
  int label_;
};

struct FixedEffect {
  std::string name;
  /// Group index per observation, dense in [0, groups).
  std::vector<int> group;
  int groups = 0;

  /// Maps arbitrary keys to dense group indices, first-seen order.
  static FixedEffect from_keys(std::string name, const std::vector<std::string>& keys);
};

struct DesignMatrix {
  std::vector<std::string> columns;
  Eigen::MatrixXd x;  // observations x regressors, no intercept column
  Eigen::VectorXd y;
  std::vector<FixedEffect> fixed_effects;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  /// Throws ValidationError on shape mismatch, non-finite cells, duplicate
  /// column names or malformed group ids.
  void validate() const;
};

enum class Vce { Classical, HC0, HC1 };
std::optional<Vce> parse_vce(std::string_view s);
std::string_view to_string(Vce v);

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::MatrixXd vcov;
  std::optional<double> r_squared;
  std::optional<double> within_r_squared;
  std::optional<double> log_likelihood;
  std::size_t n_obs = 0;
  bool converged = true;
  int iterations = 0;
  std::vector<std::string> dropped;

  std::optional<std::size_t> index_of(std::string_view name) const;
  double coefficient(std::string_view name) const;
  double std_error(std::string_view name) const;
};

/// Two-sided normal-test markers: "***" p <= 0.01, "**" p <= 0.05,
/// "*" p <= 0.10. Boundary t-values get the stronger marker.
std::string significance_stars(double coef, double se);
double two_sided_p_value(double t);

/// Greedy left-to-right selection of linearly independent columns: a column
/// is kept when its residual after projection on the kept ones retains more
/// than `tol` of its squared norm.
std::vector<std::size_t> independent_columns(const Eigen::MatrixXd& x, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Multinomial logit

/// Log-likelihood of the multinomial logit with a baseline class whose
/// coefficients are pinned at zero. Parameters are stacked per non-baseline
/// class: theta = [beta_c1; beta_c2; ...], each of length x.cols().
class MultinomialObjective {
 public:
  /// `y` holds class indices in [0, classes). `x` should include an
  /// intercept column when one is wanted.
  MultinomialObjective(const Eigen::MatrixXd& x, std::vector<int> y, int classes, int baseline);

  std::size_t parameters() const { return static_cast<std::size_t>(p_ * (k_ - 1)); }
  int classes() const { return k_; }
  int baseline() const { return baseline_; }

  double value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  /// Hessian of the log-likelihood (negative semidefinite).
  Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const;
  /// Sum over observations of outer products of per-observation scores.
  Eigen::MatrixXd score_outer_product(const Eigen::VectorXd& theta) const;
  /// n x classes matrix of fitted probabilities.
  Eigen::MatrixXd probabilities(const Eigen::VectorXd& theta) const;
  /// n x classes linear predictors (baseline column zero).
  Eigen::MatrixXd linear_predictors(const Eigen::VectorXd& theta) const;

 private:
  Eigen::MatrixXd x_;
  std::vector<int> y_;
  int k_;
  int baseline_;
  Eigen::Index p_;
};

/// Numerically stable softmax of one row of linear predictors.
Eigen::VectorXd softmax(const Eigen::VectorXd& eta);

struct MultinomialOptions {
  int baseline_label = 0;
  /// Class labels to model. Empty: the labels observed in y. A listed
  /// label without observations is reported as separation.
  std::vector<int> labels;
  int max_iterations = 500;
  /// Convergence when max |gradient| / n_obs falls below this.
  double gradient_tolerance = 1e-8;
  /// Ridge added to the negated Hessian when it is not positive definite.
  bool ridge_fallback = true;
  double ridge = 1e-8;
  bool drop_collinear = true;
  /// HC0 here means the sandwich estimator, HC1 scales it by n/(n-k).
  Vce vce = Vce::HC0;
  /// |linear predictor| beyond this signals an unbounded likelihood.
  double separation_bound = 50.0;
};

struct MultinomialFit {
  std::vector<int> labels;  // sorted; includes the baseline
  int baseline_label = 0;
  std::vector<std::string> regressors;  // "_cons" first, then kept columns
  /// regressors x labels; the baseline column is zero.
  Eigen::MatrixXd beta;
  /// One entry per non-baseline label, in `labels` order.
  std::vector<FitResult> per_class;
  double log_likelihood = 0;
  /// Log-likelihood after every accepted iteration (non-decreasing).
  std::vector<double> log_likelihood_trace;
  bool converged = false;
  int iterations = 0;
  std::size_t n_obs = 0;
  std::vector<std::string> dropped;

  const FitResult& for_label(int label) const;
};

/// Maximum-likelihood fit by damped Newton with backtracking line search.
/// `design.y` holds class labels; fixed effects are ignored.
MultinomialFit fit_multinomial_logit(const DesignMatrix& design, const MultinomialOptions& opts = {});

/// Probabilities over fit.labels for one observation. Every regressor of
/// the fit (except "_cons") must be supplied, and nothing else.
std::vector<double> predict_class_probs(const MultinomialFit& fit,
                                        const std::vector<std::pair<std::string, double>>& covariates);

// ---------------------------------------------------------------------------
// Linear regression with fixed effects

struct OlsOptions {
  Vce vce = Vce::HC1;
  /// Names of design.fixed_effects to absorb; empty fits pooled OLS with an
  /// intercept.
  std::vector<std::string> fixed_effects;
  double demean_tolerance = 1e-10;
  int max_demean_iterations = 10000;
  bool drop_collinear = true;
};

/// Within estimator: variables are demeaned by every listed fixed effect
/// (alternating projections for several), then OLS on the demeaned data.
/// Robust variance uses the residual degrees of freedom n - k - absorbed.
/// r_squared refers to the full model (fixed effects included) against the
/// raw response; within_r_squared to the demeaned problem.
FitResult fit_ols_fe(const DesignMatrix& design, const OlsOptions& opts = {});

/// Number of fixed-effect parameters absorbed by the listed effects,
/// accounting for redundancy between them (connected components for two).
std::size_t absorbed_parameters(const std::vector<const FixedEffect*>& effects);

/// Demeans `m` column-wise in place by the listed effects. Returns the
/// number of sweeps used; throws if the tolerance is not reached.
int demean(Eigen::MatrixXd& m, const std::vector<const FixedEffect*>& effects, double tolerance,
           int max_iterations);

// ---------------------------------------------------------------------------
// Tables

enum class TableLayout { Table5, Table6, Table7 };
std::optional<TableLayout> parse_layout(std::string_view s);

struct TableColumn {
  std::string title;
  const FitResult* fit = nullptr;
};

struct RenderedTable {
  std::string csv;
  std::string text;
};

/// Coefficient rows ("0.386***") with standard errors beneath ("(0.026)").
/// Table5 layout prints three decimals and an Obs. row; Table6/7 print at
/// least three significant digits and an R-squared / N block. "_cons" is
/// omitted from every layout.
RenderedTable coefficient_table(const std::vector<TableColumn>& columns, TableLayout layout);
RenderedTable coefficient_table(const MultinomialFit& fit);

/// Numeric renderings used by the tables.
std::string format_table5_number(double v);
std::string format_sig3(double v);

}  // namespace stylelens::econ
