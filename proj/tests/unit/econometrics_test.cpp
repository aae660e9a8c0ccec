#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "stylelens/econometrics.hpp"

using namespace stylelens;
using namespace stylelens::econ;

namespace {

FixedEffect random_effect(oracle::Gen& g, const std::string& name, int n, int groups) {
  std::vector<std::string> keys;
  for (int i = 0; i < n; ++i) keys.push_back(name + std::to_string(i < groups ? i : g.integer(0, groups - 1)));
  return FixedEffect::from_keys(name, keys);
}

DesignMatrix random_panel(oracle::Gen& g, int n, int k, int effects) {
  DesignMatrix d;
  d.x.resize(n, k);
  d.y.resize(n);
  for (int j = 0; j < k; ++j) d.columns.push_back("x" + std::to_string(j));
  for (int e = 0; e < effects; ++e) d.fixed_effects.push_back(random_effect(g, e ? "t" : "g", n, g.integer(2, 6)));
  for (int i = 0; i < n; ++i) {
    double fe = 0;
    for (const auto& f : d.fixed_effects) fe += 0.7 * f.group[static_cast<std::size_t>(i)];
    for (int j = 0; j < k; ++j) d.x(i, j) = g.normal() + 0.3 * fe;
    d.y(i) = 1.0 + fe + d.x.row(i).sum() * 0.5 + g.normal();
  }
  return d;
}

}  // namespace

TEST(Ols, WithinEqualsDummyVariableProperty) {
  oracle::Gen g(2024);
  for (int t = 0; t < 150; ++t) {
    const int effects = g.integer(0, 2);
    const int n = g.integer(20, 50);
    const int k = g.integer(1, 3);
    const auto d = random_panel(g, n, k, effects);
    OlsOptions o;
    for (const auto& f : d.fixed_effects) o.fixed_effects.push_back(f.name);
    const auto fit = fit_ols_fe(d, o);
    const auto oracle = oracle::lsdv_coefficients(d);
    for (int j = 0; j < k; ++j) EXPECT_NEAR(fit.coefficient("x" + std::to_string(j)), oracle(j), 1e-8) << "panel " << t;
  }
}

TEST(Ols, SmallPanelAgainstDummies) {
  oracle::Gen g(5);
  DesignMatrix d;
  d.columns = {"x"};
  d.x.resize(20, 1);
  d.y.resize(20);
  std::vector<std::string> keys;
  for (int i = 0; i < 20; ++i) {
    keys.push_back("a" + std::to_string(i / 4));
    d.x(i, 0) = g.normal();
    d.y(i) = 2.0 * d.x(i, 0) + (i / 4) + 0.1 * g.normal();
  }
  d.fixed_effects.push_back(FixedEffect::from_keys("article", keys));
  OlsOptions o;
  o.fixed_effects = {"article"};
  const auto fit = fit_ols_fe(d, o);
  EXPECT_NEAR(fit.coefficient("x"), oracle::lsdv_coefficients(d)(0), 1e-8);
  ASSERT_TRUE(fit.r_squared);
  ASSERT_TRUE(fit.within_r_squared);
  EXPECT_GT(*fit.r_squared, *fit.within_r_squared);
}

TEST(Ols, AbsorbedRegressorIsAnIdentificationError) {
  DesignMatrix d;
  d.columns = {"x", "z"};
  d.x.resize(8, 2);
  d.y.resize(8);
  std::vector<std::string> keys;
  for (int i = 0; i < 8; ++i) {
    keys.push_back(std::to_string(i / 2));
    d.x(i, 0) = i * 0.37 - (i % 3);
    d.x(i, 1) = i / 2;
    d.y(i) = i;
  }
  d.fixed_effects.push_back(FixedEffect::from_keys("article", keys));
  OlsOptions o;
  o.fixed_effects = {"article"};
  try {
    fit_ols_fe(d, o);
    FAIL() << "expected IdentificationError";
  } catch (const IdentificationError& e) {
    EXPECT_EQ(e.columns(), std::vector<std::string>{"z"});
  }
}

TEST(Ols, CollinearColumnIsDroppedAndNamed) {
  oracle::Gen g(8);
  DesignMatrix d;
  d.columns = {"a", "b", "twice_a"};
  d.x.resize(30, 3);
  d.y.resize(30);
  for (int i = 0; i < 30; ++i) {
    d.x(i, 0) = g.normal();
    d.x(i, 1) = g.normal();
    d.x(i, 2) = 2 * d.x(i, 0);
    d.y(i) = d.x(i, 0) - d.x(i, 1) + g.normal();
  }
  const auto fit = fit_ols_fe(d);
  EXPECT_EQ(fit.dropped, std::vector<std::string>{"twice_a"});
  OlsOptions strict;
  strict.drop_collinear = false;
  EXPECT_THROW(fit_ols_fe(d, strict), IdentificationError);
}

TEST(Ols, RobustAndClassicalAgreeUnderHomoskedasticity) {
  oracle::Gen g(10);
  DesignMatrix d;
  d.columns = {"x1", "x2"};
  d.x.resize(10000, 2);
  d.y.resize(10000);
  for (int i = 0; i < 10000; ++i) {
    d.x(i, 0) = g.normal();
    d.x(i, 1) = g.uniform(-1, 1);
    d.y(i) = 0.5 + d.x(i, 0) - 2 * d.x(i, 1) + g.normal();
  }
  const auto hc1 = fit_ols_fe(d);
  OlsOptions c;
  c.vce = Vce::Classical;
  const auto classical = fit_ols_fe(d, c);
  const auto oracle = oracle::classical_se_with_intercept(d.x, d.y);
  for (const char* n : {"x1", "x2"}) {
    EXPECT_NEAR(hc1.std_error(n) / classical.std_error(n), 1.0, 0.15);
  }
  EXPECT_NEAR(classical.std_error("x1"), oracle(0), 1e-10);
  EXPECT_NEAR(classical.std_error("x2"), oracle(1), 1e-10);
}

TEST(Ols, AbsorbedParameterCounts) {
  const auto a = FixedEffect::from_keys("a", {"1", "1", "2", "2", "3", "3"});
  const auto b = FixedEffect::from_keys("b", {"x", "y", "x", "y", "z", "w"});
  EXPECT_EQ(absorbed_parameters({&a}), 3u);
  // groups {1,2}-{x,y} connected, {3}-{z,w} connected: 3 + 4 - 2.
  EXPECT_EQ(absorbed_parameters({&a, &b}), 5u);
}

TEST(Ols, DemeaningTwoWayIsIdempotent) {
  oracle::Gen g(3);
  auto d = random_panel(g, 40, 2, 2);
  std::vector<const FixedEffect*> fe = {&d.fixed_effects[0], &d.fixed_effects[1]};
  Eigen::MatrixXd m = d.x;
  demean(m, fe, 1e-12, 10000);
  Eigen::MatrixXd again = m;
  demean(again, fe, 1e-12, 10000);
  EXPECT_LT((again - m).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Logit, ObjectiveMatchesIndependentLikelihood) {
  oracle::Gen g(77);
  const int n = 40, p = 3, k = 4;
  Eigen::MatrixXd x(n, p);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1;
    x(i, 1) = g.normal();
    x(i, 2) = g.uniform(-2, 2);
    y[static_cast<std::size_t>(i)] = i < k ? i : g.integer(0, k - 1);
  }
  MultinomialObjective obj(x, y, k, 1);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(obj.parameters()));
    for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = g.uniform(-1.5, 1.5);
    auto f = [&](const Eigen::VectorXd& th) { return oracle::multinomial_loglik(x, y, k, 1, th); };
    EXPECT_NEAR(obj.value(theta), f(theta), 1e-10);
    const auto fd = oracle::central_gradient(f, theta, 1e-5);
    const auto an = obj.gradient(theta);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      EXPECT_LE(std::abs(an(j) - fd(j)), 1e-6 * std::max(1.0, std::abs(fd(j)))) << "point " << t << " param " << j;
    }
    const Eigen::MatrixXd h = obj.hessian(theta);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd up = theta, down = theta;
      up(j) += 1e-5;
      down(j) -= 1e-5;
      const Eigen::VectorXd col = (obj.gradient(up) - obj.gradient(down)) / 2e-5;
      EXPECT_LT((h.col(j) - col).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, col.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Logit, UniformWhenCoefficientsAreZero) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 2);
  x.col(1) << 1, 2, 3, 4, 5;
  MultinomialObjective obj(x, {0, 1, 2, 3, 4}, 7, 0);
  const auto p = obj.probabilities(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(obj.parameters())));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index c = 0; c < 7; ++c) EXPECT_NEAR(p(i, c), 1.0 / 7.0, 1e-15);
  }
}

TEST(Logit, RecoversBinaryCoefficients) {
  oracle::Gen g(1234);
  const int n = 20000;
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = g.normal();
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(2, 2);
  beta(0, 1) = 0.5;
  beta(1, 1) = -1.0;
  const auto y = oracle::simulate_multinomial(x, beta, 99);
  DesignMatrix d;
  d.columns = {"x"};
  d.x = x;
  d.y.resize(n);
  for (int i = 0; i < n; ++i) d.y(i) = y[static_cast<std::size_t>(i)];
  const auto fit = fit_multinomial_logit(d);
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.for_label(1).coefficient("_cons"), 0.5, 0.05);
  EXPECT_NEAR(fit.for_label(1).coefficient("x"), -1.0, 0.05);
  for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
    EXPECT_GE(fit.log_likelihood_trace[i], fit.log_likelihood_trace[i - 1]);
  }
}

TEST(Logit, InterceptOnlyMatchesClassShares) {
  DesignMatrix d;
  d.x.resize(60, 0);
  d.y.resize(60);
  std::vector<int> counts = {10, 25, 5, 20};
  int row = 0;
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) d.y(row++) = c;
  }
  const auto fit = fit_multinomial_logit(d);
  const auto p = predict_class_probs(fit, {});
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(p[static_cast<std::size_t>(c)], counts[static_cast<std::size_t>(c)] / 60.0, 1e-6);
}

TEST(Logit, PredictionInvariancesAndOverflowGuard) {
  oracle::Gen g(42);
  const int n = 400;
  DesignMatrix d;
  d.columns = {"x"};
  d.x.resize(n, 1);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.x(i, 0) = g.normal();
    d.y(i) = g.coin(1 / (1 + std::exp(-d.x(i, 0)))) ? 1 : (g.coin() ? 2 : 0);
  }
  const auto fit = fit_multinomial_logit(d);
  auto scaled = d;
  scaled.x *= 10.0;
  const auto fit10 = fit_multinomial_logit(scaled);
  const auto p = predict_class_probs(fit, {{"x", 0.7}});
  const auto p10 = predict_class_probs(fit10, {{"x", 7.0}});
  for (std::size_t c = 0; c < p.size(); ++c) EXPECT_NEAR(p[c], p10[c], 1e-8);
  const auto extreme = predict_class_probs(fit, {{"x", 1e6}});
  double total = 0;
  for (double v : extreme) {
    EXPECT_TRUE(std::isfinite(v));
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THROW(predict_class_probs(fit, {{"y", 1.0}}), ValidationError);
  EXPECT_THROW(predict_class_probs(fit, {}), ValidationError);
}

TEST(Logit, SeparationNamesTheClass) {
  DesignMatrix d;
  d.columns = {"x"};
  d.x.resize(20, 1);
  d.y.resize(20);
  for (int i = 0; i < 20; ++i) {
    d.x(i, 0) = i;
    d.y(i) = i < 10 ? 0 : 3;
  }
  try {
    fit_multinomial_logit(d);
    FAIL() << "expected SeparationError";
  } catch (const SeparationError& e) {
    EXPECT_EQ(e.label(), 3);
  }
  DesignMatrix e;
  e.x.resize(4, 0);
  e.y.resize(4);
  e.y << 0, 1, 0, 1;
  MultinomialOptions o;
  o.labels = {0, 1, 2};
  EXPECT_THROW(fit_multinomial_logit(e, o), SeparationError);
}

TEST(Stars, ThresholdsAndBoundaries) {
  EXPECT_EQ(significance_stars(0.386, 0.026), "***");
  EXPECT_EQ(significance_stars(0.052, 0.043), "");
  EXPECT_EQ(significance_stars(1.96, 1.0), "**");
  EXPECT_EQ(significance_stars(-1.7, 1.0), "*");
  EXPECT_EQ(significance_stars(1.0, 0.0), "");
  EXPECT_NEAR(two_sided_p_value(1.959963984540054), 0.05, 1e-12);
}

TEST(Tables, NumberFormats) {
  EXPECT_EQ(format_table5_number(0.3864), "0.386");
  EXPECT_EQ(format_table5_number(-0.0004), "-0.000");
  EXPECT_EQ(format_sig3(12.345), "12.345");
  EXPECT_EQ(format_sig3(0.0012345), "0.00123");
  EXPECT_EQ(format_sig3(-0.5), "-0.500");
}

TEST(Tables, CoefficientTableLayout) {
  FitResult f;
  f.names = {"_cons", "EastAsian"};
  f.coef.resize(2);
  f.coef << 1.0, 0.386;
  f.se.resize(2);
  f.se << 0.1, 0.026;
  f.n_obs = 12345;
  f.r_squared = 0.25;
  const auto t5 = coefficient_table({{"Version 1", &f}}, TableLayout::Table5);
  EXPECT_NE(t5.text.find("0.386***"), std::string::npos);
  EXPECT_NE(t5.text.find("(0.026)"), std::string::npos);
  EXPECT_NE(t5.text.find("12,345"), std::string::npos);
  EXPECT_EQ(t5.text.find("_cons"), std::string::npos);
  const auto t6 = coefficient_table({{"rule1a", &f}}, TableLayout::Table6);
  EXPECT_NE(t6.text.find("R-squared"), std::string::npos);
  EXPECT_NE(t6.csv.find("EastAsian"), std::string::npos);
}

TEST(Design, ValidationCatchesBadInput) {
  DesignMatrix d;
  d.columns = {"a", "a"};
  d.x = Eigen::MatrixXd::Zero(3, 2);
  d.y = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(d.validate(), ValidationError);
  d.columns = {"a", "b"};
  d.x(1, 1) = std::nan("");
  EXPECT_THROW(d.validate(), ValidationError);
}
