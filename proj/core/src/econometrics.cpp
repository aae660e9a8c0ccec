#include "stylelens/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "stylelens/io.hpp"

namespace stylelens::econ {

FixedEffect FixedEffect::from_keys(std::string name, const std::vector<std::string>& keys) {
  FixedEffect fe;
  fe.name = std::move(name);
  fe.group.reserve(keys.size());
  std::unordered_map<std::string, int> ids;
  for (const auto& k : keys) {
    auto [it, inserted] = ids.emplace(k, fe.groups);
    if (inserted) ++fe.groups;
    fe.group.push_back(it->second);
  }
  return fe;
}

void DesignMatrix::validate() const {
  if (static_cast<std::size_t>(x.cols()) != columns.size()) {
    throw ValidationError("design has " + std::to_string(x.cols()) + " columns but " +
                          std::to_string(columns.size()) + " names");
  }
  if (x.rows() != y.size()) throw ValidationError("design rows and response length differ");
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c == "_cons") throw ValidationError("'_cons' is reserved for the intercept");
    if (!seen.insert(c).second) throw ValidationError("duplicate regressor name '" + c + "'");
  }
  if (!x.allFinite()) throw ValidationError("design matrix has missing or non-finite cells");
  if (!y.allFinite()) throw ValidationError("response has missing or non-finite values");
  for (const auto& fe : fixed_effects) {
    if (fe.group.size() != rows()) throw ValidationError("fixed effect '" + fe.name + "' has wrong length");
    for (int g : fe.group) {
      if (g < 0 || g >= fe.groups) throw ValidationError("fixed effect '" + fe.name + "' has out-of-range group id");
    }
  }
}

std::optional<Vce> parse_vce(std::string_view s) {
  auto key = ascii_lower(trim(s));
  if (key == "hc1" || key == "robust") return Vce::HC1;
  if (key == "hc0") return Vce::HC0;
  if (key == "classical" || key == "ols" || key == "iid") return Vce::Classical;
  return std::nullopt;
}

std::string_view to_string(Vce v) {
  switch (v) {
    case Vce::Classical: return "classical";
    case Vce::HC0: return "HC0";
    case Vce::HC1: return "HC1";
  }
  return "HC1";
}

std::optional<std::size_t> FitResult::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

double FitResult::coefficient(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw ValidationError("no coefficient named '" + std::string(name) + "'");
  return coef(static_cast<Eigen::Index>(*i));
}

double FitResult::std_error(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw ValidationError("no coefficient named '" + std::string(name) + "'");
  return se(static_cast<Eigen::Index>(*i));
}

double two_sided_p_value(double t) { return std::erfc(std::abs(t) / std::sqrt(2.0)); }

std::string significance_stars(double coef, double se) {
  if (!(se > 0) || !std::isfinite(coef)) return "";
  double p = two_sided_p_value(coef / se);
  if (p <= 0.01) return "***";
  if (p <= 0.05) return "**";
  if (p <= 0.10) return "*";
  return "";
}

std::vector<std::size_t> independent_columns(const Eigen::MatrixXd& x, double tol) {
  const Eigen::MatrixXd gram = x.transpose() * x;
  std::vector<std::size_t> kept;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    const double self = gram(j, j);
    if (!(self > 0)) continue;
    double residual = self;
    if (!kept.empty()) {
      const auto k = static_cast<Eigen::Index>(kept.size());
      Eigen::MatrixXd gkk(k, k);
      Eigen::VectorXd gkj(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        gkj(a) = gram(static_cast<Eigen::Index>(kept[a]), j);
        for (Eigen::Index b = 0; b < k; ++b) {
          gkk(a, b) = gram(static_cast<Eigen::Index>(kept[a]), static_cast<Eigen::Index>(kept[b]));
        }
      }
      residual = self - gkj.dot(gkk.ldlt().solve(gkj));
    }
    if (residual > tol * self) kept.push_back(static_cast<std::size_t>(j));
  }
  return kept;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd softmax(const Eigen::VectorXd& eta) {
  const double m = eta.maxCoeff();
  Eigen::VectorXd e = (eta.array() - m).exp();
  return e / e.sum();
}

namespace {

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& eta) {
  const double m = eta.maxCoeff();
  return m + std::log((eta.array() - m).exp().sum());
}

}  // namespace

MultinomialObjective::MultinomialObjective(const Eigen::MatrixXd& x, std::vector<int> y, int classes, int baseline)
    : x_(x), y_(std::move(y)), k_(classes), baseline_(baseline), p_(x.cols()) {
  if (static_cast<Eigen::Index>(y_.size()) != x_.rows()) throw ValidationError("response length mismatch");
  if (k_ < 2) throw ValidationError("multinomial logit needs at least two classes");
  if (baseline_ < 0 || baseline_ >= k_) throw ValidationError("baseline class out of range");
  for (int c : y_) {
    if (c < 0 || c >= k_) throw ValidationError("class index out of range");
  }
}

Eigen::MatrixXd MultinomialObjective::linear_predictors(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p_, k_);
  Eigen::Index block = 0;
  for (int c = 0; c < k_; ++c) {
    if (c == baseline_) continue;
    beta.col(c) = theta.segment(block * p_, p_);
    ++block;
  }
  return x_ * beta;
}

double MultinomialObjective::value(const Eigen::VectorXd& theta) const {
  const Eigen::MatrixXd eta = linear_predictors(theta);
  double ll = 0;
  for (Eigen::Index i = 0; i < eta.rows(); ++i) ll += eta(i, y_[i]) - log_sum_exp(eta.row(i));
  return ll;
}

Eigen::MatrixXd MultinomialObjective::probabilities(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd eta = linear_predictors(theta);
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    const double lse = log_sum_exp(eta.row(i));
    eta.row(i) = (eta.row(i).array() - lse).exp();
  }
  return eta;
}

Eigen::VectorXd MultinomialObjective::gradient(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd resid = -probabilities(theta);
  for (Eigen::Index i = 0; i < resid.rows(); ++i) resid(i, y_[i]) += 1.0;
  const Eigen::MatrixXd g = x_.transpose() * resid;  // p x k
  Eigen::VectorXd out(p_ * (k_ - 1));
  Eigen::Index block = 0;
  for (int c = 0; c < k_; ++c) {
    if (c == baseline_) continue;
    out.segment(block * p_, p_) = g.col(c);
    ++block;
  }
  return out;
}

namespace {

// Sum_i w_i x_i x_i' for a weight vector w.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  return x.transpose() * (x.array().colwise() * w.array()).matrix();
}

}  // namespace

Eigen::MatrixXd MultinomialObjective::hessian(const Eigen::VectorXd& theta) const {
  const Eigen::MatrixXd prob = probabilities(theta);
  const Eigen::Index m = p_ * (k_ - 1);
  Eigen::MatrixXd h(m, m);
  std::vector<int> non_base;
  for (int c = 0; c < k_; ++c) {
    if (c != baseline_) non_base.push_back(c);
  }
  for (std::size_t a = 0; a < non_base.size(); ++a) {
    for (std::size_t b = a; b < non_base.size(); ++b) {
      const int ka = non_base[a], kb = non_base[b];
      Eigen::VectorXd w = prob.col(ka).array() * ((ka == kb ? 1.0 : 0.0) - prob.col(kb).array());
      Eigen::MatrixXd block = -weighted_gram(x_, w);
      const auto ia = static_cast<Eigen::Index>(a) * p_, ib = static_cast<Eigen::Index>(b) * p_;
      h.block(ia, ib, p_, p_) = block;
      if (a != b) h.block(ib, ia, p_, p_) = block.transpose();
    }
  }
  return h;
}

Eigen::MatrixXd MultinomialObjective::score_outer_product(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd resid = -probabilities(theta);
  for (Eigen::Index i = 0; i < resid.rows(); ++i) resid(i, y_[i]) += 1.0;
  const Eigen::Index m = p_ * (k_ - 1);
  Eigen::MatrixXd out(m, m);
  std::vector<int> non_base;
  for (int c = 0; c < k_; ++c) {
    if (c != baseline_) non_base.push_back(c);
  }
  for (std::size_t a = 0; a < non_base.size(); ++a) {
    for (std::size_t b = a; b < non_base.size(); ++b) {
      Eigen::VectorXd w = resid.col(non_base[a]).array() * resid.col(non_base[b]).array();
      Eigen::MatrixXd block = weighted_gram(x_, w);
      const auto ia = static_cast<Eigen::Index>(a) * p_, ib = static_cast<Eigen::Index>(b) * p_;
      out.block(ia, ib, p_, p_) = block;
      if (a != b) out.block(ib, ia, p_, p_) = block.transpose();
    }
  }
  return out;
}

const FitResult& MultinomialFit::for_label(int label) const {
  std::size_t k = 0;
  for (int l : labels) {
    if (l == baseline_label) continue;
    if (l == label) return per_class.at(k);
    ++k;
  }
  throw ValidationError("no fitted class " + std::to_string(label));
}

namespace {

// Solves A d = g for symmetric A that should be positive definite. Falls
// back to a ridge-regularized system, then to steepest ascent.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& a, const Eigen::VectorXd& g, bool ridge_fallback,
                                 double ridge) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(g);
  if (ridge_fallback) {
    const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    for (double lambda = ridge; lambda <= 1e4; lambda *= 100) {
      Eigen::MatrixXd reg = a;
      reg.diagonal().array() += lambda * scale;
      Eigen::LLT<Eigen::MatrixXd> r(reg);
      if (r.info() == Eigen::Success) return r.solve(g);
    }
  }
  return g;
}

}  // namespace

MultinomialFit fit_multinomial_logit(const DesignMatrix& design, const MultinomialOptions& opts) {
  design.validate();
  const auto n = static_cast<Eigen::Index>(design.rows());
  if (n == 0) throw ValidationError("cannot fit a multinomial logit on zero observations");

  std::map<int, std::size_t> counts;
  std::vector<int> raw_labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = design.y(i);
    if (std::floor(v) != v || v < 0 || v > 1000) {
      throw ValidationError("multinomial response must hold non-negative integer class labels");
    }
    raw_labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
    ++counts[static_cast<int>(v)];
  }
  std::vector<int> labels = opts.labels;
  if (labels.empty()) {
    for (const auto& [l, c] : counts) labels.push_back(l);
  } else {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (const auto& [l, c] : counts) {
      if (!std::binary_search(labels.begin(), labels.end(), l)) {
        throw ValidationError("observed class " + std::to_string(l) + " is not among the modelled labels");
      }
    }
  }
  if (!std::binary_search(labels.begin(), labels.end(), opts.baseline_label)) {
    throw ValidationError("baseline class " + std::to_string(opts.baseline_label) + " is not among the labels");
  }
  for (int l : labels) {
    if (!counts.count(l)) {
      throw SeparationError("class " + std::to_string(l) +
                                " has no observations; its likelihood is unbounded (separation)",
                            l);
    }
  }
  if (labels.size() < 2) throw ValidationError("multinomial logit needs at least two classes present");

  std::map<int, int> index_of;
  for (std::size_t i = 0; i < labels.size(); ++i) index_of[labels[i]] = static_cast<int>(i);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = index_of[raw_labels[i]];
  const int k = static_cast<int>(labels.size());
  const int baseline = index_of[opts.baseline_label];

  // Intercept first, then regressors that survive the collinearity check.
  Eigen::MatrixXd full(n, design.x.cols() + 1);
  full.col(0).setOnes();
  full.rightCols(design.x.cols()) = design.x;
  auto keep = independent_columns(full);
  if (keep.empty() || keep.front() != 0) throw ValidationError("intercept column is degenerate");
  MultinomialFit fit;
  fit.labels = labels;
  fit.baseline_label = opts.baseline_label;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.regressors.push_back("_cons");
  {
    std::size_t next = 1;
    for (std::size_t j = 1; j < static_cast<std::size_t>(full.cols()); ++j) {
      if (next < keep.size() && keep[next] == j) {
        fit.regressors.push_back(design.columns[j - 1]);
        ++next;
      } else {
        fit.dropped.push_back(design.columns[j - 1]);
      }
    }
  }
  if (!fit.dropped.empty() && !opts.drop_collinear) {
    std::string msg = "design is rank deficient; collinear columns:";
    for (const auto& d : fit.dropped) msg += " " + d;
    throw IdentificationError(msg, fit.dropped);
  }
  Eigen::MatrixXd xk(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) xk.col(static_cast<Eigen::Index>(j)) = full.col(static_cast<Eigen::Index>(keep[j]));

  MultinomialObjective objective(xk, y, k, baseline);
  const Eigen::Index p = xk.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p * (k - 1));
  double ll = objective.value(theta);
  fit.log_likelihood_trace.push_back(ll);

  auto check_separation = [&](const Eigen::VectorXd& th) {
    const Eigen::MatrixXd eta = objective.linear_predictors(th);
    for (int c = 0; c < k; ++c) {
      if (c == baseline) continue;
      if (eta.col(c).cwiseAbs().maxCoeff() > opts.separation_bound) {
        throw SeparationError("class " + std::to_string(labels[static_cast<std::size_t>(c)]) +
                                  " is separated from the baseline; the likelihood is unbounded",
                              labels[static_cast<std::size_t>(c)]);
      }
    }
  };

  const double dn = static_cast<double>(n);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Eigen::VectorXd g = objective.gradient(theta);
    if (g.cwiseAbs().maxCoeff() / dn < opts.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    Eigen::VectorXd d = newton_direction(-objective.hessian(theta), g, opts.ridge_fallback, opts.ridge);
    double slope = g.dot(d);
    if (!(slope > 0)) {
      d = g;
      slope = g.dot(g);
    }
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double cand_ll = ll;
    while (step > 1e-12) {
      candidate = theta + step * d;
      cand_ll = objective.value(candidate);
      if (std::isfinite(cand_ll) && cand_ll >= ll + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Rounding noise dominates the remaining improvement.
      fit.converged = g.cwiseAbs().maxCoeff() / dn < std::sqrt(opts.gradient_tolerance);
      break;
    }
    theta = candidate;
    ll = cand_ll;
    fit.log_likelihood_trace.push_back(ll);
    check_separation(theta);
  }
  fit.iterations = it;
  if (!fit.converged) check_separation(theta);
  fit.log_likelihood = ll;

  const Eigen::MatrixXd info = -objective.hessian(theta);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  Eigen::MatrixXd bread = ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
  Eigen::MatrixXd vcov = bread;
  if (opts.vce != Vce::Classical) {
    vcov = bread * objective.score_outer_product(theta) * bread;
    if (opts.vce == Vce::HC1) {
      const double dof = dn - static_cast<double>(theta.size());
      if (dof > 0) vcov *= dn / dof;
    }
  }
  vcov = 0.5 * (vcov + vcov.transpose());

  fit.beta = Eigen::MatrixXd::Zero(p, k);
  Eigen::Index block = 0;
  for (int c = 0; c < k; ++c) {
    if (c == baseline) continue;
    fit.beta.col(c) = theta.segment(block * p, p);
    FitResult r;
    r.names = fit.regressors;
    r.coef = theta.segment(block * p, p);
    r.vcov = vcov.block(block * p, block * p, p, p);
    r.se = r.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
    r.log_likelihood = ll;
    r.n_obs = fit.n_obs;
    r.converged = fit.converged;
    r.iterations = fit.iterations;
    r.dropped = fit.dropped;
    fit.per_class.push_back(std::move(r));
    ++block;
  }
  return fit;
}

std::vector<double> predict_class_probs(const MultinomialFit& fit,
                                        const std::vector<std::pair<std::string, double>>& covariates) {
  const auto p = static_cast<Eigen::Index>(fit.regressors.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  x(0) = 1.0;
  std::vector<char> supplied(fit.regressors.size(), 0);
  supplied[0] = 1;
  for (const auto& [name, value] : covariates) {
    auto it = std::find(fit.regressors.begin(), fit.regressors.end(), name);
    if (it == fit.regressors.end() || name == "_cons") {
      if (std::find(fit.dropped.begin(), fit.dropped.end(), name) != fit.dropped.end()) continue;
      throw ValidationError("covariate '" + name + "' is not a regressor of the fitted model");
    }
    auto j = static_cast<std::size_t>(it - fit.regressors.begin());
    if (supplied[j]) throw ValidationError("covariate '" + name + "' supplied twice");
    supplied[j] = 1;
    x(static_cast<Eigen::Index>(j)) = value;
  }
  for (std::size_t j = 0; j < supplied.size(); ++j) {
    if (!supplied[j]) throw ValidationError("missing covariate '" + fit.regressors[j] + "'");
  }
  Eigen::VectorXd eta = fit.beta.transpose() * x;
  Eigen::VectorXd prob = softmax(eta);
  return {prob.data(), prob.data() + prob.size()};
}

// ---------------------------------------------------------------------------

std::size_t absorbed_parameters(const std::vector<const FixedEffect*>& effects) {
  if (effects.empty()) return 0;
  if (effects.size() == 1) return static_cast<std::size_t>(effects[0]->groups);
  std::size_t total = 0;
  for (const auto* fe : effects) total += static_cast<std::size_t>(fe->groups);
  if (effects.size() > 2) return total - (effects.size() - 1);

  // Two effects: one redundant level per connected component of the
  // bipartite group graph.
  const auto& a = *effects[0];
  const auto& b = *effects[1];
  std::vector<int> parent(static_cast<std::size_t>(a.groups + b.groups));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (std::size_t i = 0; i < a.group.size(); ++i) {
    int u = find(a.group[i]);
    int v = find(a.groups + b.group[i]);
    if (u != v) parent[static_cast<std::size_t>(u)] = v;
  }
  std::set<int> roots;
  for (int v = 0; v < a.groups + b.groups; ++v) roots.insert(find(v));
  return total - roots.size();
}

int demean(Eigen::MatrixXd& m, const std::vector<const FixedEffect*>& effects, double tolerance,
           int max_iterations) {
  if (effects.empty()) return 0;
  Eigen::VectorXd scale = m.cwiseAbs().colwise().maxCoeff().transpose().cwiseMax(1.0);
  for (int sweep = 1; sweep <= max_iterations; ++sweep) {
    double change = 0;
    for (const auto* fe : effects) {
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(fe->groups, m.cols());
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(fe->groups);
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        sums.row(fe->group[static_cast<std::size_t>(i)]) += m.row(i);
        counts(fe->group[static_cast<std::size_t>(i)]) += 1.0;
      }
      for (Eigen::Index g = 0; g < fe->groups; ++g) {
        if (counts(g) > 0) sums.row(g) /= counts(g);
      }
      for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) -= sums.row(fe->group[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        change = std::max(change, sums.col(j).cwiseAbs().maxCoeff() / scale(j));
      }
    }
    if (effects.size() == 1 || change < tolerance) return sweep;
  }
  throw Error("fixed-effect demeaning did not converge in " + std::to_string(max_iterations) + " sweeps");
}

FitResult fit_ols_fe(const DesignMatrix& design, const OlsOptions& opts) {
  design.validate();
  const auto n = static_cast<Eigen::Index>(design.rows());
  if (n == 0) throw ValidationError("cannot fit OLS on zero observations");

  std::vector<const FixedEffect*> effects;
  for (const auto& name : opts.fixed_effects) {
    auto it = std::find_if(design.fixed_effects.begin(), design.fixed_effects.end(),
                           [&](const FixedEffect& fe) { return fe.name == name; });
    if (it == design.fixed_effects.end()) throw ValidationError("unknown fixed effect '" + name + "'");
    effects.push_back(&*it);
  }

  Eigen::MatrixXd xw;
  Eigen::VectorXd yw;
  std::vector<std::string> names;
  int sweeps = 0;
  if (effects.empty()) {
    xw.resize(n, design.x.cols() + 1);
    xw.col(0).setOnes();
    xw.rightCols(design.x.cols()) = design.x;
    yw = design.y;
    names.push_back("_cons");
    names.insert(names.end(), design.columns.begin(), design.columns.end());
  } else {
    Eigen::MatrixXd m(n, design.x.cols() + 1);
    m.col(0) = design.y;
    m.rightCols(design.x.cols()) = design.x;
    sweeps = demean(m, effects, opts.demean_tolerance, opts.max_demean_iterations);
    yw = m.col(0);
    xw = m.rightCols(design.x.cols());
    names = design.columns;
    std::vector<std::string> absorbed;
    for (Eigen::Index j = 0; j < xw.cols(); ++j) {
      const double raw = std::max(1.0, design.x.col(j).cwiseAbs().maxCoeff());
      if (xw.col(j).cwiseAbs().maxCoeff() <= 1e-8 * raw) absorbed.push_back(design.columns[static_cast<std::size_t>(j)]);
    }
    if (!absorbed.empty()) {
      std::string msg = "regressor(s) constant within every fixed-effect group cannot be identified:";
      for (const auto& a : absorbed) msg += " " + a;
      throw IdentificationError(msg, absorbed);
    }
  }

  auto keep = independent_columns(xw);
  FitResult r;
  for (std::size_t j = 0, next = 0; j < names.size(); ++j) {
    if (next < keep.size() && keep[next] == j) {
      r.names.push_back(names[j]);
      ++next;
    } else {
      r.dropped.push_back(names[j]);
    }
  }
  if (!r.dropped.empty() && !opts.drop_collinear) {
    std::string msg = "design is rank deficient; collinear columns:";
    for (const auto& d : r.dropped) msg += " " + d;
    throw IdentificationError(msg, r.dropped);
  }
  if (keep.empty()) throw IdentificationError("no identifiable regressors", names);

  const auto k = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd xk(n, k);
  for (Eigen::Index j = 0; j < k; ++j) xk.col(j) = xw.col(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(j)]));

  r.coef = xk.householderQr().solve(yw);
  const Eigen::VectorXd resid = yw - xk * r.coef;
  const double ssr = resid.squaredNorm();
  const double absorbed = static_cast<double>(absorbed_parameters(effects));
  const double dn = static_cast<double>(n);
  const double dof = dn - static_cast<double>(k) - absorbed;
  if (dof <= 0) throw ValidationError("no residual degrees of freedom left after absorbing fixed effects");

  const Eigen::MatrixXd gram = xk.transpose() * xk;
  const Eigen::MatrixXd bread = gram.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  switch (opts.vce) {
    case Vce::Classical: r.vcov = bread * (ssr / dof); break;
    case Vce::HC0:
    case Vce::HC1: {
      const Eigen::VectorXd w = resid.array().square();
      r.vcov = bread * weighted_gram(xk, w) * bread;
      if (opts.vce == Vce::HC1) r.vcov *= dn / dof;
      break;
    }
  }
  r.vcov = 0.5 * (r.vcov + r.vcov.transpose());
  r.se = r.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();

  const double mean_y = design.y.mean();
  const double tss = (design.y.array() - mean_y).square().sum();
  r.r_squared = tss > 0 ? 1.0 - ssr / tss : 0.0;
  const double tss_w = effects.empty() ? tss : yw.squaredNorm();
  r.within_r_squared = tss_w > 0 ? 1.0 - ssr / tss_w : 0.0;
  r.n_obs = static_cast<std::size_t>(n);
  r.iterations = sweeps;
  return r;
}

// ---------------------------------------------------------------------------

std::optional<TableLayout> parse_layout(std::string_view s) {
  auto key = ascii_lower(trim(s));
  if (key == "table5") return TableLayout::Table5;
  if (key == "table6") return TableLayout::Table6;
  if (key == "table7") return TableLayout::Table7;
  return std::nullopt;
}

std::string format_table5_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string format_sig3(double v) {
  if (!std::isfinite(v)) return "NA";
  int decimals = 3;
  if (v != 0) decimals = std::max(3, 2 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
  return io::format_fixed(v, std::min(decimals, 10));
}

namespace {

std::string pad(const std::string& s, std::size_t width, bool left_align) {
  if (s.size() >= width) return s;
  return left_align ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

std::string with_commas(std::size_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

RenderedTable coefficient_table(const std::vector<TableColumn>& columns, TableLayout layout) {
  auto fmt = layout == TableLayout::Table5 ? format_table5_number : format_sig3;

  std::vector<std::string> rows;
  for (const auto& c : columns) {
    for (const auto& n : c.fit->names) {
      if (n != "_cons" && std::find(rows.begin(), rows.end(), n) == rows.end()) rows.push_back(n);
    }
  }

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"Variables"};
  for (const auto& c : columns) header.push_back(c.title);
  grid.push_back(header);
  for (const auto& name : rows) {
    std::vector<std::string> coef_row = {name};
    std::vector<std::string> se_row = {""};
    for (const auto& c : columns) {
      auto i = c.fit->index_of(name);
      if (!i) {
        coef_row.emplace_back("");
        se_row.emplace_back("");
        continue;
      }
      const double b = c.fit->coef(static_cast<Eigen::Index>(*i));
      const double s = c.fit->se(static_cast<Eigen::Index>(*i));
      coef_row.push_back(fmt(b) + significance_stars(b, s));
      se_row.push_back("(" + fmt(s) + ")");
    }
    grid.push_back(coef_row);
    grid.push_back(se_row);
  }
  if (layout == TableLayout::Table5) {
    std::vector<std::string> obs = {"Obs."};
    for (const auto& c : columns) obs.push_back(with_commas(c.fit->n_obs));
    grid.push_back(obs);
  } else {
    std::vector<std::string> r2 = {"R-squared"};
    std::vector<std::string> nobs = {"N"};
    for (const auto& c : columns) {
      r2.push_back(c.fit->r_squared ? io::format_fixed(*c.fit->r_squared, 3) : "");
      nobs.push_back(std::to_string(c.fit->n_obs));
    }
    grid.push_back(r2);
    grid.push_back(nobs);
  }

  RenderedTable out;
  for (const auto& row : grid) out.csv += io::csv_line(row);

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : grid) {
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  }
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  const std::string rule(total, '=');
  out.text += rule + "\n";
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::string line;
    for (std::size_t j = 0; j < grid[r].size(); ++j) {
      line += pad(grid[r][j], width[j], j == 0) + "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out.text += line + "\n";
    if (r == 0 || r + (layout == TableLayout::Table5 ? 1 : 2) == grid.size()) out.text += std::string(total, '-') + "\n";
  }
  out.text += rule + "\n";
  out.text += "Standard errors in parentheses (" + std::string("robust") +
              "). * p<=0.10, ** p<=0.05, *** p<=0.01 (two-sided normal test).\n";
  return out;
}

RenderedTable coefficient_table(const MultinomialFit& fit) {
  std::vector<TableColumn> cols;
  std::size_t k = 0;
  for (int l : fit.labels) {
    if (l == fit.baseline_label) continue;
    cols.push_back({"Version " + std::to_string(l), &fit.per_class[k++]});
  }
  return coefficient_table(cols, TableLayout::Table5);
}

}  // namespace stylelens::econ
