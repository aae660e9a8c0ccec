#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "app.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "stylelens/corpus.hpp"
#include "stylelens/detector.hpp"
#include "stylelens/econometrics.hpp"
#include "stylelens/io.hpp"
#include "stylelens/rules.hpp"
#include "stylelens/similarity.hpp"
#include "stylelens/synth.hpp"

namespace fs = std::filesystem;
using namespace stylelens;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

struct Criterion {
  int number;
  std::string name;
  double limit_seconds;  // 0 = untimed
  std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const text::LexiconSet& lex() { return text::LexiconSet::builtin(); }

// 1 ------------------------------------------------------------------------

Outcome known_rule_values() {
  Outcome o;
  const auto arts = corpus::load_corpus(STYLELENS_FIXTURES "/table3.jsonl", corpus::Format::Jsonl);
  const auto rows = rules::measure_corpus(arts, lex());
  const double expected[] = {194, 173, 172, 163, 162, 172};
  std::string got;
  for (std::size_t i = 0; i < std::size(expected); ++i) {
    const double v = rows.at(i).values.rule1a;
    got += (i ? "/" : "") + fmt(v);
    o.check(std::abs(v - expected[i]) <= 2, rows[i].id + " rule1a=" + fmt(v) + " expected " + fmt(expected[i]));
  }
  if (o.ok) o.detail = "rule1a " + got;
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome econometrics_oracles() {
  Outcome o;
  oracle::Gen g(20221130);
  double worst_coef = 0, worst_grad = 0;
  int panels = 0;
  while (panels < 120) {
    econ::DesignMatrix d;
    const int n = g.integer(12, 50), k = g.integer(1, 3), effects = g.integer(1, 2);
    d.x.resize(n, k);
    d.y.resize(n);
    for (int j = 0; j < k; ++j) d.columns.push_back("x" + std::to_string(j));
    econ::OlsOptions opts;
    for (int e = 0; e < effects; ++e) {
      const int groups = g.integer(2, 6);
      std::vector<std::string> keys;
      for (int i = 0; i < n; ++i) keys.push_back(std::to_string(i < groups ? i : g.integer(0, groups - 1)));
      d.fixed_effects.push_back(econ::FixedEffect::from_keys("fe" + std::to_string(e), keys));
      opts.fixed_effects.push_back("fe" + std::to_string(e));
    }
    for (int i = 0; i < n; ++i) {
      double shift = 0;
      for (const auto& f : d.fixed_effects) shift += 0.8 * f.group[static_cast<std::size_t>(i)];
      for (int j = 0; j < k; ++j) d.x(i, j) = g.normal() + 0.4 * shift;
      d.y(i) = shift + 0.5 * d.x.row(i).sum() + g.normal();
    }
    econ::FitResult fit;
    try {
      fit = econ::fit_ols_fe(d, opts);
    } catch (const econ::IdentificationError&) {
      continue;
    }
    const auto ref = oracle::lsdv_coefficients(d);
    for (int j = 0; j < k; ++j) worst_coef = std::max(worst_coef, std::abs(fit.coefficient("x" + std::to_string(j)) - ref(j)));
    ++panels;
  }
  o.check(worst_coef <= 1e-8, "within vs LSDV max diff " + fmt(worst_coef));

  const int n = 50, p = 3, classes = 4;
  Eigen::MatrixXd x(n, p);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1;
    x(i, 1) = g.normal();
    x(i, 2) = g.uniform(-2, 2);
    y[static_cast<std::size_t>(i)] = i < classes ? i : g.integer(0, classes - 1);
  }
  econ::MultinomialObjective obj(x, y, classes, 0);
  auto f = [&](const Eigen::VectorXd& th) { return oracle::multinomial_loglik(x, y, classes, 0, th); };
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(obj.parameters()));
    for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = g.uniform(-1.5, 1.5);
    const auto fd = oracle::central_gradient(f, theta, 1e-5);
    const auto an = obj.gradient(theta);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      worst_grad = std::max(worst_grad, std::abs(an(j) - fd(j)) / std::max(1.0, std::abs(fd(j))));
    }
  }
  o.check(worst_grad <= 1e-6, "gradient vs finite differences max rel diff " + fmt(worst_grad));
  if (o.ok) {
    o.detail = std::to_string(panels) + " panels, max coef diff " + fmt(worst_coef, 3) + "; 20 points, max grad rel diff " +
               fmt(worst_grad, 3);
  }
  return o;
}

// 3 ------------------------------------------------------------------------

Outcome logit_recovery() {
  Outcome o;
  oracle::Gen g(7);
  const int n = 20000;
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = g.normal();
    x(i, 1) = g.uniform(-1, 1);
  }
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(3, 3);
  beta.col(1) << 0.3, 0.8, -0.5;
  beta.col(2) << -0.4, -0.6, 1.0;
  const auto y = oracle::simulate_multinomial(x, beta, 11);
  econ::DesignMatrix d;
  d.columns = {"x1", "x2"};
  d.x = x;
  d.y.resize(n);
  for (int i = 0; i < n; ++i) d.y(i) = y[static_cast<std::size_t>(i)];
  const auto fit = econ::fit_multinomial_logit(d);
  o.check(fit.converged, "logit did not converge");
  const char* names[] = {"_cons", "x1", "x2"};
  double worst = 0;
  for (int c = 1; c <= 2; ++c) {
    for (int r = 0; r < 3; ++r) worst = std::max(worst, std::abs(fit.for_label(c).coefficient(names[r]) - beta(r, c)));
  }
  o.check(worst <= 0.05, "max coefficient error " + fmt(worst));

  econ::DesignMatrix d0;
  d0.x.resize(n, 0);
  d0.y = d.y;
  const auto fit0 = econ::fit_multinomial_logit(d0);
  const auto probs = econ::predict_class_probs(fit0, {});
  double worst_share = 0;
  for (int c = 0; c < 3; ++c) {
    const double share = static_cast<double>(std::count(y.begin(), y.end(), c)) / n;
    worst_share = std::max(worst_share, std::abs(probs[static_cast<std::size_t>(c)] - share));
  }
  o.check(worst_share <= 1e-6, "intercept-only share error " + fmt(worst_share));
  if (o.ok) o.detail = "max coef error " + fmt(worst, 3) + ", max share error " + fmt(worst_share, 3);
  return o;
}

// 4 ------------------------------------------------------------------------

Outcome detector_protocol() {
  Outcome o;
  synth::StyleOptions so;
  const double bayes = oracle::two_style_bayes_accuracy(so);
  const auto arts = synth::style_corpus(so, {0, 1});
  const auto split = detector::temporal_split(arts, detector::SplitDates{});
  detector::TrainOptions opts;
  opts.scope = detector::Scope{std::nullopt, 1};
  const auto det = detector::crossval_train(split.train, opts, lex());
  detector::Scorer scorer(det, lex());
  const auto r = detector::evaluate(scorer, split.test);
  o.check(r.accuracy > 0.95, "test accuracy " + fmt(r.accuracy));
  const double f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0;
  o.check(std::abs(r.f1 - f1) <= 1e-9, "F1 identity off by " + fmt(std::abs(r.f1 - f1)));
  for (const auto& row : r.confusion) {
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    o.check(std::abs(sum - 100) <= 0.01, "confusion row sums to " + fmt(sum));
  }
  const auto text = detector::confusion_text(r);
  o.check(std::regex_search(text, std::regex("\\b\\d{1,3}\\.\\d{2}%")), "confusion text lacks NN.NN% cells");
  o.check(detector::format_percent(92.25) == "92.25%", "format_percent(92.25) = " + detector::format_percent(92.25));
  if (o.ok) {
    o.detail = "Bayes " + fmt(bayes, 4) + ", test accuracy " + fmt(r.accuracy, 4) + " on " +
               std::to_string(split.test.size()) + " held-out texts";
  }
  return o;
}

// 5 ------------------------------------------------------------------------

Outcome metric_arithmetic() {
  Outcome o;
  const auto r = detector::metrics_from_counts({9, 1, 3, 7});
  o.check(std::abs(r.precision - 0.9) <= 1e-12, "precision " + fmt(r.precision));
  o.check(std::abs(r.recall - 0.75) <= 1e-12, "recall " + fmt(r.recall));
  o.check(std::abs(r.accuracy - 0.8) <= 1e-12, "accuracy " + fmt(r.accuracy));
  o.check(std::abs(r.f1 - 0.8182) <= 1e-4, "f1 " + fmt(r.f1));
  if (o.ok) o.detail = "P=" + fmt(r.precision) + " R=" + fmt(r.recall) + " A=" + fmt(r.accuracy) + " F1=" + fmt(r.f1, 5);
  return o;
}

// 6 ------------------------------------------------------------------------

similarity::TermVector random_vector(oracle::Gen& g) {
  std::vector<similarity::TermVector::Entry> w;
  const int n = g.integer(1, 15);
  for (int i = 0; i < n; ++i) w.emplace_back(static_cast<std::uint32_t>(g.integer(0, 40)), g.uniform(0.1, 5));
  return similarity::TermVector::from_weights(std::move(w));
}

similarity::ConvergenceSeries make_series(const std::vector<double>& v, Month start) {
  similarity::ConvergenceSeries s;
  for (double x : v) {
    s.points.push_back({start, x, 1, 1});
    start = start.next();
  }
  return s;
}

Outcome similarity_suite() {
  Outcome o;
  using similarity::cosine;
  using similarity::TermVector;
  oracle::Gen g(99);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_vector(g), b = random_vector(g);
    worst = std::max({worst, std::abs(cosine(a, a) - 1.0), std::abs(cosine(a, b) - cosine(b, a))});
    std::vector<TermVector::Entry> shifted;
    for (const auto& [i, v] : b.entries()) shifted.emplace_back(i + 1000, v);
    worst = std::max(worst, std::abs(cosine(a, TermVector::from_weights(shifted))));
    const auto c1 = similarity::group_centroid(std::vector<TermVector>{a});
    const auto c2 = similarity::group_centroid(std::vector<TermVector>{a, a, a});
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
      worst = std::max({worst, std::abs(c1.entries()[i].second - a.entries()[i].second),
                        std::abs(c2.entries()[i].second - a.entries()[i].second)});
    }
  }
  o.check(worst <= 1e-12, "identity/orthogonality/symmetry/idempotence off by " + fmt(worst));
  const double half = cosine(TermVector::from_weights({{0, 1}, {1, 1}}), TermVector::from_weights({{0, 1}}));
  o.check(std::abs(half - 0.7071) <= 1e-4, "{a:1,b:1}.{a:1} = " + fmt(half));

  std::vector<double> treated, control;
  for (int i = 0; i < 24; ++i) {
    control.push_back(0.4 + 0.01 * g.normal());
    treated.push_back(0.4 + 0.01 * g.normal() + (i >= 12 ? 0.1 : 0.0));
  }
  const auto did = similarity::did_statistic(make_series(treated, Month(2021, 11)), make_series(control, Month(2021, 11)),
                                             Month(2022, 11));
  o.check(std::abs(did.did - 0.1) <= 0.01, "DiD " + fmt(did.did));
  o.check(did.ci_low <= 0.1 && 0.1 <= did.ci_high, "CI [" + fmt(did.ci_low) + ", " + fmt(did.ci_high) + "] misses 0.1");
  std::vector<double> step(10, 0.5), flat(10, 0.5);
  for (int i = 5; i < 10; ++i) step[static_cast<std::size_t>(i)] += 0.1;
  const auto exact = similarity::did_statistic(make_series(step, Month(2022, 6)), make_series(flat, Month(2022, 6)),
                                               Month(2022, 11));
  o.check(std::abs(exact.did - 0.1) <= 1e-12, "noiseless DiD " + fmt(exact.did));
  o.check(exact.ci_low <= 0.1 + 1e-12 && 0.1 - 1e-12 <= exact.ci_high, "noiseless CI misses 0.1");
  if (o.ok) {
    o.detail = "cos=" + fmt(half, 5) + ", DiD " + fmt(did.did, 4) + " CI [" + fmt(did.ci_low, 4) + ", " +
               fmt(did.ci_high, 4) + "]";
  }
  return o;
}

// 7 ------------------------------------------------------------------------

Outcome adoption_recovery() {
  Outcome o;
  synth::StyleOptions train_style;
  train_style.seed = 4242;
  train_style.docs_per_label = 400;
  detector::TrainOptions opts;
  opts.scope = detector::Scope{std::nullopt, 1};
  const auto det = detector::crossval_train(synth::style_corpus(train_style, {0, 1}), opts, lex());
  detector::Scorer scorer(det, lex());

  synth::AdoptionOptions ao;
  const auto arts = synth::adoption_corpus(ao);
  const std::vector<detector::AdoptionGroup> groups = {{"A", similarity::GroupFilter::parse("field=CS")},
                                                       {"B", similarity::GroupFilter::parse("field=Maths")}};
  const auto predicted = detector::adoption_series(arts, detector::predict_adopters(scorer, arts), groups, ao.event);
  const auto labelled = detector::adoption_series(arts, detector::label_adopters(arts), groups, ao.event);

  double worst_pre = 0;
  for (const auto* set : {&predicted, &labelled}) {
    for (const auto& s : *set) {
      double sum = 0;
      int n = 0;
      for (const auto& p : s.points) {
        if (p.month < ao.event && p.adjusted_pct) {
          sum += *p.adjusted_pct;
          ++n;
        }
      }
      worst_pre = std::max(worst_pre, std::abs(sum / n));
    }
  }
  o.check(worst_pre <= 1e-9, "pre-event mean " + fmt(worst_pre));

  auto post_mean = [&](const detector::AdoptionSeries& s) {
    double sum = 0;
    int n = 0;
    for (const auto& p : s.points) {
      if (ao.event <= p.month && p.adjusted_pct) {
        sum += *p.adjusted_pct;
        ++n;
      }
    }
    return sum / n;
  };
  const double a = post_mean(predicted[0]), b = post_mean(predicted[1]);
  o.check(std::abs(a - 15.0) <= 1.0, "group A post-event adjusted " + fmt(a));
  o.check(std::abs(b) <= 1.0, "group B post-event adjusted " + fmt(b));
  o.check(std::abs(post_mean(labelled[0]) - 15.0) <= 1e-9, "label-based A " + fmt(post_mean(labelled[0])));
  if (o.ok) {
    o.detail = "post-event A " + fmt(a, 4) + " (15 injected), B " + fmt(b, 3) + ", max |pre mean| " + fmt(worst_pre, 2);
  }
  return o;
}

// 8 ------------------------------------------------------------------------

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"stylelens"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string kept;
    for (const auto& line : split(io::read_file(e.path()), '\n')) {
      if (line.find("timestamp=") == std::string_view::npos) kept += std::string(line) + "\n";
    }
    files[e.path().filename().string()] = kept;
  }
  return files;
}

Outcome cli_determinism() {
  Outcome o;
  const auto dir = fs::temp_directory_path() / "stylelens_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };
  io::write_file_atomic(dir / "ols.model", "model=ols\nresponse=rule1a,rule2\nregressors=rev_1\nfe=month\n");
  const std::vector<std::string> base = {"--out", dir.string(), "--seed", "5"};
  const std::vector<std::vector<std::string>> commands = {
      {"synth", "--kind", "two-style", "--docs", "40", "--name", "style.jsonl"},
      {"synth", "--kind", "overlap", "--docs", "6", "--name", "overlap.jsonl"},
      {"synth", "--kind", "adoption", "--docs", "20", "--name", "adoption.jsonl"},
      {"ingest", "--corpus", p("style.jsonl")},
      {"rules", "--corpus", p("style.jsonl")},
      {"similarity", "--corpus", p("overlap.jsonl"), "--group-a", "field=CS", "--group-b", "field=Maths", "--name", "sim_a"},
      {"similarity", "--corpus", p("overlap.jsonl"), "--group-a", "field=Maths", "--group-b", "field=Maths", "--idf",
       "--name", "sim_b"},
      {"series", "--treated", p("sim_a.csv"), "--control", p("sim_b.csv"), "--resamples", "200"},
      {"regress", "--model", p("ols.model"), "--corpus", p("style.jsonl")},
      {"train", "--corpus", p("style.jsonl"), "--field", "CS", "--prompt", "1", "--hash-dims", "4096", "--max-epochs",
       "30"},
      {"eval", "--corpus", p("style.jsonl"), "--model", p("detector_cs_p1.model")},
      {"adopt", "--corpus", p("adoption.jsonl"), "--model", p("detector_cs_p1.model"), "--group", "A:field=CS",
       "--group", "B:field=Maths"},
      {"report", "--input", p("adoption.csv"), "--input", p("sim_a.csv")},
  };
  auto run_all = [&](int pass) {
    for (const auto& c : commands) {
      auto args = base;
      args.insert(args.end(), c.begin(), c.end());
      const int code = cli(args);
      o.check(code == 0, "pass " + std::to_string(pass) + ": '" + c.front() + "' exited " + std::to_string(code));
    }
  };
  run_all(1);
  const auto first = snapshot(dir);
  // Second pass starts in a later second.
  std::this_thread::sleep_for(std::chrono::milliseconds(1100));
  run_all(2);
  const auto second = snapshot(dir);
  o.check(first.size() == second.size(), "artifact count changed");
  for (const auto& [name, content] : first) {
    auto it = second.find(name);
    o.check(it != second.end() && it->second == content, name + " differs between runs");
  }
  if (o.ok) o.detail = std::to_string(commands.size()) + " commands, " + std::to_string(first.size()) + " artifacts identical";
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "known texts: rule1a word counts", 1.0, known_rule_values},
      {2, "econometrics oracles: within vs LSDV, analytic vs numeric gradient", 30.0, econometrics_oracles},
      {3, "logit recovery and intercept-only shares", 60.0, logit_recovery},
      {4, "detector protocol on two-style corpus", 120.0, detector_protocol},
      {5, "metric arithmetic", 0.0, metric_arithmetic},
      {6, "similarity suite", 10.0, similarity_suite},
      {7, "adoption adjustment and recovery", 0.0, adoption_recovery},
      {8, "determinism of rerun commands", 0.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      out.ok = false;
      out.detail += " (over the " + fmt(c.limit_seconds) + " s limit)";
    }
    failures += !out.ok;
    std::printf("%s [%d] %s: %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", c.number, c.name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
