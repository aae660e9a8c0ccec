#include "stylelens/detector.hpp"

#include <algorithm>
#include <limits>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "stylelens/io.hpp"
#include "stylelens/rules.hpp"

namespace stylelens::detector {

std::vector<int> Scope::labels() const {
  if (multiclass()) return {0, 1, 2, 3, 4, 5, 6};
  return {0, prompt};
}

bool Scope::covers(const corpus::Article& a) const {
  if (field && a.field != *field) return false;
  return multiclass() || a.revision_label == 0 || a.revision_label == prompt;
}

std::string Scope::to_string() const {
  std::string out = field ? std::string(corpus::to_string(*field)) : "all";
  out += multiclass() ? "/multiclass" : "/prompt" + std::to_string(prompt);
  return out;
}

Scope Scope::parse(std::string_view field, std::string_view prompt) {
  Scope s;
  auto f = ascii_lower(trim(field));
  if (!f.empty() && f != "all") {
    auto parsed = corpus::parse_field(field);
    if (!parsed) throw ValidationError("unknown field '" + std::string(field) + "'");
    s.field = parsed;
  }
  auto p = ascii_lower(trim(prompt));
  if (p.empty() || p == "multiclass" || p == "0") {
    s.prompt = 0;
  } else {
    int v = 0;
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (ec != std::errc() || ptr != p.data() + p.size() || v < 1 || v > corpus::kMaxRevisionLabel) {
      throw ValidationError("prompt must be 1..6 or 'multiclass', got '" + std::string(prompt) + "'");
    }
    s.prompt = v;
  }
  return s;
}

// ---------------------------------------------------------------------------

Split temporal_split(const std::vector<corpus::Article>& articles, const SplitDates& d) {
  if (d.test_end < d.test_start) {
    throw ValidationError("test_end " + d.test_end.to_string() + " is before test_start " + d.test_start.to_string());
  }
  if (d.test_start < d.train_end) {
    throw ValidationError("test window starts before the training cutoff; the partitions would overlap");
  }
  Split s;
  for (const auto& a : articles) {
    if (a.updated < d.train_end) s.train.push_back(a);
    else if (!(a.updated < d.test_start) && !(d.test_end < a.updated)) s.test.push_back(a);
  }
  if (s.train.empty()) throw ValidationError("no articles updated before " + d.train_end.to_string());
  if (s.test.empty()) {
    throw ValidationError("no articles updated between " + d.test_start.to_string() + " and " +
                          d.test_end.to_string());
  }
  return s;
}

std::vector<int> stratified_folds(const std::vector<int>& classes, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("cross-validation needs at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < classes.size(); ++i) by_class[classes[i]].push_back(i);
  for (const auto& [c, idx] : by_class) {
    if (idx.size() < static_cast<std::size_t>(k)) {
      throw ValidationError("stratification failed: class " + std::to_string(c) + " has " +
                            std::to_string(idx.size()) + " examples, fewer than the " + std::to_string(k) +
                            " folds, so some fold would lack it");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<int> fold(classes.size(), 0);
  std::size_t counter = 0;
  for (auto& [c, idx] : by_class) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
    }
    for (auto i : idx) fold[i] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
  }
  return fold;
}

// ---------------------------------------------------------------------------

namespace {

struct Example {
  SparseFeatures f;
  int y = 0;
};

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_sd;
};

Standardizer fit_standardizer(const std::vector<Example>& ex, const std::vector<std::size_t>& idx, std::size_t hash_dim,
                              std::size_t dim) {
  std::vector<double> sum(dim, 0.0), sumsq(dim, 0.0);
  for (auto i : idx) {
    for (const auto& [j, v] : ex[i].f.hashed) {
      sum[j] += v;
      sumsq[j] += v * v;
    }
    for (std::size_t t = 0; t < ex[i].f.dense.size(); ++t) {
      const double v = ex[i].f.dense[t];
      sum[hash_dim + t] += v;
      sumsq[hash_dim + t] += v * v;
    }
  }
  const double n = static_cast<double>(idx.size());
  Standardizer s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (std::size_t j = 0; j < dim; ++j) {
    if (sum[j] == 0 && sumsq[j] == 0) continue;
    const double m = sum[j] / n;
    const double var = sumsq[j] / n - m * m;
    s.mean[j] = m;
    if (var > 1e-12 * std::max(1.0, m * m)) s.inv_sd[j] = 1.0 / std::sqrt(var);
  }
  return s;
}

/// Linear head over standardized features, with the standardization folded
/// into a per-class offset.
struct Head {
  std::size_t k = 0, dim = 0, hash_dim = 0;
  std::vector<double> w, b;

  std::vector<double> offsets(const Standardizer& s) const {
    std::vector<double> off(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double* wc = w.data() + c * dim;
      double acc = 0;
      for (std::size_t j = 0; j < dim; ++j) acc += wc[j] * s.mean[j] * s.inv_sd[j];
      off[c] = acc;
    }
    return off;
  }

  void logits(const SparseFeatures& f, const Standardizer& s, const std::vector<double>& off,
              std::vector<double>& eta) const {
    eta.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) eta[c] = b[c] - off[c];
    for (const auto& [j, v] : f.hashed) {
      const double x = v * s.inv_sd[j];
      if (x == 0) continue;
      for (std::size_t c = 0; c < k; ++c) eta[c] += w[c * dim + j] * x;
    }
    for (std::size_t t = 0; t < f.dense.size(); ++t) {
      const std::size_t j = hash_dim + t;
      const double x = f.dense[t] * s.inv_sd[j];
      if (x == 0) continue;
      for (std::size_t c = 0; c < k; ++c) eta[c] += w[c * dim + j] * x;
    }
  }
};

void softmax_inplace(std::vector<double>& eta) {
  const double m = *std::max_element(eta.begin(), eta.end());
  double z = 0;
  for (auto& e : eta) {
    e = std::exp(e - m);
    z += e;
  }
  for (auto& e : eta) e /= z;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct TrainRun {
  Head head;
  int best_epoch = 0;
  double best_accuracy = 0;
};

struct Score {
  double accuracy = 0;
  double loss = 0;
};

Score score(const Head& h, const std::vector<Example>& ex, const std::vector<std::size_t>& idx,
            const Standardizer& s) {
  const auto off = h.offsets(s);
  std::vector<double> eta;
  std::size_t hits = 0;
  double loss = 0;
  for (auto i : idx) {
    h.logits(ex[i].f, s, off, eta);
    if (static_cast<int>(argmax(eta)) == ex[i].y) ++hits;
    softmax_inplace(eta);
    loss -= std::log(std::max(eta[static_cast<std::size_t>(ex[i].y)], 1e-300));
  }
  if (idx.empty()) return {};
  return {double(hits) / double(idx.size()), loss / double(idx.size())};
}

/// Full-batch Adam on mean cross-entropy plus (l2/2)|w|^2. With a
/// validation set, keeps the best iterate (accuracy, then lower loss on
/// ties) and stops after `patience` epochs without improvement; otherwise
/// runs `max_epochs`.
TrainRun train_head(const std::vector<Example>& ex, const std::vector<std::size_t>& train_idx,
                    const std::vector<std::size_t>& val_idx, std::size_t k, std::size_t hash_dim, std::size_t dim,
                    const Standardizer& s, double l2, double lr, int max_epochs, int patience) {
  Head h{k, dim, hash_dim, std::vector<double>(k * dim, 0.0), std::vector<double>(k, 0.0)};
  std::vector<double> mw(k * dim, 0.0), vw(k * dim, 0.0), mb(k, 0.0), vb(k, 0.0);
  std::vector<double> acc(k * dim, 0.0), resid_sum(k, 0.0);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double n = static_cast<double>(train_idx.size());

  TrainRun run;
  run.head = h;
  run.best_accuracy = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> eta;
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    const auto off = h.offsets(s);
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(resid_sum.begin(), resid_sum.end(), 0.0);
    for (auto i : train_idx) {
      h.logits(ex[i].f, s, off, eta);
      softmax_inplace(eta);
      eta[static_cast<std::size_t>(ex[i].y)] -= 1.0;
      for (std::size_t c = 0; c < k; ++c) resid_sum[c] += eta[c];
      for (const auto& [j, v] : ex[i].f.hashed) {
        for (std::size_t c = 0; c < k; ++c) acc[c * dim + j] += eta[c] * v;
      }
      for (std::size_t t = 0; t < ex[i].f.dense.size(); ++t) {
        for (std::size_t c = 0; c < k; ++c) acc[c * dim + hash_dim + t] += eta[c] * ex[i].f.dense[t];
      }
    }
    const double corr1 = 1.0 - std::pow(beta1, epoch);
    const double corr2 = 1.0 - std::pow(beta2, epoch);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t p = c * dim + j;
        if (s.inv_sd[j] == 0 && h.w[p] == 0) continue;
        const double g = s.inv_sd[j] * (acc[p] - s.mean[j] * resid_sum[c]) / n + l2 * h.w[p];
        mw[p] = beta1 * mw[p] + (1 - beta1) * g;
        vw[p] = beta2 * vw[p] + (1 - beta2) * g * g;
        h.w[p] -= lr * (mw[p] / corr1) / (std::sqrt(vw[p] / corr2) + eps);
      }
      const double g = resid_sum[c] / n;
      mb[c] = beta1 * mb[c] + (1 - beta1) * g;
      vb[c] = beta2 * vb[c] + (1 - beta2) * g * g;
      h.b[c] -= lr * (mb[c] / corr1) / (std::sqrt(vb[c] / corr2) + eps);
    }

    if (val_idx.empty()) continue;
    const auto sc = score(h, ex, val_idx, s);
    if (sc.accuracy > run.best_accuracy || (sc.accuracy == run.best_accuracy && sc.loss < best_loss)) {
      run.best_accuracy = sc.accuracy;
      best_loss = sc.loss;
      run.best_epoch = epoch;
      run.head = h;
    } else if (epoch - run.best_epoch >= patience) {
      break;
    }
  }
  if (val_idx.empty()) {
    run.head = h;
    run.best_epoch = max_epochs;
    run.best_accuracy = score(h, ex, train_idx, s).accuracy;
  }
  return run;
}

std::vector<Example> extract_all(const std::vector<const corpus::Article*>& articles, const std::vector<int>& y,
                                 const FeatureExtractor& fx) {
  std::vector<Example> ex(articles.size());
  io::parallel_for(articles.size(), [&](std::size_t i) {
    ex[i].f = fx.extract(*articles[i]);
    ex[i].y = y[i];
  });
  return ex;
}

}  // namespace

std::vector<double> TrainedDetector::probabilities(const SparseFeatures& f) const {
  const std::size_t dim = dimension();
  Head h{classes(), dim, features.hash_dim, weights, bias};
  Standardizer s{mean, inv_sd};
  std::vector<double> eta;
  h.logits(f, s, h.offsets(s), eta);
  softmax_inplace(eta);
  return eta;
}

TrainedDetector crossval_train(const std::vector<corpus::Article>& train, const TrainOptions& opts,
                               const text::LexiconSet& lexicons, const EmbeddingTable* embeddings) {
  if (opts.l2_grid.empty() || opts.hash_dims.empty()) throw ValidationError("hyperparameter grid is empty");
  if (opts.patience < 1 || opts.max_epochs < 1) throw ValidationError("patience and max_epochs must be positive");

  std::vector<const corpus::Article*> covered;
  for (const auto& a : train) {
    if (opts.scope.covers(a)) covered.push_back(&a);
  }
  std::sort(covered.begin(), covered.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<int> labels;
  {
    std::set<int> present;
    for (auto* a : covered) present.insert(a->revision_label);
    if (opts.scope.multiclass()) {
      labels.assign(present.begin(), present.end());
    } else {
      labels = opts.scope.labels();
      for (int l : labels) {
        if (!present.count(l)) {
          throw ValidationError("scope " + opts.scope.to_string() + " has no training articles with label " +
                                std::to_string(l));
        }
      }
    }
  }
  if (labels.size() < 2) {
    throw ValidationError("scope " + opts.scope.to_string() + " needs at least two labels in the training data");
  }
  std::vector<int> y;
  y.reserve(covered.size());
  for (auto* a : covered) {
    y.push_back(static_cast<int>(std::find(labels.begin(), labels.end(), a->revision_label) - labels.begin()));
  }
  const auto folds = stratified_folds(y, opts.folds, opts.seed);
  const std::size_t k = labels.size();

  std::vector<CvResult> results;
  for (auto dim_h : opts.hash_dims) {
    FeatureConfig fc = opts.features;
    fc.hash_dim = dim_h;
    FeatureExtractor fx(fc, lexicons, embeddings);
    const auto ex = extract_all(covered, y, fx);
    const std::size_t dim = fx.dimension();

    for (double l2 : opts.l2_grid) {
      CvResult r;
      r.l2 = l2;
      r.hash_dim = dim_h;
      r.fold_accuracy.assign(static_cast<std::size_t>(opts.folds), 0.0);
      r.best_epochs.assign(static_cast<std::size_t>(opts.folds), 0);
      io::parallel_for(static_cast<std::size_t>(opts.folds), [&](std::size_t f) {
        std::vector<std::size_t> tr, va;
        for (std::size_t i = 0; i < ex.size(); ++i) (folds[i] == static_cast<int>(f) ? va : tr).push_back(i);
        const auto s = fit_standardizer(ex, tr, dim_h, dim);
        auto run = train_head(ex, tr, va, k, dim_h, dim, s, l2, opts.learning_rate, opts.max_epochs, opts.patience);
        r.fold_accuracy[f] = run.best_accuracy;
        r.best_epochs[f] = run.best_epoch;
      });
      double sum = 0;
      for (double a : r.fold_accuracy) sum += a;
      r.mean_accuracy = sum / static_cast<double>(opts.folds);
      results.push_back(std::move(r));
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].mean_accuracy > results[best].mean_accuracy) best = i;
  }
  const auto& chosen = results[best];
  double epoch_sum = 0;
  for (int e : chosen.best_epochs) epoch_sum += e;
  const int epochs = std::max(1, static_cast<int>(std::lround(epoch_sum / static_cast<double>(opts.folds))));

  TrainedDetector d;
  d.scope = opts.scope;
  d.labels = labels;
  d.features = opts.features;
  d.features.hash_dim = chosen.hash_dim;
  d.l2 = chosen.l2;
  d.epochs = epochs;
  d.cv = results;

  FeatureExtractor fx(d.features, lexicons, embeddings);
  const auto ex = extract_all(covered, y, fx);
  const std::size_t dim = fx.dimension();
  std::vector<std::size_t> all(ex.size());
  std::iota(all.begin(), all.end(), 0);
  const auto s = fit_standardizer(ex, all, d.features.hash_dim, dim);
  auto run = train_head(ex, all, {}, k, d.features.hash_dim, dim, s, d.l2, opts.learning_rate, epochs, opts.patience);
  d.mean = s.mean;
  d.inv_sd = s.inv_sd;
  d.weights = std::move(run.head.w);
  d.bias = std::move(run.head.b);

  std::vector<std::string_view> texts;
  for (auto* a : covered) texts.push_back(a->text);
  d.collisions = count_collisions(fx, texts);

  d.metadata = {{"scope", d.scope.to_string()},
                {"train_articles", std::to_string(covered.size())},
                {"folds", std::to_string(opts.folds)},
                {"patience", std::to_string(opts.patience)},
                {"max_epochs", std::to_string(opts.max_epochs)},
                {"learning_rate", io::format_double(opts.learning_rate)},
                {"seed", std::to_string(opts.seed)},
                {"cv_accuracy", io::format_double(chosen.mean_accuracy)}};
  return d;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kModelMagic = "stylelens-detector 1";

double parse_double_strict(std::string_view s, std::string_view what) {
  s = trim(s);
  if (s == "NA") return std::nan("");
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("model file: bad number '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

long long parse_int_strict(std::string_view s, std::string_view what) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("model file: bad integer '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string save_model(const TrainedDetector& d) {
  std::string out(kModelMagic);
  out += "\n";
  auto kv = [&](std::string_view k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
  kv("field", d.scope.field ? std::string(corpus::to_string(*d.scope.field)) : "all");
  kv("prompt", d.scope.multiclass() ? "multiclass" : std::to_string(d.scope.prompt));
  kv("labels", join_ints(d.labels));
  kv("hash_dim", std::to_string(d.features.hash_dim));
  kv("char_min", std::to_string(d.features.char_min));
  kv("char_max", std::to_string(d.features.char_max));
  kv("token_unigrams", d.features.token_unigrams ? "1" : "0");
  kv("rule_features", d.features.rule_features ? "1" : "0");
  kv("length_features", d.features.length_features ? "1" : "0");
  kv("embedding_dim", std::to_string(d.features.embedding_dim));
  kv("dimension", std::to_string(d.dimension()));
  kv("l2", io::format_double(d.l2));
  kv("epochs", std::to_string(d.epochs));
  kv("distinct_features", std::to_string(d.collisions.distinct_features));
  kv("occupied_buckets", std::to_string(d.collisions.occupied_buckets));
  for (const auto& [k, v] : d.metadata) kv("meta." + k, v);
  for (const auto& r : d.cv) {
    std::string line = io::format_double(r.l2) + ";" + std::to_string(r.hash_dim) + ";" +
                       io::format_double(r.mean_accuracy) + ";";
    for (std::size_t i = 0; i < r.fold_accuracy.size(); ++i) {
      line += (i ? "," : "") + io::format_double(r.fold_accuracy[i]);
    }
    line += ";" + join_ints(r.best_epochs);
    kv("cv", line);
  }
  out += "[bias]\n";
  for (std::size_t c = 0; c < d.bias.size(); ++c) out += std::to_string(c) + " " + io::format_double(d.bias[c]) + "\n";
  out += "[standardization]\n";
  for (std::size_t j = 0; j < d.mean.size(); ++j) {
    if (d.mean[j] == 0 && d.inv_sd[j] == 0) continue;
    out += std::to_string(j) + " " + io::format_double(d.mean[j]) + " " + io::format_double(d.inv_sd[j]) + "\n";
  }
  out += "[weights]\n";
  const std::size_t dim = d.dimension();
  for (std::size_t c = 0; c < d.classes(); ++c) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double w = d.weights[c * dim + j];
      if (w != 0) out += std::to_string(c) + " " + std::to_string(j) + " " + io::format_double(w) + "\n";
    }
  }
  out += "[end]\n";
  return out;
}

TrainedDetector load_model(std::string_view content) {
  auto lines = split(content, '\n');
  if (lines.empty() || trim(lines[0]) != kModelMagic) throw ValidationError("not a detector model file");
  TrainedDetector d;
  std::string section;
  std::size_t dim = 0;
  std::string field = "all", prompt = "multiclass";
  bool ended = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto line = trim(lines[li]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = std::string(line);
      if (section == "[bias]") {
        d.scope = Scope::parse(field, prompt);
        if (d.labels.size() < 2 || dim == 0) throw ValidationError("model file: header incomplete");
        d.bias.assign(d.labels.size(), 0.0);
        d.mean.assign(dim, 0.0);
        d.inv_sd.assign(dim, 0.0);
        d.weights.assign(d.labels.size() * dim, 0.0);
      } else if (section == "[end]") {
        ended = true;
        break;
      } else if (section != "[standardization]" && section != "[weights]") {
        throw ValidationError("model file: unknown section " + section);
      }
      continue;
    }
    if (section.empty()) {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ValidationError("model file: bad header line");
      auto key = line.substr(0, eq);
      auto value = line.substr(eq + 1);
      if (key == "field") field = value;
      else if (key == "prompt") prompt = value;
      else if (key == "labels") {
        for (const auto& p : split(value, ',')) d.labels.push_back(static_cast<int>(parse_int_strict(p, key)));
      } else if (key == "hash_dim") d.features.hash_dim = static_cast<std::uint32_t>(parse_int_strict(value, key));
      else if (key == "char_min") d.features.char_min = static_cast<int>(parse_int_strict(value, key));
      else if (key == "char_max") d.features.char_max = static_cast<int>(parse_int_strict(value, key));
      else if (key == "token_unigrams") d.features.token_unigrams = parse_int_strict(value, key) != 0;
      else if (key == "rule_features") d.features.rule_features = parse_int_strict(value, key) != 0;
      else if (key == "length_features") d.features.length_features = parse_int_strict(value, key) != 0;
      else if (key == "embedding_dim") d.features.embedding_dim = static_cast<std::size_t>(parse_int_strict(value, key));
      else if (key == "dimension") dim = static_cast<std::size_t>(parse_int_strict(value, key));
      else if (key == "l2") d.l2 = parse_double_strict(value, key);
      else if (key == "epochs") d.epochs = static_cast<int>(parse_int_strict(value, key));
      else if (key == "distinct_features") d.collisions.distinct_features = static_cast<std::size_t>(parse_int_strict(value, key));
      else if (key == "occupied_buckets") d.collisions.occupied_buckets = static_cast<std::size_t>(parse_int_strict(value, key));
      else if (key.substr(0, 5) == "meta.") d.metadata.emplace_back(std::string(key.substr(5)), std::string(value));
      else if (key == "cv") {
        auto parts = split(value, ';');
        if (parts.size() != 5) throw ValidationError("model file: bad cv line");
        CvResult r;
        r.l2 = parse_double_strict(parts[0], "cv");
        r.hash_dim = static_cast<std::uint32_t>(parse_int_strict(parts[1], "cv"));
        r.mean_accuracy = parse_double_strict(parts[2], "cv");
        for (const auto& a : split(parts[3], ',')) r.fold_accuracy.push_back(parse_double_strict(a, "cv"));
        for (const auto& e : split(parts[4], ',')) r.best_epochs.push_back(static_cast<int>(parse_int_strict(e, "cv")));
        d.cv.push_back(std::move(r));
      } else {
        throw ValidationError("model file: unknown header key '" + std::string(key) + "'");
      }
      continue;
    }
    auto cells = split(line, ' ');
    if (section == "[bias]") {
      if (cells.size() != 2) throw ValidationError("model file: bad bias line");
      auto c = static_cast<std::size_t>(parse_int_strict(cells[0], "bias"));
      if (c >= d.bias.size()) throw ValidationError("model file: bias class out of range");
      d.bias[c] = parse_double_strict(cells[1], "bias");
    } else if (section == "[standardization]") {
      if (cells.size() != 3) throw ValidationError("model file: bad standardization line");
      auto j = static_cast<std::size_t>(parse_int_strict(cells[0], "standardization"));
      if (j >= dim) throw ValidationError("model file: feature index out of range");
      d.mean[j] = parse_double_strict(cells[1], "standardization");
      d.inv_sd[j] = parse_double_strict(cells[2], "standardization");
    } else {
      if (cells.size() != 3) throw ValidationError("model file: bad weight line");
      auto c = static_cast<std::size_t>(parse_int_strict(cells[0], "weights"));
      auto j = static_cast<std::size_t>(parse_int_strict(cells[1], "weights"));
      if (c >= d.labels.size() || j >= dim) throw ValidationError("model file: weight index out of range");
      d.weights[c * dim + j] = parse_double_strict(cells[2], "weights");
    }
  }
  if (!ended) throw ValidationError("model file is truncated");
  const std::size_t expected = d.features.hash_dim +
                               (d.features.rule_features ? rules::RuleVector::kSize : 0) +
                               (d.features.length_features ? 2 : 0) + d.features.embedding_dim;
  if (dim != expected) throw ValidationError("model file: dimension does not match the feature layout");
  return d;
}


// ---------------------------------------------------------------------------

Scorer::Scorer(const TrainedDetector& d, const text::LexiconSet& lexicons, const EmbeddingTable* embeddings)
    : d_(&d), fx_(d.features, lexicons, embeddings) {
  if (fx_.dimension() != d.dimension()) throw ValidationError("detector dimension does not match its features");
  Head h{d.classes(), d.dimension(), d.features.hash_dim, d.weights, d.bias};
  offsets_ = h.offsets(Standardizer{d.mean, d.inv_sd});
}

std::vector<double> Scorer::class_probabilities(std::string_view id, std::string_view text) const {
  const auto f = fx_.extract(id, text);
  const auto& d = *d_;
  const std::size_t dim = d.dimension();
  std::vector<double> eta(d.classes());
  for (std::size_t c = 0; c < eta.size(); ++c) eta[c] = d.bias[c] - offsets_[c];
  for (const auto& [j, v] : f.hashed) {
    const double x = v * d.inv_sd[j];
    if (x == 0) continue;
    for (std::size_t c = 0; c < eta.size(); ++c) eta[c] += d.weights[c * dim + j] * x;
  }
  for (std::size_t t = 0; t < f.dense.size(); ++t) {
    const std::size_t j = d.features.hash_dim + t;
    const double x = f.dense[t] * d.inv_sd[j];
    if (x == 0) continue;
    for (std::size_t c = 0; c < eta.size(); ++c) eta[c] += d.weights[c * dim + j] * x;
  }
  softmax_inplace(eta);
  return eta;
}

std::array<double, 7> Scorer::label_probabilities(std::string_view id, std::string_view text) const {
  std::array<double, 7> out{};
  const auto p = class_probabilities(id, text);
  for (std::size_t c = 0; c < p.size(); ++c) out[static_cast<std::size_t>(d_->labels[c])] = p[c];
  return out;
}

double Scorer::revised_probability(std::string_view id, std::string_view text) const {
  const auto p = class_probabilities(id, text);
  if (!d_->scope.multiclass()) return p[1];
  double original = 0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (d_->labels[c] == 0) original = p[c];
  }
  return 1.0 - original;
}

namespace {

int decide(const TrainedDetector& d, const std::vector<double>& p, double threshold) {
  if (!d.scope.multiclass()) return p[1] >= threshold ? d.labels[1] : d.labels[0];
  return d.labels[argmax(p)];
}

}  // namespace

int Scorer::predict(std::string_view id, std::string_view text, double threshold) const {
  return decide(*d_, class_probabilities(id, text), threshold);
}

int Scorer::predict(const corpus::Article& a, std::vector<std::string>* warnings, double threshold) const {
  if (warnings && d_->scope.field && a.field != *d_->scope.field) {
    warnings->push_back("article '" + a.id + "' is in field " + std::string(corpus::to_string(a.field)) +
                        " but the detector was trained for " + d_->scope.to_string());
  }
  return predict(a.id, a.text, threshold);
}

// ---------------------------------------------------------------------------

namespace {

double safe_ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

double harmonic(double p, double r) { return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0; }

void fill_confusion(EvalReport& r) {
  r.confusion.assign(r.counts.size(), std::vector<double>(r.counts.size(), 0.0));
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    std::size_t total = 0;
    for (auto c : r.counts[i]) total += c;
    if (total == 0) continue;
    for (std::size_t j = 0; j < r.counts.size(); ++j) {
      r.confusion[i][j] = 100.0 * double(r.counts[i][j]) / double(total);
    }
  }
}

}  // namespace

EvalReport metrics_from_counts(const BinaryCounts& c) {
  EvalReport r;
  r.binary = true;
  r.labels = {0, 1};
  const double tp = double(c.tp), fp = double(c.fp), fn = double(c.fn), tn = double(c.tn);
  r.precision = safe_ratio(tp, tp + fp);
  r.recall = safe_ratio(tp, tp + fn);
  r.accuracy = safe_ratio(tp + tn, tp + fp + fn + tn);
  r.f1 = harmonic(r.precision, r.recall);
  r.counts = {{c.tn, c.fp}, {c.fn, c.tp}};
  fill_confusion(r);
  return r;
}

EvalReport metrics_from_predictions(const std::vector<int>& labels, const std::vector<int>& truth,
                                    const std::vector<int>& predicted, bool binary) {
  if (truth.size() != predicted.size()) throw ValidationError("truth and prediction lengths differ");
  if (truth.empty()) throw ValidationError("cannot evaluate an empty test set");
  if (labels.size() < 2) throw ValidationError("evaluation needs at least two labels");
  if (binary && labels.size() != 2) throw ValidationError("binary evaluation takes exactly two labels");
  auto index = [&](int l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw ValidationError("label " + std::to_string(l) + " is not evaluated");
    return static_cast<std::size_t>(it - labels.begin());
  };
  const std::size_t k = labels.size();
  std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++counts[index(truth[i])][index(predicted[i])];

  if (binary) {
    BinaryCounts c{counts[1][1], counts[0][1], counts[1][0], counts[0][0]};
    EvalReport r = metrics_from_counts(c);
    r.labels = labels;
    return r;
  }
  EvalReport r;
  r.binary = false;
  r.labels = labels;
  r.counts = counts;
  std::size_t hits = 0;
  double p_sum = 0, r_sum = 0;
  for (std::size_t c = 0; c < k; ++c) {
    hits += counts[c][c];
    std::size_t col = 0, row = 0;
    for (std::size_t o = 0; o < k; ++o) {
      col += counts[o][c];
      row += counts[c][o];
    }
    p_sum += safe_ratio(double(counts[c][c]), double(col));
    r_sum += safe_ratio(double(counts[c][c]), double(row));
  }
  r.precision = p_sum / double(k);
  r.recall = r_sum / double(k);
  r.accuracy = double(hits) / double(truth.size());
  r.f1 = harmonic(r.precision, r.recall);
  fill_confusion(r);
  return r;
}

EvalReport evaluate(const Scorer& scorer, const std::vector<corpus::Article>& test, double threshold,
                    std::vector<std::string>* warnings) {
  const auto& d = scorer.detector();
  std::vector<const corpus::Article*> covered;
  std::size_t skipped = 0;
  for (const auto& a : test) {
    const bool label_ok = std::find(d.labels.begin(), d.labels.end(), a.revision_label) != d.labels.end();
    if (d.scope.covers(a) && label_ok) covered.push_back(&a);
    else ++skipped;
  }
  if (covered.empty()) throw ValidationError("no test articles fall within scope " + d.scope.to_string());
  if (skipped && warnings) {
    warnings->push_back(std::to_string(skipped) + " test article(s) outside scope " + d.scope.to_string() +
                        " were skipped");
  }
  std::sort(covered.begin(), covered.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<ProbabilityRecord> records(covered.size());
  io::parallel_for(covered.size(), [&](std::size_t i) {
    const auto& a = *covered[i];
    auto p = scorer.class_probabilities(a.id, a.text);
    records[i] = {a.id, a.revision_label, decide(d, p, threshold), std::move(p)};
  });
  std::vector<int> truth, pred;
  for (const auto& r : records) {
    truth.push_back(r.truth);
    pred.push_back(r.predicted);
  }
  auto report = metrics_from_predictions(d.labels, truth, pred, !d.scope.multiclass());
  report.threshold = threshold;
  report.records = std::move(records);
  return report;
}

std::string format_percent(double pct) { return io::format_fixed(pct, 2) + "%"; }

std::string metrics_csv(const EvalReport& r) {
  std::string out = "metric,value\n";
  out += "precision," + io::format_double(r.precision) + "\n";
  out += "recall," + io::format_double(r.recall) + "\n";
  out += "accuracy," + io::format_double(r.accuracy) + "\n";
  out += "f1," + io::format_double(r.f1) + "\n";
  std::size_t n = 0;
  for (const auto& row : r.counts) {
    for (auto c : row) n += c;
  }
  out += "n," + std::to_string(n) + "\n";
  out += std::string("mode,") + (r.binary ? "binary" : "multiclass") + "\n";
  if (r.binary) out += "threshold," + io::format_double(r.threshold) + "\n";
  return out;
}

std::string confusion_csv(const EvalReport& r) {
  std::vector<std::string> header = {"true\\predicted"};
  for (int l : r.labels) header.push_back(std::to_string(l));
  std::string out = io::csv_line(header);
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    std::vector<std::string> row = {std::to_string(r.labels[i])};
    for (double v : r.confusion[i]) row.push_back(format_percent(v));
    out += io::csv_line(row);
  }
  return out;
}

std::string confusion_text(const EvalReport& r) {
  std::string out = "true\\pred";
  for (int l : r.labels) {
    std::string cell = std::to_string(l);
    out += std::string(9 - std::min<std::size_t>(8, cell.size()), ' ') + cell;
  }
  out += "\n";
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    std::string head = std::to_string(r.labels[i]);
    out += head + std::string(9 - std::min<std::size_t>(8, head.size()), ' ');
    for (double v : r.confusion[i]) {
      std::string cell = format_percent(v);
      out += std::string(9 - std::min<std::size_t>(8, cell.size()), ' ') + cell;
    }
    out += "\n";
  }
  return out;
}

std::string records_csv(const EvalReport& r) {
  std::vector<std::string> header = {"id", "truth", "predicted"};
  for (int l : r.labels) header.push_back("p_" + std::to_string(l));
  std::string out = io::csv_line(header);
  for (const auto& rec : r.records) {
    std::vector<std::string> row = {rec.id, std::to_string(rec.truth), std::to_string(rec.predicted)};
    for (double p : rec.probabilities) row.push_back(io::format_double(p));
    out += io::csv_line(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::optional<double>> baseline_adjust(const std::vector<Month>& months,
                                                   const std::vector<std::optional<double>>& raw, Month event) {
  if (months.size() != raw.size()) throw ValidationError("month and value lengths differ");
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < months.size(); ++i) {
    if (months[i] < event && raw[i]) {
      sum += *raw[i];
      ++n;
    }
  }
  if (n == 0) throw ValidationError("no observed month before " + event.to_string() + " to form the baseline");
  const double base = sum / double(n);
  std::vector<std::optional<double>> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i]) out[i] = *raw[i] - base;
  }
  return out;
}

std::vector<AdoptionSeries> adoption_series(const std::vector<corpus::Article>& articles,
                                            const std::vector<bool>& adopter,
                                            const std::vector<AdoptionGroup>& groups, Month event) {
  if (adopter.size() != articles.size()) throw ValidationError("one adopter flag per article is required");
  if (groups.empty()) throw ValidationError("no adoption groups given");
  std::vector<AdoptionSeries> out;
  for (const auto& g : groups) {
    std::map<Month, std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < articles.size(); ++i) {
      if (!g.filter.matches(articles[i])) continue;
      auto& c = cells[articles[i].month()];
      ++c.first;
      if (adopter[i]) ++c.second;
    }
    if (cells.empty()) throw ValidationError("group '" + g.name + "' matches no article");
    AdoptionSeries s;
    s.group = g.name;
    std::vector<Month> months;
    std::vector<std::optional<double>> raw;
    const Month last = cells.rbegin()->first;
    for (Month m = cells.begin()->first; m <= last; m = m.next()) {
      AdoptionPoint p;
      p.month = m;
      if (auto it = cells.find(m); it != cells.end()) {
        p.n = it->second.first;
        p.adopters = it->second.second;
        p.raw_pct = 100.0 * double(p.adopters) / double(p.n);
      }
      months.push_back(m);
      raw.push_back(p.raw_pct);
      s.points.push_back(p);
    }
    std::vector<std::optional<double>> adjusted;
    try {
      adjusted = baseline_adjust(months, raw, event);
    } catch (const ValidationError&) {
      throw ValidationError("group '" + g.name + "' has no articles before " + event.to_string() +
                            "; the baseline window is empty");
    }
    double sum = 0;
    for (std::size_t i = 0; i < months.size(); ++i) {
      s.points[i].adjusted_pct = adjusted[i];
      if (months[i] < event && raw[i]) {
        sum += *raw[i];
        ++s.baseline_months;
      }
    }
    s.baseline_mean = sum / double(s.baseline_months);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<bool> label_adopters(const std::vector<corpus::Article>& articles) {
  std::vector<bool> out;
  out.reserve(articles.size());
  for (const auto& a : articles) out.push_back(a.is_adopter());
  return out;
}

std::vector<bool> predict_adopters(const Scorer& scorer, const std::vector<corpus::Article>& articles,
                                   double threshold) {
  std::vector<char> flags(articles.size(), 0);
  io::parallel_for(articles.size(), [&](std::size_t i) {
    flags[i] = scorer.predict(articles[i].id, articles[i].text, threshold) != 0;
  });
  return {flags.begin(), flags.end()};
}

std::string adoption_csv(const std::vector<AdoptionSeries>& series) {
  std::string out = "group,month,n,adopters,raw_pct,adjusted_pct\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out += io::csv_line({s.group, p.month.to_string(), std::to_string(p.n), std::to_string(p.adopters),
                           p.raw_pct ? io::format_double(*p.raw_pct) : "NA",
                           p.adjusted_pct ? io::format_double(*p.adjusted_pct) : "NA"});
    }
  }
  return out;
}

}  // namespace stylelens::detector
