#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylelens/common.hpp"
#include "stylelens/corpus.hpp"
#include "stylelens/features.hpp"
#include "stylelens/similarity.hpp"

namespace stylelens::detector {

/// Which articles a detector covers: one field or all, and one revision
/// prompt (binary, original vs prompt) or all seven labels (multiclass).
struct Scope {
  std::optional<corpus::Field> field;
  int prompt = 0;  // 0 = multiclass, 1..6 = binary against label 0

  bool multiclass() const { return prompt == 0; }
  /// Labels of the training classes, in class-index order.
  std::vector<int> labels() const;
  /// Whether an article takes part in training/evaluation for this scope.
  bool covers(const corpus::Article& a) const;
  /// "all/multiclass", "CS/prompt3", ...
  std::string to_string() const;
  static Scope parse(std::string_view field, std::string_view prompt);

  bool operator==(const Scope&) const = default;
};

// ---------------------------------------------------------------------------
// Temporal split

struct SplitDates {
  Date train_end{2021, 10, 1};
  Date test_start{2021, 10, 1};
  Date test_end{2021, 11, 30};
};

struct Split {
  std::vector<corpus::Article> train;  // updated < train_end
  std::vector<corpus::Article> test;   // test_start <= updated <= test_end
};

/// Throws ValidationError when test_end < test_start, when the windows
/// overlap, or when either side comes out empty.
Split temporal_split(const std::vector<corpus::Article>& articles, const SplitDates& dates);

// ---------------------------------------------------------------------------
// Training

/// Fold index in [0, k) per example. Examples of each class are shuffled
/// with `seed` and dealt round-robin, continuing the rotation across
/// classes, so fold sizes differ by at most one overall and per class.
/// Throws ValidationError when a class has fewer than k examples.
std::vector<int> stratified_folds(const std::vector<int>& classes, int k, std::uint64_t seed);

struct TrainOptions {
  Scope scope;
  int folds = 5;
  /// Epochs without a validation-accuracy improvement before stopping.
  int patience = 10;
  int max_epochs = 100;
  double learning_rate = 0.05;
  std::vector<double> l2_grid = {1e-2, 1e-1, 1.0};
  std::vector<std::uint32_t> hash_dims = {1u << 16, 1u << 18};
  /// Template for everything except hash_dim, which comes from the grid.
  FeatureConfig features;
  std::uint64_t seed = 20221130;
};

struct CvResult {
  double l2 = 0;
  std::uint32_t hash_dim = 0;
  double mean_accuracy = 0;
  std::vector<double> fold_accuracy;
  std::vector<int> best_epochs;

  bool operator==(const CvResult&) const = default;
};

struct TrainedDetector {
  Scope scope;
  std::vector<int> labels;  // class index -> revision label
  FeatureConfig features;
  double l2 = 0;
  int epochs = 0;
  /// Standardization per feature column: x' = (x - mean) * inv_sd. inv_sd
  /// is 0 for columns constant in training.
  std::vector<double> mean;
  std::vector<double> inv_sd;
  /// Row-major classes x dimension.
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<CvResult> cv;
  CollisionStats collisions;
  /// Free-form provenance (split dates, seed, corpus hash, ...).
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t classes() const { return labels.size(); }
  std::size_t dimension() const { return mean.size(); }
  /// Probabilities over `labels` for one feature vector.
  std::vector<double> probabilities(const SparseFeatures& f) const;

  bool operator==(const TrainedDetector&) const = default;
};

/// Stratified k-fold grid search over (l2, hash_dim) by mean best-epoch
/// validation accuracy, then a refit on all of `train` for the mean best
/// epoch count. Examples are ordered by id first; the result does not
/// depend on input order.
TrainedDetector crossval_train(const std::vector<corpus::Article>& train, const TrainOptions& opts,
                               const text::LexiconSet& lexicons, const EmbeddingTable* embeddings = nullptr);

/// Text bundle: header, metadata, standardization and weights; numbers in
/// shortest round-trip form so save/load is exact.
std::string save_model(const TrainedDetector& d);
TrainedDetector load_model(std::string_view content);

// ---------------------------------------------------------------------------
// Scoring

class Scorer {
 public:
  Scorer(const TrainedDetector& d, const text::LexiconSet& lexicons, const EmbeddingTable* embeddings = nullptr);

  const TrainedDetector& detector() const { return *d_; }
  /// Probabilities over the detector's labels.
  std::vector<double> class_probabilities(std::string_view id, std::string_view text) const;
  /// Probabilities over labels 0..6; labels outside the model get 0.
  std::array<double, 7> label_probabilities(std::string_view id, std::string_view text) const;
  /// Binary: P(revised). Multiclass: 1 - P(label 0).
  double revised_probability(std::string_view id, std::string_view text) const;
  /// Binary: the prompt label when P(revised) >= threshold, else 0.
  /// Multiclass: argmax label (lowest label on ties).
  int predict(std::string_view id, std::string_view text, double threshold = 0.5) const;

  /// Appends a warning when the article lies outside the detector's scope.
  int predict(const corpus::Article& a, std::vector<std::string>* warnings, double threshold = 0.5) const;

 private:
  const TrainedDetector* d_;
  FeatureExtractor fx_;
  std::vector<double> offsets_;
};

// ---------------------------------------------------------------------------
// Evaluation

struct BinaryCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ProbabilityRecord {
  std::string id;
  int truth = 0;
  int predicted = 0;
  std::vector<double> probabilities;  // over EvalReport::labels
};

struct EvalReport {
  bool binary = true;
  std::vector<int> labels;
  double threshold = 0.5;
  double precision = 0;
  double recall = 0;
  double accuracy = 0;
  double f1 = 0;
  /// Raw counts and row-normalized percentages, rows = true label.
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> confusion;
  std::vector<ProbabilityRecord> records;
};

/// Precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2PR/(P+R); a zero
/// denominator gives 0.
EvalReport metrics_from_counts(const BinaryCounts& c);

/// Metrics from paired truth/prediction labels. Binary: the second label
/// is the positive class. Multiclass: macro-averaged precision and recall
/// over `labels`, F1 from those, accuracy = exact matches.
EvalReport metrics_from_predictions(const std::vector<int>& labels, const std::vector<int>& truth,
                                    const std::vector<int>& predicted, bool binary);

/// Scores every in-scope article of `test`. Throws on an empty set.
EvalReport evaluate(const Scorer& scorer, const std::vector<corpus::Article>& test, double threshold = 0.5,
                    std::vector<std::string>* warnings = nullptr);

/// "92.25%".
std::string format_percent(double pct);
/// metric,value lines.
std::string metrics_csv(const EvalReport& r);
/// Header row of predicted labels, one row per true label.
std::string confusion_csv(const EvalReport& r);
std::string confusion_text(const EvalReport& r);
std::string records_csv(const EvalReport& r);

// ---------------------------------------------------------------------------
// Adoption

struct AdoptionGroup {
  std::string name;
  similarity::GroupFilter filter;
};

struct AdoptionPoint {
  Month month;
  std::size_t n = 0;
  std::size_t adopters = 0;
  std::optional<double> raw_pct;       // missing when n == 0
  std::optional<double> adjusted_pct;  // raw minus baseline mean
};

struct AdoptionSeries {
  std::string group;
  double baseline_mean = 0;
  std::size_t baseline_months = 0;
  std::vector<AdoptionPoint> points;
};

/// Subtracts the mean of the present values in months before `event`.
/// Throws ValidationError when no such month has a value.
std::vector<std::optional<double>> baseline_adjust(const std::vector<Month>& months,
                                                   const std::vector<std::optional<double>>& raw, Month event);

/// `adopter[i]` says whether articles[i] counts as revised. Months run
/// from each group's first to last article month.
std::vector<AdoptionSeries> adoption_series(const std::vector<corpus::Article>& articles,
                                            const std::vector<bool>& adopter,
                                            const std::vector<AdoptionGroup>& groups, Month event = Month(2022, 11));

/// Uses each article's adopter flag or ground-truth label.
std::vector<bool> label_adopters(const std::vector<corpus::Article>& articles);
/// Multiclass: argmax in 1..6. Binary: P(revised) >= threshold.
std::vector<bool> predict_adopters(const Scorer& scorer, const std::vector<corpus::Article>& articles,
                                   double threshold = 0.5);

/// group,month,n,adopters,raw_pct,adjusted_pct
std::string adoption_csv(const std::vector<AdoptionSeries>& series);

}  // namespace stylelens::detector
