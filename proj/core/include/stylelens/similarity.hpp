#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "stylelens/common.hpp"
#include "stylelens/corpus.hpp"

namespace stylelens::similarity {

/// Sparse, L2-normalized term weights keyed by vocabulary id, sorted by id.
/// Zero weights are never stored.
class TermVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  TermVector() = default;
  /// Takes raw non-negative weights (any order, duplicates summed) and
  /// normalizes them. Throws ValidationError when every weight is zero.
  static TermVector from_weights(std::vector<Entry> weights);

  const std::vector<Entry>& entries() const { return entries_; }
  double weight(std::uint32_t id) const;
  double norm() const;
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
};

struct VectorizerOptions {
  bool remove_stopwords = false;
  bool idf = false;
};

/// Corpus-global vocabulary. Built once; every vector produced from it
/// lives in the same space so centroids of different groups compare.
class Vocabulary {
 public:
  static Vocabulary build(const std::vector<std::string_view>& texts, VectorizerOptions opts = {});

  std::optional<std::uint32_t> id(std::string_view term) const;
  const std::string& term(std::uint32_t id) const { return terms_.at(id); }
  std::size_t size() const { return terms_.size(); }
  const VectorizerOptions& options() const { return opts_; }

  /// Term counts (times idf when enabled), L2-normalized. Terms outside the
  /// vocabulary are ignored. Throws ValidationError when nothing remains.
  TermVector vectorize(std::string_view text) const;

 private:
  VectorizerOptions opts_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
};

const std::unordered_set<std::string>& stopwords();

/// Dot product of two normalized vectors, clamped to [-1, 1].
double cosine(const TermVector& a, const TermVector& b);

/// Mean of the vectors, renormalized. Throws on an empty group.
TermVector group_centroid(const std::vector<const TermVector*>& vectors);
TermVector group_centroid(const std::vector<TermVector>& vectors);

/// Article predicate built from "key=value" filters. All filters must hold.
/// Keys: field, adopter (true/false), native (native/nonnative/partial),
/// seniority (senior/junior, by paper count, any-author),
/// seniority_years (senior/junior, by academic years, any-author),
/// gender (male/female: at least half the authors), label (0..6),
/// year (YYYY).
class GroupFilter {
 public:
  GroupFilter() = default;
  static GroupFilter parse(std::string_view spec);  // "k=v,k=v"; empty -> all
  static GroupFilter parse(const std::vector<std::string>& specs);

  bool matches(const corpus::Article& a) const;
  const std::string& description() const { return description_; }

 private:
  std::vector<std::function<bool(const corpus::Article&)>> checks_;
  std::string description_ = "all";
};

enum class SeriesMode { Centroid, ArticleVsRevision };
std::optional<SeriesMode> parse_series_mode(std::string_view s);

struct SeriesPoint {
  Month month;
  std::optional<double> value;  // missing when a required group is empty
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct ConvergenceSeries {
  std::string group_a;
  std::string group_b;
  std::vector<SeriesPoint> points;  // strictly increasing months
};

struct SeriesOptions {
  VectorizerOptions vectorizer;
};

/// Centroid mode: per month, cosine between the centroids of group A and
/// group B. Article mode: per month, unweighted mean of cosine(original,
/// revision) over group-A articles. Months with an empty group are emitted
/// with a missing value. Months run from the first to the last month that
/// has any matching article.
ConvergenceSeries pairwise_series(const std::vector<corpus::Article>& articles, const GroupFilter& group_a,
                                  const GroupFilter& group_b, SeriesMode mode, const SeriesOptions& opts = {});

/// CSV: month,value,n_a,n_b (missing values written as NA).
std::string series_csv(const ConvergenceSeries& s);
ConvergenceSeries parse_series_csv(std::string_view content);

struct BootstrapOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 20221130;
  /// Months per block; 0 picks round(n^(1/3)) per period.
  std::size_t block_length = 0;
  double confidence = 0.95;
};

struct DidResult {
  double pre_gap = 0;
  double post_gap = 0;
  double did = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t pre_months = 0;
  std::size_t post_months = 0;
};

/// Pre/post contrast of treated minus control, over months present in both
/// series. Months >= event_month are "post". CI from a moving-block
/// bootstrap of the monthly gap series, resampled within each period.
DidResult did_statistic(const ConvergenceSeries& treated, const ConvergenceSeries& control, Month event_month,
                        const BootstrapOptions& opts = {});

}  // namespace stylelens::similarity
