#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stylelens/corpus.hpp"
#include "stylelens/textproc.hpp"

namespace stylelens::rules {

/// Writing-rule measurements for one text. Rules 3 and 6 need author
/// keywords and are not computed.
struct RuleVector {
  double rule1a = 0;   // words
  double rule1b = 0;   // sentences
  double rule2 = 0;    // % sentences with fewer than 20 words
  double rule4 = 0;    // 100 * present / (present + past)
  double rule5 = 0;    // 100 * (adjectives + adverbs) / words
  double rule7a = 0;   // novelty word present, x100
  double rule7b = 0;   // importance word present, x100
  double rule8 = 0;    // 100 * superlatives / (superlatives + comparatives)
  double rule9 = 0;    // hedge word present, x100
  double rule10a = 0;  // pleasant-word occurrences x100
  double rule10b = 0;  // unpleasant-word occurrences x100

  static constexpr std::size_t kSize = 11;
  static const std::array<std::string_view, kSize>& names();
  std::array<double, kSize> values() const;
  double operator[](std::size_t i) const { return values()[i]; }

  bool operator==(const RuleVector&) const = default;
};

/// Set when a ratio's denominator was zero and the documented default was
/// substituted (rule2 -> 0, rule4 -> 50, rule5 -> 0, rule8 -> 0).
struct RuleMask {
  bool rule2 = false;
  bool rule4 = false;
  bool rule5 = false;
  bool rule8 = false;

  bool any() const { return rule2 || rule4 || rule5 || rule8; }
  bool operator==(const RuleMask&) const = default;
};

enum class IndicatorScale {
  /// Rules 7a/7b/9 are presence x100; 10a/10b are occurrence counts x100.
  Presence,
  /// Rules 7a/7b/9/10a/10b are raw occurrence counts.
  Count,
};

struct RuleOptions {
  IndicatorScale scale = IndicatorScale::Presence;
  /// Sentences with strictly fewer words than this count as short.
  std::size_t short_sentence_words = 20;
};

struct Measurement {
  RuleVector values;
  RuleMask mask;
};

/// Superlative: best/most/worst/least/furthest or "-est" on a known
/// adjective stem. Comparative: better/more/worse/less/further or "-er" on
/// a known adjective stem.
bool is_superlative(std::string_view lower, const text::LexiconSet& lex);
bool is_comparative(std::string_view lower, const text::LexiconSet& lex);

Measurement measure(std::string_view text, const text::LexiconSet& lex, const RuleOptions& opts = {});
Measurement measure(const text::TokenizedText& tagged, const text::LexiconSet& lex,
                    const RuleOptions& opts = {});

struct RuleRow {
  std::string id;
  RuleVector values;
  RuleMask mask;
};

/// One row per article, sorted by id. Work is spread over threads; the
/// result is identical to a sequential run.
std::vector<RuleRow> measure_corpus(const std::vector<corpus::Article>& articles,
                                    const text::LexiconSet& lex, const RuleOptions& opts = {});

struct ColumnSummary {
  std::string_view name;
  double mean = 0;
  double sd = 0;  // population
  double p25 = 0;
  double p75 = 0;
  double min = 0;
  double max = 0;
};

/// Per-rule mean, population sd, quartiles (linear interpolation) and range.
std::vector<ColumnSummary> summarize(const std::vector<RuleRow>& table);

/// Linear-interpolation quantile of an unsorted sample, q in [0,1].
double quantile(std::vector<double> values, double q);

/// CSV renderings. Column order is fixed:
///   id,rule1a,rule1b,rule2,rule4,rule5,rule7a,rule7b,rule8,rule9,rule10a,rule10b
std::string rules_csv(const std::vector<RuleRow>& table);
///   id,rule2_default,rule4_default,rule5_default,rule8_default
std::string mask_csv(const std::vector<RuleRow>& table);
///   rule,mean,sd,p25,p75,min,max
std::string summary_csv(const std::vector<ColumnSummary>& summary);
std::string summary_text(const std::vector<ColumnSummary>& summary);

}  // namespace stylelens::rules
