#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylelens/common.hpp"

namespace stylelens::corpus {

enum class Field { Maths, Phys, CS, EESS, Stats, Bio, Econ, Fin };
inline constexpr std::size_t kFieldCount = 8;
inline constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::Maths, Field::Phys, Field::CS,  Field::EESS,
    Field::Stats, Field::Bio,  Field::Econ, Field::Fin};

/// Canonical names: "Maths", "Phys", "CS", "EE&SS", "Stats", "Bio", "Econ", "Fin".
std::string_view to_string(Field f);
/// Accepts canonical names, case-insensitively, plus "EESS".
std::optional<Field> parse_field(std::string_view s);

enum class Gender { Male, Female, Unknown };
std::string_view to_string(Gender g);
std::optional<Gender> parse_gender(std::string_view s);

enum class Ethnicity {
  Africans, British, EastAsian, EastEuropean, Indian, Jewish, Muslim, WestEuropean, Other
};
inline constexpr std::size_t kEthnicityCount = 9;
std::string_view to_string(Ethnicity e);
std::optional<Ethnicity> parse_ethnicity(std::string_view s);

inline constexpr int kMaxRevisionLabel = 6;

struct AuthorProfile {
  std::string name;
  /// Upper-case ISO-3166 alpha-2 code; empty when unknown.
  std::string country;
  Gender gender = Gender::Unknown;
  Ethnicity ethnicity = Ethnicity::Other;
  int papers_before_2021 = 0;
  std::optional<int> first_paper_year;

  bool operator==(const AuthorProfile&) const = default;
};

struct Article {
  std::string id;
  /// Groups an original with its revisions; equals `id` when absent.
  std::string paper_id;
  std::string text;
  Field field = Field::Maths;
  Date updated;
  std::vector<AuthorProfile> authors;
  int revision_label = 0;
  std::optional<bool> adopter_flag;
  /// Paired revised version of `text`, used by article-vs-revision similarity.
  std::optional<std::string> revised_text;

  Month month() const { return Month(updated); }
  /// Adopter flag when set, otherwise revision_label in 1..6.
  bool is_adopter() const { return adopter_flag.value_or(revision_label >= 1); }

  bool operator==(const Article&) const = default;
};

enum class Format { Jsonl, Csv };
std::optional<Format> parse_format(std::string_view s);

struct RecordIssue {
  std::size_t line = 0;
  std::string id;  // may be empty when the record has no readable id
  std::string message;
};

/// Thrown by load_corpus when one or more records fail validation. Every
/// offending record is listed, with its line number.
class CorpusError : public ValidationError {
 public:
  explicit CorpusError(std::vector<RecordIssue> issues);
  const std::vector<RecordIssue>& issues() const { return issues_; }

 private:
  std::vector<RecordIssue> issues_;
};

struct LoadResult {
  std::vector<Article> articles;
  std::vector<RecordIssue> issues;
};

/// Parses every record, collecting issues instead of throwing.
LoadResult parse_corpus(std::string_view content, Format format);
/// Strict load: throws CorpusError listing every bad record (including
/// duplicate ids, which name both lines).
std::vector<Article> load_corpus(const std::filesystem::path& path, Format format);

/// One JSON object per line, fields in a fixed order. Reloading the output
/// reproduces the input articles field-by-field.
std::string to_jsonl(const std::vector<Article>& articles);

/// name -> class lookup, keys matched case-insensitively.
/// File format: UTF-8, `name<TAB>class` per line, `#` comments.
class LookupTable {
 public:
  static LookupTable load(const std::filesystem::path& path);
  static LookupTable parse(std::string_view content);

  std::optional<std::string> find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::string> entries_;
};

struct EnrichmentReport {
  std::size_t authors = 0;
  std::size_t gender_matched = 0;
  std::size_t ethnicity_matched = 0;

  double gender_match_rate() const { return authors ? double(gender_matched) / double(authors) : 0.0; }
  double ethnicity_match_rate() const {
    return authors ? double(ethnicity_matched) / double(authors) : 0.0;
  }
};

/// Fills gender/ethnicity from lookup tables. With a table present,
/// unmatched names become Unknown / Other; a null table leaves the
/// attribute untouched. Table values that are not valid classes raise
/// ValidationError.
EnrichmentReport enrich_authors(std::vector<Article>& articles, const LookupTable* gender_table,
                                const LookupTable* ethnicity_table);

enum class Nativeness { Native, NonNative, Partial };
std::string_view to_string(Nativeness n);
std::optional<Nativeness> parse_nativeness(std::string_view s);

/// US, AU, GB, CA, ZA, NZ.
bool is_native_country(std::string_view iso2);
Nativeness classify_nativeness(const Article& article);

enum class SeniorityMeasure { Papers, Years };
enum class SeniorityMode { AnyAuthor, AllAuthors };
enum class Seniority { Senior, Junior };
std::string_view to_string(Seniority s);

/// Academic years are counted up to the article's update year.
int academic_years(const AuthorProfile& author, int reference_year);

Seniority classify_seniority(const Article& article, SeniorityMeasure measure, int threshold = 10,
                             SeniorityMode mode = SeniorityMode::AnyAuthor);

struct ArticleCovariates {
  std::string id;
  double pct_female = 0;
  double pct_male = 0;
  double pct_unknown_gender = 0;
  double pct_native = 0;
  /// Shares of the eight named classes; Other is the residual.
  std::array<double, kEthnicityCount - 1> ethnicity_shares{};
  double paper_seniority = 0;
  double year_seniority = 0;
  std::array<int, kFieldCount> discipline_dummies{};
};

struct CovariateTable {
  std::vector<ArticleCovariates> rows;
  /// Columns that were requested for z-scoring but have zero variance;
  /// they are left unscaled.
  std::vector<std::string> degenerate_columns;
  std::vector<std::string> warnings;

  /// Flat column names, in the order used by `matrix_row`.
  static std::vector<std::string> column_names();
  std::vector<double> matrix_row(std::size_t i) const;
};

CovariateTable build_covariates(const std::vector<Article>& articles, bool normalize);

}  // namespace stylelens::corpus
