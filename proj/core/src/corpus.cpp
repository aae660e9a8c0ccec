#include "stylelens/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "stylelens/io.hpp"

namespace stylelens::corpus {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "Maths", "Phys", "CS", "EE&SS", "Stats", "Bio", "Econ", "Fin"};

constexpr std::array<std::string_view, kEthnicityCount> kEthnicityNames = {
    "Africans", "British", "EastAsian", "EastEuropean", "Indian",
    "Jewish",   "Muslim",  "WestEuropean", "Other"};

constexpr std::array<std::string_view, 6> kNativeCountries = {"US", "AU", "GB", "CA", "ZA", "NZ"};

// First listed country, upper-cased; "UK" is folded into "GB".
std::string normalize_country(std::string_view raw) {
  raw = trim(raw);
  auto cut = raw.find_first_of(";,|/");
  if (cut != std::string_view::npos) raw = trim(raw.substr(0, cut));
  std::string code(raw);
  for (char& c : code) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  if (code == "UK") code = "GB";
  if (code == "UNKNOWN" || code == "NA" || code == "?") code.clear();
  return code;
}

struct RecordError {
  std::string message;
};

[[noreturn]] void fail(std::string msg) { throw RecordError{std::move(msg)}; }

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) fail(std::string("missing '") + key + "'");
  if (!it->is_string()) fail(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<long long> optional_int(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return it->get<long long>();
  if (it->is_number_float()) {
    double v = it->get<double>();
    if (std::floor(v) == v) return static_cast<long long>(v);
  }
  if (it->is_string()) {
    auto s = std::string(trim(it->get<std::string>()));
    if (s.empty()) return std::nullopt;
    try {
      std::size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos == s.size()) return v;
    } catch (...) {
    }
  }
  fail(std::string("'") + key + "' must be an integer");
}

int parse_label(long long v) {
  if (v < 0 || v > kMaxRevisionLabel) {
    fail("revision_label " + std::to_string(v) + " outside [0,6]");
  }
  return static_cast<int>(v);
}

AuthorProfile parse_author(const json& a) {
  if (!a.is_object()) fail("author entries must be objects");
  AuthorProfile p;
  p.name = require_string(a, "name");
  if (auto it = a.find("country"); it != a.end() && !it->is_null()) {
    if (it->is_string()) p.country = normalize_country(it->get<std::string>());
    else if (it->is_array() && !it->empty() && (*it)[0].is_string())
      p.country = normalize_country((*it)[0].get<std::string>());
    else if (!it->is_array()) fail("author 'country' must be a string");
  }
  if (auto it = a.find("gender"); it != a.end() && !it->is_null()) {
    auto g = it->is_string() ? parse_gender(it->get<std::string>()) : std::nullopt;
    if (!g) fail("author '" + p.name + "' has invalid gender");
    p.gender = *g;
  }
  if (auto it = a.find("ethnicity"); it != a.end() && !it->is_null()) {
    auto e = it->is_string() ? parse_ethnicity(it->get<std::string>()) : std::nullopt;
    if (!e) fail("author '" + p.name + "' has invalid ethnicity");
    p.ethnicity = *e;
  }
  if (auto v = optional_int(a, "papers_before_2021")) {
    if (*v < 0) fail("author '" + p.name + "' has negative papers_before_2021");
    p.papers_before_2021 = static_cast<int>(*v);
  }
  if (auto v = optional_int(a, "first_paper_year")) {
    if (*v < 1000 || *v > 9999) fail("author '" + p.name + "' has implausible first_paper_year");
    p.first_paper_year = static_cast<int>(*v);
  }
  return p;
}

void validate_core(Article& a) {
  if (trim(a.id).empty()) fail("empty id");
  if (trim(a.text).empty()) fail("text is empty after trimming whitespace");
  if (a.paper_id.empty()) a.paper_id = a.id;
}

Article parse_json_record(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) fail("record is not a JSON object");
  Article a;
  a.id = require_string(obj, "id");
  try {
    a.text = require_string(obj, "text");
    if (auto it = obj.find("paper_id"); it != obj.end() && it->is_string()) a.paper_id = it->get<std::string>();
    auto field_name = require_string(obj, "field");
    auto f = parse_field(field_name);
    if (!f) fail("unknown field '" + field_name + "'");
    a.field = *f;
    auto date = Date::try_parse(require_string(obj, "updated"));
    if (!date) fail("'updated' is not a valid ISO-8601 date");
    a.updated = *date;
    if (auto v = optional_int(obj, "revision_label")) a.revision_label = parse_label(*v);
    if (auto it = obj.find("adopter"); it != obj.end() && !it->is_null()) {
      if (!it->is_boolean()) fail("'adopter' must be a boolean");
      a.adopter_flag = it->get<bool>();
    }
    if (auto it = obj.find("revision"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) fail("'revision' must be a string");
      a.revised_text = it->get<std::string>();
    }
    if (auto it = obj.find("authors"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) fail("'authors' must be an array");
      for (const auto& au : *it) a.authors.push_back(parse_author(au));
    }
    validate_core(a);
  } catch (RecordError& e) {
    // Prefix the record id.
    e.message = "record '" + a.id + "': " + e.message;
    throw;
  }
  return a;
}

void check_duplicates(std::vector<Article>& articles, std::vector<std::size_t>& lines,
                      std::vector<RecordIssue>& issues) {
  std::unordered_map<std::string, std::size_t> first_line;
  std::vector<Article> kept;
  kept.reserve(articles.size());
  for (std::size_t i = 0; i < articles.size(); ++i) {
    auto [it, inserted] = first_line.emplace(articles[i].id, lines[i]);
    if (!inserted) {
      issues.push_back({lines[i], articles[i].id,
                        "duplicate id '" + articles[i].id + "' on lines " + std::to_string(it->second) +
                            " and " + std::to_string(lines[i])});
      continue;
    }
    kept.push_back(std::move(articles[i]));
  }
  articles = std::move(kept);
}

LoadResult parse_jsonl(std::string_view content) {
  LoadResult result;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (trim(line).empty() || trim(line).front() == '#') {
      if (end == content.size()) break;
      continue;
    }
    try {
      result.articles.push_back(parse_json_record(line));
      lines.push_back(line_no);
    } catch (const RecordError& e) {
      std::string id;
      try {
        auto obj = json::parse(line);
        if (obj.is_object() && obj.contains("id") && obj["id"].is_string()) id = obj["id"].get<std::string>();
      } catch (...) {
      }
      result.issues.push_back({line_no, id, e.message});
    } catch (const ValidationError& e) {
      result.issues.push_back({line_no, "", e.what()});
    }
    if (end == content.size()) break;
  }
  check_duplicates(result.articles, lines, result.issues);
  return result;
}

LoadResult parse_csv_corpus(std::string_view content) {
  LoadResult result;
  auto rows = io::parse_csv(content);
  if (rows.empty()) return result;
  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[std::string(trim(header[i]))] = i;
  for (const char* required : {"id", "text", "field", "updated"}) {
    if (!col.count(required)) {
      result.issues.push_back({rows.front().line, "", std::string("CSV header lacks column '") + required + "'"});
      return result;
    }
  }
  std::vector<std::size_t> lines;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r].fields;
    auto get = [&](const std::string& name) -> std::optional<std::string> {
      auto it = col.find(name);
      if (it == col.end() || it->second >= fields.size()) return std::nullopt;
      return fields[it->second];
    };
    Article a;
    try {
      if (fields.size() != header.size()) {
        fail("expected " + std::to_string(header.size()) + " columns, found " + std::to_string(fields.size()));
      }
      a.id = *get("id");
      a.text = *get("text");
      if (auto p = get("paper_id")) a.paper_id = *p;
      auto f = parse_field(*get("field"));
      if (!f) fail("unknown field '" + *get("field") + "'");
      a.field = *f;
      auto d = Date::try_parse(*get("updated"));
      if (!d) fail("'updated' is not a valid ISO-8601 date");
      a.updated = *d;
      if (auto l = get("revision_label"); l && !trim(*l).empty()) {
        long long v = 0;
        try {
          std::size_t pos = 0;
          v = std::stoll(std::string(trim(*l)), &pos);
          if (pos != trim(*l).size()) fail("revision_label must be an integer");
        } catch (const std::logic_error&) {
          fail("revision_label must be an integer");
        }
        a.revision_label = parse_label(v);
      }
      if (auto ad = get("adopter"); ad && !trim(*ad).empty()) {
        auto v = ascii_lower(trim(*ad));
        if (v == "true" || v == "1") a.adopter_flag = true;
        else if (v == "false" || v == "0") a.adopter_flag = false;
        else fail("'adopter' must be true/false");
      }
      validate_core(a);
      result.articles.push_back(std::move(a));
      lines.push_back(rows[r].line);
    } catch (const RecordError& e) {
      result.issues.push_back({rows[r].line, a.id, (a.id.empty() ? "" : "record '" + a.id + "': ") + e.message});
    }
  }
  check_duplicates(result.articles, lines, result.issues);
  return result;
}

std::string describe(const std::vector<RecordIssue>& issues) {
  std::string msg = std::to_string(issues.size()) + " invalid corpus record(s):";
  for (const auto& is : issues) {
    msg += "\n  line " + std::to_string(is.line) + ": " + is.message;
  }
  return msg;
}

}  // namespace

std::string_view to_string(Field f) { return kFieldNames[static_cast<std::size_t>(f)]; }

std::optional<Field> parse_field(std::string_view s) {
  auto key = ascii_lower(trim(s));
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    if (key == ascii_lower(kFieldNames[i])) return kAllFields[i];
  }
  if (key == "eess" || key == "ee" || key == "ee&ss") return Field::EESS;
  return std::nullopt;
}

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Male: return "male";
    case Gender::Female: return "female";
    case Gender::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Gender> parse_gender(std::string_view s) {
  auto key = ascii_lower(trim(s));
  if (key == "male" || key == "m") return Gender::Male;
  if (key == "female" || key == "f") return Gender::Female;
  if (key == "unknown" || key.empty()) return Gender::Unknown;
  return std::nullopt;
}

std::string_view to_string(Ethnicity e) { return kEthnicityNames[static_cast<std::size_t>(e)]; }

std::optional<Ethnicity> parse_ethnicity(std::string_view s) {
  auto key = ascii_lower(trim(s));
  for (std::size_t i = 0; i < kEthnicityCount; ++i) {
    if (key == ascii_lower(kEthnicityNames[i])) return static_cast<Ethnicity>(i);
  }
  return std::nullopt;
}

std::optional<Format> parse_format(std::string_view s) {
  auto key = ascii_lower(trim(s));
  if (key == "jsonl") return Format::Jsonl;
  if (key == "csv") return Format::Csv;
  return std::nullopt;
}

CorpusError::CorpusError(std::vector<RecordIssue> issues)
    : ValidationError(describe(issues)), issues_(std::move(issues)) {}

LoadResult parse_corpus(std::string_view content, Format format) {
  return format == Format::Jsonl ? parse_jsonl(content) : parse_csv_corpus(content);
}

std::vector<Article> load_corpus(const std::filesystem::path& path, Format format) {
  if (!std::filesystem::exists(path)) throw ValidationError("corpus file '" + path.string() + "' does not exist");
  auto result = parse_corpus(io::read_file(path), format);
  if (!result.issues.empty()) throw CorpusError(std::move(result.issues));
  return std::move(result.articles);
}

std::string to_jsonl(const std::vector<Article>& articles) {
  std::string out;
  for (const auto& a : articles) {
    ordered_json obj;
    obj["id"] = a.id;
    if (a.paper_id != a.id) obj["paper_id"] = a.paper_id;
    obj["text"] = a.text;
    obj["field"] = std::string(to_string(a.field));
    obj["updated"] = a.updated.to_string();
    obj["revision_label"] = a.revision_label;
    if (a.adopter_flag) obj["adopter"] = *a.adopter_flag;
    if (a.revised_text) obj["revision"] = *a.revised_text;
    ordered_json authors = ordered_json::array();
    for (const auto& p : a.authors) {
      ordered_json au;
      au["name"] = p.name;
      au["country"] = p.country;
      au["gender"] = std::string(to_string(p.gender));
      au["ethnicity"] = std::string(to_string(p.ethnicity));
      au["papers_before_2021"] = p.papers_before_2021;
      if (p.first_paper_year) au["first_paper_year"] = *p.first_paper_year;
      authors.push_back(std::move(au));
    }
    obj["authors"] = std::move(authors);
    out += obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

LookupTable LookupTable::parse(std::string_view content) {
  LookupTable t;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError("lookup table line " + std::to_string(line_no) + ": expected name<TAB>class");
    }
    auto key = ascii_lower(trim(line.substr(0, tab)));
    auto value = std::string(trim(line.substr(tab + 1)));
    if (key.empty()) continue;
    t.entries_.insert_or_assign(std::move(key), std::move(value));
  }
  return t;
}

LookupTable LookupTable::load(const std::filesystem::path& path) { return parse(io::read_file(path)); }

std::optional<std::string> LookupTable::find(std::string_view name) const {
  auto it = entries_.find(ascii_lower(trim(name)));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

EnrichmentReport enrich_authors(std::vector<Article>& articles, const LookupTable* gender_table,
                                const LookupTable* ethnicity_table) {
  EnrichmentReport report;
  for (auto& a : articles) {
    for (auto& p : a.authors) {
      ++report.authors;
      if (gender_table) {
        p.gender = Gender::Unknown;
        if (auto v = gender_table->find(p.name)) {
          auto g = parse_gender(*v);
          if (!g) throw ValidationError("gender table maps '" + p.name + "' to unknown class '" + *v + "'");
          p.gender = *g;
          ++report.gender_matched;
        }
      }
      if (ethnicity_table) {
        p.ethnicity = Ethnicity::Other;
        if (auto v = ethnicity_table->find(p.name)) {
          auto e = parse_ethnicity(*v);
          if (!e) throw ValidationError("ethnicity table maps '" + p.name + "' to unknown class '" + *v + "'");
          p.ethnicity = *e;
          ++report.ethnicity_matched;
        }
      }
    }
  }
  return report;
}

std::string_view to_string(Nativeness n) {
  switch (n) {
    case Nativeness::Native: return "native";
    case Nativeness::NonNative: return "nonnative";
    case Nativeness::Partial: return "partial";
  }
  return "partial";
}

std::optional<Nativeness> parse_nativeness(std::string_view s) {
  auto key = ascii_lower(trim(s));
  if (key == "native") return Nativeness::Native;
  if (key == "nonnative" || key == "non-native") return Nativeness::NonNative;
  if (key == "partial") return Nativeness::Partial;
  return std::nullopt;
}

bool is_native_country(std::string_view iso2) {
  return std::find(kNativeCountries.begin(), kNativeCountries.end(), iso2) != kNativeCountries.end();
}

Nativeness classify_nativeness(const Article& article) {
  std::size_t known = 0, native = 0;
  for (const auto& p : article.authors) {
    if (p.country.empty()) continue;
    ++known;
    if (is_native_country(p.country)) ++native;
  }
  if (known == 0) return Nativeness::Partial;
  if (native == known) return Nativeness::Native;
  if (native == 0) return Nativeness::NonNative;
  return Nativeness::Partial;
}

std::string_view to_string(Seniority s) { return s == Seniority::Senior ? "senior" : "junior"; }

int academic_years(const AuthorProfile& author, int reference_year) {
  if (!author.first_paper_year) return 0;
  return std::max(0, reference_year - *author.first_paper_year);
}

Seniority classify_seniority(const Article& article, SeniorityMeasure measure, int threshold,
                             SeniorityMode mode) {
  if (article.authors.empty()) return Seniority::Junior;
  auto meets = [&](const AuthorProfile& p) {
    int value = measure == SeniorityMeasure::Papers ? p.papers_before_2021
                                                    : academic_years(p, article.updated.year());
    return value >= threshold;
  };
  bool senior = mode == SeniorityMode::AnyAuthor
                    ? std::any_of(article.authors.begin(), article.authors.end(), meets)
                    : std::all_of(article.authors.begin(), article.authors.end(), meets);
  return senior ? Seniority::Senior : Seniority::Junior;
}

std::vector<std::string> CovariateTable::column_names() {
  std::vector<std::string> names = {"pct_female", "pct_male", "pct_unknown_gender", "pct_native"};
  for (std::size_t e = 0; e + 1 < kEthnicityCount; ++e) {
    names.push_back("eth_" + std::string(to_string(static_cast<Ethnicity>(e))));
  }
  names.push_back("paper_seniority");
  names.push_back("year_seniority");
  for (auto f : kAllFields) {
    std::string n = "field_" + std::string(to_string(f));
    std::replace(n.begin(), n.end(), '&', '_');
    names.push_back(n);
  }
  return names;
}

std::vector<double> CovariateTable::matrix_row(std::size_t i) const {
  const auto& r = rows.at(i);
  std::vector<double> v = {r.pct_female, r.pct_male, r.pct_unknown_gender, r.pct_native};
  v.insert(v.end(), r.ethnicity_shares.begin(), r.ethnicity_shares.end());
  v.push_back(r.paper_seniority);
  v.push_back(r.year_seniority);
  for (int d : r.discipline_dummies) v.push_back(d);
  return v;
}

CovariateTable build_covariates(const std::vector<Article>& articles, bool normalize) {
  if (articles.empty()) throw ValidationError("cannot build covariates for an empty corpus");
  CovariateTable table;
  table.rows.reserve(articles.size());
  for (const auto& a : articles) {
    ArticleCovariates c;
    c.id = a.id;
    const double n = static_cast<double>(a.authors.size());
    if (a.authors.empty()) {
      c.pct_unknown_gender = 1.0;
    } else {
      std::size_t female = 0, male = 0, native = 0;
      std::array<std::size_t, kEthnicityCount> eth{};
      double papers = 0, years = 0;
      for (const auto& p : a.authors) {
        if (p.gender == Gender::Female) ++female;
        if (p.gender == Gender::Male) ++male;
        if (is_native_country(p.country)) ++native;
        ++eth[static_cast<std::size_t>(p.ethnicity)];
        papers += p.papers_before_2021;
        years += academic_years(p, a.updated.year());
      }
      c.pct_female = double(female) / n;
      c.pct_male = double(male) / n;
      c.pct_unknown_gender = double(a.authors.size() - female - male) / n;
      c.pct_native = double(native) / n;
      for (std::size_t e = 0; e + 1 < kEthnicityCount; ++e) c.ethnicity_shares[e] = double(eth[e]) / n;
      c.paper_seniority = papers / n;
      c.year_seniority = years / n;
    }
    c.discipline_dummies[static_cast<std::size_t>(a.field)] = 1;
    table.rows.push_back(std::move(c));
  }

  if (normalize) {
    auto zscore = [&](double ArticleCovariates::*member, const char* name) {
      const double n = static_cast<double>(table.rows.size());
      double mean = 0;
      for (const auto& r : table.rows) mean += r.*member;
      mean /= n;
      double var = 0;
      for (const auto& r : table.rows) var += (r.*member - mean) * (r.*member - mean);
      double sd = std::sqrt(var / n);
      if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
        table.degenerate_columns.emplace_back(name);
        table.warnings.push_back(std::string("column '") + name + "' has zero variance; left unscaled");
        return;
      }
      for (auto& r : table.rows) r.*member = (r.*member - mean) / sd;
    };
    zscore(&ArticleCovariates::paper_seniority, "paper_seniority");
    zscore(&ArticleCovariates::year_seniority, "year_seniority");

    // Share columns stay unscaled; constant ones are flagged.
    auto names = CovariateTable::column_names();
    const std::size_t share_cols = 4 + (kEthnicityCount - 1);
    for (std::size_t j = 0; j < share_cols; ++j) {
      double first = table.matrix_row(0)[j];
      bool constant = true;
      for (std::size_t i = 1; i < table.rows.size() && constant; ++i) {
        constant = table.matrix_row(i)[j] == first;
      }
      if (constant) {
        table.degenerate_columns.push_back(names[j]);
        table.warnings.push_back("column '" + names[j] + "' is constant across the corpus");
      }
    }
  }
  return table;
}

}  // namespace stylelens::corpus
