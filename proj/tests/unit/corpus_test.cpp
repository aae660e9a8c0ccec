#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "stylelens/corpus.hpp"
#include "stylelens/io.hpp"

using namespace stylelens;
using namespace stylelens::corpus;

namespace {

const std::filesystem::path kFixtures = STYLELENS_FIXTURES;

AuthorProfile author(std::string name, std::string country, int papers = 0, std::optional<int> first = {}) {
  AuthorProfile p;
  p.name = std::move(name);
  p.country = std::move(country);
  p.papers_before_2021 = papers;
  p.first_paper_year = first;
  return p;
}

Article article_with(std::vector<AuthorProfile> authors, Date updated = Date(2021, 6, 1)) {
  Article a;
  a.id = "x";
  a.paper_id = "x";
  a.text = "t";
  a.updated = updated;
  a.authors = std::move(authors);
  return a;
}

}  // namespace

TEST(CorpusLoad, ThreeValidRecords) {
  const auto articles = load_corpus(kFixtures / "small.jsonl", Format::Jsonl);
  ASSERT_EQ(articles.size(), 3u);
  EXPECT_EQ(articles[1].revision_label, 2);
  EXPECT_EQ(articles[2].field, Field::EESS);
  EXPECT_EQ(articles[0].paper_id, "s-1");
  EXPECT_EQ(articles[0].authors.size(), 2u);
}

TEST(CorpusLoad, CsvRecords) {
  const auto articles = load_corpus(kFixtures / "small.csv", Format::Csv);
  ASSERT_EQ(articles.size(), 2u);
  EXPECT_EQ(articles[1].text, "Adam converges, fast.");
  EXPECT_TRUE(articles[1].adopter_flag.value_or(false));
  EXPECT_FALSE(articles[0].adopter_flag.has_value());
}

TEST(CorpusLoad, OutOfRangeLabelNamesTheRecord) {
  const auto r = parse_corpus(
      R"({"id":"ok","text":"a","field":"CS","updated":"2021-01-01"}
{"id":"bad-label","text":"b","field":"CS","updated":"2021-01-01","revision_label":9}
)",
      Format::Jsonl);
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].line, 2u);
  EXPECT_EQ(r.issues[0].id, "bad-label");
  EXPECT_NE(r.issues[0].message.find("bad-label"), std::string::npos);
}

TEST(CorpusLoad, DuplicateIdsListBothLines) {
  try {
    load_corpus(kFixtures / "duplicate_ids.jsonl", Format::Jsonl);
    FAIL() << "expected CorpusError";
  } catch (const CorpusError& e) {
    ASSERT_EQ(e.issues().size(), 2u);
    EXPECT_NE(e.issues()[0].message.find("dup-03"), std::string::npos);
    EXPECT_NE(e.issues()[0].message.find("lines 4 and 6"), std::string::npos);
    EXPECT_NE(e.issues()[1].message.find("lines 9 and 12"), std::string::npos);
  }
}

TEST(CorpusLoad, MalformedLinesAreAllReported) {
  const auto r = parse_corpus("{\"id\":\"a\"\n\n{\"id\":\"b\",\"text\":\" \",\"field\":\"CS\",\"updated\":\"2021-01-01\"}\n"
                              "{\"id\":\"c\",\"text\":\"x\",\"field\":\"Chem\",\"updated\":\"2021-01-01\"}\n"
                              "{\"id\":\"d\",\"text\":\"x\",\"field\":\"CS\",\"updated\":\"2021-02-30\"}\n",
                              Format::Jsonl);
  EXPECT_TRUE(r.articles.empty());
  ASSERT_EQ(r.issues.size(), 4u);
  EXPECT_EQ(r.issues[0].line, 1u);
  EXPECT_EQ(r.issues[1].line, 3u);
  EXPECT_EQ(r.issues[3].line, 5u);
}

TEST(CorpusLoad, MissingFileIsValidationError) {
  EXPECT_THROW(load_corpus(kFixtures / "absent.jsonl", Format::Jsonl), ValidationError);
}

TEST(CorpusJsonl, RoundTripProperty) {
  oracle::Gen g(99);
  for (int t = 0; t < 50; ++t) {
    std::vector<Article> in;
    const int n = g.integer(1, 8);
    for (int i = 0; i < n; ++i) {
      Article a;
      a.id = "id-" + std::to_string(t) + "-" + std::to_string(i);
      a.paper_id = g.coin() ? a.id : "paper-" + std::to_string(i);
      a.text = g.word() + " \"quoted\" " + g.word() + "\n" + g.word();
      a.field = kAllFields[static_cast<std::size_t>(g.integer(0, 7))];
      a.updated = Date(g.integer(2000, 2024), g.integer(1, 12), g.integer(1, 28));
      a.revision_label = g.integer(0, 6);
      if (g.coin()) a.adopter_flag = g.coin();
      if (g.coin()) a.revised_text = g.word();
      const int authors = g.integer(0, 3);
      for (int k = 0; k < authors; ++k) {
        AuthorProfile p = author(g.word(), g.coin() ? "US" : "", g.integer(0, 40));
        p.gender = static_cast<Gender>(g.integer(0, 2));
        p.ethnicity = static_cast<Ethnicity>(g.integer(0, 8));
        if (g.coin()) p.first_paper_year = g.integer(1980, 2020);
        a.authors.push_back(p);
      }
      in.push_back(std::move(a));
    }
    const auto r = parse_corpus(to_jsonl(in), Format::Jsonl);
    ASSERT_TRUE(r.issues.empty()) << r.issues[0].message;
    EXPECT_EQ(r.articles, in);
  }
}

TEST(Lookup, CaseInsensitiveMatchAndDefaults) {
  auto articles = load_corpus(kFixtures / "small.jsonl", Format::Jsonl);
  const auto gender = LookupTable::load(kFixtures / "gender.tsv");
  const auto eth = LookupTable::load(kFixtures / "ethnicity.tsv");
  const auto report = enrich_authors(articles, &gender, &eth);
  EXPECT_EQ(report.authors, 3u);
  EXPECT_EQ(report.gender_matched, 2u);
  EXPECT_EQ(articles[0].authors[0].gender, Gender::Female);
  EXPECT_EQ(articles[0].authors[0].ethnicity, Ethnicity::British);
  EXPECT_EQ(articles[0].authors[1].gender, Gender::Unknown);
  EXPECT_EQ(articles[0].authors[1].ethnicity, Ethnicity::Other);
  EXPECT_EQ(articles[1].authors[0].gender, Gender::Male);
}

TEST(Lookup, InvalidClassIsRejected) {
  auto articles = load_corpus(kFixtures / "small.jsonl", Format::Jsonl);
  const auto bad = LookupTable::parse("alice\tunicorn\n");
  EXPECT_THROW(enrich_authors(articles, &bad, nullptr), ValidationError);
  EXPECT_THROW(LookupTable::parse("no tab here\n"), ValidationError);
}

TEST(Nativeness, CountryLists) {
  EXPECT_EQ(classify_nativeness(article_with({author("a", "US")})), Nativeness::Native);
  EXPECT_EQ(classify_nativeness(article_with({author("a", "CN")})), Nativeness::NonNative);
  EXPECT_EQ(classify_nativeness(article_with({author("a", "US"), author("b", "DE")})), Nativeness::Partial);
  EXPECT_EQ(classify_nativeness(article_with({author("a", "")})), Nativeness::Partial);
  EXPECT_EQ(classify_nativeness(article_with({author("a", "GB"), author("b", "")})), Nativeness::Native);
}

TEST(Seniority, PapersYearsAndModes) {
  EXPECT_EQ(classify_seniority(article_with({author("a", "US", 12)}), SeniorityMeasure::Papers), Seniority::Senior);
  EXPECT_EQ(classify_seniority(article_with({author("a", "US", 0, 2021)}), SeniorityMeasure::Years),
            Seniority::Junior);
  const auto pair = article_with({author("a", "", 3), author("b", "", 11)});
  EXPECT_EQ(classify_seniority(pair, SeniorityMeasure::Papers, 10, SeniorityMode::AnyAuthor), Seniority::Senior);
  EXPECT_EQ(classify_seniority(pair, SeniorityMeasure::Papers, 10, SeniorityMode::AllAuthors), Seniority::Junior);
  EXPECT_EQ(classify_seniority(article_with({author("a", "", 0, 2011)}), SeniorityMeasure::Years),
            Seniority::Senior);
}

TEST(Covariates, GenderShares) {
  auto a = article_with({author("a", "US"), author("b", "CN")});
  a.authors[0].gender = Gender::Female;
  a.authors[1].gender = Gender::Male;
  const auto t = build_covariates({a}, false);
  EXPECT_DOUBLE_EQ(t.rows[0].pct_female, 0.5);
  EXPECT_DOUBLE_EQ(t.rows[0].pct_male, 0.5);
  EXPECT_DOUBLE_EQ(t.rows[0].pct_native, 0.5);
}

TEST(Covariates, ConstantColumnIsFlagged) {
  std::vector<Article> all_male;
  for (int i = 0; i < 4; ++i) {
    auto a = article_with({author("m", "US", i)});
    a.authors[0].gender = Gender::Male;
    all_male.push_back(a);
  }
  const auto t = build_covariates(all_male, true);
  EXPECT_NE(std::find(t.degenerate_columns.begin(), t.degenerate_columns.end(), "pct_male"),
            t.degenerate_columns.end());
  EXPECT_FALSE(t.warnings.empty());
  for (const auto& r : t.rows) EXPECT_EQ(r.pct_male, 1.0);
}

TEST(Covariates, SeniorityZScores) {
  std::vector<Article> arts = {article_with({author("a", "", 0)}), article_with({author("b", "", 10)}),
                               article_with({author("c", "", 20)})};
  const auto t = build_covariates(arts, true);
  EXPECT_NEAR(t.rows[0].paper_seniority, -1.2247, 1e-4);
  EXPECT_NEAR(t.rows[1].paper_seniority, 0.0, 1e-12);
  EXPECT_NEAR(t.rows[2].paper_seniority, 1.2247, 1e-4);
  EXPECT_NEAR(t.rows[2].paper_seniority, std::sqrt(1.5), 1e-6);
}

TEST(Covariates, EmptyCorpusThrows) { EXPECT_THROW(build_covariates({}, false), ValidationError); }

TEST(Covariates, ColumnLayoutMatchesRows) {
  const auto arts = load_corpus(kFixtures / "small.jsonl", Format::Jsonl);
  const auto t = build_covariates(arts, false);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.matrix_row(i).size(), CovariateTable::column_names().size());
  }
  EXPECT_EQ(t.rows[2].discipline_dummies[static_cast<std::size_t>(Field::EESS)], 1);
}
