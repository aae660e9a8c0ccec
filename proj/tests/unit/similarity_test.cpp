#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "stylelens/similarity.hpp"
#include "stylelens/synth.hpp"

using namespace stylelens;
using namespace stylelens::similarity;

namespace {

TermVector tv(std::vector<TermVector::Entry> w) { return TermVector::from_weights(std::move(w)); }

TermVector random_vector(oracle::Gen& g, std::uint32_t vocab) {
  std::vector<TermVector::Entry> w;
  const int n = g.integer(1, 12);
  for (int i = 0; i < n; ++i) w.emplace_back(static_cast<std::uint32_t>(g.integer(0, static_cast<int>(vocab) - 1)), g.uniform(0.1, 5));
  return tv(w);
}

corpus::Article art(std::string id, std::string text, corpus::Field f, Date d) {
  corpus::Article a;
  a.id = id;
  a.paper_id = std::move(id);
  a.text = std::move(text);
  a.field = f;
  a.updated = d;
  return a;
}

ConvergenceSeries series(const std::vector<double>& values, Month start = Month(2022, 5)) {
  ConvergenceSeries s;
  Month m = start;
  for (double v : values) {
    s.points.push_back({m, v, 1, 1});
    m = m.next();
  }
  return s;
}

}  // namespace

TEST(TermVectors, HandNormalization) {
  const auto vocab = Vocabulary::build({"a b a"});
  const auto v = vocab.vectorize("a b a");
  EXPECT_NEAR(v.weight(*vocab.id("a")), 2 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(v.weight(*vocab.id("b")), 1 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(vocab.vectorize("a a a").weight(*vocab.id("a")), 1.0);
}

TEST(TermVectors, OrderInvariance) {
  const auto vocab = Vocabulary::build({"x y z y"});
  const auto a = vocab.vectorize("x y z y");
  const auto b = vocab.vectorize("y z y x");
  EXPECT_EQ(a.entries(), b.entries());
}

TEST(TermVectors, EmptyInputThrows) {
  const auto vocab = Vocabulary::build({"a"});
  EXPECT_THROW(vocab.vectorize(""), ValidationError);
  EXPECT_THROW(vocab.vectorize("zzz"), ValidationError);
  EXPECT_THROW(tv({{1, 0.0}}), ValidationError);
}

TEST(TermVectors, StopwordsAndIdf) {
  const auto plain = Vocabulary::build({"the cat", "the dog"});
  const auto stop = Vocabulary::build({"the cat", "the dog"}, {true, false});
  EXPECT_TRUE(plain.id("the"));
  EXPECT_FALSE(stop.id("the"));
  const auto idf = Vocabulary::build({"the cat", "the dog"}, {false, true});
  const auto v = idf.vectorize("the cat");
  EXPECT_LT(v.weight(*idf.id("the")), v.weight(*idf.id("cat")));
}

TEST(Cosine, ExactIdentities) {
  oracle::Gen g(21);
  for (int t = 0; t < 300; ++t) {
    const auto a = random_vector(g, 30);
    const auto b = random_vector(g, 30);
    EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
    EXPECT_NEAR(cosine(a, b), cosine(b, a), 1e-12);
    EXPECT_GE(cosine(a, b), 0.0);
    EXPECT_LE(cosine(a, b), 1.0);
  }
  EXPECT_EQ(cosine(tv({{1, 1}, {2, 3}}), tv({{3, 1}, {4, 2}})), 0.0);
  EXPECT_NEAR(cosine(tv({{0, 1}, {1, 1}}), tv({{0, 1}})), 0.7071, 1e-4);
}

TEST(Centroid, SmallCases) {
  const auto a = tv({{0, 1}});
  const auto b = tv({{1, 1}});
  const auto c = group_centroid(std::vector<TermVector>{a, b});
  EXPECT_NEAR(c.weight(0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.weight(1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(group_centroid(std::vector<TermVector>{}), ValidationError);
}

TEST(Centroid, IdempotenceProperty) {
  oracle::Gen g(4);
  for (int t = 0; t < 100; ++t) {
    const auto v = random_vector(g, 50);
    const auto one = group_centroid(std::vector<TermVector>{v});
    const auto two = group_centroid(std::vector<TermVector>{v, v});
    ASSERT_EQ(one.entries().size(), v.entries().size());
    for (std::size_t i = 0; i < v.entries().size(); ++i) {
      EXPECT_NEAR(one.entries()[i].second, v.entries()[i].second, 1e-12);
      EXPECT_NEAR(two.entries()[i].second, v.entries()[i].second, 1e-12);
    }
  }
}

TEST(GroupFilters, ParseAndMatch) {
  auto a = art("a", "x", corpus::Field::CS, Date(2021, 3, 1));
  a.revision_label = 2;
  EXPECT_TRUE(GroupFilter::parse("").matches(a));
  EXPECT_TRUE(GroupFilter::parse("field=CS,label=2").matches(a));
  EXPECT_FALSE(GroupFilter::parse("field=Maths").matches(a));
  EXPECT_TRUE(GroupFilter::parse("adopter=true").matches(a));
  EXPECT_TRUE(GroupFilter::parse("year=2021").matches(a));
  EXPECT_THROW(GroupFilter::parse("colour=red"), ValidationError);
  EXPECT_THROW(GroupFilter::parse("field=Chemistry"), ValidationError);
}

TEST(Series, SelfComparisonIsOne) {
  std::vector<corpus::Article> arts;
  for (int m = 1; m <= 4; ++m) {
    arts.push_back(art("a" + std::to_string(m), "alpha beta gamma", corpus::Field::CS, Date(2022, m, 3)));
    arts.push_back(art("b" + std::to_string(m), "beta delta", corpus::Field::CS, Date(2022, m, 9)));
  }
  const auto f = GroupFilter::parse("field=CS");
  const auto s = pairwise_series(arts, f, f, SeriesMode::Centroid);
  ASSERT_EQ(s.points.size(), 4u);
  for (const auto& p : s.points) EXPECT_NEAR(*p.value, 1.0, 1e-12);
}

TEST(Series, EmptyMonthIsMissing) {
  std::vector<corpus::Article> arts = {art("a1", "alpha", corpus::Field::CS, Date(2022, 1, 3)),
                                       art("b1", "alpha", corpus::Field::Maths, Date(2022, 1, 3)),
                                       art("a3", "alpha", corpus::Field::CS, Date(2022, 3, 3)),
                                       art("b3", "beta", corpus::Field::Maths, Date(2022, 3, 3))};
  const auto s = pairwise_series(arts, GroupFilter::parse("field=CS"), GroupFilter::parse("field=Maths"),
                                 SeriesMode::Centroid);
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_NEAR(*s.points[0].value, 1.0, 1e-12);
  EXPECT_FALSE(s.points[1].value.has_value());
  EXPECT_NEAR(*s.points[2].value, 0.0, 1e-12);
}

TEST(Series, ArticleVsIdenticalRevision) {
  std::vector<corpus::Article> arts;
  for (int m = 1; m <= 3; ++m) {
    auto a = art("p" + std::to_string(m), "we fit a model to data", corpus::Field::CS, Date(2022, m, 1));
    a.revised_text = a.text;
    arts.push_back(a);
  }
  const auto s = pairwise_series(arts, GroupFilter(), GroupFilter(), SeriesMode::ArticleVsRevision);
  for (const auto& p : s.points) EXPECT_NEAR(*p.value, 1.0, 1e-12);
}

TEST(Series, OverlapGeneratorMatchesClosedForm) {
  synth::OverlapOptions o;
  const auto arts = synth::overlap_corpus(o);
  const auto s = pairwise_series(arts, GroupFilter::parse("field=CS"), GroupFilter::parse("field=Maths"),
                                 SeriesMode::Centroid);
  ASSERT_EQ(s.points.size(), 12u);
  for (const auto& p : s.points) EXPECT_NEAR(*p.value, 0.5, 0.02);
}

TEST(Series, CsvRoundTrip) {
  auto s = series({0.25, 0.5});
  s.points[1].value.reset();
  s.group_a = "field=CS";
  s.group_b = "all";
  const auto back = parse_series_csv(series_csv(s));
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_EQ(*back.points[0].value, 0.25);
  EXPECT_FALSE(back.points[1].value);
}

TEST(DiD, IdenticalSeriesGiveZero) {
  const auto s = series({0.3, 0.31, 0.29, 0.3, 0.32, 0.3, 0.31, 0.3});
  const auto r = did_statistic(s, s, Month(2022, 9));
  EXPECT_EQ(r.did, 0.0);
  EXPECT_EQ(r.ci_low, 0.0);
  EXPECT_EQ(r.ci_high, 0.0);
}

TEST(DiD, StepSeriesAndAntisymmetry) {
  oracle::Gen g(12);
  std::vector<double> t, c;
  for (int i = 0; i < 24; ++i) {
    const double noise = 0.005 * g.normal();
    c.push_back(0.4 + 0.005 * g.normal());
    t.push_back(0.4 + noise + (i >= 12 ? 0.1 : 0.0));
  }
  const auto treated = series(t, Month(2021, 11));
  const auto control = series(c, Month(2021, 11));
  const auto r = did_statistic(treated, control, Month(2022, 11));
  EXPECT_NEAR(r.did, 0.1, 0.01);
  EXPECT_LE(r.ci_low, 0.1);
  EXPECT_GE(r.ci_high, 0.1);
  EXPECT_EQ(r.pre_months, 12u);
  const auto swapped = did_statistic(control, treated, Month(2022, 11));
  EXPECT_NEAR(swapped.did, -r.did, 1e-15);
}

TEST(DiD, ExactStepWithoutNoise) {
  std::vector<double> t(10, 0.5), c(10, 0.5);
  for (int i = 5; i < 10; ++i) t[static_cast<std::size_t>(i)] += 0.1;
  const auto r = did_statistic(series(t), series(c), Month(2022, 10));
  EXPECT_NEAR(r.did, 0.1, 1e-12);
  EXPECT_LE(r.ci_low, r.did + 1e-12);
  EXPECT_GE(r.ci_high, r.did - 1e-12);
}

TEST(DiD, InsufficientCoverageThrows) {
  const auto s = series({0.1, 0.2, 0.3});
  EXPECT_THROW(did_statistic(s, s, Month(2022, 6)), ValidationError);
}

TEST(DiD, SameSeedSameInterval) {
  oracle::Gen g(1);
  std::vector<double> t, c;
  for (int i = 0; i < 16; ++i) {
    t.push_back(g.unit());
    c.push_back(g.unit());
  }
  const auto a = did_statistic(series(t), series(c), Month(2022, 9));
  const auto b = did_statistic(series(t), series(c), Month(2022, 9));
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
}
