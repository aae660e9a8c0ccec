#include <gtest/gtest.h>

#include <set>

#include "stylelens/synth.hpp"
#include "stylelens/textproc.hpp"

using namespace stylelens;
using namespace stylelens::synth;

TEST(Synth, WordsAreDistinctAndSuffixFree) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < 5000; ++i) seen.insert(synthetic_word(i));
  for (std::size_t i = 100000; i < 100400; ++i) seen.insert(synthetic_word(i));
  EXPECT_EQ(seen.size(), 5400u);
  for (const auto& w : seen) {
    EXPECT_EQ(w.size(), 6u);
    EXPECT_NE(text::tag_word(w, text::LexiconSet::builtin()), text::Tag::VerbPast) << w;
    EXPECT_NE(text::tag_word(w, text::LexiconSet::builtin()), text::Tag::Adv) << w;
  }
}

TEST(Synth, ComposeMakesSentences) {
  const auto t = compose({"aa", "bb", "cc", "dd", "ee"}, 2);
  EXPECT_EQ(t, "Aa bb. Cc dd. Ee.");
  EXPECT_EQ(text::tokenize(t).sentences.size(), 3u);
}

TEST(Synth, StyleCorpusIsDeterministic) {
  StyleOptions o;
  o.docs_per_label = 30;
  const auto a = style_corpus(o, {0, 1});
  const auto b = style_corpus(o, {0, 1});
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 60u);
  EXPECT_EQ(a[0].id, "syn-000000");
  EXPECT_EQ(a[1].revision_label, 1);
  for (const auto& art : a) {
    EXPECT_GE(art.updated, Date(2021, 1, 1));
    EXPECT_LE(art.updated, Date(2021, 11, 30));
    EXPECT_EQ(text::word_tokens(art.text).size(), 60u);
  }
  o.seed = 1;
  EXPECT_NE(style_corpus(o, {0, 1}), a);
}

TEST(Synth, MarkerRateMatchesOptions) {
  StyleOptions o;
  o.docs_per_label = 300;
  std::size_t own = 0, total = 0;
  const auto own_first = synthetic_word(100000);
  std::set<std::string> own_markers;
  for (std::size_t i = 0; i < o.markers_per_style; ++i) own_markers.insert(synthetic_word(100000 + i));
  for (const auto& a : style_corpus(o, {0, 1})) {
    if (a.revision_label != 0) continue;
    for (const auto& w : text::word_tokens(a.text)) {
      ++total;
      own += own_markers.count(ascii_lower(w));
    }
  }
  EXPECT_NEAR(double(own) / double(total), o.marker_rate, 0.01);
  EXPECT_FALSE(own_first.empty());
}

TEST(Synth, AdoptionInjectsExactCounts) {
  AdoptionOptions o;
  o.per_month = 100;
  o.style.words = 5;
  const auto arts = adoption_corpus(o);
  EXPECT_EQ(arts.size(), 24u * 2u * 100u);
  std::size_t revised_a = 0, revised_b = 0, pre = 0;
  for (const auto& a : arts) {
    if (a.revision_label == 0) continue;
    if (a.month() < o.event) ++pre;
    (a.field == corpus::Field::CS ? revised_a : revised_b) += 1;
  }
  EXPECT_EQ(pre, 0u);
  EXPECT_EQ(revised_a, 14u * 15u);
  EXPECT_EQ(revised_b, 0u);
}

TEST(Synth, HedgeAndWordCountGenerators) {
  const auto h = hedge_corpus(500, 0.044, 3);
  std::size_t hedged = 0;
  for (const auto& a : h) hedged += a.text.find("somewhat") != std::string::npos;
  EXPECT_EQ(hedged, 22u);
  const auto w = word_count_corpus(50, 10, 12, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_GE(w.lengths[i], 10u);
    EXPECT_LE(w.lengths[i], 12u);
    EXPECT_EQ(text::word_tokens(w.articles[i].text).size(), w.lengths[i]);
  }
}

TEST(Synth, UnitUniformRange) {
  std::mt19937_64 rng(0);
  for (int i = 0; i < 10000; ++i) {
    const double u = unit_uniform(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
