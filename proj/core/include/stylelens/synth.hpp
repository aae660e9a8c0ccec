#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stylelens/common.hpp"
#include "stylelens/corpus.hpp"

namespace stylelens::synth {

/// Deterministic pronounceable pseudo-word for a vocabulary index
/// ("bakotu"). Distinct indices below 343,000 give distinct words, and no
/// word carries an -ed/-ly/-er/-est suffix.
std::string synthetic_word(std::size_t index);

/// Joins words into sentences of `sentence_words` words, capitalized and
/// full-stopped.
std::string compose(const std::vector<std::string>& words, std::size_t sentence_words = 12);

/// Style populations: every label has its own marker vocabulary. A word of
/// a label-L text is one of L's markers with probability `marker_rate`,
/// one of the other styles' markers with total probability `cross_rate`,
/// and a shared word otherwise.
struct StyleOptions {
  std::size_t docs_per_label = 200;
  std::size_t words = 60;
  double marker_rate = 0.15;
  double cross_rate = 0.03;
  std::size_t markers_per_style = 40;
  std::size_t shared_vocab = 500;
  std::uint64_t seed = 20221130;
  Date start{2021, 1, 1};
  int days = 334;  // updated dates fall in [start, start + days)
  corpus::Field field = corpus::Field::CS;
  std::string id_prefix = "syn";
};

/// `labels` lists the revision labels generated, each with its own style.
std::vector<corpus::Article> style_corpus(const StyleOptions& opts, const std::vector<int>& labels);

/// One style-L text drawn with `rng`; `styles` is the number of styles in
/// play and `style` the index of L among them.
std::string style_text(const StyleOptions& opts, std::size_t style, std::size_t styles, std::mt19937_64& rng);

/// Texts with uniformly drawn word counts in [min_words, max_words];
/// `lengths` records each draw.
struct WordCountCorpus {
  std::vector<corpus::Article> articles;
  std::vector<std::size_t> lengths;
};
WordCountCorpus word_count_corpus(std::size_t n, std::size_t min_words, std::size_t max_words, std::uint64_t seed);

/// Exactly round(rate * n) texts contain one hedge word; the rest contain
/// none.
std::vector<corpus::Article> hedge_corpus(std::size_t n, double rate, std::uint64_t seed);

/// Two groups (field CS = A, field Maths = B), `per_month` articles per
/// group per month. From `event` on, exactly round(rate * per_month)
/// articles per month are revised (label 1, revised style); all others are
/// originals.
struct AdoptionOptions {
  Month start{2022, 1};
  Month end{2023, 12};
  Month event{2022, 11};
  std::size_t per_month = 400;
  double rate_a = 0.15;
  double rate_b = 0.0;
  StyleOptions style;
};
std::vector<corpus::Article> adoption_corpus(const AdoptionOptions& opts);

/// Two groups drawing words uniformly from overlapping index ranges:
/// A (field CS) from [0, vocab), B (field Maths) from [vocab - overlap,
/// 2 vocab - overlap). The expected centroid cosine is overlap / vocab.
struct OverlapOptions {
  Month start{2022, 1};
  Month end{2022, 12};
  std::size_t per_month = 50;
  std::size_t words = 200;
  std::size_t vocab = 100;
  std::size_t overlap = 50;
  std::uint64_t seed = 20221130;
};
std::vector<corpus::Article> overlap_corpus(const OverlapOptions& opts);

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike the
/// std distributions this is identical across standard libraries.
double unit_uniform(std::mt19937_64& rng);

}  // namespace stylelens::synth
