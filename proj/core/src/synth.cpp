#include "stylelens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace stylelens::synth {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kMarkerBase = 100000;

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
}

Date date_plus(Date d, int days) {
  int y = d.year(), m = d.month(), day = d.day() + days;
  while (day > days_in_month(y, m)) {
    day -= days_in_month(y, m);
    if (++m > 12) {
      m = 1;
      ++y;
    }
  }
  return Date(y, m, day);
}

std::string make_id(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%06zu", i);
  return std::string(prefix) + buf;
}

corpus::Article make_article(std::string id, std::string text, corpus::Field field, Date updated, int label) {
  corpus::Article a;
  a.id = id;
  a.paper_id = std::move(id);
  a.text = std::move(text);
  a.field = field;
  a.updated = updated;
  a.revision_label = label;
  return a;
}

}  // namespace

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string synthetic_word(std::size_t index) {
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  std::string w;
  for (int k = 0; k < 3; ++k) {
    const std::size_t s = index % syllables;
    index /= syllables;
    w.push_back(kConsonants[s / kVowels.size()]);
    w.push_back(kVowels[s % kVowels.size()]);
  }
  return w;
}

std::string compose(const std::vector<std::string>& words, std::size_t sentence_words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const bool first = i % sentence_words == 0;
    if (i) out += ' ';
    std::string w = words[i];
    if (first && !w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    out += w;
    if ((i + 1) % sentence_words == 0 || i + 1 == words.size()) out += ".";
  }
  return out;
}

std::string style_text(const StyleOptions& opts, std::size_t style, std::size_t styles, std::mt19937_64& rng) {
  std::vector<std::string> words;
  words.reserve(opts.words);
  for (std::size_t i = 0; i < opts.words; ++i) {
    const double u = unit_uniform(rng);
    std::size_t index = 0;
    if (u < opts.marker_rate) {
      index = kMarkerBase + style * opts.markers_per_style + uniform_index(rng, opts.markers_per_style);
    } else if (u < opts.marker_rate + opts.cross_rate && styles > 1) {
      std::size_t other = uniform_index(rng, styles - 1);
      if (other >= style) ++other;
      index = kMarkerBase + other * opts.markers_per_style + uniform_index(rng, opts.markers_per_style);
    } else {
      index = uniform_index(rng, opts.shared_vocab);
    }
    words.push_back(synthetic_word(index));
  }
  return compose(words);
}

std::vector<corpus::Article> style_corpus(const StyleOptions& opts, const std::vector<int>& labels) {
  if (labels.empty()) throw ValidationError("style corpus needs at least one label");
  if (opts.marker_rate + opts.cross_rate > 1.0) throw ValidationError("marker rates exceed 1");
  std::mt19937_64 rng(opts.seed);
  std::vector<corpus::Article> out;
  std::size_t next_id = 0;
  for (std::size_t d = 0; d < opts.docs_per_label; ++d) {
    for (std::size_t s = 0; s < labels.size(); ++s) {
      auto text = style_text(opts, s, labels.size(), rng);
      const Date when = date_plus(opts.start, static_cast<int>(uniform_index(rng, static_cast<std::size_t>(opts.days))));
      out.push_back(make_article(make_id(opts.id_prefix, next_id++), std::move(text), opts.field, when, labels[s]));
    }
  }
  return out;
}

WordCountCorpus word_count_corpus(std::size_t n, std::size_t min_words, std::size_t max_words, std::uint64_t seed) {
  if (min_words > max_words) throw ValidationError("min_words exceeds max_words");
  std::mt19937_64 rng(seed);
  WordCountCorpus c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = min_words + uniform_index(rng, max_words - min_words + 1);
    std::vector<std::string> words;
    for (std::size_t w = 0; w < len; ++w) words.push_back(synthetic_word(uniform_index(rng, 2000)));
    c.lengths.push_back(len);
    c.articles.push_back(make_article(make_id("wc", i), compose(words), corpus::Field::Stats, Date(2021, 6, 1), 0));
  }
  return c;
}

std::vector<corpus::Article> hedge_corpus(std::size_t n, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto hedged = static_cast<std::size_t>(std::lround(rate * static_cast<double>(n)));
  std::vector<char> flag(n, 0);
  std::fill(flag.begin(), flag.begin() + static_cast<std::ptrdiff_t>(std::min(hedged, n)), 1);
  for (std::size_t i = n; i > 1; --i) std::swap(flag[i - 1], flag[static_cast<std::size_t>(rng() % i)]);
  std::vector<corpus::Article> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> words;
    for (std::size_t w = 0; w < 40; ++w) words.push_back(synthetic_word(uniform_index(rng, 2000)));
    if (flag[i]) words[1 + uniform_index(rng, words.size() - 1)] = "somewhat";
    out.push_back(make_article(make_id("hedge", i), compose(words), corpus::Field::Bio, Date(2021, 6, 1), 0));
  }
  return out;
}

std::vector<corpus::Article> adoption_corpus(const AdoptionOptions& opts) {
  if (opts.end < opts.start) throw ValidationError("adoption corpus end precedes start");
  std::mt19937_64 rng(opts.style.seed);
  std::vector<corpus::Article> out;
  std::size_t next_id = 0;
  struct Group {
    corpus::Field field;
    double rate;
  };
  const Group groups[] = {{corpus::Field::CS, opts.rate_a}, {corpus::Field::Maths, opts.rate_b}};
  for (Month m = opts.start; m <= opts.end; m = m.next()) {
    for (const auto& g : groups) {
      const std::size_t revised =
          opts.event <= m ? static_cast<std::size_t>(std::lround(g.rate * static_cast<double>(opts.per_month))) : 0;
      std::vector<char> flag(opts.per_month, 0);
      std::fill(flag.begin(), flag.begin() + static_cast<std::ptrdiff_t>(std::min(revised, opts.per_month)), 1);
      for (std::size_t i = flag.size(); i > 1; --i) std::swap(flag[i - 1], flag[static_cast<std::size_t>(rng() % i)]);
      for (std::size_t i = 0; i < opts.per_month; ++i) {
        const int label = flag[i] ? 1 : 0;
        auto text = style_text(opts.style, static_cast<std::size_t>(label), 2, rng);
        const int day = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(days_in_month(m.year(), m.month()))));
        out.push_back(make_article(make_id("adopt", next_id++), std::move(text), g.field, Date(m.year(), m.month(), day),
                                   label));
      }
    }
  }
  return out;
}

std::vector<corpus::Article> overlap_corpus(const OverlapOptions& opts) {
  if (opts.overlap > opts.vocab) throw ValidationError("overlap exceeds the vocabulary size");
  std::mt19937_64 rng(opts.seed);
  std::vector<corpus::Article> out;
  std::size_t next_id = 0;
  const std::size_t offset_b = opts.vocab - opts.overlap;
  for (Month m = opts.start; m <= opts.end; m = m.next()) {
    for (int g = 0; g < 2; ++g) {
      for (std::size_t i = 0; i < opts.per_month; ++i) {
        std::vector<std::string> words;
        for (std::size_t w = 0; w < opts.words; ++w) {
          words.push_back(synthetic_word((g ? offset_b : 0) + uniform_index(rng, opts.vocab)));
        }
        out.push_back(make_article(make_id("ovl", next_id++), compose(words),
                                   g ? corpus::Field::Maths : corpus::Field::CS, Date(m.year(), m.month(), 15), 0));
      }
    }
  }
  return out;
}

}  // namespace stylelens::synth
