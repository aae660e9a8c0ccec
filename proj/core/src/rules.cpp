#include "stylelens/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stylelens/common.hpp"
#include "stylelens/io.hpp"

namespace stylelens::rules {

const std::array<std::string_view, RuleVector::kSize>& RuleVector::names() {
  static const std::array<std::string_view, kSize> n = {
      "rule1a", "rule1b", "rule2", "rule4", "rule5", "rule7a",
      "rule7b", "rule8", "rule9", "rule10a", "rule10b"};
  return n;
}

std::array<double, RuleVector::kSize> RuleVector::values() const {
  return {rule1a, rule1b, rule2, rule4, rule5, rule7a, rule7b, rule8, rule9, rule10a, rule10b};
}

bool is_superlative(std::string_view w, const text::LexiconSet& lex) {
  if (w == "best" || w == "most" || w == "worst" || w == "least" || w == "furthest" || w == "farthest") {
    return true;
  }
  return text::has_adjective_stem(w, "est", lex);
}

bool is_comparative(std::string_view w, const text::LexiconSet& lex) {
  if (w == "better" || w == "more" || w == "worse" || w == "less" || w == "further" || w == "farther") {
    return true;
  }
  return text::has_adjective_stem(w, "er", lex);
}

Measurement measure(const text::TokenizedText& tagged, const text::LexiconSet& lex, const RuleOptions& opts) {
  Measurement m;
  auto& r = m.values;
  const std::size_t words = tagged.tokens.size();
  const std::size_t sentences = tagged.sentences.size();
  r.rule1a = static_cast<double>(words);
  r.rule1b = static_cast<double>(sentences);

  if (sentences == 0) {
    m.mask.rule2 = true;
  } else {
    std::size_t short_count = 0;
    for (const auto& s : tagged.sentences) {
      if (s.size() < opts.short_sentence_words) ++short_count;
    }
    r.rule2 = 100.0 * double(short_count) / double(sentences);
  }

  std::size_t present = 0, past = 0, modifiers = 0, superl = 0, compar = 0;
  std::size_t novelty = 0, importance = 0, hedges = 0, pleasant = 0, unpleasant = 0;
  for (const auto& t : tagged.tokens) {
    switch (t.tag) {
      case text::Tag::VerbPresent: ++present; break;
      case text::Tag::VerbPast: ++past; break;
      case text::Tag::Adj:
      case text::Tag::Adv: ++modifiers; break;
      case text::Tag::Other: break;
    }
    if (is_superlative(t.lower, lex)) ++superl;
    else if (is_comparative(t.lower, lex)) ++compar;
    novelty += lex.novelty.count(t.lower);
    importance += lex.importance.count(t.lower);
    hedges += lex.hedges.count(t.lower);
    pleasant += lex.pleasant.count(t.lower);
    unpleasant += lex.unpleasant.count(t.lower);
  }

  if (present + past == 0) {
    r.rule4 = 50.0;
    m.mask.rule4 = true;
  } else {
    r.rule4 = 100.0 * double(present) / double(present + past);
  }
  if (words == 0) {
    m.mask.rule5 = true;
  } else {
    r.rule5 = 100.0 * double(modifiers) / double(words);
  }
  if (superl + compar == 0) {
    m.mask.rule8 = true;
  } else {
    r.rule8 = 100.0 * double(superl) / double(superl + compar);
  }

  if (opts.scale == IndicatorScale::Presence) {
    r.rule7a = novelty ? 100.0 : 0.0;
    r.rule7b = importance ? 100.0 : 0.0;
    r.rule9 = hedges ? 100.0 : 0.0;
    r.rule10a = 100.0 * double(pleasant);
    r.rule10b = 100.0 * double(unpleasant);
  } else {
    r.rule7a = double(novelty);
    r.rule7b = double(importance);
    r.rule9 = double(hedges);
    r.rule10a = double(pleasant);
    r.rule10b = double(unpleasant);
  }
  return m;
}

Measurement measure(std::string_view txt, const text::LexiconSet& lex, const RuleOptions& opts) {
  auto tokens = text::tokenize(txt);
  text::tag_tokens(tokens, lex);
  return measure(tokens, lex, opts);
}

std::vector<RuleRow> measure_corpus(const std::vector<corpus::Article>& articles, const text::LexiconSet& lex,
                                    const RuleOptions& opts) {
  std::vector<const corpus::Article*> order;
  order.reserve(articles.size());
  for (const auto& a : articles) order.push_back(&a);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<RuleRow> rows(order.size());
  io::parallel_for(order.size(), [&](std::size_t i) {
    try {
      auto m = measure(order[i]->text, lex, opts);
      rows[i] = {order[i]->id, m.values, m.mask};
    } catch (const std::exception& e) {
      throw Error("article '" + order[i]->id + "': " + e.what());
    }
  });
  return rows;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - double(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<ColumnSummary> summarize(const std::vector<RuleRow>& table) {
  if (table.empty()) throw ValidationError("cannot summarize an empty rule table");
  std::vector<ColumnSummary> out;
  const double n = double(table.size());
  for (std::size_t c = 0; c < RuleVector::kSize; ++c) {
    std::vector<double> col;
    col.reserve(table.size());
    for (const auto& row : table) col.push_back(row.values[c]);
    ColumnSummary s;
    s.name = RuleVector::names()[c];
    double sum = 0;
    for (double x : col) sum += x;
    s.mean = sum / n;
    double ss = 0;
    for (double x : col) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / n);
    s.min = *std::min_element(col.begin(), col.end());
    s.max = *std::max_element(col.begin(), col.end());
    s.p25 = quantile(col, 0.25);
    s.p75 = quantile(col, 0.75);
    out.push_back(s);
  }
  return out;
}

std::string rules_csv(const std::vector<RuleRow>& table) {
  std::vector<std::string> header = {"id"};
  for (auto n : RuleVector::names()) header.emplace_back(n);
  std::string out = io::csv_line(header);
  for (const auto& row : table) {
    std::vector<std::string> f = {row.id};
    for (double v : row.values.values()) f.push_back(io::format_double(v));
    out += io::csv_line(f);
  }
  return out;
}

std::string mask_csv(const std::vector<RuleRow>& table) {
  std::string out = "id,rule2_default,rule4_default,rule5_default,rule8_default\n";
  for (const auto& row : table) {
    out += io::csv_line({row.id, row.mask.rule2 ? "1" : "0", row.mask.rule4 ? "1" : "0",
                         row.mask.rule5 ? "1" : "0", row.mask.rule8 ? "1" : "0"});
  }
  return out;
}

std::string summary_csv(const std::vector<ColumnSummary>& summary) {
  std::string out = "rule,mean,sd,p25,p75,min,max\n";
  for (const auto& s : summary) {
    out += io::csv_line({std::string(s.name), io::format_double(s.mean), io::format_double(s.sd),
                         io::format_double(s.p25), io::format_double(s.p75), io::format_double(s.min),
                         io::format_double(s.max)});
  }
  return out;
}

std::string summary_text(const std::vector<ColumnSummary>& summary) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %10s %10s %10s %10s %10s %10s\n", "", "Mean", "SD", "p25", "p75",
                "Min", "Max");
  out += buf;
  for (const auto& s : summary) {
    std::string name(s.name);
    name[0] = 'R';
    std::snprintf(buf, sizeof buf, "%-10s %10.3f %10.3f %10.3f %10.3f %10.3f %10.3f\n", name.c_str(), s.mean,
                  s.sd, s.p25, s.p75, s.min, s.max);
    out += buf;
  }
  return out;
}

}  // namespace stylelens::rules
