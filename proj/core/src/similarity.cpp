#include "stylelens/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "stylelens/io.hpp"
#include "stylelens/textproc.hpp"

namespace stylelens::similarity {

TermVector TermVector::from_weights(std::vector<Entry> weights) {
  std::sort(weights.begin(), weights.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  TermVector v;
  for (const auto& [id, w] : weights) {
    if (w < 0 || !std::isfinite(w)) throw ValidationError("term weights must be finite and non-negative");
    if (!v.entries_.empty() && v.entries_.back().first == id) v.entries_.back().second += w;
    else v.entries_.emplace_back(id, w);
  }
  std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0.0; });
  double ss = 0;
  for (const auto& e : v.entries_) ss += e.second * e.second;
  if (ss == 0) throw ValidationError("cannot normalize an all-zero term vector");
  double norm = std::sqrt(ss);
  for (auto& e : v.entries_) e.second /= norm;
  return v;
}

double TermVector::weight(std::uint32_t id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, std::uint32_t key) { return e.first < key; });
  return (it != entries_.end() && it->first == id) ? it->second : 0.0;
}

double TermVector::norm() const {
  double ss = 0;
  for (const auto& e : entries_) ss += e.second * e.second;
  return std::sqrt(ss);
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> set = {
      "a", "an", "the", "and", "or", "but", "if", "of", "in", "on", "at", "to", "for", "from", "by",
      "with", "as", "is", "are", "was", "were", "be", "been", "being", "this", "that", "these", "those",
      "it", "its", "we", "our", "they", "their", "he", "she", "his", "her", "which", "who", "whom", "what",
      "there", "than", "then", "so", "such", "not", "no", "can", "could", "may", "might", "will", "would",
      "shall", "should", "has", "have", "had", "do", "does", "did", "into", "over", "under", "also",
      "both", "each", "all", "any", "some", "more", "most", "other", "only", "very", "via", "about"};
  return set;
}

Vocabulary Vocabulary::build(const std::vector<std::string_view>& texts, VectorizerOptions opts) {
  Vocabulary v;
  v.opts_ = opts;
  std::vector<std::size_t> df;
  for (auto text : texts) {
    auto tokens = text::word_tokens(text);
    std::unordered_set<std::uint32_t> seen;
    for (auto& t : tokens) {
      if (opts.remove_stopwords && stopwords().count(t)) continue;
      auto [it, inserted] = v.ids_.emplace(t, static_cast<std::uint32_t>(v.terms_.size()));
      if (inserted) {
        v.terms_.push_back(t);
        df.push_back(0);
      }
      if (seen.insert(it->second).second) ++df[it->second];
    }
  }
  if (opts.idf) {
    const double n = double(texts.size());
    v.idf_.resize(df.size());
    for (std::size_t i = 0; i < df.size(); ++i) v.idf_[i] = std::log((1.0 + n) / (1.0 + double(df[i]))) + 1.0;
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TermVector Vocabulary::vectorize(std::string_view text) const {
  std::vector<TermVector::Entry> weights;
  for (auto& t : text::word_tokens(text)) {
    if (opts_.remove_stopwords && stopwords().count(t)) continue;
    auto it = ids_.find(t);
    if (it == ids_.end()) continue;
    weights.emplace_back(it->second, opts_.idf ? idf_[it->second] : 1.0);
  }
  if (weights.empty()) throw ValidationError("text has no in-vocabulary tokens to vectorize");
  return TermVector::from_weights(std::move(weights));
}

double cosine(const TermVector& a, const TermVector& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  double dot = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first < y[j].first) ++i;
    else if (y[j].first < x[i].first) ++j;
    else {
      dot += x[i].second * y[j].second;
      ++i;
      ++j;
    }
  }
  return std::clamp(dot, -1.0, 1.0);
}

TermVector group_centroid(const std::vector<const TermVector*>& vectors) {
  if (vectors.empty()) throw ValidationError("centroid of an empty group");
  std::map<std::uint32_t, double> sum;
  for (const auto* v : vectors) {
    for (const auto& [id, w] : v->entries()) sum[id] += w;
  }
  std::vector<TermVector::Entry> mean;
  mean.reserve(sum.size());
  const double n = double(vectors.size());
  for (const auto& [id, w] : sum) mean.emplace_back(id, w / n);
  return TermVector::from_weights(std::move(mean));
}

TermVector group_centroid(const std::vector<TermVector>& vectors) {
  std::vector<const TermVector*> ptrs;
  ptrs.reserve(vectors.size());
  for (const auto& v : vectors) ptrs.push_back(&v);
  return group_centroid(ptrs);
}

namespace {

bool parse_bool(std::string_view v) {
  auto key = ascii_lower(v);
  if (key == "true" || key == "1" || key == "yes") return true;
  if (key == "false" || key == "0" || key == "no") return false;
  throw ValidationError("expected true/false, got '" + std::string(v) + "'");
}

corpus::Seniority parse_seniority(std::string_view v) {
  auto key = ascii_lower(v);
  if (key == "senior") return corpus::Seniority::Senior;
  if (key == "junior") return corpus::Seniority::Junior;
  throw ValidationError("expected senior/junior, got '" + std::string(v) + "'");
}

}  // namespace

GroupFilter GroupFilter::parse(std::string_view spec) {
  std::vector<std::string> parts;
  for (auto& p : split(spec, ',')) {
    if (!trim(p).empty()) parts.emplace_back(trim(p));
  }
  return parse(parts);
}

GroupFilter GroupFilter::parse(const std::vector<std::string>& specs) {
  GroupFilter g;
  std::string desc;
  for (const auto& raw : specs) {
    auto spec = trim(raw);
    if (spec.empty()) continue;
    auto eq = spec.find('=');
    if (eq == std::string_view::npos) throw ValidationError("group filter '" + std::string(spec) + "' is not key=value");
    auto key = ascii_lower(trim(spec.substr(0, eq)));
    auto value = std::string(trim(spec.substr(eq + 1)));
    if (key == "field") {
      auto f = corpus::parse_field(value);
      if (!f) throw ValidationError("unknown field '" + value + "'");
      g.checks_.push_back([f = *f](const corpus::Article& a) { return a.field == f; });
    } else if (key == "adopter") {
      bool want = parse_bool(value);
      g.checks_.push_back([want](const corpus::Article& a) { return a.is_adopter() == want; });
    } else if (key == "native" || key == "nativeness") {
      auto n = corpus::parse_nativeness(value);
      if (!n) throw ValidationError("expected native/nonnative/partial, got '" + value + "'");
      g.checks_.push_back([n = *n](const corpus::Article& a) { return corpus::classify_nativeness(a) == n; });
    } else if (key == "seniority" || key == "seniority_papers") {
      auto s = parse_seniority(value);
      g.checks_.push_back([s](const corpus::Article& a) {
        return corpus::classify_seniority(a, corpus::SeniorityMeasure::Papers) == s;
      });
    } else if (key == "seniority_years") {
      auto s = parse_seniority(value);
      g.checks_.push_back([s](const corpus::Article& a) {
        return corpus::classify_seniority(a, corpus::SeniorityMeasure::Years) == s;
      });
    } else if (key == "gender") {
      auto gender = corpus::parse_gender(value);
      if (!gender || *gender == corpus::Gender::Unknown) throw ValidationError("expected male/female, got '" + value + "'");
      g.checks_.push_back([gd = *gender](const corpus::Article& a) {
        if (a.authors.empty()) return false;
        std::size_t hits = 0;
        for (const auto& p : a.authors) hits += p.gender == gd;
        return 2 * hits >= a.authors.size();
      });
    } else if (key == "label") {
      int label = -1;
      try {
        label = std::stoi(value);
      } catch (...) {
      }
      if (label < 0 || label > corpus::kMaxRevisionLabel) throw ValidationError("label must be 0..6");
      g.checks_.push_back([label](const corpus::Article& a) { return a.revision_label == label; });
    } else if (key == "year") {
      int year = 0;
      try {
        year = std::stoi(value);
      } catch (...) {
        throw ValidationError("year must be an integer");
      }
      g.checks_.push_back([year](const corpus::Article& a) { return a.updated.year() == year; });
    } else {
      throw ValidationError("unknown group filter key '" + key + "'");
    }
    if (!desc.empty()) desc += ",";
    desc += key + "=" + value;
  }
  if (!desc.empty()) g.description_ = desc;
  return g;
}

bool GroupFilter::matches(const corpus::Article& a) const {
  return std::all_of(checks_.begin(), checks_.end(), [&](const auto& c) { return c(a); });
}

std::optional<SeriesMode> parse_series_mode(std::string_view s) {
  auto key = ascii_lower(s);
  if (key == "centroid") return SeriesMode::Centroid;
  if (key == "article_vs_revision" || key == "article") return SeriesMode::ArticleVsRevision;
  return std::nullopt;
}

ConvergenceSeries pairwise_series(const std::vector<corpus::Article>& articles, const GroupFilter& group_a,
                                  const GroupFilter& group_b, SeriesMode mode, const SeriesOptions& opts) {
  ConvergenceSeries series;
  series.group_a = group_a.description();
  series.group_b = mode == SeriesMode::Centroid ? group_b.description() : "revision";

  std::vector<std::size_t> in_a, in_b;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    if (group_a.matches(articles[i])) in_a.push_back(i);
    if (mode == SeriesMode::Centroid && group_b.matches(articles[i])) in_b.push_back(i);
  }
  if (in_a.empty() && in_b.empty()) throw ValidationError("no article matches either group");

  // One vocabulary for every text that takes part in the run.
  std::vector<std::string_view> texts;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    texts.push_back(articles[i].text);
    if (articles[i].revised_text) texts.push_back(*articles[i].revised_text);
  }
  auto vocab = Vocabulary::build(texts, opts.vectorizer);

  std::vector<std::optional<TermVector>> vec(articles.size());
  std::vector<double> pair_cos(articles.size(), 0.0);
  std::vector<char> needed(articles.size(), 0);
  for (auto i : in_a) needed[i] = 1;
  for (auto i : in_b) needed[i] = 1;
  if (mode == SeriesMode::ArticleVsRevision) {
    for (auto i : in_a) {
      if (!articles[i].revised_text) {
        throw ValidationError("article '" + articles[i].id + "' has no paired revision text");
      }
    }
  }
  io::parallel_for(articles.size(), [&](std::size_t i) {
    if (!needed[i]) return;
    try {
      vec[i] = vocab.vectorize(articles[i].text);
      if (mode == SeriesMode::ArticleVsRevision) {
        pair_cos[i] = cosine(*vec[i], vocab.vectorize(*articles[i].revised_text));
      }
    } catch (const ValidationError& e) {
      throw ValidationError("article '" + articles[i].id + "': " + e.what());
    }
  });

  std::map<Month, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_month;
  for (auto i : in_a) by_month[articles[i].month()].first.push_back(i);
  for (auto i : in_b) by_month[articles[i].month()].second.push_back(i);

  const int first = by_month.begin()->first.ordinal();
  const int last = by_month.rbegin()->first.ordinal();
  for (int m = first; m <= last; ++m) {
    SeriesPoint p;
    p.month = Month::from_ordinal(m);
    auto it = by_month.find(p.month);
    if (it != by_month.end()) {
      const auto& [a_idx, b_idx] = it->second;
      p.n_a = a_idx.size();
      p.n_b = b_idx.size();
      if (mode == SeriesMode::Centroid) {
        if (!a_idx.empty() && !b_idx.empty()) {
          std::vector<const TermVector*> va, vb;
          for (auto i : a_idx) va.push_back(&*vec[i]);
          for (auto i : b_idx) vb.push_back(&*vec[i]);
          p.value = cosine(group_centroid(va), group_centroid(vb));
        }
      } else if (!a_idx.empty()) {
        double sum = 0;
        for (auto i : a_idx) sum += pair_cos[i];
        p.value = sum / double(a_idx.size());
        p.n_b = a_idx.size();
      }
    }
    series.points.push_back(p);
  }
  return series;
}

std::string series_csv(const ConvergenceSeries& s) {
  std::string out = "month,value,n_a,n_b\n";
  for (const auto& p : s.points) {
    out += io::csv_line({p.month.to_string(), p.value ? io::format_double(*p.value) : "NA",
                         std::to_string(p.n_a), std::to_string(p.n_b)});
  }
  return out;
}

ConvergenceSeries parse_series_csv(std::string_view content) {
  ConvergenceSeries s;
  auto rows = io::parse_csv(content);
  if (rows.empty()) throw ValidationError("series CSV is empty");
  const auto& header = rows.front().fields;
  if (header.size() < 2 || trim(header[0]) != "month" || trim(header[1]) != "value") {
    throw ValidationError("series CSV must start with columns month,value");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() < 2) throw ValidationError("series CSV line " + std::to_string(rows[r].line) + " is short");
    SeriesPoint p;
    p.month = Month::parse(f[0]);
    auto v = trim(f[1]);
    if (v != "NA" && !v.empty()) {
      try {
        p.value = std::stod(std::string(v));
      } catch (...) {
        throw ValidationError("series CSV line " + std::to_string(rows[r].line) + ": bad value");
      }
    }
    if (f.size() > 2 && !trim(f[2]).empty()) p.n_a = std::stoul(std::string(trim(f[2])));
    if (f.size() > 3 && !trim(f[3]).empty()) p.n_b = std::stoul(std::string(trim(f[3])));
    if (!s.points.empty() && !(s.points.back().month < p.month)) {
      throw ValidationError("series CSV months must be strictly increasing");
    }
    s.points.push_back(p);
  }
  return s;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// Moving-block resample of `v`, same length, blocks wrap around.
std::vector<double> block_resample(const std::vector<double>& v, std::size_t block, std::mt19937_64& rng) {
  std::vector<double> out;
  out.reserve(v.size());
  while (out.size() < v.size()) {
    const auto start = static_cast<std::size_t>(rng() % v.size());
    for (std::size_t k = 0; k < block && out.size() < v.size(); ++k) out.push_back(v[(start + k) % v.size()]);
  }
  return out;
}

}  // namespace

DidResult did_statistic(const ConvergenceSeries& treated, const ConvergenceSeries& control, Month event_month,
                        const BootstrapOptions& opts) {
  std::map<Month, double> t_vals;
  for (const auto& p : treated.points) {
    if (p.value) t_vals[p.month] = *p.value;
  }
  std::vector<double> pre_t, pre_c, post_t, post_c;
  for (const auto& p : control.points) {
    if (!p.value) continue;
    auto it = t_vals.find(p.month);
    if (it == t_vals.end()) continue;
    if (p.month < event_month) {
      pre_t.push_back(it->second);
      pre_c.push_back(*p.value);
    } else {
      post_t.push_back(it->second);
      post_c.push_back(*p.value);
    }
  }
  if (pre_t.size() < 2 || post_t.size() < 2) {
    throw ValidationError("difference-in-differences needs at least two common months on each side of " +
                          event_month.to_string() + " (have " + std::to_string(pre_t.size()) + " before, " +
                          std::to_string(post_t.size()) + " after)");
  }

  DidResult r;
  r.pre_months = pre_t.size();
  r.post_months = post_t.size();
  r.pre_gap = mean_of(pre_t) - mean_of(pre_c);
  r.post_gap = mean_of(post_t) - mean_of(post_c);
  r.did = r.post_gap - r.pre_gap;

  std::vector<double> pre_gap(pre_t.size()), post_gap(post_t.size());
  for (std::size_t i = 0; i < pre_t.size(); ++i) pre_gap[i] = pre_t[i] - pre_c[i];
  for (std::size_t i = 0; i < post_t.size(); ++i) post_gap[i] = post_t[i] - post_c[i];

  auto block_for = [&](std::size_t n) {
    if (opts.block_length) return std::min(opts.block_length, n);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::cbrt(double(n)))));
  };
  std::mt19937_64 rng(opts.seed);
  std::vector<double> draws;
  draws.reserve(opts.resamples);
  for (std::size_t b = 0; b < opts.resamples; ++b) {
    auto pre = block_resample(pre_gap, block_for(pre_gap.size()), rng);
    auto post = block_resample(post_gap, block_for(post_gap.size()), rng);
    draws.push_back(mean_of(post) - mean_of(pre));
  }
  if (draws.empty()) {
    r.ci_low = r.ci_high = r.did;
    return r;
  }
  std::sort(draws.begin(), draws.end());
  auto at = [&](double q) {
    double pos = q * double(draws.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, draws.size() - 1);
    return draws[lo] + (pos - double(lo)) * (draws[hi] - draws[lo]);
  };
  const double alpha = 1.0 - opts.confidence;
  r.ci_low = at(alpha / 2);
  r.ci_high = at(1.0 - alpha / 2);
  return r;
}

}  // namespace stylelens::similarity
