#include "stylelens/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "stylelens/io.hpp"
#include "stylelens/rules.hpp"

namespace stylelens::detector {

namespace {

constexpr std::uint64_t kCharSeed = io::fnv1a64("char-ngram");
constexpr std::uint64_t kWordSeed = io::fnv1a64("word-unigram");

std::string normalize_for_ngrams(std::string_view text) {
  std::string out = " ";
  bool space = true;
  for (char c : text) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (ws) {
      if (!space) out.push_back(' ');
      space = true;
    } else {
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
      space = false;
    }
  }
  if (!space) out.push_back(' ');
  return out;
}

}  // namespace

EmbeddingTable EmbeddingTable::parse(std::string_view content) {
  EmbeddingTable t;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError("embedding line " + std::to_string(line_no) + ": expected id<TAB>values");
    }
    std::string id(trim(line.substr(0, tab)));
    std::vector<double> values;
    for (const auto& cell : split(line.substr(tab + 1), ',')) {
      auto s = trim(cell);
      double v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ValidationError("embedding line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
      }
      values.push_back(v);
    }
    if (t.dim_ == 0) t.dim_ = values.size();
    if (values.size() != t.dim_) {
      throw ValidationError("embedding line " + std::to_string(line_no) + ": expected " + std::to_string(t.dim_) +
                            " values, got " + std::to_string(values.size()));
    }
    if (!t.rows_.emplace(id, std::move(values)).second) {
      throw ValidationError("embedding line " + std::to_string(line_no) + ": duplicate id '" + id + "'");
    }
  }
  if (t.rows_.empty()) throw ValidationError("embedding file has no rows");
  return t;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) { return parse(io::read_file(path)); }

const std::vector<double>* EmbeddingTable::find(std::string_view id) const {
  auto it = rows_.find(std::string(id));
  return it == rows_.end() ? nullptr : &it->second;
}

FeatureExtractor::FeatureExtractor(FeatureConfig config, const text::LexiconSet& lexicons,
                                   const EmbeddingTable* embeddings)
    : config_(config), lexicons_(&lexicons), embeddings_(embeddings) {
  if (config_.char_min < 1 || config_.char_max < config_.char_min) {
    throw ValidationError("character n-gram range must satisfy 1 <= min <= max");
  }
  if (config_.embedding_dim > 0) {
    if (!embeddings_) throw ValidationError("model expects embeddings but none were supplied");
    if (embeddings_->dimension() != config_.embedding_dim) {
      throw ValidationError("embedding dimension " + std::to_string(embeddings_->dimension()) +
                            " does not match the model's " + std::to_string(config_.embedding_dim));
    }
  }
}

std::size_t FeatureExtractor::dense_size() const {
  return (config_.rule_features ? rules::RuleVector::kSize : 0) + (config_.length_features ? 2 : 0) +
         config_.embedding_dim;
}

std::vector<std::string> FeatureExtractor::dense_names() const {
  std::vector<std::string> out;
  if (config_.rule_features) {
    for (auto n : rules::RuleVector::names()) out.emplace_back(n);
  }
  if (config_.length_features) {
    out.emplace_back("log_chars");
    out.emplace_back("log_words");
  }
  for (std::size_t i = 0; i < config_.embedding_dim; ++i) out.push_back("emb_" + std::to_string(i));
  return out;
}

std::vector<std::uint64_t> FeatureExtractor::raw_keys(std::string_view text) const {
  std::vector<std::uint64_t> keys;
  const std::string norm = normalize_for_ngrams(text);
  for (int n = config_.char_min; n <= config_.char_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= norm.size(); ++i) {
      keys.push_back(io::fnv1a64(std::string_view(norm).substr(i, len), kCharSeed));
    }
  }
  if (config_.token_unigrams) {
    for (const auto& w : text::word_tokens(text)) keys.push_back(io::fnv1a64(w, kWordSeed));
  }
  return keys;
}

SparseFeatures FeatureExtractor::extract(std::string_view id, std::string_view text) const {
  SparseFeatures f;
  if (config_.hash_dim > 0) {
    auto keys = raw_keys(text);
    std::vector<std::uint32_t> buckets;
    buckets.reserve(keys.size());
    for (auto k : keys) buckets.push_back(static_cast<std::uint32_t>(k % config_.hash_dim));
    std::sort(buckets.begin(), buckets.end());
    for (auto b : buckets) {
      if (!f.hashed.empty() && f.hashed.back().first == b) f.hashed.back().second += 1.0;
      else f.hashed.emplace_back(b, 1.0);
    }
  }
  f.dense.reserve(dense_size());
  if (config_.rule_features || config_.length_features) {
    auto tokens = text::tokenize(text);
    if (config_.rule_features) {
      text::tag_tokens(tokens, *lexicons_);
      auto m = rules::measure(tokens, *lexicons_);
      for (double v : m.values.values()) f.dense.push_back(v);
    }
    if (config_.length_features) {
      f.dense.push_back(std::log1p(static_cast<double>(text.size())));
      f.dense.push_back(std::log1p(static_cast<double>(tokens.tokens.size())));
    }
  }
  if (config_.embedding_dim > 0) {
    const auto* e = embeddings_->find(id);
    if (!e) throw ValidationError("no embedding for article '" + std::string(id) + "'");
    f.dense.insert(f.dense.end(), e->begin(), e->end());
  }
  return f;
}

CollisionStats count_collisions(const FeatureExtractor& fx, const std::vector<std::string_view>& texts) {
  std::unordered_set<std::uint64_t> keys;
  for (auto t : texts) {
    for (auto k : fx.raw_keys(t)) keys.insert(k);
  }
  CollisionStats s;
  s.distinct_features = keys.size();
  if (fx.config().hash_dim == 0) {
    s.occupied_buckets = s.distinct_features;
    return s;
  }
  std::unordered_set<std::uint32_t> buckets;
  for (auto k : keys) buckets.insert(static_cast<std::uint32_t>(k % fx.config().hash_dim));
  s.occupied_buckets = buckets.size();
  return s;
}

}  // namespace stylelens::detector
