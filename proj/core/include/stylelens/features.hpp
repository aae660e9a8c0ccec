#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylelens/corpus.hpp"
#include "stylelens/textproc.hpp"

namespace stylelens::detector {

struct FeatureConfig {
  /// Buckets for hashed character n-grams and token unigrams. 0 disables
  /// the hashed block (useful with embeddings only).
  std::uint32_t hash_dim = 1u << 18;
  int char_min = 3;
  int char_max = 5;
  bool token_unigrams = true;
  bool rule_features = true;
  bool length_features = true;
  /// Dimension of externally supplied embeddings; 0 when none are used.
  std::size_t embedding_dim = 0;

  bool operator==(const FeatureConfig&) const = default;
};

/// Per-text embeddings keyed by article id.
/// File format: UTF-8, `id<TAB>float,float,...` per line, `#` comments.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::string_view content);

  const std::vector<double>* find(std::string_view id) const;
  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::unordered_map<std::string, std::vector<double>> rows_;
  std::size_t dim_ = 0;
};

/// Raw features of one text: hashed counts (sorted by bucket, summed) and
/// a dense tail of rule, length and embedding values.
struct SparseFeatures {
  std::vector<std::pair<std::uint32_t, double>> hashed;
  std::vector<double> dense;
};

class FeatureExtractor {
 public:
  FeatureExtractor(FeatureConfig config, const text::LexiconSet& lexicons,
                   const EmbeddingTable* embeddings = nullptr);

  const FeatureConfig& config() const { return config_; }
  std::size_t dense_size() const;
  /// hash_dim + dense_size().
  std::size_t dimension() const { return config_.hash_dim + dense_size(); }

  /// Throws ValidationError when embeddings are configured but `id` has
  /// none.
  SparseFeatures extract(std::string_view id, std::string_view text) const;
  SparseFeatures extract(const corpus::Article& a) const { return extract(a.id, a.text); }

  /// Names of the dense tail, in order.
  std::vector<std::string> dense_names() const;

  /// 64-bit keys of every hashed feature in the text, before bucketing.
  std::vector<std::uint64_t> raw_keys(std::string_view text) const;

 private:
  FeatureConfig config_;
  const text::LexiconSet* lexicons_;
  const EmbeddingTable* embeddings_;
};

struct CollisionStats {
  std::size_t distinct_features = 0;
  std::size_t occupied_buckets = 0;
  /// Distinct features that share a bucket with an earlier one.
  std::size_t collisions() const { return distinct_features - occupied_buckets; }

  bool operator==(const CollisionStats&) const = default;
};

CollisionStats count_collisions(const FeatureExtractor& fx, const std::vector<std::string_view>& texts);

}  // namespace stylelens::detector
