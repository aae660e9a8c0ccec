#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stylelens::io {

/// 64-bit FNV-1a. Stable across platforms; used for corpus hashes and
/// feature hashing.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames over the target, so a
/// failed run never leaves a truncated artifact behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Parses RFC-4180 CSV (quoted fields, doubled quotes, embedded newlines).
/// Lines starting with '#' outside a quoted field are skipped as comments.
struct CsvRow {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

/// Shortest round-trippable decimal rendering of a double.
std::string format_double(double v);
/// Fixed-point rendering with the given number of decimals.
std::string format_fixed(double v, int decimals);

/// Ordered key/value header attached to every artifact.
struct Metadata {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(std::string key, std::string value);
  /// Rendered as "# key=value" lines; `prefix` lets SVG wrap them in comments.
  std::string render(std::string_view prefix = "# ") const;
};

/// Runs fn(i) for i in [0, n) across worker threads. Each index is visited
/// exactly once; callers write results into pre-sized slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace stylelens::io
