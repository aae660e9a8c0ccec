#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylelens/corpus.hpp"
#include "stylelens/io.hpp"
#include "stylelens/textproc.hpp"

namespace stylelens::cli {

/// State shared by every subcommand of one run.
struct RunContext {
  std::string command;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 20221130;
  Month event_month{2022, 11};
  std::optional<std::filesystem::path> lexicon_dir;
  /// Effective option values, echoed into every artifact header.
  std::vector<std::pair<std::string, std::string>> config;
  /// Hash over the run's input files; set by the command.
  std::string input_hash;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  io::Metadata metadata() const;
  /// Writes `body` under out_dir with the metadata header, atomically.
  /// `prefix` starts each header line ("# " for CSV/text).
  std::filesystem::path write(const std::string& name, std::string_view body, std::string_view prefix = "# ") const;
  /// Same, but the header is a block of XML comments (SVG).
  std::filesystem::path write_svg(const std::string& name, std::string_view body) const;

  /// Loads a corpus, folding its bytes into input_hash.
  std::vector<corpus::Article> load_corpus(const std::filesystem::path& path, const std::string& format);
  /// Folds a file's bytes into input_hash and returns them.
  std::string read_input(const std::filesystem::path& path);

  const text::LexiconSet& lexicons();

  void warn(std::string_view message) const;

 private:
  std::optional<text::LexiconSet> lexicons_;
};

/// Deterministic UTC timestamp unless SOURCE_DATE_EPOCH is set.
std::string utc_timestamp();

/// "jsonl"/"csv", or the corpus file extension when `format` is "auto".
corpus::Format resolve_format(const std::filesystem::path& path, const std::string& format);

}  // namespace stylelens::cli
