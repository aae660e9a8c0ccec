#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace stylelens::text {

enum class Tag { Adj, Adv, VerbPresent, VerbPast, Other };
std::string_view to_string(Tag t);

struct Token {
  std::string surface;
  std::string lower;
  /// Byte offset of the token in the source text.
  std::size_t offset = 0;
  Tag tag = Tag::Other;
};

/// Half-open token index range [begin, end).
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const SentenceRange&) const = default;
};

/// Half-open byte range of one sentence in the source text.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TokenizedText {
  std::vector<Token> tokens;
  std::vector<SentenceRange> sentences;
};

/// Splits at '.', '!' or '?' when followed by whitespace and then an
/// upper-case letter (opening quotes/brackets allowed in between), or by end
/// of text. Known abbreviations ("et al.", "i.e.", "Fig.", ...) never end a
/// sentence. Spans without any word character are dropped.
std::vector<SentenceSpan> split_sentences(std::string_view text);

/// Word tokens are maximal runs of letters and digits, with internal hyphens
/// and apostrophes kept ("state-of-the-art", "Adam's"). Punctuation is dropped
/// from the stream but drives sentence segmentation. Tags are left as Other.
TokenizedText tokenize(std::string_view text);

/// Lowercased token strings only; cheaper than tokenize() when sentences
/// and surfaces are not needed.
std::vector<std::string> word_tokens(std::string_view text);

struct LexiconSet {
  std::unordered_set<std::string> hedges;
  std::unordered_set<std::string> novelty;
  std::unordered_set<std::string> importance;
  std::unordered_set<std::string> pleasant;
  std::unordered_set<std::string> unpleasant;
  std::unordered_set<std::string> adjectives;
  std::unordered_set<std::string> adverbs;
  std::unordered_set<std::string> present_verbs;
  std::unordered_set<std::string> past_verbs;

  /// The lexicons shipped with the library.
  static const LexiconSet& builtin();

  /// Loads `<dir>/{hedges,novelty,...}.txt`. Files missing from `dir` fall
  /// back to the built-in list; a present but empty file is an error.
  static LexiconSet load(const std::filesystem::path& dir);

  /// Parses one lexicon file body: one term per line, '#' comments,
  /// lowercased and deduplicated.
  static std::unordered_set<std::string> parse_terms(std::string_view content);
};

/// Tag priority: past_verbs > present_verbs > adjectives > adverbs, then
/// suffix rules (-ed -> past, -ly -> adverb, -est on a known adjective stem
/// -> adjective), else Other.
Tag tag_word(std::string_view lower, const LexiconSet& lex);
void tag_tokens(TokenizedText& text, const LexiconSet& lex);

/// Stem of a "-est"/"-er" form when it reduces to a known adjective
/// ("largest" -> "large", "biggest" -> "big", "easiest" -> "easy").
bool has_adjective_stem(std::string_view lower, std::string_view suffix, const LexiconSet& lex);

}  // namespace stylelens::text
