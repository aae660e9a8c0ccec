#include "stylelens/textproc.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "stylelens/common.hpp"
#include "stylelens/io.hpp"

namespace stylelens::text {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_lexicon_files();
}

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
};

// Decodes one UTF-8 sequence; malformed bytes decode as U+FFFD of length 1.
CodePoint decode(std::string_view s, std::size_t i) {
  auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = (b0 >= 0xF0) ? 4 : (b0 >= 0xE0) ? 3 : (b0 >= 0xC0) ? 2 : 0;
  if (len == 0 || i + len > s.size()) return {0xFFFD, 1};
  char32_t cp = b0 & (0x7F >> len);
  for (std::size_t k = 1; k < len; ++k) {
    auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp == 0xFFFD) return false;
  if (cp >= 0x80 && cp <= 0xBF) return false;       // Latin-1 punctuation and symbols
  if (cp == 0xD7 || cp == 0xF7) return false;       // multiplication, division
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;   // punctuation, arrows, math symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;   // CJK punctuation
  return true;
}

bool is_joiner(char32_t cp) { return cp == '-' || cp == '\'' || cp == 0x2019 || cp == 0x2010 || cp == 0x2011; }

bool is_upper_start(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  if (cp >= '0' && cp <= '9') return false;
  // Latin-1 / Latin Extended capitals and Greek capitals.
  return (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) || (cp >= 0x391 && cp <= 0x3A9);
}

bool is_space(char32_t cp) { return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0 || cp == '\f'; }

bool is_opening(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == '(' || cp == '[' || cp == 0x201C || cp == 0x2018;
}

bool is_closing(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == 0x201D || cp == 0x2019;
}

// Lowercase forms without the trailing period.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "al", "i.e", "e.g", "cf", "vs", "dr", "mr", "mrs", "ms", "prof", "approx", "resp",
      "st", "jr", "sr", "inc", "ltd", "co", "u.s", "viz", "ca"};
  return set;
}

// Abbreviations that also end sentences; they hold only before a non-starter.
const std::unordered_set<std::string>& weak_abbreviations() {
  static const std::unordered_set<std::string> set = {
      "etc", "fig", "figs", "eq", "eqs", "ref", "refs", "sec", "secs", "tab", "no", "nos", "vol",
      "pp", "ch", "thm", "lem", "def", "prop", "cor", "app", "appx"};
  return set;
}

const std::unordered_set<std::string>& sentence_starters() {
  static const std::unordered_set<std::string> set = {
      "a", "all", "also", "an", "and", "as", "at", "because", "both", "but", "by", "each", "finally",
      "first", "for", "from", "furthermore", "he", "here", "however", "i", "if", "in", "it", "its",
      "moreover", "next", "no", "not", "on", "one", "our", "she", "since", "so", "some", "such",
      "that", "the", "their", "then", "there", "these", "they", "this", "those", "thus", "to",
      "we", "what", "when", "where", "which", "while", "with", "yes", "you"};
  return set;
}

// Word immediately preceding byte `dot` (letters and internal dots).
std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0) {
    char c = text[start - 1];
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '.';
    if (!ok) break;
    --start;
  }
  return ascii_lower(text.substr(start, dot - start));
}

// Lowercased ASCII letters starting at byte `pos`.
std::string word_after(std::string_view text, std::size_t pos) {
  std::size_t end = pos;
  while (end < text.size() && ((text[end] >= 'a' && text[end] <= 'z') || (text[end] >= 'A' && text[end] <= 'Z'))) ++end;
  return ascii_lower(text.substr(pos, end - pos));
}

bool has_word_char(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    auto cp = decode(s, i);
    if (is_word_char(cp.value)) return true;
    i += cp.length;
  }
  return false;
}

const std::unordered_set<std::string>& ly_exceptions() {
  static const std::unordered_set<std::string> set = {
      "family", "anomaly", "assembly", "butterfly", "italy", "july", "ally", "fly", "belly",
      "bully", "holly", "jelly", "lily", "monopoly", "homily", "poly", "only", "reply",
      "supply", "apply", "rely", "comply", "multiply", "imply", "underly", "oily", "firefly"};
  return set;
}

const std::unordered_set<std::string>& ed_exceptions() {
  static const std::unordered_set<std::string> set = {
      "bed", "red", "shed", "wed", "fed", "led", "sled", "hundred", "indeed", "need", "speed",
      "seed", "feed", "breed", "bleed", "greed", "weed", "embed", "naked", "sacred", "wicked",
      "kindred", "rugged", "ragged", "biped", "med"};
  return set;
}

}  // namespace

std::string_view to_string(Tag t) {
  switch (t) {
    case Tag::Adj: return "ADJ";
    case Tag::Adv: return "ADV";
    case Tag::VerbPresent: return "VERB_PRESENT";
    case Tag::VerbPast: return "VERB_PAST";
    case Tag::Other: return "OTHER";
  }
  return "OTHER";
}

std::vector<SentenceSpan> split_sentences(std::string_view text) {
  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    if (end > start && has_word_char(text.substr(start, end - start))) spans.push_back({start, end});
    start = end;
  };
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      i += decode(text, i).length;
      continue;
    }
    // Collapse runs such as "?!" or "...".
    std::size_t j = i;
    while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    // Trailing closing quotes/brackets belong to the sentence.
    std::size_t close = j;
    while (close < text.size()) {
      auto cp = decode(text, close);
      if (!is_closing(cp.value)) break;
      close += cp.length;
    }
    std::size_t k = close;
    bool saw_space = false;
    while (k < text.size()) {
      auto cp = decode(text, k);
      if (!is_space(cp.value)) break;
      saw_space = true;
      k += cp.length;
    }
    bool boundary = false;
    std::size_t next_word = k;
    if (k >= text.size()) {
      boundary = true;
    } else if (saw_space) {
      std::size_t m = k;
      while (m < text.size()) {
        auto cp = decode(text, m);
        if (!is_opening(cp.value)) break;
        m += cp.length;
      }
      boundary = m < text.size() && is_upper_start(decode(text, m).value);
      next_word = m;
    }
    if (boundary && c == '.' && j == i + 1) {
      auto prev = word_before(text, i);
      if (abbreviations().count(prev)) boundary = false;
      // Single capital initial as in "J. Smith".
      const bool initial = prev.size() == 1 && i >= 1 && text[i - 1] >= 'A' && text[i - 1] <= 'Z';
      if ((initial || weak_abbreviations().count(prev)) && !sentence_starters().count(word_after(text, next_word))) {
        boundary = false;
      }
    }
    if (boundary) emit(close);
    i = j;
  }
  emit(text.size());
  return spans;
}

namespace {

template <typename Sink>
void scan_words(std::string_view text, Sink&& sink) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto cp = decode(text, i);
    if (!is_word_char(cp.value)) {
      i += cp.length;
      continue;
    }
    std::size_t begin = i;
    std::size_t end = i + cp.length;
    i = end;
    while (i < text.size()) {
      auto next = decode(text, i);
      if (is_word_char(next.value)) {
        i += next.length;
        end = i;
        continue;
      }
      if (is_joiner(next.value) && i + next.length < text.size()) {
        auto after = decode(text, i + next.length);
        if (is_word_char(after.value)) {
          i += next.length + after.length;
          end = i;
          continue;
        }
      }
      break;
    }
    sink(begin, end);
  }
}

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  scan_words(text, [&](std::size_t b, std::size_t e) {
    Token t;
    t.surface = std::string(text.substr(b, e - b));
    t.lower = ascii_lower(t.surface);
    t.offset = b;
    out.tokens.push_back(std::move(t));
  });
  if (out.tokens.empty()) return out;

  auto spans = split_sentences(text);
  std::size_t tok = 0;
  for (const auto& span : spans) {
    std::size_t begin = tok;
    while (tok < out.tokens.size() && out.tokens[tok].offset < span.end) ++tok;
    if (tok > begin) out.sentences.push_back({begin, tok});
  }
  // Tokens past the last span cannot occur (the last span ends at text end),
  // but keep the coverage invariant unconditional.
  if (tok < out.tokens.size()) {
    if (out.sentences.empty()) out.sentences.push_back({tok, out.tokens.size()});
    else out.sentences.back().end = out.tokens.size();
  }
  return out;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  scan_words(text, [&](std::size_t b, std::size_t e) { out.push_back(ascii_lower(text.substr(b, e - b))); });
  return out;
}

std::unordered_set<std::string> LexiconSet::parse_terms(std::string_view content) {
  std::unordered_set<std::string> terms;
  for (const auto& raw : split(content, '\n')) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    terms.insert(ascii_lower(line));
  }
  return terms;
}

namespace {

std::unordered_set<std::string> LexiconSet::*member_for(std::string_view name) {
  if (name == "hedges") return &LexiconSet::hedges;
  if (name == "novelty") return &LexiconSet::novelty;
  if (name == "importance") return &LexiconSet::importance;
  if (name == "pleasant") return &LexiconSet::pleasant;
  if (name == "unpleasant") return &LexiconSet::unpleasant;
  if (name == "adjectives") return &LexiconSet::adjectives;
  if (name == "adverbs") return &LexiconSet::adverbs;
  if (name == "present_verbs") return &LexiconSet::present_verbs;
  if (name == "past_verbs") return &LexiconSet::past_verbs;
  return nullptr;
}

}  // namespace

const LexiconSet& LexiconSet::builtin() {
  static const LexiconSet set = [] {
    LexiconSet s;
    for (const auto& [name, body] : detail::builtin_lexicon_files()) {
      if (auto m = member_for(name)) s.*m = parse_terms(body);
    }
    return s;
  }();
  return set;
}

LexiconSet LexiconSet::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ValidationError("lexicon directory '" + dir.string() + "' does not exist");
  }
  LexiconSet s = builtin();
  for (const auto& [name, body] : detail::builtin_lexicon_files()) {
    auto path = dir / (std::string(name) + ".txt");
    if (!std::filesystem::exists(path)) continue;
    auto terms = parse_terms(io::read_file(path));
    if (terms.empty()) throw ValidationError("lexicon '" + path.string() + "' is empty");
    s.*member_for(name) = std::move(terms);
  }
  return s;
}

bool has_adjective_stem(std::string_view w, std::string_view suffix, const LexiconSet& lex) {
  if (w.size() <= suffix.size() + 1 || w.substr(w.size() - suffix.size()) != suffix) return false;
  std::string stem(w.substr(0, w.size() - suffix.size()));
  if (lex.adjectives.count(stem)) return true;           // fast-est
  if (lex.adjectives.count(stem + "e")) return true;     // larg-est
  if (stem.size() >= 2 && stem.back() == stem[stem.size() - 2] &&
      lex.adjectives.count(stem.substr(0, stem.size() - 1))) {
    return true;                                         // bigg-est
  }
  if (stem.back() == 'i' && lex.adjectives.count(stem.substr(0, stem.size() - 1) + "y")) {
    return true;                                         // easi-est
  }
  return false;
}

Tag tag_word(std::string_view w, const LexiconSet& lex) {
  std::string key(w);
  if (lex.past_verbs.count(key)) return Tag::VerbPast;
  if (lex.present_verbs.count(key)) return Tag::VerbPresent;
  if (lex.adjectives.count(key)) return Tag::Adj;
  if (lex.adverbs.count(key)) return Tag::Adv;
  if (w.size() >= 4 && w.ends_with("ed") && !w.ends_with("eed") && !ed_exceptions().count(key)) {
    return Tag::VerbPast;
  }
  if (w.size() >= 4 && w.ends_with("ly") && !ly_exceptions().count(key)) return Tag::Adv;
  if (has_adjective_stem(w, "est", lex)) return Tag::Adj;
  return Tag::Other;
}

void tag_tokens(TokenizedText& text, const LexiconSet& lex) {
  for (auto& t : text.tokens) t.tag = tag_word(t.lower, lex);
}

}  // namespace stylelens::text
