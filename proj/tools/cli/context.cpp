#include "context.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

namespace stylelens::cli {

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

io::Metadata RunContext::metadata() const {
  io::Metadata m;
  m.set("version", STYLELENS_VERSION);
  m.set("command", command);
  m.set("seed", std::to_string(seed));
  m.set("corpus_hash", input_hash.empty() ? "none" : input_hash);
  m.set("timestamp", utc_timestamp());
  for (const auto& [k, v] : config) m.set("config." + k, v);
  return m;
}

std::filesystem::path RunContext::write(const std::string& name, std::string_view body, std::string_view prefix) const {
  auto path = out_dir / name;
  std::string content = metadata().render(prefix);
  content += body;
  io::write_file_atomic(path, content);
  return path;
}

std::filesystem::path RunContext::write_svg(const std::string& name, std::string_view body) const {
  std::string header;
  for (const auto& [k, v] : metadata().entries) {
    std::string value = v;
    for (std::size_t p = value.find("--"); p != std::string::npos; p = value.find("--", p)) value.replace(p, 2, "-\\-");
    header += "<!-- " + k + "=" + value + " -->\n";
  }
  auto path = out_dir / name;
  io::write_file_atomic(path, header + std::string(body));
  return path;
}

std::string RunContext::read_input(const std::filesystem::path& path) {
  auto content = io::read_file(path);
  // Leading "#" header lines are excluded from the hash.
  std::size_t body = 0;
  while (body < content.size() && content[body] == '#') {
    auto nl = content.find('\n', body);
    body = nl == std::string::npos ? content.size() : nl + 1;
  }
  std::uint64_t h = input_hash.empty() ? io::kFnvOffset : io::fnv1a64(input_hash);
  input_hash = io::hex64(io::fnv1a64(std::string_view(content).substr(body), h));
  return content;
}

std::vector<corpus::Article> RunContext::load_corpus(const std::filesystem::path& path, const std::string& format) {
  auto fmt = resolve_format(path, format);
  auto content = read_input(path);
  auto result = corpus::parse_corpus(content, fmt);
  if (!result.issues.empty()) throw corpus::CorpusError(std::move(result.issues));
  return std::move(result.articles);
}

const text::LexiconSet& RunContext::lexicons() {
  if (!lexicons_) lexicons_ = lexicon_dir ? text::LexiconSet::load(*lexicon_dir) : text::LexiconSet::builtin();
  return *lexicons_;
}

void RunContext::warn(std::string_view message) const {
  if (err) *err << "warning: " << message << "\n";
}

corpus::Format resolve_format(const std::filesystem::path& path, const std::string& format) {
  if (format != "auto") {
    auto f = corpus::parse_format(format);
    if (!f) throw ValidationError("unknown corpus format '" + format + "'");
    return *f;
  }
  return ascii_lower(path.extension().string()) == ".csv" ? corpus::Format::Csv : corpus::Format::Jsonl;
}

}  // namespace stylelens::cli
