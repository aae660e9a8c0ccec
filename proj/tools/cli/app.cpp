#include "app.hpp"

#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "context.hpp"
#include "stylelens/common.hpp"

namespace stylelens::cli {

namespace {

void add_corpus(CLI::App* sub, CorpusArgs& c) {
  sub->add_option("--corpus", c.path, "Corpus file (JSONL or CSV)")->required()->check(CLI::ExistingFile);
  sub->add_option("--format", c.format, "auto, jsonl or csv")
      ->check(CLI::IsMember({"auto", "jsonl", "csv"}))
      ->capture_default_str();
}

void add_split(CLI::App* sub, SplitArgs& s) {
  sub->add_option("--train-end", s.train_end, "Training articles are updated before this date")->capture_default_str();
  sub->add_option("--test-start", s.test_start, "First test date (inclusive)")->capture_default_str();
  sub->add_option("--test-end", s.test_end, "Last test date (inclusive)")->capture_default_str();
  sub->add_flag("--all-articles", s.all_articles, "Use every article instead of the temporal split");
}

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

void collect_config(const CLI::App& app, const std::string& prefix, RunContext& ctx) {
  for (const auto* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) value = joined(opt->results());
    else value = opt->get_default_str();
    if (value.empty() && opt->get_type_size() == 0) value = opt->count() > 0 ? "true" : "false";
    ctx.config.emplace_back(prefix + name, value);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stylometric analysis of scientific abstracts", "stylelens"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Configuration file (key = value; subcommand keys as section.key)");

  RunContext ctx;
  ctx.out = &out;
  ctx.err = &err;
  std::string out_dir = ".";
  std::string event = "2022-11";
  std::string lexicons;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", ctx.seed, "Random seed")->capture_default_str();
  app.add_option("--event-month", event, "Event month (YYYY-MM)")->capture_default_str();
  app.add_option("--lexicons", lexicons, "Directory with lexicon overrides")->check(CLI::ExistingDirectory);
  for (auto* opt : app.get_options()) opt->configurable(true);
  app.fallthrough();

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Validate a corpus and derive author covariates");
  add_corpus(s_ingest, ingest.corpus);
  s_ingest->add_option("--gender-table", ingest.gender_table, "name<TAB>gender lookup table")->check(CLI::ExistingFile);
  s_ingest->add_option("--ethnicity-table", ingest.ethnicity_table, "name<TAB>ethnicity lookup table")->check(CLI::ExistingFile);
  s_ingest->add_flag("--normalize", ingest.normalize, "Shares instead of counts");

  RulesArgs rules;
  auto* s_rules = app.add_subcommand("rules", "Measure the eleven writing rules");
  add_corpus(s_rules, rules.corpus);
  s_rules->add_option("--scale", rules.scale, "Indicator scale: presence or count")
      ->check(CLI::IsMember({"presence", "count"}))
      ->capture_default_str();
  s_rules->add_option("--short-sentence", rules.short_sentence, "Short sentence threshold in words")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimilarityArgs sim;
  auto* s_sim = app.add_subcommand("similarity", "Monthly cosine similarity series");
  add_corpus(s_sim, sim.corpus);
  s_sim->add_option("--mode", sim.mode, "centroid or article_vs_revision")
      ->check(CLI::IsMember({"centroid", "article_vs_revision"}))
      ->capture_default_str();
  s_sim->add_option("--group-a,--group", sim.group_a, "Filters for group A (key=value)");
  s_sim->add_option("--group-b", sim.group_b, "Filters for group B (key=value)");
  s_sim->add_flag("--stopwords", sim.stopwords, "Remove stopwords");
  s_sim->add_flag("--idf", sim.idf, "Weight terms by inverse document frequency");
  s_sim->add_option("--name", sim.name, "Output file stem")->capture_default_str();

  SeriesArgs series;
  auto* s_series = app.add_subcommand("series", "Difference-in-differences between two series");
  s_series->add_option("--treated", series.treated, "Treated series CSV")->required()->check(CLI::ExistingFile);
  s_series->add_option("--control", series.control, "Control series CSV")->required()->check(CLI::ExistingFile);
  s_series->add_option("--resamples", series.resamples, "Bootstrap resamples")->check(CLI::PositiveNumber)->capture_default_str();
  s_series->add_option("--block", series.block, "Block length in months (0 = automatic)")->capture_default_str();
  s_series->add_option("--confidence", series.confidence, "Interval level")->check(CLI::Range(0.5, 0.999))->capture_default_str();

  AdoptArgs adopt;
  auto* s_adopt = app.add_subcommand("adopt", "Monthly adoption rate per group");
  add_corpus(s_adopt, adopt.corpus);
  s_adopt->add_option("--model", adopt.model, "Detector model (default: use labels)")->check(CLI::ExistingFile);
  s_adopt->add_option("--embeddings", adopt.embeddings, "Embedding table")->check(CLI::ExistingFile);
  s_adopt->add_option("--group", adopt.groups, "NAME:key=value,... (repeatable)");
  s_adopt->add_option("--threshold", adopt.threshold, "Binary decision threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  RegressArgs regress;
  auto* s_regress = app.add_subcommand("regress", "Fit a regression model file");
  s_regress->add_option("--model", regress.spec, "Model file")->required()->check(CLI::ExistingFile);
  auto* table_opt = s_regress->add_option("--table", regress.table, "Panel CSV")->check(CLI::ExistingFile);
  auto* corpus_opt = s_regress->add_option("--corpus", regress.corpus.path, "Corpus to build the panel from")->check(CLI::ExistingFile);
  table_opt->excludes(corpus_opt);
  s_regress->add_option("--format", regress.corpus.format, "auto, jsonl or csv")
      ->check(CLI::IsMember({"auto", "jsonl", "csv"}))
      ->capture_default_str();
  s_regress->add_flag("--normalize", regress.normalize, "Covariate shares instead of counts");
  s_regress->add_option("--scale", regress.scale, "Indicator scale")
      ->check(CLI::IsMember({"presence", "count"}))
      ->capture_default_str();

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "Train revision detectors");
  add_corpus(s_train, train.corpus);
  add_split(s_train, train.split);
  s_train->add_option("--field", train.field, "Field or all")->capture_default_str();
  s_train->add_option("--prompt", train.prompt, "1..6 or multiclass")->capture_default_str();
  s_train->add_flag("--all-scopes", train.all_scopes, "Every field with each prompt and multiclass");
  s_train->add_option("--folds", train.folds, "Cross-validation folds")->check(CLI::Range(2, 50))->capture_default_str();
  s_train->add_option("--patience", train.patience, "Early stopping patience")->check(CLI::PositiveNumber)->capture_default_str();
  s_train->add_option("--max-epochs", train.max_epochs, "Epoch limit")->check(CLI::PositiveNumber)->capture_default_str();
  s_train->add_option("--learning-rate", train.learning_rate, "Adam step size")->check(CLI::PositiveNumber)->capture_default_str();
  s_train->add_option("--l2", train.l2, "L2 grid")->capture_default_str();
  s_train->add_option("--hash-dims", train.hash_dims, "Hash dimension grid")->capture_default_str();
  s_train->add_flag("--no-rule-features", train.no_rule_features, "Drop rule features");
  s_train->add_flag("--no-length-features", train.no_length_features, "Drop length features");
  s_train->add_option("--embeddings", train.embeddings, "Embedding table")->check(CLI::ExistingFile);

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a detector on the test window");
  add_corpus(s_eval, eval.corpus);
  add_split(s_eval, eval.split);
  s_eval->add_option("--model", eval.model, "Detector model")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--embeddings", eval.embeddings, "Embedding table")->check(CLI::ExistingFile);
  s_eval->add_option("--threshold", eval.threshold, "Binary decision threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  ReportArgs report;
  auto* s_report = app.add_subcommand("report", "Render adoption or similarity series as SVG");
  s_report->add_option("--input", report.inputs, "adoption.csv or series CSV (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Write a synthetic corpus");
  s_synth->add_option("--kind", synth.kind, "two-style, seven-style, adoption, overlap, word-count or hedge")
      ->check(CLI::IsMember({"two-style", "seven-style", "adoption", "overlap", "word-count", "hedge"}))
      ->capture_default_str();
  s_synth->add_option("--docs", synth.docs, "Documents per label, per month, or in total")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_synth->add_option("--name", synth.name, "Output file name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    try {
      ctx.event_month = Month::parse(event);
    } catch (const std::exception&) {
      throw ValidationError("--event-month must be YYYY-MM, got '" + event + "'");
    }
    ctx.out_dir = out_dir;
    if (!lexicons.empty()) ctx.lexicon_dir = lexicons;
    collect_config(app, "", ctx);
    auto* sub = app.get_subcommands().front();
    ctx.command = sub->get_name();
    collect_config(*sub, ctx.command + ".", ctx);
    std::filesystem::create_directories(ctx.out_dir);

    if (sub == s_ingest) return cmd_ingest(ctx, ingest);
    if (sub == s_rules) return cmd_rules(ctx, rules);
    if (sub == s_sim) return cmd_similarity(ctx, sim);
    if (sub == s_series) return cmd_series(ctx, series);
    if (sub == s_adopt) return cmd_adopt(ctx, adopt);
    if (sub == s_regress) return cmd_regress(ctx, regress);
    if (sub == s_train) return cmd_train(ctx, train);
    if (sub == s_eval) return cmd_eval(ctx, eval);
    if (sub == s_report) return cmd_report(ctx, report);
    if (sub == s_synth) return cmd_synth(ctx, synth);
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace stylelens::cli
