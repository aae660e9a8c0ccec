#include "commands.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "stylelens/detector.hpp"
#include "stylelens/rules.hpp"
#include "stylelens/similarity.hpp"
#include "stylelens/synth.hpp"
#include "stylelens/tables.hpp"
#include "svg.hpp"

namespace stylelens::cli {

namespace {

std::string file_stem(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "group" : out;
}

Date parse_date_arg(const std::string& s, std::string_view what) {
  auto d = Date::try_parse(s);
  if (!d) throw ValidationError(std::string(what) + " must be YYYY-MM-DD, got '" + s + "'");
  return *d;
}

detector::SplitDates split_dates(const SplitArgs& a) {
  return {parse_date_arg(a.train_end, "--train-end"), parse_date_arg(a.test_start, "--test-start"),
          parse_date_arg(a.test_end, "--test-end")};
}

std::string model_file_name(const detector::Scope& s) {
  std::string field = s.field ? ascii_lower(corpus::to_string(*s.field)) : "all";
  field.erase(std::remove(field.begin(), field.end(), '&'), field.end());
  return "detector_" + field + "_" + (s.multiclass() ? "multiclass" : "p" + std::to_string(s.prompt));
}

}  // namespace

int cmd_ingest(RunContext& ctx, const IngestArgs& a) {
  auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
  std::optional<corpus::LookupTable> gender, ethnicity;
  if (!a.gender_table.empty()) gender = corpus::LookupTable::parse(ctx.read_input(a.gender_table));
  if (!a.ethnicity_table.empty()) ethnicity = corpus::LookupTable::parse(ctx.read_input(a.ethnicity_table));
  auto report = corpus::enrich_authors(articles, gender ? &*gender : nullptr, ethnicity ? &*ethnicity : nullptr);
  auto cov = corpus::build_covariates(articles, a.normalize);
  for (const auto& w : cov.warnings) ctx.warn(w);

  ctx.write("corpus.jsonl", corpus::to_jsonl(articles));
  auto names = corpus::CovariateTable::column_names();
  std::vector<std::string> header = {"id"};
  header.insert(header.end(), names.begin(), names.end());
  std::string csv = io::csv_line(header);
  for (std::size_t i = 0; i < cov.rows.size(); ++i) {
    std::vector<std::string> row = {cov.rows[i].id};
    for (double v : cov.matrix_row(i)) row.push_back(io::format_double(v));
    csv += io::csv_line(row);
  }
  ctx.write("covariates.csv", csv);

  std::string text = "articles=" + std::to_string(articles.size()) + "\n";
  text += "authors=" + std::to_string(report.authors) + "\n";
  if (gender) text += "gender_match_rate=" + io::format_fixed(report.gender_match_rate(), 4) + "\n";
  if (ethnicity) text += "ethnicity_match_rate=" + io::format_fixed(report.ethnicity_match_rate(), 4) + "\n";
  for (const auto& d : cov.degenerate_columns) text += "degenerate_column=" + d + "\n";
  ctx.write("ingest_report.txt", text);
  *ctx.out << text;
  return 0;
}

int cmd_rules(RunContext& ctx, const RulesArgs& a) {
  rules::RuleOptions opts;
  if (a.scale == "presence") opts.scale = rules::IndicatorScale::Presence;
  else if (a.scale == "count") opts.scale = rules::IndicatorScale::Count;
  else throw ValidationError("--scale must be presence or count");
  opts.short_sentence_words = a.short_sentence;
  auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
  auto table = rules::measure_corpus(articles, ctx.lexicons(), opts);
  ctx.write("rules.csv", rules::rules_csv(table));
  ctx.write("rules_mask.csv", rules::mask_csv(table));
  if (!table.empty()) {
    auto summary = rules::summarize(table);
    ctx.write("rules_summary.csv", rules::summary_csv(summary));
    ctx.write("rules_summary.txt", rules::summary_text(summary));
    *ctx.out << rules::summary_text(summary);
  }
  *ctx.out << "measured " << table.size() << " article(s)\n";
  return 0;
}

int cmd_similarity(RunContext& ctx, const SimilarityArgs& a) {
  auto mode = similarity::parse_series_mode(a.mode);
  if (!mode) throw ValidationError("--mode must be centroid or article_vs_revision");
  auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
  auto ga = similarity::GroupFilter::parse(a.group_a);
  auto gb = similarity::GroupFilter::parse(a.group_b);
  if (*mode == similarity::SeriesMode::ArticleVsRevision && !a.group_b.empty()) {
    ctx.warn("--group-b is ignored in article_vs_revision mode");
  }
  similarity::SeriesOptions opts;
  opts.vectorizer.remove_stopwords = a.stopwords;
  opts.vectorizer.idf = a.idf;
  auto series = similarity::pairwise_series(articles, ga, gb, *mode, opts);
  ctx.write(a.name + ".csv", similarity::series_csv(series));
  std::size_t missing = 0;
  for (const auto& p : series.points) missing += p.value ? 0 : 1;
  *ctx.out << "series " << series.group_a << " vs " << series.group_b << ": " << series.points.size()
           << " month(s), " << missing << " missing\n";
  return 0;
}

int cmd_series(RunContext& ctx, const SeriesArgs& a) {
  auto treated = similarity::parse_series_csv(ctx.read_input(a.treated));
  auto control = similarity::parse_series_csv(ctx.read_input(a.control));
  similarity::BootstrapOptions opts;
  opts.resamples = a.resamples;
  opts.block_length = a.block;
  opts.confidence = a.confidence;
  opts.seed = ctx.seed;
  auto r = similarity::did_statistic(treated, control, ctx.event_month, opts);
  std::string csv = "pre_gap,post_gap,did,ci_low,ci_high,pre_months,post_months\n";
  csv += io::csv_line({io::format_double(r.pre_gap), io::format_double(r.post_gap), io::format_double(r.did),
                       io::format_double(r.ci_low), io::format_double(r.ci_high), std::to_string(r.pre_months),
                       std::to_string(r.post_months)});
  ctx.write("did.csv", csv);
  *ctx.out << "did=" << io::format_fixed(r.did, 6) << " ci=[" << io::format_fixed(r.ci_low, 6) << ", "
           << io::format_fixed(r.ci_high, 6) << "]\n";
  return 0;
}

int cmd_adopt(RunContext& ctx, const AdoptArgs& a) {
  auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
  std::vector<detector::AdoptionGroup> groups;
  for (const auto& g : a.groups) {
    auto colon = g.find(':');
    std::string name = colon == std::string::npos ? g : g.substr(0, colon);
    std::string filters = colon == std::string::npos ? g : g.substr(colon + 1);
    groups.push_back({name, similarity::GroupFilter::parse(filters)});
  }
  if (groups.empty()) groups.push_back({"all", similarity::GroupFilter()});

  std::vector<bool> adopters;
  std::optional<detector::TrainedDetector> model;
  std::optional<detector::EmbeddingTable> emb;
  if (!a.model.empty()) {
    model = detector::load_model(ctx.read_input(a.model));
    if (!a.embeddings.empty()) emb = detector::EmbeddingTable::parse(ctx.read_input(a.embeddings));
    detector::Scorer scorer(*model, ctx.lexicons(), emb ? &*emb : nullptr);
    adopters = detector::predict_adopters(scorer, articles, a.threshold);
  } else {
    adopters = detector::label_adopters(articles);
  }
  auto series = detector::adoption_series(articles, adopters, groups, ctx.event_month);
  ctx.write("adoption.csv", detector::adoption_csv(series));
  for (const auto& s : series) {
    *ctx.out << s.group << ": baseline " << io::format_fixed(s.baseline_mean, 3) << "% over " << s.baseline_months
             << " month(s), " << s.points.size() << " month(s) total\n";
  }
  return 0;
}

int cmd_regress(RunContext& ctx, const RegressArgs& a) {
  auto spec = tables::ModelSpec::parse(ctx.read_input(a.spec));
  tables::DataTable table;
  if (!a.table.empty()) {
    table = tables::DataTable::parse_csv(ctx.read_input(a.table));
  } else if (!a.corpus.path.empty()) {
    rules::RuleOptions ropts;
    if (a.scale == "count") ropts.scale = rules::IndicatorScale::Count;
    else if (a.scale != "presence") throw ValidationError("--scale must be presence or count");
    auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
    auto rule_rows = rules::measure_corpus(articles, ctx.lexicons(), ropts);
    auto cov = corpus::build_covariates(articles, a.normalize);
    for (const auto& w : cov.warnings) ctx.warn(w);
    table = tables::build_panel(articles, rule_rows, cov);
    ctx.write("panel.csv", table.to_csv());
  } else {
    throw ValidationError("regress needs --table or --corpus");
  }
  auto run = tables::run_model(table, spec);
  ctx.write("regression.csv", run.table.csv);
  std::string notes;
  for (std::size_t i = 0; i < run.fits.size(); ++i) {
    const auto& f = run.fits[i];
    notes += run.titles[i] + ": n=" + std::to_string(f.n_obs) + " dropped_rows=" + std::to_string(run.dropped_rows[std::min(i, run.dropped_rows.size() - 1)]);
    if (f.r_squared) notes += " r2=" + io::format_fixed(*f.r_squared, 4);
    if (f.within_r_squared && spec.model == tables::ModelKind::Ols) notes += " within_r2=" + io::format_fixed(*f.within_r_squared, 4);
    if (f.log_likelihood) notes += " loglik=" + io::format_fixed(*f.log_likelihood, 4);
    if (!f.converged) notes += " NOT-CONVERGED";
    for (const auto& d : f.dropped) notes += " dropped_collinear=" + d;
    notes += "\n";
  }
  notes += "vce=" + std::string(econ::to_string(spec.vce)) + "\n";
  ctx.write("regression.txt", run.table.text + notes);
  *ctx.out << run.table.text << notes;
  return 0;
}

int cmd_train(RunContext& ctx, const TrainArgs& a) {
  auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
  std::optional<detector::EmbeddingTable> emb;
  if (!a.embeddings.empty()) emb = detector::EmbeddingTable::parse(ctx.read_input(a.embeddings));
  std::vector<corpus::Article> train;
  detector::SplitDates dates = split_dates(a.split);
  if (a.split.all_articles) {
    train = articles;
  } else {
    train = detector::temporal_split(articles, dates).train;
  }

  detector::TrainOptions opts;
  opts.folds = a.folds;
  opts.patience = a.patience;
  opts.max_epochs = a.max_epochs;
  opts.learning_rate = a.learning_rate;
  opts.l2_grid = a.l2;
  opts.hash_dims = a.hash_dims;
  opts.seed = ctx.seed;
  opts.features.rule_features = !a.no_rule_features;
  opts.features.length_features = !a.no_length_features;
  opts.features.embedding_dim = emb ? emb->dimension() : 0;

  std::vector<detector::Scope> scopes;
  if (a.all_scopes) {
    for (auto f : corpus::kAllFields) {
      for (int p = 1; p <= corpus::kMaxRevisionLabel; ++p) scopes.push_back({f, p});
      scopes.push_back({f, 0});
    }
  } else {
    scopes.push_back(detector::Scope::parse(a.field, a.prompt));
  }

  std::string summary = "scope,l2,hash_dim,cv_accuracy,epochs,distinct_features,collisions\n";
  std::size_t trained = 0;
  for (const auto& scope : scopes) {
    opts.scope = scope;
    detector::TrainedDetector d;
    try {
      d = detector::crossval_train(train, opts, ctx.lexicons(), emb ? &*emb : nullptr);
    } catch (const ValidationError& e) {
      if (!a.all_scopes) throw;
      ctx.warn("skipping " + scope.to_string() + ": " + e.what());
      continue;
    }
    d.metadata.emplace_back("train_end", a.split.all_articles ? "none" : dates.train_end.to_string());
    for (const auto& [k, v] : ctx.metadata().entries) {
      if (k != "timestamp") d.metadata.emplace_back("run." + k, v);
    }
    const auto name = model_file_name(scope);
    io::write_file_atomic(ctx.out_dir / (name + ".model"), detector::save_model(d));

    std::string cv = "l2,hash_dim,mean_accuracy,fold,accuracy,best_epoch\n";
    for (const auto& r : d.cv) {
      for (std::size_t f = 0; f < r.fold_accuracy.size(); ++f) {
        cv += io::csv_line({io::format_double(r.l2), std::to_string(r.hash_dim), io::format_double(r.mean_accuracy),
                            std::to_string(f), io::format_double(r.fold_accuracy[f]), std::to_string(r.best_epochs[f])});
      }
    }
    ctx.write(name + "_cv.csv", cv);
    double best_cv = 0;
    for (const auto& r : d.cv) {
      if (r.l2 == d.l2 && r.hash_dim == d.features.hash_dim) best_cv = r.mean_accuracy;
    }
    summary += io::csv_line({scope.to_string(), io::format_double(d.l2), std::to_string(d.features.hash_dim),
                             io::format_double(best_cv), std::to_string(d.epochs),
                             std::to_string(d.collisions.distinct_features), std::to_string(d.collisions.collisions())});
    *ctx.out << scope.to_string() << ": cv_accuracy=" << io::format_fixed(best_cv, 4) << " l2=" << d.l2
             << " hash_dim=" << d.features.hash_dim << " epochs=" << d.epochs
             << " collisions=" << d.collisions.collisions() << "/" << d.collisions.distinct_features << "\n";
    ++trained;
  }
  if (trained == 0) throw ValidationError("no scope had enough training data");
  ctx.write("train_summary.csv", summary);
  return 0;
}

int cmd_eval(RunContext& ctx, const EvalArgs& a) {
  auto model = detector::load_model(ctx.read_input(a.model));
  auto articles = ctx.load_corpus(a.corpus.path, a.corpus.format);
  std::optional<detector::EmbeddingTable> emb;
  if (!a.embeddings.empty()) emb = detector::EmbeddingTable::parse(ctx.read_input(a.embeddings));
  std::vector<corpus::Article> test =
      a.split.all_articles ? articles : detector::temporal_split(articles, split_dates(a.split)).test;
  detector::Scorer scorer(model, ctx.lexicons(), emb ? &*emb : nullptr);
  std::vector<std::string> warnings;
  auto report = detector::evaluate(scorer, test, a.threshold, &warnings);
  for (const auto& w : warnings) ctx.warn(w);
  ctx.write("metrics.csv", detector::metrics_csv(report));
  ctx.write("confusion.csv", detector::confusion_csv(report));
  ctx.write("confusion.txt", detector::confusion_text(report));
  ctx.write("probabilities.csv", detector::records_csv(report));
  *ctx.out << "precision=" << io::format_fixed(report.precision, 4) << " recall=" << io::format_fixed(report.recall, 4)
           << " accuracy=" << io::format_fixed(report.accuracy, 4) << " f1=" << io::format_fixed(report.f1, 4) << "\n"
           << detector::confusion_text(report);
  return 0;
}

int cmd_report(RunContext& ctx, const ReportArgs& a) {
  if (a.inputs.empty()) throw ValidationError("report needs at least one --input");
  for (const auto& input : a.inputs) {
    auto table = tables::DataTable::parse_csv(ctx.read_input(input));
    auto value_of = [](const std::string& s) -> std::optional<double> {
      if (s.empty() || s == "NA") return std::nullopt;
      return std::stod(s);
    };
    if (table.column("group") && table.column("adjusted_pct")) {
      const auto gcol = *table.column("group"), mcol = *table.column("month"), vcol = *table.column("adjusted_pct");
      std::map<std::string, std::vector<ChartPoint>> groups;
      std::vector<std::string> order;
      for (const auto& row : table.rows) {
        if (!groups.count(row[gcol])) order.push_back(row[gcol]);
        groups[row[gcol]].push_back({Month::parse(row[mcol]), value_of(row[vcol])});
      }
      for (const auto& g : order) {
        ChartSpec spec{"Adjusted adoption rate: " + g, "adjusted adoption (%)", groups[g], ctx.event_month};
        const auto stem = "adoption_" + file_stem(g);
        ctx.write_svg(stem + ".svg", line_chart(spec));
        std::string csv = "month,adjusted_pct\n";
        for (const auto& p : spec.points) {
          csv += p.month.to_string() + "," + (p.value ? io::format_double(*p.value) : "NA") + "\n";
        }
        ctx.write(stem + ".csv", csv);
        *ctx.out << "wrote " << stem << ".svg\n";
      }
    } else if (table.column("month") && table.column("value")) {
      const auto mcol = *table.column("month"), vcol = *table.column("value");
      ChartSpec spec{"Cosine similarity", "cosine similarity", {}, ctx.event_month};
      for (const auto& row : table.rows) spec.points.push_back({Month::parse(row[mcol]), value_of(row[vcol])});
      const auto stem = "series_" + file_stem(std::filesystem::path(input).stem().string());
      ctx.write_svg(stem + ".svg", line_chart(spec));
      std::string csv = "month,value\n";
      for (const auto& p : spec.points) {
        csv += p.month.to_string() + "," + (p.value ? io::format_double(*p.value) : "NA") + "\n";
      }
      ctx.write(stem + ".csv", csv);
      *ctx.out << "wrote " << stem << ".svg\n";
    } else {
      throw ValidationError("'" + input + "' is neither an adoption nor a similarity series CSV");
    }
  }
  return 0;
}

int cmd_synth(RunContext& ctx, const SynthArgs& a) {
  std::vector<corpus::Article> articles;
  if (a.kind == "two-style" || a.kind == "seven-style") {
    synth::StyleOptions o;
    o.docs_per_label = a.docs;
    o.seed = ctx.seed;
    articles = synth::style_corpus(o, a.kind == "two-style" ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2, 3, 4, 5, 6});
  } else if (a.kind == "adoption") {
    synth::AdoptionOptions o;
    o.per_month = a.docs;
    o.event = ctx.event_month;
    o.style.seed = ctx.seed;
    articles = synth::adoption_corpus(o);
  } else if (a.kind == "overlap") {
    synth::OverlapOptions o;
    o.per_month = a.docs;
    o.seed = ctx.seed;
    articles = synth::overlap_corpus(o);
  } else if (a.kind == "word-count") {
    articles = synth::word_count_corpus(a.docs, 50, 150, ctx.seed).articles;
  } else if (a.kind == "hedge") {
    articles = synth::hedge_corpus(a.docs, 0.044, ctx.seed);
  } else {
    throw ValidationError("unknown synth kind '" + a.kind + "'");
  }
  ctx.write(a.name, corpus::to_jsonl(articles));
  *ctx.out << "wrote " << articles.size() << " article(s) to " << (ctx.out_dir / a.name).string() << "\n";
  return 0;
}

}  // namespace stylelens::cli
