#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "context.hpp"

namespace stylelens::cli {

struct CorpusArgs {
  std::string path;
  std::string format = "auto";
};

struct IngestArgs {
  CorpusArgs corpus;
  std::string gender_table;
  std::string ethnicity_table;
  bool normalize = false;
};

struct RulesArgs {
  CorpusArgs corpus;
  std::string scale = "presence";
  std::size_t short_sentence = 20;
};

struct SimilarityArgs {
  CorpusArgs corpus;
  std::string mode = "centroid";
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
  bool stopwords = false;
  bool idf = false;
  std::string name = "series";
};

struct SeriesArgs {
  std::string treated;
  std::string control;
  std::size_t resamples = 1000;
  std::size_t block = 0;
  double confidence = 0.95;
};

struct AdoptArgs {
  CorpusArgs corpus;
  std::string model;
  std::string embeddings;
  std::vector<std::string> groups;
  double threshold = 0.5;
};

struct RegressArgs {
  std::string spec;
  std::string table;
  CorpusArgs corpus;
  bool normalize = false;
  std::string scale = "presence";
};

struct SplitArgs {
  std::string train_end = "2021-10-01";
  std::string test_start = "2021-10-01";
  std::string test_end = "2021-11-30";
  bool all_articles = false;
};

struct TrainArgs {
  CorpusArgs corpus;
  SplitArgs split;
  std::string field = "all";
  std::string prompt = "multiclass";
  bool all_scopes = false;
  int folds = 5;
  int patience = 10;
  int max_epochs = 100;
  double learning_rate = 0.05;
  std::vector<double> l2 = {1e-2, 1e-1, 1.0};
  std::vector<std::uint32_t> hash_dims = {1u << 16, 1u << 18};
  bool no_rule_features = false;
  bool no_length_features = false;
  std::string embeddings;
};

struct EvalArgs {
  CorpusArgs corpus;
  SplitArgs split;
  std::string model;
  std::string embeddings;
  double threshold = 0.5;
};

struct ReportArgs {
  std::vector<std::string> inputs;
};

struct SynthArgs {
  std::string kind = "two-style";
  std::size_t docs = 200;
  std::string name = "corpus.jsonl";
};

int cmd_ingest(RunContext& ctx, const IngestArgs& a);
int cmd_rules(RunContext& ctx, const RulesArgs& a);
int cmd_similarity(RunContext& ctx, const SimilarityArgs& a);
int cmd_series(RunContext& ctx, const SeriesArgs& a);
int cmd_adopt(RunContext& ctx, const AdoptArgs& a);
int cmd_regress(RunContext& ctx, const RegressArgs& a);
int cmd_train(RunContext& ctx, const TrainArgs& a);
int cmd_eval(RunContext& ctx, const EvalArgs& a);
int cmd_report(RunContext& ctx, const ReportArgs& a);
int cmd_synth(RunContext& ctx, const SynthArgs& a);

}  // namespace stylelens::cli
