#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "stylelens/corpus.hpp"
#include "stylelens/rules.hpp"
#include "stylelens/tables.hpp"

using namespace stylelens;
using namespace stylelens::tables;

TEST(ModelSpec, ParsesKeys) {
  const auto s = ModelSpec::parse("# demo\nmodel = ols\nresponse = rule1a, rule2\nregressors = rev_*\nfe = month field\nvce = HC1\n");
  EXPECT_EQ(s.model, ModelKind::Ols);
  EXPECT_EQ(s.responses, (std::vector<std::string>{"rule1a", "rule2"}));
  EXPECT_EQ(s.regressors, (std::vector<std::string>{"rev_*"}));
  EXPECT_EQ(s.fixed_effects, (std::vector<std::string>{"month", "field"}));
  const auto m = ModelSpec::parse("model=mlogit\nresponse=revision_label\nregressors=rule1a\n");
  EXPECT_EQ(m.layout, econ::TableLayout::Table5);
}

TEST(ModelSpec, RejectsBadFiles) {
  EXPECT_THROW(ModelSpec::parse("model=probit\nresponse=y\nregressors=x\n"), ValidationError);
  EXPECT_THROW(ModelSpec::parse("response=y\n"), ValidationError);
  EXPECT_THROW(ModelSpec::parse("response=y\nregressors=x\ncolour=blue\n"), ValidationError);
  EXPECT_THROW(ModelSpec::parse("model=mlogit\nresponse=y\nregressors=x\nfe=month\n"), ValidationError);
  EXPECT_THROW(ModelSpec::parse("response=y\nregressors=x\nvce=HC9\n"), ValidationError);
}

TEST(Assemble, DropsIncompleteRowsAndExpandsPrefixes) {
  const auto t = DataTable::parse_csv("y,x1,x2,g\n1,2,3,a\nNA,1,1,a\n2,,1,b\n3,4,5,\n4,5,6,b\n");
  ModelSpec spec;
  spec.responses = {"y"};
  spec.regressors = {"x*"};
  spec.fixed_effects = {"g"};
  const auto a = assemble(t, spec, "y");
  EXPECT_EQ(a.dropped_rows, 3u);
  EXPECT_EQ(a.design.columns, (std::vector<std::string>{"x1", "x2"}));
  ASSERT_EQ(a.design.y.size(), 2);
  EXPECT_EQ(a.design.x(1, 1), 6.0);
  spec.regressors = {"z"};
  EXPECT_THROW(assemble(t, spec, "y"), ValidationError);
  EXPECT_THROW(DataTable::parse_csv("a,b\n1\n"), ValidationError);
}

TEST(RunModel, OlsMatchesDummyVariableOracle) {
  oracle::Gen g(5);
  std::string csv = "y,x,g\n";
  for (int i = 0; i < 60; ++i) {
    const int grp = i % 4;
    const double x = g.normal();
    csv += std::to_string(1.5 * x + grp + 0.1 * g.normal()) + "," + std::to_string(x) + ",g" + std::to_string(grp) + "\n";
  }
  const auto t = DataTable::parse_csv(csv);
  const auto spec = ModelSpec::parse("response=y\nregressors=x\nfe=g\n");
  const auto run = run_model(t, spec);
  ASSERT_EQ(run.fits.size(), 1u);
  const auto a = assemble(t, spec, "y");
  const auto beta = oracle::lsdv_coefficients(a.design);
  EXPECT_NEAR(run.fits[0].coef(0), beta(0), 1e-8);
  EXPECT_NEAR(run.fits[0].coef(0), 1.5, 0.1);
}

TEST(BuildPanel, OneSortedRowPerArticle) {
  const auto arts = corpus::load_corpus(STYLELENS_FIXTURES "/small.jsonl", corpus::Format::Jsonl);
  const auto& lex = text::LexiconSet::builtin();
  const auto rows = rules::measure_corpus(arts, lex);
  const auto cov = corpus::build_covariates(arts, false);
  const auto panel = build_panel(arts, rows, cov);
  ASSERT_EQ(panel.rows.size(), 3u);
  EXPECT_EQ(panel.rows[0][0], "s-1");
  EXPECT_EQ(panel.rows[1][*panel.column("rev_2")], "1");
  EXPECT_EQ(panel.rows[1][*panel.column("adopter")], "1");
  EXPECT_EQ(panel.rows[2][*panel.column("field")], "EE&SS");
  EXPECT_TRUE(panel.column("rule1a"));
  EXPECT_THROW(build_panel(arts, {}, cov), ValidationError);
}
