#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylelens/corpus.hpp"
#include "stylelens/econometrics.hpp"
#include "stylelens/rules.hpp"

namespace stylelens::tables {

/// Column-oriented view of a CSV with a header row. Cells are kept as
/// strings; "NA" and empty cells read as missing.
struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  static DataTable parse_csv(std::string_view content);
  std::optional<std::size_t> column(std::string_view name) const;
  std::string to_csv() const;
};

enum class ModelKind { Ols, Mlogit };

/// Flat key=value model file:
///   model      = ols | mlogit
///   response   = rule1a, rule2          (one column per response)
///   regressors = adopter, rev_*         (trailing * matches a prefix)
///   fe         = paper_id, month        (ols only)
///   vce        = hc1 | hc0 | classical
///   baseline   = 0                      (mlogit only)
///   layout     = table5 | table6 | table7
struct ModelSpec {
  ModelKind model = ModelKind::Ols;
  std::vector<std::string> responses;
  std::vector<std::string> regressors;
  std::vector<std::string> fixed_effects;
  econ::Vce vce = econ::Vce::HC1;
  int baseline = 0;
  econ::TableLayout layout = econ::TableLayout::Table6;

  static ModelSpec parse(std::string_view content);
};

struct AssembledDesign {
  econ::DesignMatrix design;
  std::size_t dropped_rows = 0;  // rows with a missing or non-numeric cell
};

/// Builds the design for one response. Regressor patterns are expanded
/// against the table header; fixed-effect columns are read as keys.
AssembledDesign assemble(const DataTable& table, const ModelSpec& spec, const std::string& response);

struct RegressionRun {
  std::vector<std::string> titles;
  std::vector<econ::FitResult> fits;
  std::vector<std::size_t> dropped_rows;
  std::optional<econ::MultinomialFit> logit;
  econ::RenderedTable table;
};

RegressionRun run_model(const DataTable& table, const ModelSpec& spec);

/// Analysis panel, one row per article:
///   id,paper_id,month,field,revision_label,adopter,rev_1..rev_6,
///   rule1a..rule10b, then the covariate columns.
DataTable build_panel(const std::vector<corpus::Article>& articles, const std::vector<rules::RuleRow>& rule_rows,
                      const corpus::CovariateTable& covariates);

}  // namespace stylelens::tables
