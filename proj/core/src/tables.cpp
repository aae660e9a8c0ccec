#include "stylelens/tables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "stylelens/io.hpp"

namespace stylelens::tables {

namespace {

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty() || s == "NA" || s == "na" || s == "NaN") return std::nullopt;
  if (s == "true") return 1.0;
  if (s == "false") return 0.0;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> list_value(std::string_view v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

DataTable DataTable::parse_csv(std::string_view content) {
  auto rows = io::parse_csv(content);
  if (rows.empty()) throw ValidationError("table has no header row");
  DataTable t;
  t.columns = rows.front().fields;
  for (auto& c : t.columns) c = std::string(trim(c));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].fields.size() != t.columns.size()) {
      throw ValidationError("table line " + std::to_string(rows[i].line) + " has " +
                            std::to_string(rows[i].fields.size()) + " cells, expected " +
                            std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(rows[i].fields));
  }
  return t;
}

std::optional<std::size_t> DataTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::string DataTable::to_csv() const {
  std::string out = io::csv_line(columns);
  for (const auto& r : rows) out += io::csv_line(r);
  return out;
}

ModelSpec ModelSpec::parse(std::string_view content) {
  ModelSpec spec;
  bool layout_set = false;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("model file line " + std::to_string(line_no) + ": expected key=value");
    }
    auto key = ascii_lower(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (key == "model") {
      auto m = ascii_lower(value);
      if (m == "ols") spec.model = ModelKind::Ols;
      else if (m == "mlogit" || m == "logit") spec.model = ModelKind::Mlogit;
      else throw ValidationError("unknown model '" + std::string(value) + "'");
    } else if (key == "response") {
      spec.responses = list_value(value);
    } else if (key == "regressors") {
      spec.regressors = list_value(value);
    } else if (key == "fe") {
      spec.fixed_effects = list_value(value);
    } else if (key == "vce") {
      auto v = econ::parse_vce(value);
      if (!v) throw ValidationError("unknown vce '" + std::string(value) + "'");
      spec.vce = *v;
    } else if (key == "baseline") {
      auto b = parse_number(value);
      if (!b || *b != std::floor(*b)) throw ValidationError("baseline must be an integer class label");
      spec.baseline = static_cast<int>(*b);
    } else if (key == "layout") {
      auto l = econ::parse_layout(value);
      if (!l) throw ValidationError("unknown layout '" + std::string(value) + "'");
      spec.layout = *l;
      layout_set = true;
    } else {
      throw ValidationError("model file line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (spec.responses.empty()) throw ValidationError("model file names no response");
  if (spec.regressors.empty()) throw ValidationError("model file names no regressors");
  if (spec.model == ModelKind::Mlogit) {
    if (!spec.fixed_effects.empty()) throw ValidationError("fixed effects are not supported for mlogit");
    if (spec.responses.size() != 1) throw ValidationError("mlogit takes exactly one response");
    if (!layout_set) spec.layout = econ::TableLayout::Table5;
  }
  return spec;
}

AssembledDesign assemble(const DataTable& table, const ModelSpec& spec, const std::string& response) {
  auto ycol = table.column(response);
  if (!ycol) throw ValidationError("response column '" + response + "' not found");

  std::vector<std::size_t> xcols;
  std::vector<std::string> names;
  for (const auto& pattern : spec.regressors) {
    bool matched = false;
    const bool prefix = !pattern.empty() && pattern.back() == '*';
    const std::string_view stem = prefix ? std::string_view(pattern).substr(0, pattern.size() - 1) : pattern;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      const auto& c = table.columns[j];
      const bool hit = prefix ? c.compare(0, stem.size(), stem) == 0 : c == pattern;
      if (!hit || j == *ycol) continue;
      if (std::find(xcols.begin(), xcols.end(), j) != xcols.end()) continue;
      xcols.push_back(j);
      names.push_back(c);
      matched = true;
    }
    if (!matched) throw ValidationError("regressor '" + pattern + "' matches no column");
  }
  std::vector<std::size_t> fecols;
  for (const auto& fe : spec.fixed_effects) {
    auto c = table.column(fe);
    if (!c) throw ValidationError("fixed-effect column '" + fe + "' not found");
    fecols.push_back(*c);
  }

  std::vector<std::size_t> keep;
  std::vector<double> values;
  AssembledDesign out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    bool ok = true;
    std::vector<double> cells;
    cells.reserve(xcols.size() + 1);
    auto y = parse_number(row[*ycol]);
    if (!y) ok = false;
    else cells.push_back(*y);
    for (std::size_t j = 0; ok && j < xcols.size(); ++j) {
      auto v = parse_number(row[xcols[j]]);
      if (!v) ok = false;
      else cells.push_back(*v);
    }
    for (std::size_t j = 0; ok && j < fecols.size(); ++j) {
      auto key = trim(row[fecols[j]]);
      if (key.empty() || key == "NA") ok = false;
    }
    if (!ok) {
      ++out.dropped_rows;
      continue;
    }
    keep.push_back(i);
    values.insert(values.end(), cells.begin(), cells.end());
  }

  const auto n = static_cast<Eigen::Index>(keep.size());
  const auto k = static_cast<Eigen::Index>(xcols.size());
  out.design.columns = names;
  out.design.x.resize(n, k);
  out.design.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* r = values.data() + i * (k + 1);
    out.design.y(i) = r[0];
    for (Eigen::Index j = 0; j < k; ++j) out.design.x(i, j) = r[j + 1];
  }
  for (std::size_t f = 0; f < fecols.size(); ++f) {
    std::vector<std::string> keys;
    keys.reserve(keep.size());
    for (auto i : keep) keys.emplace_back(trim(table.rows[i][fecols[f]]));
    out.design.fixed_effects.push_back(econ::FixedEffect::from_keys(spec.fixed_effects[f], keys));
  }
  return out;
}

RegressionRun run_model(const DataTable& table, const ModelSpec& spec) {
  RegressionRun run;
  if (spec.model == ModelKind::Mlogit) {
    auto assembled = assemble(table, spec, spec.responses.front());
    econ::MultinomialOptions opts;
    opts.baseline_label = spec.baseline;
    opts.vce = spec.vce;
    run.logit = econ::fit_multinomial_logit(assembled.design, opts);
    run.dropped_rows.push_back(assembled.dropped_rows);
    std::size_t k = 0;
    for (int l : run.logit->labels) {
      if (l == run.logit->baseline_label) continue;
      run.titles.push_back("Version " + std::to_string(l));
      run.fits.push_back(run.logit->per_class[k++]);
    }
  } else {
    for (const auto& response : spec.responses) {
      auto assembled = assemble(table, spec, response);
      econ::OlsOptions opts;
      opts.vce = spec.vce;
      opts.fixed_effects = spec.fixed_effects;
      run.fits.push_back(econ::fit_ols_fe(assembled.design, opts));
      run.titles.push_back(response);
      run.dropped_rows.push_back(assembled.dropped_rows);
    }
  }
  std::vector<econ::TableColumn> cols;
  for (std::size_t i = 0; i < run.fits.size(); ++i) cols.push_back({run.titles[i], &run.fits[i]});
  run.table = econ::coefficient_table(cols, spec.layout);
  return run;
}

DataTable build_panel(const std::vector<corpus::Article>& articles, const std::vector<rules::RuleRow>& rule_rows,
                      const corpus::CovariateTable& covariates) {
  if (covariates.rows.size() != articles.size()) {
    throw ValidationError("covariate table and corpus differ in length");
  }
  std::unordered_map<std::string, const rules::RuleRow*> by_id;
  for (const auto& r : rule_rows) by_id[r.id] = &r;

  DataTable t;
  t.columns = {"id", "paper_id", "month", "field", "revision_label", "adopter"};
  for (int l = 1; l <= corpus::kMaxRevisionLabel; ++l) t.columns.push_back("rev_" + std::to_string(l));
  for (auto n : rules::RuleVector::names()) t.columns.emplace_back(n);
  const auto cov_names = corpus::CovariateTable::column_names();
  t.columns.insert(t.columns.end(), cov_names.begin(), cov_names.end());

  std::vector<std::size_t> order(articles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return articles[a].id < articles[b].id; });

  for (auto i : order) {
    const auto& a = articles[i];
    auto it = by_id.find(a.id);
    if (it == by_id.end()) throw ValidationError("no rule row for article '" + a.id + "'");
    std::vector<std::string> row = {a.id,
                                    a.paper_id,
                                    a.month().to_string(),
                                    std::string(corpus::to_string(a.field)),
                                    std::to_string(a.revision_label),
                                    a.is_adopter() ? "1" : "0"};
    for (int l = 1; l <= corpus::kMaxRevisionLabel; ++l) row.emplace_back(a.revision_label == l ? "1" : "0");
    for (double v : it->second->values.values()) row.push_back(io::format_double(v));
    for (double v : covariates.matrix_row(i)) row.push_back(io::format_double(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace stylelens::tables
