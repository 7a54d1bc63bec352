#include "rulcast/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"

namespace rulcast::corpus {

namespace {

constexpr std::array<std::string_view, kIssueFieldCount> kColumns{
    "id", "kind", "title", "description", "reported_release", "resolved_release",
    "category", "subcategory", "impact", "story_points", "sign"};

using Cells = std::array<std::string, kIssueFieldCount>;

bool field_present(const IssueRecord& r, IssueField f) {
  switch (f) {
    case IssueField::id: return !r.id.empty();
    case IssueField::kind: return true;
    case IssueField::title: return !r.title.empty();
    case IssueField::description: return !r.description.empty();
    case IssueField::reported_release: return !r.reported_release.empty();
    case IssueField::resolved_release: return r.resolved_release.has_value();
    case IssueField::category: return r.category.has_value();
    case IssueField::subcategory: return !r.subcategory.empty();
    case IssueField::impact: return true;
    case IssueField::story_points: return r.story_points.has_value();
    case IssueField::sign: return true;
  }
  return false;
}

void scan_duplicates(const std::vector<IssueRecord>& records, QualityReport& q) {
  std::map<std::string, int> seen;
  for (const auto& r : records) {
    if (++seen[r.id] == 2) q.duplicate_ids.push_back(r.id);
  }
  for (const auto& r : records)
    if (r.description.empty()) q.empty_descriptions.push_back(r.id);
}

// Builds a record from raw cells; throws ParseError naming the row/field.
IssueRecord parse_cells(const Cells& c, std::size_t row, QualityReport& q) {
  auto cell = [&](IssueField f) -> const std::string& { return c[static_cast<std::size_t>(f)]; };
  auto fail = [&](IssueField f, const std::string& msg) -> ParseError {
    return ParseError(row, std::string(column_name(f)), msg);
  };
  auto unknown = [&](IssueField f) -> ParseError {
    std::string label = "row " + std::to_string(row) + ": " + std::string(column_name(f)) + " '" + cell(f) + "'";
    q.unknown_labels.push_back(label);
    return fail(f, "unknown label '" + cell(f) + "'");
  };

  IssueRecord r;
  r.id = cell(IssueField::id);
  if (r.id.empty()) throw fail(IssueField::id, "missing id");

  if (cell(IssueField::kind).empty()) throw fail(IssueField::kind, "missing value");
  auto kind = parse_kind(cell(IssueField::kind));
  if (!kind) throw unknown(IssueField::kind);
  r.kind = *kind;

  r.title = cell(IssueField::title);
  r.description = cell(IssueField::description);

  r.reported_release = cell(IssueField::reported_release);
  if (r.reported_release.empty()) throw fail(IssueField::reported_release, "missing value");
  Version reported;
  try {
    reported = Version(r.reported_release);
  } catch (const Error& e) {
    throw fail(IssueField::reported_release, e.what());
  }
  if (!cell(IssueField::resolved_release).empty()) {
    r.resolved_release = cell(IssueField::resolved_release);
    Version resolved;
    try {
      resolved = Version(*r.resolved_release);
    } catch (const Error& e) {
      throw fail(IssueField::resolved_release, e.what());
    }
    if (resolved < reported) {
      q.timeliness_warnings.push_back("row " + std::to_string(row) + ": issue " + r.id + " resolved in " +
                                      *r.resolved_release + " before it was reported in " + r.reported_release);
      throw fail(IssueField::resolved_release, "resolved before reported");
    }
  }

  if (!cell(IssueField::category).empty()) {
    auto cat = parse_category(cell(IssueField::category));
    if (!cat) throw unknown(IssueField::category);
    r.category = *cat;
  }
  r.subcategory = cell(IssueField::subcategory);

  if (cell(IssueField::impact).empty()) throw fail(IssueField::impact, "missing value");
  auto impact = parse_impact(cell(IssueField::impact));
  if (!impact) throw unknown(IssueField::impact);
  r.impact = *impact;

  if (!cell(IssueField::story_points).empty()) {
    const std::string& sp = cell(IssueField::story_points);
    int value = 0;
    bool numeric = std::all_of(sp.begin(), sp.end(), [](unsigned char ch) { return std::isdigit(ch); }) &&
                   sp.size() <= 3;
    if (numeric) value = std::stoi(sp);
    if (!numeric || !is_story_point_class(value))
      throw fail(IssueField::story_points, "story points must be one of 1,2,3,5,8 (got '" + sp + "')");
    r.story_points = value;
  }

  if (cell(IssueField::sign).empty()) throw fail(IssueField::sign, "missing value");
  auto sign = parse_sign(cell(IssueField::sign));
  if (!sign) throw unknown(IssueField::sign);
  r.sign = *sign;
  return r;
}

struct RowSink {
  const LoadOptions& options;
  LoadedIssues out;
  std::size_t required_total = 0;
  std::size_t required_present = 0;

  void accept(const Cells& cells, std::size_t row) {
    for (IssueField f : options.required) {
      ++required_total;
      if (!cells[static_cast<std::size_t>(f)].empty()) ++required_present;
    }
    try {
      out.records.push_back(parse_cells(cells, row, out.quality));
    } catch (const ParseError& e) {
      if (options.strict) throw;
      out.quality.malformed_rows.push_back({e.row(), e.field(), e.what()});
    }
  }

  LoadedIssues finish() {
    QualityReport& q = out.quality;
    q.record_count = out.records.size();
    q.completeness = required_total == 0 ? 1.0
                                         : static_cast<double>(required_present) / static_cast<double>(required_total);
    scan_duplicates(out.records, q);
    return std::move(out);
  }
};

std::string json_cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_trimmed(v.get<double>(), 6);
  return v.dump();
}

}  // namespace

std::string_view to_string(IssueKind kind) { return kind == IssueKind::fault ? "fault" : "enhancement"; }

std::string_view to_string(Category category) {
  switch (category) {
    case Category::server: return "server";
    case Category::network: return "network";
    case Category::database: return "database";
    case Category::configuration: return "configuration";
    case Category::other: return "other";
  }
  return "other";
}

std::string_view to_string(ImpactScale scale) {
  switch (scale) {
    case ImpactScale::critical: return "critical";
    case ImpactScale::major: return "major";
    case ImpactScale::medium: return "medium";
    case ImpactScale::minor: return "minor";
  }
  return "minor";
}

std::string_view sign_symbol(Sign sign) { return sign == Sign::degrading ? "+" : "-"; }

std::optional<IssueKind> parse_kind(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "fault") return IssueKind::fault;
  if (t == "enhancement") return IssueKind::enhancement;
  return std::nullopt;
}

std::optional<Category> parse_category(std::string_view text) {
  std::string t = to_lower(trim(text));
  for (Category c : {Category::server, Category::network, Category::database, Category::configuration,
                     Category::other})
    if (t == to_string(c)) return c;
  return std::nullopt;
}

std::optional<ImpactScale> parse_impact(std::string_view text) {
  std::string t = to_lower(trim(text));
  for (ImpactScale s : {ImpactScale::critical, ImpactScale::major, ImpactScale::medium, ImpactScale::minor})
    if (t == to_string(s)) return s;
  return std::nullopt;
}

std::optional<Sign> parse_sign(std::string_view text) {
  std::string t = trim(text);
  if (t == "+") return Sign::degrading;
  if (t == "-") return Sign::improving;
  return std::nullopt;
}

bool is_story_point_class(int value) {
  return std::find(kStoryPointClasses.begin(), kStoryPointClasses.end(), value) != kStoryPointClasses.end();
}

ImpactFactorTable::ImpactFactorTable()
    : factors_{QuarterPoints::from_units(4), QuarterPoints::from_units(3), QuarterPoints::from_units(2),
               QuarterPoints::from_units(1)} {}

ImpactFactorTable::ImpactFactorTable(const std::array<QuarterPoints, 4>& factors) : factors_(factors) {
  for (QuarterPoints f : factors_)
    if (f.units() <= 0 || f.units() > 4)
      throw Error(Errc::parameter, "impact factor " + f.str() + " outside (0, 1]");
}

std::string_view column_name(IssueField field) { return kColumns[static_cast<std::size_t>(field)]; }

std::optional<IssueField> parse_field(std::string_view column) {
  for (std::size_t i = 0; i < kColumns.size(); ++i)
    if (kColumns[i] == column) return static_cast<IssueField>(i);
  if (column == "impact_scale") return IssueField::impact;
  return std::nullopt;
}

std::vector<IssueField> default_required_fields() {
  return {IssueField::id, IssueField::kind, IssueField::description,
          IssueField::reported_release, IssueField::impact, IssueField::sign};
}

QualityReport quality_report(const std::vector<IssueRecord>& records, const std::vector<IssueField>& required) {
  QualityReport q;
  q.record_count = records.size();
  std::size_t total = 0, present = 0;
  for (const auto& r : records) {
    for (IssueField f : required) {
      ++total;
      if (field_present(r, f)) ++present;
    }
    if (r.resolved_release && Version(*r.resolved_release) < Version(r.reported_release))
      q.timeliness_warnings.push_back("issue " + r.id + " resolved in " + *r.resolved_release +
                                      " before it was reported in " + r.reported_release);
  }
  q.completeness = total == 0 ? 1.0 : static_cast<double>(present) / static_cast<double>(total);
  scan_duplicates(records, q);
  return q;
}

std::string render_text(const QualityReport& q) {
  std::ostringstream out;
  auto list = [&](std::string_view name, const std::vector<std::string>& items) {
    out << name << ": " << items.size() << '\n';
    for (const auto& item : items) out << "  " << item << '\n';
  };
  out << "records: " << q.record_count << '\n';
  out << "completeness: " << format_fixed(q.completeness, 4) << '\n';
  list("duplicate ids", q.duplicate_ids);
  list("empty descriptions", q.empty_descriptions);
  list("unknown labels", q.unknown_labels);
  list("timeliness warnings", q.timeliness_warnings);
  out << "malformed rows: " << q.malformed_rows.size() << '\n';
  for (const auto& p : q.malformed_rows) out << "  " << p.message << '\n';
  return out.str();
}

std::string render_json(const QualityReport& q) {
  nlohmann::ordered_json j;
  j["record_count"] = q.record_count;
  j["completeness"] = q.completeness;
  j["duplicate_ids"] = q.duplicate_ids;
  j["empty_descriptions"] = q.empty_descriptions;
  j["unknown_labels"] = q.unknown_labels;
  j["timeliness_warnings"] = q.timeliness_warnings;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& p : q.malformed_rows)
    rows.push_back({{"row", p.row}, {"field", p.field}, {"message", p.message}});
  j["malformed_rows"] = rows;
  return j.dump(2) + "\n";
}

LoadedIssues load_issues(std::istream& source, IssueFormat format, const LoadOptions& options) {
  if (!source) throw Error(Errc::io, "issue source is not readable");
  RowSink sink{options, {}};

  if (format == IssueFormat::csv) {
    CsvReader reader(source);
    CsvRow header;
    if (!reader.next(header)) throw ParseError(0, "<header>", "empty issues file");
    std::array<std::optional<std::size_t>, kIssueFieldCount> pos;
    for (std::size_t i = 0; i < header.size(); ++i) {
      auto f = parse_field(trim(header[i]));
      if (f) pos[static_cast<std::size_t>(*f)] = i;
    }
    for (std::size_t f = 0; f < kIssueFieldCount; ++f)
      if (!pos[f]) throw ParseError(0, std::string(kColumns[f]), "missing required column");

    CsvRow row;
    std::size_t n = 0;
    while (reader.next(row)) {
      ++n;
      if (row.size() == 1 && trim(row[0]).empty()) continue;
      Cells cells;
      for (std::size_t f = 0; f < kIssueFieldCount; ++f) {
        std::size_t at = *pos[f];
        cells[f] = at < row.size() ? trim(row[at]) : std::string();
      }
      sink.accept(cells, n);
    }
    return sink.finish();
  }

  std::string line;
  std::size_t n = 0;
  while (std::getline(source, line)) {
    ++n;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      ParseError err(n, "<record>", std::string("invalid JSON: ") + e.what());
      if (options.strict) throw err;
      sink.out.quality.malformed_rows.push_back({n, "<record>", err.what()});
      continue;
    }
    if (!obj.is_object()) {
      ParseError err(n, "<record>", "expected a JSON object");
      if (options.strict) throw err;
      sink.out.quality.malformed_rows.push_back({n, "<record>", err.what()});
      continue;
    }
    Cells cells;
    for (std::size_t f = 0; f < kIssueFieldCount; ++f) {
      auto it = obj.find(std::string(kColumns[f]));
      if (it == obj.end() && kColumns[f] == "impact") it = obj.find("impact_scale");
      if (it == obj.end()) throw ParseError(n, std::string(kColumns[f]), "missing required key");
      cells[f] = trim(json_cell(*it));
    }
    sink.accept(cells, n);
  }
  return sink.finish();
}

IssueFormat format_for_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return (ends_with(".jsonl") || ends_with(".ndjson") || ends_with(".json")) ? IssueFormat::json_lines
                                                                             : IssueFormat::csv;
}

LoadedIssues load_issues_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open issues file '" + path + "'");
  return load_issues(in, format_for_path(path), options);
}

void write_issues(std::ostream& out, const std::vector<IssueRecord>& records, IssueFormat format) {
  auto cells = [](const IssueRecord& r) {
    return CsvRow{r.id,
                  std::string(to_string(r.kind)),
                  r.title,
                  r.description,
                  r.reported_release,
                  r.resolved_release.value_or(""),
                  r.category ? std::string(to_string(*r.category)) : std::string(),
                  r.subcategory,
                  std::string(to_string(r.impact)),
                  r.story_points ? std::to_string(*r.story_points) : std::string(),
                  std::string(sign_symbol(r.sign))};
  };
  if (format == IssueFormat::csv) {
    out << kIssuesCsvHeader << '\n';
    for (const auto& r : records) write_csv_row(out, cells(r));
    return;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    CsvRow c = cells(r);
    for (std::size_t f = 0; f < kIssueFieldCount; ++f) j[std::string(kColumns[f])] = c[f];
    if (r.story_points) j["story_points"] = *r.story_points;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------

CategoryMatrix::CategoryMatrix(std::vector<CategoryRule> rules) : rules_(std::move(rules)) {
  std::set<int> priorities;
  bool has_default = false;
  for (const auto& rule : rules_) {
    if (!priorities.insert(rule.priority).second)
      throw Error(Errc::parameter, "duplicate category rule priority " + std::to_string(rule.priority));
    if (trim(rule.pattern) == "*" && rule.category == Category::other) has_default = true;
  }
  if (!has_default) {
    int lowest = priorities.empty() ? 0 : *priorities.rbegin();
    rules_.push_back({"*", Category::other, "other", lowest + 1});
  }
  std::sort(rules_.begin(), rules_.end(),
            [](const CategoryRule& a, const CategoryRule& b) { return a.priority < b.priority; });
}

CategoryMatrix CategoryMatrix::defaults() {
  return CategoryMatrix({
      {"overload|overloaded|peak traffic|out of memory|memory leak|cpu", Category::server, "overloaded server", 10},
      {"server crash|server hang|apache|mod_perl|server", Category::server, "server fault", 20},
      {"slow network|timeout|latency|network|connection reset", Category::network, "slow network services", 30},
      {"sluggish|javascript|browser|rendering|client", Category::network, "sluggish client", 40},
      {"slow query|query|index|innodb|myisam|mysql|oracle|postgres|database|table", Category::database,
       "slow database", 50},
      {"config|configuration|setting|parameter|install|upgrade", Category::configuration, "misconfiguration", 60},
      {"*", Category::other, "other", 1000},
  });
}

CategoryMatrix CategoryMatrix::load(std::istream& in) {
  CsvReader reader(in);
  CsvRow row;
  if (!reader.next(row)) throw ParseError(0, "<header>", "empty category matrix");
  std::vector<CategoryRule> rules;
  std::size_t n = 0;
  while (reader.next(row)) {
    ++n;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() < 4) throw ParseError(n, "<record>", "expected priority,category,subcategory,pattern");
    CategoryRule rule;
    try {
      rule.priority = std::stoi(trim(row[0]));
    } catch (const std::exception&) {
      throw ParseError(n, "priority", "not an integer");
    }
    auto cat = parse_category(row[1]);
    if (!cat) throw ParseError(n, "category", "unknown label '" + row[1] + "'");
    rule.category = *cat;
    rule.subcategory = trim(row[2]);
    rule.pattern = to_lower(trim(row[3]));
    rules.push_back(std::move(rule));
  }
  return CategoryMatrix(std::move(rules));
}

CategoryLabel categorize(const IssueRecord& record, const CategoryMatrix& matrix) {
  const std::string text = to_lower(record.title + " " + record.description);
  auto contains_all = [&](std::string_view alternative) {
    std::istringstream words{std::string(alternative)};
    std::string word;
    bool any = false;
    while (words >> word) {
      any = true;
      if (text.find(word) == std::string::npos) return false;
    }
    return any;
  };
  for (const auto& rule : matrix.rules()) {
    std::string_view pattern = rule.pattern;
    if (trim(pattern) == "*") return {rule.category, rule.subcategory};
    std::size_t start = 0;
    while (start <= pattern.size()) {
      std::size_t bar = pattern.find('|', start);
      std::string_view alt = pattern.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
      if (contains_all(alt)) return {rule.category, rule.subcategory};
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
  }
  return {Category::other, "other"};
}

// ---------------------------------------------------------------------------

std::vector<RtSampleSet> load_rt_samples(std::istream& in) {
  if (!in) throw Error(Errc::io, "RT sample source is not readable");
  CsvReader reader(in);
  CsvRow row;
  if (!reader.next(row)) throw ParseError(0, "<header>", "empty RT samples file");
  const std::vector<std::string> expected{"release", "page", "environment", "sample_ms"};
  std::array<std::size_t, 4> pos{};
  for (std::size_t k = 0; k < expected.size(); ++k) {
    auto it = std::find_if(row.begin(), row.end(), [&](const std::string& h) { return trim(h) == expected[k]; });
    if (it == row.end()) throw ParseError(0, expected[k], "missing required column");
    pos[k] = static_cast<std::size_t>(it - row.begin());
  }
  std::vector<RtSampleSet> sets;
  std::size_t n = 0;
  while (reader.next(row)) {
    ++n;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    auto cell = [&](std::size_t k) { return pos[k] < row.size() ? trim(row[pos[k]]) : std::string(); };
    std::string release = cell(0), page = cell(1), env = cell(2), sample = cell(3);
    if (release.empty()) throw ParseError(n, "release", "missing value");
    if (page.empty()) throw ParseError(n, "page", "missing value");
    double ms = 0;
    try {
      std::size_t used = 0;
      ms = std::stod(sample, &used);
      if (used != sample.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(n, "sample_ms", "not a number '" + sample + "'");
    }
    if (!(ms > 0) || !std::isfinite(ms)) throw ParseError(n, "sample_ms", "response time must be > 0 ms");
    if (sets.empty() || sets.back().release != release || sets.back().page != page ||
        sets.back().environment != env)
      sets.push_back({release, page, env, {}});
    sets.back().samples_ms.push_back(ms);
  }
  return sets;
}

std::vector<RtSampleSet> load_rt_samples_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open RT samples file '" + path + "'");
  return load_rt_samples(in);
}

double aggregate_rt(const std::vector<RtSampleSet>& sets, std::string_view release,
                    std::optional<std::string_view> environment) {
  const Version wanted{std::string(release)};
  std::map<std::string, std::vector<double>> pages;
  std::set<std::string> environments;
  for (const auto& set : sets) {
    if (Version(set.release) != wanted) continue;
    if (environment && set.environment != *environment) continue;
    if (set.samples_ms.empty()) continue;
    environments.insert(set.environment);
    auto& acc = pages[set.page];
    for (double ms : set.samples_ms) {
      if (!(ms > 0)) throw Error(Errc::parse, "non-positive RT sample for release " + std::string(release));
      acc.push_back(ms);
    }
  }
  if (pages.empty())
    throw Error(Errc::missing_data, "no RT samples for release " + std::string(release) +
                                        (environment ? " in environment " + std::string(*environment) : ""));
  if (environments.size() > 1)
    throw Error(Errc::missing_data, "release " + std::string(release) +
                                        " has RT samples from several environments; select one");
  double total = 0;
  for (auto& [page, samples] : pages) {
    // sorted summation makes the mean independent of sample order
    std::sort(samples.begin(), samples.end());
    double sum = 0;
    for (double ms : samples) sum += ms;
    total += sum / static_cast<double>(samples.size());
  }
  return total / static_cast<double>(pages.size());
}

}  // namespace rulcast::corpus
