#pragma once

// Issue and response-time ingestion: file formats, data-quality assessment,
// rule-based categorization, and the two-level RT averaging scheme.

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rulcast/quarter_points.hpp"

namespace rulcast::corpus {

enum class IssueKind { fault, enhancement };
enum class Category { server, network, database, configuration, other };
enum class ImpactScale { critical, major, medium, minor };
enum class Sign { degrading, improving };

std::string_view to_string(IssueKind kind);
std::string_view to_string(Category category);
std::string_view to_string(ImpactScale scale);
std::string_view sign_symbol(Sign sign);  // "+" or "-"

std::optional<IssueKind> parse_kind(std::string_view text);
std::optional<Category> parse_category(std::string_view text);
std::optional<ImpactScale> parse_impact(std::string_view text);
std::optional<Sign> parse_sign(std::string_view text);

inline constexpr std::array<int, 5> kStoryPointClasses{1, 2, 3, 5, 8};
bool is_story_point_class(int value);

struct IssueRecord {
  std::string id;
  IssueKind kind = IssueKind::fault;
  std::string title;
  std::string description;
  std::string reported_release;
  // Release in which the issue's CPV effect lands (fixed, shipped or
  // introduced). Absent for the unresolved pool.
  std::optional<std::string> resolved_release;
  std::optional<Category> category;
  std::string subcategory;
  ImpactScale impact = ImpactScale::minor;
  std::optional<int> story_points;
  Sign sign = Sign::degrading;

  bool unresolved() const { return !resolved_release.has_value(); }
  friend bool operator==(const IssueRecord&, const IssueRecord&) = default;
};

/// Impact scale to factor conversion. Factors are held in quarter units so
/// that SP x IF stays exact.
class ImpactFactorTable {
 public:
  /// critical 1.0, major 0.75, medium 0.5, minor 0.25
  ImpactFactorTable();
  /// Each factor must be a positive multiple of 0.25 no larger than 1.0.
  explicit ImpactFactorTable(const std::array<QuarterPoints, 4>& factors);

  QuarterPoints factor(ImpactScale scale) const { return factors_[static_cast<std::size_t>(scale)]; }

 private:
  std::array<QuarterPoints, 4> factors_;
};

// ---------------------------------------------------------------------------
// Data quality

enum class IssueField {
  id, kind, title, description, reported_release, resolved_release,
  category, subcategory, impact, story_points, sign,
};
inline constexpr std::size_t kIssueFieldCount = 11;
std::string_view column_name(IssueField field);
std::optional<IssueField> parse_field(std::string_view column);

/// id, kind, description, reported_release, impact, sign
std::vector<IssueField> default_required_fields();

struct RowProblem {
  std::size_t row = 0;
  std::string field;
  std::string message;
};

struct QualityReport {
  double completeness = 1.0;
  std::vector<std::string> duplicate_ids;
  std::vector<std::string> empty_descriptions;
  std::vector<std::string> unknown_labels;
  std::vector<std::string> timeliness_warnings;
  std::vector<RowProblem> malformed_rows;
  std::size_t record_count = 0;
};

QualityReport quality_report(const std::vector<IssueRecord>& records,
                             const std::vector<IssueField>& required = default_required_fields());

std::string render_text(const QualityReport& report);
std::string render_json(const QualityReport& report);

// ---------------------------------------------------------------------------
// Issue files

enum class IssueFormat { csv, json_lines };

struct LoadOptions {
  // Strict loading throws the first ParseError; lenient loading skips the
  // malformed row and records it in QualityReport::malformed_rows.
  bool strict = true;
  std::vector<IssueField> required = default_required_fields();
};

struct LoadedIssues {
  std::vector<IssueRecord> records;
  QualityReport quality;
};

LoadedIssues load_issues(std::istream& source, IssueFormat format, const LoadOptions& options = {});
LoadedIssues load_issues_file(const std::string& path, const LoadOptions& options = {});
IssueFormat format_for_path(const std::string& path);

void write_issues(std::ostream& out, const std::vector<IssueRecord>& records, IssueFormat format);

inline constexpr std::string_view kIssuesCsvHeader =
    "id,kind,title,description,reported_release,resolved_release,category,subcategory,impact,story_points,sign";

// ---------------------------------------------------------------------------
// Categorization

struct CategoryRule {
  // Alternatives separated by '|'; an alternative matches when every one of
  // its space-separated words occurs in the lowercased title + description.
  // "*" matches anything.
  std::string pattern;
  Category category = Category::other;
  std::string subcategory;
  int priority = 0;  // lower value wins
};

class CategoryMatrix {
 public:
  /// Throws Errc::parameter on duplicate priorities. A catch-all
  /// (other, other) rule is appended when none is present.
  explicit CategoryMatrix(std::vector<CategoryRule> rules);

  static CategoryMatrix defaults();
  static CategoryMatrix load(std::istream& in);  // CSV: priority,category,subcategory,pattern

  const std::vector<CategoryRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<CategoryRule> rules_;  // sorted by priority
};

struct CategoryLabel {
  Category category = Category::other;
  std::string subcategory;
  friend bool operator==(const CategoryLabel&, const CategoryLabel&) = default;
};

CategoryLabel categorize(const IssueRecord& record, const CategoryMatrix& matrix);

// ---------------------------------------------------------------------------
// Response-time samples

struct RtSampleSet {
  std::string release;
  std::string page;
  std::string environment;
  std::vector<double> samples_ms;
};

inline constexpr std::string_view kRtCsvHeader = "release,page,environment,sample_ms";

/// Groups consecutive rows sharing (release, page, environment) into sets.
std::vector<RtSampleSet> load_rt_samples(std::istream& in);
std::vector<RtSampleSet> load_rt_samples_file(const std::string& path);

/// Per page, the mean of its samples (the mean of per-loop means for equal
/// loops); then the unweighted mean across pages. Sets sharing a page label
/// are pooled. When `environment` is given only matching sets count;
/// otherwise a release measured under several environments is rejected.
double aggregate_rt(const std::vector<RtSampleSet>& sets, std::string_view release,
                    std::optional<std::string_view> environment = std::nullopt);

}  // namespace rulcast::corpus
