#pragma once

// JSON encodings shared by scenario files, search configs and reports.
// Complex numbers are [re, im]; matrices are row-major nested arrays.

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "histlab/explorer.hpp"
#include "histlab/records.hpp"

namespace histlab {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Malformed document. `where` names the line or field.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const Eigen::VectorXd& v);

Complex complex_from_json(const Json& j, const std::string& field);
Matrix matrix_from_json(const Json& j, const std::string& field);
Vector vector_from_json(const Json& j, const std::string& field);

enum class Check { classify, diosi_forward, diosi_reverse, robustness, records };
std::string_view to_string(Check c);
Check check_from_string(std::string_view s);

/// A parsed scenario document.
struct ScenarioFile {
  Scenario scenario;
  std::vector<Check> checks;
  std::optional<PhasePerturbation> perturbation;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  /// Conditions for the Diósi checks; empty means "those that apply".
  std::vector<Condition> conditions;
  /// Second subsystem for the Diósi checks.
  std::shared_ptr<const ScenarioFile> partner;
  bool near_identical = false;
  Json recorded;
};

/// Relative partner paths resolve against base_dir.
ScenarioFile scenario_file_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario_file(const std::filesystem::path& path);

/// Resolved form: explicit unitaries, projectors and history list.
Json scenario_to_json(const Scenario& s);
Json perturbation_to_json(const PhasePerturbation& p);

enum class SearchMode { venn, superprob, linear_positivity };
std::string_view to_string(SearchMode m);

struct SearchConfig {
  SampleConfig sample;
  SearchMode mode = SearchMode::venn;
  double margin = 1e-6;
};

SearchConfig search_config_from_json(const Json& j);
SearchConfig load_search_config(const std::filesystem::path& path);
Json search_config_to_json(const SearchConfig& c);

Json to_json(const DecoherenceFunctional& df, const HistorySet& h);
Json to_json(const ConditionReport& r);
Json to_json(const Witness& w);
Json to_json(const TestVerdict& v);
Json to_json(const RecordSet& r);

/// Parses text, converting byte offsets of syntax errors to line numbers.
Json parse_json_text(const std::string& text, const std::string& source);

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace histlab
