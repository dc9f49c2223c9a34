#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace regint::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string anchor;  // equation tags the experiment exercises
};

/// All experiments, sorted by name.
const std::vector<ExperimentInfo>& experiment_table();
bool is_experiment(const std::string& name);
/// Comma-separated list of valid names.
std::string experiment_names();
/// One row per experiment: name, description, anchor.
std::string list_experiments();

/// Bad configuration: unknown experiment, unparsable JSON, unknown or mistyped field.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON config; errors carry line and column.
json parse_config(const std::string& text, const std::string& origin);

/// Default parameter block of an experiment.
json default_params(const std::string& experiment);
/// User fields override defaults; unknown fields and type mismatches are config errors.
json merge_params(const std::string& experiment, const json& user);

struct Csv {
  std::string name;
  std::string text;
};

struct Outcome {
  bool pass = false;
  json metrics = json::object();
  std::vector<Csv> csvs;
};

/// Runs one experiment on merged parameters. Metrics depend only on (experiment, params, seed).
Outcome run_experiment(const std::string& experiment, const json& params, std::uint64_t seed, int workers);

/// Throws config_error naming the first violation of the result.json schema.
void validate_result(const json& result);

struct RunRequest {
  std::string experiment;
  std::string config_path;  // empty: defaults only
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out_dir;      // empty: $TOOL_OUT, else "runs"
};

struct RunArtifacts {
  int exit_code = 1;
  std::filesystem::path run_dir;
  json result;
};

/// Full run: parse, execute, write config.json, result.json, CSVs and the `latest` pointer.
/// Exit code 0 on PASS, 2 on FAIL, 1 on errors (reported on err).
RunArtifacts run_command(const RunRequest& req, std::ostream& out, std::ostream& err);

}  // namespace regint::cli
