#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrdx/heavy_tails.hpp"

namespace lrdx {

inline constexpr int kSchemaVersion = 1;

std::string library_version();

struct TailConfig {
  std::string family = "log-normal";
  double gamma = 2.0;
  int depth = 1;
  double scale = 1.0;

  TailModel build() const;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string id;
  std::string kind;  // built-in runner; defaults to id
  int m = 2;
  double beta = 0.6;
  TailConfig tail;
  std::vector<std::int64_t> n_grid;
  std::int64_t replicas = 1000;
  int truncation = 64;
  std::int64_t resolution = 4096;
  double delta0 = 0.0;
  std::int64_t index_cap = 0;
  std::int64_t horizon = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output;
  // Kind-specific knobs; scalars are stored as one-element lists.
  std::map<std::string, std::vector<double>> parameters;

  double param(const std::string& key, double fallback) const;
  std::vector<double> param_list(const std::string& key, std::vector<double> fallback) const;
  const std::string& runner() const { return kind.empty() ? id : kind; }
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Problems found in the config; empty when it is valid.
std::vector<std::string> validate(const ExperimentConfig& cfg);

ExperimentConfig parse_config_toml(const std::string& text);
ExperimentConfig parse_config_json(const std::string& text);
// Format chosen by extension (.toml or .json).
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
// LRDX_SEED, when set, replaces the configured master seed.
void apply_env_overrides(ExperimentConfig& cfg);

struct StatEntry {
  std::int64_t n = 0;
  std::string name;
  double estimate = 0;
  double std_error = 0;
  std::int64_t replicas = 0;
  bool operator==(const StatEntry&) const = default;
};

struct CheckEntry {
  std::string name;
  double value = 0;
  double threshold = 0;
  std::string relation;  // "<=", "<", ">=", ">", "in" (threshold..upper)
  double upper = 0;
  bool passed = false;
  bool operator==(const CheckEntry&) const = default;
};

struct ResultRecord {
  std::string experiment;
  std::string kind;
  std::string parameters;  // canonical JSON echo of the config
  std::vector<StatEntry> stats;
  std::vector<CheckEntry> checks;
  double wall_clock_seconds = 0;
  std::string library_version;
  std::uint64_t seed = 0;

  bool operator==(const ResultRecord&) const = default;
  bool same_results(const ResultRecord& other) const;  // everything but wall clock
  bool all_passed() const;
  const StatEntry* find(const std::string& name, std::int64_t n) const;
};

std::vector<std::string> builtin_experiments();
ResultRecord run_experiment(const ExperimentConfig& cfg);

std::string record_to_json(const ResultRecord& record);
ResultRecord record_from_json(const std::string& text);
inline constexpr const char* kCsvHeader = "experiment,n,stat_name,estimate,stderr,n_replicas,seed";
std::string record_to_csv(const ResultRecord& record);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
// format: "json" or "csv".
void export_record(const ResultRecord& record, const std::string& format, const std::string& path);

}  // namespace lrdx
