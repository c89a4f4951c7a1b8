#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lrdx/experiment.hpp"
#include "lrdx/memory.hpp"
#include "toml.hpp"

namespace lrdx {

using nlohmann::json;

std::string library_version() {
#ifdef LRDX_VERSION
  return LRDX_VERSION;
#else
  return "unknown";
#endif
}

TailModel TailConfig::build() const {
  if (family == "log-normal") return TailModel::log_normal(gamma, scale);
  if (family == "super-log-normal") return TailModel::super_log_normal(depth, gamma, scale);
  throw std::invalid_argument("unknown tail family '" + family + "'");
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  auto it = parameters.find(key);
  if (it == parameters.end() || it->second.empty()) return fallback;
  return it->second.front();
}

std::vector<double> ExperimentConfig::param_list(const std::string& key, std::vector<double> fallback) const {
  auto it = parameters.find(key);
  return it == parameters.end() ? fallback : it->second;
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::runtime_error("invalid config: " + join(problems)), problems_(problems) {}

namespace {

template <class T>
void read_field(const json& obj, const char* key, T& dst, const std::string& where, std::vector<std::string>& problems) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    dst = it->template get<T>();
  } catch (const std::exception&) {
    problems.push_back(where + key + " has the wrong type");
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& problems) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) problems.push_back("unknown key " + where + it.key());
  }
}

const json& section(const json& root, const char* name, std::vector<std::string>& problems) {
  static const json empty = json::object();
  auto it = root.find(name);
  if (it == root.end()) return empty;
  if (!it->is_object()) {
    problems.push_back(std::string(name) + " must be a table");
    return empty;
  }
  return *it;
}

ExperimentConfig config_from_json_value(const json& root) {
  std::vector<std::string> problems;
  if (!root.is_object()) throw ConfigError({"config root must be a table"});
  check_keys(root, {"schema_version", "experiment", "kind", "seed", "output", "workers", "memory", "tail", "grid",
                    "replicas", "truncation", "parameters"},
             "", problems);
  ExperimentConfig cfg;
  read_field(root, "schema_version", cfg.schema_version, "", problems);
  read_field(root, "experiment", cfg.id, "", problems);
  read_field(root, "kind", cfg.kind, "", problems);
  if (auto it = root.find("seed"); it != root.end()) {
    if (it->is_number_unsigned()) cfg.seed = it->get<std::uint64_t>();
    else if (it->is_number_integer() && it->get<std::int64_t>() >= 0) cfg.seed = static_cast<std::uint64_t>(it->get<std::int64_t>());
    else problems.push_back("seed must be a non-negative integer");
  }
  read_field(root, "output", cfg.output, "", problems);
  read_field(root, "workers", cfg.workers, "", problems);

  const json& mem = section(root, "memory", problems);
  check_keys(mem, {"m", "beta"}, "memory.", problems);
  read_field(mem, "m", cfg.m, "memory.", problems);
  read_field(mem, "beta", cfg.beta, "memory.", problems);

  const json& tail = section(root, "tail", problems);
  check_keys(tail, {"family", "gamma", "depth", "scale"}, "tail.", problems);
  read_field(tail, "family", cfg.tail.family, "tail.", problems);
  read_field(tail, "gamma", cfg.tail.gamma, "tail.", problems);
  read_field(tail, "depth", cfg.tail.depth, "tail.", problems);
  read_field(tail, "scale", cfg.tail.scale, "tail.", problems);

  const json& grid = section(root, "grid", problems);
  check_keys(grid, {"n"}, "grid.", problems);
  read_field(grid, "n", cfg.n_grid, "grid.", problems);

  const json& reps = section(root, "replicas", problems);
  check_keys(reps, {"count"}, "replicas.", problems);
  read_field(reps, "count", cfg.replicas, "replicas.", problems);

  const json& trunc = section(root, "truncation", problems);
  check_keys(trunc, {"k", "resolution", "delta0", "index_cap", "horizon"}, "truncation.", problems);
  read_field(trunc, "k", cfg.truncation, "truncation.", problems);
  read_field(trunc, "resolution", cfg.resolution, "truncation.", problems);
  read_field(trunc, "delta0", cfg.delta0, "truncation.", problems);
  read_field(trunc, "index_cap", cfg.index_cap, "truncation.", problems);
  read_field(trunc, "horizon", cfg.horizon, "truncation.", problems);

  const json& params = section(root, "parameters", problems);
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (it->is_number()) {
      cfg.parameters[it.key()] = {it->get<double>()};
    } else if (it->is_array() && std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number(); })) {
      cfg.parameters[it.key()] = it->get<std::vector<double>>();
    } else {
      problems.push_back("parameters." + it.key() + " must be a number or a list of numbers");
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON syntax error: ") + e.what()});
  }
  return config_from_json_value(root);
}

ExperimentConfig parse_config_toml(const std::string& text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML syntax error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError({msg.str()});
  }
  std::ostringstream out;
  out << toml::json_formatter{table};
  return parse_config_json(out.str());
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "json") return parse_config_json(text);
  if (ext == "toml") return parse_config_toml(text);
  throw ConfigError({"config file must end in .toml or .json: " + path});
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json root;
  root["schema_version"] = cfg.schema_version;
  root["experiment"] = cfg.id;
  root["kind"] = cfg.runner();
  root["seed"] = cfg.seed;
  root["output"] = cfg.output;
  root["workers"] = cfg.workers;
  root["memory"] = {{"m", cfg.m}, {"beta", cfg.beta}};
  root["tail"] = {{"family", cfg.tail.family}, {"gamma", cfg.tail.gamma}, {"depth", cfg.tail.depth}, {"scale", cfg.tail.scale}};
  root["grid"] = {{"n", cfg.n_grid}};
  root["replicas"] = {{"count", cfg.replicas}};
  root["truncation"] = {{"k", cfg.truncation},
                        {"resolution", cfg.resolution},
                        {"delta0", cfg.delta0},
                        {"index_cap", cfg.index_cap},
                        {"horizon", cfg.horizon}};
  json params = json::object();
  for (const auto& [k, v] : cfg.parameters) params[k] = v.size() == 1 ? json(v.front()) : json(v);
  root["parameters"] = params;
  return root.dump();
}

void apply_env_overrides(ExperimentConfig& cfg) {
  const char* env = std::getenv("LRDX_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (end == env || *end != '\0') throw ConfigError({std::string("LRDX_SEED is not an integer: ") + env});
  cfg.seed = static_cast<std::uint64_t>(v);
}

namespace {

// Non-finite doubles are stored as strings so the JSON round trip is exact.
json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("bad number in record: " + s);
  }
  return v.get<double>();
}

bool same_number(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

bool ResultRecord::same_results(const ResultRecord& other) const {
  if (experiment != other.experiment || kind != other.kind || parameters != other.parameters ||
      library_version != other.library_version || seed != other.seed || stats.size() != other.stats.size() ||
      checks.size() != other.checks.size()) {
    return false;
  }
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& a = stats[i];
    const auto& b = other.stats[i];
    if (a.n != b.n || a.name != b.name || a.replicas != b.replicas || !same_number(a.estimate, b.estimate) ||
        !same_number(a.std_error, b.std_error)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& a = checks[i];
    const auto& b = other.checks[i];
    if (a.name != b.name || a.relation != b.relation || a.passed != b.passed || !same_number(a.value, b.value) ||
        !same_number(a.threshold, b.threshold) || !same_number(a.upper, b.upper)) {
      return false;
    }
  }
  return true;
}

bool ResultRecord::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.passed; });
}

const StatEntry* ResultRecord::find(const std::string& name, std::int64_t n) const {
  for (const auto& s : stats)
    if (s.name == name && s.n == n) return &s;
  return nullptr;
}

std::string record_to_json(const ResultRecord& r) {
  json root;
  root["experiment"] = r.experiment;
  root["kind"] = r.kind;
  root["parameters"] = r.parameters.empty() ? json::object() : json::parse(r.parameters);
  json stats = json::array();
  for (const auto& s : r.stats) {
    stats.push_back({{"n", s.n},
                     {"stat_name", s.name},
                     {"estimate", number_to_json(s.estimate)},
                     {"stderr", number_to_json(s.std_error)},
                     {"n_replicas", s.replicas}});
  }
  root["stats"] = stats;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"value", number_to_json(c.value)},
                      {"threshold", number_to_json(c.threshold)},
                      {"upper", number_to_json(c.upper)},
                      {"relation", c.relation},
                      {"passed", c.passed}});
  }
  root["checks"] = checks;
  root["wall_clock_seconds"] = r.wall_clock_seconds;
  root["library_version"] = r.library_version;
  root["seed"] = r.seed;
  return root.dump(2);
}

ResultRecord record_from_json(const std::string& text) {
  const json root = json::parse(text);
  ResultRecord r;
  r.experiment = root.at("experiment").get<std::string>();
  r.kind = root.at("kind").get<std::string>();
  r.parameters = root.at("parameters").dump();
  for (const auto& s : root.at("stats")) {
    r.stats.push_back({s.at("n").get<std::int64_t>(), s.at("stat_name").get<std::string>(),
                       number_from_json(s.at("estimate")), number_from_json(s.at("stderr")),
                       s.at("n_replicas").get<std::int64_t>()});
  }
  for (const auto& c : root.at("checks")) {
    CheckEntry e;
    e.name = c.at("name").get<std::string>();
    e.value = number_from_json(c.at("value"));
    e.threshold = number_from_json(c.at("threshold"));
    e.upper = number_from_json(c.at("upper"));
    e.relation = c.at("relation").get<std::string>();
    e.passed = c.at("passed").get<bool>();
    r.checks.push_back(e);
  }
  r.wall_clock_seconds = root.at("wall_clock_seconds").get<double>();
  r.library_version = root.at("library_version").get<std::string>();
  r.seed = root.at("seed").get<std::uint64_t>();
  return r;
}

std::string record_to_csv(const ResultRecord& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& s : r.stats) {
    out += csv_field(r.experiment) + "," + std::to_string(s.n) + "," + csv_field(s.name) + "," +
           format_number(s.estimate) + "," + format_number(s.std_error) + "," + std::to_string(s.replicas) + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot open " + path + " for writing");
  f << text;
  f.flush();
  if (!f) throw std::ios_base::failure("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void export_record(const ResultRecord& record, const std::string& format, const std::string& path) {
  if (format == "json") {
    write_text_file(path, record_to_json(record) + "\n");
  } else if (format == "csv") {
    write_text_file(path, record_to_csv(record));
  } else {
    throw std::invalid_argument("unknown export format '" + format + "' (expected json or csv)");
  }
}

}  // namespace lrdx
