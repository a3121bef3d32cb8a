#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "experiment.hpp"

namespace noisyopt {

// ---------------------------------------------------------------------------
// Configuration documents
//
// A config is a JSON object. Every key is optional; missing keys take the
// default grid. Grid axes accept either short strings or objects:
//
//   {
//     "dimension": 10,                 // n for problems that do not set it
//     "trials": 10000, "budget": 500, "master_seed": 1,
//     "confidence": 0.95, "paired_rules": false,
//     "problems":   ["onemax", {"type": "pmax", "n": 12, "id": "pmax12"},
//                    {"type": "onemax", "noise_mean": 0, "noise_stddev": 0.5}],
//     "algorithms": ["rmhc", {"type": "opo-ea", "mutation_prob": 0.2}],
//     "rules":      ["fht", "fixed-budget"],
//     "r_values":   [1, 2, 5] | {"from": 1, "to": 50}
//   }
// ---------------------------------------------------------------------------

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw ConfigError(context.empty() ? key : context + "." + key, "unknown key");
    }
  }
}

inline std::uint64_t get_uint(const json& j, const std::string& key) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

inline std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "expected a string");
  return j.get<std::string>();
}

inline std::size_t get_dimension(const json& j, const std::string& key) {
  const std::uint64_t n = get_uint(j, key);
  if (n < 1) throw ConfigError(key, "must be at least 1");
  return static_cast<std::size_t>(n);
}

inline ProblemEntry parse_problem(const json& j, std::size_t default_n) {
  std::string type;
  std::string id;
  std::size_t n = default_n;
  NoiseModel noise;
  bool noise_given = false;
  if (j.is_string()) {
    type = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown_keys(j, {"type", "id", "n", "noise_mean", "noise_stddev"}, "problems");
    if (!j.contains("type")) throw ConfigError("problems.type", "missing");
    type = get_string(j["type"], "problems.type");
    if (j.contains("id")) id = get_string(j["id"], "problems.id");
    if (j.contains("n")) n = get_dimension(j["n"], "problems.n");
    if (j.contains("noise_mean")) {
      noise.mean = get_real(j["noise_mean"], "problems.noise_mean");
      noise_given = true;
    }
    if (j.contains("noise_stddev")) {
      noise.stddev = get_real(j["noise_stddev"], "problems.noise_stddev");
      noise_given = true;
    }
  } else {
    throw ConfigError("problems", "entries must be strings or objects");
  }
  if (id.empty()) id = type;
  if (type == "onemax") {
    if (!(noise.stddev >= 0.0)) throw ConfigError("problems.noise_stddev", "must be non-negative");
    return {id, OneMaxGaussian(n, noise)};
  }
  if (type == "pmax") {
    if (noise_given) throw ConfigError("problems.noise_mean", "not a pmax parameter");
    if (n > PMax::kMaxDimension) throw ConfigError("problems.n", "pmax requires n <= 62");
    return {id, PMax(n)};
  }
  throw ConfigError("problems.type", "unknown problem '" + type + "' (expected onemax or pmax)");
}

inline AlgorithmEntry parse_algorithm(const json& j) {
  std::string type;
  std::string id;
  std::optional<double> mutation_prob;
  if (j.is_string()) {
    type = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown_keys(j, {"type", "id", "mutation_prob"}, "algorithms");
    if (!j.contains("type")) throw ConfigError("algorithms.type", "missing");
    type = get_string(j["type"], "algorithms.type");
    if (j.contains("id")) id = get_string(j["id"], "algorithms.id");
    if (j.contains("mutation_prob")) {
      mutation_prob = get_real(j["mutation_prob"], "algorithms.mutation_prob");
      if (!(*mutation_prob > 0.0 && *mutation_prob <= 1.0)) {
        throw ConfigError("algorithms.mutation_prob", "must be in (0, 1]");
      }
    }
  } else {
    throw ConfigError("algorithms", "entries must be strings or objects");
  }
  if (id.empty()) id = type;
  if (type == "rmhc") {
    if (mutation_prob) throw ConfigError("algorithms.mutation_prob", "not an rmhc parameter");
    return {id, Rmhc{}};
  }
  if (type == "opo-ea") return {id, OnePlusOneEa{mutation_prob}};
  throw ConfigError("algorithms.type", "unknown algorithm '" + type + "' (expected rmhc or opo-ea)");
}

inline std::vector<std::uint32_t> parse_r_values(const json& j) {
  std::vector<std::uint64_t> raw;
  if (j.is_array()) {
    for (const auto& v : j) raw.push_back(get_uint(v, "r_values"));
  } else if (j.is_object()) {
    reject_unknown_keys(j, {"from", "to"}, "r_values");
    if (!j.contains("from") || !j.contains("to")) {
      throw ConfigError("r_values", "range needs both 'from' and 'to'");
    }
    const std::uint64_t from = get_uint(j["from"], "r_values.from");
    const std::uint64_t to = get_uint(j["to"], "r_values.to");
    if (from > to) throw ConfigError("r_values", "'from' exceeds 'to'");
    if (to > 0xffffffffULL) throw ConfigError("r_values.to", "too large");
    for (std::uint64_t r = from; r <= to; ++r) raw.push_back(r);
  } else {
    throw ConfigError("r_values", "expected an array or a {from, to} range");
  }
  std::vector<std::uint32_t> out;
  for (std::uint64_t r : raw) {
    if (r < 1) throw ConfigError("r_values", "values must be at least 1");
    if (r > 0xffffffffULL) throw ConfigError("r_values", "value too large");
    out.push_back(static_cast<std::uint32_t>(r));
  }
  return out;
}

}  // namespace detail

/// Parses and validates a config document. An empty document yields
/// `default_config()`. Throws ConfigError naming the offending key.
inline ExperimentConfig parse_config(std::string_view text) {
  using detail::json;
  ExperimentConfig cfg = default_config();
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return cfg;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "config document must be a JSON object");
  detail::reject_unknown_keys(doc,
                              {"dimension", "trials", "budget", "master_seed", "confidence",
                               "paired_rules", "problems", "algorithms", "rules", "r_values"},
                              "");

  std::size_t n = kDefaultDimension;
  if (doc.contains("dimension")) n = detail::get_dimension(doc["dimension"], "dimension");
  if (doc.contains("trials")) cfg.trials = detail::get_uint(doc["trials"], "trials");
  if (doc.contains("budget")) cfg.budget = detail::get_uint(doc["budget"], "budget");
  if (doc.contains("master_seed")) cfg.master_seed = detail::get_uint(doc["master_seed"], "master_seed");
  if (doc.contains("confidence")) cfg.confidence = detail::get_real(doc["confidence"], "confidence");
  if (doc.contains("paired_rules")) {
    if (!doc["paired_rules"].is_boolean()) throw ConfigError("paired_rules", "expected a boolean");
    cfg.paired_rules = doc["paired_rules"].get<bool>();
  }

  if (doc.contains("problems")) {
    if (!doc["problems"].is_array()) throw ConfigError("problems", "expected an array");
    cfg.problems.clear();
    for (const auto& p : doc["problems"]) cfg.problems.push_back(detail::parse_problem(p, n));
  } else if (n != kDefaultDimension) {
    cfg.problems = {{"onemax", OneMaxGaussian(n)}};
    if (n <= PMax::kMaxDimension) cfg.problems.push_back({"pmax", PMax(n)});
  }
  if (doc.contains("algorithms")) {
    if (!doc["algorithms"].is_array()) throw ConfigError("algorithms", "expected an array");
    cfg.algorithms.clear();
    for (const auto& a : doc["algorithms"]) cfg.algorithms.push_back(detail::parse_algorithm(a));
  }
  if (doc.contains("rules")) {
    if (!doc["rules"].is_array()) throw ConfigError("rules", "expected an array");
    cfg.rules.clear();
    for (const auto& r : doc["rules"]) {
      const std::string name = detail::get_string(r, "rules");
      const auto rule = parse_stopping_rule(name);
      if (!rule) throw ConfigError("rules", "unknown rule '" + name + "' (expected fht or fixed-budget)");
      cfg.rules.push_back(*rule);
    }
  }
  if (doc.contains("r_values")) cfg.r_values = detail::parse_r_values(doc["r_values"]);

  validate(cfg);
  return cfg;
}

/// Fully resolved config as a JSON value; `parse_config` of its dump
/// reproduces `cfg`.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  using detail::json;
  json problems = json::array();
  for (const auto& p : cfg.problems) {
    json e = {{"id", p.id}, {"type", std::string(problem_kind(p.spec))}, {"n", dimension(p.spec)}};
    if (const auto* om = std::get_if<OneMaxGaussian>(&p.spec)) {
      e["noise_mean"] = om->noise().mean;
      e["noise_stddev"] = om->noise().stddev;
    }
    problems.push_back(std::move(e));
  }
  json algorithms = json::array();
  for (const auto& a : cfg.algorithms) {
    json e = {{"id", a.id}, {"type", std::string(algorithm_kind(a.spec))}};
    if (const auto* ea = std::get_if<OnePlusOneEa>(&a.spec); ea && ea->mutation_prob) {
      e["mutation_prob"] = *ea->mutation_prob;
    }
    algorithms.push_back(std::move(e));
  }
  json rules = json::array();
  for (auto r : cfg.rules) rules.push_back(std::string(to_string(r)));
  return json{{"trials", cfg.trials},         {"budget", cfg.budget},
              {"master_seed", cfg.master_seed}, {"confidence", cfg.confidence},
              {"paired_rules", cfg.paired_rules}, {"problems", std::move(problems)},
              {"algorithms", std::move(algorithms)}, {"rules", std::move(rules)},
              {"r_values", cfg.r_values}};
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 11> kResultsColumns = {
    "problem", "algorithm", "rule", "r", "trials", "successes", "success_rate",
    "ci_low", "ci_high", "mean_evals_used", "mean_first_hit_evals"};

inline constexpr std::array<std::string_view, 5> kSummaryColumns = {
    "problem", "algorithm", "rule", "best_rate", "best_r"};

/// Locale-independent fixed-point rendering.
inline std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, decimals);
  return std::string(buf.data(), res.ptr);
}

namespace detail {

// Rates and interval bounds carry 10 decimals, averages 6.
inline constexpr int kRateDecimals = 10;
inline constexpr int kMeanDecimals = 6;

template <std::size_t N>
std::string join_header(const std::array<std::string_view, N>& cols) {
  std::string line;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) line += ',';
    line += cols[i];
  }
  line += '\n';
  return line;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
T parse_number(const std::string& field, const std::string& column, const std::string& path) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw IoError(path, "bad value '" + field + "' in column " + column);
  }
  return value;
}

}  // namespace detail

inline std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = detail::join_header(kResultsColumns);
  for (const ResultRow& row : rows) {
    out += row.problem + ',' + row.algorithm + ',' + row.rule + ',' + std::to_string(row.r) + ',' +
           std::to_string(row.trials) + ',' + std::to_string(row.successes) + ',' +
           format_fixed(row.success_rate, detail::kRateDecimals) + ',' +
           format_fixed(row.ci_low, detail::kRateDecimals) + ',' +
           format_fixed(row.ci_high, detail::kRateDecimals) + ',' +
           format_fixed(row.mean_evals_used, detail::kMeanDecimals) + ',';
    if (row.mean_first_hit_evals) out += format_fixed(*row.mean_first_hit_evals, detail::kMeanDecimals);
    out += '\n';
  }
  return out;
}

inline std::string summary_to_csv(const std::vector<BestRSummary>& summaries) {
  std::string out = detail::join_header(kSummaryColumns);
  for (const BestRSummary& s : summaries) {
    out += s.problem + ',' + s.algorithm + ',' + s.rule + ',' +
           format_fixed(s.best_rate, detail::kRateDecimals) + ',' + std::to_string(s.best_r) + '\n';
  }
  return out;
}

/// Parses results.csv text. `path` is only used in error messages.
inline std::vector<ResultRow> results_from_csv(std::string_view text, const std::string& path) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string expected = detail::join_header(kResultsColumns);
  expected.pop_back();
  if (!std::getline(in, line) || line != expected) {
    throw IoError(path, "missing or unexpected results.csv header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != kResultsColumns.size()) {
      throw IoError(path, "line " + std::to_string(line_no) + ": expected " +
                              std::to_string(kResultsColumns.size()) + " fields");
    }
    ResultRow row;
    row.problem = f[0];
    row.algorithm = f[1];
    row.rule = f[2];
    row.r = detail::parse_number<std::uint32_t>(f[3], "r", path);
    row.trials = detail::parse_number<std::uint64_t>(f[4], "trials", path);
    row.successes = detail::parse_number<std::uint64_t>(f[5], "successes", path);
    row.success_rate = detail::parse_number<double>(f[6], "success_rate", path);
    row.ci_low = detail::parse_number<double>(f[7], "ci_low", path);
    row.ci_high = detail::parse_number<double>(f[8], "ci_high", path);
    row.mean_evals_used = detail::parse_number<double>(f[9], "mean_evals_used", path);
    if (!f[10].empty()) {
      row.mean_first_hit_evals = detail::parse_number<double>(f[10], "mean_first_hit_evals", path);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  return results_from_csv(read_text_file(path), path.string());
}

/// Table-1 style pivot: one line per problem, one "rate% (r)" column per
/// (algorithm, rule) group.
inline std::string format_summary_table(const std::vector<BestRSummary>& summaries) {
  std::vector<std::string> problems;
  std::vector<std::pair<std::string, std::string>> columns;
  std::map<std::tuple<std::string, std::string, std::string>, const BestRSummary*> index;
  for (const auto& s : summaries) {
    if (std::find(problems.begin(), problems.end(), s.problem) == problems.end()) {
      problems.push_back(s.problem);
    }
    const std::pair<std::string, std::string> col{s.algorithm, s.rule};
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    index[{s.problem, s.algorithm, s.rule}] = &s;
  }
  std::ostringstream out;
  out << std::left;
  const auto cell = [&](const std::string& text, std::size_t width) {
    out << text << std::string(text.size() < width ? width - text.size() : 1, ' ');
  };
  cell("", 12);
  for (const auto& [alg, rule] : columns) cell(alg + "/" + rule, 22);
  out << '\n';
  for (const auto& p : problems) {
    cell(p, 12);
    for (const auto& [alg, rule] : columns) {
      auto it = index.find({p, alg, rule});
      if (it == index.end()) {
        cell("-", 22);
      } else {
        cell(format_fixed(100.0 * it->second->best_rate, 2) + "% (" +
                 std::to_string(it->second->best_r) + ")",
             22);
      }
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Run manifest and output directory
// ---------------------------------------------------------------------------

inline constexpr std::string_view kToolVersion =
#ifdef NOISYOPT_VERSION
    NOISYOPT_VERSION;
#else
    "unknown";
#endif

/// Everything needed to reproduce a run with the same binary.
struct RunManifest {
  ExperimentConfig config;
  std::string version = std::string(kToolVersion);
  std::string timestamp;  // ISO-8601 UTC
  unsigned threads = 1;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  using detail::json;
  const auto cells = enumerate_cells(m.config);
  json groups = json::array();
  for (const auto& p : m.config.problems)
    for (const auto& a : m.config.algorithms)
      for (auto rule : m.config.rules)
        groups.push_back({{"problem", p.id},
                          {"algorithm", a.id},
                          {"rule", std::string(to_string(rule))},
                          {"rows", m.config.r_values.size()}});
  return json{{"tool", "noisyopt"},
              {"version", m.version},
              {"timestamp", m.timestamp},
              {"master_seed", m.config.master_seed},
              {"threads", m.threads},
              {"rows", cells.size()},
              {"cells", std::move(groups)},
              {"config", config_to_json(m.config)}};
}

/// Reads the config echoed in a manifest.json.
inline ExperimentConfig config_from_manifest(std::string_view manifest_text) {
  detail::json doc;
  try {
    doc = detail::json::parse(manifest_text);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError("", std::string("malformed manifest: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("config")) throw ConfigError("config", "missing from manifest");
  return parse_config(doc["config"].dump());
}

/// Writes results.csv, summary.csv and manifest.json into `destination`,
/// creating the directory if needed.
inline void write_results(const std::vector<ResultRow>& rows,
                          const std::vector<BestRSummary>& summaries, const RunManifest& manifest,
                          const std::filesystem::path& destination) {
  std::error_code ec;
  std::filesystem::create_directories(destination, ec);
  if (ec) throw IoError(destination.string(), "cannot create directory: " + ec.message());
  write_text_file(destination / "results.csv", results_to_csv(rows));
  write_text_file(destination / "summary.csv", summary_to_csv(summaries));
  write_text_file(destination / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace noisyopt
