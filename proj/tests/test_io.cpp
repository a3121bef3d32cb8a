#include <catch_amalgamated.hpp>

#include <clocale>
#include <filesystem>

#include <noisyopt/io.hpp>

using namespace noisyopt;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("noisyopt_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ConfigError config_error(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError for: " << text);
  return ConfigError("", "");
}

ExperimentConfig random_config(RandomStream& rng) {
  ExperimentConfig cfg;
  const std::size_t problems = 1 + rng.below(3);
  for (std::size_t i = 0; i < problems; ++i) {
    const std::size_t n = 1 + rng.below(40);
    if (rng.coin()) {
      cfg.problems.push_back({"om" + std::to_string(i),
                              OneMaxGaussian(n, NoiseModel{rng.uniform01() - 0.5, rng.uniform01() * 3})});
    } else {
      cfg.problems.push_back({"pm" + std::to_string(i), PMax(n)});
    }
  }
  cfg.algorithms.push_back({"rmhc", Rmhc{}});
  if (rng.coin()) cfg.algorithms.push_back({"ea", OnePlusOneEa{}});
  if (rng.coin()) cfg.algorithms.push_back({"ea-fixed", OnePlusOneEa{0.05 + 0.9 * rng.uniform01()}});
  cfg.rules = rng.coin() ? std::vector{StoppingRule::FixedBudget}
                         : std::vector{StoppingRule::FirstHittingTime, StoppingRule::FixedBudget};
  std::uint32_t r = 0;
  const std::size_t count = 1 + rng.below(10);
  for (std::size_t i = 0; i < count; ++i) cfg.r_values.push_back(r += 1 + static_cast<std::uint32_t>(rng.below(5)));
  cfg.trials = 1 + rng.below(100000);
  cfg.budget = 1 + rng.below(10000);
  cfg.master_seed = rng();
  cfg.confidence = 0.5 + 0.49 * rng.uniform01();
  cfg.paired_rules = rng.coin();
  return cfg;
}

}  // namespace

TEST_CASE("empty config documents give the default grid", "[io]") {
  const auto cfg = parse_config("");
  CHECK(cfg == default_config());
  CHECK(parse_config("  {}\n") == default_config());
  CHECK(cfg.budget == 500);
  CHECK(cfg.trials == 10000);
  CHECK(cfg.r_values.size() == 50);
  CHECK(cfg.r_values.front() == 1);
  CHECK(cfg.r_values.back() == 50);
  REQUIRE(cfg.problems.size() == 2);
  CHECK(dimension(cfg.problems[0].spec) == 10);
  CHECK(std::get<OneMaxGaussian>(cfg.problems[0].spec).noise() == NoiseModel{0.0, 1.0});
  CHECK(cfg.algorithms.size() == 2);
  CHECK(cfg.rules.size() == 2);
}

TEST_CASE("config errors name the offending key", "[io]") {
  CHECK(config_error(R"({"trials": 0})").key() == "trials");
  CHECK_THAT(config_error(R"({"r_values": [1, 1]})").what(), ContainsSubstring("duplicate"));
  CHECK(config_error(R"({"r_values": [1, 1]})").key() == "r_values");
  CHECK(config_error(R"({"trails": 5})").key() == "trails");
  CHECK(config_error(R"({"budget": -3})").key() == "budget");
  CHECK(config_error(R"({"budget": "500"})").key() == "budget");
  CHECK(config_error(R"({"problems": [{"type": "pmax", "n": 63}]})").key() == "problems.n");
  CHECK(config_error(R"({"problems": [{"type": "onemax", "noise_stddev": -1}]})").key() ==
        "problems.noise_stddev");
  CHECK(config_error(R"({"problems": [{"type": "onemax", "sigma": 1}]})").key() == "problems.sigma");
  CHECK(config_error(R"({"problems": ["sphere"]})").key() == "problems.type");
  CHECK(config_error(R"({"algorithms": [{"type": "opo-ea", "mutation_prob": 0}]})").key() ==
        "algorithms.mutation_prob");
  CHECK(config_error(R"({"algorithms": [{"type": "rmhc", "mutation_prob": 0.1}]})").key() ==
        "algorithms.mutation_prob");
  CHECK(config_error(R"({"rules": ["first-hit"]})").key() == "rules");
  CHECK(config_error(R"({"r_values": {"from": 5, "to": 2}})").key() == "r_values");
  CHECK(config_error(R"({"r_values": [0, 1]})").key() == "r_values");
  CHECK(config_error(R"({"confidence": 1.5})").key() == "confidence");
  CHECK(config_error(R"({"trials": 10,)").key().empty());
  CHECK(config_error("[1, 2]").key().empty());
}

TEST_CASE("config documents with explicit axes", "[io]") {
  const auto cfg = parse_config(R"({
    "dimension": 12, "trials": 100, "budget": 1000, "master_seed": 18446744073709551615,
    "problems": ["onemax", {"type": "pmax", "id": "pmax-small", "n": 6},
                 {"type": "onemax", "id": "quiet", "noise_stddev": 0.25}],
    "algorithms": ["rmhc", {"type": "opo-ea", "mutation_prob": 0.2}],
    "rules": ["fixed-budget"],
    "r_values": {"from": 3, "to": 6}
  })");
  REQUIRE(cfg.problems.size() == 3);
  CHECK(cfg.problems[0].id == "onemax");
  CHECK(dimension(cfg.problems[0].spec) == 12);
  CHECK(cfg.problems[1].id == "pmax-small");
  CHECK(dimension(cfg.problems[1].spec) == 6);
  CHECK(std::get<OneMaxGaussian>(cfg.problems[2].spec).noise().stddev == 0.25);
  CHECK(std::get<OnePlusOneEa>(cfg.algorithms[1].spec).mutation_prob == 0.2);
  CHECK(cfg.rules == std::vector{StoppingRule::FixedBudget});
  CHECK(cfg.r_values == std::vector<std::uint32_t>{3, 4, 5, 6});
  CHECK(cfg.master_seed == 18446744073709551615ULL);
}

TEST_CASE("serialized configs parse back to the same config", "[io][property]") {
  CHECK(parse_config(serialize_config(default_config())) == default_config());
  RandomStream rng(123);
  for (int i = 0; i < 200; ++i) {
    const auto cfg = random_config(rng);
    REQUIRE(parse_config(serialize_config(cfg)) == cfg);
  }
}

TEST_CASE("results CSV layout", "[io]") {
  CHECK(results_to_csv({}) ==
        "problem,algorithm,rule,r,trials,successes,success_rate,ci_low,ci_high,mean_evals_used,"
        "mean_first_hit_evals\n");

  ResultRow row{"onemax", "rmhc", "fht", 7, 10000, 9744, 0.9744, 0.97115, 0.97737, 123.5, 61.25};
  const std::string csv = results_to_csv({row});
  CHECK(csv ==
        "problem,algorithm,rule,r,trials,successes,success_rate,ci_low,ci_high,mean_evals_used,"
        "mean_first_hit_evals\n"
        "onemax,rmhc,fht,7,10000,9744,0.9744000000,0.9711500000,0.9773700000,123.500000,61.250000\n");

  row.mean_first_hit_evals.reset();
  CHECK(results_to_csv({row}).ends_with(",123.500000,\n"));
  CHECK(summary_to_csv({{"pmax", "opo-ea", "fixed-budget", 0.01, 16}}) ==
        "problem,algorithm,rule,best_rate,best_r\npmax,opo-ea,fixed-budget,0.0100000000,16\n");
}

TEST_CASE("CSV output ignores the C locale", "[io]") {
  const char* previous = std::setlocale(LC_ALL, nullptr);
  const std::string saved = previous ? previous : "C";
  bool switched = false;
  for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE", "C.UTF-8"}) {
    if (std::setlocale(LC_ALL, name)) {
      switched = true;
      break;
    }
  }
  ResultRow row{"a", "b", "fht", 1, 3, 1, 1.0 / 3.0, 0.1, 0.7, 2.5, std::nullopt};
  const std::string csv = results_to_csv({row});
  std::setlocale(LC_ALL, saved.c_str());
  CHECK(csv.find("0.3333333333") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  (void)switched;
}

TEST_CASE("results CSV reads back", "[io][property]") {
  auto cfg = default_config();
  cfg.trials = 30;
  cfg.r_values = {1, 4};
  const auto rows = run_experiment(cfg);
  const std::string csv = results_to_csv(rows);
  const auto parsed = results_from_csv(csv, "mem");
  REQUIRE(parsed.size() == rows.size());
  CHECK(results_to_csv(parsed) == csv);
  CHECK(summary_to_csv(best_r_summary(parsed)) == summary_to_csv(best_r_summary(rows)));

  CHECK_THROWS_AS(results_from_csv("problem,r\n", "bad.csv"), IoError);
  CHECK_THROWS_AS(results_from_csv(csv + "x,y\n", "bad.csv"), IoError);
}

TEST_CASE("write_results produces the three files", "[io]") {
  auto cfg = default_config();
  cfg.trials = 20;
  cfg.r_values = {1, 2, 3};
  const auto rows = run_experiment(cfg);
  const auto summaries = best_r_summary(rows);
  CHECK(summaries.size() == 8);

  const auto dir = scratch_dir("write");
  RunManifest manifest{cfg, std::string(kToolVersion), "2024-01-01T00:00:00Z", 1};
  write_results(rows, summaries, manifest, dir / "nested");
  CHECK(read_text_file(dir / "nested" / "results.csv") == results_to_csv(rows));
  CHECK(read_text_file(dir / "nested" / "summary.csv") == summary_to_csv(summaries));

  const auto manifest_text = read_text_file(dir / "nested" / "manifest.json");
  CHECK(config_from_manifest(manifest_text) == cfg);
  const auto j = nlohmann::json::parse(manifest_text);
  CHECK(j["master_seed"] == cfg.master_seed);
  CHECK(j["rows"] == rows.size());
  CHECK(j["cells"].size() == 8);
  CHECK(j["cells"][0]["rows"] == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("I/O failures carry the path", "[io]") {
  const auto dir = scratch_dir("ioerr");
  std::filesystem::create_directories(dir);
  write_text_file(dir / "file", "x");
  try {
    RunManifest manifest;
    manifest.config = default_config();
    write_results({}, {}, manifest, dir / "file" / "sub");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK_THAT(e.path(), ContainsSubstring("file"));
  }
  CHECK_THROWS_AS(read_text_file(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary table pivots by algorithm and rule", "[io]") {
  const auto table = format_summary_table({{"onemax", "rmhc", "fht", 0.9744, 1},
                                           {"onemax", "rmhc", "fixed-budget", 0.6544, 7},
                                           {"pmax", "rmhc", "fht", 0.2867, 1}});
  CHECK_THAT(table, ContainsSubstring("rmhc/fixed-budget"));
  CHECK_THAT(table, ContainsSubstring("97.44% (1)"));
  CHECK_THAT(table, ContainsSubstring("65.44% (7)"));
}
