// noisyopt: runs the resampling/stopping-rule experiment grid.
//
//   noisyopt run --out DIR [--config FILE] [--seed N] [--threads N]
//   noisyopt summarize --results results.csv --out DIR
//   noisyopt replay --manifest manifest.json --problem ID --algorithm ID
//                   --rule fht|fixed-budget --r N --trial K
//
// Exit codes: 0 success, 1 config/usage error, 2 I/O error.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <noisyopt/noisyopt.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

int cmd_run(const RunArgs& args) {
  noisyopt::ExperimentConfig cfg =
      args.config_path.empty() ? noisyopt::default_config()
                               : noisyopt::parse_config(noisyopt::read_text_file(args.config_path));
  if (args.seed) cfg.master_seed = *args.seed;

  const auto start = std::chrono::steady_clock::now();
  const auto rows = noisyopt::run_experiment(cfg, args.threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto summaries = noisyopt::best_r_summary(rows);

  noisyopt::RunManifest manifest;
  manifest.config = cfg;
  manifest.timestamp = utc_timestamp();
  manifest.threads = args.threads;
  noisyopt::write_results(rows, summaries, manifest, args.out_dir);

  std::cout << noisyopt::format_summary_table(summaries);
  std::cerr << rows.size() << " cells, " << cfg.trials << " trials each, "
            << noisyopt::format_fixed(seconds, 1) << " s; results in " << args.out_dir << '\n';
  return kExitOk;
}

int cmd_summarize(const std::string& results_path, const std::string& out_dir) {
  const auto rows = noisyopt::read_results_csv(results_path);
  if (rows.empty()) throw noisyopt::IoError(results_path, "no result rows");
  const auto summaries = noisyopt::best_r_summary(rows);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw noisyopt::IoError(out_dir, "cannot create directory: " + ec.message());
  noisyopt::write_text_file(std::filesystem::path(out_dir) / "summary.csv",
                            noisyopt::summary_to_csv(summaries));
  std::cout << noisyopt::format_summary_table(summaries);
  return kExitOk;
}

struct ReplayArgs {
  std::string manifest_path;
  std::string problem;
  std::string algorithm;
  std::string rule;
  std::uint32_t r = 1;
  std::uint64_t trial = 0;
};

int cmd_replay(const ReplayArgs& args) {
  const auto cfg = noisyopt::config_from_manifest(noisyopt::read_text_file(args.manifest_path));
  const auto cells = noisyopt::enumerate_cells(cfg);
  const auto it = std::find_if(cells.begin(), cells.end(), [&](const noisyopt::Cell& c) {
    return cfg.problems[c.problem].id == args.problem &&
           cfg.algorithms[c.algorithm].id == args.algorithm &&
           noisyopt::to_string(cfg.rules[c.rule]) == args.rule && cfg.r_values[c.r_index] == args.r;
  });
  if (it == cells.end()) throw noisyopt::ConfigError("cell", "no such cell in the manifest grid");
  if (args.trial >= cfg.trials) throw noisyopt::ConfigError("trial", "index out of range");

  const auto result = noisyopt::run_cell_trial(cfg, *it, args.trial);
  nlohmann::json out = {
      {"problem", args.problem},
      {"algorithm", args.algorithm},
      {"rule", args.rule},
      {"r", args.r},
      {"trial", args.trial},
      {"seed", noisyopt::trial_seed(cfg.master_seed, noisyopt::stream_ordinal(cfg, *it), args.trial)},
      {"returned", result.returned.to_string()},
      {"success", result.success},
      {"evals_used", result.evals_used},
      {"iterations", result.iterations},
      {"first_hit_evals", result.first_hit_evals ? nlohmann::json(*result.first_hit_evals)
                                                 : nlohmann::json(nullptr)}};
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy optimisation benchmark: first-hitting-time vs fixed-budget evaluation"};
  app.set_version_flag("--version", std::string(noisyopt::kToolVersion));
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the experiment grid and write results");
  run->add_option("--config", run_args.config_path, "JSON config (defaults to the n=10 grid)");
  run->add_option("--out", run_args.out_dir, "Output directory")->required();
  run->add_option("--seed", run_args.seed, "Override master_seed");
  run->add_option("--threads", run_args.threads, "Worker threads (0 = auto)")->capture_default_str();

  std::string results_path;
  std::string summary_out;
  auto* summarize = app.add_subcommand("summarize", "Best-r summary from a results.csv");
  summarize->add_option("--results", results_path, "results.csv")->required();
  summarize->add_option("--out", summary_out, "Output directory for summary.csv")->required();

  ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "Re-run one trial of one cell from a manifest");
  replay->add_option("--manifest", replay_args.manifest_path, "manifest.json")->required();
  replay->add_option("--problem", replay_args.problem, "Problem id")->required();
  replay->add_option("--algorithm", replay_args.algorithm, "Algorithm id")->required();
  replay->add_option("--rule", replay_args.rule, "fht or fixed-budget")->required();
  replay->add_option("--r", replay_args.r, "Resampling rate")->required();
  replay->add_option("--trial", replay_args.trial, "Trial index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*summarize) return cmd_summarize(results_path, summary_out);
    if (*replay) return cmd_replay(replay_args);
  } catch (const noisyopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const noisyopt::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const noisyopt::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
