// streampca: command-line driver for the streaming-PCA experiments.
//
//   streampca sampling  --config cfg.json --out dir
//   streampca bootstrap --seed 7 --threads 4
//   streampca reference | compare | verify
//
// Exit status: 0 success, 1 failed check or runtime error, 2 bad config.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "streampca/config.hpp"
#include "streampca/experiment.hpp"
#include "streampca/output.hpp"
#include "streampca/verify.hpp"

namespace {

using namespace streampca;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned threads = 1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", flags.out, "Output directory (overrides the config)");
  cmd->add_option("--threads", flags.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig config = flags.config_path.empty() ? ExperimentConfig{}
                                                      : load_config(flags.config_path);
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.out) config.output_dir = *flags.out;
  config.validate();
  return config;
}

void report(const ExperimentConfig& config, const FileSet& files) {
  write_files(config.output_dir, files);
  for (const auto& [name, contents] : files) {
    std::cout << "wrote " << config.output_dir << '/' << name << '\n';
  }
}

int run(const std::string& command, const CommonFlags& flags) {
  const ExperimentConfig config = resolve_config(flags);
  const unsigned threads = flags.threads;

  if (command == "verify") {
    const VerifyReport result = run_verify(config, threads);
    report(config, verify_files(config, result));
    for (const auto& check : result.checks) {
      std::cout << (check.pass ? "PASS " : "FAIL ") << check.name << '\n';
    }
    return result.all_passed() ? 0 : 1;
  }

  const SpectralModel model = spectral_decompose(config.covariance());
  if (command == "sampling") {
    const SamplingResult r = run_sampling_experiment(config, model, threads);
    report(config, sampling_files(config, r));
    std::cout << "mean sin^2 = " << r.mean << ", median = " << r.median << '\n';
  } else if (command == "bootstrap") {
    const BootstrapResult r = run_bootstrap_experiment(config, model, threads);
    report(config, bootstrap_files(config, r));
    std::cout << "sin^2(v_hat, v1) = " << r.sin2_vhat << '\n';
  } else if (command == "reference") {
    const ReferenceResult r = run_reference(config, model, threads);
    report(config, reference_files(config, r));
    std::cout << "trace(Vbar) = " << r.trace_vbar << '\n';
  } else if (command == "compare") {
    const ComparisonRun r = run_comparison(config, threads);
    report(config, comparison_files(config, r));
    std::cout << "ks bootstrap_vs_sampling = " << r.bootstrap_vs_sampling.ks << '\n'
              << "ks sampling_vs_reference = " << r.sampling_vs_reference.ks << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming PCA: Oja's algorithm, multiplier bootstrap and reference laws"};
  app.require_subcommand(1);

  CommonFlags flags;
  for (const char* name : {"sampling", "bootstrap", "reference", "compare", "verify"}) {
    add_common_flags(app.add_subcommand(name), flags);
  }
  app.get_subcommand("sampling")->description("Oja error law over independent datasets");
  app.get_subcommand("bootstrap")->description("Multiplier-bootstrap error law on one dataset");
  app.get_subcommand("reference")->description("Weighted chi-square reference law");
  app.get_subcommand("compare")->description("All three laws and their KS distances");
  app.get_subcommand("verify")->description("Run the exactness and Monte Carlo self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
