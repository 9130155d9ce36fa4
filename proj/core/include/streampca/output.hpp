#pragma once

// Rendering of experiment results to CSV, JSON and SVG. Everything is
// produced as strings first so byte-for-byte comparisons need no disk.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "streampca/config.hpp"
#include "streampca/experiment.hpp"
#include "streampca/stats.hpp"
#include "streampca/verify.hpp"

namespace streampca {

/// Header `t,F`, one row per sorted sample with F = k / N.
std::string cdf_csv(const EmpiricalCdf& cdf);
/// Inverse of cdf_csv: the t column. Throws std::runtime_error on bad input.
std::vector<double> parse_cdf_csv(const std::string& text);

/// Header `t,F_a,F_b`, one row per distinct pooled sample.
std::string pooled_csv(const EmpiricalCdf& a, const EmpiricalCdf& b);

/// Overlaid step plot of two CDFs on an 800x600 canvas.
std::string cdf_svg(const EmpiricalCdf& a, const std::string& label_a, const EmpiricalCdf& b,
                    const std::string& label_b);

struct RunSummary {
  ExperimentConfig config;
  std::vector<std::pair<std::string, double>> ks;
  std::optional<double> trace_vbar;
  std::optional<double> frob_vbar;
  std::vector<double> weights_top10;
  std::map<std::string, double> quantiles;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> extras;
};

/// JSON object with keys config_echo, ks, trace_vbar, frob_vbar,
/// weights_top10, quantiles, checks, extras (absent values are null).
std::string summary_json(const RunSummary& summary);

/// File name -> contents.
using FileSet = std::map<std::string, std::string>;

FileSet sampling_files(const ExperimentConfig& config, const SamplingResult& result);
FileSet bootstrap_files(const ExperimentConfig& config, const BootstrapResult& result);
FileSet reference_files(const ExperimentConfig& config, const ReferenceResult& result);
/// Sampling and bootstrap CDFs, their pooled CSV and SVG, and a summary with
/// the KS distance between them.
FileSet bootstrap_comparison_files(const ExperimentConfig& config, const SamplingResult& sampling,
                                   const BootstrapResult& bootstrap);
FileSet comparison_files(const ExperimentConfig& config, const ComparisonRun& run);
FileSet verify_files(const ExperimentConfig& config, const VerifyReport& report);

/// Creates `dir` if needed and writes every file in the set.
void write_files(const std::filesystem::path& dir, const FileSet& files);

}  // namespace streampca
