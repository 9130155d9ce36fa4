#include "streampca/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"

namespace streampca {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Plot area inside the 800x600 canvas.
constexpr double kLeft = 70.0;
constexpr double kRight = 770.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 540.0;
constexpr std::size_t kMaxSteps = 2000;

struct Axis {
  double lo;
  double hi;
  double x(double t) const { return kLeft + (t - lo) / (hi - lo) * (kRight - kLeft); }
  static double y(double f) { return kBottom - f * (kBottom - kTop); }
};

std::string step_points(const EmpiricalCdf& cdf, const Axis& axis) {
  std::ostringstream pts;
  auto emit = [&](double t, double f) {
    pts << format_fixed(axis.x(t)) << ',' << format_fixed(Axis::y(f)) << ' ';
  };
  const auto& s = cdf.sorted_samples();
  emit(axis.lo, 0.0);
  if (s.size() <= kMaxSteps) {
    double prev = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double f = static_cast<double>(k + 1) / static_cast<double>(s.size());
      emit(s[k], prev);
      emit(s[k], f);
      prev = f;
    }
  } else {
    // Large samples: the step function evaluated on a uniform grid.
    double prev = 0.0;
    for (std::size_t g = 0; g <= kMaxSteps; ++g) {
      const double t = axis.lo + (axis.hi - axis.lo) * static_cast<double>(g) / kMaxSteps;
      const double f = cdf(t);
      emit(t, prev);
      emit(t, f);
      prev = f;
    }
  }
  emit(axis.hi, 1.0);
  std::string out = pts.str();
  out.pop_back();
  return out;
}

nlohmann::ordered_json pairs_json(const std::vector<std::pair<std::string, double>>& pairs) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : pairs) j[k] = v;
  return j;
}

nlohmann::ordered_json checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json entry;
    entry["name"] = c.name;
    entry["pass"] = c.pass;
    entry["values"] = pairs_json(c.values);
    j.push_back(std::move(entry));
  }
  return j;
}

std::vector<double> top10(const std::vector<double>& weights) {
  return {weights.begin(), weights.begin() + std::min<std::size_t>(10, weights.size())};
}

}  // namespace

std::string cdf_csv(const EmpiricalCdf& cdf) {
  const auto& s = cdf.sorted_samples();
  std::string out = "t,F\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += format_g17(s[k]);
    out += ',';
    out += format_g17(static_cast<double>(k + 1) / static_cast<double>(s.size()));
    out += '\n';
  }
  return out;
}

std::vector<double> parse_cdf_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,F") {
    throw std::runtime_error("parse_cdf_csv: missing header 't,F'");
  }
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("parse_cdf_csv: malformed row");
    try {
      out.push_back(std::stod(line.substr(0, comma)));
    } catch (const std::exception&) {
      throw std::runtime_error("parse_cdf_csv: malformed number '" + line + "'");
    }
  }
  return out;
}

std::string pooled_csv(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  std::vector<double> pooled = a.sorted_samples();
  pooled.insert(pooled.end(), b.sorted_samples().begin(), b.sorted_samples().end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
  std::string out = "t,F_a,F_b\n";
  for (double t : pooled) {
    out += format_g17(t) + ',' + format_g17(a(t)) + ',' + format_g17(b(t)) + '\n';
  }
  return out;
}

std::string cdf_svg(const EmpiricalCdf& a, const std::string& label_a, const EmpiricalCdf& b,
                    const std::string& label_b) {
  double lo = std::min(a.sorted_samples().front(), b.sorted_samples().front());
  double hi = std::max(a.sorted_samples().back(), b.sorted_samples().back());
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const Axis axis{lo, hi};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kLeft << "\" y=\"" << kBottom + 20 << "\" font-size=\"12\">"
      << format_g17(lo) << "</text>\n"
      << "<text x=\"" << kRight << "\" y=\"" << kBottom + 20
      << "\" font-size=\"12\" text-anchor=\"end\">" << format_g17(hi) << "</text>\n"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << kBottom
      << "\" font-size=\"12\" text-anchor=\"end\">0</text>\n"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << kTop + 4
      << "\" font-size=\"12\" text-anchor=\"end\">1</text>\n"
      << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\""
      << step_points(a, axis) << "\"/>\n"
      << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\""
      << step_points(b, axis) << "\"/>\n"
      << "<text x=\"" << kLeft + 20 << "\" y=\"" << kTop + 20
      << "\" font-size=\"14\" fill=\"#1f77b4\">" << escape_xml(label_a) << "</text>\n"
      << "<text x=\"" << kLeft + 20 << "\" y=\"" << kTop + 40
      << "\" font-size=\"14\" fill=\"#d62728\">" << escape_xml(label_b) << "</text>\n"
      << "</svg>\n";
  return svg.str();
}

std::string summary_json(const RunSummary& summary) {
  nlohmann::ordered_json j;
  // The output location is not an experiment parameter; leaving it out keeps
  // runs written to different directories byte-identical.
  j["config_echo"] = detail::config_json(summary.config);
  j["config_echo"].erase("output_dir");
  j["ks"] = pairs_json(summary.ks);
  j["trace_vbar"] = summary.trace_vbar ? nlohmann::ordered_json(*summary.trace_vbar) : nullptr;
  j["frob_vbar"] = summary.frob_vbar ? nlohmann::ordered_json(*summary.frob_vbar) : nullptr;
  j["weights_top10"] = summary.weights_top10;
  j["quantiles"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary.quantiles) j["quantiles"][k] = v;
  j["checks"] = checks_json(summary.checks);
  j["extras"] = pairs_json(summary.extras);
  return j.dump(2) + "\n";
}

FileSet sampling_files(const ExperimentConfig& config, const SamplingResult& result) {
  RunSummary s;
  s.config = config;
  s.extras = {{"mean_sin2", result.mean},
              {"median_sin2", result.median},
              {"eta_n", config.eta_n()}};
  return {{"sampling_cdf.csv", cdf_csv(result.cdf)},
          {"sampling_scaled_cdf.csv", cdf_csv(EmpiricalCdf(result.scaled))},
          {"sampling_summary.json", summary_json(s)}};
}

FileSet bootstrap_files(const ExperimentConfig& config, const BootstrapResult& result) {
  RunSummary s;
  s.config = config;
  s.quantiles = result.quantiles;
  s.extras = {{"sin2_vhat", result.sin2_vhat}, {"mean_error", result.cdf.mean()}};
  return {{"bootstrap_cdf.csv", cdf_csv(result.cdf)}, {"bootstrap_summary.json", summary_json(s)}};
}

FileSet reference_files(const ExperimentConfig& config, const ReferenceResult& result) {
  RunSummary s;
  s.config = config;
  s.trace_vbar = result.trace_vbar;
  s.frob_vbar = result.frob_vbar;
  s.weights_top10 = top10(result.law.weights);
  s.extras = {{"chisq_mean", result.law.mean()}, {"chisq_variance", result.law.variance()}};
  return {{"reference_cdf.csv", cdf_csv(EmpiricalCdf(result.samples))},
          {"reference_summary.json", summary_json(s)}};
}

FileSet bootstrap_comparison_files(const ExperimentConfig& config, const SamplingResult& sampling,
                                   const BootstrapResult& bootstrap) {
  FileSet files = sampling_files(config, sampling);
  files.merge(bootstrap_files(config, bootstrap));
  const Comparison c = compare(bootstrap.cdf, sampling.cdf, "bootstrap_vs_sampling");
  files["bootstrap_vs_sampling.csv"] = pooled_csv(bootstrap.cdf, sampling.cdf);
  files["bootstrap_vs_sampling.svg"] = cdf_svg(bootstrap.cdf, "bootstrap", sampling.cdf, "sampling");
  RunSummary s;
  s.config = config;
  s.ks = {{c.label, c.ks}};
  s.quantiles = bootstrap.quantiles;
  s.extras = {{"mean_sin2", sampling.mean}, {"sin2_vhat", bootstrap.sin2_vhat}};
  files["summary.json"] = summary_json(s);
  return files;
}

FileSet comparison_files(const ExperimentConfig& config, const ComparisonRun& run) {
  FileSet files = bootstrap_comparison_files(config, run.sampling, run.bootstrap);
  files.merge(reference_files(config, run.reference));
  const EmpiricalCdf scaled(run.sampling.scaled);
  const EmpiricalCdf reference(run.reference.samples);
  files["sampling_vs_reference.csv"] = pooled_csv(scaled, reference);
  files["sampling_vs_reference.svg"] = cdf_svg(scaled, "sampling (scaled)", reference, "reference");

  RunSummary s;
  s.config = config;
  s.ks = {{run.bootstrap_vs_sampling.label, run.bootstrap_vs_sampling.ks},
          {run.sampling_vs_reference.label, run.sampling_vs_reference.ks}};
  s.trace_vbar = run.reference.trace_vbar;
  s.frob_vbar = run.reference.frob_vbar;
  s.weights_top10 = top10(run.reference.law.weights);
  s.quantiles = run.bootstrap.quantiles;
  s.extras = {{"mean_sin2", run.sampling.mean},
              {"median_sin2", run.sampling.median},
              {"sin2_vhat", run.bootstrap.sin2_vhat}};
  files["summary.json"] = summary_json(s);
  return files;
}

FileSet verify_files(const ExperimentConfig& config, const VerifyReport& report) {
  RunSummary s;
  s.config = config;
  s.checks = report.checks;
  s.extras = {{"all_passed", report.all_passed() ? 1.0 : 0.0}};
  return {{"verify.json", summary_json(s)}};
}

void write_files(const std::filesystem::path& dir, const FileSet& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + (dir / name).string());
  }
}

}  // namespace streampca
