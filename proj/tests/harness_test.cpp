#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "streampca/config.hpp"
#include "streampca/experiment.hpp"
#include "streampca/output.hpp"
#include "streampca/verify.hpp"

using namespace streampca;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 300;
  c.d = 5;
  c.trials = 24;
  c.replicates = 24;
  c.mc_m_estimate = 2000;
  c.mc_chisq = 2000;
  c.master_seed = 11;
  return c;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t k = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++k;
  }
  return k;
}

FileSet bootstrap_comparison(const ExperimentConfig& c, unsigned threads) {
  const SpectralModel m = spectral_decompose(c.covariance());
  return bootstrap_comparison_files(c, run_sampling_experiment(c, m, threads),
                                    run_bootstrap_experiment(c, m, threads));
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const ExperimentConfig c = parse_config(R"({"n": 1000, "d": 20, "m": 50})");
  EXPECT_EQ(c.n, 1000u);
  EXPECT_EQ(c.d, 20u);
  EXPECT_EQ(c.replicates, 50u);
  EXPECT_EQ(c.trials, 300u);
  EXPECT_EQ(c.beta, 1.0);
  EXPECT_NEAR(c.eta_n(), std::log(1000.0), 1e-15);
}

TEST(Config, FixedEtaRule) {
  const ExperimentConfig c = parse_config(R"({"eta_rule": {"fixed": 2.5}})");
  EXPECT_EQ(c.eta_n(), 2.5);
  EXPECT_THROW(parse_config(R"({"eta_rule": {"fixed": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"eta_rule": "sqrt_n"})"), ConfigError);
}

TEST(Config, RejectsInvalid) {
  EXPECT_THROW(parse_config(R"({"d": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"n": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"trials": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scale": -1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"c": -0.1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"n": 2.5})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config("{"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = small_config();
  c.eta_rule = {EtaRule::Kind::fixed, 3.0};
  c.output_dir = "elsewhere";
  const ExperimentConfig back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Experiments, SingleTrialAndReplicate) {
  ExperimentConfig c = small_config();
  c.trials = 1;
  c.replicates = 1;
  const SpectralModel m = spectral_decompose(c.covariance());
  const SamplingResult s = run_sampling_experiment(c, m, 1);
  ASSERT_EQ(s.cdf.count(), 1u);
  EXPECT_EQ(s.cdf(s.errors[0]), 1.0);
  EXPECT_EQ(s.median, s.errors[0]);
  const BootstrapResult b = run_bootstrap_experiment(c, m, 1);
  ASSERT_EQ(b.cdf.count(), 1u);
  EXPECT_EQ(b.quantiles.at("0.95"), b.run.errors[0]);
}

TEST(Experiments, ScaledErrorsUseLogN) {
  const ExperimentConfig c = small_config();
  const SamplingResult s = run_sampling_experiment(c, spectral_decompose(c.covariance()), 1);
  for (std::size_t t = 0; t < s.errors.size(); ++t) {
    EXPECT_DOUBLE_EQ(s.scaled[t], s.errors[t] * 300.0 / std::log(300.0));
    EXPECT_GE(s.errors[t], 0.0);
    EXPECT_LE(s.errors[t], 1.0);
  }
}

TEST(Experiments, SeedDeterminism) {
  const ExperimentConfig c = small_config();
  EXPECT_EQ(bootstrap_comparison(c, 1), bootstrap_comparison(c, 1));
  ExperimentConfig other = c;
  other.master_seed = 12;
  EXPECT_NE(bootstrap_comparison(other, 1).at("sampling_cdf.csv"),
            bootstrap_comparison(c, 1).at("sampling_cdf.csv"));
}

TEST(Experiments, ThreadCountDoesNotChangeOutput) {
  const ExperimentConfig c = small_config();
  const FileSet one = comparison_files(c, run_comparison(c, 1));
  const FileSet four = comparison_files(c, run_comparison(c, 4));
  ASSERT_EQ(one.size(), four.size());
  for (const auto& [name, body] : one) EXPECT_EQ(body, four.at(name)) << name;
}

TEST(Experiments, ModerateRunIsAccurate) {
  ExperimentConfig c;
  c.n = 10000;
  c.d = 20;
  c.trials = 200;
  const SamplingResult s = run_sampling_experiment(c, spectral_decompose(c.covariance()), 4);
  EXPECT_LT(s.mean, 0.05);
}

TEST(Reference, TwoDimensionalWeight) {
  // d = 2: one weight, (eta/n) M (1 - r^n) / (1 - r), with M computed from
  // the closed-form 2x2 square root and E Z^4 = 9/5.
  ExperimentConfig c = small_config();
  c.d = 2;
  c.mc_m_estimate = 200000;
  const SpectralModel m = spectral_decompose(c.covariance());
  const ReferenceResult r = run_reference(c, m, 2);

  const double a = 25.0, b = 12.5 * std::exp(-0.01), cc = 6.25;
  const double half_gap = std::sqrt(0.25 * (a - cc) * (a - cc) + b * b);
  const double l1 = 0.5 * (a + cc) + half_gap, l2 = 0.5 * (a + cc) - half_gap;
  const double norm1 = std::hypot(b, l1 - a);
  const double v1[2] = {b / norm1, (l1 - a) / norm1};
  const double v2[2] = {-v1[1], v1[0]};
  const double root_det = std::sqrt(a * cc - b * b);
  const double denom = std::sqrt(a + cc + 2 * root_det);
  const double s[2][2] = {{(a + root_det) / denom, b / denom}, {b / denom, (cc + root_det) / denom}};
  double p[2], q[2];
  for (int k = 0; k < 2; ++k) {
    p[k] = s[k][0] * v1[0] + s[k][1] * v1[1];
    q[k] = s[k][0] * v2[0] + s[k][1] * v2[1];
  }
  const double pp = p[0] * p[0] + p[1] * p[1], qq = q[0] * q[0] + q[1] * q[1];
  const double pq = p[0] * q[0] + p[1] * q[1];
  const double m11 = pp * qq + 2 * pq * pq + (9.0 / 5.0 - 3.0) * (p[0] * p[0] * q[0] * q[0] + p[1] * p[1] * q[1] * q[1]);
  const double eta = std::log(300.0);
  const double ratio = (1 + eta * l2 / 300.0) / (1 + eta * l1 / 300.0);
  const double rr = ratio * ratio;
  const double weight = eta / 300.0 * m11 * (1 - std::pow(rr, 300.0)) / (1 - rr);

  ASSERT_EQ(r.law.weights.size(), 2u);
  EXPECT_NEAR(r.law.weights[0], weight, 0.05 * weight);
  EXPECT_NEAR(r.law.weights[1], 0.0, 1e-10 * weight);
}

TEST(Reference, TraceEqualsWeightSum) {
  const ExperimentConfig c = small_config();
  const ReferenceResult r = run_reference(c, spectral_decompose(c.covariance()), 1);
  double sum = 0.0;
  for (double w : r.law.weights) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(r.trace_vbar, sum, 1e-8 * std::max(1.0, sum));
  EXPECT_EQ(r.samples.size(), c.mc_chisq);
}

TEST(Output, CompareIdenticalIsZero) {
  const EmpiricalCdf f({0.1, 0.2, 0.3});
  const Comparison cmp = compare(f, f, "same");
  EXPECT_EQ(cmp.ks, 0.0);
  EXPECT_EQ(cmp.label, "same");
}

TEST(Output, CsvRoundTrip) {
  const std::vector<double> xs{0.3, 1e-17, 2.0 / 3.0, 5.0};
  const std::string csv = cdf_csv(EmpiricalCdf(xs));
  EXPECT_EQ(csv.rfind("t,F\n", 0), 0u);
  EXPECT_EQ(count_of(csv, "\n"), 5u);
  EXPECT_EQ(parse_cdf_csv(csv), EmpiricalCdf(xs).sorted_samples());
  EXPECT_THROW(parse_cdf_csv("x,y\n1,2\n"), std::runtime_error);
}

TEST(Output, PooledCsv) {
  const std::string csv = pooled_csv(EmpiricalCdf({1.0, 2.0}), EmpiricalCdf({2.0, 3.0}));
  EXPECT_EQ(csv.rfind("t,F_a,F_b\n", 0), 0u);
  EXPECT_EQ(count_of(csv, "\n"), 4u);
}

TEST(Output, SvgShape) {
  const std::string svg = cdf_svg(EmpiricalCdf({1.0, 2.0}), "a <x>", EmpiricalCdf({1.5}), "b & c");
  EXPECT_EQ(count_of(svg, "<polyline"), 2u);
  EXPECT_EQ(count_of(svg, "viewBox=\"0 0 800 600\""), 1u);
  EXPECT_EQ(count_of(svg, "<svg"), 1u);
  EXPECT_EQ(count_of(svg, "</svg>"), 1u);
  EXPECT_NE(svg.find("a &lt;x&gt;"), std::string::npos);
  EXPECT_NE(svg.find("b &amp; c"), std::string::npos);
}

TEST(Output, LargeSampleSvgIsBounded) {
  std::vector<double> xs(100000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  const EmpiricalCdf f(xs);
  EXPECT_LT(cdf_svg(f, "a", f, "b").size(), 400000u);
}

TEST(Output, SummaryKeys) {
  RunSummary s;
  s.config = small_config();
  s.ks = {{"x", 0.25}};
  const std::string json = summary_json(s);
  for (const char* key : {"config_echo", "ks", "trace_vbar", "frob_vbar", "weights_top10",
                          "quantiles", "checks", "extras"}) {
    EXPECT_NE(json.find(std::string("\"") + key + "\""), std::string::npos) << key;
  }
  EXPECT_EQ(json.find("output_dir"), std::string::npos);
}

TEST(Output, WriteFiles) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "streampca_write";
  std::filesystem::remove_all(dir);
  write_files(dir / "nested", {{"a.txt", "hello"}});
  std::ifstream in(dir / "nested" / "a.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "hello");
}

TEST(Verify, ExactChecksPassAndMutationIsCaught) {
  EXPECT_TRUE(check_hoeffding_exactness(3, 8).pass);
  EXPECT_TRUE(check_bootstrap_hoeffding_exactness(3, 8).pass);
  EXPECT_TRUE(check_orthogonality({}).pass);
  EXPECT_TRUE(check_vbar_closed_form().pass);
  const VerifyOptions broken{true};
  EXPECT_FALSE(check_hoeffding_exactness(3, 8, broken).pass);
}

TEST(Verify, ReportListsEveryCheckOnce) {
  const VerifyReport report = run_verify(small_config(), 4);
  std::set<std::string> names;
  for (const CheckResult& c : report.checks) {
    EXPECT_TRUE(names.insert(c.name).second) << c.name;
    EXPECT_TRUE(c.pass) << c.name;
  }
  EXPECT_EQ(names, (std::set<std::string>{"hoeffding_exactness", "bootstrap_hoeffding_exactness",
                                          "orthogonality", "moments", "anticoncentration",
                                          "covariance_rate", "vbar_closed_form"}));
  EXPECT_TRUE(report.all_passed());
  EXPECT_THROW(report.checks[0].value("missing"), std::out_of_range);
}

#ifdef STREAMPCA_CLI_PATH
namespace {
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + STREAMPCA_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Cli, BadConfigExitsWithTwo) {
  EXPECT_EQ(run_cli(std::string("sampling --config \"") + STREAMPCA_TEST_DATA +
                    "/bad_config.json\""),
            2);
  EXPECT_EQ(run_cli("no-such-subcommand"), 2);
  EXPECT_EQ(run_cli(""), 2);
}

TEST(Cli, SamplingWritesFiles) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "streampca_cli_sampling";
  std::filesystem::remove_all(dir);
  const auto cfg = dir.string() + ".json";
  std::ofstream(cfg) << R"({"n": 200, "d": 4, "trials": 10})";
  ASSERT_EQ(run_cli("sampling --config \"" + cfg + "\" --out \"" + dir.string() + "\" --threads 2"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "sampling_cdf.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sampling_summary.json"));
}
#endif
