#include "streampca/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json_io.hpp"

namespace streampca {

double EtaRule::eta_for(std::size_t n) const {
  return kind == Kind::log_n ? std::log(static_cast<double>(n)) : value;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("config: n must be >= 2");
  if (d < 2) throw ConfigError("config: d must be >= 2");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
  if (!(c >= 0.0)) throw ConfigError("config: c must be >= 0");
  if (!(scale > 0.0)) throw ConfigError("config: scale must be > 0");
  if (!std::isfinite(beta)) throw ConfigError("config: beta must be finite");
  if (eta_rule.kind == EtaRule::Kind::fixed && !(eta_rule.value > 0.0)) {
    throw ConfigError("config: fixed eta must be > 0");
  }
  if (mc_m_estimate < 1 || mc_chisq < 1) throw ConfigError("config: Monte Carlo sizes must be >= 1");
}

namespace detail {

nlohmann::ordered_json config_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["n"] = config.n;
  j["d"] = config.d;
  j["beta"] = config.beta;
  j["c"] = config.c;
  j["scale"] = config.scale;
  j["trials"] = config.trials;
  j["replicates"] = config.replicates;
  if (config.eta_rule.kind == EtaRule::Kind::log_n) {
    j["eta_rule"] = "log_n";
  } else {
    j["eta_rule"] = {{"fixed", config.eta_rule.value}};
  }
  j["master_seed"] = config.master_seed;
  j["mc_m_estimate"] = config.mc_m_estimate;
  j["mc_chisq"] = config.mc_chisq;
  j["output_dir"] = config.output_dir;
  return j;
}

}  // namespace detail

namespace {

template <class T>
T get_as(const nlohmann::json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

std::size_t get_count(const nlohmann::json& value, const char* key) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw ConfigError(std::string("config: '") + key + "' must be a nonnegative integer");
  }
  return value.get<std::size_t>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  ExperimentConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "n") {
      config.n = get_count(value, "n");
    } else if (key == "d") {
      config.d = get_count(value, "d");
    } else if (key == "beta") {
      config.beta = get_as<double>(value, "beta");
    } else if (key == "c") {
      config.c = get_as<double>(value, "c");
    } else if (key == "scale") {
      config.scale = get_as<double>(value, "scale");
    } else if (key == "trials") {
      config.trials = get_count(value, "trials");
    } else if (key == "replicates" || key == "m") {
      config.replicates = get_count(value, key.c_str());
    } else if (key == "eta_rule") {
      if (value.is_string() && value.get<std::string>() == "log_n") {
        config.eta_rule = {EtaRule::Kind::log_n, 0.0};
      } else if (value.is_object() && value.size() == 1 && value.contains("fixed")) {
        config.eta_rule = {EtaRule::Kind::fixed, get_as<double>(value["fixed"], "eta_rule.fixed")};
      } else {
        throw ConfigError("config: eta_rule must be \"log_n\" or {\"fixed\": value}");
      }
    } else if (key == "master_seed") {
      if (!value.is_number_unsigned()) throw ConfigError("config: master_seed must be a u64");
      config.master_seed = value.get<std::uint64_t>();
    } else if (key == "mc_m_estimate") {
      config.mc_m_estimate = get_count(value, "mc_m_estimate");
    } else if (key == "mc_chisq") {
      config.mc_chisq = get_count(value, "mc_chisq");
    } else if (key == "output_dir") {
      config.output_dir = get_as<std::string>(value, "output_dir");
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  return detail::config_json(config).dump(2);
}

}  // namespace streampca
