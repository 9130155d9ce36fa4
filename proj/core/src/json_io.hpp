#pragma once

// Private to the harness library: keeps nlohmann/json out of public headers.

#include <json.hpp>

#include "streampca/config.hpp"

namespace streampca::detail {

nlohmann::ordered_json config_json(const ExperimentConfig& config);

}  // namespace streampca::detail
