#pragma once

#include <string>

#include <json.hpp>

namespace zscomp {

/// Executes one CLI command against a parsed config object. Relative paths
/// resolve against base_dir. Returns the run summary; detailed reports and
/// exports are written under the config's output_dir. Throws Error on any
/// failure.
nlohmann::json run_command(const std::string& command, const nlohmann::json& config_json,
                           const std::string& base_dir);

} // namespace zscomp
