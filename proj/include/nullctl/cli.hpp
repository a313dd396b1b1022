#pragma once

// Batch front end: one JSON run config per invocation, CSV/JSON/.dat outputs
// in a directory. Config keys are listed in docs/config.schema.json.

#include "nullctl/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nullctl {

struct RunOptions {
    std::filesystem::path out = ".";
    std::optional<Precision> precision; ///< overrides the config value
    std::uint64_t seed = 0;
};

/// Checks the command, key set and value types. Throws InvalidConfig.
void validate_config(const nlohmann::json& config);

/// Runs one command and writes its files; returns the paths written.
/// Throws Error.
std::vector<std::filesystem::path> run(const nlohmann::json& config, const RunOptions& options);

/// Full command line: parses flags, runs, reports failures as one JSON
/// object on `err`. Returns 0, 2 (model or validation error) or 3 (numerical).
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

/// %.17g, with inf/nan spelled out.
std::string format_real(double x);

} // namespace nullctl
