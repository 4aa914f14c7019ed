#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

namespace netsense::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kUnstable = 2,
    kUndefined = 3,
};

/// Entry point of the `netsense` executable. Messages go to `out`/`err` so tests can
/// capture them.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Merged configuration: config file < NETSENSE_SEED < command-line flags.
/// Exposed for tests.
nlohmann::json resolve_config(const nlohmann::json& file_config, const nlohmann::json& flag_overrides,
                              const char* env_seed);

}  // namespace netsense::cli
