#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace loewner::cli {

// Scripts depend on these values.
enum ExitCode : int {
    kExitPass = 0,
    kExitConfigError = 1,
    kExitValidationFailure = 2,
    kExitComputationFailure = 3,
};

struct Invocation {
    std::string command;
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> format;   // csv | json
};

[[nodiscard]] const std::vector<std::string>& command_names();

/// Runs one subcommand. Results go to the output file (or `out` when no path
/// is configured); diagnostics go to `err`.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

/// As run, with the configuration given as text.
int run_text(const std::string& command, const std::string& config_text, std::optional<std::string> format,
             std::ostream& out, std::ostream& err);

} // namespace loewner::cli
