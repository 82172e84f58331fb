#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "revshare/cli/config.hpp"

namespace revshare::cli {

/// Environment variable naming the default directory for reports.
inline constexpr const char* kOutputDirEnv = "REVSHARE_OUTPUT_DIR";

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Report {
    std::string body;     // file contents (csv or json)
    std::string summary;  // one line, no newline
};

/// Runs a validated experiment and renders its report. Throws ConfigError
/// when validate() finds problems, and lets module errors propagate.
Report execute(const ExperimentConfig& config);

/// Report destination: `output` (relative paths resolved under `output_dir`
/// when one is given), else `output_dir/<command>.<format>`, else nothing
/// (standard output).
std::optional<std::filesystem::path> resolve_output(const ExperimentConfig& config, const char* output_dir);

/// Writes via a temporary file in the same directory and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// {"error": {"kind": ..., "message": ..., ...}} describing `e`.
nlohmann::json error_record(const std::exception& e);
int exit_code_for(const std::exception& e);

/// execute() plus delivery: writes the report and prints the summary to `out`
/// (or the report to `out` and the summary to `err` when there is no
/// destination). Failures print one JSON error record line to `err`.
/// Returns the process exit status.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err, const char* output_dir = nullptr);

}  // namespace revshare::cli
