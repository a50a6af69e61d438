#pragma once

#include "avsup/backend.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace avsup::cli {

/// Process exit status of the avsup tool.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kCollision = 3,
    kBackendFailure = 4,
    kIoFailure = 5,
};

struct RunOptions {
    std::optional<std::filesystem::path> scenario_path; // otherwise the built-in scenario
    BackendConfig backend;
    std::optional<double> decision_period;
    std::optional<double> dt;
    std::optional<double> duration;
    std::filesystem::path output_directory = "avsup_out";
    std::optional<std::filesystem::path> dump_scenario;
    bool emit_plots = false;
    bool record_transcript = false;
    bool quiet = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for --help; what() is the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `args` excludes the program name. Throws UsageError or HelpRequested.
RunOptions parse_args(const std::vector<std::string>& args);

/// Runs one simulation and writes trajectory.csv (and optionally the
/// transcript and plots) into the output directory.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// argv entry point used by the tool.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace avsup::cli
