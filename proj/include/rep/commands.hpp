#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "rep/config.hpp"

namespace rep {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,          ///< usage, configuration or I/O error
    kExitHypothesis = 2,     ///< p'(rho0) >= a c^2 somewhere
    kExitNotSatisfied = 10,  ///< certify: criterion false; verify: some property failed
};

struct CommandContext {
    std::filesystem::path out_dir;
    bool quiet = false;
    std::ostream* log = nullptr;  ///< progress messages, suppressed by quiet
    std::ostream* err = nullptr;  ///< warnings and errors
};

/// certificate.json
int cmd_certify(const RunConfig& config, const CommandContext& ctx);
/// series.csv, profiles/snapshot_NNNNN.csv, breakdown.json, h_vs_bound.svg, profiles.svg
int cmd_simulate(const RunConfig& config, const CommandContext& ctx);
/// everything simulate writes, plus certificate.json (when the hypothesis holds) and verdict.json
int cmd_verify(const RunConfig& config, const CommandContext& ctx);

/// Parses the config and dispatches; maps exceptions to exit codes.
int run_command(std::string_view name, const std::filesystem::path& config_path, const CommandContext& ctx);

} // namespace rep
