#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "terraspec/sequences.hpp"

namespace terraspec::cli {

inline constexpr std::string_view kToolName = "terraspec";
inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kInconclusive = 2, kAssertion = 3 };

struct CommandResult {
    int exit_code = kOk;
    std::string output;      ///< file contents (JSON or CSV)
    std::string diagnostic;  ///< human-readable message for stderr
};

[[nodiscard]] const std::vector<std::string>& commands();

/// Runs one subcommand against a parsed config. Domain and config errors are
/// reported through the exit code, never thrown.
[[nodiscard]] CommandResult run(std::string_view command, const nlohmann::json& config,
                                unsigned jobs = 1);

/// {"family": "...", "params": {...}} -> SequenceSpec.
[[nodiscard]] SequenceSpec parse_sequence(const nlohmann::json& j);

/// Hex SHA-256 of the canonical (key-sorted, compact) config dump.
[[nodiscard]] std::string config_digest(const nlohmann::json& config);

/// Applies TERRASPEC_SEED, when set, to config["seed"].
void apply_env_overrides(nlohmann::json& config);

}  // namespace terraspec::cli
