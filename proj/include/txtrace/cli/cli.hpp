// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace txtrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

//! Options shared by every subcommand. Endpoint and cache fall back to TXTRACE_RPC_URL and
//! TXTRACE_CACHE_DIR; with neither, only fixture files can be read.
struct RunConfig {
    std::optional<std::string> endpoint;
    std::optional<std::filesystem::path> cache_dir;
    std::optional<std::filesystem::path> config_dir;
    double train_fraction{0.7};
    bool memory_capture{false};
    std::optional<std::set<std::string>> template_filter;
    int jobs{0};  // 0: one worker per processor
    bool decode{false};
    std::optional<std::filesystem::path> out;
};

//! Tx list format: one transaction hash or fixture path per line; '#' starts a comment.
//! Relative paths resolve against the list file's directory first, then the working directory.
[[nodiscard]] std::vector<std::string> read_tx_list(const std::filesystem::path& list);

//! Entry point behind the txtrace binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace txtrace::cli
