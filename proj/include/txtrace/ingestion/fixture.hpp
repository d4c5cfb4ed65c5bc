// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include <txtrace/ingestion/trace.hpp>

namespace txtrace {

struct Fixture {
    TransactionMeta meta;
    RawTrace trace;

    friend bool operator==(const Fixture&, const Fixture&) = default;
};

//! Reads {"meta": {...}, "trace": {"structLogs": [...], "failed": bool, "returnValue": hex}}.
//! Throws std::runtime_error for a missing file and SchemaError naming the field path.
[[nodiscard]] Fixture load_fixture(const std::filesystem::path& path);
[[nodiscard]] Fixture parse_fixture(const std::string& text);

void store_fixture(const std::filesystem::path& path, const Fixture& fixture);
[[nodiscard]] std::string serialize_fixture(const Fixture& fixture);

}  // namespace txtrace
